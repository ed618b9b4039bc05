"""Phase-space charts: Poisson structures, Hamiltonians, chart maps.

Every system follows the single flow convention ``zdot = {H, z}``.
With the bracket matrix ``Pi_ab(z) = {z_a, z_b}`` this reads
``zdot = Pi(z)^T grad H(z)``.  Bracket matrices are exactly
antisymmetric by construction; chart state order is positions first,
then momenta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .exactnum import Poly

Arr = np.ndarray


@dataclass(frozen=True)
class PhasePoint:
    """A state: chart label plus coordinates (positions then momenta)."""

    chart: str
    coords: tuple

    @property
    def dim(self) -> int:
        return len(self.coords)


def state_array(z) -> Arr:
    if isinstance(z, PhasePoint):
        return np.asarray(z.coords, dtype=float)
    return np.asarray(z, dtype=float)


@dataclass(frozen=True)
class PoissonStructure:
    """A point-dependent bracket matrix Pi(z)_ab = {z_a, z_b}."""

    name: str
    dim: int
    matrix: Callable[[Arr], Arr]
    description: str = ""
    constant: bool = False

    def at(self, z) -> Arr:
        m = np.asarray(self.matrix(state_array(z)), dtype=float)
        if m.shape != (self.dim, self.dim):
            raise ValueError("bracket matrix has wrong shape")
        return m


@dataclass(frozen=True)
class HamiltonianSystem:
    name: str
    state_names: tuple
    energy: Callable[[Arr], float]
    structure: PoissonStructure
    rhs: Callable[[Arr], Arr] | None = None
    default_state: tuple = ()

    @property
    def dim(self) -> int:
        return len(self.state_names)


@dataclass(frozen=True)
class ChartMap:
    """A map between charts with forward/inverse and analytic Jacobian.

    ``projection`` marks dimension-reducing maps; their ``inverse`` is
    a section (right inverse), so only forward(inverse(w)) = w holds.
    """

    name: str
    source: str
    target: str
    forward: Callable[[Arr], Arr]
    inverse: Callable[[Arr], Arr] | None = None
    jacobian: Callable[[Arr], Arr] | None = None
    projection: bool = False

    def jacobian_at(self, z) -> Arr:
        z = state_array(z)
        if self.jacobian is not None:
            return np.asarray(self.jacobian(z), dtype=float)
        return fd_jacobian(self.forward, z)


# ---------------------------------------------------------------------------
# finite differences

FD_STEP = 1e-6


def _steps(z: Arr) -> Arr:
    return FD_STEP * np.maximum(1.0, np.abs(z))


def fd_gradient(f: Callable[[Arr], float], z: Arr) -> Arr:
    z = np.asarray(z, dtype=float)
    g = np.empty_like(z)
    h = _steps(z)
    for i in range(z.size):
        zp, zm = z.copy(), z.copy()
        zp[i] += h[i]
        zm[i] -= h[i]
        g[i] = (f(zp) - f(zm)) / (2 * h[i])
    return g


def fd_jacobian(f: Callable[[Arr], Arr], z: Arr) -> Arr:
    z = np.asarray(z, dtype=float)
    f0 = np.asarray(f(z), dtype=float)
    J = np.empty((f0.size, z.size))
    h = _steps(z)
    for i in range(z.size):
        zp, zm = z.copy(), z.copy()
        zp[i] += h[i]
        zm[i] -= h[i]
        J[:, i] = (np.asarray(f(zp)) - np.asarray(f(zm))) / (2 * h[i])
    return J


# ---------------------------------------------------------------------------
# operations


def eval_hamiltonian(system: HamiltonianSystem, z) -> float:
    return float(system.energy(state_array(z)))


def poisson_bracket(f: Callable[[Arr], float], g: Callable[[Arr], float],
                    structure: PoissonStructure, z) -> float:
    """{f, g}(z) with central finite-difference gradients."""
    z = state_array(z)
    return float(fd_gradient(f, z) @ structure.at(z) @ fd_gradient(g, z))


def hamiltonian_vector_field(system: HamiltonianSystem, z) -> Arr:
    """zdot = {H, z} = Pi(z)^T grad H(z)."""
    z = state_array(z)
    if system.rhs is not None:
        return np.asarray(system.rhs(z), dtype=float)
    return structure_vector_field(system.energy, system.structure, z)


def structure_vector_field(energy, structure: PoissonStructure, z) -> Arr:
    z = state_array(z)
    return structure.at(z).T @ fd_gradient(energy, z)


@dataclass(frozen=True)
class CanonicalReport:
    verdict: str                 # canonical | poisson | neither
    max_push_deviation: float    # max |J Pi_s J^T - Pi_t(image)|
    max_form_deviation: float    # max |Pi_s(z) - Pi_t(image)|
    samples: int
    tol: float

    def render(self) -> str:
        return (
            f"{self.verdict} (push dev {self.max_push_deviation:.3e}, "
            f"form dev {self.max_form_deviation:.3e}, {self.samples} samples)"
        )


def check_canonical(chart_map: ChartMap, source: PoissonStructure,
                    target: PoissonStructure, samples, tol: float = 1e-9) -> CanonicalReport:
    """Classify a chart map as canonical, Poisson, or neither.

    A map is a Poisson map when the pushed-forward bracket matrix
    ``J Pi_s J^T`` equals the target bracket at the image point; it is
    canonical when additionally the bracket matrix itself is preserved
    (``Pi_s(z) = Pi_t(image)``, possible only between equal-dimension
    charts).
    """
    push_dev = 0.0
    form_dev = 0.0 if source.dim == target.dim and not chart_map.projection else math.inf
    count = 0
    for z in samples:
        z = state_array(z)
        J = chart_map.jacobian_at(z)
        w = np.asarray(chart_map.forward(z), dtype=float)
        push = J @ source.at(z) @ J.T
        push_dev = max(push_dev, float(np.max(np.abs(push - target.at(w)))))
        if math.isfinite(form_dev):
            form_dev = max(form_dev, float(np.max(np.abs(source.at(z) - target.at(w)))))
        count += 1
    if push_dev < tol and form_dev < tol:
        verdict = "canonical"
    elif push_dev < tol:
        verdict = "poisson"
    else:
        verdict = "neither"
    return CanonicalReport(verdict, push_dev, form_dev, count, tol)


# ---------------------------------------------------------------------------
# structure factories


def _constant(mat: Arr):
    mat = np.asarray(mat, dtype=float)

    def matrix(z):
        return mat

    return matrix


def canonical_blocks(npairs: int, w: float) -> Arr:
    """[[0, wI], [-wI, 0]] in (positions, momenta) order."""
    m = np.zeros((2 * npairs, 2 * npairs))
    for i in range(npairs):
        m[i, npairs + i] = w
        m[npairs + i, i] = -w
    return m


def canonical_structure(name: str, npairs: int, w: float, description: str = "") -> PoissonStructure:
    return PoissonStructure(name, 2 * npairs, _constant(canonical_blocks(npairs, w)),
                            description or f"constant blocks [[0,{w:g}I],[-{w:g}I,0]]",
                            constant=True)


def scaled_pair_structure(name: str, npairs: int, w_of_z, description: str) -> PoissonStructure:
    """{pos_i, mom_i} = w_i(z), zero otherwise."""

    def matrix(z):
        wvec = np.asarray(w_of_z(z), dtype=float)
        m = np.zeros((2 * npairs, 2 * npairs))
        for i in range(npairs):
            m[i, npairs + i] = wvec[i]
            m[npairs + i, i] = -wvec[i]
        return m

    return PoissonStructure(name, 2 * npairs, matrix, description)


def _sgn(x: int) -> int:
    return (x > 0) - (x < 0)


def gl_bracket_matrix(z: Arr, n: int) -> Arr:
    """Linear bracket on n x n matrix entries (row-major state order):

    {L_ij, L_kl} = ((sgn(i-j) + sgn(k-l)) / 2) (d_il L_kj - d_kj L_il)
    """
    L = np.asarray(z, dtype=float).reshape(n, n)
    m = np.zeros((n * n, n * n))
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    s = _sgn(i - j) + _sgn(k - l)
                    if s == 0:
                        continue
                    val = 0.0
                    if i == l:
                        val += L[k, j]
                    if k == j:
                        val -= L[i, l]
                    m[i * n + j, k * n + l] = 0.5 * s * val
    return m


def gl_structure(n: int) -> PoissonStructure:
    return PoissonStructure(
        f"gl({n})", n * n, lambda z: gl_bracket_matrix(z, n),
        "linear bracket from the triangular-splitting classical r-matrix",
    )


# ---------------------------------------------------------------------------
# system catalog


def _a1_system() -> HamiltonianSystem:
    def energy(z):
        Q, P = z
        return 0.5 * (P * P + math.exp(2 * Q))

    def rhs(z):
        Q, P = z
        return np.array([-P, math.exp(2 * Q)])

    return HamiltonianSystem(
        "a1", ("Q", "P"), energy,
        canonical_structure("a1", 1, 1.0, "{Q,P} = 1"),
        rhs, default_state=(0.0, 0.0),
    )


def _a1toy_system(n: int) -> HamiltonianSystem:
    def energy(z):
        q, p = z
        return 0.5 * (p * p + q * q)

    def rhs(z):
        q, p = z
        return np.array([-p * q ** n, q ** (n + 1)])

    return HamiltonianSystem(
        f"a1toy(n={n})", ("q", "p"), energy,
        scaled_pair_structure(f"a1toy(n={n})", 1, lambda z: [z[0] ** n],
                              "{q,p} = q^n"),
        rhs, default_state=(1.0, 0.0),
    )


def _a1toy_pq_system(n: int) -> HamiltonianSystem:
    def energy(z):
        q, p = z
        return 0.5 * (p * p * q ** (2 * n) + q * q)

    def rhs(z):
        q, p = z
        return np.array([-p * q ** (2 * n), n * p * p * q ** (2 * n - 1) + q])

    return HamiltonianSystem(
        f"a1toy_pq(n={n})", ("q", "p"), energy,
        canonical_structure(f"a1toy_pq(n={n})", 1, 1.0, "{q,p} = 1"),
        rhs, default_state=(1.0, 0.0),
    )


def _a2_system() -> HamiltonianSystem:
    def energy(z):
        xi, eta, pxi, peta = z
        return pxi * pxi - pxi * peta + peta * peta + math.exp(xi) + math.exp(eta)

    def rhs(z):
        xi, eta, pxi, peta = z
        return np.array([2 * pxi - peta, 2 * peta - pxi, -math.exp(xi), -math.exp(eta)])

    return HamiltonianSystem(
        "a2", ("xi", "eta", "pxi", "peta"), energy,
        canonical_structure("a2", 2, -1.0, "{pxi,xi} = {peta,eta} = 1"),
        rhs, default_state=(0.0, 0.0, 0.0, 0.0),
    )


def _a2_particles_system() -> HamiltonianSystem:
    def energy(z):
        x1, x2, x3, p1, p2, p3 = z
        return 0.5 * (p1 * p1 + p2 * p2 + p3 * p3) + math.exp(x1 - x2) + math.exp(x2 - x3)

    def rhs(z):
        x1, x2, x3, p1, p2, p3 = z
        e01, e12 = math.exp(x1 - x2), math.exp(x2 - x3)
        return np.array([p1, p2, p3, -e01, e01 - e12, e12])

    return HamiltonianSystem(
        "a2_particles", ("x1", "x2", "x3", "p1", "p2", "p3"), energy,
        canonical_structure("a2_particles", 3, -1.0, "{p_i,x_i} = 1"),
        rhs, default_state=(0.0,) * 6,
    )


def _a2_qp_system() -> HamiltonianSystem:
    def energy(z):
        Q1, Q2, P1, P2 = z
        return 0.25 * (Q1 * Q1 * P1 * P1 + Q2 * Q2 * P2 * P2 - Q1 * Q2 * P1 * P2) \
            + Q1 * Q1 + Q2 * Q2

    def rhs(z):
        Q1, Q2, P1, P2 = z
        dP1 = 0.25 * (2 * Q1 * Q1 * P1 - Q1 * Q2 * P2)
        dP2 = 0.25 * (2 * Q2 * Q2 * P2 - Q1 * Q2 * P1)
        dQ1 = 0.25 * (2 * Q1 * P1 * P1 - Q2 * P1 * P2) + 2 * Q1
        dQ2 = 0.25 * (2 * Q2 * P2 * P2 - Q1 * P1 * P2) + 2 * Q2
        # {P_i, Q_i} = 1: Qdot = dH/dP_i, Pdot = -dH/dQ_i
        return np.array([dP1, dP2, -dQ1, -dQ2])

    return HamiltonianSystem(
        "a2_qp", ("Q1", "Q2", "P1", "P2"), energy,
        canonical_structure("a2_qp", 2, -1.0, "{P_i,Q_i} = 1"),
        rhs, default_state=(1.0, 1.0, 0.0, 0.0),
    )


def hierarchy_prefactor(z: Arr, m: int) -> float:
    """g_m = (-1)^(m+1) 2^(2-2m) (e^xi + e^eta)^(m-1)."""
    xi, eta = z[0], z[1]
    return (-1.0) ** (m + 1) * 2.0 ** (2 - 2 * m) * (math.exp(xi) + math.exp(eta)) ** (m - 1)


def _a2hier_system(m: int) -> HamiltonianSystem:
    if m < 1:
        raise ValueError("hierarchy index m must be >= 1")

    def energy(z):
        xi, eta, pxi, peta = z
        return pxi * pxi - pxi * peta + peta * peta + math.exp(xi) + math.exp(eta)

    def rhs(z):
        xi, eta, pxi, peta = z
        g = hierarchy_prefactor(z, m)
        return np.array([
            g * (2 * pxi - peta),
            g * (2 * peta - pxi),
            -g * math.exp(xi),
            -g * math.exp(eta),
        ])

    return HamiltonianSystem(
        f"a2hier(m={m})", ("xi", "eta", "pxi", "peta"), energy,
        scaled_pair_structure(
            f"a2hier(m={m})", 2,
            lambda z: [-hierarchy_prefactor(z, m)] * 2,
            "{pxi,xi} = {peta,eta} = g_m(z)",
        ),
        rhs, default_state=(0.0, 0.0, 0.0, 0.0),
    )


def _omega_system(n: int) -> HamiltonianSystem:
    def energy(z):
        l1, l2, pi1, pi2 = z
        return pi1 * pi1 - pi1 * pi2 + pi2 * pi2 + l1 * l1 + l2 * l2

    def rhs(z):
        l1, l2, pi1, pi2 = z
        w1, w2 = 0.5 * l1 ** n, 0.5 * l2 ** n
        return np.array([
            (2 * pi1 - pi2) * w1,
            (2 * pi2 - pi1) * w2,
            -2 * l1 * w1,
            -2 * l2 * w2,
        ])

    return HamiltonianSystem(
        f"omega(n={n})", ("l1", "l2", "pi1", "pi2"), energy,
        scaled_pair_structure(
            f"omega(n={n})", 2,
            lambda z: [-0.5 * z[0] ** n, -0.5 * z[1] ** n],
            "{pi_i,l_i} = l_i^n / 2",
        ),
        rhs, default_state=(1.0, 1.0, 0.0, 0.0),
    )


def _gl_system(size: int) -> HamiltonianSystem:
    def energy(z):
        L = np.asarray(z, dtype=float).reshape(size, size)
        return -float(np.trace(L @ L))

    def rhs(z):
        L = np.asarray(z, dtype=float).reshape(size, size)
        P = np.triu(L, 1) - np.tril(L, -1)
        return (P @ L - L @ P).reshape(-1)

    names = tuple(f"a{i + 1}{j + 1}" for i in range(size) for j in range(size))
    default = np.zeros((size, size))
    for i in range(size - 1):
        default[i, i + 1] = default[i + 1, i] = 1.0
    return HamiltonianSystem(
        f"gl({size})", names, energy, gl_structure(size),
        rhs, default_state=tuple(default.reshape(-1)),
    )


_SYSTEM_PARAMS = {
    "a1": (),
    "a1_pq": (),
    "a1toy": ("n",),
    "a1toy_pq": ("n",),
    "a2": (),
    "a2_particles": (),
    "a2_qp": (),
    "a2hier": ("m",),
    "omega": ("n",),
    "gl": ("size",),
}


def list_systems() -> tuple:
    return tuple(sorted(_SYSTEM_PARAMS))


def get_system(name: str, n: int | None = None, m: int | None = None,
               size: int | None = None) -> HamiltonianSystem:
    """Look up a catalog system by name and family parameters."""
    if name == "a1":
        return _a1_system()
    if name == "a1_pq":
        return _a1toy_pq_system(1)
    if name == "a1toy":
        return _a1toy_system(0 if n is None else n)
    if name == "a1toy_pq":
        return _a1toy_pq_system(0 if n is None else n)
    if name == "a2":
        return _a2_system()
    if name == "a2_particles":
        return _a2_particles_system()
    if name == "a2_qp":
        return _a2_qp_system()
    if name == "a2hier":
        return _a2hier_system(1 if m is None else m)
    if name == "omega":
        return _omega_system(1 if n is None else n)
    if name == "gl":
        return _gl_system(2 if size is None else size)
    raise KeyError(f"unknown system {name!r}; known: {', '.join(list_systems())}")


# ---------------------------------------------------------------------------
# chart map catalog


def _f2_map() -> ChartMap:
    def forward(z):
        q, p = z
        return np.array([math.log(q), p * q])

    def inverse(w):
        Q, P = w
        return np.array([math.exp(Q), P * math.exp(-Q)])

    def jac(z):
        q, p = z
        return np.array([[1.0 / q, 0.0], [p, q]])

    return ChartMap("f2", "a1_pq", "a1", forward, inverse, jac)


def _exp_map() -> ChartMap:
    def forward(z):
        Q, P = z
        return np.array([math.exp(Q), P])

    def inverse(w):
        q, p = w
        return np.array([math.log(q), p])

    def jac(z):
        return np.array([[math.exp(z[0]), 0.0], [0.0, 1.0]])

    return ChartMap("exp", "a1", "a1toy(n=1)", forward, inverse, jac)


def _tilde_map(n: int) -> ChartMap:
    def forward(z):
        q, p = z
        return np.array([q, p * q ** n])

    def inverse(w):
        qt, pt = w
        return np.array([qt, pt * qt ** (-n)])

    def jac(z):
        q, p = z
        return np.array([[1.0, 0.0], [n * p * q ** (n - 1), q ** n]])

    return ChartMap(f"tilde(n={n})", f"a1toy_pq(n={n})", f"a1toy(n={n})",
                    forward, inverse, jac)


def _a2_projection_map() -> ChartMap:
    P = np.array([
        [1, -1, 0, 0, 0, 0],
        [0, 1, -1, 0, 0, 0],
        [0, 0, 0, Fraction(2, 3), Fraction(-1, 3), Fraction(-1, 3)],
        [0, 0, 0, Fraction(1, 3), Fraction(1, 3), Fraction(-2, 3)],
    ], dtype=float)
    S = np.array([
        [Fraction(2, 3), Fraction(1, 3)],
        [Fraction(-1, 3), Fraction(1, 3)],
        [Fraction(-1, 3), Fraction(-2, 3)],
    ], dtype=float)

    def forward(z):
        return P @ np.asarray(z, dtype=float)

    def inverse(w):
        # section with zero total position and momentum
        xi, eta, pxi, peta = w
        x = S @ np.array([xi, eta])
        p = np.array([pxi, peta - pxi, -peta])
        return np.concatenate([x, p])

    def jac(z):
        return P

    return ChartMap("a2_projection", "a2_particles", "a2", forward, inverse, jac,
                    projection=True)


def _a2_canonical_map() -> ChartMap:
    def forward(z):
        xi, eta, pxi, peta = z
        Q1, Q2 = math.exp(0.5 * xi), math.exp(0.5 * eta)
        return np.array([Q1, Q2, 2 * pxi / Q1, 2 * peta / Q2])

    def inverse(w):
        Q1, Q2, P1, P2 = w
        return np.array([2 * math.log(Q1), 2 * math.log(Q2),
                         0.5 * P1 * Q1, 0.5 * P2 * Q2])

    def jac(z):
        xi, eta, pxi, peta = z
        Q1, Q2 = math.exp(0.5 * xi), math.exp(0.5 * eta)
        return np.array([
            [0.5 * Q1, 0, 0, 0],
            [0, 0.5 * Q2, 0, 0],
            [-pxi / Q1, 0, 2 / Q1, 0],
            [0, -peta / Q2, 0, 2 / Q2],
        ])

    return ChartMap("a2_canonical", "a2", "a2_qp", forward, inverse, jac)


def _omega_map() -> ChartMap:
    def forward(z):
        l1, l2, pi1, pi2 = z
        return np.array([l1, l2, 2 * pi1 / l1, 2 * pi2 / l2])

    def inverse(w):
        Q1, Q2, P1, P2 = w
        return np.array([Q1, Q2, 0.5 * P1 * Q1, 0.5 * P2 * Q2])

    def jac(z):
        l1, l2, pi1, pi2 = z
        return np.array([
            [1, 0, 0, 0],
            [0, 1, 0, 0],
            [-2 * pi1 / l1 ** 2, 0, 2 / l1, 0],
            [0, -2 * pi2 / l2 ** 2, 0, 2 / l2],
        ])

    return ChartMap("omega_map", "omega(n=1)", "a2_qp", forward, inverse, jac)


def identity_map(chart: str, dim: int) -> ChartMap:
    eye = np.eye(dim)
    return ChartMap(f"identity({chart})", chart, chart,
                    lambda z: np.asarray(z, dtype=float),
                    lambda z: np.asarray(z, dtype=float),
                    lambda z: eye)


def get_chart_map(name: str, n: int | None = None) -> ChartMap:
    if name == "f2":
        return _f2_map()
    if name == "exp":
        return _exp_map()
    if name == "tilde":
        return _tilde_map(1 if n is None else n)
    if name == "a2_projection":
        return _a2_projection_map()
    if name == "a2_canonical":
        return _a2_canonical_map()
    if name == "omega_map":
        return _omega_map()
    raise KeyError(f"unknown chart map {name!r}")


def list_chart_maps() -> tuple:
    return ("a2_canonical", "a2_projection", "exp", "f2", "omega_map", "tilde")


# ---------------------------------------------------------------------------
# exact bracket obstruction for the scaled-pair family


def _omega_polys() -> tuple[Poly, Poly]:
    # vars: l1, l2, pi1, pi2
    l1 = Poly.variable(4, 0)
    l2 = Poly.variable(4, 1)
    pi1 = Poly.variable(4, 2)
    pi2 = Poly.variable(4, 3)
    H = pi1 * pi1 - pi1 * pi2 + pi2 * pi2 + l1 * l1 + l2 * l2
    I = pi2 * pi2 * pi1 - pi2 * pi1 * pi1 - l1 * l1 * pi2 + l2 * l2 * pi1
    return H, I


def omega_bracket_poly(f: Poly, g: Poly, n: int) -> Poly:
    """Exact {f, g} for the scaled-pair bracket {pi_i, l_i} = l_i^n / 2."""
    if n < 0:
        raise ValueError("the exact bracket needs a polynomial weight (n >= 0)")
    out = Poly.zero(4)
    for i in range(2):
        w = Poly.variable(4, i, n) * Fraction(1, 2)
        li, pii = i, 2 + i
        out = out + w * (f.diff(pii) * g.diff(li) - f.diff(li) * g.diff(pii))
    return out


def obstruction_polynomial(n: int) -> Poly:
    """Exact {H, I} under the scaled-pair bracket with weight l^n / 2.

    The zero polynomial exactly when n = 1; for other n the bracket
    fails to conserve the cubic invariant.
    """
    H, I = _omega_polys()
    return omega_bracket_poly(H, I, n)
