"""Matrix pair builders and isospectral right sides.

A system couples a native phase chart to matrices ``L(z)`` and
``A(z)`` with ``Ldot = s [A, L]``; the side ``s`` is part of the
family data (the 2x2 family uses ``Ldot = [L, M]``, written here as
``s = -1``).  Trace powers of ``L`` and its eigenvalues are the
conserved quantities the integrators monitor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigvalsh_tridiagonal

from . import phase

Arr = np.ndarray

FAMILIES = ("A1", "A1Toy", "A2", "A2Hierarchy", "GL")

# [pi_plus(L) - pi_minus(L), L] on a three-site chart equals this
# multiple of the base antisymmetric generator flow
HIERARCHY_PROJECTION_FACTOR = 2.0


@dataclass(frozen=True)
class LaxSystem:
    family: str
    params: dict
    commutator_side: int          # Ldot = side * [A, L]
    state_names: tuple
    size: int                     # matrix dimension
    symmetric: bool               # L symmetric for tridiagonal families
    phase_name: str               # catalog name of the native chart
    chart: str = "native"         # two-site chart variant: tilde | cm | pq

    @property
    def dim(self) -> int:
        return len(self.state_names)

    def phase_system(self) -> phase.HamiltonianSystem:
        return phase.get_system(self.phase_name, **self.params)

    def default_state(self) -> Arr:
        return np.asarray(self.phase_system().default_state, dtype=float)


SYSTEM_NAMES = ("a1", "a1_cm", "a1_pq", "a1toy", "a1toy_pq", "a2", "a2hier", "gl")


def make_system(family: str, n: int | None = None, m: int | None = None,
                size: int | None = None) -> LaxSystem:
    """Build a catalog system; family names are case-insensitive.

    The two-site family exists in three charts that build the same
    matrices: ``a1``/``a1toy`` integrate the scaled-bracket chart the
    matrices are written in, ``a1_cm`` the logarithmic chart, and
    ``a1_pq``/``a1toy_pq`` the canonical chart.
    """
    key = family.lower()
    if key in ("a1",):
        # the plain two-site system is the n = 1 member of the toy family
        return LaxSystem("A1", {"n": 1}, -1, ("q", "p"), 2, True, "a1toy", "tilde")
    if key == "a1_cm":
        return LaxSystem("A1", {"n": 1}, -1, ("Q", "P"), 2, True, "a1", "cm")
    if key == "a1_pq":
        return LaxSystem("A1", {"n": 1}, -1, ("q", "p"), 2, True, "a1toy_pq", "pq")
    if key in ("a1toy", "toy"):
        n = 0 if n is None else int(n)
        return LaxSystem("A1Toy", {"n": n}, -1, ("q", "p"), 2, True, "a1toy", "tilde")
    if key == "a1toy_pq":
        n = 0 if n is None else int(n)
        return LaxSystem("A1Toy", {"n": n}, -1, ("q", "p"), 2, True, "a1toy_pq", "pq")
    if key in ("a2",):
        return LaxSystem("A2", {}, 1, ("xi", "eta", "pxi", "peta"), 3, True, "a2")
    if key in ("a2hier", "hier", "a2hierarchy"):
        m = 1 if m is None else int(m)
        if m < 1:
            raise ValueError("hierarchy index m must be >= 1")
        return LaxSystem("A2Hierarchy", {"m": m}, 1,
                         ("xi", "eta", "pxi", "peta"), 3, True, "a2hier")
    if key in ("gl",):
        size = 2 if size is None else int(size)
        if size < 2:
            raise ValueError("matrix size must be >= 2")
        names = tuple(f"a{i + 1}{j + 1}" for i in range(size) for j in range(size))
        return LaxSystem("GL", {"size": size}, 1, names, size, False, "gl")
    raise KeyError(f"unknown family {family!r}")


# ---------------------------------------------------------------------------
# builders


def _scaled_chart_state(system: LaxSystem, z) -> tuple[float, float]:
    """Convert a two-site state to the chart the matrices are written in."""
    if system.chart == "cm":
        Q, P = z
        return math.exp(Q), P
    if system.chart == "pq":
        q, p = z
        return q, p * q ** system.params["n"]
    q, p = z
    return q, p


def build_L(system: LaxSystem, z) -> Arr:
    z = np.asarray(z, dtype=float)
    if system.family in ("A1", "A1Toy"):
        q, p = _scaled_chart_state(system, z)
        return np.array([[p, q], [q, -p]])
    if system.family in ("A2", "A2Hierarchy"):
        v, c = _vc_of_state(z)
        return build_L_vc(v, c)
    if system.family == "GL":
        return z.reshape(system.size, system.size).copy()
    raise KeyError(system.family)


def build_A(system: LaxSystem, z) -> Arr:
    z = np.asarray(z, dtype=float)
    if system.family in ("A1", "A1Toy"):
        n = system.params["n"]
        q, _ = _scaled_chart_state(system, z)
        qn = q ** n
        return 0.5 * np.array([[0.0, -qn], [qn, 0.0]])
    if system.family in ("A2", "A2Hierarchy"):
        _, c = _vc_of_state(z)
        A0 = build_A0_vc(c)
        m = system.params.get("m", 1)
        return np.linalg.matrix_power(A0, 2 * m - 1)
    if system.family == "GL":
        L = z.reshape(system.size, system.size)
        return np.triu(L, 1) - np.tril(L, -1)
    raise KeyError(system.family)


def lax_rhs(system: LaxSystem, z) -> Arr:
    """Ldot = side * [A(z), L(z)]."""
    L, A = build_L(system, z), build_A(system, z)
    return system.commutator_side * (A @ L - L @ A)


def phase_rhs(system: LaxSystem, z) -> Arr:
    """The native chart ODE right side (plain ndarray in, ndarray out)."""
    return phase.hamiltonian_vector_field(system.phase_system(), z)


def invariant(system: LaxSystem, z, k: int) -> float:
    """tr L^k at the state z."""
    L = build_L(system, z)
    return float(np.trace(np.linalg.matrix_power(L, k)))


def eigenvalues(system: LaxSystem, z) -> Arr:
    """Spectrum of L; sorted ascending (real families use a symmetric
    solver, the matrix family sorts by real part then imaginary part)."""
    L = build_L(system, z)
    if system.symmetric:
        if system.size >= 3:
            return eigvalsh_tridiagonal(np.diag(L), np.diag(L, 1))
        return np.linalg.eigvalsh(L)
    w = np.linalg.eigvals(L)
    return w[np.lexsort((w.imag, w.real))]


# ---------------------------------------------------------------------------
# three-site chart helpers


def _vc_of_state(z: Arr) -> tuple[Arr, Arr]:
    xi, eta, pxi, peta = z
    v = np.array([-pxi, pxi - peta, peta])
    c = np.array([math.exp(0.5 * xi), math.exp(0.5 * eta)])
    return v, c


def build_L_vc(v, c) -> Arr:
    v = np.asarray(v, dtype=float)
    c = np.asarray(c, dtype=float)
    return np.array([
        [v[0], c[0], 0.0],
        [c[0], v[1], c[1]],
        [0.0, c[1], v[2]],
    ])


def build_A0_vc(c) -> Arr:
    c = np.asarray(c, dtype=float)
    return 0.5 * np.array([
        [0.0, c[0], 0.0],
        [-c[0], 0.0, c[1]],
        [0.0, -c[1], 0.0],
    ])


def hierarchy_vc_rhs(v, c, m: int) -> tuple[Arr, Arr]:
    """The five closed-form flow equations on (v, c) for index m."""
    v = np.asarray(v, dtype=float)
    c = np.asarray(c, dtype=float)
    s = c[0] ** 2 + c[1] ** 2
    f = 2.0 ** (2 - 2 * m) * (-1.0) ** m * s ** (m - 1)
    vdot = np.array([
        -f * c[0] ** 2,
        f * (c[0] ** 2 - c[1] ** 2),
        f * c[1] ** 2,
    ])
    cdot = 0.5 * f * np.array([
        (v[0] - v[1]) * c[0],
        (v[1] - v[2]) * c[1],
    ])
    return vdot, cdot


def projection_flow_rhs(L, m: int) -> Arr:
    """[pi_plus(L^m) - pi_minus(L^m), L] with strict triangular parts."""
    L = np.asarray(L, dtype=float)
    Lm = np.linalg.matrix_power(L, m)
    B = np.triu(Lm, 1) - np.tril(Lm, -1)
    return B @ L - L @ B


# ---------------------------------------------------------------------------
# trace identities


def symmetric_cubic_trace(v, c) -> float:
    """tr L^3 for the three-site symmetric matrix, expanded by hand:

    v0^3 + v1^3 + v2^3 + 3 c0^2 (v0 + v1) + 3 c1^2 (v1 + v2)
    """
    v = np.asarray(v, dtype=float)
    c = np.asarray(c, dtype=float)
    return float(
        v[0] ** 3 + v[1] ** 3 + v[2] ** 3
        + 3 * c[0] ** 2 * (v[0] + v[1])
        + 3 * c[1] ** 2 * (v[1] + v[2])
    )


def cubic_trace_identity_coefficients() -> tuple[float, float]:
    """Coefficients (alpha, beta) with tr L^3 = alpha tr L tr L^2 + beta (tr L)^3
    for 2 x 2 matrices (Cayley-Hamilton)."""
    return 1.5, -0.5
