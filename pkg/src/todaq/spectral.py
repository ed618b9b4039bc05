"""Differential realizations of quantum Hamiltonians and eigensolves.

A realization sends the single momentum generator of a table to
``-i w(x) d/dx`` with a monomial weight ``w`` and each coordinate
generator to multiplication by a fixed power/exponential of ``x``.
Because operators arrive normal ordered (coordinates left of momenta),
the second-order problem

    a(x) psi'' + b(x) psi' + c(x) psi = scale * E * psi

is read off term by term; the coefficients are kept exact as finite
sums of ``coef * (s x)^p * exp(alpha x)`` so that changes of variable
are algebraic, not numeric.

Solving uses Dirichlet boxes on uniform grids with second-order
central differences.  When the discretized operator is similar to a
symmetric tridiagonal matrix (the discrete form of formal
self-adjointness under dx/w), a symmetric solver runs; otherwise a
dense general eigensolve is used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np
from scipy.linalg import eigh_tridiagonal

from . import ncalg

Arr = np.ndarray


class BuildError(ValueError):
    """The operator does not define a second-order problem."""


class SolveError(RuntimeError):
    """The discretized eigenproblem could not be solved reliably."""


class MapError(ValueError):
    """The change of variable cannot be applied exactly."""


# ---------------------------------------------------------------------------
# exact coefficient functions


@dataclass(frozen=True)
class CoefTerm:
    """coef * (xscale * x)^xpow * exp(expo * x)."""

    coef: Fraction | float
    xpow: Fraction = Fraction(0)
    expo: Fraction = Fraction(0)
    xscale: Fraction = Fraction(1)

    def canonical(self) -> "CoefTerm":
        xpow = Fraction(self.xpow)
        expo = Fraction(self.expo)
        xscale = Fraction(self.xscale)
        coef = self.coef
        if xscale != 1 and xpow.denominator == 1:
            coef = coef * xscale ** int(xpow)
            xscale = Fraction(1)
        if isinstance(coef, float) and coef == int(coef):
            coef = Fraction(int(coef))
        return CoefTerm(coef, xpow, expo, xscale)

    def __mul__(self, other: "CoefTerm") -> "CoefTerm":
        a, b = self.canonical(), other.canonical()
        if a.xscale != b.xscale:
            if a.xpow == 0:
                a = CoefTerm(a.coef, a.xpow, a.expo, b.xscale)
            elif b.xpow == 0:
                b = CoefTerm(b.coef, b.xpow, b.expo, a.xscale)
            else:
                raise MapError("cannot combine terms with different scale bases")
        return CoefTerm(a.coef * b.coef, a.xpow + b.xpow, a.expo + b.expo,
                        a.xscale).canonical()

    def scaled(self, s) -> "CoefTerm":
        return CoefTerm(self.coef * s, self.xpow, self.expo, self.xscale)

    def eval(self, x: Arr) -> Arr:
        v = float(self.coef) * np.ones_like(x)
        if self.xpow != 0:
            v = v * (float(self.xscale) * x) ** float(self.xpow)
        if self.expo != 0:
            v = v * np.exp(float(self.expo) * x)
        return v

    def render(self) -> str:
        parts = [str(self.coef)]
        if self.xpow != 0:
            base = "x" if self.xscale == 1 else f"({self.xscale}*x)"
            parts.append(base if self.xpow == 1 else f"{base}^{self.xpow}")
        if self.expo != 0:
            parts.append(f"exp({self.expo}*x)")
        return "*".join(parts)


CoefFunc = tuple  # of CoefTerm


def cf_normalize(terms) -> CoefFunc:
    acc: dict = {}
    for t in terms:
        t = t.canonical()
        key = (t.xpow, t.expo, t.xscale)
        acc[key] = acc.get(key, Fraction(0)) + t.coef
    out = [CoefTerm(c, *k[:2], k[2]) for k, c in acc.items() if c != 0]
    out.sort(key=lambda t: (t.xpow, t.expo, t.xscale))
    return tuple(out)


def cf_add(f: CoefFunc, g: CoefFunc) -> CoefFunc:
    return cf_normalize(tuple(f) + tuple(g))


def cf_scale(f: CoefFunc, s) -> CoefFunc:
    return cf_normalize(t.scaled(s) for t in f)


def cf_mul_term(f: CoefFunc, t: CoefTerm) -> CoefFunc:
    return cf_normalize(u * t for u in f)


def cf_eval(f: CoefFunc, x: Arr) -> Arr:
    out = np.zeros_like(np.asarray(x, dtype=float))
    for t in f:
        out = out + t.eval(x)
    return out


def cf_equal(f: CoefFunc, g: CoefFunc) -> bool:
    return cf_normalize(f) == cf_normalize(g)


def cf_render(f: CoefFunc) -> str:
    return " + ".join(t.render() for t in f) if f else "0"


# ---------------------------------------------------------------------------
# realizations


@dataclass(frozen=True)
class Realization:
    """Differential images of table generators on an axis coordinate.

    The momentum acts as ``-i x^weight_pow d/dx``; each coordinate
    generator multiplies by ``x^cpow * exp(cexpo * x)``.
    """

    table: ncalg.GeneratorTable
    weight_pow: Fraction
    coord_images: dict           # name -> (cpow, cexpo)
    name: str = ""


def standard_realization(table: ncalg.GeneratorTable) -> Realization:
    images = {table.names[i]: (Fraction(1), Fraction(0)) for i in table.coord_idx}
    return Realization(table, Fraction(0), images, "p -> -i d/dx, q -> x")


def scaled_realization(table: ncalg.GeneratorTable, n: int) -> Realization:
    images = {table.names[i]: (Fraction(1), Fraction(0)) for i in table.coord_idx}
    return Realization(table, Fraction(n), images, f"p -> -i x^{n} d/dx, q -> x")


def exponential_realization(table: ncalg.GeneratorTable) -> Realization:
    """Coordinates become exponentials: the logarithmic-axis picture."""
    images = {table.names[i]: (Fraction(0), Fraction(1)) for i in table.coord_idx}
    return Realization(table, Fraction(0), images, "p -> -i d/dx, E -> exp(x)")


# ---------------------------------------------------------------------------
# the eigenproblem


@dataclass(frozen=True)
class OdeEigenproblem:
    """a psi'' + b psi' + c psi = energy_scale * E * psi on a Dirichlet box."""

    a: CoefFunc
    b: CoefFunc
    c: CoefFunc
    domain: tuple
    energy_scale: Fraction = Fraction(1)
    name: str = ""

    def scaled(self, s) -> "OdeEigenproblem":
        """Multiply the whole equation by s (eigenvalues unchanged)."""
        s = Fraction(s)
        return OdeEigenproblem(cf_scale(self.a, s), cf_scale(self.b, s),
                               cf_scale(self.c, s), self.domain,
                               self.energy_scale * s, self.name)

    def with_domain(self, domain: tuple) -> "OdeEigenproblem":
        return replace(self, domain=(float(domain[0]), float(domain[1])))

    def render(self) -> str:
        return (f"[{cf_render(self.a)}] psi'' + [{cf_render(self.b)}] psi' + "
                f"[{cf_render(self.c)}] psi = {self.energy_scale} E psi "
                f"on [{self.domain[0]:g}, {self.domain[1]:g}]")


def build_problem(H: ncalg.NCPoly, realization: Realization, domain,
                  energy_scale=1, name: str = "") -> OdeEigenproblem:
    """Extract the second-order problem from a normal-ordered operator.

    Requires at most one momentum generator, used at most quadratically.
    Coefficients must close over real numbers once the momentum images
    are inserted; a residual imaginary part is an error.
    """
    table = realization.table
    if table is not H.table:
        raise BuildError("operator and realization use different tables")
    used_moms = {i for e in H.terms for i in table.mom_idx if e[i]}
    if len(used_moms) > 1:
        raise BuildError("multiple momentum generators present")
    w = Fraction(realization.weight_pow)
    acc = {0: {}, 1: {}, 2: {}}   # derivative order -> {(xpow, expo): GaussRat}

    def put(order, xpow, expo, gamma):
        key = (Fraction(xpow), Fraction(expo))
        cur = acc[order].get(key)
        cur = gamma if cur is None else cur + gamma
        if cur.is_zero():
            acc[order].pop(key, None)
        else:
            acc[order][key] = cur

    for exps, h in H.terms.items():
        gamma = h.as_gauss_rat()
        mdeg = sum(exps[i] for i in table.mom_idx)
        if mdeg > 2:
            raise BuildError("momentum degree > 2")
        xpow, expo = Fraction(0), Fraction(0)
        for i in table.coord_idx:
            if exps[i]:
                cpow, cexpo = realization.coord_images[table.names[i]]
                xpow += exps[i] * Fraction(cpow)
                expo += exps[i] * Fraction(cexpo)
        if mdeg == 0:
            put(0, xpow, expo, gamma)
        elif mdeg == 1:
            # -i w(x) d/dx
            put(1, xpow + w, expo, gamma * ncalg.GaussRat(0, -1))
        else:
            # (-i w d/dx)^2 = -(w^2 d^2/dx^2 + w w' d/dx)
            put(2, xpow + 2 * w, expo, -gamma)
            if w != 0:
                put(1, xpow + 2 * w - 1, expo, -gamma * w)
    funcs = []
    for order in (2, 1, 0):
        terms = []
        for (xpow, expo), gamma in acc[order].items():
            if not gamma.is_real():
                raise BuildError(
                    f"order-{order} coefficient has imaginary part {gamma}")
            terms.append(CoefTerm(gamma.re, xpow, expo))
        funcs.append(cf_normalize(terms))
    a, b, c = funcs
    return OdeEigenproblem(a, b, c, (float(domain[0]), float(domain[1])),
                           Fraction(energy_scale), name)


# ---------------------------------------------------------------------------
# solving


@dataclass(frozen=True)
class Spectrum:
    problem: OdeEigenproblem
    N: int
    x: Arr                       # interior grid nodes
    energies: Arr
    vectors: Arr | None          # columns psi_k on the interior grid
    weights: Arr | None          # discrete weight of the inner product
    method: str


def solve(problem: OdeEigenproblem, N: int, k: int, vectors: bool = True,
          force_general: bool = False) -> Spectrum:
    """Lowest k eigenpairs on an N-interval uniform Dirichlet grid.

    Eigenvectors are unit norm in the discrete weighted inner product
    ``h * sum(rho_i u_i v_i)`` that symmetrizes the operator, with the
    first significant component made positive.
    """
    if N < 64:
        raise ValueError("N must be at least 64")
    if not 1 <= k < N / 4:
        raise ValueError("need 1 <= k < N/4")
    lo, hi = problem.domain
    if not hi > lo:
        raise ValueError("empty domain")
    h = (hi - lo) / N
    x = lo + h * np.arange(1, N)
    a = cf_eval(problem.a, x)
    b = cf_eval(problem.b, x)
    c = cf_eval(problem.c, x)
    if np.any(a == 0) or (np.max(np.sign(a)) != np.min(np.sign(a))):
        raise SolveError("a(x) vanishes or changes sign on the domain interior")
    sub = a / h ** 2 - b / (2 * h)        # coupling to psi_{i-1}
    dia = -2 * a / h ** 2 + c
    sup = a / h ** 2 + b / (2 * h)        # coupling to psi_{i+1}
    prod = sup[:-1] * sub[1:]
    scale = float(problem.energy_scale)
    if np.all(prod > 0) and not force_general:
        off = np.sign(sup[:-1]) * np.sqrt(prod)
        # diagonal similarity: d_{i+1} = d_i sqrt(sub_{i+1}/sup_i)
        log_ratio = 0.5 * (np.log(np.abs(sub[1:])) - np.log(np.abs(sup[:-1])))
        d = np.exp(np.concatenate([[0.0], np.cumsum(log_ratio)]))
        try:
            if vectors:
                vals, vecs = eigh_tridiagonal(dia, off, select="i",
                                              select_range=(0, k - 1))
            else:
                vals = eigh_tridiagonal(dia, off, select="i",
                                        select_range=(0, k - 1),
                                        eigvals_only=True)
                vecs = None
        except Exception as exc:  # pragma: no cover - solver failure path
            raise SolveError(f"symmetric tridiagonal solve failed: {exc}") from exc
        rho = d ** -2
        psi = None
        if vecs is not None:
            phi = vecs / np.sqrt(h * np.sum(vecs ** 2, axis=0))
            psi = d[:, None] * phi
            psi = _fix_signs(psi)
        return Spectrum(problem, N, x, vals / scale, psi, rho,
                        "symmetric-tridiagonal")
    if len(x) > 4000:
        raise SolveError("general (non-symmetrizable) solve capped at N = 4000")
    T = np.diag(dia) + np.diag(sup[:-1], 1) + np.diag(sub[1:], -1)
    vals, vecs = np.linalg.eig(T)
    if np.max(np.abs(vals.imag)) > 1e-9 * max(1.0, np.max(np.abs(vals.real))):
        raise SolveError("general solve produced a significantly complex spectrum")
    order = np.argsort(vals.real)[:k]
    vals = vals.real[order]
    psi = None
    if vectors:
        psi = vecs.real[:, order]
        psi = psi / np.sqrt(h * np.sum(psi ** 2, axis=0))
        psi = _fix_signs(psi)
    return Spectrum(problem, N, x, vals / scale, psi, np.ones_like(x),
                    "dense-general")


def _fix_signs(psi: Arr) -> Arr:
    out = psi.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        nz = np.nonzero(np.abs(col) > 1e-3 * np.max(np.abs(col)))[0]
        if nz.size and col[nz[0]] < 0:
            out[:, j] = -col
    return out


# ---------------------------------------------------------------------------
# changes of variable


class IdentityMap:
    name = "identity"

    def compose(self, t: CoefTerm) -> CoefTerm:
        return t

    def transform(self, problem: OdeEigenproblem) -> OdeEigenproblem:
        return problem


class ExpMap:
    """x = exp(u): power coefficients become exponentials."""

    name = "exp"

    def compose(self, t: CoefTerm) -> CoefTerm:
        t = t.canonical()
        if t.expo != 0:
            raise MapError("exponential coefficient parts do not compose with exp")
        if t.xscale != 1:
            raise MapError("scaled base does not compose with exp")
        return CoefTerm(t.coef, Fraction(0), t.xpow)

    def inverse_point(self, x: float) -> float:
        return math.log(x)

    def transform(self, problem: OdeEigenproblem) -> OdeEigenproblem:
        inv_p1 = CoefTerm(Fraction(1), Fraction(0), Fraction(-1))   # 1/phi'
        inv_p2 = CoefTerm(Fraction(1), Fraction(0), Fraction(-2))
        corr = CoefTerm(Fraction(1), Fraction(0), Fraction(-2))     # phi''/phi'^3
        return _transform(problem, self, inv_p1, inv_p2, corr)


class PowerMap:
    """x = (c u)^gamma with rational c and gamma."""

    def __init__(self, c, gamma):
        self.c = Fraction(c)
        self.gamma = Fraction(gamma)
        if self.c == 0 or self.gamma == 0:
            raise MapError("degenerate power map")
        self.name = f"power(c={self.c}, gamma={self.gamma})"

    def compose(self, t: CoefTerm) -> CoefTerm:
        t = t.canonical()
        if t.expo != 0:
            raise MapError("exponential coefficient parts do not compose with powers")
        if t.xscale != 1:
            raise MapError("scaled base does not compose with powers")
        return CoefTerm(t.coef, self.gamma * t.xpow, Fraction(0), self.c)

    def inverse_point(self, x: float) -> float:
        return float(x ** (1 / float(self.gamma)) / float(self.c))

    def transform(self, problem: OdeEigenproblem) -> OdeEigenproblem:
        g, c = self.gamma, self.c
        inv_p1 = CoefTerm(1 / (g * c), 1 - g, Fraction(0), c)
        inv_p2 = inv_p1 * inv_p1
        corr = CoefTerm((g - 1) / (g * g * c), 1 - 2 * g, Fraction(0), c)
        return _transform(problem, self, inv_p1, inv_p2, corr)


def _transform(problem: OdeEigenproblem, mapping, inv_p1: CoefTerm,
               inv_p2: CoefTerm, corr: CoefTerm) -> OdeEigenproblem:
    a_c = cf_normalize(mapping.compose(t) for t in problem.a)
    b_c = cf_normalize(mapping.compose(t) for t in problem.b)
    c_c = cf_normalize(mapping.compose(t) for t in problem.c)
    a_new = cf_mul_term(a_c, inv_p2)
    b_new = cf_add(cf_mul_term(b_c, inv_p1),
                   cf_scale(cf_mul_term(a_c, corr), -1))
    lo, hi = sorted((mapping.inverse_point(problem.domain[0]),
                     mapping.inverse_point(problem.domain[1])))
    return OdeEigenproblem(a_new, b_new, c_c, (lo, hi), problem.energy_scale,
                           f"{problem.name}@{mapping.name}" if problem.name else mapping.name)


def change_of_variable(problem: OdeEigenproblem, mapping,
                       domain: tuple | None = None) -> OdeEigenproblem:
    """Pull the problem back along x = phi(u) by the exact chain rule."""
    out = mapping.transform(problem)
    if domain is not None:
        out = out.with_domain(domain)
    return out


def axis_conjugation_map(n: int):
    """The substitution flattening the weight x^n to a plain derivative.

    For n = 1 this is the exponential change of variable; otherwise
    u = x^(1-n) / (1-n), i.e. x = ((1-n) u)^(1/(1-n)).
    """
    if n == 0:
        return IdentityMap()
    if n == 1:
        return ExpMap()
    return PowerMap(1 - n, Fraction(1, 1 - n))


# ---------------------------------------------------------------------------
# comparison and convergence helpers


@dataclass(frozen=True)
class SpectrumComparison:
    max_rel_dev: float
    per_level: Arr
    levels: int

    def ok(self, rel_tol: float) -> bool:
        return self.max_rel_dev < rel_tol

    def render(self) -> str:
        return f"max relative deviation {self.max_rel_dev:.6e} over {self.levels} levels"


def compare_spectra(e1, e2, k: int | None = None) -> SpectrumComparison:
    """Levelwise relative deviation |E1 - E2| / max(|E1|, |E2|)."""
    e1 = np.asarray(getattr(e1, "energies", e1), dtype=float)
    e2 = np.asarray(getattr(e2, "energies", e2), dtype=float)
    n = min(len(e1), len(e2))
    if k is not None:
        n = min(n, k)
    d = np.abs(e1[:n] - e2[:n]) / np.maximum(
        np.maximum(np.abs(e1[:n]), np.abs(e2[:n])), 1e-300)
    return SpectrumComparison(float(np.max(d)), d, n)


def richardson_factors(problem: OdeEigenproblem, N: int, k: int) -> Arr:
    """Per-level ratio of deviations from the Richardson limit when N
    doubles; second-order differencing gives ratios near 4."""
    eN = solve(problem, N, k, vectors=False).energies
    e2 = solve(problem, 2 * N, k, vectors=False).energies
    e4 = solve(problem, 4 * N, k, vectors=False).energies
    star = (4 * e4 - e2) / 3
    return (eN - star) / (e2 - star)


def doubling_change(problem: OdeEigenproblem, N: int, k: int) -> float:
    """Max absolute eigenvalue change when the grid doubles from N."""
    eN = solve(problem, N, k, vectors=False).energies
    e2 = solve(problem, 2 * N, k, vectors=False).energies
    return float(np.max(np.abs(eN - e2)))


# ---------------------------------------------------------------------------
# problem catalog


def problem_schrodinger1() -> OdeEigenproblem:
    """Logarithmic-axis exponential-well problem on [-8, 3]."""
    t = ncalg.a1_cm_table()
    H = ncalg.a1_cm_hamiltonian(t)
    return build_problem(H, exponential_realization(t), (-8.0, 3.0),
                         1, "schrodinger1")


def problem_schrodinger2() -> OdeEigenproblem:
    """Half-line problem from the right-ordered operator, in the doubled
    normalization (coefficients -x^2, -x, x^2 with scale 2)."""
    t = ncalg.weyl_pair()
    H = ncalg.a1_right_hamiltonian(t) * 2
    return build_problem(H, standard_realization(t),
                         (math.exp(-8.0), math.exp(3.0)), 2, "schrodinger2")


def problem_toy(n: int, domain: tuple | None = None) -> OdeEigenproblem:
    """Weighted-derivative oscillator with weight x^n (n = 0: harmonic)."""
    t = ncalg.toy_pair(n)
    q, p = t.gen("q"), t.gen("p")
    H = (p * p + q * q) * Fraction(1, 2)
    if domain is None:
        domain = (-10.0, 10.0) if n == 0 else (0.05, 10.0)
    return build_problem(H, scaled_realization(t, n), domain, 1, f"toy(n={n})")


def problem_oscillator(domain: tuple = (-10.0, 10.0)) -> OdeEigenproblem:
    return problem_toy(0, domain)


def problem_box(domain: tuple = (0.0, math.pi)) -> OdeEigenproblem:
    """Free particle in a box: E_k = (k+1)^2 / 2 on [0, pi]."""
    t = ncalg.weyl_pair()
    p = t.gen("p")
    H = p * p * Fraction(1, 2)
    return build_problem(H, standard_realization(t), domain, 1, "box")


PROBLEM_NAMES = ("box", "oscillator", "schrodinger1", "schrodinger2", "toy")


def get_problem(name: str, n: int | None = None,
                domain: tuple | None = None) -> OdeEigenproblem:
    if name == "schrodinger1":
        prob = problem_schrodinger1()
    elif name == "schrodinger2":
        prob = problem_schrodinger2()
    elif name == "toy":
        prob = problem_toy(0 if n is None else int(n), domain)
        return prob
    elif name == "oscillator":
        prob = problem_oscillator()
    elif name == "box":
        prob = problem_box()
    else:
        raise KeyError(f"unknown problem {name!r}; known: {', '.join(PROBLEM_NAMES)}")
    if domain is not None:
        prob = prob.with_domain(domain)
    return prob


# ---------------------------------------------------------------------------
# CSV output


def _fmt(v: float) -> str:
    return repr(float(v))


def write_spectrum_csv(spectrum: Spectrum, path):
    lines = ["k,E_k"]
    for i, e in enumerate(spectrum.energies):
        lines.append(f"{i},{_fmt(e)}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def write_eigenfunctions_csv(spectrum: Spectrum, path):
    if spectrum.vectors is None:
        raise ValueError("spectrum was solved without eigenvectors")
    k = spectrum.vectors.shape[1]
    lines = ["x," + ",".join(f"psi_{j}" for j in range(k))]
    for i, xv in enumerate(spectrum.x):
        cells = [_fmt(xv)] + [_fmt(spectrum.vectors[i, j]) for j in range(k)]
        lines.append(",".join(cells))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
