"""The linear R-matrix bracket on gl(n,R) and its exact quantization.

Structure constants are generated from the defining pairing

    2 {L_ij, L_kl} = <[R(E_ji), E_lk] + [E_ji, R(E_lk)], L>

with R the difference of the strictly-upper and strictly-lower
triangular projections and <A, B> = tr(AB).  Everything downstream is
exact: the bracket acts on rational polynomials in the matrix entries,
the Jacobi identity is checked as a polynomial identity, and the star
product is computed through full symmetrization into the enveloping
algebra with the bracket carrying one power of the formal grading
parameter.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import ncalg
from .exactnum import GaussRat, HPoly, Poly

Pair = tuple  # (i, j), 1-based


def _sgn(x: int) -> int:
    return (x > 0) - (x < 0)


def _unit(n: int, i: int, j: int):
    m = [[Fraction(0)] * n for _ in range(n)]
    m[i - 1][j - 1] = Fraction(1)
    return m


def _mat_mul(a, b):
    n = len(a)
    return [[sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)]
            for i in range(n)]


def _mat_sub(a, b):
    n = len(a)
    return [[a[i][j] - b[i][j] for j in range(n)] for i in range(n)]


def _mat_scale(a, s):
    return [[v * s for v in row] for row in a]


# ---------------------------------------------------------------------------
# structure constants


@dataclass(frozen=True)
class LieStructure:
    """Sparse structure tensor {L_a, L_b} = sum_c t[a,b][c] L_c."""

    n: int
    tensor: dict = field(compare=False)   # (Pair, Pair) -> {Pair: Fraction}
    name: str = ""

    def bracket_pair(self, a: Pair, b: Pair) -> dict:
        return dict(self.tensor.get((tuple(a), tuple(b)), {}))

    def basis(self):
        rng = range(1, self.n + 1)
        return [(i, j) for i in rng for j in rng]

    def flat(self, p: Pair) -> int:
        return (p[0] - 1) * self.n + (p[1] - 1)

    def pair_poly(self, a: Pair, b: Pair) -> Poly:
        """{L_a, L_b} as a linear polynomial in the matrix entries."""
        out = Poly.zero(self.n * self.n)
        for c, v in self.bracket_pair(a, b).items():
            out = out + Poly.variable(self.n * self.n, self.flat(c)) * v
        return out

    def entries(self):
        """Nonzero constants as sorted (i,j,k,l,r,s,value) rows."""
        rows = []
        for (a, b), terms in self.tensor.items():
            for c, v in terms.items():
                if v != 0:
                    rows.append((*a, *b, *c, v))
        rows.sort()
        return rows


def _pairing_bracket(n: int, a: Pair, b: Pair) -> dict:
    """Expand the defining formula for one basis pair; exact."""
    i, j = a
    k, l = b
    Eji, Elk = _unit(n, j, i), _unit(n, l, k)
    R_Eji = _mat_scale(Eji, _sgn(i - j))
    R_Elk = _mat_scale(Elk, _sgn(k - l))
    comm = _mat_sub(
        _mat_sub(_mat_mul(R_Eji, Elk), _mat_mul(Elk, R_Eji)),
        _mat_sub(_mat_mul(R_Elk, Eji), _mat_mul(Eji, R_Elk)),
    )
    # <M, L> = sum_rs M_rs L_sr, and the defining formula carries a 2
    # on the left: coefficient of L_rs is M_sr / 2.
    out = {}
    for r in range(1, n + 1):
        for s in range(1, n + 1):
            v = comm[s - 1][r - 1] / 2
            if v != 0:
                out[(r, s)] = v
    return out


def closed_form_bracket(n: int, a: Pair, b: Pair) -> dict:
    """Independent case-table form of the same constants."""
    i, j = a
    k, l = b
    half = Fraction(_sgn(i - j) + _sgn(k - l), 2)
    out = {}
    if half:
        if i == l:
            out[(k, j)] = out.get((k, j), Fraction(0)) + half
        if k == j:
            out[(i, l)] = out.get((i, l), Fraction(0)) - half
    return {c: v for c, v in out.items() if v != 0}


def r_bracket_constants(n: int) -> LieStructure:
    if n < 2:
        raise ValueError("need n >= 2")
    tensor = {}
    rng = range(1, n + 1)
    for a in itertools.product(rng, rng):
        for b in itertools.product(rng, rng):
            terms = _pairing_bracket(n, a, b)
            if terms:
                tensor[(a, b)] = terms
    return LieStructure(n, tensor, f"gl({n}) R-bracket")


def perturb_structure(S: LieStructure, a: Pair, b: Pair, c: Pair,
                      delta) -> LieStructure:
    """Negative control: shift one constant (and keep antisymmetry)."""
    tensor = {k: dict(v) for k, v in S.tensor.items()}
    for key, cc, d in (((tuple(a), tuple(b)), tuple(c), Fraction(delta)),
                       ((tuple(b), tuple(a)), tuple(c), -Fraction(delta))):
        terms = tensor.setdefault(key, {})
        terms[cc] = terms.get(cc, Fraction(0)) + d
        if terms[cc] == 0:
            del terms[cc]
    return LieStructure(S.n, tensor, S.name + " (perturbed)")


# ---------------------------------------------------------------------------
# polynomial observables and the bracket


def coordinate_poly(n: int, i: int, j: int) -> Poly:
    return Poly.variable(n * n, (i - 1) * n + (j - 1))


def matrix_of_coordinates(n: int):
    return [[coordinate_poly(n, i, j) for j in range(1, n + 1)]
            for i in range(1, n + 1)]


def trace_power_poly(n: int, k: int) -> Poly:
    """tr L^k as an exact polynomial in the matrix entries."""
    L = matrix_of_coordinates(n)
    M = L
    for _ in range(k - 1):
        M = [[sum((M[i][t] * L[t][j] for t in range(n)), Poly.zero(n * n))
              for j in range(n)] for i in range(n)]
    return sum((M[i][i] for i in range(n)), Poly.zero(n * n))


def flow_hamiltonian_poly(n: int) -> Poly:
    """-tr L^2, whose bracket flow is the sorting system."""
    return -trace_power_poly(n, 2)


def lie_poisson_bracket(f: Poly, g: Poly, S: LieStructure) -> Poly:
    if f.nvars != S.n * S.n or g.nvars != S.n * S.n:
        raise ValueError("polynomial arity does not match the structure")
    out = Poly.zero(f.nvars)
    df_cache: dict = {}
    dg_cache: dict = {}

    def d(cache, p, a):
        if a not in cache:
            cache[a] = p.diff(S.flat(a))
        return cache[a]

    for (a, b) in S.tensor:
        df = d(df_cache, f, a)
        if df.is_zero():
            continue
        dg = d(dg_cache, g, b)
        if dg.is_zero():
            continue
        out = out + S.pair_poly(a, b) * (df * dg)
    return out


def jacobi_residual(S: LieStructure) -> Fraction:
    """Max |coefficient| of the Jacobi sum over all basis triples; exact."""
    basis = S.basis()
    coords = {a: coordinate_poly(S.n, *a) for a in basis}
    worst = Fraction(0)
    for a, b, c in itertools.combinations(basis, 3):
        za, zb, zc = coords[a], coords[b], coords[c]
        res = (lie_poisson_bracket(za, S.pair_poly(b, c), S)
               + lie_poisson_bracket(zb, S.pair_poly(c, a), S)
               + lie_poisson_bracket(zc, S.pair_poly(a, b), S))
        for v in res.terms.values():
            worst = max(worst, abs(v))
    return worst


def hamilton_matrix(S: LieStructure, H: Poly):
    """Entrywise bracket flow {H, L_ij} as a matrix of polynomials."""
    n = S.n
    return [[lie_poisson_bracket(H, coordinate_poly(n, i, j), S)
             for j in range(1, n + 1)] for i in range(1, n + 1)]


def sorting_rhs_matrix(n: int):
    """[P, L] with P = upper(L) - lower(L), as exact polynomials."""
    L = matrix_of_coordinates(n)
    zero = Poly.zero(n * n)
    P = [[L[i][j] if i < j else (-L[i][j] if i > j else zero)
          for j in range(n)] for i in range(n)]
    PL = [[sum((P[i][t] * L[t][j] for t in range(n)), zero)
           for j in range(n)] for i in range(n)]
    LP = [[sum((L[i][t] * P[t][j] for t in range(n)), zero)
           for j in range(n)] for i in range(n)]
    return [[PL[i][j] - LP[i][j] for j in range(n)] for i in range(n)]


# ---------------------------------------------------------------------------
# quantization: tables, symmetrization, star product


def _entry_names(n: int):
    return tuple(f"L{i}{j}" for i in range(1, n + 1) for j in range(1, n + 1))


def _bracket_relations(S: LieStructure, scale_kind: str) -> dict:
    """Normal-ordering relations [x_b, x_a] for b after a in entry order.

    scale_kind 'quantum' uses -i {.,.} (so i[.,.] recovers the bracket);
    'hbar' uses the formal grading parameter as the multiplier.
    """
    n = S.n
    basis = S.basis()
    rel = {}
    for bi, b in enumerate(basis):
        for a in basis[:bi]:
            terms = S.bracket_pair(b, a)
            if not terms:
                continue
            rhs = []
            for c, v in sorted(terms.items()):
                if scale_kind == "quantum":
                    coeff = GaussRat(0, -v)
                else:
                    coeff = HPoly.hbar(1, v)
                rhs.append((coeff, {f"L{c[0]}{c[1]}": 1}))
            rel[(f"L{b[0]}{b[1]}", f"L{a[0]}{a[1]}")] = rhs
    return rel


_TABLE_CACHE: dict = {}


def gl_quantum_table(n: int = 2) -> ncalg.GeneratorTable:
    """Entry operators with [X_b, X_a] = -i {L_b, L_a}."""
    key = ("quantum", n)
    if key not in _TABLE_CACHE:
        S = r_bracket_constants(n)
        _TABLE_CACHE[key] = ncalg.GeneratorTable(
            names=_entry_names(n),
            kinds=(ncalg.COORDINATE,) * (n * n),
            relations=_bracket_relations(S, "quantum"),
            name=f"gl({n}) quantum",
        )
    return _TABLE_CACHE[key]


def gl_hbar_table(n: int = 2) -> ncalg.GeneratorTable:
    """Enveloping-algebra table with the bracket graded by one power
    of the formal parameter; the star product lives here."""
    key = ("hbar", n)
    if key not in _TABLE_CACHE:
        S = r_bracket_constants(n)
        _TABLE_CACHE[key] = ncalg.GeneratorTable(
            names=_entry_names(n),
            kinds=(ncalg.COORDINATE,) * (n * n),
            relations=_bracket_relations(S, "hbar"),
            name=f"gl({n}) graded envelope",
        )
    return _TABLE_CACHE[key]


def sym(f: Poly, table: ncalg.GeneratorTable) -> ncalg.NCPoly:
    """Full symmetrization of a commutative polynomial into the envelope."""
    return ncalg.quantize(f, "weyl", table)


def unsym(F: ncalg.NCPoly) -> dict:
    """Invert symmetrization degree by degree; grading-aware.

    Returns {k: Poly} with sym applied gradewise reproducing F.
    """
    table = F.table
    nvars = table.ngens
    out: dict = {}
    work = F
    while not work.is_zero():
        d = work.degree()
        top = {e: c for e, c in work.terms.items() if sum(e) == d}
        for e, c in top.items():
            mono = Poly(nvars, {e: Fraction(1)})
            for k, ck in c.terms.items():
                if not ck.is_real():
                    raise ValueError("graded envelope produced a complex coefficient")
                cur = out.get(k, Poly.zero(nvars))
                out[k] = cur + mono * ck.re
                work = work - sym(mono * ck.re, table) * HPoly.hbar(k, 1)
    return {k: p for k, p in out.items() if not p.is_zero()}


@dataclass(frozen=True)
class StarResult:
    """Grading-parameter expansion sum_k h^k f_k of a star product."""

    n: int
    orders: dict

    @property
    def classical(self) -> Poly:
        return self.orders.get(0, Poly.zero(self.n * self.n))

    def order(self, k: int) -> Poly:
        return self.orders.get(k, Poly.zero(self.n * self.n))

    @property
    def max_order(self) -> int:
        return max(self.orders, default=0)

    def render(self, names=None) -> str:
        if names is None:
            names = _entry_names(self.n)
        bits = []
        for k in sorted(self.orders):
            head = "" if k == 0 else ("hbar*" if k == 1 else f"hbar^{k}*")
            bits.append(f"{head}({self.orders[k].render(names)})")
        return " + ".join(bits) if bits else "0"


def gutt_star(f: Poly, g: Poly, S: LieStructure) -> StarResult:
    """Star product sym^-1(sym(f) sym(g)); exact and graded."""
    table = gl_hbar_table(S.n)
    if f.nvars != S.n * S.n or g.nvars != S.n * S.n:
        raise ValueError("polynomial arity does not match the structure")
    F = sym(f, table) * sym(g, table)
    return StarResult(S.n, unsym(F))


def star_commutator(f: Poly, g: Poly, S: LieStructure) -> StarResult:
    fg, gf = gutt_star(f, g, S), gutt_star(g, f, S)
    orders: dict = {}
    for k in set(fg.orders) | set(gf.orders):
        p = fg.order(k) - gf.order(k)
        if not p.is_zero():
            orders[k] = p
    return StarResult(S.n, orders)


# ---------------------------------------------------------------------------
# the printed quantum realization (n = 2)


@dataclass(frozen=True)
class RealizationEntry:
    pair: tuple
    expected: str
    got: str
    ok: bool


@dataclass(frozen=True)
class RealizationReport:
    entries: tuple

    @property
    def ok(self) -> bool:
        return all(e.ok for e in self.entries)

    def render(self) -> str:
        lines = []
        for e in self.entries:
            tag = "ok" if e.ok else "MISMATCH"
            lines.append(f"i[{e.pair[0]}, {e.pair[1]}] = {e.got}   "
                         f"(bracket: {e.expected})   {tag}")
        return "\n".join(lines)


def quantum_realization_check() -> RealizationReport:
    """Check the displayed differential realization of the n = 2 entries.

    With p1 = -i(q1 D1 + q2 D2)/2 and p2 = -p1 + C, the prescription
    {.,.} -> i[.,.] must reproduce every bracket among
    p1 = L11, q1 = L12, q2 = L21, p2 = L22, and p1 + p2 must be central.
    """
    S = r_bracket_constants(2)
    t = ncalg.partial_table(("q1", "q2", "C"))
    q1, q2, C = t.gen("q1"), t.gen("q2"), t.gen("C")
    D1, D2 = t.gen("Dq1"), t.gen("Dq2")
    half_mi = GaussRat(0, Fraction(-1, 2))
    p1 = (q1 * D1 + q2 * D2) * half_mi
    p2 = -p1 + C
    ops = {(1, 1): p1, (1, 2): q1, (2, 1): q2, (2, 2): p2}
    labels = {(1, 1): "p1", (1, 2): "q1", (2, 1): "q2", (2, 2): "p2"}

    def classical_image(terms: dict) -> ncalg.NCPoly:
        out = t.zero()
        for c, v in terms.items():
            out = out + ops[c] * v
        return out

    entries = []
    basis = [(1, 1), (1, 2), (2, 1), (2, 2)]
    for x, y in itertools.combinations(basis, 2):
        want = classical_image(S.bracket_pair(x, y))
        got = ops[x].commutator(ops[y]) * GaussRat(0, 1)
        entries.append(RealizationEntry(
            (labels[x], labels[y]), str(want), str(got), got == want))
    center = p1 + p2
    for c, op in sorted(ops.items()):
        comm = center.commutator(op)
        entries.append(RealizationEntry(
            ("p1+p2", labels[c]), "0", str(comm * GaussRat(0, 1)),
            comm.is_zero()))
    return RealizationReport(tuple(entries))


# ---------------------------------------------------------------------------
# trace reduction and CSV


def sl_reduction(L):
    """Split L = L0 + l*I with tr L0 = 0; l is constant under the flows."""
    L = np.asarray(L, dtype=float)
    if L.ndim != 2 or L.shape[0] != L.shape[1]:
        raise ValueError("need a square matrix")
    l = float(np.trace(L)) / L.shape[0]
    return L - l * np.eye(L.shape[0]), l


def structure_to_csv(S: LieStructure, path):
    lines = ["i,j,k,l,r,s,value"]
    for row in S.entries():
        *idx, v = row
        lines.append(",".join(str(x) for x in idx) + f",{Fraction(v)}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
