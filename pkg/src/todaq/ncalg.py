"""Exact normal-ordering engine for noncommutative polynomial algebras.

The engine works over tables of generators.  Each generator is either a
*coordinate* or a *momentum*; a table declares pairwise relations

    g_b * g_a = g_a * g_b + R_ba        (b after a in normal order)

where ``R_ba`` is a Laurent polynomial in coordinate generators with
:class:`~todaq.exactnum.HPoly` coefficients.  Normal order places every
coordinate generator to the left of every momentum generator; within
each kind, generators follow the table order.

Two multiplication strategies cover all declared tables:

* *derivation tables*: coordinates commute among themselves, momenta
  commute among themselves, and each momentum acts on the coordinate
  ring as a derivation fixed by its relations.  Powers move through
  coordinate monomials by the binomial identity
  ``p^B q^E = sum_r C(B,r) D^r(q^E) p^(B-r)``.  Laurent exponents are
  supported (the derivation power rule holds for negative powers).
* *PBW tables*: all generators are coordinates with degree-<=1
  relations (a Lie algebra basis, possibly with a central term);
  products are straightened letter by letter with memoization.

Rewriting terminates on every declared table: each step strictly
lowers the lexicographic (momentum degree, inversion count) measure.

Coefficients are exact: Gaussian rationals graded by a formal central
``hbar``.  Quantum-mechanical tables populate only the hbar-free slot;
Lie-algebra tables keep ``hbar`` formal.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .exactnum import (
    GR_ONE,
    H_ONE,
    H_ZERO,
    GaussRat,
    HPoly,
    HPolyLike,
    Poly,
)

COORDINATE = "coordinate"
MOMENTUM = "momentum"

_MINUS_I = GaussRat(0, -1)
_MINUS_HALF_I = GaussRat(0, Fraction(-1, 2))


def _coeff(x) -> HPoly:
    return HPoly.of(x)


class GeneratorTable:
    """An ordered generator set with pairwise reordering relations.

    Parameters
    ----------
    names:
        Generator names in table order.
    kinds:
        ``"coordinate"`` or ``"momentum"`` per generator.
    relations:
        Mapping ``(b_name, a_name) -> terms`` declaring
        ``[g_b, g_a] = sum terms`` for ``b`` after ``a`` in normal
        order.  Each terms value is an iterable of
        ``(coefficient, {name: exponent})`` pairs; the monomials may
        involve coordinate generators only.  Unlisted pairs commute.
    laurent:
        Names of coordinate generators allowed negative exponents.
    """

    def __init__(
        self,
        names: Sequence[str],
        kinds: Sequence[str],
        relations: Mapping[tuple, Iterable] | None = None,
        laurent: Iterable[str] = (),
        name: str = "",
    ):
        self.name = name
        self.names = tuple(names)
        self.kinds = tuple(kinds)
        if len(self.names) != len(set(self.names)):
            raise ValueError("duplicate generator names")
        if len(self.kinds) != len(self.names):
            raise ValueError("kinds length mismatch")
        for k in self.kinds:
            if k not in (COORDINATE, MOMENTUM):
                raise ValueError(f"unknown generator kind {k!r}")
        self.ngens = len(self.names)
        self.index = {n: i for i, n in enumerate(self.names)}
        self.coord_idx = tuple(i for i, k in enumerate(self.kinds) if k == COORDINATE)
        self.mom_idx = tuple(i for i, k in enumerate(self.kinds) if k == MOMENTUM)
        laurent = set(laurent)
        unknown = laurent - set(self.names)
        if unknown:
            raise ValueError(f"laurent flag on unknown generators {sorted(unknown)}")
        for n in laurent:
            if self.kinds[self.index[n]] != COORDINATE:
                raise ValueError("laurent exponents are restricted to coordinates")
        self.laurent = tuple(self.names[i] in laurent for i in range(self.ngens))

        # normal-order rank: coordinates first (table order), then momenta
        rank = [0] * self.ngens
        for pos, i in enumerate(self.coord_idx + self.mom_idx):
            rank[i] = pos
        self._rank = tuple(rank)
        self._order = tuple(sorted(range(self.ngens), key=lambda i: self._rank[i]))

        self._relations: dict[tuple, dict[tuple, HPoly]] = {}
        for (bn, an), terms in (relations or {}).items():
            bi, ai = self.index[bn], self.index[an]
            if self._rank[bi] <= self._rank[ai]:
                raise ValueError(f"relation ({bn},{an}) must have {bn} after {an} in normal order")
            poly: dict[tuple, HPoly] = {}
            for c, mono in terms:
                e = [0] * self.ngens
                for gn, k in mono.items():
                    e[self.index[gn]] = int(k)
                self._validate_exps(tuple(e), coordinates_only=True)
                c = _coeff(c)
                key = tuple(e)
                s = poly.get(key, H_ZERO) + c
                if s.is_zero():
                    poly.pop(key, None)
                else:
                    poly[key] = s
            if poly:
                self._relations[(bi, ai)] = poly

        self.mode = self._classify()
        if self.mode == "derivation":
            # momentum position x coordinate position -> relation terms
            self._deriv: list[list[dict | None]] = []
            for j in self.mom_idx:
                row = []
                for i in self.coord_idx:
                    R = self._relations.get((j, i))
                    row.append(
                        {tuple(e[c] for c in self.coord_idx): h for e, h in R.items()}
                        if R
                        else None
                    )
                self._deriv.append(row)
        self._cache: dict[tuple, dict] = {}

    # -- structure ------------------------------------------------------
    def _classify(self) -> str:
        mom_coord = all(
            self.kinds[b] == MOMENTUM and self.kinds[a] == COORDINATE
            for (b, a) in self._relations
        )
        if mom_coord:
            return "derivation"
        if not self.mom_idx and not any(self.laurent):
            if all(
                all(sum(e) <= 1 for e in poly)
                for poly in self._relations.values()
            ):
                return "pbw"
        raise ValueError(
            "table is neither derivation-type (momentum/coordinate relations only) "
            "nor PBW-type (coordinate generators with degree-<=1 relations)"
        )

    def _validate_exps(self, exps: tuple, coordinates_only: bool = False):
        if len(exps) != self.ngens:
            raise ValueError("exponent tuple length mismatch")
        for i, k in enumerate(exps):
            if k == 0:
                continue
            if coordinates_only and self.kinds[i] != COORDINATE:
                raise ValueError("relation right sides must involve coordinates only")
            if k < 0 and not self.laurent[i]:
                raise ValueError(
                    f"negative exponent on generator {self.names[i]!r} without Laurent flag"
                )

    def relation_poly(self, b: str, a: str) -> "NCPoly":
        """The declared commutator [g_b, g_a] as an NCPoly (0 if unlisted)."""
        bi, ai = self.index[b], self.index[a]
        if self._rank[bi] == self._rank[ai]:
            return self.zero()
        if self._rank[bi] > self._rank[ai]:
            terms = self._relations.get((bi, ai), {})
            return NCPoly(self, dict(terms))
        terms = self._relations.get((ai, bi), {})
        return -NCPoly(self, dict(terms))

    def declared_pairs(self):
        """All normal-order-violating pairs (b, a) as name tuples."""
        out = []
        for bi in range(self.ngens):
            for ai in range(self.ngens):
                if self._rank[bi] > self._rank[ai]:
                    out.append((self.names[bi], self.names[ai]))
        return out

    # -- element constructors --------------------------------------------
    def zero(self) -> "NCPoly":
        return NCPoly(self, {})

    def one(self) -> "NCPoly":
        return NCPoly(self, {(0,) * self.ngens: H_ONE})

    def scalar(self, c: HPolyLike) -> "NCPoly":
        return NCPoly(self, {(0,) * self.ngens: _coeff(c)})

    def gen(self, name: str) -> "NCPoly":
        e = [0] * self.ngens
        e[self.index[name]] = 1
        return NCPoly(self, {tuple(e): H_ONE})

    def monomial(self, mono: Mapping[str, int], coeff: HPolyLike = 1) -> "NCPoly":
        e = [0] * self.ngens
        for n, k in mono.items():
            e[self.index[n]] = int(k)
        return NCPoly(self, {tuple(e): _coeff(coeff)})

    def split_exps(self, exps: tuple) -> tuple[dict, dict]:
        """Split a monomial into coordinate and momentum exponent dicts."""
        coords = {self.names[i]: exps[i] for i in self.coord_idx if exps[i]}
        moms = {self.names[i]: exps[i] for i in self.mom_idx if exps[i]}
        return coords, moms

    # -- monomial multiplication ------------------------------------------
    def multiply_monomials(self, e1: tuple, e2: tuple) -> dict:
        if self.mode == "derivation":
            return self._derivation_multiply(e1, e2)
        word = self._letters(e1) + self._letters(e2)
        return dict(self._straighten(word))

    def _apply_derivation(self, jpos: int, poly: dict) -> dict:
        out: dict[tuple, HPoly] = {}
        row = self._deriv[jpos]
        for ce, h in poly.items():
            for cpos, k in enumerate(ce):
                if k == 0:
                    continue
                R = row[cpos]
                if not R:
                    continue
                base = list(ce)
                base[cpos] -= 1
                hk = h * k
                for re_, rh in R.items():
                    e2 = tuple(b + r for b, r in zip(base, re_))
                    acc = out.get(e2, H_ZERO) + hk * rh
                    if acc.is_zero():
                        out.pop(e2, None)
                    else:
                        out[e2] = acc
        return out

    def _derivation_multiply(self, e1: tuple, e2: tuple) -> dict:
        nc, nm = len(self.coord_idx), len(self.mom_idx)
        C1 = tuple(e1[i] for i in self.coord_idx)
        M1 = tuple(e1[i] for i in self.mom_idx)
        C2 = tuple(e2[i] for i in self.coord_idx)
        M2 = tuple(e2[i] for i in self.mom_idx)
        # move the momentum block of e1 rightward through the coordinate
        # block of e2; the factor adjacent to it comes last in table order
        terms: dict[tuple, dict] = {(C2, (0,) * nm): H_ONE}
        for jpos in range(nm - 1, -1, -1):
            B = M1[jpos]
            if B == 0:
                continue
            new: dict[tuple, HPoly] = {}
            for (ce, me), h in terms.items():
                cur = {ce: h}
                for r in range(B + 1):
                    if r:
                        cur = self._apply_derivation(jpos, cur)
                        if not cur:
                            break
                    cb = math.comb(B, r)
                    me2 = list(me)
                    me2[jpos] += B - r
                    me2t = tuple(me2)
                    for ce2, h2 in cur.items():
                        key = (ce2, me2t)
                        acc = new.get(key, H_ZERO) + (h2 * cb if cb != 1 else h2)
                        if acc.is_zero():
                            new.pop(key, None)
                        else:
                            new[key] = acc
            terms = new
        out: dict[tuple, HPoly] = {}
        for (ce, me), h in terms.items():
            e = [0] * self.ngens
            for pos, i in enumerate(self.coord_idx):
                e[i] = C1[pos] + ce[pos]
            for pos, i in enumerate(self.mom_idx):
                e[i] = me[pos] + M2[pos]
            key = tuple(e)
            acc = out.get(key, H_ZERO) + h
            if acc.is_zero():
                out.pop(key, None)
            else:
                out[key] = acc
        return out

    # -- PBW letter straightening -----------------------------------------
    def _letters(self, exps: tuple) -> tuple:
        word = []
        for i in self._order:
            k = exps[i]
            if k < 0:
                raise ValueError("negative exponent has no letter expansion")
            word.extend([i] * k)
        return tuple(word)

    def _exps_of_word(self, word: tuple) -> tuple:
        e = [0] * self.ngens
        for i in word:
            e[i] += 1
        return tuple(e)

    def _straighten(self, word: tuple) -> dict:
        cached = self._cache.get(word)
        if cached is not None:
            return cached
        res = None
        rank = self._rank
        for i in range(len(word) - 1):
            if rank[word[i]] > rank[word[i + 1]]:
                b, a = word[i], word[i + 1]
                swapped = word[:i] + (a, b) + word[i + 2 :]
                out = dict(self._straighten(swapped))
                R = self._relations.get((b, a))
                if R:
                    for re_, rh in R.items():
                        w2 = word[:i] + self._letters(re_) + word[i + 2 :]
                        for e2, h2 in self._straighten(w2).items():
                            acc = out.get(e2, H_ZERO) + rh * h2
                            if acc.is_zero():
                                out.pop(e2, None)
                            else:
                                out[e2] = acc
                res = out
                break
        if res is None:
            res = {self._exps_of_word(word): H_ONE}
        self._cache[word] = res
        return res

    def __repr__(self):
        return f"GeneratorTable({self.name or self.names!r})"


class NCPoly:
    """A normal-ordered noncommutative polynomial over a fixed table.

    Stored as a map from exponent tuples (one entry per generator, in
    table order) to nonzero :class:`HPoly` coefficients.  A monomial
    means the normal-ordered product: coordinates in table order, then
    momenta in table order.
    """

    __slots__ = ("table", "terms")

    def __init__(self, table: GeneratorTable, terms: Mapping[tuple, HPolyLike]):
        clean: dict[tuple, HPoly] = {}
        for e, c in terms.items():
            e = tuple(int(x) for x in e)
            table._validate_exps(e)
            c = _coeff(c)
            if not c.is_zero():
                clean[e] = c
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, *args):
        raise AttributeError("NCPoly is immutable")

    # -- predicates -----------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        if not self.terms:
            return 0
        return max(sum(e) for e in self.terms)

    def _check(self, other: "NCPoly"):
        if self.table is not other.table:
            raise ValueError("table mismatch")

    # -- ring operations ----------------------------------------------
    def __add__(self, other) -> "NCPoly":
        if not isinstance(other, NCPoly):
            other = self.table.scalar(other)
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, H_ZERO) + c
            if s.is_zero():
                out.pop(e, None)
            else:
                out[e] = s
        return NCPoly(self.table, out)

    __radd__ = __add__

    def __neg__(self) -> "NCPoly":
        return NCPoly(self.table, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "NCPoly":
        if not isinstance(other, NCPoly):
            other = self.table.scalar(other)
        return self + (-other)

    def __rsub__(self, other) -> "NCPoly":
        return (-self) + other

    def __mul__(self, other) -> "NCPoly":
        if not isinstance(other, NCPoly):
            return self.scale(other)
        self._check(other)
        out: dict[tuple, HPoly] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                c12 = c1 * c2
                for e, h in self.table.multiply_monomials(e1, e2).items():
                    s = out.get(e, H_ZERO) + c12 * h
                    if s.is_zero():
                        out.pop(e, None)
                    else:
                        out[e] = s
        return NCPoly(self.table, out)

    def __rmul__(self, other) -> "NCPoly":
        # scalars are central, so left and right scaling agree
        return self.scale(other)

    def scale(self, c: HPolyLike) -> "NCPoly":
        c = _coeff(c)
        return NCPoly(self.table, {e: h * c for e, h in self.terms.items()})

    def __pow__(self, k: int) -> "NCPoly":
        if k < 0:
            return self.monomial_inverse() ** (-k)
        out = self.table.one()
        for _ in range(k):
            out = out * self
        return out

    def commutator(self, other: "NCPoly") -> "NCPoly":
        return self * other - other * self

    def monomial_inverse(self) -> "NCPoly":
        """Invert a single momentum-free monomial (needs Laurent room)."""
        if len(self.terms) != 1:
            raise ValueError("only single monomials are invertible")
        (e, c), = self.terms.items()
        if any(e[i] for i in self.table.mom_idx):
            raise ValueError("monomials containing momenta are not invertible")
        return NCPoly(self.table, {tuple(-x for x in e): c.inverse()})

    def hbar_part(self, k: int) -> "NCPoly":
        """Extract the coefficient of hbar^k (an hbar-free NCPoly)."""
        out = {}
        for e, c in self.terms.items():
            g = c.terms.get(k)
            if g is not None:
                out[e] = HPoly({0: g})
        return NCPoly(self.table, out)

    def subs_hbar(self, value) -> "NCPoly":
        return NCPoly(
            self.table,
            {e: HPoly({0: c.subs_hbar(value)}) for e, c in self.terms.items()},
        )

    # -- comparison / rendering ----------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, GaussRat, HPoly)):
            other = self.table.scalar(other)
        if not isinstance(other, NCPoly):
            return NotImplemented
        return self.table is other.table and self.terms == other.terms

    def __hash__(self):
        return hash((id(self.table), frozenset(self.terms.items())))

    def render(self) -> str:
        if not self.terms:
            return "0"
        names = self.table.names
        order = self.table._order
        keyed = sorted(
            self.terms.items(), key=lambda t: (-sum(t[0]), tuple(-t[0][i] for i in order))
        )
        parts = []
        for e, c in keyed:
            factors = []
            for i in order:
                k = e[i]
                if k == 1:
                    factors.append(names[i])
                elif k != 0:
                    factors.append(f"{names[i]}^{k}")
            ctxt = str(c)
            if not factors:
                if ("+" in ctxt[1:]) or ("-" in ctxt[1:]):
                    ctxt = f"({ctxt})"
                parts.append(ctxt)
                continue
            mono = "*".join(factors)
            if ctxt == "1":
                parts.append(mono)
            elif ctxt == "-1":
                parts.append(f"-{mono}")
            else:
                if ("+" in ctxt[1:]) or ("-" in ctxt[1:]):
                    ctxt = f"({ctxt})"
                parts.append(f"{ctxt}*{mono}")
        txt = parts[0]
        for p in parts[1:]:
            txt += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return txt

    __str__ = render

    def __repr__(self):
        return f"NCPoly<{self.render()}>"


# ---------------------------------------------------------------------------
# core operations


def normal_order(word: Sequence[str], table: GeneratorTable, coeff: HPolyLike = 1) -> NCPoly:
    """Normal-order a product of generators given as a name sequence.

    The result is exact and idempotent on already-normal input.
    """
    out = table.scalar(coeff)
    for name in word:
        out = out * table.gen(name)
    return out


def reference_normal_order(word: Sequence[str], table: GeneratorTable, rng) -> NCPoly:
    """Normal-order via a randomized rewrite schedule (test oracle).

    Maintains a list of (letter word, coefficient) terms and repeatedly
    rewrites a randomly chosen adjacent inversion of a randomly chosen
    term.  Confluence of the table's relations makes the result agree
    with :func:`normal_order` regardless of the schedule.
    """
    rank = table._rank
    idx_word = tuple(table.index[n] for n in word)
    pending: list[tuple[tuple, HPoly]] = [(idx_word, H_ONE)]
    done: dict[tuple, HPoly] = {}
    while pending:
        # collect (term position, inversion position) candidates
        candidates = []
        for tpos, (w, _) in enumerate(pending):
            for i in range(len(w) - 1):
                if rank[w[i]] > rank[w[i + 1]]:
                    candidates.append((tpos, i))
        if not candidates:
            for w, c in pending:
                e = table._exps_of_word(w)
                s = done.get(e, H_ZERO) + c
                if s.is_zero():
                    done.pop(e, None)
                else:
                    done[e] = s
            break
        tpos, i = candidates[int(rng.integers(len(candidates)))]
        w, c = pending.pop(tpos)
        b, a = w[i], w[i + 1]
        new_terms = [(w[:i] + (a, b) + w[i + 2 :], c)]
        R = table._relations.get((b, a))
        if R:
            for re_, rh in R.items():
                new_terms.append((w[:i] + table._letters(re_) + w[i + 2 :], c * rh))
        pending.extend(new_terms)
    return NCPoly(table, done)


def _monomial_list(classical, table: GeneratorTable):
    """Normalize quantize() input to [(coefficient, exponent tuple)]."""
    if isinstance(classical, Poly):
        if classical.nvars != table.ngens:
            raise ValueError("polynomial variable count does not match table")
        return [(Fraction(c), e) for e, c in classical.terms.items()]
    out = []
    for c, mono in classical:
        e = [0] * table.ngens
        for n, k in mono.items():
            e[table.index[n]] = int(k)
        out.append((c, tuple(e)))
    return out


def quantize(classical, prescription: str, table: GeneratorTable) -> NCPoly:
    """Quantize a classical (Laurent) polynomial by an ordering rule.

    ``classical`` is either a :class:`Poly` whose variables follow the
    table's generator order, or a list of ``(coefficient, {name: exp})``
    monomials.  ``prescription`` is one of ``rightP`` (momenta
    rightmost), ``leftP`` (momenta leftmost), ``weyl`` (average over
    all distinct orderings of each monomial's letters).
    """
    p = prescription.lower()
    if p not in ("rightp", "leftp", "weyl"):
        raise ValueError(f"unknown prescription {prescription!r}")
    out = table.zero()
    for c, e in _monomial_list(classical, table):
        support = [i for i in range(table.ngens) if e[i]]
        letters_commute = all(
            table.relation_poly(table.names[i], table.names[j]).is_zero()
            for a, i in enumerate(support)
            for j in support[a + 1:]
        )
        if p == "rightp" or letters_commute:
            out = out + NCPoly(table, {e: _coeff(c)})
        elif p == "leftp":
            ce = tuple(x if i in table.coord_idx else 0 for i, x in enumerate(e))
            me = tuple(x if i in table.mom_idx else 0 for i, x in enumerate(e))
            out = out + NCPoly(table, {me: _coeff(c)}) * NCPoly(table, {ce: H_ONE})
        else:
            if any(x < 0 for x in e):
                raise ValueError("weyl symmetrization needs nonnegative exponents")
            letters = tuple(
                itertools.chain.from_iterable((table.names[i],) * e[i] for i in table._order)
            )
            orderings = sorted(set(itertools.permutations(letters)))
            share = Fraction(c) * Fraction(1, len(orderings))
            for w in orderings:
                out = out + normal_order(w, table, share)
    return out


@dataclass(frozen=True)
class Substitution:
    """A generator-wise algebra map between tables."""

    source: GeneratorTable
    target: GeneratorTable
    images: Mapping[str, NCPoly]
    name: str = ""

    def image(self, gen_name: str) -> NCPoly:
        try:
            img = self.images[gen_name]
        except KeyError:
            raise KeyError(f"undefined image for generator {gen_name!r}") from None
        if img.table is not self.target:
            raise ValueError("image lives over the wrong target table")
        return img


def substitute(f: NCPoly, s: Substitution) -> NCPoly:
    """Homomorphic image of ``f`` under ``s``, normal-ordered.

    Monomials are mapped factor by factor in normal order; negative
    exponents require the generator's image to be an invertible
    (single, momentum-free) monomial.
    """
    if f.table is not s.source:
        raise ValueError("expression does not live over the substitution source")
    out = s.target.zero()
    for e, c in f.terms.items():
        term = s.target.scalar(c)
        for i in s.source._order:
            k = e[i]
            if k == 0:
                continue
            term = term * (s.image(s.source.names[i]) ** k)
        out = out + term
    return out


@dataclass(frozen=True)
class RelationCheck:
    pair: tuple
    residual: NCPoly

    @property
    def ok(self) -> bool:
        return self.residual.is_zero()


@dataclass(frozen=True)
class RelationReport:
    substitution: Substitution
    entries: tuple

    @property
    def ok(self) -> bool:
        return all(ent.ok for ent in self.entries)

    def render(self) -> str:
        lines = []
        for ent in self.entries:
            b, a = ent.pair
            status = "preserved" if ent.ok else f"residual {ent.residual.render()}"
            lines.append(f"[{b},{a}]: {status}")
        return "\n".join(lines)


def verify_relations(s: Substitution, expected: Mapping[tuple, NCPoly] | None = None) -> RelationReport:
    """Check that a substitution preserves commutation relations.

    For each declared relation ``[g_b, g_a] = R`` of the source table
    (or of ``expected``, keyed by name pairs), computes
    ``commutator(s(g_b), s(g_a)) - s(R)``; a zero residual means the
    relation is preserved.
    """
    if expected is None:
        expected = {
            (b, a): s.source.relation_poly(b, a) for (b, a) in s.source.declared_pairs()
        }
    entries = []
    for (b, a), R in sorted(expected.items()):
        lhs = s.image(b).commutator(s.image(a))
        entries.append(RelationCheck((b, a), lhs - substitute(R, s)))
    return RelationReport(s, tuple(entries))


# ---------------------------------------------------------------------------
# table catalog


def weyl_pair(laurent: bool = False) -> GeneratorTable:
    """The canonical pair: [p, q] = -i."""
    return GeneratorTable(
        names=("q", "p"),
        kinds=(COORDINATE, MOMENTUM),
        relations={("p", "q"): [(_MINUS_I, {})]},
        laurent=("q",) if laurent else (),
        name="weyl",
    )


def toy_pair(n: int) -> GeneratorTable:
    """The deformed pair: [p, q] = -i q^n (q Laurent-enabled)."""
    return GeneratorTable(
        names=("q", "p"),
        kinds=(COORDINATE, MOMENTUM),
        relations={("p", "q"): [(_MINUS_I, {"q": n})]},
        laurent=("q",),
        name=f"toy(n={n})",
    )


def a1_cm_table() -> GeneratorTable:
    """Center-of-mass chart: coordinate E (an exponential), [P, E] = -i E."""
    return GeneratorTable(
        names=("E", "P"),
        kinds=(COORDINATE, MOMENTUM),
        relations={("P", "E"): [(_MINUS_I, {"E": 1})]},
        name="a1_cm",
    )


def a2_xi_table() -> GeneratorTable:
    """Relative chart with exponential half-coordinates c0, c1."""
    return GeneratorTable(
        names=("c0", "c1", "pxi", "peta"),
        kinds=(COORDINATE, COORDINATE, MOMENTUM, MOMENTUM),
        relations={
            ("pxi", "c0"): [(_MINUS_HALF_I, {"c0": 1})],
            ("peta", "c1"): [(_MINUS_HALF_I, {"c1": 1})],
        },
        name="a2_xi",
    )


def a2_qp_table() -> GeneratorTable:
    """Two canonical pairs: [P_i, Q_i] = -i."""
    return GeneratorTable(
        names=("Q1", "Q2", "P1", "P2"),
        kinds=(COORDINATE, COORDINATE, MOMENTUM, MOMENTUM),
        relations={
            ("P1", "Q1"): [(_MINUS_I, {})],
            ("P2", "Q2"): [(_MINUS_I, {})],
        },
        name="a2_qp",
    )


def omega_table() -> GeneratorTable:
    """Scaled pairs: [pi_i, l_i] = -(i/2) l_i."""
    return GeneratorTable(
        names=("l1", "l2", "pi1", "pi2"),
        kinds=(COORDINATE, COORDINATE, MOMENTUM, MOMENTUM),
        relations={
            ("pi1", "l1"): [(_MINUS_HALF_I, {"l1": 1})],
            ("pi2", "l2"): [(_MINUS_HALF_I, {"l2": 1})],
        },
        name="omega",
    )


def partial_table(coord_names: Sequence[str] = ("x",), laurent: bool = False) -> GeneratorTable:
    """Coordinates with matching derivations: [D_x, x] = +1.

    Used to realize candidate operators like -i x D_x and test which
    declared relations they satisfy.
    """
    coords = tuple(coord_names)
    moms = tuple(f"D{n}" for n in coords)
    relations = {(f"D{n}", n): [(GR_ONE, {})] for n in coords}
    return GeneratorTable(
        names=coords + moms,
        kinds=(COORDINATE,) * len(coords) + (MOMENTUM,) * len(moms),
        relations=relations,
        laurent=coords if laurent else (),
        name="partial",
    )


# ---------------------------------------------------------------------------
# operator catalog (normal-ordered images of the displayed operators)

_HALF = Fraction(1, 2)
_QUARTER = Fraction(1, 4)
_EIGHTH = Fraction(1, 8)


def a1_cm_hamiltonian(t: GeneratorTable) -> NCPoly:
    """H = (P^2 + E^2)/2 on the center-of-mass table."""
    P, E = t.gen("P"), t.gen("E")
    return (P * P + E * E) * _HALF


def a1_right_hamiltonian(t: GeneratorTable) -> NCPoly:
    """H_r = (q^2 p^2 - i q p + q^2)/2 on a canonical pair table."""
    q, p = t.gen("q"), t.gen("p")
    return (q * q * p * p + q * p * GaussRat(0, -1) + q * q) * _HALF


def a1_left_hamiltonian(t: GeneratorTable) -> NCPoly:
    """H_l = (q^2 p^2 - 3i q p - 1 + q^2)/2 on a canonical pair table."""
    q, p = t.gen("q"), t.gen("p")
    return (q * q * p * p + q * p * GaussRat(0, -3) - t.one() + q * q) * _HALF


def a1_weyl_hamiltonian(t: GeneratorTable) -> NCPoly:
    """H_w = (1/8)(q^2 p^2 + 2 p q^2 p + p^2 q^2) + q^2/2."""
    q, p = t.gen("q"), t.gen("p")
    q2 = q * q
    return (q2 * p * p + p * q2 * p * 2 + p * p * q2) * _EIGHTH + q2 * _HALF


def toy_hamiltonian(t: GeneratorTable, n: int) -> NCPoly:
    """H = (q^n p q^n p + q^2)/2 on the canonical pair table."""
    q, p = t.gen("q"), t.gen("p")
    qn = t.monomial({"q": n})
    return (qn * p * qn * p + q * q) * _HALF


def toy_conjugate_pair(t: GeneratorTable, n: int) -> tuple[NCPoly, NCPoly]:
    """U = q^n p and u = q^(1-n)/(1-n); satisfies [U, u] = -i for n != 1."""
    if n == 1:
        raise ValueError("n = 1 makes the conjugate coordinate logarithmic")
    U = t.monomial({"q": n}) * t.gen("p")
    u = t.monomial({"q": 1 - n}, Fraction(1, 1 - n))
    return U, u


def a2_xi_hamiltonian(t: GeneratorTable) -> NCPoly:
    pxi, peta = t.gen("pxi"), t.gen("peta")
    c0, c1 = t.gen("c0"), t.gen("c1")
    return pxi * pxi - pxi * peta + peta * peta + c0 * c0 + c1 * c1


def a2_xi_invariant(t: GeneratorTable) -> NCPoly:
    """The cubic invariant 3(peta^2 pxi - peta pxi^2 - c0^2 peta + c1^2 pxi)."""
    pxi, peta = t.gen("pxi"), t.gen("peta")
    c0, c1 = t.gen("c0"), t.gen("c1")
    return (peta * peta * pxi - peta * pxi * pxi - c0 * c0 * peta + c1 * c1 * pxi) * 3


def a2_qp_hamiltonian(t: GeneratorTable) -> NCPoly:
    Q1, Q2, P1, P2 = t.gen("Q1"), t.gen("Q2"), t.gen("P1"), t.gen("P2")
    A, B = Q1 * P1, Q2 * P2
    return (A * A + B * B - A * B) * _QUARTER + Q1 * Q1 + Q2 * Q2


def a2_qp_invariant(t: GeneratorTable) -> NCPoly:
    """Cubic invariant in the (Q, P) chart; normalized to 1/3 of the
    image of :func:`a2_xi_invariant` under the canonical substitution."""
    Q1, Q2, P1, P2 = t.gen("Q1"), t.gen("Q2"), t.gen("P1"), t.gen("P2")
    A, B = Q1 * P1, Q2 * P2
    return (B * B * A - B * A * A) * _EIGHTH - Q1 * Q1 * B * _HALF + Q2 * Q2 * A * _HALF


def omega_hamiltonian(t: GeneratorTable) -> NCPoly:
    pi1, pi2, l1, l2 = t.gen("pi1"), t.gen("pi2"), t.gen("l1"), t.gen("l2")
    return pi1 * pi1 - pi1 * pi2 + pi2 * pi2 + l1 * l1 + l2 * l2


def omega_invariant(t: GeneratorTable) -> NCPoly:
    pi1, pi2, l1, l2 = t.gen("pi1"), t.gen("pi2"), t.gen("l1"), t.gen("l2")
    return pi2 * pi2 * pi1 - pi2 * pi1 * pi1 - l1 * l1 * pi2 + l2 * l2 * pi1


# ---------------------------------------------------------------------------
# substitution catalog


def a1_ordering_substitution(side: str = "right", src: GeneratorTable | None = None,
                             tgt: GeneratorTable | None = None) -> Substitution:
    """P |-> qp (right) or pq (left), E |-> q, into a canonical pair."""
    src = src or a1_cm_table()
    tgt = tgt or weyl_pair()
    q, p = tgt.gen("q"), tgt.gen("p")
    if side == "right":
        P_img = q * p
    elif side == "left":
        P_img = p * q
    else:
        raise ValueError("side must be 'right' or 'left'")
    return Substitution(src, tgt, {"P": P_img, "E": q}, name=f"a1_{side}")


def a2_canonical_substitution(src: GeneratorTable | None = None,
                              tgt: GeneratorTable | None = None) -> Substitution:
    """pxi |-> Q1 P1 / 2, peta |-> Q2 P2 / 2, c0 |-> Q1, c1 |-> Q2."""
    src = src or a2_xi_table()
    tgt = tgt or a2_qp_table()
    images = {
        "pxi": tgt.gen("Q1") * tgt.gen("P1") * _HALF,
        "peta": tgt.gen("Q2") * tgt.gen("P2") * _HALF,
        "c0": tgt.gen("Q1"),
        "c1": tgt.gen("Q2"),
    }
    return Substitution(src, tgt, images, name="a2_canonical")


def omega_poisson_substitution(src: GeneratorTable | None = None,
                               tgt: GeneratorTable | None = None) -> Substitution:
    """pi_i |-> Q_i P_i / 2, l_i |-> Q_i."""
    src = src or omega_table()
    tgt = tgt or a2_qp_table()
    images = {
        "pi1": tgt.gen("Q1") * tgt.gen("P1") * _HALF,
        "pi2": tgt.gen("Q2") * tgt.gen("P2") * _HALF,
        "l1": tgt.gen("Q1"),
        "l2": tgt.gen("Q2"),
    }
    return Substitution(src, tgt, images, name="omega_poisson")


def scaling_realization_candidates() -> dict:
    """Both candidate realizations of the scaled-pair momentum.

    Over coordinates l with derivation D ([D, l] = +1), returns the
    commutators [-i l D, l] and [-(i/2) l D, l] so callers can record
    which candidate satisfies the declared relation
    [pi, l] = -(i/2) l.  The two displays in the source material
    disagree by a factor of 2; the engine measures, it does not guess.
    """
    t = partial_table(("l",))
    l, D = t.gen("l"), t.gen("Dl")
    full = (l * D) * _MINUS_I
    half = (l * D) * _MINUS_HALF_I
    target_half = l * _MINUS_HALF_I
    target_full = l * _MINUS_I
    return {
        "table": t,
        "candidate_full": full,
        "candidate_half": half,
        "commutator_full": full.commutator(l),
        "commutator_half": half.commutator(l),
        "declared": target_half,
        "full_matches_declared": full.commutator(l) == target_half,
        "half_matches_declared": half.commutator(l) == target_half,
        "full_matches_unhalved": full.commutator(l) == target_full,
    }
