"""Exact scalar and polynomial arithmetic used by the algebra layers.

Three building blocks live here:

``GaussRat``
    Gaussian rationals ``re + im*i`` with :class:`fractions.Fraction`
    components.  All operator coefficients in the noncommutative engine
    are built from these, so no floating point ever enters an algebraic
    identity check.

``HPoly``
    Finite formal sums ``sum_k c_k * hbar**k`` with ``GaussRat``
    coefficients and ``k >= 0``.  ``hbar`` is central, so these form a
    commutative ring; they are the coefficient ring of the
    noncommutative polynomials.

``Poly``
    Sparse commutative polynomials over ``Fraction`` in a fixed number
    of variables, with exact differentiation and evaluation.  Used for
    classical observables (Lie-Poisson brackets, obstruction
    polynomials) and for the symmetrization inverse of the star
    product.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

RatLike = Union[int, Fraction]


def _as_fraction(x: RatLike) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected an integer or Fraction, got {type(x).__name__}")


def _fmt_fraction(x: Fraction) -> str:
    return str(x)


class GaussRat:
    """A Gaussian rational number ``re + im*i`` with exact components."""

    __slots__ = ("re", "im")

    def __init__(self, re: RatLike = 0, im: RatLike = 0):
        object.__setattr__(self, "re", _as_fraction(re))
        object.__setattr__(self, "im", _as_fraction(im))

    def __setattr__(self, *args):  # immutable
        raise AttributeError("GaussRat is immutable")

    # -- constructors -------------------------------------------------
    @staticmethod
    def of(x: "GaussRatLike") -> "GaussRat":
        if isinstance(x, GaussRat):
            return x
        return GaussRat(_as_fraction(x))

    # -- predicates ---------------------------------------------------
    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_real(self) -> bool:
        return self.im == 0

    # -- ring operations ----------------------------------------------
    def __add__(self, other) -> "GaussRat":
        other = GaussRat.of(other)
        return GaussRat(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self) -> "GaussRat":
        return GaussRat(-self.re, -self.im)

    def __sub__(self, other) -> "GaussRat":
        return self + (-GaussRat.of(other))

    def __rsub__(self, other) -> "GaussRat":
        return GaussRat.of(other) + (-self)

    def __mul__(self, other) -> "GaussRat":
        other = GaussRat.of(other)
        return GaussRat(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def inverse(self) -> "GaussRat":
        nrm = self.re * self.re + self.im * self.im
        if nrm == 0:
            raise ZeroDivisionError("inverse of zero GaussRat")
        return GaussRat(self.re / nrm, -self.im / nrm)

    def __truediv__(self, other) -> "GaussRat":
        return self * GaussRat.of(other).inverse()

    def __pow__(self, k: int) -> "GaussRat":
        if k < 0:
            return self.inverse() ** (-k)
        out = GaussRat(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conjugate(self) -> "GaussRat":
        return GaussRat(self.re, -self.im)

    # -- comparison ---------------------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = GaussRat(other)
        if not isinstance(other, GaussRat):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    # -- conversion / rendering ----------------------------------------
    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __repr__(self) -> str:
        return f"GaussRat({self.re!r}, {self.im!r})"

    def __str__(self) -> str:
        if self.im == 0:
            return _fmt_fraction(self.re)
        if self.re == 0:
            if self.im == 1:
                return "i"
            if self.im == -1:
                return "-i"
            return f"{_fmt_fraction(self.im)}*i"
        sign = "+" if self.im > 0 else "-"
        mag = abs(self.im)
        imtxt = "i" if mag == 1 else f"{_fmt_fraction(mag)}*i"
        return f"{_fmt_fraction(self.re)}{sign}{imtxt}"


GaussRatLike = Union[int, Fraction, GaussRat]

I_UNIT = GaussRat(0, 1)
GR_ZERO = GaussRat(0)
GR_ONE = GaussRat(1)


class HPoly:
    """A finite formal sum ``sum_k c_k * hbar**k`` with GaussRat ``c_k``.

    The dictionary maps nonnegative hbar powers to nonzero Gaussian
    rational coefficients.  These form the (central, commutative)
    coefficient ring of the noncommutative engine: quantum-mechanical
    tables only populate the ``k = 0`` slot, while Lie-algebra tables
    keep ``hbar`` formal.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[int, GaussRatLike] | None = None):
        clean: dict[int, GaussRat] = {}
        for k, c in (terms or {}).items():
            if k < 0:
                raise ValueError("hbar powers must be nonnegative")
            c = GaussRat.of(c)
            if not c.is_zero():
                clean[int(k)] = c
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, *args):
        raise AttributeError("HPoly is immutable")

    # -- constructors -------------------------------------------------
    @staticmethod
    def of(x: "HPolyLike") -> "HPoly":
        if isinstance(x, HPoly):
            return x
        return HPoly({0: GaussRat.of(x)})

    @staticmethod
    def hbar(k: int = 1, coeff: GaussRatLike = 1) -> "HPoly":
        return HPoly({k: GaussRat.of(coeff)})

    # -- predicates ---------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def constant_part(self) -> GaussRat:
        return self.terms.get(0, GR_ZERO)

    def as_gauss_rat(self) -> GaussRat:
        """Return the value when no positive hbar power is present."""
        if any(k > 0 for k in self.terms):
            raise ValueError("coefficient carries formal hbar")
        return self.constant_part()

    # -- ring operations ----------------------------------------------
    def __add__(self, other) -> "HPoly":
        other = HPoly.of(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            s = out.get(k, GR_ZERO) + c
            if s.is_zero():
                out.pop(k, None)
            else:
                out[k] = s
        return HPoly(out)

    __radd__ = __add__

    def __neg__(self) -> "HPoly":
        return HPoly({k: -c for k, c in self.terms.items()})

    def __sub__(self, other) -> "HPoly":
        return self + (-HPoly.of(other))

    def __rsub__(self, other) -> "HPoly":
        return HPoly.of(other) + (-self)

    def __mul__(self, other) -> "HPoly":
        other = HPoly.of(other)
        out: dict[int, GaussRat] = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                k = k1 + k2
                s = out.get(k, GR_ZERO) + c1 * c2
                if s.is_zero():
                    out.pop(k, None)
                else:
                    out[k] = s
        return HPoly(out)

    __rmul__ = __mul__

    def inverse(self) -> "HPoly":
        if set(self.terms) != {0}:
            raise ValueError("only hbar-free coefficients are invertible here")
        return HPoly({0: self.terms[0].inverse()})

    def subs_hbar(self, value: GaussRatLike) -> GaussRat:
        value = GaussRat.of(value)
        out = GR_ZERO
        for k, c in self.terms.items():
            out = out + c * value**k
        return out

    # -- comparison ---------------------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, GaussRat)):
            other = HPoly.of(other)
        if not isinstance(other, HPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self) -> str:
        return f"HPoly({self.terms!r})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for k in sorted(self.terms):
            c = self.terms[k]
            if k == 0:
                parts.append(str(c))
            else:
                hb = "hbar" if k == 1 else f"hbar^{k}"
                ctxt = str(c)
                if ctxt == "1":
                    parts.append(hb)
                elif ctxt == "-1":
                    parts.append(f"-{hb}")
                else:
                    if "+" in ctxt[1:] or "-" in ctxt[1:]:
                        ctxt = f"({ctxt})"
                    parts.append(f"{ctxt}*{hb}")
        txt = parts[0]
        for p in parts[1:]:
            txt += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return txt


HPolyLike = Union[int, Fraction, GaussRat, HPoly]

H_ZERO = HPoly()
H_ONE = HPoly({0: GR_ONE})
H_I = HPoly({0: I_UNIT})


class Poly:
    """Sparse commutative polynomial over ``Fraction`` in ``nvars`` variables.

    Monomials are exponent tuples; negative exponents are allowed (the
    ring is then Laurent), which differentiation handles by the usual
    power rule.
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping[Sequence[int], RatLike] | None = None):
        clean: dict[tuple, Fraction] = {}
        for e, c in (terms or {}).items():
            e = tuple(int(x) for x in e)
            if len(e) != nvars:
                raise ValueError("exponent tuple length mismatch")
            c = _as_fraction(c)
            if c != 0:
                clean[e] = clean.get(e, Fraction(0)) + c
                if clean[e] == 0:
                    del clean[e]
        object.__setattr__(self, "nvars", int(nvars))
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, *args):
        raise AttributeError("Poly is immutable")

    # -- constructors -------------------------------------------------
    @staticmethod
    def zero(nvars: int) -> "Poly":
        return Poly(nvars)

    @staticmethod
    def constant(nvars: int, c: RatLike) -> "Poly":
        return Poly(nvars, {tuple([0] * nvars): c})

    @staticmethod
    def variable(nvars: int, i: int, power: int = 1) -> "Poly":
        e = [0] * nvars
        e[i] = power
        return Poly(nvars, {tuple(e): 1})

    # -- predicates -----------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def total_degree(self) -> int:
        if not self.terms:
            return 0
        return max(sum(e) for e in self.terms)

    # -- ring operations ----------------------------------------------
    def _check(self, other: "Poly"):
        if self.nvars != other.nvars:
            raise ValueError("polynomials over different variable sets")

    def __add__(self, other) -> "Poly":
        if isinstance(other, (int, Fraction)):
            other = Poly.constant(self.nvars, other)
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, Fraction(0)) + c
            if s == 0:
                out.pop(e, None)
            else:
                out[e] = s
        return Poly(self.nvars, out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "Poly":
        if isinstance(other, (int, Fraction)):
            other = Poly.constant(self.nvars, other)
        return self + (-other)

    def __rsub__(self, other) -> "Poly":
        return (-self) + other

    def __mul__(self, other) -> "Poly":
        if isinstance(other, (int, Fraction)):
            return Poly(self.nvars, {e: c * other for e, c in self.terms.items()})
        self._check(other)
        out: dict[tuple, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = out.get(e, Fraction(0)) + c1 * c2
                if s == 0:
                    out.pop(e, None)
                else:
                    out[e] = s
        return Poly(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Poly":
        if k < 0:
            raise ValueError("negative power of a general polynomial")
        out = Poly.constant(self.nvars, 1)
        for _ in range(k):
            out = out * self
        return out

    def diff(self, i: int) -> "Poly":
        out: dict[tuple, Fraction] = {}
        for e, c in self.terms.items():
            if e[i] == 0:
                continue
            e2 = list(e)
            e2[i] -= 1
            e2 = tuple(e2)
            s = out.get(e2, Fraction(0)) + c * e[i]
            if s == 0:
                out.pop(e2, None)
            else:
                out[e2] = s
        return Poly(self.nvars, out)

    def eval(self, point: Sequence) -> object:
        """Evaluate at a point; exact if the entries are Fractions."""
        if len(point) != self.nvars:
            raise ValueError("point dimension mismatch")
        total = None
        for e, c in self.terms.items():
            v = c if isinstance(point[0], Fraction) else float(c)
            for x, k in zip(point, e):
                if k:
                    v = v * x**k
            total = v if total is None else total + v
        if total is None:
            return Fraction(0) if (point and isinstance(point[0], Fraction)) else 0.0
        return total

    def degree_part(self, d: int) -> "Poly":
        return Poly(self.nvars, {e: c for e, c in self.terms.items() if sum(e) == d})

    # -- comparison / rendering ----------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Poly.constant(self.nvars, other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        return f"Poly({self.nvars}, {self.terms!r})"

    def render(self, names: Iterable[str] | None = None) -> str:
        if not self.terms:
            return "0"
        names = list(names) if names is not None else [f"x{i}" for i in range(self.nvars)]
        keyed = sorted(self.terms.items(), key=lambda t: (-sum(t[0]), tuple(-x for x in t[0])))
        parts = []
        for e, c in keyed:
            factors = []
            for name, k in zip(names, e):
                if k == 1:
                    factors.append(name)
                elif k != 0:
                    factors.append(f"{name}^{k}")
            if not factors:
                parts.append(_fmt_fraction(c))
                continue
            mono = "*".join(factors)
            if c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append(f"-{mono}")
            else:
                parts.append(f"{_fmt_fraction(c)}*{mono}")
        txt = parts[0]
        for p in parts[1:]:
            txt += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return txt
