"""Exact arithmetic in the rationals and in quadratic fields Q(sqrt d).

Elements are stored as ``a + b*w`` where ``w`` is the standard integral
generator of the ring of integers, so no floating point ever enters a value.
The rationals are encoded as ``d = 1`` (and then ``b`` is always zero).
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import isqrt

from sympy import factorint

Rational = Fraction | int


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def sign_surd(u: Rational, v: Rational, d: int) -> int:
    """Sign of ``u + v*sqrt(d)`` for ``d > 1`` squarefree, decided by squaring."""
    su, sv = _sign(u), _sign(v)
    if sv == 0:
        return su
    if su == 0 or su == sv:
        return sv if su == 0 else su
    c = u * u - d * v * v
    # c != 0 since d is not a square
    return su if c > 0 else sv


@dataclass(frozen=True)
class QuadField:
    d: int

    @property
    def is_rational(self) -> bool:
        return self.d == 1

    @property
    def is_real(self) -> bool:
        return self.d > 1

    @property
    def is_imaginary(self) -> bool:
        return self.d < 0

    @property
    def degree(self) -> int:
        return 1 if self.d == 1 else 2

    @property
    def disc(self) -> int:
        if self.d == 1:
            return 1
        return self.d if self.d % 4 == 1 else 4 * self.d

    @property
    def signature(self) -> int:
        """Number of real embeddings."""
        if self.d == 1:
            return 1
        return 2 if self.d > 1 else 0

    @property
    def tr_omega(self) -> int:
        return 1 if self.d % 4 == 1 and self.d != 1 else 0

    @property
    def n_omega(self) -> int:
        if self.d == 1:
            return 0
        return (1 - self.d) // 4 if self.d % 4 == 1 else -self.d

    @property
    def omega_str(self) -> str:
        if self.d == 1:
            return "1"
        r = f"sqrt({self.d})"
        return f"(1+{r})/2" if self.d % 4 == 1 else r

    def __str__(self) -> str:
        return "Q" if self.d == 1 else f"Q(sqrt({self.d}))"

    def __call__(self, a: Rational = 0, b: Rational = 0) -> FieldElement:
        return FieldElement(Fraction(a), Fraction(b), self)

    @property
    def one(self) -> FieldElement:
        return self(1)

    @property
    def omega(self) -> FieldElement:
        if self.d == 1:
            raise ValueError("Q has no quadratic generator")
        return self(0, 1)

    def sqrt_d(self) -> FieldElement:
        """The element sqrt(d) itself."""
        if self.d == 1:
            return self(1)
        if self.d % 4 == 1:
            return self(-1, 2)
        return self(0, 1)

    def from_surd(self, u: Rational, v: Rational) -> FieldElement:
        """Element ``u + v*sqrt(d)``."""
        u, v = Fraction(u), Fraction(v)
        if self.d == 1:
            return self(u + v)
        if self.d % 4 == 1:
            # u + v sqrt(d) = (u - v) + 2v w
            return self(u - v, 2 * v)
        return self(u, v)


def _is_squarefree(n: int) -> bool:
    return all(e == 1 for e in factorint(abs(n)).values())


@lru_cache(maxsize=None)
def make_field(d: int) -> QuadField:
    if d == 0:
        raise ValueError("d must be nonzero")
    if d != 1 and not _is_squarefree(d):
        raise ValueError(f"d={d} is not squarefree")
    return QuadField(d)


QQ = make_field(1)


@dataclass(frozen=True)
class FieldElement:
    a: Fraction
    b: Fraction
    field: QuadField

    def __post_init__(self):
        if self.field.d == 1 and self.b != 0:
            raise ValueError("elements of Q have b = 0")

    # -- coercion -----------------------------------------------------
    def _coerce(self, other) -> FieldElement:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise ValueError(f"field mismatch: {self.field} vs {other.field}")
            return other
        if isinstance(other, (int, Fraction)):
            return FieldElement(Fraction(other), Fraction(0), self.field)
        return NotImplemented

    # -- ring operations ----------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.a + o.a, self.b + o.b, self.field)

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(-self.a, -self.b, self.field)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.a - o.a, self.b - o.b, self.field)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        F = self.field
        t, n = F.tr_omega, F.n_omega
        bb = self.b * o.b
        # w^2 = t*w - n
        return FieldElement(self.a * o.a - n * bb, self.a * o.b + self.b * o.a + t * bb, F)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result, base = self.field.one, self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- invariants -----------------------------------------------------
    def conj(self) -> FieldElement:
        return FieldElement(self.a + self.b * self.field.tr_omega, -self.b, self.field)

    def norm(self) -> Fraction:
        F = self.field
        if F.d == 1:
            return self.a
        return self.a * self.a + self.a * self.b * F.tr_omega + self.b * self.b * F.n_omega

    def trace(self) -> Fraction:
        return self.field.degree * self.a + self.b * self.field.tr_omega

    def inverse(self) -> FieldElement:
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        if self.field.d == 1:
            return FieldElement(1 / self.a, Fraction(0), self.field)
        c = self.conj()
        return FieldElement(c.a / n, c.b / n, self.field)

    def surd(self) -> tuple[Fraction, Fraction]:
        """Return ``(u, v)`` with ``self = u + v*sqrt(d)``."""
        if self.field.d % 4 == 1 and self.field.d != 1:
            return self.a + self.b / 2, self.b / 2
        return self.a, self.b

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def is_integral(self) -> bool:
        return self.a.denominator == 1 and self.b.denominator == 1

    def denominator(self) -> int:
        """Least positive integer M with M*self integral."""
        from math import lcm

        return lcm(self.a.denominator, self.b.denominator)

    def coords(self) -> tuple[Fraction, Fraction]:
        return self.a, self.b

    def embedding_signs(self) -> tuple[int, ...]:
        """Signs under the real embeddings (empty for imaginary fields)."""
        F = self.field
        if F.d == 1:
            return (_sign(self.a),)
        if F.d < 0:
            return ()
        u, v = self.surd()
        return sign_surd(u, v, F.d), sign_surd(u, -v, F.d)

    def is_totally_positive(self) -> bool:
        if self.is_zero():
            raise ValueError("total positivity of zero is undefined")
        return all(s > 0 for s in self.embedding_signs())

    def __float__(self) -> float:
        u, v = self.surd()
        if self.field.d < 0:
            raise TypeError("imaginary element has no real value")
        return float(u) + float(v) * self.field.d ** 0.5

    def __str__(self) -> str:
        if self.field.d == 1 or self.b == 0:
            return str(self.a)
        return f"{self.a}{'+' if self.b >= 0 else '-'}{abs(self.b)}*w"

    def __repr__(self) -> str:
        return f"FieldElement({self}, {self.field})"


def norm(x: FieldElement) -> Fraction:
    return x.norm()


def is_totally_positive(x: FieldElement) -> bool:
    return x.is_totally_positive()


_ELEMENT_RE = re.compile(r"^\s*([+-]?[\d/]+)?\s*(?:([+-])\s*([\d/]+)?\s*\*?\s*w)?\s*$")


def parse_element(F: QuadField, text: str) -> FieldElement:
    """Parse ``"a+b*w"`` syntax, e.g. ``"3"``, ``"1/2-3*w"``, ``"w"``."""
    s = text.replace(" ", "")
    if s in ("w", "+w", "-w"):
        s = ("-" if s.startswith("-") else "") + "0" + ("-" if s.startswith("-") else "+") + "1*w"
    m = _ELEMENT_RE.match(s)
    if not m or (m.group(1) is None and m.group(2) is None):
        raise ValueError(f"cannot parse element {text!r}")
    a = Fraction(m.group(1)) if m.group(1) else Fraction(0)
    b = Fraction(0)
    if m.group(2):
        b = Fraction(m.group(3)) if m.group(3) else Fraction(1)
        if m.group(2) == "-":
            b = -b
    if F.d == 1 and b != 0:
        raise ValueError("Q has no w component")
    return F(a, b)


# -- units --------------------------------------------------------------

@dataclass(frozen=True)
class UnitInfo:
    fundamental_unit: FieldElement | None
    fu_norm: int | None
    index_plus: int
    torsion_order: int
    tp_generator: FieldElement | None
    torsion_generator: FieldElement

    @property
    def tp_unit_gens(self) -> list[FieldElement]:
        """Generators of the totally positive units O*_+ (as a group)."""
        if self.tp_generator is not None:
            return [self.tp_generator]
        if self.torsion_generator.field.is_imaginary:
            return [self.torsion_generator]
        return []


def _cf_fundamental_unit(F: QuadField) -> FieldElement:
    """Smallest unit > 1 from the continued fraction expansion of w."""
    d = F.d
    s = isqrt(d)
    P, Q = (1, 2) if d % 4 == 1 else (0, 1)
    p_prev, p = 0, 1
    q_prev, q = 1, 0
    while True:
        a = (P + s) // Q
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
        eta = F(p, -q)
        if abs(eta.norm()) == 1:
            break
        P = a * Q - P
        Q = (d - P * P) // Q
    for cand in (eta, -eta, eta.conj(), -eta.conj()):
        u, v = cand.surd()
        if u > 0 and v > 0:
            return cand
    raise AssertionError("no positive representative of the unit")


@lru_cache(maxsize=None)
def unit_info(F: QuadField) -> UnitInfo:
    if F.d == 1:
        return UnitInfo(None, None, 2, 2, None, F(-1))
    if F.d < 0:
        if F.d == -1:
            return UnitInfo(None, None, 1, 4, None, F(0, 1))
        if F.d == -3:
            return UnitInfo(None, None, 1, 6, None, F(0, 1))
        return UnitInfo(None, None, 1, 2, None, F(-1))
    eps = _cf_fundamental_unit(F)
    fu_norm = int(eps.norm())
    reps = [F(1), F(-1), eps, -eps]
    n_tp = sum(r.is_totally_positive() for r in reps)
    index_plus = 4 // n_tp
    tp_gen = eps if eps.is_totally_positive() else eps * eps
    return UnitInfo(eps, fu_norm, index_plus, 2, tp_gen, F(-1))


def unit_coset_reps(F: QuadField) -> list[FieldElement]:
    """Representatives of O* / O*_+."""
    if F.d == 1:
        return [F(1), F(-1)]
    if F.d < 0:
        return [F(1)]
    info = unit_info(F)
    if info.fu_norm == -1:
        return [F(1), F(-1), info.fundamental_unit, -info.fundamental_unit]
    return [F(1), F(-1)]


def torsion_units(F: QuadField) -> list[FieldElement]:
    info = unit_info(F)
    z = info.torsion_generator
    return [z**k for k in range(info.torsion_order)]
