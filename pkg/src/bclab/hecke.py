"""The totally positive ax+b Hecke pair over O inside K.

Elements are pairs ``(y, x)`` with ``y`` in K and ``x`` totally positive,
multiplied by ``(y, x)(y', x') = (y + x y', x x')``. The subgroup Gamma
consists of pairs with ``y`` integral and ``x`` a totally positive unit.

Double cosets are infinite, but every question asked about them here is
answered inside a finite quotient ``(1/M)O / O`` or ``(1/M)O / xO``, where
everything can be listed.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import floor, lcm, log

from .ideals import Ideal, principal_ideal, unit_ideal
from .quadfield import FieldElement, QuadField, unit_info


@dataclass(frozen=True)
class AffineElement:
    y: FieldElement
    x: FieldElement

    def __post_init__(self):
        if self.x.field != self.y.field:
            raise ValueError("field mismatch between y and x")
        if self.x.is_zero() or not self.x.is_totally_positive():
            raise ValueError(f"x = {self.x} is not totally positive")

    @property
    def field(self) -> QuadField:
        return self.x.field

    @classmethod
    def _trusted(cls, y: FieldElement, x: FieldElement) -> AffineElement:
        """Skip validation; ``x`` must already be known totally positive."""
        a = object.__new__(cls)
        object.__setattr__(a, "y", y)
        object.__setattr__(a, "x", x)
        return a

    def __mul__(self, other: AffineElement) -> AffineElement:
        return affine_mul(self, other)

    def inverse(self) -> AffineElement:
        return affine_inv(self)

    def __str__(self) -> str:
        return f"({self.y}, {self.x})"


def affine(F: QuadField, y, x) -> AffineElement:
    """Build an element from field elements or rationals."""
    wrap = lambda v: v if isinstance(v, FieldElement) else F(v)
    return AffineElement(wrap(y), wrap(x))


def affine_mul(a: AffineElement, b: AffineElement) -> AffineElement:
    if a.field != b.field:
        raise ValueError(f"field mismatch: {a.field} vs {b.field}")
    return AffineElement(a.y + a.x * b.y, a.x * b.x)


def affine_inv(a: AffineElement) -> AffineElement:
    xi = a.x.inverse()
    return AffineElement(-(xi * a.y), xi)


def identity(F: QuadField) -> AffineElement:
    return AffineElement(F(0), F(1))


def in_gamma(a: AffineElement) -> bool:
    return a.y.is_integral() and a.x.is_integral() and abs(a.x.norm()) == 1


# -- lattice helpers ----------------------------------------------------------

def _elem_key(z: FieldElement) -> tuple[Fraction, Fraction]:
    return z.a, z.b


def reduce_mod(z: FieldElement, lat: Ideal) -> FieldElement:
    """Canonical representative of ``z`` modulo the lattice of a fractional ideal."""
    F = z.field
    D = lat.denom
    if F.is_rational:
        step = Fraction(lat.a, D)
        return F(z.a - floor(z.a / step) * step)
    c = Fraction(lat.c, D)
    t = floor(z.b / c)
    a_ = z.a - t * Fraction(lat.b, D)
    b_ = z.b - t * c
    step = Fraction(lat.a, D)
    return F(a_ - floor(a_ / step) * step, b_)


# Enumeration works on integer coordinates: an element (u + v w)/D is the pair (u, v)
# for a common denominator D, and a lattice (a Z + (b + c w) Z)/denom becomes
# the triangular integer lattice spanned by (a, 0) and (b, c) after scaling.

def _common_denom(zs, lats) -> int:
    return lcm(1, *(z.denominator() for z in zs), *(l.denom for l in lats))


def _scaled(lat: Ideal, D: int) -> tuple[int, int, int]:
    k = D // lat.denom
    return lat.a * k, lat.b * k, lat.c * k


def _as_pair(z: FieldElement, D: int) -> tuple[int, int]:
    return int(z.a * D), int(z.b * D)


def _ired(u: int, v: int, lat: tuple[int, int, int]) -> tuple[int, int]:
    a, b, c = lat
    if c and v:
        t = v // c
        u -= t * b
        v -= t * c
    return u % a, v


def _to_elems(F: QuadField, pairs, D: int) -> list[FieldElement]:
    return [F(Fraction(u, D), Fraction(v, D)) for u, v in sorted(pairs)]


def _iquotient(big: tuple[int, int, int], small: tuple[int, int, int], rational: bool) -> list[tuple[int, int]]:
    A, B, C = big
    a, _, c = small
    rows = 1 if rational else c // C
    return [_ired(j * B + i * A, j * C, small) for j in range(rows) for i in range(a // A)]


def _iorbit(F: QuadField, pairs, lat: tuple[int, int, int]) -> set[tuple[int, int]]:
    t, n = F.tr_omega, F.n_omega
    units = [(int(u.a), int(u.b)) for u in _tp_unit_gens(F)]
    seen = {_ired(u, v, lat) for u, v in pairs}
    frontier = list(seen)
    while frontier:
        nxt = []
        for u, v in frontier:
            for p, q in units:
                vq = v * q
                w = _ired(u * p - n * vq, u * q + v * p + t * vq, lat)
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
    return seen


def quotient_reps(big: Ideal, small: Ideal) -> list[FieldElement]:
    """Representatives of ``big / small`` for lattices ``small`` inside ``big``."""
    F = big.field
    D = _common_denom([], [big, small])
    return _to_elems(F, _iquotient(_scaled(big, D), _scaled(small, D), F.is_rational), D)


def _tp_unit_gens(F: QuadField) -> list[FieldElement]:
    return unit_info(F).tp_unit_gens


def unit_orbit(zs: list[FieldElement], lat: Ideal) -> list[FieldElement]:
    """Closure of ``zs`` (mod ``lat``) under multiplication by totally positive units."""
    F = zs[0].field
    D = _common_denom(zs, [lat])
    return _to_elems(F, _iorbit(F, [_as_pair(z, D) for z in zs], _scaled(lat, D)), D)


# -- unit reduction of x ----------------------------------------------------------

def _ratio_ge(r: FieldElement, bound: FieldElement) -> bool:
    """``r >= bound`` in the first real embedding."""
    diff = r - bound
    return diff.is_zero() or diff.embedding_signs()[0] > 0


def reduce_tp(x: FieldElement) -> FieldElement:
    """Canonical representative of ``x`` modulo totally positive units."""
    F = x.field
    if F.is_rational:
        return x
    if F.is_imaginary:
        z = unit_info(F).torsion_generator
        cands = [x * z**k for k in range(unit_info(F).torsion_order)]
        return min(cands, key=_elem_key)
    e = unit_info(F).tp_generator
    e2 = e * e  # x -> x e multiplies x/x' by e/e' = e^2
    ei = e.inverse()
    one = F(1)
    # fundamental domain 1 <= x/x' < e^2; start near it using a float estimate
    r = x / x.conj()
    k = floor(log(float(r)) / log(float(e2)))
    y = x * ei**k
    r = y / y.conj()
    while not _ratio_ge(r, one):
        y, r = y * e, r * e2
    while _ratio_ge(r, e2):
        y, r = y * ei, r / e2
    return y


# -- cosets --------------------------------------------------------------------------

def coset_canonical(side: str, a: AffineElement) -> AffineElement:
    """Canonical representative of ``Gamma a`` (side="left") or ``a Gamma`` (side="right").

    ``side`` names the side on which Gamma multiplies.
    """
    F = a.field
    x0 = reduce_tp(a.x)
    if side == "left":
        v = x0 / a.x
        return AffineElement(reduce_mod(v * a.y, unit_ideal(F)), x0)
    if side == "right":
        return AffineElement(reduce_mod(a.y, principal_ideal(x0)), x0)
    raise ValueError(f"side must be 'left' or 'right', not {side!r}")


def _key(a: AffineElement) -> tuple:
    return (_elem_key(a.y), _elem_key(a.x))


def double_coset_key(g: AffineElement) -> tuple:
    """Hashable invariant of ``Gamma g Gamma``: reduced x and the least point of the unit orbit of y."""
    F = g.field
    x0 = reduce_tp(g.x)
    y0 = (x0 / g.x) * g.y
    lat = unit_ideal(F) + principal_ideal(x0)
    orbit = unit_orbit([y0], lat)
    return (_elem_key(x0), _elem_key(orbit[0]))


def double_coset_rep(g: AffineElement) -> AffineElement:
    (xa, xb), (ya, yb) = double_coset_key(g)
    F = g.field
    return AffineElement(F(ya, yb), F(xa, xb))


@dataclass(frozen=True)
class DoubleCosetDecomposition:
    """``Gamma g Gamma`` as a disjoint union of cosets.

    ``left_reps`` are representatives ``r`` of the cosets ``r Gamma`` (L of them)
    and ``right_reps`` representatives ``l`` of ``Gamma l`` (R of them).
    """

    g: AffineElement
    left_reps: tuple[AffineElement, ...]
    right_reps: tuple[AffineElement, ...]
    modulus: int

    @property
    def L(self) -> int:
        return len(self.left_reps)

    @property
    def R(self) -> int:
        return len(self.right_reps)

    @property
    def delta(self) -> Fraction:
        """Number of ``Gamma l`` pieces over number of ``r Gamma`` pieces."""
        return Fraction(self.R, self.L)


def finite_level(g: AffineElement) -> int:
    """An integer M with ``M y`` integral and ``M O`` inside ``x O`` and ``O``."""
    xO = principal_ideal(g.x)
    return lcm(g.y.denominator(), xO.denom, xO.a)


@lru_cache(maxsize=4096)
def double_coset_decompose(g: AffineElement) -> DoubleCosetDecomposition:
    F = g.field
    O = unit_ideal(F)
    x0 = reduce_tp(g.x)
    xO = principal_ideal(x0)
    y0 = (x0 / g.x) * g.y
    # r Gamma pieces: y-parts  v*y + m  (v unit, m in O) modulo xO
    big = O + xO
    D = _common_denom([y0], [big, xO])
    ibig, ixO, iO = _scaled(big, D), _scaled(xO, D), _scaled(O, D)
    rational = F.is_rational
    # r Gamma pieces: y-parts  v*y + m  (v unit, m in O) modulo xO
    ys = _iorbit(F, [_as_pair(y0, D)], ibig)
    shifts = _iquotient(ibig, ixO, rational)
    lefts = {_ired(u + s, v + t, ixO) for u, v in ys for s, t in shifts}
    left_reps = tuple(AffineElement._trusted(y, x0) for y in _to_elems(F, lefts, D))
    # Gamma l pieces: y-parts  w*(y + x n)  modulo O
    u0, v0 = _as_pair(y0, D)
    starts = [(u0 + s, v0 + t) for s, t in _iquotient(ibig, iO, rational)]
    right_reps = tuple(AffineElement._trusted(y, x0) for y in _to_elems(F, _iorbit(F, starts, iO), D))
    return DoubleCosetDecomposition(g, left_reps, right_reps, finite_level(g))


def delta(g: AffineElement) -> Fraction:
    """Modular function computed from coset counts."""
    return double_coset_decompose(g).delta


def delta_formula(g: AffineElement) -> Fraction:
    """Closed form ``1/|N(x)|``, for comparison with :func:`delta`."""
    return 1 / abs(g.x.norm())


# -- Hecke algebra -------------------------------------------------------------------------

@dataclass
class HeckeFunction:
    """Finitely supported bi-invariant function: double-coset key -> coefficient.

    Coefficients may be any exact numbers with ``+``, ``*`` and ``conjugate()``
    (``Fraction``, ``int``, or sympy Gaussian rationals).
    """

    field: QuadField
    support: dict = field(default_factory=dict)
    reps: dict = field(default_factory=dict)

    @classmethod
    def char(cls, g: AffineElement, coeff=1) -> HeckeFunction:
        """The characteristic function ``[g]`` scaled by ``coeff``."""
        k = double_coset_key(g)
        return cls(g.field, {k: coeff}, {k: double_coset_rep(g)})

    def __call__(self, g: AffineElement):
        return self.support.get(double_coset_key(g), 0)

    def _add_term(self, k, rep, c):
        v = self.support.get(k, 0) + c
        if v == 0:
            self.support.pop(k, None)
            self.reps.pop(k, None)
        else:
            self.support[k] = v
            self.reps[k] = rep

    def __add__(self, other: HeckeFunction) -> HeckeFunction:
        out = HeckeFunction(self.field, dict(self.support), dict(self.reps))
        for k, c in other.support.items():
            out._add_term(k, other.reps[k], c)
        return out

    def scale(self, c) -> HeckeFunction:
        return HeckeFunction(self.field, {k: c * v for k, v in self.support.items() if c * v != 0}, dict(self.reps))

    def __mul__(self, other: HeckeFunction) -> HeckeFunction:
        return hecke_convolve(self, other)

    def __eq__(self, other) -> bool:
        return isinstance(other, HeckeFunction) and self.field == other.field and self.support == other.support

    def items(self):
        """(representative, coefficient) pairs in key order."""
        return [(self.reps[k], self.support[k]) for k in sorted(self.support)]

    def __str__(self) -> str:
        if not self.support:
            return "0"
        return " + ".join(f"{c}*[{r}]" for r, c in self.items())


def hecke_convolve(f1: HeckeFunction, f2: HeckeFunction) -> HeckeFunction:
    """``(f1*f2)(k) = sum over Gamma h of f1(k h^-1) f2(h)``."""
    if f1.field != f2.field:
        raise ValueError("field mismatch")
    out = HeckeFunction(f1.field)
    # candidate targets: g1 * r for r over the r-Gamma pieces of each double coset of f2
    targets: dict = {}
    for g1 in f1.reps.values():
        for g2 in f2.reps.values():
            for r in double_coset_decompose(g2).left_reps:
                k = g1 * r
                targets.setdefault(double_coset_key(k), double_coset_rep(k))
    for key in sorted(targets):
        k = targets[key]
        total = 0
        for k2, c2 in f2.support.items():
            for l in double_coset_decompose(f2.reps[k2]).right_reps:
                c1 = f1(k * l.inverse())
                if c1:
                    total = total + c1 * c2
        if total != 0:
            out._add_term(key, k, total)
    return out


def hecke_star(f: HeckeFunction) -> HeckeFunction:
    """Involution ``f*(g) = conj(f(g^-1))``."""
    out = HeckeFunction(f.field)
    for k, c in f.support.items():
        gi = f.reps[k].inverse()
        conj = c.conjugate() if hasattr(c, "conjugate") else c
        out._add_term(double_coset_key(gi), double_coset_rep(gi), conj)
    return out
