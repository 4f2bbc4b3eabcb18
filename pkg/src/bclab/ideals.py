"""Ideals of quadratic fields (and of Z) in Hermite normal form.

An integral ideal is the Z-span of ``a`` and ``b + c*w`` with ``c | a``,
``c | b`` and ``0 <= b < a``; a fractional ideal carries an extra positive
integer ``denom`` so that ``denom * I`` is integral and minimal. Equality is
structural because the normal form is unique.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache, reduce
from math import gcd, isqrt, lcm, pi, sqrt

from sympy import isprime, jacobi_symbol, primerange
from sympy.ntheory import sqrt_mod

from .quadfield import FieldElement, QuadField, unit_coset_reps, unit_info


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def _hnf(vectors: list[tuple[int, int]]) -> tuple[int, int, int]:
    """Lower-triangular basis ``(a, 0), (b, c)`` of the Z-span of 2-vectors."""
    px, py = 0, 0  # pivot vector, second coordinate = gcd so far
    a = 0
    for x, y in vectors:
        if y == 0:
            a = gcd(a, x)
            continue
        if py == 0:
            px, py = x, y
            continue
        g, s, t = _xgcd(py, y)
        # (s*p + t*v) has y = g; the combination below has y = 0
        nx = s * px + t * x
        zx = (y // g) * px - (py // g) * x
        a = gcd(a, zx)
        px, py = nx, g
    if py < 0:
        px, py = -px, -py
    if a == 0 or py == 0:
        raise ValueError("vectors do not span a full-rank lattice")
    return a, px % a, py


@dataclass(frozen=True)
class Ideal:
    a: int
    b: int
    c: int
    denom: int
    field: QuadField = field(compare=True)

    @cached_property
    def norm(self) -> Fraction:
        return Fraction(self.a * self.c, self.denom ** self.field.degree)

    @property
    def hnf(self) -> tuple[tuple[int, int], tuple[int, int]]:
        return (self.a, 0), (self.b, self.c)

    @property
    def is_integral(self) -> bool:
        return self.denom == 1

    def basis(self) -> list[FieldElement]:
        F = self.field
        if F.is_rational:
            return [F(Fraction(self.a, self.denom))]
        return [F(Fraction(self.a, self.denom)), F(Fraction(self.b, self.denom), Fraction(self.c, self.denom))]

    def numerator(self) -> Ideal:
        """The integral ideal ``denom * I``."""
        return Ideal(self.a, self.b, self.c, 1, self.field)

    def contains(self, x: FieldElement) -> bool:
        if x.field != self.field:
            raise ValueError("field mismatch")
        A, B = x.a * self.denom, x.b * self.denom
        if A.denominator != 1 or B.denominator != 1:
            return False
        A, B = int(A), int(B)
        if B % self.c:
            return False
        return (A - (B // self.c) * self.b) % self.a == 0

    def __contains__(self, x: FieldElement) -> bool:
        return self.contains(x)

    def __mul__(self, other: Ideal) -> Ideal:
        if not isinstance(other, Ideal):
            return NotImplemented
        if other.field != self.field:
            raise ValueError(f"field mismatch: {self.field} vs {other.field}")
        gens = [x * y for x in self.basis() for y in other.basis()]
        return ideal_from_generators(self.field, gens)

    def __add__(self, other: Ideal) -> Ideal:
        if not isinstance(other, Ideal):
            return NotImplemented
        return ideal_from_generators(self.field, self.basis() + other.basis())

    def conj(self) -> Ideal:
        return ideal_from_generators(self.field, [x.conj() for x in self.basis()])

    def inverse(self) -> Ideal:
        F = self.field
        if F.is_rational:
            return Ideal(self.denom, 0, 1, self.a, F)
        n = self.norm
        return ideal_from_generators(F, [x.conj() / n for x in self.basis()])

    def __truediv__(self, other: Ideal) -> Ideal:
        return self * other.inverse()

    def __pow__(self, k: int) -> Ideal:
        if k < 0:
            return self.inverse() ** (-k)
        result, base = unit_ideal(self.field), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def divides(self, other: Ideal) -> bool:
        """True if ``other`` is contained in ``self``."""
        return all(self.contains(x) for x in other.basis())

    def sort_key(self) -> tuple:
        return (self.norm, self.denom, self.a, self.b, self.c)

    def __str__(self) -> str:
        F = self.field
        if F.is_rational:
            q = Fraction(self.a, self.denom)
            return f"({q})"
        gens = f"{self.a}, {self.b}+{self.c}*w" if self.c != 1 or self.b else f"{self.a}, {self.c}*w"
        body = f"({gens})"
        return body if self.denom == 1 else f"{body}/{self.denom}"

    def __repr__(self) -> str:
        return f"Ideal[{self.a},{self.b},{self.c}]/{self.denom} in {self.field}"


def _normalize(a: int, b: int, c: int, D: int, F: QuadField) -> Ideal:
    if F.is_rational:
        g = gcd(a, D)
        return Ideal(a // g, 0, 1, D // g, F)
    g = gcd(gcd(gcd(a, b), c), D)
    return Ideal(a // g, b // g, c // g, D // g, F)


def ideal_from_generators(F: QuadField, gens: list[FieldElement]) -> Ideal:
    gens = [g for g in gens if not g.is_zero()]
    if not gens:
        raise ValueError("at least one nonzero generator required")
    D = lcm(*(g.denominator() for g in gens))
    if F.is_rational:
        a = reduce(gcd, (int(g.a * D) for g in gens))
        return _normalize(abs(a), 0, 1, D, F)
    vecs = []
    w = F.omega
    for g in gens:
        for h in (g, g * w):
            vecs.append((int(h.a * D), int(h.b * D)))
    a, b, c = _hnf(vecs)
    return _normalize(a, b, c, D, F)


def principal_ideal(x: FieldElement) -> Ideal:
    return ideal_from_generators(x.field, [x])


@lru_cache(maxsize=None)
def unit_ideal(F: QuadField) -> Ideal:
    return Ideal(1, 0, 1, 1, F)


def scalar_ideal(F: QuadField, n: int) -> Ideal:
    """The principal ideal generated by a positive integer."""
    return Ideal(n, 0, 1 if F.is_rational else n, 1, F)


def ideal_mul(I: Ideal, J: Ideal) -> Ideal:
    return I * J


def ideal_norm(I: Ideal) -> Fraction:
    return I.norm


# -- primes -------------------------------------------------------------

@dataclass(frozen=True)
class SplittingType:
    p: int
    kind: str  # "split" | "inert" | "ramified"
    primes_above: tuple[tuple[Ideal, int], ...]  # (prime ideal, residue degree)

    @property
    def ramification(self) -> int:
        return 2 if self.kind == "ramified" else 1

    def norms(self) -> list[int]:
        return [int(P.norm) for P, _ in self.primes_above]


def splitting_kind(F: QuadField, p: int) -> str:
    """Split/inert/ramified from the Kronecker symbol ``(D|p)``."""
    if F.is_rational:
        return "split"
    D = F.disc
    if D % p == 0:
        return "ramified"
    if p == 2:
        return "split" if D % 8 in (1, 7) else "inert"
    return "split" if jacobi_symbol(D % p, p) == 1 else "inert"


def _roots_of_minpoly(F: QuadField, p: int) -> list[int]:
    t, n = F.tr_omega, F.n_omega
    if p == 2:
        return [r for r in (0, 1) if (r * r - t * r + n) % 2 == 0]
    s = sqrt_mod(F.disc % p, p, all_roots=True)
    inv2 = pow(2, -1, p)
    return sorted({(t + r) * inv2 % p for r in s})


@lru_cache(maxsize=None)
def split_prime(F: QuadField, p: int) -> SplittingType:
    if not isprime(p):
        raise ValueError(f"{p} is not prime")
    if F.is_rational:
        return SplittingType(p, "split", ((Ideal(p, 0, 1, 1, F), 1),))
    kind = splitting_kind(F, p)
    if kind == "inert":
        return SplittingType(p, kind, ((Ideal(p, 0, p, 1, F), 2),))
    roots = _roots_of_minpoly(F, p)
    primes = tuple((Ideal(p, (-r) % p, 1, 1, F), 1) for r in roots)
    if kind == "ramified":
        assert len(primes) == 1
    else:
        assert len(primes) == 2
    return SplittingType(p, kind, primes)


@lru_cache(maxsize=None)
def prime_ideals_up_to(F: QuadField, bound: int) -> tuple[tuple[Ideal, int], ...]:
    """All prime ideals of norm <= bound, as (ideal, norm), sorted by norm then HNF."""
    out = []
    for p in primerange(2, bound + 1):
        for P, f in split_prime(F, p).primes_above:
            q = p**f
            if q <= bound:
                out.append((P, q))
    out.sort(key=lambda t: (t[1], t[0].a, t[0].b, t[0].c))
    return tuple(out)


def smooth_factorizations(primes: list[tuple[object, int]], cutoff: int):
    """Yield ``(exponents, norm)`` for every product of the given primes with norm <= cutoff.

    ``exponents`` is a tuple of ``(index, e)`` pairs.
    """
    stack = [(0, 1, ())]
    while stack:
        start, n, exps = stack.pop()
        yield exps, n
        for i in range(start, len(primes)):
            q = primes[i][1]
            if n * q > cutoff:
                # primes are sorted by norm
                break
            m, e = n * q, 1
            while m <= cutoff:
                stack.append((i + 1, m, exps + ((i, e),)))
                m *= q
                e += 1


def enumerate_ideals(F: QuadField, cutoff: int) -> list[tuple[Ideal, int]]:
    """All integral ideals of norm <= cutoff, sorted by (norm, HNF)."""
    if cutoff < 1:
        raise ValueError("cutoff must be >= 1")
    primes = list(prime_ideals_up_to(F, cutoff))
    out = []
    for exps, n in smooth_factorizations(primes, cutoff):
        I = unit_ideal(F)
        for i, e in exps:
            I = I * primes[i][0] ** e
        out.append((I, n))
    out.sort(key=lambda t: t[0].sort_key())
    return out


def factor(I: Ideal) -> dict[Ideal, int]:
    """Prime factorization of a nonzero fractional ideal (negative exponents allowed)."""
    from sympy import factorint

    F = I.field
    out: dict[Ideal, int] = {}
    num, den = I.numerator(), I.denom
    for J, sign in ((num, 1), (scalar_ideal(F, den), -1)):
        N = int(J.norm)
        for p in factorint(N):
            for P, _ in split_prime(F, p).primes_above:
                while P.divides(J):
                    out[P] = out.get(P, 0) + sign
                    J = J * P.inverse()
    return {P: e for P, e in out.items() if e}


# -- principality ---------------------------------------------------------

def _shortest_vector(J: Ideal) -> tuple[int, int]:
    """Lagrange-Gauss reduction of the HNF basis under the (definite) norm form."""
    t, n = J.field.tr_omega, J.field.n_omega

    def q(v):
        return v[0] * v[0] + t * v[0] * v[1] + n * v[1] * v[1]

    def dot2(u, v):  # twice the bilinear form
        return 2 * u[0] * v[0] + t * (u[0] * v[1] + u[1] * v[0]) + 2 * n * u[1] * v[1]

    v1, v2 = (J.a, 0), (J.b, J.c)
    while True:
        if q(v1) < q(v2):
            v1, v2 = v2, v1
        qq = q(v2)
        mu = (dot2(v1, v2) + qq) // (2 * qq)  # nearest integer to <v1,v2>/q(v2)
        if mu == 0:
            return v2
        v1 = (v1[0] - mu * v2[0], v1[1] - mu * v2[1])


def _generator_search(J: Ideal, negative_norm_ok: bool = True) -> FieldElement | None:
    """Some generator of the integral ideal J, or None if J is not principal."""
    F = J.field
    N = J.a * J.c
    if F.is_rational:
        return F(J.a)
    d = F.d
    if d < 0:
        A, B = _shortest_vector(J)
        x = F(A, B)
        return x if x.norm() == N else None
    else:
        u, _ = unit_info(F).fundamental_unit.surd()
        E = int(2 * u) + 2  # eps < 2u + 1
        bound = 4 * E * N // d + 1 if d % 4 == 1 else E * N // d + 1
        targets = (N, -N) if negative_norm_ok else (N,)
    Bmax = isqrt(bound)
    for B in range(Bmax + 1):
        if B % J.c:
            continue
        for t in targets:
            if d % 4 == 1:
                rhs = 4 * t + d * B * B
            else:
                rhs = t + d * B * B
            if rhs < 0:
                continue
            S = isqrt(rhs)
            if S * S != rhs:
                continue
            for S_ in (S, -S) if S else (S,):
                if d % 4 == 1:
                    if (S_ - B) % 2:
                        continue
                    A = (S_ - B) // 2
                else:
                    A = S_
                if (A - (B // J.c) * J.b) % J.a == 0:
                    return F(A, B)
    return None


def principal_generator(I: Ideal) -> FieldElement | None:
    x = _generator_search(I.numerator())
    return None if x is None else x / I.denom


def tp_principal_generator(I: Ideal) -> FieldElement | None:
    """A totally positive generator of I if one exists."""
    x = principal_generator(I)
    if x is None:
        return None
    for u in unit_coset_reps(I.field):
        y = x * u
        if y.is_totally_positive():
            return y
    return None


# -- class groups -----------------------------------------------------------

def minkowski_bound(F: QuadField) -> float:
    if F.is_rational:
        return 1.0
    D = abs(F.disc)
    return (2 / pi) * sqrt(D) if F.is_imaginary else sqrt(D) / 2


def invariant_factors(table: list[list[int]], identity: int = 0) -> tuple[int, ...]:
    """Invariant factors ``n1 | n2 | ...`` of a finite abelian group given by its table."""
    from sympy import factorint

    h = len(table)
    if h == 1:
        return ()

    orders = []
    for x in range(h):
        k, y = 1, x
        while y != identity:
            y = table[y][x]
            k += 1
            if k > h:
                raise ValueError("table is not a group")
        orders.append(k)
    # p-primary parts from counts of elements killed by p^j
    cyclic: list[list[int]] = []
    for p, e in factorint(h).items():
        counts = [sum(1 for o in orders if (p**j) % o == 0) for j in range(e + 1)]
        # number of cyclic factors of order >= p^j is log_p(counts[j]/counts[j-1])
        ge = []
        for j in range(1, e + 1):
            r, m = 0, counts[j] // counts[j - 1]
            while m > 1:
                m //= p
                r += 1
            ge.append(r)
        ge.append(0)
        parts = []
        for j in range(1, e + 1):
            parts += [p**j] * (ge[j - 1] - ge[j])
        cyclic.append(sorted(parts, reverse=True))
    rank = max(len(c) for c in cyclic)
    inv = []
    for i in range(rank):
        n = 1
        for c in cyclic:
            if i < len(c):
                n *= c[i]
        inv.append(n)
    return tuple(sorted(inv))


@dataclass
class ClassGroup:
    """Finite abelian group of ideal classes (narrow or wide).

    ``elements[i]`` is the canonical representative of class ``i`` (least
    norm, then lexicographic HNF); class 0 is the identity.
    """

    field: QuadField
    narrow: bool
    elements: list[Ideal]
    table: list[list[int]]
    generators: list[Ideal]

    def __post_init__(self):
        self._prime_cache: dict[Ideal, int] = {}

    @property
    def order(self) -> int:
        return len(self.elements)

    @cached_property
    def invariants(self) -> tuple[int, ...]:
        return invariant_factors(self.table)

    def mul(self, i: int, j: int) -> int:
        return self.table[i][j]

    def inv(self, i: int) -> int:
        return self.table[i].index(0)

    def pow(self, i: int, k: int) -> int:
        k %= self.order
        r = 0
        for _ in range(k):
            r = self.table[r][i]
        return r

    def equivalent(self, I: Ideal, J: Ideal) -> bool:
        return _equivalent(I, J, self.narrow)

    def class_of(self, I: Ideal) -> int:
        for k, R in enumerate(self.elements):
            if _equivalent(I, R, self.narrow):
                return k
        raise AssertionError(f"{I} lies in no class; group construction is wrong")

    def class_of_prime(self, P: Ideal) -> int:
        c = self._prime_cache.get(P)
        if c is None:
            c = self._prime_cache[P] = self.class_of(P)
        return c

    def class_of_factored(self, factors) -> int:
        """Class of a product given as ``[(prime, exponent), ...]``."""
        c = 0
        for P, e in factors:
            c = self.table[c][self.pow(self.class_of_prime(P), e)]
        return c


def _equivalent(I: Ideal, J: Ideal, narrow: bool) -> bool:
    if I.field.is_rational:
        return True
    K = I * J.conj()  # ~ I J^{-1} up to the positive rational N(J)
    x = tp_principal_generator(K) if narrow else principal_generator(K)
    return x is not None


def _build_class_group(F: QuadField, narrow: bool) -> ClassGroup:
    O = unit_ideal(F)
    if F.is_rational:
        return ClassGroup(F, narrow, [O], [[0]], [])
    M = int(minkowski_bound(F))
    gens = [P for P, _ in prime_ideals_up_to(F, max(M, 1))]
    for p in primerange(2, abs(F.disc) + 1):
        if F.disc % p == 0:
            P = split_prime(F, p).primes_above[0][0]
            if P not in gens:
                gens.append(P)
    # closure: breadth-first over products with generators
    found = [O]
    i = 0
    while i < len(found):
        for P in gens:
            Q = found[i] * P
            if not any(_equivalent(Q, R, narrow) for R in found):
                found.append(Q)
        i += 1
    h = len(found)
    # canonical reps: least norm, then lexicographic HNF
    canon: list[Ideal | None] = [None] * h
    bound = max(M, 2)
    seen = set()
    while any(c is None for c in canon):
        for I, _ in enumerate_ideals(F, bound):
            if I in seen:
                continue
            seen.add(I)
            for k, R in enumerate(found):
                if canon[k] is None and _equivalent(I, R, narrow):
                    canon[k] = I
                    break
            if all(c is not None for c in canon):
                break
        bound *= 2
    # canonical order: identity first, then by rep sort key
    canon_sorted = [canon[0]] + sorted(canon[1:], key=lambda I: I.sort_key())
    grp = ClassGroup(F, narrow, canon_sorted, [], gens)
    grp.table = [[grp.class_of(A * B) for B in canon_sorted] for A in canon_sorted]
    return grp


@lru_cache(maxsize=None)
def narrow_class_group(F: QuadField) -> ClassGroup:
    return _build_class_group(F, narrow=True)


@lru_cache(maxsize=None)
def wide_class_group(F: QuadField) -> ClassGroup:
    return _build_class_group(F, narrow=False)


NarrowClassGroup = ClassGroup
