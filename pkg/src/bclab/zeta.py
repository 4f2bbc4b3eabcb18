"""Truncated Dedekind and partial zeta sums, Euler factors and the induced-weight ratio.

Sums are formed from exact ideal counts per norm. For integer exponents the
sum itself is exact (a ``Fraction``) and is rounded once; otherwise it is
accumulated with mpmath at a working precision well above the requested one.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import gmpy2
import mpmath
from mpmath import mpf
from sympy import primerange

from .ideals import ClassGroup, Ideal, narrow_class_group, prime_ideals_up_to, smooth_factorizations, split_prime, SplittingType
from .quadfield import QQ, QuadField

DEFAULT_DPS = 30
EXACT_LIMIT = 20000  # largest cutoff summed as an exact rational


@dataclass(frozen=True)
class TruncatedZeta:
    value: mpf
    cutoff: int
    tail_bound: mpf
    beta: object
    dps: int = DEFAULT_DPS
    exact: Fraction | None = None

    def __str__(self) -> str:
        return mpmath.nstr(self.value, self.dps)

    @property
    def upper(self) -> mpf:
        return self.value + self.tail_bound


# -- ideal counting ---------------------------------------------------------------

@lru_cache(maxsize=32)
def norm_counts(F: QuadField, cutoff: int) -> tuple[int, ...]:
    """``counts[n]`` = number of integral ideals of norm n, for ``n <= cutoff``."""
    if cutoff < 1:
        raise ValueError("cutoff must be >= 1")
    counts = [0] * (cutoff + 1)
    primes = list(prime_ideals_up_to(F, cutoff))
    for _, n in smooth_factorizations(primes, cutoff):
        counts[n] += 1
    return tuple(counts)


@lru_cache(maxsize=32)
def class_norm_counts(F: QuadField, cutoff: int) -> tuple[tuple[int, ...], ...]:
    """Per narrow class ``k``: ``counts[k][n]`` = ideals of norm n in class k."""
    if cutoff < 1:
        raise ValueError("cutoff must be >= 1")
    G = narrow_class_group(F)
    h = G.order
    counts = [[0] * (cutoff + 1) for _ in range(h)]
    primes = list(prime_ideals_up_to(F, cutoff))
    if h == 1:
        for _, n in smooth_factorizations(primes, cutoff):
            counts[0][n] += 1
        return tuple(tuple(c) for c in counts)
    pcls = [G.class_of_prime(P) for P, _ in primes]
    powers = [[G.pow(c, e) for e in range(h)] for c in pcls]
    for exps, n in smooth_factorizations(primes, cutoff):
        k = 0
        for i, e in exps:
            k = G.table[k][powers[i][e % h]]
        counts[k][n] += 1
    return tuple(tuple(c) for c in counts)


def _is_integer(beta) -> bool:
    return isinstance(beta, int) or (isinstance(beta, Fraction) and beta.denominator == 1)


def dirichlet_sum(counts, beta, dps: int = DEFAULT_DPS, exact: bool | None = None) -> tuple[mpf, Fraction | None]:
    """``sum counts[n] n^-beta`` over ``n >= 1``; exact rational when beta is an integer."""
    cutoff = len(counts) - 1
    if exact is None:
        exact = _is_integer(beta) and cutoff <= EXACT_LIMIT
    if exact:
        if not _is_integer(beta) or beta < 0:
            raise ValueError("exact summation needs a nonnegative integer exponent")
        b = int(beta)
        acc = gmpy2.mpq(0)
        for n in range(1, cutoff + 1):
            if counts[n]:
                acc += gmpy2.mpq(counts[n], gmpy2.mpz(n) ** b)
        q = Fraction(int(acc.numerator), int(acc.denominator))
        with mpmath.workdps(dps + 10):
            v = mpf(q.numerator) / q.denominator
        return v, q
    with mpmath.workdps(dps + 20):
        s = mpmath.mpmathify(beta)
        v = mpmath.fsum(c * mpf(n) ** (-s) for n, c in enumerate(counts) if n and c)
    return v, None


def tail_bound(F: QuadField, beta, cutoff: int) -> mpf:
    """Upper bound for ``sum_{N(a) > cutoff} N(a)^-beta``; infinite when beta <= 1.

    Uses ``#{a : N(a) = n} <= d(n)`` (just 1 over Q) and integral comparison.
    """
    if beta <= 1:
        return mpmath.inf
    with mpmath.workdps(20):
        s = mpmath.mpmathify(beta)
        if F.is_rational:
            return cutoff ** (1 - s) / (s - 1)
        # sum_{ab > N} (ab)^-s <= sum_{a<=N} a^-s floor(N/a)^(1-s)/(s-1) + zeta(s) N^(1-s)/(s-1)
        head = mpmath.fsum(mpf(a) ** (-s) * mpf(cutoff // a) ** (1 - s) for a in range(1, cutoff + 1))
        return (head + mpmath.zeta(s) * mpf(cutoff) ** (1 - s)) / (s - 1)


def dedekind_zeta(F: QuadField, beta, cutoff: int = 10**4, dps: int = DEFAULT_DPS) -> TruncatedZeta:
    if cutoff < 1:
        raise ValueError("cutoff must be >= 1")
    v, q = dirichlet_sum(norm_counts(F, cutoff), beta, dps)
    return TruncatedZeta(v, cutoff, tail_bound(F, beta, cutoff), beta, dps, q)


def _class_index(G: ClassGroup, c) -> int:
    if isinstance(c, Ideal):
        return G.class_of(c)
    if isinstance(c, int) and 0 <= c < G.order:
        return c
    raise ValueError(f"{c!r} is not a narrow class of {G.field} (order {G.order})")


def partial_zeta(F: QuadField, c, beta, cutoff: int = 10**4, dps: int = DEFAULT_DPS) -> TruncatedZeta:
    """Sum over integral ideals in the narrow class ``c`` (an index or an ideal)."""
    k = _class_index(narrow_class_group(F), c)
    v, q = dirichlet_sum(class_norm_counts(F, cutoff)[k], beta, dps)
    return TruncatedZeta(v, cutoff, tail_bound(F, beta, cutoff), beta, dps, q)


def partial_zetas(F: QuadField, beta, cutoff: int = 10**4, dps: int = DEFAULT_DPS) -> list[TruncatedZeta]:
    return [partial_zeta(F, k, beta, cutoff, dps) for k in range(narrow_class_group(F).order)]


# -- Euler products --------------------------------------------------------------------

def local_factor(F: QuadField, p: int, beta) -> mpf:
    """``prod_{P | p} (1 - N(P)^-beta)^-1``."""
    s = mpmath.mpmathify(beta)
    out = mpf(1)
    for P, f in split_prime(F, p).primes_above:
        out /= 1 - mpf(p) ** (-f * s)
    return out


def euler_product(F: QuadField, beta, prime_bound: int, dps: int = DEFAULT_DPS) -> mpf:
    with mpmath.workdps(dps + 20):
        out = mpf(1)
        for p in primerange(2, prime_bound + 1):
            out *= local_factor(F, p, beta)
    return out


def smooth_sum(F: QuadField, beta, prime_bound: int, cutoff: int, dps: int = DEFAULT_DPS) -> mpf:
    """Sum of ``N(a)^-beta`` over ideals with ``N(a) <= cutoff`` whose prime factors lie over primes <= prime_bound.

    This is the Dirichlet-series side of :func:`euler_product` with the same prime set.
    """
    primes = sorted(((P, p**f) for p in primerange(2, prime_bound + 1) for P, f in split_prime(F, p).primes_above), key=lambda t: t[1])
    with mpmath.workdps(dps + 20):
        s = mpmath.mpmathify(beta)
        v = mpmath.fsum(mpf(n) ** (-s) for _, n in sorted(smooth_factorizations(primes, cutoff), key=lambda t: t[1]))
    return v


# -- induced weight --------------------------------------------------------------------

@dataclass(frozen=True)
class InducedRatio:
    value: mpf
    tail_bound: mpf
    numerator: TruncatedZeta
    denominator: TruncatedZeta


def induced_ratio(L: QuadField, beta, cutoff: int = 10**4, K: QuadField = QQ, dps: int = DEFAULT_DPS) -> InducedRatio:
    """``zeta_L(beta) / zeta_K(2 beta)`` from truncated sums, with a propagated error bound."""
    if not K.is_rational:
        raise ValueError("only the base field Q is supported")
    if L.degree != 2:
        raise ValueError("L must be a quadratic field")
    if beta <= 1:
        raise ValueError("beta must exceed 1; use divergence_product for beta in (0, 1]")
    num = dedekind_zeta(L, beta, cutoff, dps)
    den = dedekind_zeta(K, 2 * beta, cutoff, dps)
    with mpmath.workdps(dps + 10):
        r = num.value / den.value
        # truth lies in [num/(den + tb), (num + ta)/den]
        lo = num.value / den.upper
        hi = num.upper / den.value
        err = max(r - lo, hi - r)
    return InducedRatio(r, err, num, den)


@dataclass(frozen=True)
class DirectMass:
    value: mpf
    upper: mpf
    prime_bound: int
    norm_bound: int


def induced_mass_direct(L: QuadField, beta, prime_bound: int = 10**4, norm_bound: int = 10**4, dps: int = DEFAULT_DPS) -> DirectMass:
    """Total mass of the induced measure as a doubly truncated product of local masses.

    At each rational prime p the local mass is ``(1 - p^-2beta)`` times the sum of
    ``N(g)^-beta`` over ideals g supported above p; only primes up to
    ``prime_bound`` and local ideals of norm up to ``norm_bound`` are kept.
    The returned ``upper`` is a rigorous upper bound for the full product.
    """
    if beta <= 1:
        raise ValueError("beta must exceed 1")
    with mpmath.workdps(dps + 20):
        s = mpmath.mpmathify(beta)
        lower = mpf(1)
        closed = mpf(1)
        for p in primerange(2, prime_bound + 1):
            norms = [p**f for _, f in split_prime(L, p).primes_above]
            local = mpmath.fsum(mpf(n) ** (-s) for n in _local_norms(norms, norm_bound))
            lower *= (1 - mpf(p) ** (-2 * s)) * local
            full = mpf(1)
            for q in norms:
                full /= 1 - mpf(q) ** (-s)
            closed *= (1 - mpf(p) ** (-2 * s)) * full
        # every omitted local factor lies in [1, 1 + 3 p^-beta]
        upper = closed * mpmath.exp(3 * mpf(prime_bound) ** (1 - s) / (s - 1))
    return DirectMass(lower, upper, prime_bound, norm_bound)


def _local_norms(norms: list[int], bound: int) -> list[int]:
    out = [1]
    for q in norms:
        out = [m * q**e for m in out for e in range(bound.bit_length() + 1) if m * q**e <= bound]
    return sorted(out)


# -- divergence regime -----------------------------------------------------------------------

@dataclass(frozen=True)
class EulerFactorReport:
    p: int
    splitting: SplittingType
    factor: mpf
    running_product: mpf
    factor_exact: Fraction | None = None


def euler_factor(L: QuadField, p: int, beta, degree: int = 2):
    """``(1 - p^-(degree*beta)) / prod_{P|p} (1 - N(P)^-beta)``; exact when beta == 1."""
    st = split_prime(L, p)
    if beta == 1:
        num = 1 - Fraction(1, p**degree)
        den = Fraction(1)
        for _, f in st.primes_above:
            den *= 1 - Fraction(1, p**f)
        q = num / den
        return st, mpf(q.numerator) / q.denominator, q
    s = mpmath.mpmathify(beta)
    num = 1 - mpf(p) ** (-degree * s)
    den = mpf(1)
    for _, f in st.primes_above:
        den *= 1 - mpf(p) ** (-f * s)
    return st, num / den, None


def divergence_product(L: QuadField, beta, prime_bound: int, K: QuadField = QQ, dps: int = DEFAULT_DPS) -> list[EulerFactorReport]:
    """Per-prime factors and running product of the finite-set lower bound for the induced mass."""
    if not K.is_rational:
        raise ValueError("only the base field Q is supported")
    if not 0 < beta <= 1:
        raise ValueError("beta must lie in (0, 1]")
    out = []
    with mpmath.workdps(dps + 10):
        run = mpf(1)
        for p in primerange(2, prime_bound + 1):
            st, fac, q = euler_factor(L, p, beta, L.degree)
            run *= fac
            out.append(EulerFactorReport(p, st, +fac, +run, q))
    return out


# -- monotonicity ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MonotoneReport:
    ok: bool
    values: tuple
    max_increase: mpf
    aux_ok: bool


def _product_factor(xs, ss, beta):
    num = 1 - mpmath.fprod(mpf(x) ** (-mpf(s) * beta) for x, s in zip(xs, ss))
    den = mpmath.fprod(1 - mpf(x) ** (-beta) for x in xs)
    return num / den


def monotone_factor_check(xs, ss, betas, dps: int = DEFAULT_DPS, tol=mpf("1e-12"), a_grid=(0, 0.25, 0.5, 0.75, 1)) -> MonotoneReport:
    """Check that the factor is non-increasing along an ascending grid of betas in (0, 1]."""
    if len(xs) != len(ss) or not xs:
        raise ValueError("xs and ss must be nonempty and of equal length")
    if any(x <= 1 for x in xs) or any(s < 1 for s in ss):
        raise ValueError("need every x > 1 and every s >= 1")
    betas = list(betas)
    if not betas or any(not 0 < b <= 1 for b in betas) or betas != sorted(betas):
        raise ValueError("betas must be an ascending grid inside (0, 1]")
    with mpmath.workdps(dps):
        bs = [mpmath.mpmathify(b) for b in betas]
        vals = [_product_factor(xs, ss, b) for b in bs]
        inc = max([vals[i + 1] - vals[i] for i in range(len(vals) - 1)], default=mpf(0))
        aux_inc = mpf(0)
        for x, s in zip(xs, ss):
            for a in a_grid:
                av = [(1 - mpf(a) * mpf(x) ** (-mpf(s) * b)) / (1 - mpf(x) ** (-b)) for b in bs]
                aux_inc = max([aux_inc] + [av[i + 1] - av[i] for i in range(len(av) - 1)])
        ok = inc <= tol
        aux_ok = aux_inc <= tol
    return MonotoneReport(ok and aux_ok, tuple(vals), max(inc, mpf(0)), aux_ok)
