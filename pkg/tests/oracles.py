"""Brute-force reference computations, written without using the package internals."""
from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt


def pell_unit(d: int, ymax: int = 20000):
    """Least unit > 1 of the maximal order of Q(sqrt d) as (u, v) with unit = u + v sqrt d.

    Searches y = 1..ymax for x^2 - d y^2 = +-1 (or +-4 when d = 1 mod 4, halving).
    Returns None when nothing is found in range.
    """
    k = 4 if d % 4 == 1 else 1
    for y in range(1, ymax + 1):
        for target in (-k, k):
            x2 = d * y * y + target
            if x2 <= 0:
                continue
            x = isqrt(x2)
            if x * x == x2:
                if k == 4:
                    return Fraction(x, 2), Fraction(y, 2)
                return Fraction(x), Fraction(y)
    return None


def minpoly(d: int) -> tuple[int, int]:
    """(t, n) with w^2 = t w - n for the standard integral basis {1, w}."""
    if d % 4 == 1:
        return 1, (1 - d) // 4
    return 0, -d


def hnf_ideal_counts(d: int, cutoff: int) -> list[int]:
    """Number of integral ideals of each norm n <= cutoff, by listing HNF lattices.

    A lattice with basis a, b + c w (0 <= b < a, c | a, c | b) is an ideal iff
    w times each basis vector lies in it.
    """
    if d == 1:
        return [0] + [1] * cutoff
    t, n = minpoly(d)
    counts = [0] * (cutoff + 1)

    def member(u, v, a, b, c):
        return v % c == 0 and (u - b * (v // c)) % a == 0

    for a in range(1, cutoff + 1):
        for c in range(1, cutoff // a + 1):
            if a % c:
                continue
            for b in range(0, a, c):
                # w * a = a w ;  w (b + c w) = -n c + (b + t c) w
                if member(0, a, a, b, c) and member(-n * c, b + t * c, a, b, c):
                    counts[a * c] += 1
    return counts


# -- affine Hecke pair over Q: Gamma = {(m, 1) : m in Z} -----------------------------

def q_same_double_coset(g, h) -> bool:
    """(y, x) ~ (y', x') in Gamma\\G/Gamma iff x = x' and y - y' in Z + xZ."""
    (y, x), (y2, x2) = g, h
    if x != x2:
        return False
    q = Fraction(x).denominator  # Z + (p/q)Z = (1/q)Z
    return ((Fraction(y) - Fraction(y2)) * q).denominator == 1


def q_value(f, g):
    """Value at g of a function given as [(rep, coeff)] on distinct double cosets."""
    for rep, c in f:
        if q_same_double_coset(rep, g):
            return c
    return 0


def q_mul(a, b):
    return (a[0] + a[1] * b[0], a[1] * b[1])


def q_inv(a):
    return (-a[0] / a[1], 1 / a[1])


def q_right_cosets(g):
    """Representatives h of the cosets Gamma h inside Gamma g Gamma."""
    y, x = Fraction(g[0]), Fraction(g[1])
    q = x.denominator
    return [(y + Fraction(j, q) - ((y + Fraction(j, q)) // 1), x) for j in range(q)]


def q_convolve_at(f1, f2, g):
    """(f1 * f2)(g) = sum over Gamma h in supp f2 of f1(g h^-1) f2(h)."""
    total = 0
    for rep, c in f2:
        for h in q_right_cosets(rep):
            total += q_value(f1, q_mul(g, q_inv(h))) * c
    return total


def q_candidates(f1, f2):
    """Every g1 h that can carry mass in f1 * f2 (h over one-sided cosets of f2)."""
    out = []
    for g1, _ in f1:
        for g2, _ in f2:
            x = Fraction(g2[1])
            # cosets h Gamma inside Gamma g2 Gamma: y mod xZ over y2 + Z
            p = x.numerator
            for j in range(p):
                out.append(q_mul(g1, (Fraction(g2[0]) + j, x)))
    return out


# -- finite level orbits ---------------------------------------------------------------

def residue_orbits(d: int, m: int, unit_gens) -> list[frozenset]:
    """Orbits of O/mO under multiplication by the given units (as (a, b) pairs in basis 1, w)."""
    t, n = minpoly(d)

    def mul(u, z):
        bb = u[1] * z[1]
        return ((u[0] * z[0] - n * bb) % m, (u[0] * z[1] + u[1] * z[0] + t * bb) % m)

    seen, out = set(), []
    for a in range(m):
        for b in range(m):
            z = (a, b)
            if z in seen:
                continue
            orb = {z}
            frontier = [z]
            while frontier:
                w = frontier.pop()
                for u in unit_gens:
                    v = mul(u, w)
                    if v not in orb:
                        orb.add(v)
                        frontier.append(v)
            seen |= orb
            out.append(frozenset(orb))
    return out


def odd_share(beta: int, cutoff: int) -> Fraction:
    """sum_{n odd <= N} n^-beta / sum_{n <= N} n^-beta, exactly."""
    num = sum(Fraction(1, n**beta) for n in range(1, cutoff + 1, 2))
    den = sum(Fraction(1, n**beta) for n in range(1, cutoff + 1))
    return num / den


def is_squarefree(n: int) -> bool:
    n = abs(n)
    k = 2
    while k * k <= n:
        if n % (k * k) == 0:
            return False
        k += 1
    return True
