"""Binary quadratic forms ``a x^2 + b xy + c y^2`` of fundamental discriminant.

Proper equivalence classes of primitive forms (positive definite ones when
``D < 0``) form a group isomorphic to the narrow class group of Q(sqrt D).
This module shares no code with the ideal machinery and serves as the
cross-check for it.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gcd, isqrt

from sympy import factorint

Form = tuple[int, int, int]


def is_fundamental(D: int) -> bool:
    if D in (0, 1):
        return False
    if D % 4 == 1:
        return all(e == 1 for e in factorint(abs(D)).values())
    if D % 4 == 0:
        m = D // 4
        return m % 4 in (2, 3) and all(e == 1 for e in factorint(abs(m)).values())
    return False


def fundamental_discriminants(bound: int) -> list[int]:
    """Fundamental discriminants with ``|D| <= bound``, ordered by absolute value then sign."""
    out = [D for n in range(2, bound + 1) for D in (-n, n) if is_fundamental(D)]
    return out


def disc(f: Form) -> int:
    a, b, c = f
    return b * b - 4 * a * c


def principal_form(D: int) -> Form:
    return (1, D % 2, (D % 2 - D) // 4)


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


def _normalize_definite(f: Form) -> Form:
    a, b, c = f
    r = (a - b) // (2 * a)  # b -> b + 2ar in (-a, a]
    b2 = b + 2 * a * r
    c2 = a * r * r + b * r + c
    return a, b2, c2


def reduce_definite(f: Form) -> Form:
    a, b, c = _normalize_definite(f)
    while a > c or (a == c and b < 0):
        a, b, c = _normalize_definite((c, -b, a))
    return a, b, c


def _is_reduced_indefinite(f: Form, D: int, s: int) -> bool:
    a, b, _ = f
    aa = abs(a)
    return 0 < b <= s and b + 2 * aa >= s + 1 and 2 * aa - b <= s


def _rho(f: Form, D: int, s: int) -> Form:
    _, b, c = f
    ac = abs(c)
    m = 2 * ac
    if c * c > D:
        lo = -ac + 1  # r in (-|c|, |c|]
    else:
        lo = s - 2 * ac + 1  # r in (sqrt D - 2|c|, sqrt D)
    r = lo + (-b - lo) % m
    return c, r, (r * r - D) // (4 * c)


def reduce_indefinite(f: Form) -> Form:
    D = disc(f)
    s = isqrt(D)
    while not _is_reduced_indefinite(f, D, s):
        f = _rho(f, D, s)
    return f


def cycle(f: Form) -> list[Form]:
    """The rho-cycle of a reduced indefinite form."""
    D = disc(f)
    s = isqrt(D)
    out = [f]
    g = _rho(f, D, s)
    while g != f:
        out.append(g)
        g = _rho(g, D, s)
    return out


def canonical(f: Form) -> Form:
    """Canonical representative of the proper equivalence class of f."""
    D = disc(f)
    if D < 0:
        return reduce_definite(f)
    return min(cycle(reduce_indefinite(f)))


def _positive_lead(f: Form) -> Form:
    """A properly equivalent form with positive first coefficient."""
    D = disc(f)
    if f[0] > 0 or D < 0:
        return f
    f = reduce_indefinite(f)
    s = isqrt(D)
    # leading coefficients alternate in sign along a reduced cycle
    return f if f[0] > 0 else _rho(f, D, s)


def compose(f: Form, g: Form) -> Form:
    """Gauss composition of primitive forms of equal discriminant (unreduced)."""
    a1, b1, c1 = _positive_lead(f)
    a2, b2, c2 = _positive_lead(g)
    if a1 > a2:
        a1, b1, c1, a2, b2, c2 = a2, b2, c2, a1, b1, c1
    s = (b1 + b2) // 2
    n = b2 - s
    if a1 % a2 == 0:
        y1, d = 0, a2
    else:
        d, u, _ = _xgcd(a2, a1)
        y1 = u
    if s % d == 0:
        y2, x2, d1 = -1, 0, d
    else:
        d1, x2, v = _xgcd(s, d)
        y2 = -v
    v1, v2 = a1 // d1, a2 // d1
    r = (y1 * y2 * n - x2 * c2) % v1
    b3 = b2 + 2 * v2 * r
    a3 = v1 * v2
    c3 = (c2 * d1 + r * (b2 + v2 * r)) // v1
    assert b3 * b3 - 4 * a3 * c3 == disc(f)
    return a3, b3, c3


@lru_cache(maxsize=None)
def reduced_classes(D: int) -> list[Form]:
    """Canonical representatives of all proper classes of primitive forms of disc D."""
    if not is_fundamental(D):
        raise ValueError(f"{D} is not a fundamental discriminant")
    seen: set[Form] = set()
    if D < 0:
        amax = isqrt(-D // 3)
        for a in range(1, amax + 1):
            for b in range(-a + 1, a + 1):
                if (b * b - D) % (4 * a):
                    continue
                c = (b * b - D) // (4 * a)
                if c < a or (c == a and b < 0) or gcd(gcd(a, b), c) != 1:
                    continue
                seen.add((a, b, c))
    else:
        s = isqrt(D)
        for aa in range(1, s + 1):
            for a in (aa, -aa):
                for b in range(1, s + 1):
                    if (b * b - D) % (4 * a) or not _is_reduced_indefinite((a, b, 0), D, s):
                        continue
                    c = (b * b - D) // (4 * a)
                    if gcd(gcd(a, b), c) == 1:
                        seen.add(min(cycle((a, b, c))))
    principal = canonical(principal_form(D))
    return [principal] + sorted(seen - {principal})


@dataclass
class FormClassGroup:
    D: int
    reps: list[Form]
    table: list[list[int]]

    @property
    def order(self) -> int:
        return len(self.reps)

    def index(self, f: Form) -> int:
        return self.reps.index(canonical(f))


@lru_cache(maxsize=None)
def form_class_group(D: int) -> FormClassGroup:
    reps = reduced_classes(D)
    pos = {f: i for i, f in enumerate(reps)}
    table = [[pos[canonical(compose(f, g))] for g in reps] for f in reps]
    return FormClassGroup(D, reps, table)


def has_norm_minus_one_unit(D: int) -> bool:
    """True if the principal form properly represents -1 (D > 0)."""
    if D < 0:
        return False
    a, b, c = principal_form(D)
    return canonical((-a, b, -c)) == canonical((a, b, c))
