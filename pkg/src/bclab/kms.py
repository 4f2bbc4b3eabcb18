"""Finite-level models and explicit extremal KMS state values.

A point of the model is an orbit of ``O/mO`` under multiplication by the image
of the totally positive units. A state is attached to a fractional ideal ``g``
and an invertible residue ``omega``; its value on a test function ``f`` is

    sum over integral a in the class of g^-1 of  N(a)^-beta f(h_a omega)
    --------------------------------------------------------------------
                 sum over the same ideals of  N(a)^-beta

where ``h_a`` is a totally positive generator of ``g a``. Both sums run over
ideals of norm at most ``cutoff``, so constants are normalized exactly.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd

import gmpy2
import mpmath
from mpmath import mpf

from .ideals import Ideal, narrow_class_group, prime_ideals_up_to, tp_principal_generator, unit_ideal
from .quadfield import FieldElement, QuadField, unit_info

Residue = tuple[int, int]


@dataclass(frozen=True)
class LevelModel:
    field: QuadField
    m: int
    points: tuple[Residue, ...]
    orbit_of: dict = field(repr=False, compare=False)
    unit_image: tuple[Residue, ...] = ()

    def point(self, z: Residue) -> Residue:
        """Orbit representative of a residue."""
        return self.orbit_of[self.normalize(z)]

    def normalize(self, z: Residue) -> Residue:
        return (z[0] % self.m, z[1] % self.m if not self.field.is_rational else 0)

    def residue(self, x: FieldElement) -> Residue:
        """Reduction mod m of an element integral at the primes dividing m."""
        D = x.denominator()
        if gcd(D, self.m) != 1:
            raise ValueError(f"{x} is not integral at the primes dividing {self.m}")
        inv = pow(D, -1, self.m) if self.m > 1 else 0
        return self.normalize((int(x.a * D) * inv, int(x.b * D) * inv))

    def mul(self, u: Residue, z: Residue) -> Residue:
        t, n = self.field.tr_omega, self.field.n_omega
        bb = u[1] * z[1]
        return self.normalize((u[0] * z[0] - n * bb, u[0] * z[1] + u[1] * z[0] + t * bb))

    def is_invertible(self, z: Residue) -> bool:
        F = self.field
        N = z[0] * z[0] + F.tr_omega * z[0] * z[1] + F.n_omega * z[1] * z[1] if not F.is_rational else z[0]
        return gcd(N, self.m) == 1

    def orbit(self, p: Residue) -> list[Residue]:
        return sorted(z for z, r in self.orbit_of.items() if r == p)

    @property
    def invertible_points(self) -> tuple[Residue, ...]:
        return tuple(p for p in self.points if self.is_invertible(p))


@lru_cache(maxsize=None)
def build_level_model(F: QuadField, m: int) -> LevelModel:
    if m < 1:
        raise ValueError("modulus must be >= 1")
    proto = LevelModel(F, m, (), {})
    gens = [proto.residue(u) for u in unit_info(F).tp_unit_gens]
    # subgroup of (O/mO)* generated by the unit images
    image = {proto.normalize((1, 0))}
    frontier = list(image)
    while frontier:
        nxt = []
        for z in frontier:
            for u in gens:
                w = proto.mul(u, z)
                if w not in image:
                    image.add(w)
                    nxt.append(w)
        frontier = nxt
    image = tuple(sorted(image))
    rng_b = range(m) if not F.is_rational else range(1)
    orbit_of: dict = {}
    for a in range(m):
        for b in rng_b:
            z = (a, b)
            if z in orbit_of:
                continue
            orb = {proto.mul(u, z) for u in image}
            rep = min(orb)
            for w in orb:
                orbit_of[w] = rep
    points = tuple(sorted(set(orbit_of.values())))
    return LevelModel(F, m, points, orbit_of, image)


@dataclass(frozen=True)
class KMSPoint:
    """The pair (g, omega) with g a fractional ideal and omega an invertible residue mod m."""

    g: Ideal
    omega: Residue
    model: LevelModel
    cls: int

    def act(self, k: FieldElement) -> KMSPoint:
        """The point ``(k g, k^-1 omega)`` for totally positive k prime to m."""
        from .ideals import principal_ideal

        if not k.is_totally_positive():
            raise ValueError("k must be totally positive")
        kinv = self.model.residue(k.inverse())
        return make_point(self.g * principal_ideal(k), self.model.mul(kinv, self.omega), self.model)


def make_point(g: Ideal, omega: Residue, model: LevelModel) -> KMSPoint:
    if g.field != model.field:
        raise ValueError("field mismatch")
    omega = model.normalize(omega)
    if not model.is_invertible(omega):
        raise ValueError(f"omega = {omega} is not invertible mod {model.m}")
    G = narrow_class_group(g.field)
    return KMSPoint(g, omega, model, G.class_of(g.inverse()))


TestFunction = dict  # level-model point -> exact rational


def constant(model: LevelModel, c=1) -> TestFunction:
    return {p: Fraction(c) for p in model.points}


def indicator(model: LevelModel, pts) -> TestFunction:
    pts = {model.point(p) for p in pts}
    return {p: Fraction(int(p in pts)) for p in model.points}


# -- ideal walk with totally positive generators ------------------------------------

@dataclass
class _ClassData:
    reps: list[Ideal]
    tau: dict  # (a, b) -> tp generator of J_a J_b / J_ab
    prime: list  # (norm, class, tp generator of P / J_class)


@lru_cache(maxsize=16)
def _class_data(F: QuadField, cutoff: int) -> _ClassData:
    G = narrow_class_group(F)
    reps = G.elements
    inv = [J.inverse() for J in reps]
    tau = {}
    for a in range(G.order):
        for b in range(G.order):
            c = G.table[a][b]
            tau[a, b] = tp_principal_generator(reps[a] * reps[b] * inv[c])
    prime = []
    for P, n in prime_ideals_up_to(F, cutoff):
        c = G.class_of_prime(P) if G.order > 1 else 0
        pi = tp_principal_generator(P * inv[c]) if c else tp_principal_generator(P)
        prime.append((n, c, pi))
    return _ClassData(reps, tau, prime)


def _triple(x: FieldElement) -> tuple[int, int, int]:
    D = x.denominator()
    return int(x.a * D), int(x.b * D), D


def _tmul(F: QuadField, u, v):
    """Product of elements stored as ``(A, B, D)`` meaning ``(A + B w)/D``."""
    t, n = F.tr_omega, F.n_omega
    bb = u[1] * v[1]
    A = u[0] * v[0] - n * bb
    B = u[0] * v[1] + u[1] * v[0] + t * bb
    D = u[2] * v[2]
    if D > 1:
        g = gcd(gcd(A, B), D)
        if g > 1:
            A, B, D = A // g, B // g, D // g
    return A, B, D


def ideal_walk(F: QuadField, cutoff: int):
    """Yield ``(norm, class, e)`` for every integral ideal a of norm <= cutoff, with ``a = e J_class``.

    ``e`` is totally positive, given as an integer triple ``(A, B, D)`` for
    ``(A + B w)/D``, and ``J_class`` is the canonical class representative.
    """
    data = _class_data(F, cutoff)
    G = narrow_class_group(F)
    table = G.table
    primes = [(q, c, _tmul(F, _triple(pi), (1, 0, 1))) for q, c, pi in data.prime]
    tau = {k: _triple(v) for k, v in data.tau.items()}
    trivial = G.order == 1
    stack = [(0, 1, 0, (1, 0, 1))]
    while stack:
        start, n, k, e = stack.pop()
        yield n, k, e
        for i in range(start, len(primes)):
            q, c, pi = primes[i]
            if n * q > cutoff:
                break
            m, kk, ee = n * q, k, e
            while m <= cutoff:
                ee = _tmul(F, ee, pi)
                if not trivial:
                    ee = _tmul(F, ee, tau[kk, c])
                    kk = table[kk][c]
                stack.append((i + 1, m, kk, ee))
                m *= q


@dataclass(frozen=True)
class KMSValue:
    value: mpf
    exact: Fraction | None
    partition_function: mpf
    cutoff: int
    terms: int


def _weight(n: int, beta):
    if isinstance(beta, int) or (isinstance(beta, Fraction) and beta.denominator == 1):
        return gmpy2.mpq(1, gmpy2.mpz(n) ** int(beta))
    return mpf(n) ** (-mpmath.mpmathify(beta))


def _to_mpf(v, dps):
    with mpmath.workdps(dps + 10):
        if isinstance(v, type(gmpy2.mpq(0))):
            return mpf(int(v.numerator)) / int(v.denominator)
        return +v


def _residue(model: LevelModel, e) -> Residue:
    A, B, D = e
    if D == 1:
        return model.normalize((A, B))
    if gcd(D, model.m) != 1:
        raise ValueError(f"element with denominator {D} escapes the model mod {model.m}")
    inv = pow(D, -1, model.m)
    return model.normalize((A * inv, B * inv))


def _gen_residues(x: KMSPoint, cutoff: int):
    """Yield ``(norm, residue of h omega, h)`` over the ideals a in the class of g^-1.

    ``h`` is a totally positive generator of ``g a`` as an integer triple.
    """
    F = x.g.field
    model = x.model
    data = _class_data(F, cutoff)
    gamma = tp_principal_generator(x.g * data.reps[x.cls])
    if gamma is None:
        raise AssertionError("class bookkeeping is inconsistent")
    gt = _triple(gamma)
    for n, k, e in ideal_walk(F, cutoff):
        if k != x.cls:
            continue
        h = _tmul(F, e, gt)
        yield n, model.mul(_residue(model, h), x.omega), h


def kms_eval(beta, x: KMSPoint, f: TestFunction, cutoff: int = 10**4, dps: int = 30) -> KMSValue:
    if beta <= 1:
        raise ValueError("beta must exceed 1")
    if cutoff < 1:
        raise ValueError("cutoff must be >= 1")
    model = x.model
    num = 0
    den = 0
    terms = 0
    for n, z, _ in sorted(_gen_residues(x, cutoff), key=lambda t: (t[0], t[1])):
        w = _weight(n, beta)
        den += w
        fv = f.get(model.point(z), 0)
        if fv:
            num += w * (gmpy2.mpq(fv.numerator, fv.denominator) if isinstance(w, type(gmpy2.mpq(0))) else mpf(fv.numerator) / fv.denominator)
        terms += 1
    if terms == 0:
        raise ValueError("no ideals found in the class of the point")
    if isinstance(den, type(gmpy2.mpq(0))):
        q = gmpy2.mpq(num) / den
        exact = Fraction(int(q.numerator), int(q.denominator))
        return KMSValue(_to_mpf(q, dps), exact, _to_mpf(den, dps), cutoff, terms)
    with mpmath.workdps(dps + 10):
        v = num / den
    return KMSValue(v, None, den, cutoff, terms)


def unnormalized_mass(F: QuadField, beta, cutoff: int) -> mpf:
    """``sum N(a)^-beta`` over all integral ideals of norm <= cutoff (any beta > 0)."""
    from .zeta import dirichlet_sum, norm_counts

    v, _ = dirichlet_sum(norm_counts(F, cutoff), beta, exact=False)
    return v


# -- scaling and orbit checks ----------------------------------------------------------------

@dataclass(frozen=True)
class ScalingReport:
    mu_S: mpf
    mu_hS: mpf
    ratio: mpf
    expected: mpf
    deviation: mpf


def measure_scaling_check(beta, x: KMSPoint, h: FieldElement, S, cutoff: int = 10**4) -> ScalingReport:
    """Compare ``mu(hS)`` with ``N(h)^-beta mu(S)`` for the measure of the state at x.

    ``S`` is a set of level-model points; ``hS`` consists of the elements ``h s``.
    """
    if not h.is_integral() or h.is_zero() or not h.is_totally_positive():
        raise ValueError("h must be a nonzero totally positive integral element")
    model = x.model
    S = {model.point(p) for p in S}
    if not S:
        raise ValueError("S is empty")
    F = h.field
    nh = abs(h.norm())
    hbar = (1, 0, 1) if F.is_rational else _triple(h.conj())
    muS = mpf(0)
    muhS = mpf(0)
    with mpmath.workdps(40):
        s = mpmath.mpmathify(beta)
        for n, z, hh in _gen_residues(x, cutoff):
            w = mpf(n) ** (-s)
            if model.point(z) in S:
                muS += w
            # hh / h = hh * conj(h) / N(h), integral iff every coordinate divides out
            A, B, D = _tmul(F, hh, hbar)
            den = D * int(nh)
            if A % den == 0 and B % den == 0:
                q = model.normalize((A // den, B // den))
                if model.point(model.mul(q, x.omega)) in S:
                    muhS += w
        if muS == 0:
            raise ValueError("S carries no mass at this cutoff")
        ratio = muhS / muS
        expected = mpf(int(nh)) ** (-s)
        dev = abs(ratio / expected - 1)
    return ScalingReport(muS, muhS, ratio, expected, dev)


@dataclass(frozen=True)
class OrbitReport:
    ok: bool
    values: list
    same_orbit_max_diff: mpf
    distinct_witnesses: list


def _same_orbit(x: KMSPoint, y: KMSPoint) -> bool:
    """True when y = k x for some totally positive k (at the level of the model)."""
    if x.model != y.model:
        return False
    q = y.g * x.g.inverse()
    k = tp_principal_generator(q)
    if k is None:
        return False
    try:
        kx = x.act(k)
    except ValueError:
        return False
    return x.model.point(kx.omega) == x.model.point(y.omega)


def state_orbit_check(beta, points: list[KMSPoint], cutoff: int = 2000, tol=mpf("1e-20")) -> OrbitReport:
    """Evaluate each state on the indicator battery of its level model and compare."""
    vals = []
    for x in points:
        battery = [indicator(x.model, [p]) for p in x.model.points]
        vals.append([kms_eval(beta, x, f, cutoff).value for f in battery] + [kms_eval(beta, x, constant(x.model), cutoff).partition_function])
    same_diff = mpf(0)
    ok = True
    witnesses = []
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            diff = max(abs(a - b) for a, b in zip(vals[i][:-1], vals[j][:-1]))
            if _same_orbit(points[i], points[j]):
                same_diff = max(same_diff, diff)
                ok &= diff <= tol
            else:
                pdiff = abs(vals[i][-1] - vals[j][-1])
                witnesses.append((i, j, max(diff, pdiff)))
    return OrbitReport(ok, vals, same_diff, witnesses)
