"""Finite models of induced actions: balanced products, corners and the inversion trick.

Groups are finite with elements indexed ``0..n-1`` and a multiplication
table; actions are tables ``act[g][x]``. Everything is checked by exhaustion.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import gcd, prod


@dataclass(frozen=True)
class FiniteGroup:
    labels: tuple
    table: tuple[tuple[int, ...], ...]
    identity: int
    inverse: tuple[int, ...]

    @classmethod
    def from_table(cls, labels, table) -> FiniteGroup:
        n = len(labels)
        table = tuple(tuple(row) for row in table)
        if len(table) != n or any(len(r) != n for r in table):
            raise ValueError("table must be square of the group's size")
        if any(not 0 <= v < n for r in table for v in r):
            raise ValueError("table entries out of range")
        ids = [e for e in range(n) if all(table[e][a] == a and table[a][e] == a for a in range(n))]
        if len(ids) != 1:
            raise ValueError("no unique identity")
        e = ids[0]
        inv = []
        for a in range(n):
            bs = [b for b in range(n) if table[a][b] == e]
            if len(bs) != 1 or table[bs[0]][a] != e:
                raise ValueError(f"element {labels[a]} has no inverse")
            inv.append(bs[0])
        for a, b, c in itertools.product(range(n), repeat=3):
            if table[table[a][b]][c] != table[a][table[b][c]]:
                raise ValueError("operation is not associative")
        return cls(tuple(labels), table, e, tuple(inv))

    @property
    def order(self) -> int:
        return len(self.labels)

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    @property
    def is_abelian(self) -> bool:
        n = self.order
        return all(self.table[a][b] == self.table[b][a] for a in range(n) for b in range(a + 1, n))

    def index(self, label) -> int:
        return self.labels.index(label)

    def generators_of(self, S) -> list[int]:
        """A small generating set of the subgroup S (greedy)."""
        gens, H = [], frozenset([self.identity])
        for a in sorted(S, key=lambda a: (-self.element_order(a), a)):
            if a not in H:
                gens.append(a)
                H = self.generated(gens)
        return gens

    def element_order(self, a: int) -> int:
        k, b = 1, a
        while b != self.identity:
            b = self.table[b][a]
            k += 1
        return k

    def generated(self, gens) -> frozenset[int]:
        S = {self.identity}
        frontier = [self.identity]
        while frontier:
            nxt = []
            for s in frontier:
                for g in gens:
                    t = self.table[s][g]
                    if t not in S:
                        S.add(t)
                        nxt.append(t)
            frontier = nxt
        return frozenset(S)


def abelian_group(invariants) -> FiniteGroup:
    """``Z/n1 x Z/n2 x ...`` written additively, labels are tuples."""
    invariants = tuple(invariants)
    labels = list(itertools.product(*(range(n) for n in invariants))) if invariants else [()]
    pos = {l: i for i, l in enumerate(labels)}
    table = [[pos[tuple((x + y) % n for x, y, n in zip(a, b, invariants))] for b in labels] for a in labels]
    inv = tuple(pos[tuple((-x) % n for x, n in zip(a, invariants))] for a in labels)
    return FiniteGroup(tuple(labels), tuple(tuple(r) for r in table), pos[tuple(0 for _ in invariants)], inv)


def cyclic(n: int) -> FiniteGroup:
    return abelian_group((n,))


def units_mod(n: int) -> FiniteGroup:
    """The multiplicative group (Z/n)*."""
    labels = [a for a in range(1, n) if gcd(a, n) == 1] if n > 1 else [0]
    pos = {a: i for i, a in enumerate(labels)}
    table = [[pos[(a * b) % n] if n > 1 else 0 for b in labels] for a in labels]
    return FiniteGroup.from_table(labels, table)


def _partitions_divisor_chain(n: int):
    """Invariant-factor lists ``(d1 | d2 | ... )`` with product n."""
    def rec(rest, smallest_multiple_of):
        if rest == 1:
            yield ()
            return
        for d in range(2, rest + 1):
            if rest % d == 0 and d % smallest_multiple_of == 0:
                for tail in rec(rest // d, d):
                    # each later factor must be a multiple of d
                    yield (d,) + tail

    return [c for c in rec(n, 1) if all(c[i + 1] % c[i] == 0 for i in range(len(c) - 1))]


def abelian_groups_up_to(order: int) -> list[FiniteGroup]:
    """One group of each isomorphism type of abelian group with order <= ``order``."""
    out = [abelian_group(())]
    for n in range(2, order + 1):
        for inv in _partitions_divisor_chain(n):
            out.append(abelian_group(inv))
    return out


def subgroups(G: FiniteGroup) -> list[frozenset[int]]:
    """All subgroups: start from the cyclic ones and adjoin elements until nothing new appears."""
    found = {G.generated([a]) for a in range(G.order)}
    frontier = list(found)
    while frontier:
        nxt = []
        for S in frontier:
            gens = G.generators_of(S)
            for c in range(G.order):
                if c not in S:
                    T = G.generated(gens + [c])
                    if T not in found:
                        found.add(T)
                        nxt.append(T)
        frontier = nxt
    return sorted(found, key=lambda S: (len(S), sorted(S)))


def subgroup_group(G: FiniteGroup, S) -> tuple[FiniteGroup, tuple[int, ...]]:
    """The subgroup S as a group in its own right, with its inclusion map into G."""
    elems = sorted(S)
    pos = {g: i for i, g in enumerate(elems)}
    table = [[pos[G.table[a][b]] for b in elems] for a in elems]
    H = FiniteGroup(tuple(G.labels[g] for g in elems), tuple(tuple(r) for r in table), pos[G.identity], tuple(pos[G.inverse[a]] for a in elems))
    return H, tuple(elems)


# -- actions ----------------------------------------------------------------------------

@dataclass(frozen=True)
class FiniteAction:
    group: FiniteGroup
    points: tuple
    act: tuple[tuple[int, ...], ...]  # act[g][x]

    @classmethod
    def from_map(cls, group: FiniteGroup, points, fn) -> FiniteAction:
        pos = {p: i for i, p in enumerate(points)}
        act = tuple(tuple(pos[fn(group.labels[g], p)] for p in points) for g in range(group.order))
        A = cls(group, tuple(points), act)
        A.verify()
        return A

    @property
    def size(self) -> int:
        return len(self.points)

    def verify(self) -> None:
        G, n = self.group, self.size
        if any(self.act[G.identity][x] != x for x in range(n)):
            raise ValueError("identity does not act trivially")
        for g in range(G.order):
            for h in range(G.order):
                gh = G.table[g][h]
                if any(self.act[gh][x] != self.act[g][self.act[h][x]] for x in range(n)):
                    raise ValueError("action is not compatible with the group law")

    def orbits(self) -> list[frozenset[int]]:
        seen, out = set(), []
        for x in range(self.size):
            if x not in seen:
                o = frozenset(self.act[g][x] for g in range(self.group.order))
                seen |= o
                out.append(o)
        return out


def coset_action(H: FiniteGroup, K) -> FiniteAction:
    """H acting on H/K by left multiplication."""
    K = frozenset(K)
    cosets = []
    where = {}
    for a in range(H.order):
        if a in where:
            continue
        c = frozenset(H.table[a][k] for k in K)
        for b in c:
            where[b] = len(cosets)
        cosets.append(min(c))
    act = tuple(tuple(where[H.table[h][c]] for c in cosets) for h in range(H.order))
    return FiniteAction(H, tuple(cosets), act)


def disjoint_union(actions: list[FiniteAction], group: FiniteGroup) -> FiniteAction:
    pts, offs = [], []
    for i, A in enumerate(actions):
        offs.append(len(pts))
        pts.extend((i, p) for p in A.points)
    act = tuple(tuple(offs[i] + A.act[g][x] for i, A in enumerate(actions) for x in range(A.size)) for g in range(group.order))
    return FiniteAction(group, tuple(pts), act)


def h_sets(H: FiniteGroup, max_size: int) -> list[FiniteAction]:
    """Every H-set of size 1..max_size up to isomorphism, as unions of coset spaces (H abelian)."""
    blocks = [(H.order // len(K), K) for K in subgroups(H) if H.order // len(K) <= max_size]
    out = []

    def rec(start, size, chosen):
        if chosen:
            out.append(disjoint_union([coset_action(H, blocks[i][1]) for i in chosen], H))
        for i in range(start, len(blocks)):
            s = blocks[i][0]
            if size + s <= max_size:
                rec(i, size + s, chosen + [i])

    rec(0, 0, [])
    return out


# -- balanced product ---------------------------------------------------------------------

@dataclass(frozen=True)
class BalancedProduct:
    G: FiniteGroup
    H: FiniteGroup
    rho: tuple[int, ...]
    X: FiniteAction
    classes: tuple[int, ...]  # canonical pair index g*|X| + x per class
    class_of: tuple[int, ...]  # pair index -> class number
    act: tuple[tuple[int, ...], ...]  # act[g][class]
    embed: tuple[int, ...]  # x -> class of (e, x)

    @property
    def size(self) -> int:
        return len(self.classes)

    def pair(self, c: int) -> tuple[int, int]:
        return divmod(self.classes[c], self.X.size)


def _check_hom(H: FiniteGroup, G: FiniteGroup, rho) -> None:
    if len(rho) != H.order:
        raise ValueError("rho must be defined on every element of H")
    for a in range(H.order):
        for b in range(H.order):
            if rho[H.table[a][b]] != G.table[rho[a]][rho[b]]:
                raise ValueError("rho is not a homomorphism")
    if len(set(rho)) != H.order:
        raise ValueError("rho is not injective")


def balanced_product(rho, X: FiniteAction, G: FiniteGroup) -> BalancedProduct:
    """``G x_H X``: pairs (g, x) modulo (g, x) ~ (g rho(h)^-1, h x)."""
    H = X.group
    _check_hom(H, G, rho)
    n = X.size
    class_of = [-1] * (G.order * n)
    classes = []
    for g in range(G.order):
        for x in range(n):
            i = g * n + x
            if class_of[i] >= 0:
                continue
            orbit = [G.table[g][G.inverse[rho[h]]] * n + X.act[h][x] for h in range(H.order)]
            c = len(classes)
            classes.append(min(orbit))
            for j in orbit:
                class_of[j] = c
    act = tuple(
        tuple(class_of[G.table[a][classes[c] // n] * n + classes[c] % n] for c in range(len(classes)))
        for a in range(G.order)
    )
    embed = tuple(class_of[G.identity * n + x] for x in range(n))
    return BalancedProduct(G, H, tuple(rho), X, tuple(classes), tuple(class_of), act, embed)


@dataclass(frozen=True)
class CheckResult:
    name: str
    ok: bool
    witness: object = None


def clopen_return_check(bp: BalancedProduct) -> CheckResult:
    """``g i(X)`` meets ``i(X)`` exactly when g lies in rho(H)."""
    iX = set(bp.embed)
    image = set(bp.rho)
    for g in range(bp.G.order):
        meets = any(bp.act[g][c] in iX for c in iX)
        if meets != (g in image):
            return CheckResult("clopen_return", False, bp.G.labels[g])
    return CheckResult("clopen_return", True, sorted(bp.G.labels[g] for g in image))


def orbit_bijection_check(bp: BalancedProduct) -> CheckResult:
    """``H\\X -> G\\(G x_H X)`` induced by i is a bijection."""
    G = bp.G
    gorbit = {}
    for c in range(bp.size):
        if c not in gorbit:
            o = frozenset(bp.act[g][c] for g in range(G.order))
            for d in o:
                gorbit[d] = min(o)
    mapping = {}
    for orb in bp.X.orbits():
        images = {gorbit[bp.embed[x]] for x in orb}
        if len(images) != 1:
            return CheckResult("orbit_bijection", False, ("not well defined", sorted(orb)))
        mapping[min(orb)] = images.pop()
    targets = set(gorbit.values())
    if len(set(mapping.values())) != len(mapping) or set(mapping.values()) != targets:
        return CheckResult("orbit_bijection", False, ("not bijective", mapping))
    return CheckResult("orbit_bijection", True, mapping)


@dataclass(frozen=True)
class FiniteGroupoid:
    objects: tuple
    arrows: tuple  # (group element, source object)
    source: dict
    target: dict

    def compose(self, a2, a1, mul):
        """``a2 o a1`` for composable arrows of a transformation groupoid."""
        if self.target[a1] != self.source[a2]:
            raise ValueError("arrows are not composable")
        return (mul(a2[0], a1[0]), a1[1])


def transformation_groupoid(X: FiniteAction) -> FiniteGroupoid:
    H = X.group
    arrows = tuple((h, x) for h in range(H.order) for x in range(X.size))
    return FiniteGroupoid(tuple(range(X.size)), arrows, {a: a[1] for a in arrows}, {a: X.act[a[0]][a[1]] for a in arrows})


def restricted_groupoid(bp: BalancedProduct) -> FiniteGroupoid:
    """The transformation groupoid of G on the balanced product, restricted to i(X)."""
    iX = set(bp.embed)
    arrows = tuple((g, c) for g in range(bp.G.order) for c in sorted(iX) if bp.act[g][c] in iX)
    return FiniteGroupoid(tuple(sorted(iX)), arrows, {a: a[1] for a in arrows}, {a: bp.act[a[0]][a[1]] for a in arrows})


def groupoid_corner_check(bp: BalancedProduct) -> CheckResult:
    """``(h, x) -> (rho(h), i(x))`` is an isomorphism onto the restricted groupoid, and G i(X) is everything."""
    A = transformation_groupoid(bp.X)
    B = restricted_groupoid(bp)
    phi = {a: (bp.rho[a[0]], bp.embed[a[1]]) for a in A.arrows}
    if len(set(phi.values())) != len(A.arrows) or set(phi.values()) != set(B.arrows):
        return CheckResult("groupoid_corner", False, ("arrow map not bijective", len(A.arrows), len(B.arrows)))
    if len(set(bp.embed)) != bp.X.size:
        return CheckResult("groupoid_corner", False, "i is not injective")
    for a in A.arrows:
        if B.source[phi[a]] != bp.embed[A.source[a]] or B.target[phi[a]] != bp.embed[A.target[a]]:
            return CheckResult("groupoid_corner", False, ("source/target", a))
    Hm, Gm = bp.H.mul, bp.G.mul
    for a1 in A.arrows:
        for a2 in A.arrows:
            if A.target[a1] == A.source[a2]:
                if phi[A.compose(a2, a1, Hm)] != B.compose(phi[a2], phi[a1], Gm):
                    return CheckResult("groupoid_corner", False, ("composition", a1, a2))
    full = {bp.act[g][c] for g in range(bp.G.order) for c in bp.embed}
    if len(full) != bp.size:
        return CheckResult("groupoid_corner", False, "G i(X) is not the whole product")
    return CheckResult("groupoid_corner", True, len(A.arrows))


def equivariance_check(bp: BalancedProduct) -> CheckResult:
    """Size formula and ``i(h x) = rho(h) i(x)``."""
    if bp.size * bp.H.order != bp.G.order * bp.X.size:
        return CheckResult("equivariance", False, ("size", bp.size))
    for h in range(bp.H.order):
        for x in range(bp.X.size):
            if bp.embed[bp.X.act[h][x]] != bp.act[bp.rho[h]][bp.embed[x]]:
                return CheckResult("equivariance", False, (h, x))
    if len(set(bp.embed)) != bp.X.size:
        return CheckResult("equivariance", False, "i not injective")
    return CheckResult("equivariance", True)


# -- induction in stages --------------------------------------------------------------------

def _as_action(bp: BalancedProduct) -> FiniteAction:
    return FiniteAction(bp.G, tuple(range(bp.size)), bp.act)


def induction_in_stages_check(G: FiniteGroup, H_set, K_set, X: FiniteAction) -> CheckResult:
    """``G x_H (H x_K X) = G x_K X`` via ``[g, [h, x]] -> [g h, x]`` for K <= H <= G.

    ``X`` is an action of the subgroup K (as its own group).
    """
    if not set(K_set) <= set(H_set):
        raise ValueError("K must be contained in H")
    H, rhoH = subgroup_group(G, H_set)
    Kg = X.group
    # K inside H
    pos_in_H = {g: i for i, g in enumerate(rhoH)}
    K_sorted = sorted(K_set)
    rhoKH = tuple(pos_in_H[K_sorted[k]] for k in range(Kg.order))
    rhoKG = tuple(K_sorted)
    inner = balanced_product(rhoKH, X, H)
    outer = balanced_product(rhoH, _as_action(inner), G)
    direct = balanced_product(rhoKG, X, G)
    mapping = {}
    for c in range(outer.size):
        g, inner_c = outer.pair(c)
        h, x = inner.pair(inner_c)
        mapping[c] = direct.class_of[G.table[g][rhoH[h]] * X.size + x]
    # well defined: every pair in an outer class lands in the same place
    for i, c in enumerate(outer.class_of):
        g, inner_c = divmod(i, inner.size)
        h, x = inner.pair(inner_c)
        if direct.class_of[G.table[g][rhoH[h]] * X.size + x] != mapping[c]:
            return CheckResult("induction_in_stages", False, ("not well defined", i))
    if sorted(mapping.values()) != list(range(direct.size)):
        return CheckResult("induction_in_stages", False, "not bijective")
    for a in range(G.order):
        for c in range(outer.size):
            if mapping[outer.act[a][c]] != direct.act[a][mapping[c]]:
                return CheckResult("induction_in_stages", False, ("not equivariant", a, c))
    return CheckResult("induction_in_stages", True, direct.size)


# -- the inversion trick ----------------------------------------------------------------------

def _orbit_labels(n_pts: int, perms) -> list[int]:
    """Label each point by the least point of its orbit under the group generated by ``perms``."""
    lab = [-1] * n_pts
    for i in range(n_pts):
        if lab[i] >= 0:
            continue
        lab[i] = i
        stack = [i]
        while stack:
            j = stack.pop()
            for p in perms:
                k = p[j]
                if lab[k] < 0:
                    lab[k] = i
                    stack.append(k)
    return lab


def _descends(f: list[int], src: list[int], dst: list[int]) -> dict | None:
    """The map on orbit labels induced by the point map ``f``, or None if not well defined or not bijective."""
    induced = {}
    for c, j in zip(src, f):
        t = dst[j]
        if induced.setdefault(c, t) != t:
            return None
    if len(set(induced.values())) != len(induced) or len(induced) != len(set(dst)):
        return None
    return induced


class _PairSpace:
    """G x X with the permutations needed by the involution check, built once per (G, X)."""

    def __init__(self, G: FiniteGroup, X: FiniteAction):
        self.G, self.X = G, X
        n, T, inv, act = X.size, G.table, G.inverse, X.act
        self.n, self.N = n, G.order * n
        idx = range(self.N)
        # (a, e): (x, y) -> (a x, y);  (e, b): (x, y) -> (x b^-1, b y)
        self.left_mult = [[T[a][i // n] * n + i % n for i in idx] for a in range(G.order)]
        self.right_mult = [[T[i // n][inv[b]] * n + act[b][i % n] for i in idx] for b in range(G.order)]
        self.phi = [inv[i // n] * n + act[i // n][i % n] for i in idx]
        self.gens = {}
        self.gen_G = G.generators_of(range(G.order))

    def generators(self, S: frozenset[int]) -> list[int]:
        if S not in self.gens:
            self.gens[S] = self.G.generators_of(S)
        return self.gens[S]

    def labels(self, A: frozenset[int], B: frozenset[int]) -> list[int]:
        """Orbits of A x B acting by (a, b)(x, y) = (a x b^-1, b y)."""
        perms = [self.left_mult[a] for a in self.generators(A)] + [self.right_mult[b] for b in self.generators(B)]
        return _orbit_labels(self.N, perms)

    def check(self, U: frozenset[int], W: frozenset[int]) -> CheckResult:
        G, n, N = self.G, self.n, self.N
        left = self.labels(W, U)
        right = self.labels(U, W)
        phi = self.phi
        induced = _descends(phi, left, right)
        if induced is None:
            return CheckResult("involution", False, "phi does not descend to a bijection")
        # residual actions: g(x, y) = (x g^-1, g y) on the source, g(x, y) = (g x, y) on the target
        reps = sorted(set(left))
        for g in self.gen_G:
            rg, lg = self.right_mult[g], self.left_mult[g]
            for i in reps:
                if induced[left[rg[i]]] != right[lg[phi[i]]]:
                    return CheckResult("involution", False, ("not equivariant", G.labels[g], i))
        # (G x X)/(W x U) = (G/W) x_U X via [(x, y)] -> [(xW, y)]
        if not self._coset_identity(left, W, U, frozenset([G.identity])):
            return CheckResult("involution", False, "(G/W) x_U X identification fails")
        # (G x X)/(U x W) = (G/U) x_{W/(U n W)} X/(U n W) via [(x, y)] -> [(xU, [y])]
        if not self._coset_identity(right, U, W, U & W):
            return CheckResult("involution", False, "(G/U) x_W/(UnW) X/(UnW) identification fails")
        return CheckResult("involution", True, len(reps))

    def _cosets(self, A: frozenset[int]) -> tuple[list[int], list[int]]:
        """Coset index of every element of G, and a representative of each coset."""
        key = ("cosets", A)
        if key not in self.gens:
            T = self.G.table
            lead = [min(T[g][a] for a in A) for g in range(self.G.order)]
            reps = sorted(set(lead))
            pos = {c: k for k, c in enumerate(reps)}
            self.gens[key] = ([pos[c] for c in lead], reps)
        return self.gens[key]

    def _x_orbits(self, C: frozenset[int]) -> tuple[list[int], list[int]]:
        key = ("orbits", C)
        if key not in self.gens:
            lab = _orbit_labels(self.n, [self.X.act[c] for c in self.generators(C)])
            reps = sorted(set(lab))
            pos = {y: k for k, y in enumerate(reps)}
            self.gens[key] = ([pos[y] for y in lab], reps)
        return self.gens[key]

    def _coset_identity(self, labels: list[int], A: frozenset[int], B: frozenset[int], C: frozenset[int]) -> bool:
        """Compare (G x X)/(A x B) with (G/A) x_B (X/C) through (x, y) -> (xA, yC), equivariantly."""
        G, X, n = self.G, self.X, self.n
        T, inv = G.table, G.inverse
        cidx, creps = self._cosets(A)
        yidx, yreps = self._x_orbits(C)
        m = len(yreps)
        M = len(creps) * m
        # b acts on (xA, [y]) by (x b^-1 A, [b y]); C fixes both coordinates so this is an action of B/C
        perms = [
            [cidx[T[creps[k // m]][inv[b]]] * m + yidx[X.act[b][yreps[k % m]]] for k in range(M)]
            for b in self.generators(B)
        ]
        target = _orbit_labels(M, perms)
        proj = [ci * m + yi for ci in cidx for yi in yidx]
        induced = _descends(proj, labels, target)
        if induced is None:
            return False
        reps = set(labels)
        for g in self.gen_G:
            lg = self.left_mult[g]
            for i in reps:
                if induced[labels[lg[i]]] != target[proj[lg[i]]]:
                    return False
        return True


def involution_model_check(G: FiniteGroup, U, W, X: FiniteAction) -> CheckResult:
    """``(x, y) -> (x^-1, x y)`` on G x X descends to a bijection of the quotients by W x U and U x W.

    ``(g, h)`` acts by ``(x, y) -> (g x h^-1, h y)``. Also checks that the induced map
    intertwines the residual G-actions and that both quotients agree with the
    corresponding balanced products. Equivariance is tested on generators of G.
    """
    if not G.is_abelian:
        raise ValueError("G must be abelian")
    if X.group is not G and X.group != G:
        raise ValueError("X must be a G-set")
    U, W = frozenset(U), frozenset(W)
    for S in (U, W):
        if G.generated(list(S)) != S:
            raise ValueError("U and W must be subgroups")
    return _PairSpace(G, X).check(U, W)


# -- suite --------------------------------------------------------------------------------------

@dataclass
class SuiteReport:
    instances: int = 0
    checks: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def record(self, label, result: CheckResult) -> None:
        self.checks += 1
        if not result.ok:
            self.failures.append((label, result))


def run_suite(max_order: int = 24, max_set: int = 4, stages_order: int = 16,
              union_order: int = 12, involution: bool = True) -> SuiteReport:
    """Run every check over all abelian H <= G with |G| <= max_order and all H-sets of size <= max_set.

    The involution check runs over all pairs of subgroups. Its G-sets are all
    transitive ones, plus disjoint unions when |G| <= union_order: the quotients
    split along orbits of X, so unions add nothing new for larger groups.
    """
    rep = SuiteReport()
    for G in abelian_groups_up_to(max_order):
        subs = subgroups(G)
        for S in subs:
            H, rho = subgroup_group(G, S)
            for X in h_sets(H, max_set):
                bp = balanced_product(rho, X, G)
                rep.instances += 1
                label = (G.labels[-1] if G.order > 1 else (), len(S), X.size)
                for chk in (equivariance_check, clopen_return_check, orbit_bijection_check, groupoid_corner_check):
                    rep.record(label, chk(bp))
        if involution:
            for X in h_sets(G, max_set):
                if len(X.orbits()) > 1 and G.order > union_order:
                    continue
                space = _PairSpace(G, X)
                for U in subs:
                    for W in subs:
                        rep.record(("involution", G.order, len(U), len(W), X.size), space.check(U, W))
        if G.order <= stages_order:
            for Hs in subs:
                for Ks in subs:
                    if Ks <= Hs:
                        K, _ = subgroup_group(G, Ks)
                        for X in h_sets(K, max_set):
                            rep.record(("stages", G.order, len(Hs), len(Ks), X.size), induction_in_stages_check(G, Hs, Ks, X))
    return rep
