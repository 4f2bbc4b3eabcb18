from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bclab.finite_induction import (
    BalancedProduct,
    FiniteAction,
    FiniteGroup,
    _PairSpace,
    abelian_group,
    abelian_groups_up_to,
    balanced_product,
    clopen_return_check,
    coset_action,
    cyclic,
    equivariance_check,
    groupoid_corner_check,
    h_sets,
    induction_in_stages_check,
    involution_model_check,
    orbit_bijection_check,
    restricted_groupoid,
    run_suite,
    subgroup_group,
    subgroups,
    units_mod,
)


def _quotient_oracle(G, H, rho, X):
    """Classes of G x X under (g, x) ~ (g rho(h)^-1, h x), built from explicit label pairs."""
    pairs = {(g, x) for g in range(G.order) for x in range(X.size)}
    classes = set()
    for g, x in pairs:
        classes.add(frozenset((G.mul(g, G.inverse[rho[h]]), X.act[h][x]) for h in range(H.order)))
    return classes


def _point(H):
    return FiniteAction(H, ("*",), tuple((0,) for _ in range(H.order)))


def _trivial(H, n):
    return FiniteAction(H, tuple(range(n)), tuple(tuple(range(n)) for _ in range(H.order)))


def _z2_in_z4():
    G = cyclic(4)
    return G, subgroup_group(G, [G.index((0,)), G.index((2,))])


def test_groups():
    assert len(abelian_groups_up_to(24)) == 37
    U = units_mod(15)
    assert U.order == 8 and U.is_abelian
    # (Z/15)* is Z/2 x Z/4: no element of order 8, exactly three involutions
    assert max(U.element_order(a) for a in range(8)) == 4
    assert sum(U.element_order(a) == 2 for a in range(8)) == 3
    assert len(subgroups(cyclic(12))) == 6
    assert len(subgroups(abelian_group((2, 2)))) == 5
    # counts of subgroups of elementary abelian 2-groups: 16 for rank 3, 67 for rank 4
    assert len(subgroups(abelian_group((2, 2, 2)))) == 16
    assert len(subgroups(abelian_group((2, 2, 2, 2)))) == 67


def test_bad_table_rejected():
    with pytest.raises(ValueError):
        FiniteGroup.from_table([0, 1], [[0, 1], [1, 1]])
    with pytest.raises(ValueError):
        FiniteGroup.from_table([0, 1], [[0, 1]])


def test_bad_action_rejected():
    G = cyclic(3)
    with pytest.raises(ValueError):
        FiniteAction.from_map(G, [0, 1, 2], lambda g, p: (p + 1) % 3)


def test_identity_induction():
    G = cyclic(6)
    X = coset_action(G, subgroups(G)[1])
    bp = balanced_product(tuple(range(6)), X, G)
    assert bp.size == X.size and sorted(bp.embed) == list(range(bp.size))
    assert all(bp.act[g][bp.embed[x]] == bp.embed[X.act[g][x]] for g in range(6) for x in range(X.size))


def test_z2_in_z4_point():
    G, (H, rho) = _z2_in_z4()
    bp = balanced_product(rho, _point(H), G)
    assert bp.size == 2
    assert len(_quotient_oracle(G, H, rho, _point(H))) == 2
    assert equivariance_check(bp).ok


def test_trivial_subgroup_product_is_everything():
    G = abelian_group((2, 3))
    H, rho = subgroup_group(G, [G.identity])
    X = _trivial(H, 3)
    bp = balanced_product(rho, X, G)
    assert bp.size == 18


@pytest.mark.parametrize("G", abelian_groups_up_to(12), ids=lambda G: str(G.order))
def test_against_quotient_oracle(G):
    for S in subgroups(G):
        H, rho = subgroup_group(G, S)
        for X in h_sets(H, 3):
            bp = balanced_product(rho, X, G)
            oracle = _quotient_oracle(G, H, rho, X)
            assert bp.size == len(oracle) == G.order * X.size // H.order
            ours = {frozenset(divmod(i, X.size) for i, c in enumerate(bp.class_of) if c == k) for k in range(bp.size)}
            assert ours == oracle


def test_rho_must_be_injective_hom():
    G = cyclic(4)
    H = cyclic(2)
    with pytest.raises(ValueError):
        balanced_product((0, 0), _point(H), G)
    with pytest.raises(ValueError):
        balanced_product((0, 1), _point(H), G)
    with pytest.raises(ValueError):
        balanced_product((0,), _point(H), G)


def test_clopen_return_examples():
    G, (H, rho) = _z2_in_z4()
    r = clopen_return_check(balanced_product(rho, _point(H), G))
    assert r.ok and r.witness == [(0,), (2,)]
    G = cyclic(5)
    assert clopen_return_check(balanced_product(tuple(range(5)), _point(G), G)).witness == sorted(G.labels)
    T, rho = subgroup_group(G, [G.identity])
    assert clopen_return_check(balanced_product(rho, _trivial(T, 2), G)).witness == [(0,)]


def test_orbit_bijection_examples():
    G, (H, rho) = _z2_in_z4()
    regular = coset_action(H, [H.identity])
    r = orbit_bijection_check(balanced_product(rho, regular, G))
    assert r.ok and len(r.witness) == 1
    r = orbit_bijection_check(balanced_product(rho, _trivial(H, 3), G))
    assert r.ok and len(r.witness) == 3


def test_groupoid_examples():
    G = cyclic(2)
    r = groupoid_corner_check(balanced_product((0, 1), _point(G), G))
    assert r.ok and r.witness == 2
    G6 = cyclic(6)
    H, rho = subgroup_group(G6, [G6.index((0,)), G6.index((3,))])
    r = groupoid_corner_check(balanced_product(rho, coset_action(H, [H.identity]), G6))
    assert r.ok and r.witness == 4
    T, rho = subgroup_group(G6, [G6.identity])
    bp = balanced_product(rho, _trivial(T, 2), G6)
    B = restricted_groupoid(bp)
    assert all(B.source[a] == B.target[a] and a[0] == G6.identity for a in B.arrows)


def test_broken_product_is_caught():
    G, (H, rho) = _z2_in_z4()
    X = coset_action(H, [H.identity])
    bp = balanced_product(rho, X, G)
    swapped = tuple(tuple(reversed(row)) if g == G.identity else row for g, row in enumerate(bp.act))
    bad = BalancedProduct(bp.G, bp.H, bp.rho, bp.X, bp.classes, bp.class_of, swapped, bp.embed)
    assert not equivariance_check(bad).ok
    shifted = BalancedProduct(bp.G, bp.H, bp.rho, bp.X, bp.classes, bp.class_of, bp.act, (bp.embed[0], bp.embed[0]))
    assert not groupoid_corner_check(shifted).ok


def test_stages():
    G = cyclic(8)
    subs = subgroups(G)
    K, _ = subgroup_group(G, subs[1])
    r = induction_in_stages_check(G, subs[2], subs[1], _trivial(K, 2))
    assert r.ok and r.witness == 8
    with pytest.raises(ValueError):
        induction_in_stages_check(G, subs[1], subs[2], _trivial(K, 1))


def _mult15():
    U = units_mod(15)
    X = FiniteAction.from_map(U, list(range(15)), lambda g, p: g * p % 15)
    return U, X


def test_involution_units_mod_15():
    U, X = _mult15()
    A = U.generated([U.index(4)])
    B = U.generated([U.index(7)])
    r = involution_model_check(U, A, B, X)
    assert r.ok and r.witness == 18
    assert involution_model_check(U, B, A, X).ok


def test_involution_symmetric_and_extreme():
    U, X = _mult15()
    S = U.generated([U.index(11)])
    assert involution_model_check(U, S, S, X).ok
    e = frozenset([U.identity])
    full = frozenset(range(U.order))
    r = involution_model_check(U, e, full, X)
    # (G x X)/(W x U) with U trivial, W = G is X itself
    assert r.ok and r.witness == X.size


def test_involution_rejects():
    S3 = FiniteGroup.from_table(
        list(itertools.permutations(range(3))),
        [[list(itertools.permutations(range(3))).index(tuple(a[b[i]] for i in range(3))) for b in itertools.permutations(range(3))]
         for a in itertools.permutations(range(3))],
    )
    assert not S3.is_abelian
    with pytest.raises(ValueError):
        involution_model_check(S3, [S3.identity], [S3.identity], _point(S3))
    U, X = _mult15()
    with pytest.raises(ValueError):
        involution_model_check(U, [U.identity, U.index(7)], [U.identity], X)


def test_wrong_map_is_caught():
    U, X = _mult15()
    space = _PairSpace(U, X)
    n = space.n
    # drop the twist of the second coordinate
    space.phi = [U.inverse[i // n] * n + i % n for i in range(space.N)]
    subs = subgroups(U)
    assert any(not space.check(A, B).ok for A in subs for B in subs)


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_all_checks_on_random_instances(data):
    G = data.draw(st.sampled_from(abelian_groups_up_to(16)))
    S = data.draw(st.sampled_from(subgroups(G)))
    H, rho = subgroup_group(G, S)
    X = data.draw(st.sampled_from(h_sets(H, 4)))
    bp = balanced_product(rho, X, G)
    assert bp.size * H.order == G.order * X.size
    for chk in (equivariance_check, clopen_return_check, orbit_bijection_check, groupoid_corner_check):
        assert chk(bp).ok


def test_small_suite_is_green_and_deterministic():
    a = run_suite(max_order=8, max_set=3, stages_order=8)
    b = run_suite(max_order=8, max_set=3, stages_order=8)
    assert a.ok and a.instances > 0
    assert (a.instances, a.checks) == (b.instances, b.checks)
