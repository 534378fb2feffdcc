import itertools

import numpy as np
import pytest

from cayleylab import fields, groups
from cayleylab.errors import NotEnumerableError, NotInGroupError, UnsupportedError


def brute_force_sl_order(m, p, k):
    """Count all m x m matrices over F_{p^k} with determinant one."""
    f = fields.make(p, k)
    count = 0
    for entries in itertools.product(range(f.q), repeat=m * m):
        if groups._mat_det(f, entries, m) == 1:
            count += 1
    return count


@pytest.mark.parametrize("p,k", [(2, 1), (3, 1), (2, 2), (5, 1)])
def test_sl2_order_against_brute_force(p, k):
    ctx = groups.make_sl(2, p, k)
    assert groups.order_of(ctx) == brute_force_sl_order(2, p, k)


def test_sl3_f2_order_is_168():
    ctx = groups.make_sl(3, 2)
    assert ctx.order == 168 == brute_force_sl_order(3, 2, 1)


def test_known_orders():
    # q^4 (q^2-1)(q^4-1) for Sp4;  q^3 (q^3+1)(q^2-1) for SU3 in terms of q~
    assert groups.make_sp4(2).order == 720
    assert groups.make_sp4(3).order == 51840
    assert groups.make_su3(2, 2).order == 216     # q~ = 2
    assert groups.make_su3(3, 2).order == 6048    # q~ = 3: 27*28*8
    assert groups.make_cyclic(12).order == 12


def test_group_axioms_on_samples():
    for ctx in (groups.make_sl(2, 7), groups.make_sp4(3), groups.make_su3(2, 2)):
        rng = np.random.default_rng(1)
        e = groups.identity(ctx)
        for _ in range(25):
            g, h = groups.random_pair(ctx, rng)
            assert groups.mul(g, groups.inv(g)) == e
            assert groups.mul(e, g) == g
            k = groups.random_uniform(ctx, rng)
            assert groups.mul(groups.mul(g, h), k) == groups.mul(g, groups.mul(h, k))


def test_membership_rejects_wrong_determinant():
    ctx = groups.make_sl(2, 5)
    assert groups.is_member(ctx, (1, 0, 0, 1))
    assert not groups.is_member(ctx, (2, 0, 0, 1))  # det 2
    with pytest.raises(NotInGroupError):
        groups.require_member(ctx, (2, 0, 0, 1))


def test_canonical_index_roundtrip_sl2():
    ctx = groups.make_sl(2, 5)
    seen = set()
    for i in range(ctx.order):
        g = groups.element_at(ctx, i)
        assert groups.canonical_index(g) == i
        seen.add(g.codes)
    assert len(seen) == ctx.order


def test_canonical_index_roundtrip_other_families():
    for ctx in (groups.make_sp4(2), groups.make_su3(2, 2), groups.make_sl(3, 2)):
        idx = np.arange(ctx.order)
        mats = groups.mats_of_index(ctx, idx)
        back = groups.index_of_mats(ctx, mats)
        assert (back == idx).all()


def test_matmul_codes_three_routes_agree():
    # prime modular route vs table-gather route vs scalar FieldElem route
    rng = np.random.default_rng(2)
    for p, k in [(7, 1), (3, 2)]:
        ctx = groups.make_sl(2, p, k)
        f = ctx.field
        A = groups.all_mats(ctx)[rng.integers(0, ctx.order, size=8)]
        B = groups.all_mats(ctx)[rng.integers(0, ctx.order, size=8)]
        got = groups.matmul_codes(f, A, B)
        for t in range(8):
            ga = groups.element_at(ctx, int(groups.index_of_mats(ctx, A[t][None])[0]))
            gb = groups.element_at(ctx, int(groups.index_of_mats(ctx, B[t][None])[0]))
            want = groups.mul(ga, gb)
            assert tuple(int(x) for x in got[t].reshape(-1)) == tuple(want.codes)


def test_mul_perm_and_lmul_perm():
    for ctx in (groups.make_sl(2, 5), groups.make_cyclic(9)):
        rng = np.random.default_rng(4)
        s = groups.random_uniform(ctx, rng)
        right = groups.mul_perm(ctx, s)
        left = groups.lmul_perm(ctx, s)
        assert sorted(right.tolist()) == list(range(ctx.order))  # a bijection
        for i in [0, 1, ctx.order // 2, ctx.order - 1]:
            x = groups.element_at(ctx, i)
            assert right[i] == groups.canonical_index(groups.mul(x, s))
            assert left[i] == groups.canonical_index(groups.mul(s, x))


def test_generate_subgroup_whole_group_and_proper():
    ctx = groups.make_sl(2, 3)
    # standard transvection pair generates everything
    a = groups.from_int_matrix(ctx, [[1, 1], [0, 1]])
    b = groups.from_int_matrix(ctx, [[1, 0], [1, 1]])
    assert len(groups.generate_subgroup(ctx, [a, b])) == 24
    # a single element only generates its cyclic subgroup
    sub = groups.generate_subgroup(ctx, [a])
    assert len(sub) == 3
    # Lagrange on a handful of random subgroups
    rng = np.random.default_rng(6)
    for _ in range(5):
        g = groups.random_uniform(ctx, rng)
        assert 24 % len(groups.generate_subgroup(ctx, [g])) == 0


def test_char_poly_and_unipotent():
    ctx = groups.make_sl(2, 7)
    u = groups.from_int_matrix(ctx, [[1, 3], [0, 1]])
    assert groups.unipotent_test(u)
    assert not groups.unipotent_test(groups.from_int_matrix(ctx, [[2, 0], [0, 4]]))
    # char poly of diag(2,4) over F7 is x^2 - 6x + 1, i.e. (c1, c2) = (1, 1)
    coeffs = groups.char_poly_coeffs(groups.from_int_matrix(ctx, [[2, 0], [0, 4]]))
    f = ctx.field
    assert coeffs == (f.from_int(-6), f.from_int(1))


def test_random_uniform_is_uniform_chi2():
    # chi-squared against the flat distribution; df = |G|-1 = 23,
    # 99.9% quantile is ~49.7, so 60 is a loose bound
    ctx = groups.make_sl(2, 3)
    rng = np.random.default_rng(123)
    n_draw = 24 * 400
    counts = np.zeros(24)
    for _ in range(n_draw):
        counts[groups.canonical_index(groups.random_uniform(ctx, rng))] += 1
    expected = n_draw / 24
    chi2 = float(((counts - expected) ** 2 / expected).sum())
    assert chi2 < 60, chi2


def test_enumeration_cap():
    ctx = groups.make_sl(2, 1009)  # order ~ 10^9
    with pytest.raises(NotEnumerableError):
        groups.all_mats(ctx)


def test_cyclic_family_basics():
    ctx = groups.make_cyclic(6)
    g = groups.element_at(ctx, 2)
    h = groups.element_at(ctx, 5)
    assert groups.mul(g, h).codes[0] == 1
    assert groups.inv(g).codes[0] == 4
    assert groups.order_of(ctx) == 6


def test_su3_elements_satisfy_unitary_relation():
    ctx = groups.make_su3(2, 2)
    rng = np.random.default_rng(8)
    for _ in range(10):
        g = groups.random_uniform(ctx, rng)
        assert groups.is_member(ctx, g)
