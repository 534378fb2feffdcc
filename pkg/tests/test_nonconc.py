"""Trap estimators: planted structure must light up, generic pairs must not."""

import numpy as np
import pytest

from cayleylab import groups, nonconc
from cayleylab.errors import DegreeTooLargeError, NoProperSubfieldError


def transvections(ctx):
    return (
        groups.from_int_matrix(ctx, [[1, 1], [0, 1]]),
        groups.from_int_matrix(ctx, [[1, 0], [1, 1]]),
    )


def borel_pair(ctx):
    # both upper triangular: every word stays in the Borel subgroup
    return (
        groups.from_int_matrix(ctx, [[1, 1], [0, 1]]),
        groups.from_int_matrix(ctx, [[3, 0], [0, 5]]),
    )


def test_planted_subfield_trap():
    # integer-entry generators over F_25 never leave the F_5 points
    ctx = groups.make_sl(2, 5, 2)
    a, b = transvections(ctx)
    rep = nonconc.trap_subfield(a, b, 30, 4000, 2, np.random.default_rng(0))
    # every word lands in the subfield points; the unipotent-trace slice
    # (25 of the 120 subgroup elements at equilibrium) is tallied separately
    assert rep.trapped_fraction + rep.degenerate_fraction == 1.0
    assert rep.trapped_fraction >= 0.7
    assert not rep.verdict
    assert rep.family == "Subfield(2)"


def test_random_pair_subfield_is_quiet():
    ctx = groups.make_sl(2, 5, 2)
    rng = np.random.default_rng(4)
    a, b = groups.random_pair(ctx, rng)
    rep = nonconc.trap_subfield(a, b, 30, 4000, 2, rng)
    # stays well under the |G|^{-gamma} threshold (~0.62 here)
    assert rep.verdict
    assert rep.trapped_fraction < 0.3


def test_subfield_estimator_is_unbiased():
    ctx = groups.make_sl(2, 2, 2)
    a, b = groups.random_pair(ctx, np.random.default_rng(7))
    n = 6
    exact = nonconc.exhaustive_trap_fraction(
        a, b, n, nonconc.subfield_predicate(ctx, 2)
    )
    rep = nonconc.trap_subfield(a, b, n, 20_000, 2, np.random.default_rng(1))
    assert abs(rep.trapped_fraction - exact) < 4 * max(rep.stderr, 1e-3)


def test_subfield_requires_proper_subfield():
    ctx = groups.make_sl(2, 7)
    a, b = transvections(ctx)
    with pytest.raises(NoProperSubfieldError):
        nonconc.trap_subfield(a, b, 10, 100, 2, np.random.default_rng(0))
    ext = groups.make_sl(2, 5, 2)
    a2, b2 = transvections(ext)
    with pytest.raises(NoProperSubfieldError):
        nonconc.trap_subfield(a2, b2, 10, 100, 3, np.random.default_rng(0))


def test_structural_discards_commuting_words():
    # at n = 1 exactly half of all word pairs use the same generator letter
    # class and reduce to a trivial commutator
    ctx = groups.make_sl(2, 7)
    a, b = transvections(ctx)
    total = 4000
    rep = nonconc.trap_structural_sl2(a, b, 1, total, np.random.default_rng(2))
    assert 0.45 < rep.samples / total < 0.55


def test_structural_planted_borel():
    ctx = groups.make_sl(2, 7)
    a, b = borel_pair(ctx)
    rep = nonconc.trap_structural_sl2(a, b, 12, 2000, np.random.default_rng(3))
    # commutators of upper-triangular words are unipotent: trace locked at 2
    assert rep.trapped_fraction == 1.0
    assert not rep.verdict


def test_structural_random_pair_is_quiet():
    ctx = groups.make_sl(2, 101)
    rng = np.random.default_rng(5)
    a, b = groups.random_pair(ctx, rng)
    rep = nonconc.trap_structural_sl2(a, b, 20, 3000, rng)
    assert rep.trapped_fraction <= 0.1
    assert rep.verdict


def test_product_diag_planted_and_random():
    ctx = groups.make_sl(2, 101)
    rng = np.random.default_rng(6)
    a, b = groups.random_pair(ctx, rng)
    planted = nonconc.product_diag_trap(a, b, a, b, 16, 2000, rng)
    assert planted.trapped_fraction == 1.0  # identical slots always collide
    assert not planted.verdict
    c, d = groups.random_pair(ctx, rng)
    rep = nonconc.product_diag_trap(a, b, c, d, 16, 2000, rng)
    assert rep.trapped_fraction < 0.1
    assert rep.verdict
    # threshold is computed against the product group's order
    assert rep.threshold == pytest.approx(ctx.order ** (-2 * rep.gamma))


def test_xn_identity_is_proper_trap():
    ctx = groups.make_sl(2, 7)
    e = groups.identity(ctx)
    rep = nonconc.xn_certificate(e, e, D=2)
    assert rep.verdict == "ProperTrap"
    assert rep.dim_ball == 1
    assert rep.dim_ball < rep.dim_ref


def test_xn_planted_borel_is_proper_trap():
    ctx = groups.make_sl(2, 7)
    a, b = borel_pair(ctx)
    rep = nonconc.xn_certificate(a, b, D=2)
    assert rep.verdict == "ProperTrap"
    assert rep.dim_ball < rep.dim_ref


def test_xn_generating_pair_spans_full():
    ctx = groups.make_sl(2, 7)
    a, b = transvections(ctx)
    rep = nonconc.xn_certificate(a, b, D=2)
    assert rep.verdict == "SpansFull"
    assert rep.dim_ball == rep.dim_ref
    assert rep.stabilized_at >= 1


def test_xn_dimension_is_conjugation_invariant():
    ctx = groups.make_sl(2, 7)
    a, b = borel_pair(ctx)
    g = groups.random_uniform(ctx, np.random.default_rng(8))
    conj = lambda h: groups.mul(groups.mul(g, h), groups.inv(g))
    base = nonconc.xn_certificate(a, b, D=2)
    moved = nonconc.xn_certificate(conj(a), conj(b), D=2)
    assert moved.dim_ball == base.dim_ball
    assert moved.dim_ref == base.dim_ref


def test_xn_degree_cap():
    ctx = groups.make_sl(2, 7)
    a, b = transvections(ctx)
    with pytest.raises(DegreeTooLargeError):
        nonconc.xn_certificate(a, b, D=nonconc.XN_DEGREE_CAP + 1)


def test_exhaustive_cap():
    ctx = groups.make_sl(2, 7)
    a, b = transvections(ctx)
    with pytest.raises(DegreeTooLargeError):
        nonconc.exhaustive_trap_fraction(a, b, 11, lambda g: True)


def test_verdict_bundle_prime_field():
    ctx = groups.make_sl(2, 7)
    a, b = transvections(ctx)
    reports = nonconc.nonconc_verdict(
        a, b, n=12, samples=1500, rng=np.random.default_rng(9)
    )
    fams = [r.family for r in reports]
    assert "StructuralSL2" in fams and "XNCert" in fams
    assert not any(f.startswith("Subfield") for f in fams)
    assert all(r.verdict for r in reports)


def test_verdict_bundle_flags_planted_extension():
    ctx = groups.make_sl(2, 5, 2)
    a, b = transvections(ctx)
    reports = nonconc.nonconc_verdict(
        a, b, n=20, samples=1500, rng=np.random.default_rng(10)
    )
    sub = [r for r in reports if r.family == "Subfield(2)"]
    assert len(sub) == 1 and not sub[0].verdict


def test_write_trap_csv(tmp_path):
    ctx = groups.make_sl(2, 7)
    a, b = transvections(ctx)
    rep = nonconc.trap_structural_sl2(a, b, 6, 500, np.random.default_rng(0))
    path = tmp_path / "traps.csv"
    nonconc.write_trap_csv([rep, rep], path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "family,n,samples,fraction,stderr,threshold,verdict"
    assert len(lines) == 3
    assert lines[1].startswith("StructuralSL2,6,")
