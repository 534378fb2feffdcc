"""Averaging-operator spectra checked against dense eigensolves and closed forms."""

import json
import math

import numpy as np
import pytest

from cayleylab import groups, spectral, walk
from cayleylab.errors import EmptySetError


def meanzero_spectrum(ctx, gens):
    """Exact spectrum of T on the mean-zero subspace, via a dense eigensolve.

    Only sensible for small groups; the operator matrix is assembled column
    by column from apply_T and then compressed onto an orthonormal basis of
    the complement of the constants.
    """
    n = ctx.order
    mu = walk.generator_measure(ctx, gens)
    M = np.empty((n, n))
    e = np.zeros(n)
    for i in range(n):
        e[:] = 0.0
        e[i] = 1.0
        M[:, i] = spectral.apply_T(mu, e)
    assert np.allclose(M, M.T)  # symmetric measure -> self-adjoint operator
    rng = np.random.default_rng(0)
    basis = np.column_stack([np.ones(n), rng.standard_normal((n, n - 1))])
    q, _ = np.linalg.qr(basis)
    return np.linalg.eigvalsh(q[:, 1:].T @ M @ q[:, 1:])


def cycle_spectrum(n):
    return np.array([math.cos(2 * math.pi * k / n) for k in range(1, n)])


def test_default_max_iter():
    assert spectral.default_max_iter(100) == 1100
    assert spectral.default_max_iter(10**12) == spectral.MAX_ITER_CAP


@pytest.mark.parametrize("n", [5, 7, 12])
def test_cycle_closed_form(n):
    ctx = groups.make_cyclic(n)
    gens = [groups.element_at(ctx, 1)]
    rep = spectral.spectral_norm_meanzero(
        ctx, gens, tol=1e-10, max_iter=60_000
    )
    spec = cycle_spectrum(n)
    assert abs(rep.lambda_abs - np.abs(spec).max()) < 1e-6
    assert abs(rep.lambda_signed_max - spec.max()) < 1e-6
    assert abs(rep.lambda_signed_min - spec.min()) < 1e-6
    if n % 2 == 0:
        assert abs(rep.lambda_signed_min + 1.0) < 1e-6


def test_cycle_matches_dense_oracle():
    ctx = groups.make_cyclic(9)
    gens = [groups.element_at(ctx, 1)]
    spec = meanzero_spectrum(ctx, gens)
    assert np.allclose(np.sort(spec), np.sort(cycle_spectrum(9)), atol=1e-12)


def test_power_iteration_matches_dense_oracle():
    ctx = groups.make_sl(2, 3)
    gens = [
        groups.from_int_matrix(ctx, [[1, 1], [0, 1]]),
        groups.from_int_matrix(ctx, [[1, 0], [1, 1]]),
    ]
    spec = meanzero_spectrum(ctx, gens)
    rep = spectral.spectral_norm_meanzero(
        ctx, gens, tol=1e-10, max_iter=60_000
    )
    assert abs(rep.lambda_abs - np.abs(spec).max()) < 1e-6
    assert abs(rep.lambda_signed_max - spec.max()) < 1e-6
    assert abs(rep.lambda_signed_min - spec.min()) < 1e-6
    assert rep.converged


def test_report_shape():
    ctx = groups.make_cyclic(5)
    rep = spectral.spectral_norm_meanzero(
        ctx, [groups.element_at(ctx, 1)], tol=1e-9, max_iter=20_000, rng=7
    )
    assert rep.epsilon == 1.0 - rep.lambda_abs
    assert rep.family == "Cyclic" and rep.order == 5
    assert rep.seed == 7
    assert rep.iterations > 0
    d = json.loads(rep.to_json())
    assert d == rep.as_dict()
    for key in ("lambda_abs", "epsilon", "residual", "converged", "tol"):
        assert key in d


def test_unconverged_is_reported_not_raised():
    ctx = groups.make_cyclic(12)
    rep = spectral.spectral_norm_meanzero(
        ctx, [groups.element_at(ctx, 1)], tol=1e-14, max_iter=2
    )
    assert not rep.converged
    assert rep.residual > 0


def test_bipartite_even_cycle():
    ctx = groups.make_cyclic(6)
    v = spectral.bipartite_detect(ctx, [groups.element_at(ctx, 1)])
    assert bool(v)
    assert v.witness == [0, 2, 4]


def test_bipartite_odd_cycle():
    ctx = groups.make_cyclic(5)
    v = spectral.bipartite_detect(ctx, [groups.element_at(ctx, 1)])
    assert not v
    assert v.witness is None


def test_bipartite_even_generator_kills_parity():
    ctx = groups.make_cyclic(6)
    gens = [groups.element_at(ctx, 1), groups.element_at(ctx, 2)]
    assert not spectral.bipartite_detect(ctx, gens)


def test_bipartite_perfect_shortcut():
    ctx = groups.make_sl(2, 7)
    rng = np.random.default_rng(0)
    gens = list(groups.random_pair(ctx, rng))
    v = spectral.bipartite_detect(ctx, gens)
    assert not v
    assert "perfect" in v.justification


def test_bipartite_closure_path_rejects():
    # q = 3 falls through the perfect-group shortcut; the transvection has
    # odd order, so it is itself an even word and the graph has odd cycles
    ctx = groups.make_sl(2, 3)
    a = groups.from_int_matrix(ctx, [[1, 1], [0, 1]])
    b = groups.from_int_matrix(ctx, [[1, 0], [1, 1]])
    v = spectral.bipartite_detect(ctx, [a, b])
    assert not v
    assert "even word" in v.justification


def test_bipartite_closure_path_accepts():
    # an order-2 generator over F_2 generates a two-element group whose
    # even-word subgroup is trivial -> bipartite with the identity as part
    ctx = groups.make_sl(2, 2)
    g = groups.from_int_matrix(ctx, [[0, 1], [1, 0]])
    v = spectral.bipartite_detect(ctx, [g])
    assert bool(v)
    assert v.witness == [groups.canonical_index(groups.identity(ctx))]


def test_bipartite_empty_generators():
    ctx = groups.make_cyclic(6)
    with pytest.raises(EmptySetError):
        spectral.bipartite_detect(ctx, [])


def test_bnp_holds_for_random_measures():
    ctx = groups.make_sl(2, 7)
    rng = np.random.default_rng(3)
    for _ in range(20):
        w1 = rng.random(ctx.order)
        w2 = rng.random(ctx.order)
        nu1 = walk.Measure(ctx, w1 * ctx.order / w1.sum())
        nu2 = walk.Measure(ctx, w2 * ctx.order / w2.sum())
        out = spectral.bnp_check(nu1, nu2, 3)
        assert out["holds"]
        assert out["lhs"] <= out["rhs"] + 1e-9


def test_bnp_fake_dimension_bound_is_refuted():
    # uniform measure on the even residues of Cyclic(6) is idempotent under
    # convolution, which defeats any claimed flattening with d_min > 1
    ctx = groups.make_cyclic(6)
    nu = walk.Measure.from_probs(ctx, {groups.element_at(ctx, i): 1 / 3
                                       for i in (0, 2, 4)})
    bad = spectral.bnp_check(nu, nu, 2)
    assert not bad["holds"]
    assert abs(bad["lhs"] - 1.0) < 1e-12
    assert abs(bad["rhs"] - 1.0 / math.sqrt(2)) < 1e-12
    # d_min = 1 is always legitimate and must not be flagged
    assert spectral.bnp_check(nu, nu, 1)["holds"]


def test_bnp_validates_dmin():
    ctx = groups.make_cyclic(6)
    nu = walk.Measure.uniform(ctx)
    with pytest.raises(ValueError):
        spectral.bnp_check(nu, nu, 0)


def test_boundary_ratio_cycle_interval():
    ctx = groups.make_cyclic(12)
    gens = [groups.element_at(ctx, 1)]
    A = [groups.element_at(ctx, i) for i in range(6)]
    assert spectral.boundary_ratio(ctx, gens, A) == pytest.approx(2 / 6)
    whole = [groups.element_at(ctx, i) for i in range(12)]
    assert spectral.boundary_ratio(ctx, gens, whole) == 0.0
    with pytest.raises(EmptySetError):
        spectral.boundary_ratio(ctx, gens, [])


def test_boundary_ratio_accepts_indices():
    ctx = groups.make_cyclic(12)
    gens = [groups.element_at(ctx, 1)]
    assert spectral.boundary_ratio(ctx, gens, range(6)) == pytest.approx(2 / 6)


def test_write_sweep_csv(tmp_path):
    rows = [
        {"p": 61, "seed": 0, "lambda_abs": 0.9, "epsilon": 0.1,
         "iterations": 12, "extra": "dropped"},
        {"p": 101, "seed": 1, "lambda_abs": 0.8, "epsilon": 0.2,
         "iterations": 9},
    ]
    path = tmp_path / "sweep.csv"
    spectral.write_sweep_csv(rows, path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "p,seed,lambda_abs,epsilon,iterations"
    assert len(lines) == 3
    assert lines[1].startswith("61,0,0.9")
