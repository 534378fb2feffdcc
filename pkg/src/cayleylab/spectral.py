"""Averaging operator of a symmetric generator measure and its spectral gap.

T acts on functions f: G -> R by (Tf)(x) = sum_s prob(s) f(x s^{-1}); it is
self-adjoint for symmetric measures and fixes constants, so the expansion
quantity is the spectral norm of T restricted to mean-zero functions:
lambda_abs = max |spec(T|_{mean zero})|, epsilon = 1 - lambda_abs.

Estimation is matrix-free power iteration with an explicit mean-zero
re-projection every step (guards against drift back into the constant
eigenvector).  Signed extremes come from the nonnegative shifts (T + I)/2
and (I - T)/2, whose top eigenvalues are (1 + lambda_max)/2 and
(1 - lambda_min)/2 -- power iteration on a PSD operator cannot lock onto a
sign-flipping eigenvalue.  Failure to converge within max_iter is reported
in the SpectralReport (converged=False), never raised.
"""

import csv
import json
import math
from dataclasses import dataclass

import numpy as np

from . import groups, walk
from .errors import EmptySetError

MAX_ITER_CAP = 100_000


def default_max_iter(order):
    return min(int(10 * math.sqrt(order) + 1000), MAX_ITER_CAP)


def _t_perms(mu):
    """Cache the gather permutations and weights realizing T on measure mu."""
    op = getattr(mu, "_t_op", None)
    if op is None:
        op = walk._StepOp(mu.ctx, mu)
        mu._t_op = op
    return op


def apply_T(mu, f):
    """(Tf)(x) = sum_s prob(s) f(x s^{-1}); fixes constant vectors."""
    f = np.ascontiguousarray(f, dtype=np.float64)
    if f.shape != (mu.ctx.order,):
        raise ValueError("vector must be indexed by canonical_index")
    return _t_perms(mu).apply(f)


def _project_meanzero(v):
    return v - v.mean()


def _power_iteration(applied, n, v0, tol, max_iter):
    """Top eigenvalue of a PSD operator on the mean-zero subspace.

    Returns (theta, residual, iterations, converged, v); residual is
    ||Av - theta v||_2 for the unit vector v.
    """
    v = _project_meanzero(v0.astype(np.float64))
    nv = np.linalg.norm(v)
    if nv == 0:  # mean-zero space is trivial (|G| = 1)
        return 0.0, 0.0, 0, True, v
    v /= nv
    theta, resid = 0.0, math.inf
    it = 0
    for it in range(1, max_iter + 1):
        w = _project_meanzero(applied(v))
        theta = float(np.dot(v, w))
        resid = float(np.linalg.norm(w - theta * v))
        if resid <= tol * max(1.0, abs(theta)):
            return theta, resid, it, True, v
        nw = np.linalg.norm(w)
        if nw == 0:
            return theta, resid, it, True, v
        v = w / nw
    return theta, resid, it, False, v


@dataclass
class SpectralReport:
    family: str
    order: int
    lambda_abs: float
    lambda_signed_max: float
    lambda_signed_min: float
    epsilon: float
    iterations: int
    residual: float
    seed: int | None
    converged: bool
    tol: float

    def as_dict(self):
        return dict(self.__dict__)

    def to_json(self, path=None):
        text = json.dumps(self.as_dict(), indent=2, sort_keys=True)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text + "\n")
        return text


def spectral_norm_meanzero(
    ctx, gens, tol=1e-8, max_iter=None, rng=None, restarts=3
):
    """Estimate ||T||_{mean zero} by restarted shifted power iteration."""
    if max_iter is None:
        max_iter = default_max_iter(ctx.order)
    seed = None
    if rng is None or isinstance(rng, (int, np.integer)):
        seed = 0 if rng is None else int(rng)
        rng = np.random.default_rng(seed)
    mu = walk.generator_measure(ctx, gens)
    n = ctx.order

    def plus(v):  # (T + I)/2
        return 0.5 * (apply_T(mu, v) + v)

    def minus(v):  # (I - T)/2
        return 0.5 * (v - apply_T(mu, v))

    total_it = 0
    best = {}
    for name, op in (("max", plus), ("min", minus)):
        top, top_res, top_conv = -math.inf, math.inf, False
        for _ in range(max(1, restarts)):
            v0 = rng.standard_normal(n)
            theta, resid, it, conv, _ = _power_iteration(
                op, n, v0, tol / 2, max_iter
            )
            total_it += it
            if theta > top:
                top, top_res, top_conv = theta, resid, conv
        best[name] = (top, 2 * top_res, top_conv)  # residual back on T scale
    lam_max = 2 * best["max"][0] - 1 if best["max"][0] > -math.inf else 0.0
    lam_min = 1 - 2 * best["min"][0] if best["min"][0] > -math.inf else 0.0
    lam_abs = max(abs(lam_max), abs(lam_min))
    report = SpectralReport(
        family=ctx.family,
        order=ctx.order,
        lambda_abs=lam_abs,
        lambda_signed_max=lam_max,
        lambda_signed_min=lam_min,
        epsilon=1.0 - lam_abs,
        iterations=total_it,
        residual=max(best["max"][1], best["min"][1]),
        seed=seed,
        converged=best["max"][2] and best["min"][2],
        tol=tol,
    )
    assert -1e-9 <= report.lambda_abs <= 1 + 1e-9
    return report


@dataclass
class BipartiteVerdict:
    bipartite: bool
    witness: list | None  # canonical indices of the index-2 subgroup
    justification: str

    def __bool__(self):
        return self.bipartite


def bipartite_detect(ctx, gens):
    """Look for an index-2 subgroup of <S> disjoint from S = gens u gens^{-1}.

    Such a subgroup exists iff the Cayley graph is bipartite.  Shortcuts:
    Cyclic(2m) has exactly one index-2 subgroup (the even residues), and the
    matrix families over q > 3 are perfect, hence have none.  Otherwise the
    even-word subgroup E = <s t : s, t in S> is computed by closure; the
    graph is bipartite iff no generator lies in E (then [<S> : E] = 2 and E
    is the witness).
    """
    gens = list(gens)
    if not gens:
        raise EmptySetError("generator list is empty")
    if ctx.family == "Cyclic":
        if ctx.n % 2 == 0 and all(g.codes[0] % 2 == 1 for g in gens):
            return BipartiteVerdict(
                True,
                list(range(0, ctx.n, 2)),
                "all generators odd; parity kernel is disjoint",
            )
        return BipartiteVerdict(
            False, None, "no index-2 subgroup avoids the generators"
        )
    size = ctx.qt if ctx.family == "SU3" else (
        ctx.field.q if ctx.family in ("SL", "Sp4") else 0
    )
    if size > 3:
        # covers every non-perfect member of these families (SL_2(2), SL_2(3),
        # Sp_4(2), SU_3(2) all live at size <= 3 and take the closure path)
        return BipartiteVerdict(
            False, None, "perfect group has no index-2 subgroup"
        )
    # small-q matrix families: explicit even-word closure
    sym = []
    seen = set()
    for g in gens:
        for h in (g, groups.inv(g)):
            i = groups.canonical_index(h)
            if i not in seen:
                seen.add(i)
                sym.append(h)
    pair_products = [groups.mul(s, t) for s in sym for t in sym]
    even = [int(i) for i in groups.generate_subgroup(ctx, pair_products)]
    even_set = set(even)
    if any(groups.canonical_index(s) in even_set for s in sym):
        return BipartiteVerdict(
            False, None, "a generator is an even word (odd cycle exists)"
        )
    full = groups.generate_subgroup(ctx, sym)
    assert len(full) == 2 * len(even)
    return BipartiteVerdict(
        True, sorted(even), "even-word subgroup has index 2 and avoids S"
    )


def bnp_check(nu1, nu2, d_min):
    """Flattening inequality check.

    lhs = ||nu1 * nu2 - 1||_2, rhs = sqrt(1/d_min) ||nu1 - 1||_2 ||nu2 - 1||_2;
    holds iff lhs <= rhs + 1e-9.  d_min must be a true lower bound on the
    dimension of nontrivial representations for the inequality to be valid --
    feeding a fake bound (e.g. d_min = 2 on an abelian group) can and should
    produce violations.
    """
    if d_min < 1:
        raise ValueError("d_min must be >= 1")
    conv = walk.convolve(nu1, nu2)
    n = nu1.ctx.order
    lhs = float(np.linalg.norm(conv.dense_weights() - 1.0) / math.sqrt(n))
    n1 = float(np.linalg.norm(nu1.dense_weights() - 1.0) / math.sqrt(n))
    n2 = float(np.linalg.norm(nu2.dense_weights() - 1.0) / math.sqrt(n))
    rhs = math.sqrt(1.0 / d_min) * n1 * n2
    return {"holds": lhs <= rhs + 1e-9, "lhs": lhs, "rhs": rhs}


def boundary_ratio(ctx, gens, A):
    """|A.S \\ A| / |A| for the symmetric translate set S = gens u gens^{-1}."""
    idx = set()
    for a in A:
        idx.add(_coerce_index(ctx, a))
    if not idx:
        raise EmptySetError("A must be nonempty")
    arr = np.fromiter(idx, dtype=np.int64)
    out = set()
    seen = set()
    for g in gens:
        for h in (g, groups.inv(g)):
            i = groups.canonical_index(h)
            if i in seen:
                continue
            seen.add(i)
            perm = groups.mul_perm(ctx, h)
            out.update(int(x) for x in perm[arr])
    return len(out - idx) / len(idx)


def _coerce_index(ctx, a):
    if isinstance(a, groups.GroupElem):
        return groups.canonical_index(a)
    return int(a)


def write_sweep_csv(rows, path):
    """rows: dicts with keys p, seed, lambda_abs, epsilon, iterations."""
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(
            fh, fieldnames=["p", "seed", "lambda_abs", "epsilon", "iterations"]
        )
        w.writeheader()
        for r in rows:
            w.writerow({k: r[k] for k in w.fieldnames})
