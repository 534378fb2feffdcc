"""Random-walk measures on a finite group: convolution, norms, phase tracing.

Weights follow the normalized counting-measure convention: the stored value
at g is |G| times the probability of g, so the uniform measure is the
constant function 1 and a Dirac mass is the function that equals |G| at a
single point.  All L^p norms are taken against the normalized counting
measure, which makes ``lp_norm(uniform, p) == 1`` for every p and turns
Young's inequality into "convolving with a probability measure never
increases the L2 norm" -- the trajectory monotonicity asserted below.

Storage is hybrid: a sparse dict while the support is small (at most |G|/8),
a dense float vector afterwards.  An exact-rational mode (Fraction weights,
always dict-backed) is available for groups of order <= 10**4 and backs the
oracle tests.
"""

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _kernels as kernels
from . import groups
from .errors import (
    ContextMismatchError,
    EmptyGeneratorsError,
    TooLargeError,
    UnsupportedError,
)

# Support fraction beyond which a float measure is stored densely.
DENSE_FRACTION = 8
# Exact-rational mode is only offered below this group order.
EXACT_CAP = 10_000
# Dense*dense convolution builds one index permutation per support point;
# outside Cyclic (where permutations are free) cap the group order.
DENSE_PAIR_CAP = 4096
# Mass-conservation tolerance for float weights.
MASS_TOL = 1e-12


def _as_index(ctx, g):
    if isinstance(g, groups.GroupElem):
        if g.ctx is not ctx:
            raise ContextMismatchError("element from a different group context")
        return groups.canonical_index(g)
    return int(g)


class Measure:
    """Probability measure on a finite group, uniform == 1 normalization."""

    def __init__(self, ctx, weights, exact=False):
        self.ctx = ctx
        self.exact = bool(exact)
        if self.exact:
            if ctx.order > EXACT_CAP:
                raise TooLargeError(
                    f"exact mode capped at |G| <= {EXACT_CAP}, got {ctx.order}"
                )
            w = {int(i): Fraction(v) for i, v in dict(weights).items() if v}
            self._w = w
            self._dense = None
            total = sum(w.values(), Fraction(0))
            assert total == ctx.order, "exact measure mass must be exactly 1"
        else:
            if isinstance(weights, dict):
                vec = None
                w = {int(i): float(v) for i, v in weights.items() if v}
            else:
                vec = np.ascontiguousarray(weights, dtype=np.float64)
                if vec.shape != (ctx.order,):
                    raise ValueError("dense weight vector must have length |G|")
                w = None
            if vec is None and len(w) * DENSE_FRACTION > ctx.order:
                vec = np.zeros(ctx.order, dtype=np.float64)
                for i, v in w.items():
                    vec[i] = v
                w = None
            elif vec is not None:
                nz = np.flatnonzero(vec)
                if nz.size * DENSE_FRACTION <= ctx.order:
                    w = {int(i): float(vec[i]) for i in nz}
                    vec = None
            self._w = w
            self._dense = vec
            total = (
                float(vec.sum()) if vec is not None else math.fsum(w.values())
            )
            assert abs(total / ctx.order - 1.0) <= MASS_TOL, (
                f"measure mass {total / ctx.order} drifted from 1"
            )

    # -- constructors ------------------------------------------------------

    @classmethod
    def dirac(cls, ctx, g=None, exact=False):
        i = 0 if g is None else _as_index(ctx, g)
        if g is None:
            i = groups.canonical_index(groups.identity(ctx))
        one = Fraction(ctx.order) if exact else float(ctx.order)
        return cls(ctx, {i: one}, exact=exact)

    @classmethod
    def uniform(cls, ctx, exact=False):
        if exact:
            return cls(ctx, {i: Fraction(1) for i in range(ctx.order)}, exact=True)
        return cls(ctx, np.ones(ctx.order, dtype=np.float64))

    @classmethod
    def from_probs(cls, ctx, probs, exact=False):
        """Build from {index or element: probability}."""
        n = ctx.order
        if exact:
            w = {_as_index(ctx, g): Fraction(p) * n for g, p in probs.items()}
        else:
            w = {_as_index(ctx, g): float(p) * n for g, p in probs.items()}
        return cls(ctx, w, exact=exact)

    # -- storage views -----------------------------------------------------

    @property
    def is_dense(self):
        return self._dense is not None

    @property
    def support_size(self):
        if self._dense is not None:
            return int(np.count_nonzero(self._dense))
        return len(self._w)

    def support(self):
        """Sorted canonical indices carrying nonzero weight."""
        if self._dense is not None:
            return [int(i) for i in np.flatnonzero(self._dense)]
        return sorted(self._w)

    def weight(self, g):
        """Normalized value at g (|G| times the probability)."""
        i = _as_index(self.ctx, g)
        if self._dense is not None:
            return float(self._dense[i])
        zero = Fraction(0) if self.exact else 0.0
        return self._w.get(i, zero)

    def prob(self, g):
        w = self.weight(g)
        if self.exact:
            return w / self.ctx.order
        return w / self.ctx.order

    def dense_weights(self):
        """Full length-|G| float vector of normalized values."""
        if self._dense is not None:
            return self._dense.copy()
        vec = np.zeros(self.ctx.order, dtype=np.float64)
        for i, v in self._w.items():
            vec[i] = float(v)
        return vec

    def items(self):
        """(index, normalized weight) pairs over the support."""
        if self._dense is not None:
            return [(int(i), float(self._dense[i])) for i in np.flatnonzero(self._dense)]
        return sorted(self._w.items())

    def total_mass(self):
        if self._dense is not None:
            return float(self._dense.sum()) / self.ctx.order
        if self.exact:
            return sum(self._w.values(), Fraction(0)) / self.ctx.order
        return math.fsum(self._w.values()) / self.ctx.order

    def is_symmetric(self, tol=1e-12):
        """weight(g) == weight(g^{-1}) for every support point."""
        for i, w in self.items():
            j = groups.canonical_index(groups.inv(groups.element_at(self.ctx, i)))
            d = self.weight(j) - w
            if abs(d) > tol:
                return False
        return True

    def __repr__(self):
        kind = "exact" if self.exact else ("dense" if self.is_dense else "sparse")
        return (
            f"Measure({self.ctx.family}, |G|={self.ctx.order}, "
            f"{kind}, support={self.support_size})"
        )


def generator_measure(ctx, gens, exact=False):
    """mu = (1/2k) sum_i (delta_{x_i} + delta_{x_i^{-1}}), multiplicity-aware."""
    gens = list(gens)
    if not gens:
        raise EmptyGeneratorsError("generator list is empty")
    counts = {}
    for g in gens:
        if not isinstance(g, groups.GroupElem) or g.ctx is not ctx:
            raise ContextMismatchError("generators must be elements of ctx")
        i = groups.canonical_index(g)
        j = groups.canonical_index(groups.inv(g))
        counts[i] = counts.get(i, 0) + 1
        counts[j] = counts.get(j, 0) + 1
    twok = 2 * len(gens)
    if exact:
        w = {i: Fraction(ctx.order * c, twok) for i, c in counts.items()}
    else:
        w = {i: ctx.order * c / twok for i, c in counts.items()}
    return Measure(ctx, w, exact=exact)


def _pair_ctx(m1, m2):
    if m1.ctx is not m2.ctx:
        raise ContextMismatchError("measures live on different groups")
    if m1.exact != m2.exact:
        raise UnsupportedError("cannot mix exact and float measures")
    return m1.ctx


def _sparse_pair_convolve(ctx, m1, m2, exact):
    zero = Fraction(0) if exact else 0.0
    out = {}
    e1 = {i: groups.element_at(ctx, i) for i, _ in m1.items()}
    e2 = {i: groups.element_at(ctx, i) for i, _ in m2.items()}
    inv_order = Fraction(1, ctx.order) if exact else 1.0 / ctx.order
    for i1, w1 in m1.items():
        for i2, w2 in m2.items():
            j = groups.canonical_index(groups.mul(e1[i1], e2[i2]))
            out[j] = out.get(j, zero) + w1 * w2 * inv_order
    return Measure(ctx, out, exact=exact)


def convolve(m1, m2):
    """mu1 * mu2 with (mu1*mu2)(g) = E_x mu1(g x^{-1}) mu2(x), exactly.

    Support of the result is contained in support(mu1) . support(mu2); mass
    is conserved (exactly in rational mode, to 1e-12 in float mode -- the
    Measure constructor asserts it).
    """
    ctx = _pair_ctx(m1, m2)
    if m1.exact:
        return _sparse_pair_convolve(ctx, m1, m2, exact=True)
    if not m1.is_dense and not m2.is_dense:
        if m1.support_size * m2.support_size <= 1 << 18:
            return _sparse_pair_convolve(ctx, m1, m2, exact=False)
        m1 = Measure(ctx, m1.dense_weights())  # support too wide for pairs
    if not m1.is_dense and m2.is_dense:
        # (mu1*mu2)(g) = sum_y prob1(y) mu2(y^{-1} g): gather through left
        # multiplication by y^{-1}.
        f2 = m2.dense_weights()
        out = np.zeros(ctx.order, dtype=np.float64)
        for y, w in m1.items():
            yi = groups.inv(groups.element_at(ctx, y))
            out += (w / ctx.order) * f2[groups.lmul_perm(ctx, yi)]
        return Measure(ctx, out)
    f1 = m1.dense_weights() if m1.is_dense else None
    if f1 is None:  # pragma: no cover - unreachable by the branches above
        raise AssertionError
    if not m2.is_dense:
        idx = m2.support()
        perms = np.stack(
            [
                groups.mul_perm(ctx, groups.inv(groups.element_at(ctx, x)))
                for x in idx
            ]
        )
        w = np.array([m2.weight(x) / ctx.order for x in idx])
        return Measure(ctx, kernels.conv_step(f1, perms, w))
    # dense * dense
    if ctx.family != "Cyclic" and ctx.order > DENSE_PAIR_CAP:
        raise TooLargeError(
            f"dense*dense convolution capped at |G| <= {DENSE_PAIR_CAP}"
        )
    f2 = m2.dense_weights()
    out = np.zeros(ctx.order, dtype=np.float64)
    for x in np.flatnonzero(f2):
        xi = groups.inv(groups.element_at(ctx, int(x)))
        out += (f2[x] / ctx.order) * f1[groups.mul_perm(ctx, xi)]
    return Measure(ctx, out)


class _StepOp:
    """Precomputed one-step convolution against a fixed small-support measure."""

    def __init__(self, ctx, mu):
        assert not mu.exact
        items = mu.items()
        assert len(items) <= DENSE_PAIR_CAP, "step operator support too wide"
        self.ctx = ctx
        self.perms = np.stack(
            [
                groups.mul_perm(ctx, groups.inv(groups.element_at(ctx, i)))
                for i, _ in items
            ]
        ).astype(np.intc)
        self.w = np.array([w / ctx.order for _, w in items])

    def apply(self, f):
        return kernels.conv_step(f, self.perms, self.w)


def power(mu, n):
    """mu^{(n)} by iterated single-step convolution; mu^{(0)} = delta_id."""
    if n < 0:
        raise ValueError("n must be >= 0")
    ctx = mu.ctx
    out = Measure.dirac(ctx, exact=mu.exact)
    if n == 0:
        return out
    step = None
    prev_l2 = lp_norm(out, 2)
    small = mu.support_size <= DENSE_PAIR_CAP
    for _ in range(n):
        if step is None and not mu.exact and small and out.is_dense:
            step = _StepOp(ctx, mu)  # built once, reused every dense step
        if step is not None and out.is_dense:
            out = Measure(ctx, step.apply(out.dense_weights()))
        else:
            out = convolve(out, mu)
        cur = lp_norm(out, 2)
        assert cur <= prev_l2 * (1 + 1e-12) + 1e-12, "L2 norm increased"
        prev_l2 = cur
    return out


def lp_norm(mu, p):
    """L^p norm under the normalized counting measure (uniform has norm 1)."""
    n = mu.ctx.order
    if p == 1:
        if mu.exact:
            return float(sum(abs(w) for _, w in mu.items()) / n)
        if mu.is_dense:
            return float(np.abs(mu._dense).sum() / n)
        return math.fsum(abs(w) for _, w in mu.items()) / n
    if p == 2:
        if mu.is_dense:
            return float(math.sqrt(np.dot(mu._dense, mu._dense) / n))
        return math.sqrt(math.fsum(float(w) ** 2 for _, w in mu.items()) / n)
    if p == math.inf or p == "inf":
        if mu.is_dense:
            return float(np.abs(mu._dense).max(initial=0.0))
        return max((abs(float(w)) for _, w in mu.items()), default=0.0)
    raise ValueError("p must be 1, 2 or inf")


def dist_to_uniform_inf(mu):
    """max_g |mu(g) - 1| in the normalized convention."""
    if mu.is_dense:
        return float(np.abs(mu._dense - 1.0).max())
    best = 1.0 if mu.support_size < mu.ctx.order else 0.0
    for _, w in mu.items():
        best = max(best, abs(float(w) - 1.0))
    return best


def subgroup_mass(mu, H):
    """Total probability of {g : H(g)} for a per-element predicate H."""
    ctx = mu.ctx
    total = Fraction(0) if mu.exact else 0.0
    for i, w in mu.items():
        if H(groups.element_at(ctx, i)):
            total += w
    if mu.exact:
        return total / ctx.order
    return total / ctx.order


@dataclass
class PhaseReport:
    """First hitting times of the three mixing thresholds plus the trajectory.

    l2 thresholds: t1 = |G|^{1/2 - kappa/2} (high-entropy entry) and
    t2 = |G|^{kappa/10} (flattening).  The sup-distance threshold uses the
    tenth-power law |G|^{-10} clamped at 1e-14 absolute (float64 cannot
    certify closer agreement with 1), and two surrogates are always logged:
    |G|^{-1} and the fixed 1e-12.
    """

    family: str
    order: int
    kappa: float
    n_max: int
    t1: float
    t2: float
    t3_paper: float
    t3_inv: float
    t3_fixed: float
    n1: int | None = None
    n2: int | None = None
    n3_paper: int | None = None
    n3_inv: int | None = None
    n3_fixed: int | None = None
    trajectory: list = field(default_factory=list)  # (n, l2, linf, support)

    @property
    def unreached(self):
        out = []
        for name, val in [
            ("phase1", self.n1),
            ("phase2", self.n2),
            ("phase3_paper", self.n3_paper),
            ("phase3_inv", self.n3_inv),
            ("phase3_fixed", self.n3_fixed),
        ]:
            if val is None:
                out.append(name)
        return tuple(out)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["n", "l2_norm", "linf_dist", "support_size"])
            for row in self.trajectory:
                w.writerow([row[0], repr(row[1]), repr(row[2]), row[3]])

    def as_dict(self):
        return {
            "family": self.family,
            "order": self.order,
            "kappa": self.kappa,
            "n_max": self.n_max,
            "thresholds": {
                "t1": self.t1,
                "t2": self.t2,
                "t3_paper": self.t3_paper,
                "t3_inv": self.t3_inv,
                "t3_fixed": self.t3_fixed,
            },
            "hits": {
                "n1": self.n1,
                "n2": self.n2,
                "n3_paper": self.n3_paper,
                "n3_inv": self.n3_inv,
                "n3_fixed": self.n3_fixed,
            },
            "unreached": list(self.unreached),
            "trajectory": [list(r) for r in self.trajectory],
        }


def phase_trace(ctx, gens, kappa, n_max, stop_when_done=True):
    """Trace ||mu^{(n)}||_2 and ||mu^{(n)} - 1||_inf, recording threshold hits.

    Unreached thresholds within n_max are reported in PhaseReport.unreached,
    never raised.  The L2 trajectory is asserted monotone non-increasing.
    """
    if not 0 < kappa < 1:
        raise ValueError("kappa must lie in (0, 1)")
    order = ctx.order
    mu = generator_measure(ctx, gens)
    rep = PhaseReport(
        family=ctx.family,
        order=order,
        kappa=kappa,
        n_max=n_max,
        t1=order ** (0.5 - kappa / 2),
        t2=order ** (kappa / 10),
        t3_paper=max(order ** (-10.0), 1e-14),
        t3_inv=1.0 / order,
        t3_fixed=1e-12,
    )
    cur = Measure.dirac(ctx)
    step = None
    l2 = lp_norm(cur, 2)
    linf = dist_to_uniform_inf(cur)
    rep.trajectory.append((0, l2, linf, cur.support_size))
    identity_walk = all(
        g.codes == groups.identity(ctx).codes for g in gens
    )
    for n in range(1, n_max + 1):
        if step is None and cur.is_dense:
            step = _StepOp(ctx, mu)
        if step is not None and cur.is_dense:
            cur = Measure(ctx, step.apply(cur.dense_weights()))
        else:
            cur = convolve(cur, mu)
        new_l2 = lp_norm(cur, 2)
        assert new_l2 <= l2 * (1 + 1e-12) + 1e-12, "L2 norm increased"
        l2 = new_l2
        linf = dist_to_uniform_inf(cur)
        rep.trajectory.append((n, l2, linf, cur.support_size))
        if rep.n1 is None and l2 <= rep.t1:
            rep.n1 = n
        if rep.n2 is None and l2 <= rep.t2:
            rep.n2 = n
        if rep.n3_paper is None and linf <= rep.t3_paper:
            rep.n3_paper = n
        if rep.n3_inv is None and linf <= rep.t3_inv:
            rep.n3_inv = n
        if rep.n3_fixed is None and linf <= rep.t3_fixed:
            rep.n3_fixed = n
        if stop_when_done and not rep.unreached:
            break
        if identity_walk and n >= 2:
            break  # trajectory is constant at |G|^{1/2}; nothing will hit
    return rep
