"""Approximate-group diagnostics: energy, tripling, greedy covering.

A K-approximate subgroup is a symmetric set A whose product set A.A is
covered by K left-translates of A; smallness of the tripling ratio
|A.A.A| / |A| and largeness of the multiplicative energy
E(A) = #{(a1,a2,a3,a4) : a1 a2^{-1} = a3 a4^{-1}} are the two quantitative
handles used here.  Covering is greedy and reported as an upper bound on
the minimal K -- existence of a small cover is all the theory needs.
"""

import numpy as np

from . import groups
from .errors import ContextMismatchError, EmptySetError, SetTooLargeError

ENERGY_CAP = 4000  # |A| cap for the O(|A|^2) histogram
PAIR_WORK_CAP = 1 << 27  # pairwise-product work cap for product sets
_CHUNK = 1 << 16


class ElemSet:
    """A set of group elements as a sorted, deduplicated index array."""

    def __init__(self, ctx, members):
        self.ctx = ctx
        idx = []
        for a in members:
            if isinstance(a, groups.GroupElem):
                if a.ctx is not ctx:
                    raise ContextMismatchError("element from another context")
                idx.append(groups.canonical_index(a))
            else:
                idx.append(int(a))
        arr = np.unique(np.asarray(idx, dtype=np.int64))
        if arr.size and (arr[0] < 0 or arr[-1] >= ctx.order):
            raise ValueError("index outside group range")
        self.indices = arr

    @classmethod
    def from_indices(cls, ctx, arr):
        out = cls.__new__(cls)
        out.ctx = ctx
        out.indices = np.unique(np.asarray(arr, dtype=np.int64))
        return out

    def __len__(self):
        return int(self.indices.size)

    def __contains__(self, a):
        i = groups.canonical_index(a) if isinstance(a, groups.GroupElem) else int(a)
        pos = np.searchsorted(self.indices, i)
        return pos < self.indices.size and self.indices[pos] == i

    def __eq__(self, other):
        return (
            isinstance(other, ElemSet)
            and self.ctx is other.ctx
            and np.array_equal(self.indices, other.indices)
        )

    def elements(self):
        return [groups.element_at(self.ctx, int(i)) for i in self.indices]

    def __repr__(self):
        return f"ElemSet({self.ctx.family}, |A|={len(self)})"


def _pair_products(ctx, left, right, want_witness=False):
    """Indices of {l * r}, optionally with one witnessing left factor each."""
    if left.size * right.size > PAIR_WORK_CAP:
        raise SetTooLargeError(
            f"{left.size} x {right.size} products exceed the work cap"
        )
    if ctx.family == "Cyclic":
        prod = (left[:, None] + right[None, :]) % ctx.n
        flat = prod.reshape(-1)
        if not want_witness:
            return np.unique(flat)
        uniq, first = np.unique(flat, return_index=True)
        return uniq, left[first // right.size]
    lm = groups.mats_of_index(ctx, left)
    rm = groups.mats_of_index(ctx, right)
    outs, wits = [], []
    for s in range(0, left.size, max(1, _CHUNK // max(1, right.size))):
        chunk = lm[s : s + max(1, _CHUNK // max(1, right.size))]
        prod = groups.matmul_codes(ctx.field, chunk[:, None], rm[None, :])
        idx = groups.index_of_mats(ctx, prod).reshape(-1)
        if want_witness:
            uniq, first = np.unique(idx, return_index=True)
            outs.append(uniq)
            wits.append(left[s + first // right.size])
        else:
            outs.append(np.unique(idx))
    if not want_witness:
        return np.unique(np.concatenate(outs)) if outs else np.empty(0, np.int64)
    allu = np.concatenate(outs)
    allw = np.concatenate(wits)
    uniq, first = np.unique(allu, return_index=True)
    return uniq, allw[first]


def product_set(A, B):
    """A.B as an ElemSet."""
    if A.ctx is not B.ctx:
        raise ContextMismatchError("sets on different groups")
    return ElemSet.from_indices(A.ctx, _pair_products(A.ctx, A.indices, B.indices))


def multiplicative_energy(A):
    """E(A) = sum_v r(v)^2 with r(v) = #{(a1, a2): a1 a2^{-1} = v}, exact."""
    n = len(A)
    if n == 0:
        raise EmptySetError("A must be nonempty")
    if n > ENERGY_CAP:
        raise SetTooLargeError(f"|A| = {n} exceeds energy cap {ENERGY_CAP}")
    ctx = A.ctx
    counts = np.zeros(ctx.order, dtype=np.int64)
    if ctx.family == "Cyclic":
        diff = (A.indices[:, None] - A.indices[None, :]) % ctx.n
        counts += np.bincount(diff.reshape(-1), minlength=ctx.order)
    else:
        mats = groups.mats_of_index(ctx, A.indices)
        f = ctx.field
        inv_mats = np.stack(
            [
                np.array(
                    groups._mat_inv(f, tuple(int(v) for v in m.reshape(-1)), ctx.m),
                    dtype=np.int64,
                ).reshape(ctx.m, ctx.m)
                for m in mats
            ]
        )
        step = max(1, _CHUNK // n)
        for s in range(0, n, step):
            prod = groups.matmul_codes(
                f, mats[s : s + step][:, None], inv_mats[None, :]
            )
            idx = groups.index_of_mats(ctx, prod).reshape(-1)
            counts += np.bincount(idx, minlength=ctx.order)
    E = int(np.dot(counts, counts))
    assert n * n <= E <= n**3, "energy outside its a-priori range"
    return E


def tripling(A):
    """|A.A.A| / |A| exactly (as a float)."""
    if len(A) == 0:
        raise EmptySetError("A must be nonempty")
    AA = product_set(A, A)
    AAA = product_set(AA, A)
    return len(AAA) / len(A)


def approx_K(A):
    """Size of a greedy left-translate cover of A.A by xA -- an upper bound
    on the minimal K for which A is a K-approximate group.

    Each uncovered pivot u = a1 a2 is covered by its recorded witness
    translate a1 A (which contains u since a2 in A); the resulting cover is
    verified exhaustively before returning.
    """
    n = len(A)
    if n == 0:
        raise EmptySetError("A must be nonempty")
    ctx = A.ctx
    aa, wit = _pair_products(ctx, A.indices, A.indices, want_witness=True)
    covered = np.zeros(aa.size, dtype=bool)
    chosen = []
    union = []
    while not covered.all():
        pos = int(np.argmin(covered))  # smallest uncovered product index
        x = int(wit[pos])
        trans = _pair_products(ctx, np.array([x], dtype=np.int64), A.indices)
        chosen.append(x)
        union.append(trans)
        covered |= np.isin(aa, trans, assume_unique=True)
    got = np.unique(np.concatenate(union))
    assert np.isin(aa, got).all(), "greedy cover failed to cover A.A"
    return len(chosen)
