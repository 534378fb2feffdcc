"""Cell coordinates for SL_m: every g factors uniquely as

    g = u1 * h * n_w * u2

with u1 strictly-upper unipotent (all positions free), h diagonal of
determinant one, w a permutation with pinned monomial lift n_w, and u2
unipotent supported only on positions (i, j), i < j, with w(i) > w(j).

The pinned lift n_w is the product of the 2x2 blocks [[0, 1], [-1, 0]]
embedded at consecutive rows, taken along the lexicographically first
reduced word of w.  Cell sizes are q^{m(m-1)/2} (q-1)^{m-1} q^{inv(w)} and
sum to |SL_m(F_q)|, which makes cell-then-coordinates sampling exactly
uniform without enumeration.

The SU3 sampler lives here too: it draws from the two-cell chart (big cell
u1 h n u2 and small cell u1 h) in the antidiagonal-form realization and
transports by the fixed congruence; both cells are coordinatized exactly,
so the draw is uniform for every admissible field.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations

import numpy as np

from . import groups
from .errors import UnsupportedError, ZeroTorusParamError
from .groups import (
    GroupElem,
    _fadd,
    _finv,
    _fmul,
    _fneg,
    _inv_codes_vec,
    matmul_codes,
)


@dataclass(frozen=True)
class BruhatCoords:
    w: tuple  # permutation, w[j] = image of j
    u1: tuple  # codes at upper positions, row-major
    t: tuple  # first m-1 diagonal codes (all nonzero)
    u2: tuple  # codes at the allowed positions of U_w^-, row-major


@lru_cache(maxsize=None)
def weyl_permutations(m: int):
    """All permutations of 0..m-1 in lexicographic order."""
    return tuple(permutations(range(m)))


def inversions(w) -> int:
    m = len(w)
    return sum(1 for i in range(m) for j in range(i + 1, m) if w[i] > w[j])


@lru_cache(maxsize=None)
def upper_positions(m: int):
    return tuple((i, j) for i in range(m) for j in range(i + 1, m))


@lru_cache(maxsize=None)
def minus_positions(w):
    """Positions (i, j), i < j, where u2 may be nonzero: w(i) > w(j)."""
    m = len(w)
    return tuple((i, j) for i in range(m) for j in range(i + 1, m) if w[i] > w[j])


@lru_cache(maxsize=None)
def reduced_word(w):
    """Lexicographically first reduced word (greedy smallest left descent)."""
    target = inversions(tuple(w))
    w = list(w)
    word = []
    while True:
        desc = None
        for i in range(len(w) - 1):
            # left descent: i occurs after i+1 in w
            if w.index(i) > w.index(i + 1):
                desc = i
                break
        if desc is None:
            break
        word.append(desc)
        a, b = w.index(desc), w.index(desc + 1)
        w[a], w[b] = w[b], w[a]
    assert len(word) == target
    return tuple(word)


def n_w_matrix(ctx, w):
    """Pinned monomial lift of w as a code tuple (row-major)."""
    f, m = ctx.field, ctx.m
    mat = groups.identity(ctx).codes
    for i in reduced_word(tuple(w)):
        blk = list(groups.identity(ctx).codes)
        blk[i * m + i] = 0
        blk[(i + 1) * m + (i + 1)] = 0
        blk[i * m + (i + 1)] = 1
        blk[(i + 1) * m + i] = _fneg(f, 1)
        mat = groups._mat_mul(f, mat, tuple(blk), m)
    # sanity: underlying permutation matches
    for j in range(m):
        nz = [i for i in range(m) if mat[i * m + j] != 0]
        assert nz == [w[j]], (w, nz)
    return mat


def cell_size(ctx, w) -> int:
    q, m = ctx.field.q, ctx.m
    npos = m * (m - 1) // 2
    return q**npos * (q - 1) ** (m - 1) * q ** inversions(w)


def _check_sl(ctx):
    if ctx.family != "SL":
        raise UnsupportedError("cell coordinates are implemented for SL_m")


def compose(ctx, coords: BruhatCoords) -> GroupElem:
    _check_sl(ctx)
    f, m = ctx.field, ctx.m
    w = tuple(coords.w)
    u1 = list(groups.identity(ctx).codes)
    for (i, j), c in zip(upper_positions(m), coords.u1):
        u1[i * m + j] = c
    h = [0] * (m * m)
    prod_codes = 1
    for i, c in enumerate(coords.t):
        if c == 0:
            raise ZeroTorusParamError("torus coordinates must be nonzero")
        h[i * m + i] = c
        prod_codes = _fmul(f, prod_codes, c)
    h[(m - 1) * m + (m - 1)] = _finv(f, prod_codes)
    u2 = list(groups.identity(ctx).codes)
    for (i, j), c in zip(minus_positions(w), coords.u2):
        u2[i * m + j] = c
    g = groups._mat_mul(f, tuple(u1), tuple(h), m)
    g = groups._mat_mul(f, g, n_w_matrix(ctx, w), m)
    g = groups._mat_mul(f, g, tuple(u2), m)
    return GroupElem(ctx, g)


def decompose(g: GroupElem) -> BruhatCoords:
    """Recover the pinned coordinates by two-sided unipotent elimination.

    Column sweep left to right.  In each column the pivot is the bottom-most
    nonzero entry in an unclaimed row; claimed-row entries below the pivot
    are cleared by adding an earlier (allowed) column, claimed or unclaimed
    rows above it by adding the pivot row.  Row operations stay upper
    unipotent, column operations stay inside U_w^-, so the accumulated
    factors are exactly u1 and u2.
    """
    ctx = g.ctx
    _check_sl(ctx)
    f, m = ctx.field, ctx.m
    M = list(g.codes)
    L = list(groups.identity(ctx).codes)  # g = L * M * R throughout
    R = list(groups.identity(ctx).codes)
    claimed = {}  # pivot row -> its column
    wvals = [None] * m
    for j in range(m):
        # clear claimed rows sitting below the eventual pivot first is not
        # necessary for pivot choice: the pivot only looks at unclaimed rows
        free = [i for i in range(m) if i not in claimed and M[i * m + j] != 0]
        assert free, "singular matrix reached the cell decomposition"
        piv = max(free)
        wvals[j] = piv
        pval_inv = _finv(f, M[piv * m + j])
        for i in range(m):
            if i == piv or M[i * m + j] == 0:
                continue
            if i in claimed and i > piv:
                # column op: col_j += alpha * col_{j'}, j' the pivot column of i
                jp = claimed[i]
                alpha = _fneg(f, _fmul(f, M[i * m + j], _finv(f, M[i * m + jp])))
                for r in range(m):
                    M[r * m + j] = _fadd(f, M[r * m + j], _fmul(f, alpha, M[r * m + jp]))
                # R <- F^{-1} R with F = I + alpha E_{jp, j}
                for cc in range(m):
                    R[jp * m + cc] = _fadd(
                        f, R[jp * m + cc], _fmul(f, _fneg(f, alpha), R[j * m + cc])
                    )
            else:
                # row op: row_i += beta * row_piv (i < piv keeps it upper)
                assert i < piv, (i, piv)
                beta = _fneg(f, _fmul(f, M[i * m + j], pval_inv))
                for cc in range(m):
                    M[i * m + cc] = _fadd(f, M[i * m + cc], _fmul(f, beta, M[piv * m + cc]))
                # L <- L * E^{-1} with E = I + beta E_{i, piv}
                for r in range(m):
                    L[r * m + piv] = _fadd(
                        f, L[r * m + piv], _fmul(f, _fneg(f, beta), L[r * m + i])
                    )
        claimed[piv] = j
    w = tuple(wvals)
    nw = n_w_matrix(ctx, w)
    # M = h * n_w: read the diagonal through the pinned signs
    diag = [0] * m
    for j in range(m):
        i = w[j]
        diag[i] = _fmul(f, M[i * m + j], _finv(f, nw[i * m + j]))
    u1 = tuple(L[i * m + j] for (i, j) in upper_positions(m))
    allowed = set(minus_positions(w))
    for i, j in upper_positions(m):
        if (i, j) not in allowed:
            assert R[i * m + j] == 0, "column operations left the pinned support"
    u2 = tuple(R[i * m + j] for (i, j) in minus_positions(w))
    return BruhatCoords(w=w, u1=u1, t=tuple(diag[: m - 1]), u2=u2)


# ---------------------------------------------------------------------------
# sampling and enumeration


def sample_cell(ctx, w, rng) -> GroupElem:
    """Uniform element of the cell of w (uniform independent coordinates)."""
    _check_sl(ctx)
    q, m = ctx.field.q, ctx.m
    npos = m * (m - 1) // 2
    u1 = tuple(int(rng.integers(q)) for _ in range(npos))
    t = tuple(int(rng.integers(1, q)) for _ in range(m - 1))
    u2 = tuple(int(rng.integers(q)) for _ in range(inversions(w)))
    return compose(ctx, BruhatCoords(tuple(w), u1, t, u2))


def sample_uniform(ctx, rng) -> GroupElem:
    """Exactly uniform over SL_m: pick a cell with probability |cell|/|G|."""
    _check_sl(ctx)
    ws = weyl_permutations(ctx.m)
    sizes = [cell_size(ctx, w) for w in ws]
    total = sum(sizes)
    assert total == ctx.order, (total, ctx.order)
    r = int(rng.integers(total))
    acc = 0
    for w, s in zip(ws, sizes):
        acc += s
        if r < acc:
            return sample_cell(ctx, w, rng)
    raise AssertionError("unreachable")


def _cartesian(arrays):
    arrays = [np.asarray(a, dtype=np.int64) for a in arrays]
    if not arrays:
        return np.zeros((1, 0), dtype=np.int64)
    grids = np.meshgrid(*arrays, indexing="ij")
    return np.stack([gr.reshape(-1) for gr in grids], axis=-1)


def cell_elements(ctx, w):
    """All elements of the cell of w as an (n, m, m) code array."""
    _check_sl(ctx)
    f, m = ctx.field, ctx.m
    q = f.q
    eye = np.eye(m, dtype=np.int64)

    pos_u1 = upper_positions(m)
    combos1 = _cartesian([np.arange(q)] * len(pos_u1))
    U1 = np.tile(eye, (len(combos1), 1, 1))
    for t, (i, j) in enumerate(pos_u1):
        U1[:, i, j] = combos1[:, t]

    nz = np.arange(1, q)
    combos_t = _cartesian([nz] * (m - 1))
    H = np.zeros((len(combos_t), m, m), dtype=np.int64)
    prod = np.ones(len(combos_t), dtype=np.int64)
    for i in range(m - 1):
        H[:, i, i] = combos_t[:, i]
        prod = f.mul_codes(prod, combos_t[:, i])
    H[:, m - 1, m - 1] = _inv_codes_vec(f, prod)

    nw = np.array(n_w_matrix(ctx, w), dtype=np.int64).reshape(m, m)
    HN = matmul_codes(f, H, nw[None, :, :])

    pos_u2 = minus_positions(tuple(w))
    combos2 = _cartesian([np.arange(q)] * len(pos_u2))
    U2 = np.tile(eye, (len(combos2), 1, 1))
    for t, (i, j) in enumerate(pos_u2):
        U2[:, i, j] = combos2[:, t]

    left = matmul_codes(f, U1[:, None], HN[None, :]).reshape(-1, m, m)
    out = matmul_codes(f, left[:, None], U2[None, :]).reshape(-1, m, m)
    assert len(out) == cell_size(ctx, w)
    return out


def su3_sample(ctx, rng):
    """Uniform SU3 element plus a small report of which cell produced it.

    The draw is exact: an integer below |G| selects the big or small cell
    with the right probability and the cell coordinates are uniform and
    bijective.  The report's "exact" flag is therefore always True.
    """
    if ctx.family != "SU3":
        raise UnsupportedError("su3_sample needs an SU3 context")
    big, small = groups.su3_cell_sizes(ctx)
    q = ctx.field.q
    tz = groups._su3_chart(ctx)["trace_zero"]
    r = int(rng.integers(ctx.order))
    if r < big:
        coords = (
            int(rng.integers(q)),
            tz[int(rng.integers(len(tz)))],
            int(rng.integers(1, q)),
            int(rng.integers(q)),
            tz[int(rng.integers(len(tz)))],
        )
        info = {"cell": "big", "exact": True, "biased": False}
        return groups.su3_element(ctx, "big", coords), info
    coords = (
        int(rng.integers(q)),
        tz[int(rng.integers(len(tz)))],
        int(rng.integers(1, q)),
    )
    return groups.su3_element(ctx, "small", coords), {"cell": "small", "exact": True, "biased": False}
