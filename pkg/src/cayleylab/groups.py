"""Finite matrix groups: SL_m (m = 2, 3, 4), Sp_4, SU_3, plus a cyclic
test-only family that honours the same element/indexing contract.

Elements are stored as tuples of field-element codes (row-major matrix
entries; a single residue for the cyclic family). Every family provides a
deterministic bijection canonical_index/element_at onto 0..|G|-1:

* SL_2 uses a closed form split on the bottom-left entry (c != 0 vs c = 0),
* the cyclic family uses the residue itself,
* other families use a lazily built enumeration table sorted by the
  row-major entry-code key (capped at ENUM_CAP elements).

The module also exposes vectorized helpers (batch matrix products over entry
codes, index<->matrix transforms, right-multiplication permutations) that the
walk/spectral/trap modules build on.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import fields
from .errors import (
    ContextMismatchError,
    NotEnumerableError,
    NotInGroupError,
    TooLargeError,
    UnsupportedError,
)

ENUM_CAP = 4_000_000


# ---------------------------------------------------------------------------
# scalar field-code arithmetic (ints in 0..q-1)


def _fadd(f, a, b):
    if f.k == 1:
        return (a + b) % f.p
    if f.q <= fields.Q_TABLE_CAP:
        return int(f.table("add")[a, b])
    return fields.add(f.from_code(a), f.from_code(b)).code


def _fmul(f, a, b):
    if f.k == 1:
        return (a * b) % f.p
    if f.q <= fields.Q_TABLE_CAP:
        return int(f.table("mul")[a, b])
    return fields.mul(f.from_code(a), f.from_code(b)).code


def _fneg(f, a):
    if f.k == 1:
        return (-a) % f.p
    if f.q <= fields.Q_TABLE_CAP:
        return int(f.table("neg")[a])
    return fields.neg(f.from_code(a)).code


def _finv(f, a):
    if a == 0:
        raise ZeroDivisionError("field inverse of zero")
    if f.k == 1:
        return pow(a, f.p - 2, f.p)
    if f.q <= fields.Q_TABLE_CAP:
        return int(f.table("inv")[a])
    return fields.inv(f.from_code(a)).code


def _ffrob(f, a, s):
    return int(f.frobenius_codes(np.array([a]), s)[0])


def _mat_mul(f, A, B, m):
    out = [0] * (m * m)
    for i in range(m):
        for j in range(m):
            acc = 0
            for t in range(m):
                acc = _fadd(f, acc, _fmul(f, A[i * m + t], B[t * m + j]))
            out[i * m + j] = acc
    return tuple(out)


def _mat_det(f, A, m):
    if m == 1:
        return A[0]
    det = 0
    sign_pos = True
    for j in range(m):
        minor = [
            A[i * m + jj]
            for i in range(1, m)
            for jj in range(m)
            if jj != j
        ]
        term = _fmul(f, A[j], _mat_det(f, tuple(minor), m - 1))
        det = _fadd(f, det, term if sign_pos else _fneg(f, term))
        sign_pos = not sign_pos
    return det


def _mat_inv(f, A, m):
    """Inverse by adjugate; raises if the determinant is zero."""
    det = _mat_det(f, A, m)
    if det == 0:
        raise ZeroDivisionError("singular matrix")
    dinv = _finv(f, det)
    out = [0] * (m * m)
    for i in range(m):
        for j in range(m):
            minor = [
                A[r * m + c]
                for r in range(m)
                if r != i
                for c in range(m)
                if c != j
            ]
            cof = _mat_det(f, tuple(minor), m - 1)
            if (i + j) % 2:
                cof = _fneg(f, cof)
            out[j * m + i] = _fmul(f, dinv, cof)  # transpose of cofactors
    return tuple(out)


# ---------------------------------------------------------------------------
# vectorized entry-code arithmetic


def matmul_codes(f, A, B):
    """Batch matrix product over entry codes; A, B are (..., m, m) int64."""
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    m = A.shape[-1]
    A, B = np.broadcast_arrays(A, B)
    out = np.zeros(A.shape, dtype=np.int64)
    if f.k == 1:
        p = f.p
        for i in range(m):
            for j in range(m):
                acc = out[..., i, j]
                for t in range(m):
                    acc = (acc + A[..., i, t] * B[..., t, j]) % p
                out[..., i, j] = acc
    elif f.q <= fields.Q_TABLE_CAP:
        mul = f.table("mul")
        add = f.table("add")
        for i in range(m):
            for j in range(m):
                acc = out[..., i, j]
                for t in range(m):
                    acc = add[acc, mul[A[..., i, t], B[..., t, j]]]
                out[..., i, j] = acc
    else:
        for i in range(m):
            for j in range(m):
                acc = out[..., i, j]
                for t in range(m):
                    acc = f.add_codes(acc, f.mul_codes(A[..., i, t], B[..., t, j]))
                out[..., i, j] = acc
    return out


def _inv_codes_vec(f, a):
    a = np.asarray(a, dtype=np.int64)
    if f.k == 1:
        r = np.ones_like(a)
        b = a % f.p
        e = f.p - 2
        while e:
            if e & 1:
                r = r * b % f.p
            b = b * b % f.p
            e >>= 1
        return r
    if f.q <= fields.Q_TABLE_CAP:
        return f.table("inv")[a]
    flat = a.reshape(-1)
    out = np.array([_finv(f, int(c)) for c in flat], dtype=np.int64)
    return out.reshape(a.shape)


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GroupElem:
    ctx: "GroupCtx"
    codes: tuple

    def matrix(self):
        """Entries as FieldElem rows (matrix families only)."""
        ctx = self.ctx
        if ctx.family == "Cyclic":
            raise UnsupportedError("cyclic elements are residues, not matrices")
        m = ctx.m
        f = ctx.field
        return tuple(
            tuple(f.from_code(self.codes[i * m + j]) for j in range(m))
            for i in range(m)
        )

    def __repr__(self):
        if self.ctx.family == "Cyclic":
            return f"Cyclic({self.ctx.n}):{self.codes[0]}"
        return f"{self.ctx.family}:{self.codes}"


_CTX_TOKEN = object()


class GroupCtx:
    def __init__(self, family, field=None, m=None, n=None, _token=None):
        if _token is not _CTX_TOKEN:
            raise TypeError("use make_sl / make_sp4 / make_su3 / make_cyclic")
        self.family = family
        self.field = field
        self.m = m
        self.n = n
        if family == "SL":
            q = field.q
            num = 1
            for j in range(m):
                num *= q**m - q**j
            self.order = num // (q - 1)
        elif family == "Sp4":
            q = field.q
            self.order = q**4 * (q**2 - 1) * (q**4 - 1)
        elif family == "SU3":
            qt = field.p ** (field.k // 2)
            self.qt = qt
            self.sigma_power = field.k // 2
            self.order = qt**3 * (qt**2 - 1) * (qt**3 + 1)
        elif family == "Cyclic":
            self.order = n
        else:
            raise UnsupportedError(f"unknown family {family}")
        self._cache = {}

    def __repr__(self):
        if self.family == "Cyclic":
            return f"GroupCtx(Cyclic, n={self.n})"
        return f"GroupCtx({self.family}, q={self.field.q}, m={self.m})"


@lru_cache(maxsize=None)
def make_sl(m: int, p: int, k: int = 1) -> GroupCtx:
    if m not in (2, 3, 4):
        raise UnsupportedError(f"SL_m supported for m in 2..4, got {m}")
    f = fields.make(p, k)
    return GroupCtx("SL", field=f, m=m, _token=_CTX_TOKEN)


@lru_cache(maxsize=None)
def make_sp4(p: int, k: int = 1) -> GroupCtx:
    f = fields.make(p, k)
    return GroupCtx("Sp4", field=f, m=4, _token=_CTX_TOKEN)


@lru_cache(maxsize=None)
def make_su3(p: int, k: int) -> GroupCtx:
    if k % 2 != 0:
        raise UnsupportedError("SU3 needs an even extension degree (q = qtilde^2)")
    f = fields.make(p, k)
    return GroupCtx("SU3", field=f, m=3, _token=_CTX_TOKEN)


@lru_cache(maxsize=None)
def make_cyclic(n: int) -> GroupCtx:
    if not 1 <= n <= ENUM_CAP:
        raise TooLargeError(f"cyclic order {n} outside 1..{ENUM_CAP}")
    return GroupCtx("Cyclic", n=n, _token=_CTX_TOKEN)


def order_of(ctx: GroupCtx) -> int:
    """Exact group order from the classical formulas (cyclic: n)."""
    return ctx.order


def identity(ctx: GroupCtx) -> GroupElem:
    if ctx.family == "Cyclic":
        return GroupElem(ctx, (0,))
    m = ctx.m
    one = 1  # code of the field unit
    return GroupElem(ctx, tuple(one if i == j else 0 for i in range(m) for j in range(m)))


def _check_pair(g: GroupElem, h: GroupElem):
    if g.ctx is not h.ctx:
        raise ContextMismatchError(f"{g.ctx} vs {h.ctx}")
    return g.ctx


def mul(g: GroupElem, h: GroupElem) -> GroupElem:
    ctx = _check_pair(g, h)
    if ctx.family == "Cyclic":
        return GroupElem(ctx, ((g.codes[0] + h.codes[0]) % ctx.n,))
    return GroupElem(ctx, _mat_mul(ctx.field, g.codes, h.codes, ctx.m))


def inv(g: GroupElem) -> GroupElem:
    ctx = g.ctx
    if ctx.family == "Cyclic":
        return GroupElem(ctx, ((-g.codes[0]) % ctx.n,))
    return GroupElem(ctx, _mat_inv(ctx.field, g.codes, ctx.m))


def _sp4_J(ctx):
    f = ctx.field
    one = 1
    neg1 = _fneg(f, one)
    J = [0] * 16
    J[0 * 4 + 3] = one
    J[1 * 4 + 2] = one
    J[2 * 4 + 1] = neg1
    J[3 * 4 + 0] = neg1
    return tuple(J)


def _mat_transpose(A, m):
    return tuple(A[j * m + i] for i in range(m) for j in range(m))


def _mat_frob(f, A, s):
    return tuple(_ffrob(f, a, s) for a in A)


def is_member(ctx: GroupCtx, g) -> bool:
    """Check the defining equations (det 1 plus the family's form)."""
    codes = g.codes if isinstance(g, GroupElem) else tuple(g)
    if ctx.family == "Cyclic":
        return len(codes) == 1 and 0 <= codes[0] < ctx.n
    m = ctx.m
    if len(codes) != m * m or any(not 0 <= c < ctx.field.q for c in codes):
        return False
    f = ctx.field
    if _mat_det(f, codes, m) != 1:
        return False
    if ctx.family == "Sp4":
        J = _sp4_J(ctx)
        lhs = _mat_mul(f, _mat_mul(f, _mat_transpose(codes, 4), J, 4), codes, 4)
        return lhs == J
    if ctx.family == "SU3":
        conj = _mat_frob(f, codes, ctx.sigma_power)
        lhs = _mat_mul(f, _mat_transpose(conj, 3), codes, 3)
        return lhs == identity(ctx).codes
    return True


def require_member(ctx: GroupCtx, codes) -> GroupElem:
    if not is_member(ctx, codes):
        raise NotInGroupError(f"matrix fails defining equations of {ctx}")
    return GroupElem(ctx, tuple(codes))


def from_int_matrix(ctx: GroupCtx, rows) -> GroupElem:
    """Build an element from integer entries (reduced into the prime field)."""
    f = ctx.field
    codes = tuple(f.from_int(v).code for row in rows for v in row)
    return require_member(ctx, codes)


def char_poly_coeffs(g: GroupElem):
    """Coefficients (c_1, ..., c_m) with det(X*I - g) = X^m + c_1 X^{m-1} + ... + c_m.

    Fixed descending-power order; c_i = (-1)^i * (sum of principal i x i minors).
    """
    ctx = g.ctx
    if ctx.family == "Cyclic":
        raise UnsupportedError("char poly needs a matrix family")
    f, m = ctx.field, ctx.m
    from itertools import combinations

    out = []
    for i in range(1, m + 1):
        e = 0
        for rows in combinations(range(m), i):
            sub = tuple(g.codes[r * m + c] for r in rows for c in rows)
            e = _fadd(f, e, _mat_det(f, sub, i))
        if i % 2:
            e = _fneg(f, e)
        out.append(f.from_code(e))
    return tuple(out)


def unipotent_test(g: GroupElem) -> bool:
    """(g - 1)^m = 0; for the cyclic family this degrades to g == identity."""
    ctx = g.ctx
    if ctx.family == "Cyclic":
        return g.codes[0] == 0
    f, m = ctx.field, ctx.m
    one = identity(ctx).codes
    diff = tuple(
        _fadd(f, a, _fneg(f, b)) for a, b in zip(g.codes, one)
    )
    acc = diff
    for _ in range(m - 1):
        acc = _mat_mul(f, acc, diff, m)
    return all(c == 0 for c in acc)


# ---------------------------------------------------------------------------
# canonical indexing


def _sl2_index_vec(ctx, mats):
    """Closed-form SL_2 index: mats (..., 2, 2) codes -> (...,) indices."""
    f = ctx.field
    q = f.q
    a = mats[..., 0, 0]
    b = mats[..., 0, 1]
    c = mats[..., 1, 0]
    d = mats[..., 1, 1]
    big = ((c - 1) * q + a) * q + d
    small = (q - 1) * q * q + (a - 1) * q + b
    return np.where(c != 0, big, small)


def _sl2_mats_vec(ctx, idx):
    """Inverse of the closed-form SL_2 index, vectorized."""
    f = ctx.field
    q = f.q
    idx = np.asarray(idx, dtype=np.int64)
    ncell = (q - 1) * q * q
    isbig = idx < ncell
    out = np.zeros(idx.shape + (2, 2), dtype=np.int64)
    # big cell: c != 0 and b = (a d - 1) / c
    i = np.where(isbig, idx, 0)
    c = i // (q * q) + 1
    rem = i % (q * q)
    a = rem // q
    d = rem % q
    ad = f.mul_codes(a, d)
    num = f.add_codes(ad, _fneg(f, 1) * np.ones_like(ad))  # ad + (-1)
    b = f.mul_codes(num, _inv_codes_vec(f, c))
    out[..., 0, 0] = np.where(isbig, a, 0)
    out[..., 0, 1] = np.where(isbig, b, 0)
    out[..., 1, 0] = np.where(isbig, c, 0)
    out[..., 1, 1] = np.where(isbig, d, 0)
    # small cell: c = 0, a invertible, d = a^{-1}
    j = np.where(isbig, 0, idx - ncell)
    a2 = j // q + 1
    b2 = j % q
    d2 = _inv_codes_vec(f, a2)
    out[..., 0, 0] = np.where(isbig, out[..., 0, 0], a2)
    out[..., 0, 1] = np.where(isbig, out[..., 0, 1], b2)
    out[..., 1, 1] = np.where(isbig, out[..., 1, 1], d2)
    return out


def _enum_table(ctx):
    """(sorted_keys, mats) enumeration for table-indexed families."""
    if "enum" in ctx._cache:
        return ctx._cache["enum"]
    if ctx.order > ENUM_CAP:
        raise NotEnumerableError(f"|G| = {ctx.order} exceeds cap {ENUM_CAP}")
    if ctx.family == "SL":
        from . import bruhat

        mats = np.concatenate(
            [bruhat.cell_elements(ctx, w) for w in bruhat.weyl_permutations(ctx.m)]
        )
    elif ctx.family == "Sp4":
        mats = _sp4_closure(ctx)
    elif ctx.family == "SU3":
        mats = _su3_all(ctx)
    else:
        raise UnsupportedError(ctx.family)
    keys = _mat_keys(ctx, mats)
    order = np.argsort(keys, kind="stable")
    keys, mats = keys[order], mats[order]
    assert len(keys) == ctx.order, (len(keys), ctx.order)
    assert np.all(np.diff(keys) > 0), "duplicate elements in enumeration"
    ctx._cache["enum"] = (keys, mats)
    return keys, mats


def _mat_keys(ctx, mats):
    """Row-major big-endian key; fits int64 within the enumeration cap."""
    q = ctx.field.q
    m = ctx.m
    flat = mats.reshape(mats.shape[:-2] + (m * m,))
    key = np.zeros(flat.shape[:-1], dtype=np.int64)
    for i in range(m * m):
        key = key * q + flat[..., i]
    return key


def canonical_index(g: GroupElem) -> int:
    ctx = g.ctx
    if ctx.order > ENUM_CAP:
        raise NotEnumerableError(f"|G| = {ctx.order} exceeds cap {ENUM_CAP}")
    if ctx.family == "Cyclic":
        return int(g.codes[0])
    if ctx.family == "SL" and ctx.m == 2:
        mat = np.array(g.codes, dtype=np.int64).reshape(2, 2)
        return int(_sl2_index_vec(ctx, mat))
    keys, _ = _enum_table(ctx)
    mat = np.array(g.codes, dtype=np.int64).reshape(ctx.m, ctx.m)
    key = int(_mat_keys(ctx, mat))
    pos = int(np.searchsorted(keys, key))
    if pos >= len(keys) or keys[pos] != key:
        raise NotInGroupError("element not in enumeration table")
    return pos


def element_at(ctx: GroupCtx, i: int) -> GroupElem:
    if not 0 <= i < ctx.order:
        raise IndexError(f"index {i} outside 0..{ctx.order - 1}")
    if ctx.order > ENUM_CAP:
        raise NotEnumerableError(f"|G| = {ctx.order} exceeds cap {ENUM_CAP}")
    if ctx.family == "Cyclic":
        return GroupElem(ctx, (int(i),))
    if ctx.family == "SL" and ctx.m == 2:
        mat = _sl2_mats_vec(ctx, np.array([i]))[0]
        return GroupElem(ctx, tuple(int(v) for v in mat.reshape(4)))
    _, mats = _enum_table(ctx)
    return GroupElem(ctx, tuple(int(v) for v in mats[i].reshape(ctx.m * ctx.m)))


def elements(ctx: GroupCtx):
    """Iterate the whole group in canonical-index order."""
    for i in range(ctx.order):
        yield element_at(ctx, i)


def index_of_mats(ctx, mats):
    """Vectorized canonical_index for an (..., m, m) code array."""
    if ctx.family == "Cyclic":
        return np.asarray(mats, dtype=np.int64).reshape(-1)
    mats = np.asarray(mats, dtype=np.int64)
    if ctx.family == "SL" and ctx.m == 2:
        return _sl2_index_vec(ctx, mats)
    keys, _ = _enum_table(ctx)
    key = _mat_keys(ctx, mats)
    pos = np.searchsorted(keys, key)
    if not np.all(keys[np.minimum(pos, len(keys) - 1)] == key):
        raise NotInGroupError("some products left the enumeration table")
    return pos


def mats_of_index(ctx, idx):
    """Vectorized element_at: indices -> (..., m, m) code array."""
    idx = np.asarray(idx, dtype=np.int64)
    if ctx.family == "Cyclic":
        return idx
    if ctx.family == "SL" and ctx.m == 2:
        return _sl2_mats_vec(ctx, idx)
    _, mats = _enum_table(ctx)
    return mats[idx]


def all_mats(ctx):
    """Codes of every element in canonical order, (N, m, m)."""
    if ctx.order > ENUM_CAP:
        raise NotEnumerableError(f"|G| = {ctx.order} exceeds cap {ENUM_CAP}")
    if ctx.family == "Cyclic":
        return np.arange(ctx.order, dtype=np.int64)
    if ctx.family == "SL" and ctx.m == 2:
        if "allmats" not in ctx._cache:
            ctx._cache["allmats"] = _sl2_mats_vec(ctx, np.arange(ctx.order))
        return ctx._cache["allmats"]
    _, mats = _enum_table(ctx)
    return mats


def mul_perm(ctx, s: GroupElem):
    """Permutation P with P[x] = canonical_index(element_at(x) * s)."""
    if ctx.family == "Cyclic":
        return (np.arange(ctx.order, dtype=np.int64) + s.codes[0]) % ctx.n
    mats = all_mats(ctx)
    smat = np.array(s.codes, dtype=np.int64).reshape(ctx.m, ctx.m)
    prod = matmul_codes(ctx.field, mats, smat[None, :, :])
    return index_of_mats(ctx, prod)


def lmul_perm(ctx, s: GroupElem):
    """Permutation P with P[x] = canonical_index(s * element_at(x))."""
    if ctx.family == "Cyclic":
        return (np.arange(ctx.order, dtype=np.int64) + s.codes[0]) % ctx.n
    mats = all_mats(ctx)
    smat = np.array(s.codes, dtype=np.int64).reshape(ctx.m, ctx.m)
    prod = matmul_codes(ctx.field, smat[None, :, :], mats)
    return index_of_mats(ctx, prod)


# ---------------------------------------------------------------------------
# Sp4 enumeration by transvection closure


def _sp4_transvections(ctx, lam_one_only=True):
    """Symplectic transvections x -> x + lam * omega(x, v) * v.

    One direction per projective point; lam = 1 suffices for generation
    (scaling v covers the other square class), and the closure size check
    certifies that.  lam_one_only=False gives the full transvection set.
    """
    f = ctx.field
    q = f.q
    J = np.array(_sp4_J(ctx), dtype=np.int64).reshape(4, 4)
    # projective directions: first nonzero coordinate = 1
    vs = []
    for lead in range(4):
        shape = [1] * lead + [1] + [q] * (3 - lead)
        grids = np.meshgrid(*[np.arange(s) for s in shape], indexing="ij")
        vec = np.stack([g.reshape(-1) for g in grids], axis=1)
        vec[:, lead] = 1
        vs.append(vec)
    vs = np.concatenate(vs)
    gens = []
    eye = np.eye(4, dtype=np.int64)
    for v in vs:
        Jv = np.zeros(4, dtype=np.int64)
        for b in range(4):
            acc = 0
            for c in range(4):
                acc = _fadd(f, acc, _fmul(f, int(J[b, c]), int(v[c])))
            Jv[b] = acc
        for lam in ([1] if lam_one_only else range(1, q)):
            T = eye.copy()
            for a in range(4):
                va = _fmul(f, lam, int(v[a]))
                if va == 0:
                    continue
                for b in range(4):
                    T[a, b] = _fadd(f, int(T[a, b]), _fmul(f, va, int(Jv[b])))
            gens.append(T)
    return np.array(gens, dtype=np.int64)


def _sp4_closure(ctx):
    f = ctx.field
    gens = _sp4_transvections(ctx)
    ident = np.eye(4, dtype=np.int64)[None]
    visited_keys = _mat_keys(ctx, ident)
    visited_mats = ident
    frontier = ident
    chunk = 2048
    while len(frontier):
        new_keys, new_mats = [], []
        for lo in range(0, len(frontier), chunk):
            batch = frontier[lo : lo + chunk]
            prod = matmul_codes(f, batch[:, None], gens[None, :, :, :])
            prod = prod.reshape(-1, 4, 4)
            keys = _mat_keys(ctx, prod)
            keys, first = np.unique(keys, return_index=True)
            prod = prod[first]
            fresh = ~np.isin(keys, visited_keys)
            new_keys.append(keys[fresh])
            new_mats.append(prod[fresh])
        keys = np.concatenate(new_keys)
        mats = np.concatenate(new_mats)
        if len(keys):
            keys, first = np.unique(keys, return_index=True)
            mats = mats[first]
            fresh = ~np.isin(keys, visited_keys)
            keys, mats = keys[fresh], mats[fresh]
        frontier = mats
        if len(keys):
            visited_keys = np.concatenate([visited_keys, keys])
            visited_mats = np.concatenate([visited_mats, mats])
            order = np.argsort(visited_keys, kind="stable")
            visited_keys, visited_mats = visited_keys[order], visited_mats[order]
    assert len(visited_keys) == ctx.order, (len(visited_keys), ctx.order)
    return visited_mats


# ---------------------------------------------------------------------------
# SU3: Steinberg chart in the antidiagonal-form realization, transported to
# the identity-form group by a fixed Hermitian congruence.


def _su3_chart(ctx):
    if "su3" in ctx._cache:
        return ctx._cache["su3"]
    f = ctx.field
    s = ctx.sigma_power
    qt = ctx.qt

    F = fields

    def conj(x):
        return F.frobenius(x, s)

    def herm(u, v):
        acc = f.zero
        for uu, vv in zip(u, v):
            acc = F.add(acc, F.mul(conj(uu), vv))
        return acc

    # column 1: isotropic vector (1, t, 0) with N(t) = -1
    c1 = None
    for code in range(1, f.q):
        t = f.from_code(code)
        if F.add(f.one, F.mul(conj(t), t)).is_zero():
            c1 = (f.one, t, f.zero)
            break
    assert c1 is not None, "no isotropic vector found"
    # column 3: complete to a hyperbolic pair
    z = None
    for basis in ((f.one, f.zero, f.zero), (f.zero, f.one, f.zero), (f.zero, f.zero, f.one)):
        sprod = herm(c1, basis)
        if not sprod.is_zero():
            z = tuple(F.mul(v, F.inv(sprod)) for v in basis)
            break
    nz = herm(z, z)
    cc = F.solve_trace(f, F.neg(nz), s)
    c3 = tuple(F.add(a, F.mul(cc, b)) for a, b in zip(z, c1))
    assert herm(c3, c3).is_zero() and herm(c1, c3) == f.one
    # column 2: orthogonal complement, scaled to norm 1
    # solve <c1, w> = 0 and <c3, w> = 0 (linear in w)
    rows = [tuple(conj(v) for v in c1), tuple(conj(v) for v in c3)]
    w0 = _nullspace3(f, rows)
    nu = herm(w0, w0)
    assert not nu.is_zero()
    lam = None
    target = F.inv(nu)
    for code in range(1, f.q):
        cand = f.from_code(code)
        if F.mul(conj(cand), cand) == target:
            lam = cand
            break
    assert lam is not None, "norm map failed to hit the scaling target"
    c2 = tuple(F.mul(lam, v) for v in w0)
    C = tuple(
        (c1[i], c2[i], c3[i]) for i in range(3)
    )  # columns c1, c2, c3
    Ccodes = tuple(C[i][j].code for i in range(3) for j in range(3))
    # verify transpose(C)^sigma * C = antidiag(1,1,1)
    conjC = _mat_frob(f, Ccodes, s)
    gram = _mat_mul(f, _mat_transpose(conjC, 3), Ccodes, 3)
    J = [0] * 9
    J[0 * 3 + 2] = 1
    J[1 * 3 + 1] = 1
    J[2 * 3 + 0] = 1
    assert gram == tuple(J), "Hermitian Gram-Schmidt failed"
    Cinv = _mat_inv(f, Ccodes, 3)

    # trace-zero additive coset structure for the u coordinate
    mat = (f.frob_power_matrix(s) + np.eye(f.k, dtype=np.int64)) % f.p
    basis = _nullspace_mod_p(mat, f.p)
    zero_codes = []
    from itertools import product as iproduct

    for combo in iproduct(range(f.p), repeat=len(basis)):
        vec = np.zeros(f.k, dtype=np.int64)
        for ci, bi in zip(combo, basis):
            vec = (vec + ci * bi) % f.p
        zero_codes.append(f.encode_array(vec))
    zero_codes = sorted(int(z) for z in zero_codes)
    assert len(zero_codes) == qt, (len(zero_codes), qt)

    # long Weyl representative in the antidiagonal realization
    nw = [0] * 9
    nw[0 * 3 + 2] = 1
    nw[1 * 3 + 1] = _fneg(f, 1)
    nw[2 * 3 + 0] = 1

    chart = {
        "C": Ccodes,
        "Cinv": Cinv,
        "nw": tuple(nw),
        "trace_zero": zero_codes,
        "torus": [c for c in range(1, f.q)],
    }
    ctx._cache["su3"] = chart
    return chart


def _nullspace3(f, rows):
    """A nonzero solution of two linear equations in three unknowns."""
    F = fields
    # represent as 2x3 matrix of FieldElem; eliminate
    M = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(3):
        piv = None
        for rr in range(r, len(M)):
            if not M[rr][c].is_zero():
                piv = rr
                break
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        scale = F.inv(M[r][c])
        M[r] = [F.mul(scale, v) for v in M[r]]
        for rr in range(len(M)):
            if rr != r and not M[rr][c].is_zero():
                factor = M[rr][c]
                M[rr] = [F.sub(a, F.mul(factor, b)) for a, b in zip(M[rr], M[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(3) if c not in pivots]
    assert free, "system has no free variable"
    fc = free[0]
    sol = [f.zero, f.zero, f.zero]
    sol[fc] = f.one
    for ri, c in enumerate(pivots):
        sol[c] = F.neg(M[ri][fc])
    return tuple(sol)


def _nullspace_mod_p(mat, p):
    """Basis of the kernel of mat over F_p (small dense systems)."""
    mat = np.array(mat, dtype=np.int64) % p
    rows, cols = mat.shape
    m = mat.copy()
    piv_cols = []
    r = 0
    for c in range(cols):
        piv = None
        for rr in range(r, rows):
            if m[rr, c] % p:
                piv = rr
                break
        if piv is None:
            continue
        m[[r, piv]] = m[[piv, r]]
        m[r] = m[r] * pow(int(m[r, c]), p - 2, p) % p
        for rr in range(rows):
            if rr != r and m[rr, c]:
                m[rr] = (m[rr] - m[rr, c] * m[r]) % p
        piv_cols.append(c)
        r += 1
    basis = []
    for c in range(cols):
        if c in piv_cols:
            continue
        vec = np.zeros(cols, dtype=np.int64)
        vec[c] = 1
        for ri, pc in enumerate(piv_cols):
            vec[pc] = (-m[ri, c]) % p
        basis.append(vec)
    return basis


def _su3_upart(ctx, t_code):
    """Particular corner solution: u with u + u^sigma = -t^{1+sigma}."""
    f = ctx.field
    F = fields
    s = ctx.sigma_power
    t = f.from_code(t_code)
    nt = F.mul(t, F.frobenius(t, s))
    return F.solve_trace(f, F.neg(nt), s).code


def _su3_u1(ctx, t_code, z_code):
    """Chart unipotent [[1, t, u], [0, 1, -t^sigma], [0, 0, 1]] with
    u = particular(trace = -N(t)) + z, z in the trace-zero set."""
    f = ctx.field
    F = fields
    s = ctx.sigma_power
    t = f.from_code(t_code)
    u = F.add(f.from_code(_su3_upart(ctx, t_code)), f.from_code(z_code))
    mt = F.neg(F.frobenius(t, s))
    out = [0] * 9
    out[0] = 1
    out[1] = t.code
    out[2] = u.code
    out[4] = 1
    out[5] = mt.code
    out[8] = 1
    return tuple(out)


def _su3_torus(ctx, t_code):
    f = ctx.field
    F = fields
    s = ctx.sigma_power
    t = f.from_code(t_code)
    tbar = F.frobenius(t, s)
    d2 = F.mul(tbar, F.inv(t))
    d3 = F.inv(tbar)
    out = [0] * 9
    out[0] = t.code
    out[4] = d2.code
    out[8] = d3.code
    return tuple(out)


def su3_cell_sizes(ctx):
    """(big, small) cell sizes: q~^6 (q~^2 - 1) and q~^3 (q~^2 - 1)."""
    qt = ctx.qt
    return qt**6 * (qt**2 - 1), qt**3 * (qt**2 - 1)


def su3_element(ctx, cell, coords) -> GroupElem:
    """Compose a chart point into the identity-form group.

    cell = "big": coords = (t1, z1, s, t2, z2); cell = "small": (t, z, s).
    The torus coordinate s indexes the nonzero field codes 1..q-1.
    """
    chart = _su3_chart(ctx)
    f = ctx.field
    if cell == "big":
        t1, z1, sc, t2, z2 = coords
        g = _mat_mul(f, _su3_u1(ctx, t1, z1), _su3_torus(ctx, sc), 3)
        g = _mat_mul(f, g, chart["nw"], 3)
        g = _mat_mul(f, g, _su3_u1(ctx, t2, z2), 3)
    else:
        t, z, sc = coords
        g = _mat_mul(f, _su3_u1(ctx, t, z), _su3_torus(ctx, sc), 3)
    # transport: h = C g C^{-1} satisfies the identity-form equations
    h = _mat_mul(f, _mat_mul(f, chart["C"], g, 3), chart["Cinv"], 3)
    return GroupElem(ctx, h)


def _su3_unipotents(ctx):
    """All q~^3 chart unipotents as an (n, 3, 3) code array."""
    chart = _su3_chart(ctx)
    f = ctx.field
    q = f.q
    tz = np.array(chart["trace_zero"], dtype=np.int64)
    ts = np.arange(q, dtype=np.int64)
    upart = np.array([_su3_upart(ctx, int(t)) for t in ts], dtype=np.int64)
    corner = f.add_codes(upart[:, None], tz[None, :]).reshape(-1)
    trep = np.repeat(ts, len(tz))
    mt = f.neg_codes(f.frobenius_codes(trep, ctx.sigma_power))
    U1 = np.tile(np.eye(3, dtype=np.int64), (len(trep), 1, 1))
    U1[:, 0, 1] = trep
    U1[:, 0, 2] = corner
    U1[:, 1, 2] = mt
    return U1


def _su3_torus_all(ctx):
    f = ctx.field
    q = f.q
    s = np.arange(1, q, dtype=np.int64)
    sbar = f.frobenius_codes(s, ctx.sigma_power)
    H = np.zeros((q - 1, 3, 3), dtype=np.int64)
    H[:, 0, 0] = s
    H[:, 1, 1] = f.mul_codes(sbar, _inv_codes_vec(f, s))
    H[:, 2, 2] = _inv_codes_vec(f, sbar)
    return H


def _su3_all(ctx):
    chart = _su3_chart(ctx)
    f = ctx.field
    U1 = _su3_unipotents(ctx)
    H = _su3_torus_all(ctx)
    nw = np.array(chart["nw"], dtype=np.int64).reshape(3, 3)
    HN = matmul_codes(f, H, nw[None, :, :])
    big = matmul_codes(f, U1[:, None], HN[None, :]).reshape(-1, 3, 3)
    big = matmul_codes(f, big[:, None], U1[None, :]).reshape(-1, 3, 3)
    small = matmul_codes(f, U1[:, None], H[None, :]).reshape(-1, 3, 3)
    mats = np.concatenate([big, small])
    C = np.array(chart["C"], dtype=np.int64).reshape(3, 3)
    Ci = np.array(chart["Cinv"], dtype=np.int64).reshape(3, 3)
    return matmul_codes(f, matmul_codes(f, C[None], mats), Ci[None])


# ---------------------------------------------------------------------------


def random_uniform(ctx: GroupCtx, rng) -> GroupElem:
    """Exactly uniform element.

    SL_m goes through the Bruhat cells (cell picked with exact probability
    |cell| / |G|, then uniform coordinates); SU3 through the Steinberg chart
    the same way; Sp4 draws a uniform canonical index (enumeration cap
    applies); the cyclic family draws a residue.
    """
    if ctx.family == "Cyclic":
        return GroupElem(ctx, (int(rng.integers(ctx.n)),))
    if ctx.family == "SL":
        from . import bruhat

        return bruhat.sample_uniform(ctx, rng)
    if ctx.family == "SU3":
        from . import bruhat

        return bruhat.su3_sample(ctx, rng)[0]
    if ctx.family == "Sp4":
        if ctx.order > ENUM_CAP:
            raise UnsupportedError(
                f"Sp4 sampling needs the enumeration table; |G| = {ctx.order} > {ENUM_CAP}"
            )
        return element_at(ctx, int(rng.integers(ctx.order)))
    raise UnsupportedError(ctx.family)


def random_pair(ctx: GroupCtx, rng):
    """Independent uniform (a, b) - the standard generator-pair draw."""
    return random_uniform(ctx, rng), random_uniform(ctx, rng)


def generate_subgroup(ctx: GroupCtx, gens):
    """Canonical indices of <gens>, by breadth-first closure (enumerable ctx).

    Works on index permutation tables, so each level is a vectorized gather;
    inverses are included automatically because the group is finite.
    """
    if ctx.order > ENUM_CAP:
        raise NotEnumerableError(f"|G| = {ctx.order} exceeds cap {ENUM_CAP}")
    perms = [mul_perm(ctx, s) for s in gens]
    visited = np.zeros(ctx.order, dtype=bool)
    ident = canonical_index(identity(ctx))
    visited[ident] = True
    frontier = np.array([ident], dtype=np.int64)
    while len(frontier):
        nxt = np.unique(np.concatenate([P[frontier] for P in perms])) if perms else frontier[:0]
        fresh = nxt[~visited[nxt]]
        visited[fresh] = True
        frontier = fresh
    return np.nonzero(visited)[0]
