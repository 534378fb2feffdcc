"""Non-concentration trap estimators: does a random word land in a proper
structural subgroup more often than |G|^{-gamma}?

Words are drawn uniformly from all 4^n letter sequences (the n-step walk
measure; exhaustive oracles enumerate the same 4^n space).  Three trap
families are implemented: subfield concentration of characteristic-poly
coefficients, the SL_2 shared-eigenvector criterion tr[g, g'] = 2 for word
pairs, and the exact polynomial-span certificate; a trace-collision proxy
covers the product-diagonal traps.  gamma is an experiment parameter (the
theory only asserts existence), default 0.05.
"""

import csv
import math
from dataclasses import dataclass
from itertools import combinations_with_replacement

import numpy as np

from . import _kernels as kernels
from . import fields, groups, words
from .errors import (
    DegreeTooLargeError,
    NoProperSubfieldError,
    NotEnumerableError,
    UnsupportedError,
)

DEFAULT_GAMMA = 0.05
DEFAULT_SAMPLES = 10_000
XN_DEGREE_CAP = 3
_XN_REF_DRAW_FACTOR = 4  # reference draws = factor * dim End(V)


@dataclass
class TrapReport:
    family: str
    n: int
    samples: int
    trapped_fraction: float
    degenerate_fraction: float
    stderr: float
    threshold: float
    gamma: float
    verdict: bool  # True = pass (no concentration detected)

    def as_dict(self):
        return dict(self.__dict__)


def _finish_report(family, n, samples, trapped, degenerate, gamma, order):
    frac = trapped / samples if samples else 0.0
    deg = degenerate / samples if samples else 0.0
    threshold = order ** (-gamma)
    assert 0.0 <= frac <= 1.0
    return TrapReport(
        family=family,
        n=n,
        samples=samples,
        trapped_fraction=frac,
        degenerate_fraction=deg,
        stderr=math.sqrt(max(frac * (1 - frac), 0.0) / samples) if samples else 0.0,
        threshold=threshold,
        gamma=gamma,
        verdict=frac <= threshold,
    )


def write_trap_csv(reports, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(
            ["family", "n", "samples", "fraction", "stderr", "threshold", "verdict"]
        )
        for r in reports:
            w.writerow(
                [
                    r.family,
                    r.n,
                    r.samples,
                    repr(r.trapped_fraction),
                    repr(r.stderr),
                    repr(r.threshold),
                    r.verdict,
                ]
            )


# ---------------------------------------------------------------------------
# batched word evaluation (SL_2 fast path, generic fallback)


def _gen_rows(a, b):
    return np.array(
        [a.codes, groups.inv(a).codes, b.codes, groups.inv(b).codes],
        dtype=np.int64,
    )


def sl2_eval_batch(ctx, a, b, letters):
    """Evaluate many letter sequences at once; returns (N, 4) entry codes.

    letters: (N, L) uint8 array of codes into "aAbB"; 255 entries are
    skipped (ragged-length support).
    """
    f = ctx.field
    gens = _gen_rows(a, b)
    letters = np.ascontiguousarray(letters, dtype=np.uint8)
    if letters.ndim != 2:
        letters = letters[None, :]
    if f.q <= fields.Q_TABLE_CAP:
        return kernels.sl2_word_entries(
            letters, gens, f.table("mul"), f.table("add")
        )
    if f.k == 1:
        return _eval_batch_bigprime(f.p, gens, letters)
    out = np.empty((letters.shape[0], 4), dtype=np.int64)
    table = [a, groups.inv(a), b, groups.inv(b)]
    for r in range(letters.shape[0]):
        g = groups.identity(ctx)
        for c in letters[r]:
            if c != 255:
                g = groups.mul(g, table[int(c)])
        out[r] = g.codes
    return out


def _eval_batch_bigprime(p, gens, letters):
    n_rows = letters.shape[0]
    a = np.ones(n_rows, dtype=np.int64)
    b = np.zeros(n_rows, dtype=np.int64)
    c = np.zeros(n_rows, dtype=np.int64)
    d = np.ones(n_rows, dtype=np.int64)
    for j in range(letters.shape[1]):
        lj = letters[:, j]
        act = lj != 255
        if not act.any():
            continue
        g = gens[lj[act].astype(np.int64)]
        aa, bb, cc, dd = a[act], b[act], c[act], d[act]
        a[act] = (aa * g[:, 0] + bb * g[:, 2]) % p
        b[act] = (aa * g[:, 1] + bb * g[:, 3]) % p
        c[act] = (cc * g[:, 0] + dd * g[:, 2]) % p
        d[act] = (cc * g[:, 1] + dd * g[:, 3]) % p
    return np.stack([a, b, c, d], axis=1)


def _letters_batch(n, samples, rng):
    if n == 0:
        return np.zeros((samples, 0), dtype=np.uint8)
    return rng.integers(0, 4, size=(samples, n), dtype=np.uint8)


def _subfield_mask(f, codes, j):
    """Elementwise test code in F_{p^{k/j}} via x^{p^{k/j}} == x."""
    back = f.frobenius_codes(codes, f.k // j)
    return back == np.asarray(codes, dtype=np.int64)


def trap_subfield(a, b, n, samples, j, rng, gamma=DEFAULT_GAMMA):
    """Fraction of words whose char-poly coefficients all lie in the
    index-j subfield; unipotent evaluations are tallied separately as
    degenerate (their coefficients lie in every subfield)."""
    ctx = a.ctx
    f = ctx.field
    if f.k == 1:
        raise NoProperSubfieldError("prime field has no proper subfield")
    if j <= 1 or f.k % j != 0:
        raise NoProperSubfieldError(f"j={j} must divide k={f.k} and exceed 1")
    two = f.from_int(2).code
    if ctx.family == "SL" and ctx.m == 2:
        letters = _letters_batch(n, samples, rng)
        ent = sl2_eval_batch(ctx, a, b, letters)
        tr = f.add_codes(ent[:, 0], ent[:, 3])
        unip = tr == two  # char poly (X-1)^2 exactly when tr = 2, det = 1
        trapped = int((_subfield_mask(f, tr, j) & ~unip).sum())
        degenerate = int(unip.sum())
    else:
        trapped = degenerate = 0
        for _ in range(samples):
            w = words.sample_word(n, rng)
            g = words.evaluate(w, a, b)
            if groups.unipotent_test(g):
                degenerate += 1
                continue
            coeffs = groups.char_poly_coeffs(g)
            if all(
                _subfield_mask(f, np.array([c.code]), j)[0] for c in coeffs
            ):
                trapped += 1
    return _finish_report(
        f"Subfield({j})", n, samples, trapped, degenerate, gamma, ctx.order
    )


def trap_structural_sl2(a, b, n, samples, rng, gamma=DEFAULT_GAMMA):
    """Word pairs sharing an eigenvector over the closure: tr[g, g'] = 2.

    Pairs whose words already commute in the free group are discarded
    (their commutator evaluates to the identity for every pair (a, b), so
    they carry no structural information).
    """
    ctx = a.ctx
    if ctx.family != "SL" or ctx.m != 2:
        raise UnsupportedError("structural trap is SL_2-specific")
    f = ctx.field
    two = f.from_int(2).code
    w1 = _letters_batch(n, samples, rng)
    w2 = _letters_batch(n, samples, rng)
    keep = np.array(
        [
            len(words.reduce_word(words.commutator_word(w1[i], w2[i]))) > 0
            for i in range(samples)
        ]
    )
    w1, w2 = w1[keep], w2[keep]
    kept = int(keep.sum())
    if kept == 0:
        return _finish_report("StructuralSL2", n, 0, 0, 0, gamma, ctx.order)
    comm = np.concatenate(
        [w1, w2, (w1[:, ::-1] ^ 1), (w2[:, ::-1] ^ 1)], axis=1
    )
    ent = sl2_eval_batch(ctx, a, b, comm)
    tr = f.add_codes(ent[:, 0], ent[:, 3])
    trapped = int((tr == two).sum())
    return _finish_report(
        "StructuralSL2", n, kept, trapped, 0, gamma, ctx.order
    )


def product_diag_trap(a1, b1, a2, b2, n, samples, rng, gamma=DEFAULT_GAMMA):
    """Trace-collision proxy for the diagonal traps in a product S x S:
    fraction of words w with tr w(a1, b1) = tr w(a2, b2)."""
    ctx = a1.ctx
    if ctx.family != "SL" or ctx.m != 2:
        raise UnsupportedError("product-diagonal trap is SL_2-specific")
    for g in (b1, a2, b2):
        if g.ctx is not ctx:
            raise UnsupportedError("all four elements must share one context")
    f = ctx.field
    letters = _letters_batch(n, samples, rng)
    e1 = sl2_eval_batch(ctx, a1, b1, letters)
    e2 = sl2_eval_batch(ctx, a2, b2, letters)
    t1 = f.add_codes(e1[:, 0], e1[:, 3])
    t2 = f.add_codes(e2[:, 0], e2[:, 3])
    trapped = int((t1 == t2).sum())
    # |S x S| is the ambient order for the threshold here
    return _finish_report(
        "ProductDiagonal", n, samples, trapped, 0, gamma, ctx.order**2
    )


# ---------------------------------------------------------------------------
# exact span certificate on degree-<=D polynomial functions


def _monomial_basis(D):
    """Exponent 4-tuples of total degree <= D, graded lexicographic."""
    out = []
    for total in range(D + 1):
        seen = set()
        for combo in combinations_with_replacement(range(4), total):
            e = [0, 0, 0, 0]
            for v in combo:
                e[v] += 1
            e = tuple(e)
            if e not in seen:
                seen.add(e)
                out.append(e)
    return sorted(set(out), key=lambda e: (sum(e), e))


class _CodeOps:
    """Vectorized F_q arithmetic on int64 code arrays (prime or table)."""

    def __init__(self, f):
        self.f = f
        self.prime = f.k == 1
        if not self.prime:
            self.add_t = f.table("add")
            self.mul_t = f.table("mul")
            self.inv_t = f.table("inv")
            self.neg_t = f.table("neg")
        self.p = f.p

    def add(self, u, v):
        if self.prime:
            return (u + v) % self.p
        return self.add_t[u, v]

    def mul(self, u, v):
        if self.prime:
            return (u * v) % self.p
        return self.mul_t[u, v]

    def neg(self, u):
        if self.prime:
            return (-u) % self.p
        return self.neg_t[u]

    def inv(self, u):
        if self.prime:
            return pow(int(u), self.p - 2, self.p)
        return int(self.inv_t[u])


class _Echelon:
    """Incremental reduced row echelon basis over F_q (exact)."""

    def __init__(self, ops, length):
        self.ops = ops
        self.length = length
        self.rows = []
        self.pivots = []

    def reduce(self, v):
        v = np.asarray(v, dtype=np.int64).copy()
        for row, piv in zip(self.rows, self.pivots):
            c = v[piv]
            if c:
                v = self.ops.add(v, self.ops.neg(self.ops.mul(c, row)))
        return v

    def insert(self, v):
        """Returns True when v enlarged the span."""
        v = self.reduce(v)
        nz = np.flatnonzero(v)
        if nz.size == 0:
            return False
        piv = int(nz[0])
        v = self.ops.mul(self.ops.inv(v[piv]), v)
        for i, row in enumerate(self.rows):  # back-substitute above
            c = row[piv]
            if c:
                self.rows[i] = self.ops.add(row, self.ops.neg(self.ops.mul(c, v)))
        self.rows.append(v)
        self.pivots.append(piv)
        return True

    @property
    def dim(self):
        return len(self.rows)


def _rho_matrix(ctx, ops, basis, index, g):
    """Matrix of P -> P(g^{-1} h) on the monomial basis, exact over F_q."""
    d = len(basis)
    ginv = np.array(groups.inv(g).codes, dtype=np.int64).reshape(2, 2)
    cols = np.zeros((d, d), dtype=np.int64)
    for col, e in enumerate(basis):
        # expand prod_{ij} (sum_t ginv[i,t] h[t,j])^{e_ij}
        poly = {(0, 0, 0, 0): 1}
        for flat in range(4):
            i, jj = divmod(flat, 2)
            for _ in range(e[flat]):
                new = {}
                for mono, coef in poly.items():
                    for t in range(2):
                        gc = int(ginv[i, t])
                        if gc == 0:
                            continue
                        m2 = list(mono)
                        m2[t * 2 + jj] += 1
                        m2 = tuple(m2)
                        add = int(ops.mul(coef, gc))
                        prev = new.get(m2, 0)
                        new[m2] = int(ops.add(prev, add))
                poly = {m: c for m, c in new.items() if c}
        for mono, coef in poly.items():
            cols[index[mono], col] = coef
    return cols


def _xn_reference_dim(ctx, ops, basis, index, D):
    key = ("xn_ref", D)
    if key in ctx._cache:
        return ctx._cache[key]
    d = len(basis)
    ech = _Echelon(ops, d * d)
    rng = np.random.default_rng(0xC0FFEE)
    draws = _XN_REF_DRAW_FACTOR * d * d
    for _ in range(draws):
        g = groups.random_uniform(ctx, rng)
        ech.insert(_rho_matrix(ctx, ops, basis, index, g).reshape(-1))
        if ech.dim == d * d:
            break
    ctx._cache[key] = ech.dim
    return ech.dim


@dataclass
class XNReport:
    verdict: str  # "ProperTrap" | "SpansFull"
    stabilized_at: int
    dim_ball: int
    dim_ref: int
    D: int

    def as_dict(self):
        return dict(self.__dict__)


def xn_certificate(x, y, D=2):
    """Exact span-growth certificate for the group generated by x, y.

    Grows span(rho(B_n)) with B_n the word ball, via V_{n+1} = V_n +
    sum_s rho(s) V_n, until it stabilizes; compares the stable dimension
    against a randomized estimate of dim span(rho(G)).  ProperTrap means
    the words never leave a proper subvariety-stabilizing subalgebra --
    for generating pairs the two dimensions agree.
    """
    ctx = x.ctx
    if ctx.family != "SL" or ctx.m != 2:
        raise UnsupportedError("span certificate is SL_2-specific")
    if D > XN_DEGREE_CAP:
        raise DegreeTooLargeError(f"D={D} exceeds cap {XN_DEGREE_CAP}")
    f = ctx.field
    if f.k > 1 and f.q > fields.Q_TABLE_CAP:
        raise UnsupportedError("extension field exceeds the op-table cap")
    ops = _CodeOps(f)
    basis = _monomial_basis(D)
    index = {e: i for i, e in enumerate(basis)}
    d = len(basis)
    gens = [x, groups.inv(x), y, groups.inv(y)]
    rho_gens = [_rho_matrix(ctx, ops, basis, index, g) for g in gens]

    ech = _Echelon(ops, d * d)
    ident = np.eye(d, dtype=np.int64).reshape(-1)
    ech.insert(ident)
    frontier = [np.eye(d, dtype=np.int64)]
    steps = 0
    while frontier:
        steps += 1
        new_frontier = []
        for rg in rho_gens:
            for mat in frontier:
                prod = _matmul_mod(ops, rg, mat)
                if ech.insert(prod.reshape(-1)):
                    new_frontier.append(prod)
        frontier = new_frontier
    dim_ref = _xn_reference_dim(ctx, ops, basis, index, D)
    verdict = "ProperTrap" if ech.dim < dim_ref else "SpansFull"
    return XNReport(
        verdict=verdict,
        stabilized_at=steps,
        dim_ball=ech.dim,
        dim_ref=dim_ref,
        D=D,
    )


def _matmul_mod(ops, A, B):
    if ops.prime:
        return (A.astype(np.int64) @ B.astype(np.int64)) % ops.p
    out = np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
    for t in range(A.shape[1]):
        out = ops.add(out, ops.mul(A[:, t : t + 1], B[t : t + 1, :]))
    return out


# ---------------------------------------------------------------------------
# exhaustive oracle (small n) and the aggregated verdict


def exhaustive_trap_fraction(a, b, n, predicate):
    """Exact fraction of all 4^n words w with predicate(w(a, b)).

    The oracle twin of the samplers; n <= 10 keeps 4^n enumeration cheap.
    """
    if n > 10:
        raise DegreeTooLargeError("exhaustive enumeration capped at n = 10")
    ctx = a.ctx
    total = 4**n
    hits = 0
    chunk = 1 << 14
    for lo in range(0, total, chunk):
        hi = min(lo + chunk, total)
        rem = np.arange(lo, hi, dtype=np.int64)
        letters = np.empty((hi - lo, n), dtype=np.uint8)
        for j in range(n):
            letters[:, j] = rem & 3
            rem >>= 2
        if ctx.family == "SL" and ctx.m == 2:
            ent = sl2_eval_batch(ctx, a, b, letters)
            for row in ent:
                g = groups.GroupElem(ctx, tuple(int(v) for v in row))
                hits += bool(predicate(g))
        else:
            for r in range(letters.shape[0]):
                hits += bool(predicate(words.evaluate(letters[r], a, b)))
    return hits / total


def subfield_predicate(ctx, j):
    f = ctx.field

    def pred(g):
        if groups.unipotent_test(g):
            return False
        return all(
            bool(_subfield_mask(f, np.array([c.code]), j)[0])
            for c in groups.char_poly_coeffs(g)
        )

    return pred


def nonconc_verdict(
    a,
    b,
    n=None,
    gamma=DEFAULT_GAMMA,
    samples=DEFAULT_SAMPLES,
    rng=None,
    c0=2.0,
    D=2,
):
    """Run every applicable trap family; word length defaults to the
    2 floor(c0 log|G|) schedule."""
    ctx = a.ctx
    if rng is None:
        rng = np.random.default_rng(0)
    if n is None:
        n = 2 * int(c0 * math.log(ctx.order))
    reports = []
    k = ctx.field.k if ctx.field is not None else 1
    for j in sorted(
        j for j in range(2, k + 1) if k % j == 0
    ):
        reports.append(trap_subfield(a, b, n, samples, j, rng, gamma))
    if ctx.family == "SL" and ctx.m == 2:
        reports.append(trap_structural_sl2(a, b, n, samples, rng, gamma))
        try:
            xn = xn_certificate(a, b, D)
            frac = 1.0 if xn.verdict == "ProperTrap" else 0.0
            reports.append(
                TrapReport(
                    family="XNCert",
                    n=xn.stabilized_at,
                    samples=0,
                    trapped_fraction=frac,
                    degenerate_fraction=0.0,
                    stderr=0.0,
                    threshold=ctx.order ** (-gamma),
                    gamma=gamma,
                    verdict=frac <= ctx.order ** (-gamma),
                )
            )
        except (UnsupportedError, NotEnumerableError):
            pass
    return reports
