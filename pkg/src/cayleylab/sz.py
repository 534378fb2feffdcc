"""Exhaustive zero counting for multivariate polynomials over finite fields.

Everything here is exact: a polynomial is a dict of integer exponent vectors
with coefficient codes, evaluation is vectorised field arithmetic, and counts
come from full (chunked) enumeration of the point set -- F_q^d, a matrix
group, or a product of two copies of a matrix group.

Two kinds of bound are attached to the counts.  The affine count carries the
provable bound d*D*q^(d-1), which is asserted whenever the polynomial does
not vanish at every point (a polynomial that is zero as a function is only
flagged, never asserted against).  The group-level counts carry the
reference scale D * q^(-1/d_twist) * |G| (d_twist = 2 for the unitary family,
whose point set is cut out over the subfield, else 1); the constant hiding in
that scale is unknown, so we report the measured ratio and never assert it.
"""

import csv
import json
import math

import numpy as np

from . import bruhat, fields, groups
from .errors import ContextMismatchError, TooLargeError, UnsupportedError

AFFINE_CAP = 10**8       # max number of affine points enumerated
GROUP_CAP = 10**7        # max group order for single-copy counts
PAIR_CAP = 10**8         # max |G|^2 for pair counts
_CHUNK = 1 << 16


def _pow_codes(f, arr, e):
    """Elementwise e-th power of an array of field codes (square and multiply)."""
    out = np.full(arr.shape, f.from_int(1).code, dtype=np.int64)
    base = arr
    while e:
        if e & 1:
            out = f.mul_codes(out, base)
        base = f.mul_codes(base, base) if e > 1 else base
        e >>= 1
    return out


class Poly:
    """Multivariate polynomial with coefficients in a finite field.

    ``terms`` maps exponent tuples (length ``nvars``) to nonzero coefficient
    codes.  Duplicate exponent vectors passed to the constructor are merged by
    field addition and terms whose coefficient cancels to zero are dropped, so
    the stored form is canonical: the zero polynomial is exactly the one with
    no terms.
    """

    __slots__ = ("field", "nvars", "terms", "_degree")

    def __init__(self, field, nvars, terms):
        self.field = field
        self.nvars = int(nvars)
        assert self.nvars >= 0
        merged = {}
        items = terms.items() if isinstance(terms, dict) else terms
        for exps, c in items:
            exps = tuple(int(e) for e in exps)
            assert len(exps) == self.nvars and all(e >= 0 for e in exps)
            c = int(c)
            assert 0 <= c < field.q
            if exps in merged:
                c = int(field.add_codes(merged[exps], c))
            if c == 0:
                merged.pop(exps, None)
            else:
                merged[exps] = c
        self.terms = merged
        self._degree = max((sum(e) for e in merged), default=0)

    @property
    def degree(self):
        """Total degree; 0 for the zero polynomial."""
        return self._degree

    @property
    def is_zero(self):
        return not self.terms

    def coeff(self, exps):
        return self.terms.get(tuple(int(e) for e in exps), 0)

    def eval_batch(self, pts):
        """Evaluate at each row of an (n, nvars) array of codes."""
        pts = np.asarray(pts, dtype=np.int64)
        assert pts.ndim == 2 and pts.shape[1] == self.nvars
        f = self.field
        acc = np.zeros(len(pts), dtype=np.int64)
        for exps, c in self.terms.items():
            t = np.full(len(pts), c, dtype=np.int64)
            for i, e in enumerate(exps):
                if e:
                    t = f.mul_codes(t, _pow_codes(f, pts[:, i], e))
            acc = f.add_codes(acc, t)
        return acc

    def evaluate(self, point):
        pt = np.asarray([list(point)], dtype=np.int64)
        return int(self.eval_batch(pt)[0])

    def substitute(self, assignment):
        """Partial evaluation: fix some variables to field codes.

        ``assignment`` maps variable indices to codes.  The remaining
        variables keep their relative order and are renumbered from 0.
        """
        f = self.field
        keep = [i for i in range(self.nvars) if i not in assignment]
        new_terms = []
        for exps, c in self.terms.items():
            for i, v in assignment.items():
                e = exps[i]
                if e:
                    c = int(f.mul_codes(np.int64(c), _pow_codes(f, np.array([v], dtype=np.int64), e)[0]))
            new_terms.append((tuple(exps[i] for i in keep), c))
        return Poly(f, len(keep), new_terms)

    def __eq__(self, other):
        return (isinstance(other, Poly) and self.field is other.field
                and self.nvars == other.nvars and self.terms == other.terms)

    def __hash__(self):
        return hash((id(self.field), self.nvars, tuple(sorted(self.terms.items()))))

    def __repr__(self):
        return "Poly(q=%d, nvars=%d, terms=%d, degree=%d)" % (
            self.field.q, self.nvars, len(self.terms), self.degree)

    def to_dict(self):
        return {
            "p": self.field.p,
            "k": self.field.k,
            "nvars": self.nvars,
            "terms": sorted([list(e), c] for e, c in self.terms.items()),
        }

    @classmethod
    def from_dict(cls, d, field=None):
        if field is None:
            field = fields.make(d["p"], d["k"])
        assert field.p == d["p"] and field.k == d["k"]
        return cls(field, d["nvars"], [(tuple(e), c) for e, c in d["terms"]])


def monomial(field, nvars, exps, coeff=1):
    return Poly(field, nvars, [(tuple(exps), field.from_int(coeff).code if coeff < field.p else coeff)])


def constant(field, nvars, c):
    return Poly(field, nvars, [((0,) * nvars, c)])


def entry_index(m, i, j, copy=0):
    """Variable index of matrix entry (i, j) in row-major order.

    ``copy`` selects the factor when the polynomial lives on pairs: 0 for the
    first matrix (variables 0..m^2-1), 1 for the second (m^2..2m^2-1).
    """
    assert 0 <= i < m and 0 <= j < m and copy in (0, 1)
    return copy * m * m + i * m + j


def entry_poly(field, m, i, j, copy=0, npairs=1):
    """The polynomial picking out one matrix entry."""
    nv = npairs * m * m
    e = [0] * nv
    e[entry_index(m, i, j, copy)] = 1
    return monomial(field, nv, e)


def _affine_points(q, nvars, lo, hi):
    """Rows lo..hi-1 of the lexicographic enumeration of codes in [0,q)^nvars."""
    idx = np.arange(lo, hi, dtype=np.int64)
    pts = np.empty((len(idx), nvars), dtype=np.int64)
    for i in range(nvars):
        pts[:, i] = (idx // q**i) % q
    return pts


def zero_count_affine(P, d=None):
    """Exact number of zeros of P on the affine space of dimension d.

    ``d`` defaults to the number of variables; a larger ``d`` treats P as a
    polynomial in d variables that ignores the extra ones.  When P is not
    zero at every point the count is asserted against d*D*q^(d-1); a
    polynomial that vanishes everywhere (count == q**d) is the caller's
    signal that the bound does not apply.
    """
    f = P.field
    q = f.q
    if d is None:
        d = P.nvars
    assert d >= P.nvars, "d must cover all variables of P"
    total = q**d
    if total > AFFINE_CAP:
        raise TooLargeError("affine point set of size %d exceeds cap %d" % (total, AFFINE_CAP))
    base = q**P.nvars
    count = 0
    for lo in range(0, base, _CHUNK):
        pts = _affine_points(q, P.nvars, lo, min(lo + _CHUNK, base))
        count += int(np.count_nonzero(P.eval_batch(pts) == 0))
    count *= q ** (d - P.nvars)
    if count < total:
        assert count <= d * P.degree * q ** (d - 1), \
            "zero count %d exceeds bound %d" % (count, d * P.degree * q ** (d - 1))
    return count


def affine_report(P, d=None):
    """Count plus bound and measured ratio, as a dict (for the CSV audit)."""
    q = P.field.q
    if d is None:
        d = P.nvars
    count = zero_count_affine(P, d)
    bound = d * P.degree * q ** (d - 1)
    if bound > 0:
        ratio = count / bound
    else:
        ratio = 0.0 if count == 0 else math.inf
    return {
        "D": P.degree,
        "q": q,
        "d": d,
        "count": count,
        "bound": bound,
        "ratio": ratio,
        "identically_zero": count == q**d,
    }


def _group_scale(ctx):
    """(q, d_twist) entering the reference scale D * q^(-1/d_twist) * |G|."""
    if ctx.family == "SU3":
        return ctx.qt, 2
    return ctx.field.q, 1


def _check_group_poly(P, ctx, copies):
    if ctx.family == "Cyclic":
        raise UnsupportedError("zero counting on matrix entries needs a matrix family")
    if P.field is not ctx.field and (P.field.p, P.field.k) != (ctx.field.p, ctx.field.k):
        raise ContextMismatchError("polynomial field F_%d does not match group entries" % P.field.q)
    want = copies * ctx.m * ctx.m
    if P.nvars != want:
        raise ContextMismatchError("expected %d matrix-entry variables, got %d" % (want, P.nvars))


def _count_on_rows(P, rows):
    count = 0
    for lo in range(0, len(rows), _CHUNK):
        count += int(np.count_nonzero(P.eval_batch(rows[lo:lo + _CHUNK]) == 0))
    return count


def zero_count_group(P, ctx):
    """Exact zero count of P over the whole group, with the reference ratio.

    P lives on the m^2 matrix entries in row-major order (see entry_index).
    Returns count, the scale D*q^(-1/d_twist)*|G|, the measured ratio
    count/scale, and an ``identically_zero`` flag for polynomials that vanish
    on every group element (determinant-type relations); the ratio is
    reported either way and never asserted.
    """
    _check_group_poly(P, ctx, copies=1)
    if ctx.order > GROUP_CAP:
        raise TooLargeError("group of order %d exceeds cap %d" % (ctx.order, GROUP_CAP))
    rows = groups.all_mats(ctx).reshape(ctx.order, -1)
    count = _count_on_rows(P, rows)
    q, d_twist = _group_scale(ctx)
    bound = P.degree * q ** (-1.0 / d_twist) * ctx.order
    if bound > 0:
        ratio = count / bound
    else:
        ratio = 0.0 if count == 0 else math.inf
    return {
        "count": count,
        "bound": bound,
        "ratio": ratio,
        "identically_zero": count == ctx.order,
        "D": P.degree,
        "q": q,
        "order": ctx.order,
    }


def zero_count_group_bruhat(P, ctx):
    """Same count as zero_count_group, but streaming over Bruhat cells.

    Only for the SL family (the cell enumeration is written for it).  Used as
    an independent route to cross-check the canonical-index enumeration.
    """
    _check_group_poly(P, ctx, copies=1)
    if ctx.family != "SL":
        raise UnsupportedError("cell streaming is implemented for SL only")
    if ctx.order > GROUP_CAP:
        raise TooLargeError("group of order %d exceeds cap %d" % (ctx.order, GROUP_CAP))
    count = 0
    seen = 0
    for w in bruhat.weyl_permutations(ctx.m):
        mats = bruhat.cell_elements(ctx, w)
        count += _count_on_rows(P, mats.reshape(len(mats), -1))
        seen += len(mats)
    assert seen == ctx.order
    return count


def zero_count_pairs(P, ctx):
    """Exact zero count of P over ordered pairs of group elements.

    P lives on 2*m^2 variables: entries of the first matrix, then entries of
    the second.  The enumeration fixes the first element, specialises P to a
    polynomial in the second, and counts the slice; summing slices gives the
    pair count.  The per-slice tallies also verify the decomposition
    count <= (#degenerate slices)*|G| + (#rest)*max_nondegenerate_slice,
    where a slice is degenerate when the specialised polynomial vanishes on
    the whole group.
    """
    _check_group_poly(P, ctx, copies=2)
    if ctx.order ** 2 > PAIR_CAP:
        raise TooLargeError("|G|^2 = %d exceeds cap %d" % (ctx.order**2, PAIR_CAP))
    rows = groups.all_mats(ctx).reshape(ctx.order, -1)
    nv = ctx.m * ctx.m
    slice_counts = np.empty(ctx.order, dtype=np.int64)
    for ia in range(ctx.order):
        Pa = P.substitute({i: int(rows[ia, i]) for i in range(nv)})
        if Pa.is_zero:
            slice_counts[ia] = ctx.order
        else:
            slice_counts[ia] = _count_on_rows(Pa, rows)
    count = int(slice_counts.sum())
    degenerate = int(np.count_nonzero(slice_counts == ctx.order))
    rest = slice_counts[slice_counts < ctx.order]
    max_slice = int(rest.max()) if len(rest) else 0
    fubini_bound = degenerate * ctx.order + (ctx.order - degenerate) * max_slice
    assert count <= fubini_bound
    q, d_twist = _group_scale(ctx)
    bound = P.degree * q ** (-1.0 / d_twist) * ctx.order ** 2
    if bound > 0:
        ratio = count / bound
    else:
        ratio = 0.0 if count == 0 else math.inf
    return {
        "count": count,
        "bound": bound,
        "ratio": ratio,
        "identically_zero": count == ctx.order ** 2,
        "degenerate_slices": degenerate,
        "max_slice": max_slice,
        "fubini_bound": fubini_bound,
        "fubini_holds": count <= fubini_bound,
        "D": P.degree,
        "q": q,
        "order": ctx.order,
    }


_FUZZ_FIELDS = [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2), (11, 1)]


def fuzz_corpus(n=1000, seed=0, d_max=3, deg_max=5, q_max=11, max_terms=6):
    """Deterministic corpus of random polynomials (prime-power fields up to q_max).

    Coefficient collisions may cancel a term or the whole polynomial; the
    occasional zero polynomial is kept on purpose, since the audit has to
    handle the vanishing case.
    """
    rng = np.random.default_rng(seed)
    cache = {}
    specs = [(p, k) for p, k in _FUZZ_FIELDS if p**k <= q_max]
    polys = []
    for _ in range(n):
        p, k = specs[rng.integers(len(specs))]
        if (p, k) not in cache:
            cache[(p, k)] = fields.make(p, k)
        f = cache[(p, k)]
        d = int(rng.integers(1, d_max + 1))
        terms = []
        for _ in range(int(rng.integers(1, max_terms + 1))):
            tot = int(rng.integers(0, deg_max + 1))
            exps = np.bincount(rng.integers(0, d, size=tot), minlength=d) if tot else np.zeros(d, dtype=np.int64)
            coeff = int(rng.integers(1, f.q))
            terms.append((tuple(int(e) for e in exps), coeff))
        polys.append(Poly(f, d, terms))
    return polys


def save_corpus(polys, path):
    with open(path, "w") as fh:
        json.dump([P.to_dict() for P in polys], fh)


def load_corpus(path):
    with open(path) as fh:
        data = json.load(fh)
    cache = {}
    out = []
    for d in data:
        key = (d["p"], d["k"])
        if key not in cache:
            cache[key] = fields.make(*key)
        out.append(Poly.from_dict(d, cache[key]))
    return out


AUDIT_COLUMNS = ["poly_id", "D", "q", "count", "bound", "ratio"]


def affine_audit(polys, csv_path=None):
    """Run the affine count on each polynomial; optionally write the CSV report.

    Row order and ids follow the input list.  The bound assert inside
    zero_count_affine fires on any violation, so a completed audit is itself
    the certificate that the corpus respects the bound.
    """
    rows = []
    for pid, P in enumerate(polys):
        rep = affine_report(P)
        rows.append({
            "poly_id": pid,
            "D": rep["D"],
            "q": rep["q"],
            "count": rep["count"],
            "bound": rep["bound"],
            "ratio": rep["ratio"],
        })
    if csv_path is not None:
        with open(csv_path, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=AUDIT_COLUMNS)
            writer.writeheader()
            writer.writerows(rows)
    return rows
