"""Finite field arithmetic F_{p^k} in a polynomial basis.

Elements are residues of F_p[x] modulo a fixed monic irreducible of degree k.
The modulus is chosen deterministically: among all monic irreducibles of
degree k it minimizes the coefficient vector read from the x^{k-1} coefficient
down to the constant term, so make(p, k) always builds the same field.

Every element has an integer code sum(c_i * p^i); codes give the canonical
enumeration order and the representation used by the vectorized helpers that
the group/walk modules build their index arithmetic on.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import (
    BadDivisorError,
    ContextMismatchError,
    NonPrimeError,
    TooLargeError,
)

Q_ARITH_CAP = 2**40      # largest field the scalar arithmetic accepts
Q_ENUM_CAP = 2**20       # largest field elements() will enumerate
Q_TABLE_CAP = 2**11      # largest field we build dense q*q op tables for


def _is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid far beyond the 2^31 cap we enforce."""
    if n < 2:
        return False
    for sp in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % sp == 0:
            return n == sp
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


# ---------------------------------------------------------------------------
# polynomial helpers over F_p (coefficient lists, low degree first)


def _poly_trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a, m, p):
    """Remainder of a modulo monic m, both low-first coefficient lists."""
    a = _poly_trim([x % p for x in a])
    dm = len(m) - 1
    while a and len(a) - 1 >= dm:
        shift = len(a) - 1 - dm
        lead = a[-1]
        for i, c in enumerate(m):
            a[i + shift] = (a[i + shift] - lead * c) % p
        _poly_trim(a)
    return a


def _poly_mul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca:
            for j, cb in enumerate(b):
                out[i + j] = (out[i + j] + ca * cb) % p
    return _poly_trim(out)


def _poly_divmod(a, b, p):
    a = _poly_trim([x % p for x in a])
    b = _poly_trim([x % p for x in b])
    binv = pow(b[-1], p - 2, p)
    q = [0] * max(len(a) - len(b) + 1, 1)
    while a and len(a) >= len(b):
        shift = len(a) - len(b)
        factor = a[-1] * binv % p
        q[shift] = factor
        for i, c in enumerate(b):
            a[i + shift] = (a[i + shift] - factor * c) % p
        _poly_trim(a)
    return _poly_trim(q), a


def _poly_gcd(a, b, p):
    a, b = _poly_trim(list(a)), _poly_trim(list(b))
    while b:
        _, r = _poly_divmod(a, b, p)
        a, b = b, r
    return a


def _poly_pow_mod(base, e, m, p):
    out = [1]
    acc = _poly_mod(list(base), list(m), p)
    while e:
        if e & 1:
            out = _poly_mod(_poly_mul(out, acc, p), list(m), p)
        acc = _poly_mod(_poly_mul(acc, acc, p), list(m), p)
        e >>= 1
    return out


def _prime_factors(n: int):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _irreducible(m, p) -> bool:
    """Rabin test: x^{p^n} = x mod m, and gcd(x^{p^{n/l}} - x, m) = 1."""
    n = len(m) - 1
    if n == 1:
        return True
    if m[0] == 0:  # divisible by x
        return False
    # frob[j] = class of x^{p^j} mod m, built by powering the previous one
    frob = [[0, 1]]
    for _ in range(n):
        frob.append(_poly_pow_mod(frob[-1], p, m, p))
    x = [0, 1]
    diff_n = _poly_trim([(a - b) % p for a, b in itertools.zip_longest(frob[n], x, fillvalue=0)])
    if diff_n:
        return False
    for ell in _prime_factors(n):
        u = frob[n // ell]
        diff = _poly_trim([(a - b) % p for a, b in itertools.zip_longest(u, x, fillvalue=0)])
        if len(_poly_gcd(m, diff, p)) != 1:
            return False
    return True


def _find_modulus(p: int, k: int):
    """Lowest monic irreducible of degree k: minimize (c_{k-1}, ..., c_0)."""
    if k == 1:
        return [0, 1]
    for head in itertools.product(range(p), repeat=k):
        cand = list(reversed(head)) + [1]  # head = (c_{k-1}, ..., c_0)
        if _irreducible(cand, p):
            return cand
    raise AssertionError("no irreducible found (unreachable)")


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FieldElem:
    """Element of F_{p^k}: coefficient tuple (c_0, ..., c_{k-1}), low first."""

    ctx: "FieldCtx"
    coeffs: tuple

    @property
    def code(self) -> int:
        c = 0
        for ci in reversed(self.coeffs):
            c = c * self.ctx.p + ci
        return c

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def __repr__(self):
        return f"F({self.ctx.p}^{self.ctx.k}):{list(self.coeffs)}"


class FieldCtx:
    """Context object holding the modulus and cached structure of F_{p^k}."""

    def __init__(self, p: int, k: int, _token=None):
        if _token is not _CTX_TOKEN:
            raise TypeError("use fields.make(p, k)")
        self.p = p
        self.k = k
        self.q = p**k
        self.modulus = tuple(_find_modulus(p, k))
        # reduction rows: coeffs of x^{k+t} mod modulus, t = 0..k-2
        red = []
        cur = [(-c) % p for c in self.modulus[:-1]]  # x^k
        red.append(list(cur))
        for _ in range(k - 2):
            cur = [0] + cur
            cur = _poly_mod(cur, list(self.modulus), p)
            cur = cur + [0] * (k - len(cur))
            red.append(list(cur))
        self._red = red
        self.zero = FieldElem(self, (0,) * k)
        one = [1] + [0] * (k - 1)
        self.one = FieldElem(self, tuple(one))
        # frobenius matrix: column i = coeffs of (x^i)^p mod modulus
        frob = np.zeros((k, k), dtype=np.int64)
        for i in range(k):
            img = _poly_mod([0] * (i * p) + [1], list(self.modulus), p)
            img = img + [0] * (k - len(img))
            frob[:, i] = img
        self._frob_mat = frob
        self._tables = {}

    def __repr__(self):
        return f"FieldCtx(p={self.p}, k={self.k})"

    # -- element construction ------------------------------------------------

    def from_coeffs(self, coeffs) -> FieldElem:
        cs = tuple(int(c) % self.p for c in coeffs)
        if len(cs) != self.k:
            raise ValueError(f"need {self.k} coefficients, got {len(cs)}")
        return FieldElem(self, cs)

    def from_int(self, n: int) -> FieldElem:
        """Image of the rational integer n (prime-subfield element)."""
        return FieldElem(self, (int(n) % self.p,) + (0,) * (self.k - 1))

    def from_code(self, code: int) -> FieldElem:
        code = int(code)
        if not 0 <= code < self.q:
            raise ValueError(f"code {code} out of range for q={self.q}")
        cs = []
        for _ in range(self.k):
            code, r = divmod(code, self.p)
            cs.append(r)
        return FieldElem(self, tuple(cs))

    # -- vectorized code arithmetic (numpy int64 arrays of codes) -----------

    def decode_array(self, codes):
        """(n,) codes -> (n, k) coefficient array."""
        codes = np.asarray(codes, dtype=np.int64)
        out = np.empty(codes.shape + (self.k,), dtype=np.int64)
        rem = codes
        for i in range(self.k):
            rem, out[..., i] = np.divmod(rem, self.p)[0], rem % self.p
        return out

    def encode_array(self, coeffs):
        coeffs = np.asarray(coeffs, dtype=np.int64)
        out = np.zeros(coeffs.shape[:-1], dtype=np.int64)
        for i in range(self.k - 1, -1, -1):
            out = out * self.p + coeffs[..., i]
        return out

    def add_codes(self, a, b):
        if self.k == 1:
            return (np.asarray(a, dtype=np.int64) + np.asarray(b, dtype=np.int64)) % self.p
        return self.encode_array((self.decode_array(a) + self.decode_array(b)) % self.p)

    def neg_codes(self, a):
        if self.k == 1:
            return (-np.asarray(a, dtype=np.int64)) % self.p
        return self.encode_array((-self.decode_array(a)) % self.p)

    def mul_codes(self, a, b):
        if self.k == 1:
            return (np.asarray(a, dtype=np.int64) * np.asarray(b, dtype=np.int64)) % self.p
        A = self.decode_array(a)
        B = self.decode_array(b)
        A, B = np.broadcast_arrays(A, B)
        k, p = self.k, self.p
        prod = np.zeros(A.shape[:-1] + (2 * k - 1,), dtype=np.int64)
        for i in range(k):
            for j in range(k):
                prod[..., i + j] += A[..., i] * B[..., j]
        prod %= p
        low = prod[..., :k].copy()
        for t in range(k - 1):
            hi = prod[..., k + t]
            for s in range(k):
                r = self._red[t][s]
                if r:
                    low[..., s] += hi * r
        low %= p
        return self.encode_array(low)

    def frob_power_matrix(self, s: int):
        """k x k matrix of x -> x^{p^s} on coefficient vectors (mod-safe)."""
        mat = np.eye(self.k, dtype=np.int64)
        for _ in range(s % self.k):
            mat = (self._frob_mat @ mat) % self.p
        return mat

    def frobenius_codes(self, a, s: int):
        """x -> x^{p^s} applied elementwise to an array of codes."""
        if self.k == 1 or s % self.k == 0:
            return np.asarray(a, dtype=np.int64).copy()
        mat = self.frob_power_matrix(s)
        A = self.decode_array(a)
        out = np.tensordot(A, mat.T, axes=([A.ndim - 1], [0])) % self.p
        return self.encode_array(out)

    # -- dense op tables -----------------------------------------------------

    def table(self, kind: str):
        """Dense (q, q) or (q,) int64 op table; kind in add/mul/neg/inv."""
        if self.q > Q_TABLE_CAP:
            raise TooLargeError(f"q={self.q} exceeds table cap {Q_TABLE_CAP}")
        if kind in self._tables:
            return self._tables[kind]
        q = self.q
        codes = np.arange(q, dtype=np.int64)
        if kind == "add":
            t = self.add_codes(codes[:, None], codes[None, :])
        elif kind == "mul":
            t = np.empty((q, q), dtype=np.int64)
            step = max(1, (1 << 22) // q)
            for lo in range(0, q, step):
                hi = min(lo + step, q)
                t[lo:hi] = self.mul_codes(codes[lo:hi, None], codes[None, :])
        elif kind == "neg":
            t = self.neg_codes(codes)
        elif kind == "inv":
            mul = self.table("mul")
            t = np.zeros(q, dtype=np.int64)
            rows, cols = np.nonzero(mul == 1)
            t[rows] = cols
        else:
            raise ValueError(kind)
        self._tables[kind] = t
        return t


_CTX_TOKEN = object()


@lru_cache(maxsize=None)
def make(p: int, k: int = 1) -> FieldCtx:
    """Build (or fetch the cached) F_{p^k} context.

    p must be prime and below 2^31, 1 <= k <= 6, and p^k <= 2^40.
    """
    p, k = int(p), int(k)
    if p >= 2**31 or not _is_prime(p):
        raise NonPrimeError(f"p={p} is not a prime below 2^31")
    if not 1 <= k <= 6:
        raise TooLargeError(f"extension degree k={k} outside 1..6")
    if p**k > Q_ARITH_CAP:
        raise TooLargeError(f"q=p^k={p**k} exceeds cap 2^40")
    return FieldCtx(p, k, _token=_CTX_TOKEN)


def _check(x: FieldElem, y: FieldElem = None):
    if y is not None and x.ctx is not y.ctx:
        raise ContextMismatchError(f"{x.ctx} vs {y.ctx}")
    return x.ctx


def add(x: FieldElem, y: FieldElem) -> FieldElem:
    ctx = _check(x, y)
    return FieldElem(ctx, tuple((a + b) % ctx.p for a, b in zip(x.coeffs, y.coeffs)))


def sub(x: FieldElem, y: FieldElem) -> FieldElem:
    ctx = _check(x, y)
    return FieldElem(ctx, tuple((a - b) % ctx.p for a, b in zip(x.coeffs, y.coeffs)))


def neg(x: FieldElem) -> FieldElem:
    ctx = x.ctx
    return FieldElem(ctx, tuple((-a) % ctx.p for a in x.coeffs))


def mul(x: FieldElem, y: FieldElem) -> FieldElem:
    ctx = _check(x, y)
    p, k = ctx.p, ctx.k
    prod = [0] * (2 * k - 1)
    for i, a in enumerate(x.coeffs):
        if a:
            for j, b in enumerate(y.coeffs):
                prod[i + j] = (prod[i + j] + a * b) % p
    low = prod[:k]
    for t in range(k - 1):
        hi = prod[k + t]
        if hi:
            row = ctx._red[t]
            for s in range(k):
                low[s] = (low[s] + hi * row[s]) % p
    return FieldElem(ctx, tuple(low))


def inv(x: FieldElem) -> FieldElem:
    """Multiplicative inverse by extended Euclid in F_p[x]."""
    ctx = x.ctx
    if x.is_zero():
        raise ZeroDivisionError("inverse of zero in finite field")
    p = ctx.p
    if ctx.k == 1:
        return FieldElem(ctx, (pow(x.coeffs[0], p - 2, p),))
    # invariant: r0 = s0 * x (mod modulus), r1 = s1 * x (mod modulus)
    r0, r1 = list(ctx.modulus), _poly_trim(list(x.coeffs))
    s0, s1 = [], [1]
    while r1:
        qpoly, rem = _poly_divmod(r0, r1, p)
        r0, r1 = r1, rem
        snew = [
            (a - b) % p
            for a, b in itertools.zip_longest(s0, _poly_mul(qpoly, s1, p), fillvalue=0)
        ]
        s0, s1 = s1, _poly_trim(snew)
    # r0 is now a nonzero constant gcd
    c = pow(r0[0], p - 2, p)
    out = [(c * a) % p for a in s0]
    out = out + [0] * (ctx.k - len(out))
    return FieldElem(ctx, tuple(out[: ctx.k]))


def power(x: FieldElem, e: int) -> FieldElem:
    if e < 0:
        return power(inv(x), -e)
    out = x.ctx.one
    base = x
    while e:
        if e & 1:
            out = mul(out, base)
        base = mul(base, base)
        e >>= 1
    return out


def frobenius(x: FieldElem, s: int = 1) -> FieldElem:
    """The field automorphism x -> x^{p^s}."""
    ctx = x.ctx
    s = s % ctx.k
    if s == 0:
        return x
    mat = ctx.frob_power_matrix(s)
    vec = (mat @ np.array(x.coeffs, dtype=np.int64)) % ctx.p
    return FieldElem(ctx, tuple(int(c) for c in vec))


def subfield_member(x: FieldElem, j: int) -> bool:
    """True iff x lies in the index-j subfield F_{p^{k/j}}.

    Membership test: x is fixed by the power-(p^{k/j}) Frobenius.
    """
    ctx = x.ctx
    if j <= 0 or ctx.k % j != 0:
        raise BadDivisorError(f"j={j} does not divide k={ctx.k}")
    return frobenius(x, ctx.k // j) == x


def trace_to_subfield(x: FieldElem, s: int) -> FieldElem:
    """Relative trace x + x^{p^s} + ... over the fixed field of frobenius^s."""
    ctx = x.ctx
    if ctx.k % s != 0:
        raise BadDivisorError(f"s={s} does not divide k={ctx.k}")
    out = x
    y = x
    for _ in range(ctx.k // s - 1):
        y = frobenius(y, s)
        out = add(out, y)
    return out


def elements(ctx: FieldCtx):
    """Generator over all field elements in canonical (code) order."""
    if ctx.q > Q_ENUM_CAP:
        raise TooLargeError(f"q={ctx.q} exceeds enumeration cap {Q_ENUM_CAP}")
    for code in range(ctx.q):
        yield ctx.from_code(code)


def solve_trace(ctx: FieldCtx, target: FieldElem, s: int) -> FieldElem:
    """A particular u with u + u^{p^s} = target (relative trace over degree-2).

    Only the quadratic case k = 2s is supported (what the twisted-group chart
    needs). In odd characteristic u = target/2 works when target is fixed by
    the involution; otherwise we solve the F_p-linear system directly.
    """
    if ctx.k != 2 * s:
        raise BadDivisorError("solve_trace needs k = 2*s")
    if ctx.p != 2:
        half = inv(ctx.from_int(2))
        cand = mul(target, half)
        if add(cand, frobenius(cand, s)) == target:
            return cand
    # linear solve over F_p: (F + I) u = target with F the frobenius matrix
    mat = (ctx.frob_power_matrix(s) + np.eye(ctx.k, dtype=np.int64)) % ctx.p
    t = np.array(target.coeffs, dtype=np.int64)
    sol = _solve_mod_p(mat, t, ctx.p)
    if sol is None:
        raise ValueError("trace equation has no solution (target not in trace image)")
    return FieldElem(ctx, tuple(int(c) for c in sol))


def _solve_mod_p(mat, rhs, p):
    """Gaussian elimination solve of mat @ x = rhs over F_p (small systems)."""
    m = np.concatenate([mat % p, (rhs % p)[:, None]], axis=1).astype(np.int64)
    rows, cols = mat.shape
    piv_cols = []
    r = 0
    for c in range(cols):
        pivot = None
        for rr in range(r, rows):
            if m[rr, c] % p:
                pivot = rr
                break
        if pivot is None:
            continue
        m[[r, pivot]] = m[[pivot, r]]
        m[r] = m[r] * pow(int(m[r, c]), p - 2, p) % p
        for rr in range(rows):
            if rr != r and m[rr, c]:
                m[rr] = (m[rr] - m[rr, c] * m[r]) % p
        piv_cols.append(c)
        r += 1
    for rr in range(r, rows):
        if m[rr, -1] % p:
            return None
    x = np.zeros(cols, dtype=np.int64)
    for i, c in enumerate(piv_cols):
        x[c] = m[i, -1]
    return x
