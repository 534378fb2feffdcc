"""Formal words over two generators, free reduction, evaluation, and
return-probability statistics for the simple random walk on the free group.

Words are stored UNREDUCED as uint8 code arrays; reduction is always an
explicit call.  Letter codes: 0 = a, 1 = a^{-1}, 2 = b, 3 = b^{-1}, so the
inverse letter is code ^ 1.  String form uses "a", "b" with capitals for
inverses ("A" = a^{-1}).  The leftmost letter is the leftmost factor:
evaluate("ab") = a * b.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from . import groups

LETTERS = "aAbB"
_CODE = {c: i for i, c in enumerate(LETTERS)}


def from_string(s: str) -> np.ndarray:
    try:
        return np.array([_CODE[c] for c in s], dtype=np.uint8)
    except KeyError as e:
        raise ValueError(f"letter {e.args[0]!r} not in alphabet {LETTERS!r}") from None


def to_string(w) -> str:
    return "".join(LETTERS[int(c)] for c in np.asarray(w))


def sample_word(n: int, rng) -> np.ndarray:
    """Uniform over all 4^n unreduced words of length exactly n."""
    if n < 0:
        raise ValueError("word length must be >= 0")
    return rng.integers(0, 4, size=n, dtype=np.uint8)


def inverse_word(w) -> np.ndarray:
    w = np.asarray(w, dtype=np.uint8)
    return (w[::-1] ^ 1).astype(np.uint8)


def concat(*ws) -> np.ndarray:
    return np.concatenate([np.asarray(w, dtype=np.uint8) for w in ws])


def commutator_word(w1, w2) -> np.ndarray:
    return concat(w1, w2, inverse_word(w1), inverse_word(w2))


def reduce_word(w) -> np.ndarray:
    """Freely reduce: repeatedly cancel adjacent inverse pairs."""
    stack = []
    for c in np.asarray(w, dtype=np.uint8):
        if stack and stack[-1] == c ^ 1:
            stack.pop()
        else:
            stack.append(int(c))
    return np.array(stack, dtype=np.uint8)


def evaluate(w, a, b):
    """Substitution homomorphism: leftmost letter is the leftmost factor."""
    ctx = a.ctx
    if b.ctx is not ctx:
        from .errors import ContextMismatchError

        raise ContextMismatchError("a and b live in different group contexts")
    table = [a, groups.inv(a), b, groups.inv(b)]
    out = groups.identity(ctx)
    for c in np.asarray(w, dtype=np.uint8):
        out = groups.mul(out, table[int(c)])
    return out


def sample_reduced_word(n: int, rng) -> np.ndarray:
    """Uniform over the 4 * 3^{n-1} freely reduced words of length n."""
    if n == 0:
        return np.zeros(0, dtype=np.uint8)
    out = np.empty(n, dtype=np.uint8)
    out[0] = rng.integers(4)
    for i in range(1, n):
        step = int(rng.integers(3))
        forbidden = out[i - 1] ^ 1
        choices = [c for c in range(4) if c != forbidden]
        out[i] = choices[step]
    return out


# ---------------------------------------------------------------------------
# Kesten return probabilities on the 4-regular tree


def distance_counts(n: int):
    """N_n(d) = number of length-n words whose reduction has length d.

    Exact big-integer dynamic programming on the distance-from-root profile
    of the 4-regular tree: from distance 0 all 4 letters move out; from
    d >= 1 one letter backtracks and 3 move out.
    """
    N = [0] * (n + 2)
    N[0] = 1
    for _ in range(n):
        M = [0] * (n + 2)
        M[0] = N[1]
        if n >= 1:
            M[1] = 4 * N[0] + N[2]
        for d in range(2, n + 1):
            M[d] = 3 * N[d - 1] + N[d + 1]
        N = M
    return N[: n + 1]


def return_count(n: int) -> int:
    return distance_counts(n)[0]


def return_probability(n: int) -> Fraction:
    """Exact P(reduce(w) = empty) for uniform w of length n (0 for odd n)."""
    if n % 2:
        return Fraction(0)
    return Fraction(return_count(n), 4**n)


def return_probability_mc(n: int, trials: int, rng):
    """Monte Carlo estimate of return_probability with its standard error."""
    hits = 0
    chunk = max(1, min(trials, (1 << 22) // max(n, 1)))
    done = 0
    while done < trials:
        c = min(chunk, trials - done)
        letters = rng.integers(0, 4, size=(c, n), dtype=np.uint8)
        hits += int(np.sum(_reduced_lengths(letters) == 0))
        done += c
    p = hits / trials
    se = np.sqrt(p * (1 - p) / trials)
    return p, se


def _reduced_lengths(letters: np.ndarray) -> np.ndarray:
    """Vectorized stack simulation: reduced length of each row."""
    nw, n = letters.shape
    stack = np.zeros((nw, n), dtype=np.uint8)
    sp = np.zeros(nw, dtype=np.int64)
    rows = np.arange(nw)
    for j in range(n):
        c = letters[:, j]
        top = stack[rows, np.maximum(sp - 1, 0)]
        cancel = (sp > 0) & (top == (c ^ 1))
        sp = np.where(cancel, sp - 1, sp)
        push = ~cancel
        stack[rows[push], sp[push]] = c[push]
        sp = np.where(push, sp + 1, sp)
    return sp


def enumerate_return_count(n: int) -> int:
    """Independent oracle: count returning words by full 4^n enumeration."""
    if n > 12:
        raise ValueError("full enumeration capped at n = 12 (4^12 words)")
    if n == 0:
        return 1
    total = 4**n
    count = 0
    chunk = 1 << 18
    for lo in range(0, total, chunk):
        hi = min(lo + chunk, total)
        idx = np.arange(lo, hi, dtype=np.int64)
        letters = np.empty((hi - lo, n), dtype=np.uint8)
        rem = idx
        for j in range(n):
            letters[:, j] = rem & 3
            rem = rem >> 2
        count += int(np.sum(_reduced_lengths(letters) == 0))
    return count


def commuting_pair_probability(n: int, trials: int, rng):
    """Monte Carlo P(two independent uniform length-n words commute in F_2).

    Decided exactly per trial by reducing the commutator w w' w^-1 w'^-1.
    """
    hits = 0
    for _ in range(trials):
        w1 = sample_word(n, rng)
        w2 = sample_word(n, rng)
        if len(reduce_word(commutator_word(w1, w2))) == 0:
            hits += 1
    p = hits / trials
    se = np.sqrt(p * (1 - p) / trials)
    return p, se
