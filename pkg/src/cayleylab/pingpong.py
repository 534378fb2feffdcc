"""Exact-rational ping-pong certificates for an affine pair of the plane.

The pair is a = diag(L^10, L^{-10}) and b = h a h^{-1} for a generic affine
conjugator h; every decision in this module is made over Q (Fractions), no
floating point anywhere.  The norm is ||(x, y)|| = max(|x|, |y|).

Region labels.  The source text prints U_a^- with the inequality
|x| > L|y|, but that labeling contradicts its own inclusion
a(K^2 \\ U_a^-) in U_a^+ on the axis point (0, 1) -- a contracts that point.
The labels here are pinned the consistent way round:

    U_a^-      = { ||p|| < 1/L  or  |y| > L|x| }      (points a repels from)
    U_a^+      = { |x| > max(L|y|, L) }               (points a attracts to)
    U_{a^-1}^- = { ||p|| < 1/L  or  |x| > L|y| }
    U_{a^-1}^+ = { |y| > max(L|x|, L) }

and the b-regions are the h-images (p in U_b iff h^{-1}(p) in U_a).  With
this labeling every inclusion and the norm dilation ||ap|| >= L^9 ||p||
hold identically; the checker exercises exactly these statements on axis,
boundary and grid points.

E(w) denotes the rightmost letter of a reduced word w -- the factor that
acts first on a point; the fixed point of w lies in U_{E(w)}^-.
"""

import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import words
from .errors import InclusionFailedError, NonGenericConjugatorError, TooLargeError

WORD_LEN_CAP = 12
LC_WORD_LEN_CAP = 10
BASE_POINT = (Fraction(1), Fraction(1))  # outside Omega^- for the pinned pair


def _fr(x):
    return x if isinstance(x, Fraction) else Fraction(x)


class AffineMap:
    """g: p -> linear p + translation, with det(linear) = 1 exactly."""

    __slots__ = ("m", "t")

    def __init__(self, linear, translation):
        (a, b), (c, d) = linear
        self.m = (_fr(a), _fr(b), _fr(c), _fr(d))
        t0, t1 = translation
        self.t = (_fr(t0), _fr(t1))
        assert self.m[0] * self.m[3] - self.m[1] * self.m[2] == 1, (
            "linear part must have determinant 1"
        )

    @classmethod
    def identity(cls):
        return cls(((1, 0), (0, 1)), (0, 0))

    def __call__(self, p):
        x, y = _fr(p[0]), _fr(p[1])
        a, b, c, d = self.m
        return (a * x + b * y + self.t[0], c * x + d * y + self.t[1])

    def compose(self, other):
        """self after other: (self . other)(p) = self(other(p))."""
        a, b, c, d = self.m
        e, f, g, h = other.m
        lin = ((a * e + b * g, a * f + b * h), (c * e + d * g, c * f + d * h))
        return AffineMap(lin, self(other.t))

    def inverse(self):
        a, b, c, d = self.m  # det = 1: inverse linear is the adjugate
        lin = ((d, -b), (-c, a))
        x = -(d * self.t[0] - b * self.t[1])
        y = -(-c * self.t[0] + a * self.t[1])
        return AffineMap(lin, (x, y))

    def is_identity(self):
        return self.m == (1, 0, 0, 1) and self.t == (0, 0)

    def __eq__(self, other):
        return (
            isinstance(other, AffineMap) and self.m == other.m and self.t == other.t
        )

    def __hash__(self):
        return hash((self.m, self.t))

    def __repr__(self):
        return f"AffineMap(m={self.m}, t={self.t})"


DEFAULT_H = AffineMap(((Fraction(3, 5), Fraction(-4, 5)),
                       (Fraction(4, 5), Fraction(3, 5))), (1, 0))


def norm(p):
    return max(abs(_fr(p[0])), abs(_fr(p[1])))


def build_pair(L, h=None):
    """(a, b) = (diag(L^10, L^{-10}), h a h^{-1}) after exact genericity checks."""
    L = _fr(L)
    if L <= 1:
        raise ValueError("need L > 1")
    if h is None:
        h = DEFAULT_H
    failures = []
    h0 = h.t
    if h0 == (0, 0):
        failures.append("h(0) = 0")
    a_, b_, c_, d_ = h.m
    for label, col in (("x-axis", (a_, c_)), ("y-axis", (b_, d_))):
        if col[0] == 0 or col[1] == 0:
            failures.append(f"h-image of the {label} is parallel to an axis")
        if h0[0] * col[1] - h0[1] * col[0] == 0:
            failures.append(f"h-image of the {label} passes through 0")
    if failures:
        raise NonGenericConjugatorError("; ".join(failures))
    a = AffineMap(((L**10, 0), (0, L**-10)), (0, 0))
    b = h.compose(a).compose(h.inverse())
    return a, b


# ---------------------------------------------------------------------------
# regions

_A_KINDS = ("UaMinus", "UaInvMinus", "UaPlus", "UaInvPlus")
_B_KINDS = ("UbMinus", "UbInvMinus", "UbPlus", "UbInvPlus")


@dataclass(frozen=True)
class Region:
    kind: str
    L: Fraction
    h: AffineMap | None = None  # required for the b-conjugated kinds

    def __post_init__(self):
        if self.kind in _B_KINDS and self.h is None:
            raise ValueError(f"{self.kind} needs the conjugator h")
        if self.kind not in _A_KINDS + _B_KINDS:
            raise ValueError(f"unknown region kind {self.kind}")


def region_member(p, r):
    """Exact membership decision."""
    x, y = _fr(p[0]), _fr(p[1])
    L = _fr(r.L)
    kind = r.kind
    if kind in _B_KINDS:
        return region_member(r.h.inverse()((x, y)), Region(_A_KINDS[_B_KINDS.index(kind)], L))
    if kind == "UaMinus":
        return max(abs(x), abs(y)) < 1 / L or abs(y) > L * abs(x)
    if kind == "UaInvMinus":
        return max(abs(x), abs(y)) < 1 / L or abs(x) > L * abs(y)
    if kind == "UaPlus":
        return abs(x) > max(L * abs(y), L)
    if kind == "UaInvPlus":
        return abs(y) > max(L * abs(x), L)
    raise AssertionError(kind)


def letter_regions(letter, L, h):
    """(U_letter^-, U_letter^+) for letter in 0..3 coding a, a^-1, b, b^-1."""
    minus = ("UaMinus", "UaInvMinus", "UbMinus", "UbInvMinus")[letter]
    plus = ("UaPlus", "UaInvPlus", "UbPlus", "UbInvPlus")[letter]
    hh = h if letter >= 2 else None
    return Region(minus, _fr(L), hh), Region(plus, _fr(L), hh)


def in_omega_minus(p, L, h):
    """p lies in some U_c^- (the repelling union Omega^-)."""
    return any(
        region_member(p, letter_regions(c, L, h)[0]) for c in range(4)
    )


def fixed_point(g):
    """(1 - linear)^{-1} translation, or None when 1 is an eigenvalue."""
    a, b, c, d = g.m
    det = (1 - a) * (1 - d) - b * c
    if det == 0:
        return None
    tx, ty = g.t
    x = ((1 - d) * tx + b * ty) / det
    y = (c * tx + (1 - a) * ty) / det
    return (x, y)


# ---------------------------------------------------------------------------
# inclusion checker


def default_sample_points(L, h):
    """Deterministic grid plus boundary-adversarial rational points."""
    L = _fr(L)
    vals = [
        Fraction(0), Fraction(1), -Fraction(1),
        1 / L, -1 / L, 1 / L**2, -(1 / L**2),
        L, -L, L**2, 1 / (2 * L), (L - 1) / L, (L + 1) / L, 2 * L,
    ]
    pts = [(x, y) for x in vals for y in vals]
    eps = 1 / L**3
    for t in (1 / L, Fraction(1), L):
        # straddle the |y| = L|x| and |x| = L|y| cones and the 1/L circle
        pts += [
            (t, L * t + eps), (t, L * t - eps),
            (L * t + eps, t), (L * t - eps, t),
            (1 / L + eps, Fraction(0)), (1 / L - eps, Fraction(0)),
            (Fraction(0), 1 / L + eps), (Fraction(0), 1 / L - eps),
        ]
    # h-transported copies stress the b-regions
    pts += [h(p) for p in pts[: len(vals) ** 2]]
    seen = set()
    out = []
    for p in pts:
        if p not in seen:
            seen.add(p)
            out.append(p)
    return out


@dataclass
class InclusionReport:
    L: Fraction
    points: int
    checked: dict = field(default_factory=dict)  # letter -> counts
    failures: list = field(default_factory=list)  # (letter, point, what)

    @property
    def all_pass(self):
        return not self.failures

    def as_dict(self):
        return {
            "L": str(self.L),
            "points": self.points,
            "checked": self.checked,
            "all_pass": self.all_pass,
            "failures": [
                {"letter": words.LETTERS[c], "point": [str(p[0]), str(p[1])], "what": w}
                for c, p, w in self.failures
            ],
        }


def verify_inclusions(a, b, L, h, sample_points=None, raise_on_failure=False):
    """For each letter u and sample p not in U_u^-: check u(p) in U_u^+ and
    ||u(p)|| > ||p||.  Counterexamples are collected exactly (and only raise
    when asked to) -- a failure means this L is too small for this h.
    """
    L = _fr(L)
    if sample_points is None:
        sample_points = default_sample_points(L, h)
    maps = [a, a.inverse(), b, b.inverse()]
    rep = InclusionReport(L=L, points=len(sample_points))
    for c, g in enumerate(maps):
        minus, plus = letter_regions(c, L, h)
        tested = excluded = 0
        for p in sample_points:
            if region_member(p, minus):
                excluded += 1
                continue
            tested += 1
            q = g(p)
            if not region_member(q, plus):
                rep.failures.append((c, p, "image outside U^+"))
            if not norm(q) > norm(p):
                rep.failures.append((c, p, "norm did not grow"))
        rep.checked[words.LETTERS[c]] = {"tested": tested, "excluded": excluded}
    if rep.failures and raise_on_failure:
        c, p, what = rep.failures[0]
        raise InclusionFailedError(
            f"letter {words.LETTERS[c]} at p = ({p[0]}, {p[1]}): {what}"
        )
    return rep


# ---------------------------------------------------------------------------
# freeness and local commutativity


def word_to_map(w, a, b):
    """Leftmost letter acts last (matches the group-word convention)."""
    table = [a, a.inverse(), b, b.inverse()]
    g = AffineMap.identity()
    for c in np.asarray(w, dtype=np.uint8):
        g = g.compose(table[int(c)])
    return g


@dataclass
class FreenessReport:
    max_len: int
    words_checked: int
    all_nontrivial: bool
    base_point: tuple
    counterexample: str | None = None

    def as_dict(self):
        return {
            "max_len": self.max_len,
            "words_checked": self.words_checked,
            "all_nontrivial": self.all_nontrivial,
            "base_point": [str(self.base_point[0]), str(self.base_point[1])],
            "counterexample": self.counterexample,
        }


def freeness_certificate(a, b, max_len, base_point=BASE_POINT, h=None):
    """Exact check that every reduced word of length <= max_len moves the
    base point and is not the identity map.

    Words are grown by prepending letters, so each node reuses its child's
    image of the base point; the full map is carried along for the
    identity test.  h defaults to the pinned conjugator and is only used
    for the sanity assertion that the base point avoids Omega^-.
    """
    if max_len > WORD_LEN_CAP:
        raise TooLargeError(f"max_len {max_len} exceeds cap {WORD_LEN_CAP}")
    if h is None:
        h = DEFAULT_H
    assert not in_omega_minus(base_point, _infer_L(a), h), (
        "base point must avoid Omega^-"
    )
    table = [a, a.inverse(), b, b.inverse()]
    checked = 0
    # frontier entries: (first_letter, map, image_of_base)
    frontier = [(c, table[c], table[c](base_point)) for c in range(4)]
    for _ in range(max_len):
        for first, g, img in frontier:
            checked += 1
            if img == tuple(base_point) or g.is_identity():
                word = words.LETTERS[first] + "..."
                return FreenessReport(
                    max_len, checked, False, tuple(base_point), word
                )
        nxt = []
        for first, g, img in frontier:
            for c in range(4):
                if c == first ^ 1:
                    continue
                nxt.append((c, table[c].compose(g), table[c](img)))
        frontier = nxt
    return FreenessReport(max_len, checked, True, tuple(base_point))


def _infer_L(a):
    # a = diag(L^10, L^-10) with L rational: recover L from the (0,0) entry
    tenth = a.m[0]
    L = Fraction(_nth_root(tenth.numerator, 10), _nth_root(tenth.denominator, 10))
    assert L**10 == tenth
    return L


def _nth_root(v, n):
    r = round(v ** (1.0 / n))
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand**n == v:
            return cand
    raise ValueError(f"{v} is not a perfect {n}-th power")


@dataclass
class LocalCommReport:
    word_len: int
    triples_checked: int
    c5_checked: int
    all_pass: bool
    failures: list = field(default_factory=list)

    def as_dict(self):
        return {
            "word_len": self.word_len,
            "triples_checked": self.triples_checked,
            "c5_checked": self.c5_checked,
            "all_pass": self.all_pass,
            "failures": self.failures,
        }


def locally_commutative_check(a, b, word_len, trials, rng, L=None, h=None):
    """Random triples of reduced words with pairwise-distinct last letters:
    their (unique) fixed points are never all equal, and each fixed point
    lies in U_{E(w)}^- (E(w) = last letter).  All decisions exact."""
    if word_len > LC_WORD_LEN_CAP:
        raise TooLargeError(f"word_len {word_len} exceeds cap {LC_WORD_LEN_CAP}")
    if L is None:
        L = _infer_L(a)
    if h is None:
        h = DEFAULT_H
    report = LocalCommReport(word_len, 0, 0, True)
    for _ in range(trials):
        ws = []
        while len(ws) < 3:
            w = words.sample_reduced_word(word_len, rng)
            if all(w[-1] != u[-1] for u in ws):
                ws.append(w)
        fps = []
        for w in ws:
            g = word_to_map(w, a, b)
            fp = fixed_point(g)
            if fp is not None:
                minus = letter_regions(int(w[-1]), L, h)[0]
                report.c5_checked += 1
                if not region_member(fp, minus):
                    report.all_pass = False
                    report.failures.append(
                        {
                            "what": "fixed point outside U_{E(w)}^-",
                            "word": words.to_string(w),
                            "fp": [str(fp[0]), str(fp[1])],
                        }
                    )
            fps.append(fp)
        report.triples_checked += 1
        if all(fp is not None for fp in fps) and fps[0] == fps[1] == fps[2]:
            report.all_pass = False
            report.failures.append(
                {
                    "what": "three distinct-last-letter words share a fixed point",
                    "words": [words.to_string(w) for w in ws],
                }
            )
    return report


def certificate_json(free_report, lc_report, path=None):
    """Combined JSON certificate for the pinned pair."""
    payload = {
        "max_len": free_report.max_len,
        "words_checked": free_report.words_checked,
        "all_nontrivial": free_report.all_nontrivial,
        "triples_checked": lc_report.triples_checked if lc_report else 0,
    }
    text = json.dumps(payload, indent=2, sort_keys=True)
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    return text
