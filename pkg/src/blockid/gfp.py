"""Generalized Frobenius partitions with a repetition bound, and their diagrams.

A GFP is a pair of weakly decreasing rows of nonnegative integers, ``top`` of
length s1 and ``bottom`` of length s2, with offset s1 - s2 and weight
s1 + sum(top) + sum(bottom). With repetition bound k no value occurs more than
k times in a row.

Diagrams live on the lattice {(x, y) : y <= -1, x + y = -offset mod k}. Top row i
owns the diagonal point (i - offset, -i) and the arm points k, 2k, ... to its
right; bottom row j owns the leg points k, 2k, ... below (j, -j - offset) in
column j. For negative offsets the first -offset leg anchors are not drawn.
"""

from __future__ import annotations

import json
from collections import Counter, defaultdict
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Iterable, Sequence

from .series import TruncatedSeries
from .standup import OmegaState


@dataclass(frozen=True, order=True)
class Gfp:
    offset: int
    top: tuple[int, ...]
    bottom: tuple[int, ...]
    k_rep: int = 2

    def __post_init__(self):
        top, bottom = tuple(self.top), tuple(self.bottom)
        object.__setattr__(self, "top", top)
        object.__setattr__(self, "bottom", bottom)
        if len(top) - len(bottom) != self.offset:
            raise ValueError("row lengths do not match the offset")
        for row in (top, bottom):
            if any(v < 0 for v in row):
                raise ValueError("entries must be nonnegative")
            if any(row[i] < row[i + 1] for i in range(len(row) - 1)):
                raise ValueError("rows must be weakly decreasing")
            if row and max(Counter(row).values()) > self.k_rep:
                raise ValueError(f"a value repeats more than {self.k_rep} times")

    @classmethod
    def make(cls, top: Sequence[int], bottom: Sequence[int], k_rep: int = 2) -> "Gfp":
        return cls(len(top) - len(bottom), tuple(top), tuple(bottom), k_rep)

    @classmethod
    def parse(cls, text: str, k_rep: int = 2) -> "Gfp":
        """Parse "a1 a2 ... ; b1 b2 ..." (dashes are ignored)."""
        top, _, bottom = text.partition(";")

        def row(s: str) -> list[int]:
            return [int(v) for v in s.replace(",", " ").split() if v not in ("-", "−")]

        return cls.make(row(top), row(bottom), k_rep)

    @property
    def s1(self) -> int:
        return len(self.top)

    @property
    def s2(self) -> int:
        return len(self.bottom)

    @property
    def weight(self) -> int:
        return self.s1 + sum(self.top) + sum(self.bottom)

    def conjugate(self) -> "Gfp":
        """Swap the rows; the weight changes by -offset."""
        return Gfp(-self.offset, self.bottom, self.top, self.k_rep)

    def __str__(self) -> str:
        return f"({' '.join(map(str, self.top))} ; {' '.join(map(str, self.bottom))})"

    def to_dict(self) -> dict:
        return {"offset": self.offset, "top": list(self.top), "bottom": list(self.bottom)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict, k_rep: int = 2) -> "Gfp":
        g = cls.make(d["top"], d["bottom"], k_rep)
        if "offset" in d and d["offset"] != g.offset:
            raise ValueError("offset does not match the row lengths")
        return g


def distinct_parts(g: Gfp) -> int:
    """Values occurring exactly once in a row, counted per row (0 counts as a part)."""
    return sum(1 for row in (g.top, g.bottom) for v, c in Counter(row).items() if c == 1)


# enumeration ------------------------------------------------------------------


@lru_cache(maxsize=None)
def rows(length: int, total: int, k: int, cap: int | None = None) -> tuple[tuple[int, ...], ...]:
    """Weakly decreasing rows with entries <= cap, each value at most k times."""
    if length == 0:
        return ((),) if total == 0 else ()
    cap = total if cap is None else min(cap, total)
    out = []
    for v in range(cap, -1, -1):
        for mult in range(1, min(k, length) + 1):
            rest = total - v * mult
            if rest < 0:
                break
            if v == 0:
                if rest == 0 and mult == length:
                    out.append((0,) * mult)
                continue
            for tail in rows(length - mult, rest, k, v - 1):
                out.append((v,) * mult + tail)
    return tuple(out)


def enumerate_gfps(n: int, offset: int, k_rep: int) -> list[Gfp]:
    """All GFPs of weight n with the given offset and repetition bound, sorted."""
    if n < 0:
        raise ValueError("weight must be nonnegative")
    out = []
    for s1 in range(max(offset, 0), n + 1):
        s2 = s1 - offset
        rest = n - s1
        for a in range(rest + 1):
            tops = rows(s1, a, k_rep)
            if not tops:
                continue
            bots = rows(s2, rest - a, k_rep)
            for t in tops:
                for b in bots:
                    out.append(Gfp(offset, t, b, k_rep))
    out.sort()
    return out


def gf_enumerated(offset: int, k_rep: int, order: int) -> TruncatedSeries:
    """sum over GFPs of q^weight t^distinct_parts, through q^order."""
    terms: dict[tuple[int, int, int], int] = defaultdict(int)
    for n in range(order + 1):
        for g in enumerate_gfps(n, offset, k_rep):
            terms[(n, distinct_parts(g), 0)] += 1
    return TruncatedSeries(order, terms)


def load_listing() -> list[tuple[int, int, int, list[Gfp]]]:
    """Shipped reference listing for k = 2: (offset, weight, distinct parts, members)."""
    text = resources.files("blockid").joinpath("data/gfp_d2_listing.json").read_text()
    return [
        (s["offset"], s["weight"], s["distinct"], [Gfp.from_dict(m, 2) for m in s["members"]])
        for s in json.loads(text)
    ]


# diagrams ------------------------------------------------------------------------


@dataclass(frozen=True)
class DiagramPoints:
    k: int
    offset: int
    points: frozenset[tuple[int, int]]

    @property
    def m(self) -> int:
        """Lattice class: every point has x + y = m mod k."""
        return (-self.offset) % self.k

    def __post_init__(self):
        object.__setattr__(self, "points", frozenset(self.points))
        for x, y in self.points:
            if y > -1 or (x + y - self.m) % self.k:
                raise ValueError(f"point {(x, y)} is off the lattice")

    def render(self) -> str:
        if not self.points:
            return ""
        xs = [x for x, _ in self.points]
        ys = [y for _, y in self.points]
        lines = []
        for y in range(-1, min(ys) - 1, -1):
            lines.append("".join("o" if (x, y) in self.points else "." for x in range(min(xs), max(xs) + 1)))
        return "\n".join(lines)


def to_diagram(g: Gfp) -> DiagramPoints:
    k, d = g.k_rep, g.offset
    pts = set()
    for i, a in enumerate(g.top, start=1):
        x0 = i - d
        pts.add((x0, -i))
        pts.update((x0 + k * u, -i) for u in range(1, a + 1))
    for j, b in enumerate(g.bottom, start=1):
        y0 = -j - d
        pts.update((j, y0 - k * u) for u in range(1, b + 1))
    return DiagramPoints(k, d, frozenset(pts))


def from_diagram(dia: DiagramPoints, k_rep: int | None = None) -> Gfp:
    """Read a diagram back as a GFP of the diagram's offset; rejects malformed point sets."""
    k, d = dia.k, dia.offset
    k_rep = k if k_rep is None else k_rep
    diag, arms, legs = set(), defaultdict(list), defaultdict(list)
    for x, y in dia.points:
        i = -y
        s = x + y + d
        if s == 0:
            diag.add(i)
        elif s > 0:
            arms[i].append(x)
        else:
            legs[x].append(y)
    s1 = len(diag)
    if diag != set(range(1, s1 + 1)):
        raise ValueError("diagonal points are not the rows 1..s1")
    s2 = s1 - d
    if s2 < 0:
        raise ValueError("too few diagonal points for the offset")
    top = []
    for i in range(1, s1 + 1):
        xs = sorted(arms.pop(i, []))
        x0 = i - d
        if xs != [x0 + k * u for u in range(1, len(xs) + 1)]:
            raise ValueError(f"row {i} arm is not contiguous")
        top.append(len(xs))
    if arms:
        raise ValueError("arm points in rows without a diagonal point")
    bottom = []
    for j in range(1, s2 + 1):
        ys = sorted(legs.pop(j, []), reverse=True)
        y0 = -j - d
        if ys != [y0 - k * u for u in range(1, len(ys) + 1)]:
            raise ValueError(f"column {j} leg is not contiguous")
        bottom.append(len(ys))
    if legs:
        raise ValueError("leg points outside columns 1..s2")
    g = Gfp(d, tuple(top), tuple(bottom), k_rep)
    if to_diagram(g).points != dia.points:
        raise ValueError("point set is not a diagram")
    return g


# psi: gap sequences to GFPs ----------------------------------------------------------


def _column_top(j: int, k: int, m: int) -> int:
    """Highest lattice point (y <= -1) of column j in class m."""
    return -1 - ((j - m - 1) % k)


def psi(omega: OmegaState) -> Gfp:
    """Stack waves and remove bottom points, then read the diagram at offset -m.

    Position i contributes max(omega_{-i} - g_i, 0) waves of length i (one point in
    each of columns 1..i); a ground position with omega_{-i} = 0 removes the bottom
    point of columns 1..i.
    """
    k, m = omega.k, omega.m
    depth = omega.depth
    columns: dict[int, list[int]] = defaultdict(list)
    waves = []
    for i in range(depth, 0, -1):
        g = omega.ground_at(i)
        waves.extend([i] * max(omega.at(i) - g, 0))
    for length in waves:
        for j in range(1, length + 1):
            col = columns[j]
            col.append(_column_top(j, k, m) - k * len(col))
    for i in range(1, depth + 1):
        if omega.ground_at(i) and omega.at(i) == 0:
            for j in range(1, i + 1):
                if not columns[j]:
                    raise AssertionError("removal from an empty column")
                columns[j].pop()
    pts = {(j, y) for j, col in columns.items() for y in col}
    return from_diagram(DiagramPoints(k, -m, frozenset(pts)))


def column_heights(g: Gfp) -> list[int]:
    dia = to_diagram(g)
    if not dia.points:
        return []
    cols = Counter(x for x, _ in dia.points)
    if min(cols) < 1:
        raise ValueError("diagram has points left of column 1")
    return [cols.get(j, 0) for j in range(1, max(cols) + 1)]


def psi_inverse(g: Gfp) -> OmegaState:
    """omega_{-j} = h_j - h_{j+1} + g_j from the column heights h."""
    k = g.k_rep
    m = -g.offset
    if not 0 <= m < k:
        raise ValueError("offset must lie in -(k-1)..0")
    h = column_heights(g) + [0]
    dia = to_diagram(g)
    for j in range(1, len(h)):
        top = _column_top(j, k, m)
        expect = {(j, top - k * u) for u in range(h[j - 1])}
        if {p for p in dia.points if p[0] == j} != expect:
            raise ValueError("columns are not top-justified")
    vals = [h[j - 1] - h[j] + int(j % k == m) for j in range(1, len(h))]
    return OmegaState(k, m, tuple(vals))


# phi: offset shifts ------------------------------------------------------------


def _triangle(d1: int, k: int) -> set[tuple[int, int]]:
    """Lattice points (x, -i), i <= x + d1 <= d1, x = i - d1 mod k, for rows 1..d1."""
    pts = set()
    for i in range(1, d1 + 1):
        x = i - d1
        while x <= 0:
            pts.add((x, -i))
            x += k
    return pts


def _raise(g: Gfp, ell: int) -> Gfp:
    k = g.k_rep
    m = -g.offset
    if not 0 <= m < k or ell < 0:
        raise ValueError("raising needs offset in -(k-1)..0 and ell >= 0")
    d1 = k * ell - m
    pts = set(to_diagram(g).points)
    tri = _triangle(d1, k)
    if pts & tri:
        raise AssertionError("triangle overlaps the diagram")
    return from_diagram(DiagramPoints(k, d1, frozenset(pts | tri)), k)


def _lower(g: Gfp, ell: int, m: int) -> Gfp:
    k = g.k_rep
    d1 = k * ell - m
    if g.offset != d1:
        raise ValueError("offset does not match the class and shift")
    pts = set(to_diagram(g).points)
    tri = _triangle(d1, k)
    if not tri <= pts:
        raise ValueError("diagram does not contain the triangle")
    rest = pts - tri
    if any(x < 1 for x, _ in rest):
        raise ValueError("diagram extends left of column 1 after removing the triangle")
    return from_diagram(DiagramPoints(k, -m, frozenset(rest)), k)


def phi_class(g: Gfp, ell: int) -> Gfp:
    """Map offset -m to offset k*ell - m, adding k*ell(ell+1)/2 - m*ell to the weight.

    For ell >= 0 a triangle of lattice points is attached along the left edge.
    Negative shifts go through row swapping: the conjugate of a raised conjugate.
    """
    k = g.k_rep
    m = -g.offset
    if not 0 <= m < k:
        raise ValueError("offset must lie in -(k-1)..0")
    if ell >= 0:
        return _raise(g, ell)
    n = -ell
    if m == 0:
        return _raise(g.conjugate(), n).conjugate()
    h = _raise(g, 1).conjugate()  # offset -(k - m), same weight
    return _raise(h, n + 1).conjugate()


def phi_class_inverse(g: Gfp) -> Gfp:
    """Undo phi_class; the class and shift are read off the offset."""
    k = g.k_rep
    d1 = g.offset
    ell = -((-d1) // k)
    m = k * ell - d1
    if ell >= 0:
        return _lower(g, ell, m)
    n = -ell
    if m == 0:
        return _lower(g.conjugate(), n, 0).conjugate()
    h = _lower(g.conjugate(), n + 1, k - m)
    return _lower(h.conjugate(), 1, m)


def phi(g: Gfp, ell: int) -> Gfp:
    """Offset-shifting bijection.

    Offset 0 goes to k*ell with weight + k*ell(ell+1)/2. For k = 2 and offset -1 the
    index follows the odd convention: offset 2*ell + 1, weight + (ell+1)^2, so
    ell = -1 is the identity. Other classes -m go to k*ell - m with weight
    + k*ell(ell+1)/2 - m*ell.
    """
    if g.k_rep == 2 and g.offset == -1:
        return phi_class(g, ell + 1)
    return phi_class(g, ell)


def phi_weight_shift(k: int, m: int, ell: int) -> int:
    return k * ell * (ell + 1) // 2 - m * ell


# k = 1: Frobenius coordinates and the triangle shift -------------------------------


def conjugate_partition(parts: Sequence[int]) -> tuple[int, ...]:
    parts = [p for p in parts if p > 0]
    if not parts:
        return ()
    return tuple(sum(1 for p in parts if p >= j) for j in range(1, parts[0] + 1))


def shifted_frobenius(parts: Sequence[int], shift: int = 0) -> Gfp:
    """a_i = lambda_i - i + shift and b_j = lambda'_j - j - shift while nonnegative."""
    if any(p < 0 for p in parts):
        raise ValueError("parts must be nonnegative")
    lam = sorted((p for p in parts if p > 0), reverse=True)
    lamc = conjugate_partition(lam)
    top, bottom = [], []
    i = 1
    while True:
        a = (lam[i - 1] if i <= len(lam) else 0) - i + shift
        if a < 0:
            break
        top.append(a)
        i += 1
    j = 1
    while True:
        b = (lamc[j - 1] if j <= len(lamc) else 0) - j - shift
        if b < 0:
            break
        bottom.append(b)
        j += 1
    return Gfp.make(top, bottom, 1)


def partition_from_shifted(g: Gfp) -> tuple[int, ...]:
    """Inverse of shifted_frobenius at shift = g.offset."""
    if g.k_rep != 1:
        raise ValueError("needs repetition bound 1")
    d = g.offset
    lam = [a + i - d for i, a in enumerate(g.top, start=1)]
    cols = [b + j + d for j, b in enumerate(g.bottom, start=1)]
    # rows below the top block are filled only by the bottom columns
    i = len(lam) + 1
    while True:
        row = sum(1 for c in cols if c >= i)
        if row == 0:
            break
        lam.append(row)
        i += 1
    if any(p < 0 for p in lam):
        raise ValueError("not a shifted Frobenius symbol")
    parts = tuple(p for p in lam if p > 0)
    if shifted_frobenius(parts, d) != g:
        raise ValueError("not a shifted Frobenius symbol")
    return parts


def frobenius(parts: Sequence[int]) -> Gfp:
    return shifted_frobenius(parts, 0)


def frobenius_inverse(g: Gfp) -> tuple[int, ...]:
    if g.offset != 0:
        raise ValueError("ordinary Frobenius symbols have offset 0")
    return partition_from_shifted(g)


def wright(g: Gfp, shift: int) -> Gfp:
    """Re-read the underlying partition with the offset moved by shift."""
    return shifted_frobenius(partition_from_shifted(g), g.offset + shift)


def partitions(n: int, cap: int | None = None) -> Iterable[tuple[int, ...]]:
    cap = n if cap is None else cap
    if n == 0:
        yield ()
        return
    for p in range(min(n, cap), 0, -1):
        for rest in partitions(n - p, p):
            yield (p,) + rest
