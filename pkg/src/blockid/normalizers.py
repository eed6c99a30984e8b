"""Partition functions of the stood-up processes, by enumeration of gap sequences.

The weight of omega is sum_i i (omega_{-i} - g_i) with g the ground pattern of
its class. For k = 2 the t-exponent is 2 (#{i : g_i = 0, omega_{-i} >= 1} -
#{i : g_i = 1, omega_{-i} = 0}).

Pruning: a zero at a ground position i forces a nonzero among the k - 1
non-ground positions right after it, which contributes at least i + 1. Pairing
them shows that positions beyond any cut-off contribute a nonnegative amount,
so a partial weight above the order can be discarded.

Depth: sliding the whole ground pattern by one slot costs only about D/k at
depth D, so deviations reach depth roughly k times the weight. Enumeration runs
to depth k (order + 1) + 2 and is repeated two positions deeper as a check.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Iterator

from .series import TruncatedSeries
from .standup import OmegaState


@dataclass(frozen=True)
class NormalizerSeries:
    series: TruncatedSeries
    space: str
    depth_used: int
    stabilized: bool


def _zeros_after(i: int, k: int, m: int) -> int:
    """Length of the run of ground zeros right after position i."""
    return (m - i - 1) % k


def _count(k: int, m: int, order: int, depth: int, track_t: bool) -> TruncatedSeries:
    """Dynamic programme over positions with state (zero run, weight, t-exponent/2)."""
    acc: dict[tuple[int, int, int], int] = defaultdict(int)
    acc[(0, 0, 0)] += 1  # the ground state itself
    states: dict[tuple[int, int, int], int] = {(0, 0, 0): 1}
    for i in range(1, depth + 1):
        g = int(i % k == m % k)
        nxt: dict[tuple[int, int, int], int] = defaultdict(int)
        for (run, w, te), c in states.items():
            vmax = g + (order - w) // i
            for v in range(0, vmax + 1):
                r2 = run + 1 if v == 0 else 0
                if r2 >= k:
                    continue
                w2 = w + i * (v - g)
                if w2 > order:
                    continue
                te2 = te
                if track_t:
                    if g == 0 and v >= 1:
                        te2 += 1
                    elif g == 1 and v == 0:
                        te2 -= 1
                nxt[(r2, w2, te2)] += c
                if v != g and r2 + _zeros_after(i, k, m) < k and w2 >= 0:
                    acc[(w2, te2, 0)] += c
        states = nxt
    terms = {}
    for (w, te, _), c in acc.items():
        if te < 0:
            raise AssertionError("negative t-exponent on a completed configuration")
        key = (w, 2 * te if track_t else 0, 0)
        terms[key] = terms.get(key, 0) + c
    return TruncatedSeries(order, terms)


def _stabilized(k: int, m: int, order: int, track_t: bool, space: str,
                depth: int | None = None) -> NormalizerSeries:
    d0 = k * (order + 1) + 2 if depth is None else depth
    a = _count(k, m, order, d0, track_t)
    b = _count(k, m, order, d0 + 2, track_t)
    if a != b:
        raise RuntimeError(f"{space}: enumeration did not stabilize at depth {d0}")
    return NormalizerSeries(a, space, d0, True)


def s_even(order: int) -> NormalizerSeries:
    return _stabilized(2, 0, order, True, "H^e")


def s_odd(order: int) -> NormalizerSeries:
    return _stabilized(2, 1, order, True, "H^o")


def s_k(k: int, m: int, order: int) -> NormalizerSeries:
    if not 0 <= m < k:
        raise ValueError("m must lie in 0..k-1")
    return _stabilized(k, m, order, False, f"H^-{m} (k={k})")


# plain depth-first enumeration, used for bijection checks and as a cross-check


def iter_omega(k: int, m: int, max_weight: int, depth: int | None = None) -> Iterator[OmegaState]:
    """All omega of class m with weight <= max_weight, deviating only at positions <= depth."""
    depth = k * (max_weight + 1) + 2 if depth is None else depth
    vals: list[int] = []

    def rec(i: int, run: int, w: int) -> Iterator[OmegaState]:
        # emit if the remainder can be ground
        if i > 1 and vals[-1] != int((i - 1) % k == m % k) and run + _zeros_after(i - 1, k, m) < k \
                and 0 <= w <= max_weight:
            yield OmegaState(k, m, tuple(vals))
        if i > depth:
            return
        g = int(i % k == m % k)
        for v in range(0, g + (max_weight - w) // i + 1):
            r2 = run + 1 if v == 0 else 0
            if r2 >= k:
                continue
            vals.append(v)
            yield from rec(i + 1, r2, w + i * (v - g))
            vals.pop()

    yield OmegaState.ground(k, m)
    yield from rec(1, 0, 0)


def brute_series(k: int, m: int, order: int, track_t: bool = True) -> TruncatedSeries:
    terms: dict[tuple[int, int, int], int] = defaultdict(int)
    for om in iter_omega(k, m, order):
        terms[(om.weight(), om.t_exponent() if track_t else 0, 0)] += 1
    return TruncatedSeries(order, terms)
