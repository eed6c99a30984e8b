"""Finite-window chains: exact reversibility checks, exact stationary solves, Gillespie runs.

Windows freeze every site outside a..b at its ground value (0 on the left, k on
the right) and drop moves that would leave the window.
"""

from __future__ import annotations

import bisect
import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Sequence

import numpy as np

from .blocking import BlockingParams, RateTable, TValue, derive_params, marginal_weight, t_equal
from .standup import EtaState, OmegaState, conserved_n, eta_jumps, omega_jumps, stand_up, window_states


# weights ----------------------------------------------------------------------


def site_ratio(i: int, z: int, params: BlockingParams, c: int = 0) -> TValue:
    """mu_i(z) / mu_i(ground_i) with ground 0 on i <= 0 and k on i >= 1."""
    ground = 0 if i <= 0 else params.k
    return marginal_weight(i, z, params, c) * marginal_weight(i, ground, params, c).inverse()


def mu_weight(eta: EtaState, params: BlockingParams, c: int = 0, ratio=None) -> TValue:
    """Product-measure weight of eta relative to the step with 0s on i <= 0 and k's on i >= 1."""
    ratio = ratio or (lambda i, z: site_ratio(i, z, params, c))
    k = params.k
    lo, hi = min(eta.lo, 1), max(eta.hi, 0)
    w = TValue(Fraction(1))
    for i in range(lo, hi + 1):
        z = eta.at(i)
        if z != (0 if i <= 0 else k):
            w = w * ratio(i, z)
    return w


def pi_weight(omega: OmegaState, params: BlockingParams) -> TValue:
    """Stood-up weight qtilde^weight * t^texp, relative to the ground gap sequence."""
    texp = omega.t_exponent() if omega.k == 2 else 0
    return TValue(params.qtilde ** omega.weight(), texp)


# detailed balance ------------------------------------------------------------------


@dataclass(frozen=True)
class BalanceResult:
    ok: bool
    edges_checked: int
    witness: tuple | None = None  # (state, target, forward rate, reverse rate)

    def __bool__(self) -> bool:
        return self.ok


def _cached(fn):
    memo = {}

    def get(x):
        if x not in memo:
            memo[x] = fn(x)
        return memo[x]

    return get


def _reverse_rate(target, source, jumps) -> Fraction:
    return sum((ev.rate for ev, s in jumps(target) if s == source), Fraction(0))


def detailed_balance_verify(rates: RateTable, c: int, sample: Iterable[EtaState],
                            params: BlockingParams | None = None) -> BalanceResult:
    """mu(eta) r(eta -> eta') == mu(eta') r(eta' -> eta) on every move out of every sampled state.

    ``params`` defaults to the parameters derived from ``rates``; pass the reference
    parameters to test a perturbed table against the original measure.
    """
    params = derive_params(rates) if params is None else params
    t2 = params.t_squared
    n = 0
    jumps = _cached(lambda s: eta_jumps(s, rates))
    ratio = _cached(lambda iz: site_ratio(iz[0], iz[1], params, c))
    weight = _cached(lambda s: mu_weight(s, params, c, lambda i, z: ratio((i, z))))
    for eta in sample:
        mu = weight(eta)
        for ev, eta2 in jumps(eta):
            back = _reverse_rate(eta2, eta, jumps)
            n += 1
            lhs = mu * TValue(ev.rate)
            rhs = weight(eta2) * TValue(back)
            if not t_equal(lhs, rhs, t2):
                return BalanceResult(False, n, (eta, eta2, ev.rate, back))
    return BalanceResult(True, n)


@dataclass(frozen=True)
class CalibrationReport:
    cases: dict[str, tuple[int, bool]]  # case -> (edges checked, all balanced)

    @property
    def ok(self) -> bool:
        return all(ok for _, ok in self.cases.values())

    def failing(self) -> list[str]:
        return [c for c, (_, ok) in self.cases.items() if not ok]


def stood_up_boundary_calibration(rates: RateTable, max_weight: int = 6,
                                  params: BlockingParams | None = None) -> CalibrationReport:
    """Balance of the stood-up moves under pi_weight, split by boundary case.

    Boundary moves are grouped by omega_{-1} before the particle enters: "y=1"
    (the gap closes) and "y>=2"; all bulk moves form the "bulk" case.
    """
    from .normalizers import iter_omega

    params = derive_params(rates) if params is None else params
    t2 = params.t_squared
    k = rates.k
    cases: dict[str, list[int]] = defaultdict(lambda: [0, 1])
    jumps = _cached(lambda s: omega_jumps(s, rates))
    for m in range(k):
        for om in iter_omega(k, m, max_weight):
            w = pi_weight(om, params)
            for ev, om2 in jumps(om):
                if ev.direction == "in":
                    case = "y=1" if om.at(1) == 1 else "y>=2"
                elif ev.direction == "out":
                    case = "y=1" if om2.at(1) == 1 else "y>=2"
                else:
                    case = "bulk"
                back = _reverse_rate(om2, om, jumps)
                ok = t_equal(w * TValue(ev.rate), pi_weight(om2, params) * TValue(back), t2)
                cases[case][0] += 1
                cases[case][1] &= ok
    return CalibrationReport({c: (n, bool(ok)) for c, (n, ok) in sorted(cases.items())})


# finite chains ------------------------------------------------------------------------


@dataclass
class FiniteChain:
    states: list[Hashable]
    transitions: list[tuple[int, int, Fraction]]
    index: dict[Hashable, int] = field(init=False)

    def __post_init__(self):
        self.index = {s: i for i, s in enumerate(self.states)}
        if len(self.index) != len(self.states):
            raise ValueError("duplicate states")
        for a, b, r in self.transitions:
            if r <= 0 or not (0 <= a < len(self.states) and 0 <= b < len(self.states)):
                raise ValueError("transitions need positive rates between listed states")

    def out_rates(self) -> list[list[tuple[int, Fraction]]]:
        out: list[list[tuple[int, Fraction]]] = [[] for _ in self.states]
        for a, b, r in self.transitions:
            out[a].append((b, r))
        return out

    def is_irreducible(self) -> bool:
        if not self.states:
            return False
        fwd, bwd = defaultdict(set), defaultdict(set)
        for a, b, _ in self.transitions:
            fwd[a].add(b)
            bwd[b].add(a)
        for graph in (fwd, bwd):
            seen, stack = {0}, [0]
            while stack:
                for nxt in graph[stack.pop()]:
                    if nxt not in seen:
                        seen.add(nxt)
                        stack.append(nxt)
            if len(seen) != len(self.states):
                return False
        return True


def _chain(states: Sequence[Hashable], moves) -> FiniteChain:
    states = list(states)
    index = {s: i for i, s in enumerate(states)}
    rates: dict[tuple[int, int], Fraction] = defaultdict(Fraction)
    for i, s in enumerate(states):
        for ev, s2 in moves(s):
            j = index.get(s2)
            if j is not None and j != i:
                rates[(i, j)] += ev.rate
    return FiniteChain(states, [(a, b, r) for (a, b), r in sorted(rates.items())])


def build_window_chain(rates: RateTable, a: int, b: int, n: int = 0) -> FiniteChain:
    """States on sites a..b with conserved quantity n; moves leaving the window are dropped."""
    states = sorted(window_states(rates.k, a, b, n), key=lambda e: e.window(a, b))
    return _chain(states, lambda s: eta_jumps(s, rates))


def build_stood_up_chain(rates: RateTable, chain: FiniteChain) -> FiniteChain:
    """Image of a window chain under standing up, with moves taken from the stood-up rates."""
    return _chain([stand_up(s) for s in chain.states], lambda s: omega_jumps(s, rates))


def _bandwidth_order(n: int, transitions) -> list[int]:
    """Reverse Cuthill-McKee order of the (symmetrized) transition graph."""
    nbrs: list[set[int]] = [set() for _ in range(n)]
    for a, b, _ in transitions:
        nbrs[a].add(b)
        nbrs[b].add(a)
    seen = [False] * n
    order: list[int] = []
    for start in sorted(range(n), key=lambda v: len(nbrs[v])):
        if seen[start]:
            continue
        seen[start] = True
        queue = [start]
        while queue:
            v = queue.pop(0)
            order.append(v)
            for w in sorted(nbrs[v], key=lambda u: len(nbrs[u])):
                if not seen[w]:
                    seen[w] = True
                    queue.append(w)
    return order[::-1]


def _tree_candidate(chain: FiniteChain) -> list[Fraction] | None:
    """Propagate pi_j = pi_i r(i->j) / r(j->i) along a BFS tree; None if a reverse move is missing."""
    n = len(chain.states)
    rate = {(a, b): r for a, b, r in chain.transitions}
    out = defaultdict(list)
    for a, b, _ in chain.transitions:
        out[a].append(b)
    pi: list[Fraction | None] = [None] * n
    pi[0] = Fraction(1)
    queue = [0]
    while queue:
        i = queue.pop()
        for j in out[i]:
            if pi[j] is None:
                back = rate.get((j, i))
                if back is None:
                    return None
                pi[j] = pi[i] * rate[(i, j)] / back
                queue.append(j)
    if any(p is None for p in pi):
        return None
    return pi


def balance_residual_zero(chain: FiniteChain, pi: Sequence[Fraction]) -> bool:
    """Exact check of the global balance equations pi Q = 0."""
    flow: dict[int, Fraction] = defaultdict(Fraction)
    for a, b, r in chain.transitions:
        flow[b] += pi[a] * r
        flow[a] -= pi[a] * r
    return not any(flow.values())


def exact_stationary(chain: FiniteChain, method: str = "auto") -> list[Fraction]:
    """Exact stationary distribution of an irreducible finite chain.

    ``tree`` builds a candidate from rate ratios along a spanning tree and accepts
    it only if pi Q = 0 holds exactly; since the normalized solution is unique this
    is the stationary law. ``elimination`` solves the linear system directly.
    ``auto`` tries the tree and falls back to elimination.
    """
    if method not in ("auto", "tree", "elimination"):
        raise ValueError("method must be auto, tree or elimination")
    n = len(chain.states)
    if n == 0:
        raise ValueError("empty chain")
    if not chain.is_irreducible():
        raise ValueError("chain is reducible")
    if method != "elimination":
        pi = _tree_candidate(chain)
        if pi is not None and balance_residual_zero(chain, pi):
            total = sum(pi)
            return [p / total for p in pi]
        if method == "tree":
            raise ValueError("rate ratios along a spanning tree do not balance")
    return _eliminate(chain)


def _eliminate(chain: FiniteChain) -> list[Fraction]:
    """Solve pi Q = 0, sum pi = 1 exactly over Fractions.

    One balance equation is replaced by pi_ref = 1. The remaining system is the
    transpose of a generator minor, which is column diagonally dominant, so
    elimination needs no pivoting; a bandwidth-reducing order limits fill-in.
    """
    n = len(chain.states)
    if n == 1:
        return [Fraction(1)]
    order = _bandwidth_order(n, chain.transitions)
    ref = order[-1]
    pos = {v: i for i, v in enumerate(order[:-1])}
    m = n - 1
    rows: list[dict[int, Fraction]] = [defaultdict(Fraction) for _ in range(m)]
    rhs = [Fraction(0)] * m
    for a, b, r in chain.transitions:
        # equation of state b gains pi_a * r; equation of a loses pi_a * r
        if b != ref:
            if a == ref:
                rhs[pos[b]] -= r
            else:
                rows[pos[b]][pos[a]] += r
        if a != ref:
            rows[pos[a]][pos[a]] -= r
    rows = [{j: v for j, v in row.items() if v} for row in rows]
    below: list[set[int]] = [set() for _ in range(m)]  # column -> rows below the diagonal using it
    for i, row in enumerate(rows):
        for j in row:
            if j < i:
                below[j].add(i)
    for col in range(m):
        prow = rows[col]
        pv = prow.get(col)
        if not pv:
            raise ValueError("singular balance system")
        upper = [(j, v) for j, v in prow.items() if j > col]
        for r in sorted(below[col]):
            row = rows[r]
            f = row.pop(col) / pv
            for j, v in upper:
                nv = row.get(j, 0) - f * v
                if nv:
                    if j not in row and j < r:
                        below[j].add(r)
                    row[j] = nv
                else:
                    row.pop(j, None)
            rhs[r] -= f * rhs[col]
    x = [Fraction(0)] * m
    for col in range(m - 1, -1, -1):
        row = rows[col]
        x[col] = (rhs[col] - sum(v * x[j] for j, v in row.items() if j > col)) / row[col]
    pi = [Fraction(0)] * n
    pi[ref] = Fraction(1)
    for v, i in pos.items():
        pi[v] = x[i]
    total = sum(pi)
    return [p / total for p in pi]


def proportional_to(pi: Sequence[Fraction], weights: Sequence[TValue], t_squared: Fraction) -> bool:
    """Is pi a positive multiple of the given weights (exactly)?"""
    if len(pi) != len(weights) or not pi:
        return False
    base_p, base_w = pi[0], weights[0]
    return all(t_equal(w * TValue(base_p), base_w * TValue(p), t_squared) for p, w in zip(pi, weights))


# Gillespie ----------------------------------------------------------------------------


@dataclass
class TrajectoryStats:
    seed: int
    total_time: float
    jumps: int
    sites: tuple[int, int]
    k: int
    occupation: np.ndarray  # shape (sites, k + 1): time fraction per site and value
    batch_occupation: np.ndarray  # shape (batches, sites, k + 1)
    conserved: frozenset[int]
    state_time: np.ndarray  # time fraction per chain state
    path_digest: int  # hash of the first visited states

    def standard_errors(self) -> np.ndarray:
        b = self.batch_occupation.shape[0]
        return self.batch_occupation.std(axis=0, ddof=1) / np.sqrt(b)

    def to_rows(self) -> list[tuple[int, int, float, float]]:
        """(site, value, fraction, standard error) for every site and value."""
        se = self.standard_errors()
        a, _ = self.sites
        return [(a + s, v, float(self.occupation[s, v]), float(se[s, v]))
                for s in range(self.occupation.shape[0]) for v in range(self.k + 1)]


def gillespie(chain: FiniteChain, initial: Hashable, horizon: float | None = None, seed: int = 0,
              max_jumps: int | None = None, batches: int = 50, sites: tuple[int, int] | None = None,
              block: int = 65536) -> TrajectoryStats:
    """Exact-jump simulation of a finite chain of EtaStates.

    Holding times are exponential with the total exit rate; the next state is drawn
    from the embedded jump chain. Stops at ``horizon`` (time) or ``max_jumps``.
    """
    if horizon is None and max_jumps is None:
        raise ValueError("give a horizon or a jump budget")
    out = chain.out_rates()
    targets = [[b for b, _ in row] for row in out]
    cums, totals = [], []
    for row in out:
        acc = list(itertools.accumulate(float(r) for _, r in row))
        totals.append(acc[-1] if acc else 0.0)
        cums.append([x / acc[-1] for x in acc] if acc else [])
    state = chain.index[initial]
    if totals[state] == 0:
        raise ValueError("initial state is absorbing")

    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    n_states = len(chain.states)
    budget = max_jumps if max_jumps is not None else np.iinfo(np.int64).max
    by_jumps = max_jumps is not None
    per_batch = max(1, max_jumps // batches) if by_jumps else None
    cut = None if by_jumps else horizon / batches
    next_cut = cut
    batch_time: list[np.ndarray] = []
    current = np.zeros(n_states)
    t, jumps = 0.0, 0
    visited = {state}
    digest = []

    def close():
        nonlocal current
        batch_time.append(current)
        current = np.zeros(n_states)

    done = False
    while not done:
        expo = rng.standard_exponential(block)
        unif = rng.random(block)
        for e, u in zip(expo.tolist(), unif.tolist()):
            end = t + e / totals[state]
            if horizon is not None and end >= horizon:
                end = horizon
                done = True
            while next_cut is not None and end >= next_cut and len(batch_time) < batches - 1:
                current[state] += next_cut - t
                t = next_cut
                close()
                next_cut += cut
            current[state] += end - t
            t = end
            if done:
                break
            state = targets[state][min(bisect.bisect_left(cums[state], u), len(cums[state]) - 1)]
            visited.add(state)
            jumps += 1
            if len(digest) < 64:
                digest.append(state)
            if by_jumps and jumps % per_batch == 0 and len(batch_time) < batches - 1:
                close()
            if jumps >= budget:
                done = True
                break
    if current.any() or not batch_time:
        close()
    time_in = np.sum(batch_time, axis=0)

    first = chain.states[0]
    k = first.k
    if sites is None:
        sites = (min(s.lo for s in chain.states), max(s.hi for s in chain.states))
    a, b = sites
    occ_of_state = np.array([[s.at(i) for i in range(a, b + 1)] for s in chain.states])

    def occupation(tv: np.ndarray) -> np.ndarray:
        res = np.zeros((b - a + 1, k + 1))
        tot = tv.sum()
        for v in range(k + 1):
            res[:, v] = ((occ_of_state == v) * tv[:, None]).sum(axis=0) / tot
        return res

    batch_occ = np.array([occupation(tv) for tv in batch_time])
    conserved = frozenset(conserved_n(chain.states[i]) for i in visited)
    return TrajectoryStats(seed, t, jumps, (a, b), k, occupation(time_in), batch_occ, conserved,
                           time_in / time_in.sum(), hash(tuple(digest)))


def exact_occupation(chain: FiniteChain, pi: Sequence[Fraction], sites: tuple[int, int]) -> list[list[Fraction]]:
    """Exact per-site occupation probabilities under pi."""
    a, b = sites
    k = chain.states[0].k
    res = [[Fraction(0)] * (k + 1) for _ in range(a, b + 1)]
    for s, p in zip(chain.states, pi):
        for j, i in enumerate(range(a, b + 1)):
            res[j][s.at(i)] += p
    return res
