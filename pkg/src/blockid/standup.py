"""Configurations as finite deviations from ground states, and standing them up.

An ``EtaState`` holds occupancies on sites lo..hi; sites left of the window are
empty and sites right of it are full (k particles). An ``OmegaState`` holds the
gaps omega_{-1}, ..., omega_{-D} between consecutive particles; beyond depth D
it agrees with the ground pattern omega_{-i} = [i = m mod k].
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .blocking import RateTable


# states ---------------------------------------------------------------------


@dataclass(frozen=True)
class EtaState:
    k: int
    lo: int
    occ: tuple[int, ...]

    def __post_init__(self):
        occ = tuple(int(v) for v in self.occ)
        if any(v < 0 or v > self.k for v in occ):
            raise ValueError(f"occupancies must lie in 0..{self.k}")
        lo = self.lo
        start = 0
        while start < len(occ) and occ[start] == 0:
            start += 1
        end = len(occ)
        while end > start and occ[end - 1] == self.k:
            end -= 1
        if start == end:
            # a pure step: keep lo at the first full site
            lo = lo + start
            occ = ()
        else:
            lo = lo + start
            occ = occ[start:end]
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "occ", occ)

    @property
    def hi(self) -> int:
        return self.lo + len(self.occ) - 1

    def at(self, i: int) -> int:
        if i < self.lo:
            return 0
        if i > self.hi:
            return self.k
        return self.occ[i - self.lo]

    def window(self, a: int, b: int) -> tuple[int, ...]:
        return tuple(self.at(i) for i in range(a, b + 1))

    @classmethod
    def from_window(cls, k: int, a: int, values: Sequence[int]) -> "EtaState":
        return cls(k, a, tuple(values))

    @classmethod
    def ground(cls, k: int, m: int = 0, shift: int = 0) -> "EtaState":
        """Ground state with N = -m: empty left of 0, m particles at 0, full right of 0."""
        if not 0 <= m < k:
            raise ValueError("m must lie in 0..k-1")
        return cls(k, shift, (m,)) if m else cls(k, shift + 1, ())

    def shifted(self, s: int) -> "EtaState":
        """Translate by s sites to the right."""
        return EtaState(self.k, self.lo + s, self.occ)

    def to_json(self) -> str:
        return json.dumps({"k": self.k, "n": conserved_n(self), "lo": self.lo, "values": list(self.occ)})


@dataclass(frozen=True)
class OmegaState:
    k: int
    m: int
    vals: tuple[int, ...]

    def __post_init__(self):
        if not 0 <= self.m < self.k:
            raise ValueError("class m must lie in 0..k-1")
        vals = tuple(int(v) for v in self.vals)
        if any(v < 0 for v in vals):
            raise ValueError("gaps must be nonnegative")
        d = len(vals)
        while d and vals[d - 1] == self.ground_at(d):
            d -= 1
        vals = vals[:d]
        object.__setattr__(self, "vals", vals)
        run = 0
        for i in range(1, d + self.k + 1):
            if self.at(i) == 0:
                run += 1
                if run >= self.k:
                    raise ValueError(f"{self.k} consecutive zero gaps ending at -{i}")
            else:
                run = 0

    def ground_at(self, i: int) -> int:
        return int(i % self.k == self.m % self.k)

    @property
    def depth(self) -> int:
        return len(self.vals)

    def at(self, i: int) -> int:
        """omega_{-i} for i >= 1."""
        if i <= len(self.vals):
            return self.vals[i - 1]
        return self.ground_at(i)

    def prefix(self, n: int) -> tuple[int, ...]:
        return tuple(self.at(i) for i in range(1, n + 1))

    @classmethod
    def ground(cls, k: int, m: int = 0) -> "OmegaState":
        return cls(k, m, ())

    @classmethod
    def from_values(cls, k: int, m: int, values: Sequence[int]) -> "OmegaState":
        return cls(k, m, tuple(values))

    def weight(self) -> int:
        """sum_i i (omega_{-i} - ground_i)."""
        return sum(i * (self.at(i) - self.ground_at(i)) for i in range(1, self.depth + 1))

    def t_exponent(self) -> int:
        """2 (#{non-ground i with omega >= 1} - #{ground i with omega = 0})."""
        pos = sum(1 for i in range(1, self.depth + 1) if not self.ground_at(i) and self.at(i) >= 1)
        neg = sum(1 for i in range(1, self.depth + 1) if self.ground_at(i) and self.at(i) == 0)
        return 2 * (pos - neg)

    def to_json(self) -> str:
        return json.dumps({"k": self.k, "m": self.m, "values": list(self.vals)})


# conserved quantity, standing up and laying down -------------------------------


def conserved_n(eta: EtaState) -> int:
    """N = sum_{i>=1} (k - eta_i) - sum_{i<=0} eta_i."""
    a, b = min(eta.lo, 1), max(eta.hi, 0)
    total = 0
    for i in range(a, b + 1):
        v = eta.at(i)
        total += (eta.k - v) if i >= 1 else -v
    return total


def _particle_sites(eta: EtaState, count: int) -> list[int]:
    sites = []
    i = eta.lo
    while len(sites) < count:
        sites.extend([i] * eta.at(i))
        i += 1
    return sites[:count]


def stand_up(eta: EtaState) -> OmegaState:
    """Gaps between consecutive particles, read left to right and bottom to top."""
    k = eta.k
    n = conserved_n(eta)
    m = (-n) % k
    count = sum(eta.occ) + 2 * k + 2
    sites = _particle_sites(eta, count)
    gaps = [sites[r + 1] - sites[r] for r in range(len(sites) - 1)]
    omega = OmegaState(k, m, tuple(gaps))
    tail = range(omega.depth + 1, len(gaps) + 1)
    if any(gaps[i - 1] != omega.ground_at(i) for i in tail):
        raise AssertionError("stood-up tail does not match the ground pattern of its class")
    return omega


def first_site(omega: OmegaState, n: int) -> int:
    """Site of the left-most particle of the configuration with N = n standing up to omega.

    Past a depth D with D = m mod k every later site is full, so
    S_{D+1} = (n + D)/k + 1 and S_1 = S_{D+1} - sum_{i<=D} omega_{-i}.
    """
    k, m = omega.k, omega.m
    if (n + m) % k:
        raise ValueError(f"N = {n} is not in class -{m} mod {k}")
    d = omega.depth
    d += (m - d) % k
    return (n + d) // k + 1 - sum(omega.at(i) for i in range(1, d + 1))


def lay_down(omega: OmegaState, n: int) -> EtaState:
    k = omega.k
    s = first_site(omega, n)
    total = omega.depth + 2 * k
    sites = [s]
    for r in range(1, total + 1):
        sites.append(sites[-1] + omega.at(r))
    lo, hi = sites[0], sites[-1]
    occ = [0] * (hi - lo + 1)
    for x in sites[:-1]:
        occ[x - lo] += 1
    # the last recorded site may be partially listed; treat it and beyond as full
    occ[hi - lo] = k
    eta = EtaState(k, lo, tuple(occ))
    return eta


# jumps --------------------------------------------------------------------------


@dataclass(frozen=True)
class JumpEvent:
    """A transition; ``site`` is the left site of the bond (eta) or r (omega); 0 is the boundary."""

    site: int
    direction: str  # "right" | "left" | "in" | "out"
    rate: Fraction


def eta_jumps(eta: EtaState, rates: RateTable) -> list[tuple[JumpEvent, EtaState]]:
    """All positive-rate nearest-neighbour moves, scanning one site past the window."""
    k = eta.k
    a, b = eta.lo - 1, eta.hi + 1
    if not eta.occ:
        a, b = eta.lo - 1, eta.lo
    vals = list(eta.window(a, b + 1))
    out = []
    for j in range(len(vals) - 1):
        i = a + j
        y, z = vals[j], vals[j + 1]
        pr = rates.p[y][z]
        if pr:
            new = vals.copy()
            new[j] -= 1
            new[j + 1] += 1
            out.append((JumpEvent(i, "right", pr), EtaState(k, a, tuple(new))))
        ql = rates.q[y][z]
        if ql:
            new = vals.copy()
            new[j] += 1
            new[j + 1] -= 1
            out.append((JumpEvent(i, "left", ql), EtaState(k, a, tuple(new))))
    return out


def _stack_size_above(omega: OmegaState, r: int) -> int:
    """Number of particles after r sharing its site."""
    n = 0
    while omega.at(r + n) == 0:
        n += 1
    return n


def _stack_size_below(omega: OmegaState, r: int) -> int:
    """Number of particles before r sharing its site (r >= 1)."""
    n = 0
    while r - n - 1 >= 1 and omega.at(r - n - 1) == 0:
        n += 1
    return n


def _apply(omega: OmegaState, deltas: dict[int, int]) -> OmegaState:
    d = max(list(deltas) + [omega.depth]) + omega.k
    vals = list(omega.prefix(d))
    for i, dv in deltas.items():
        vals[i - 1] += dv
    return OmegaState(omega.k, omega.m, tuple(vals))


def _is_exclusion(rates: RateTable) -> bool:
    k = rates.k
    pv = {rates.p[y][z] for y in range(1, k + 1) for z in range(k)}
    qv = {rates.q[y][z] for y in range(k) for z in range(1, k + 1)}
    return len(pv) == 1 and len(qv) == 1


def _zero_run(omega: OmegaState, idx: Sequence[int]) -> int:
    """Product of [omega_{-i} = 0] over idx; indices i <= 0 count as nonzero."""
    return int(all(i >= 1 and omega.at(i) == 0 for i in idx))


def _rates_k2(omega: OmegaState, rates: RateTable, r: int) -> tuple[Fraction, Fraction]:
    """Right and left rates at position r >= 2 for k = 2 tables."""
    p, q = rates.p, rates.q
    w_r, w_prev = omega.at(r), omega.at(r - 1)
    nz_next = int(omega.at(r + 1) != 0)
    if w_r == 0:
        right = Fraction(0)
    elif w_r == 1:
        right = (p[2][1] if w_prev == 0 else p[1][1]) * nz_next
    else:
        right = p[2][0] if w_prev == 0 else p[1][0]
    nz_prev2 = 1 if r - 2 < 1 else int(omega.at(r - 2) != 0)
    if w_prev == 0:
        left = Fraction(0)
    elif w_prev == 1:
        left = (q[1][2] if w_r == 0 else q[1][1]) * nz_prev2
    else:
        left = q[0][2] if w_r == 0 else q[0][1]
    return right, left


def _boundary_k2(omega: OmegaState, rates: RateTable) -> tuple[Fraction, Fraction]:
    p, q = rates.p, rates.q
    w1 = omega.at(1)
    if w1 == 0:
        return Fraction(0), q[0][2]
    if w1 == 1:
        return p[1][1] * int(omega.at(2) != 0), q[0][1]
    return p[1][0], q[0][1]


def _rates_exclusion(omega: OmegaState, rates: RateTable, r: int) -> tuple[Fraction, Fraction]:
    k = omega.k
    pr, qr = rates.p[1][0], rates.q[0][1]
    w_r, w_prev = omega.at(r), omega.at(r - 1)
    if w_r == 0:
        right = Fraction(0)
    elif w_r == 1:
        right = pr * (1 - _zero_run(omega, [r + j for j in range(1, k)]))
    else:
        right = pr
    if w_prev == 0:
        left = Fraction(0)
    elif w_prev == 1:
        left = qr * (1 - _zero_run(omega, [r - 1 - j for j in range(1, k)]))
    else:
        left = qr
    return right, left


def _boundary_exclusion(omega: OmegaState, rates: RateTable) -> tuple[Fraction, Fraction]:
    k = omega.k
    pr, qr = rates.p[1][0], rates.q[0][1]
    w1 = omega.at(1)
    if w1 == 0:
        into = Fraction(0)
    elif w1 == 1:
        into = pr * (1 - _zero_run(omega, [1 + j for j in range(1, k)]))
    else:
        into = pr
    return into, qr


def omega_jumps(omega: OmegaState, rates: RateTable) -> list[tuple[JumpEvent, OmegaState]]:
    """Stood-up transitions.

    A right move at r lowers omega_{-r} and raises omega_{-r+1}; a left move does
    the reverse. At the boundary, "in" lowers omega_{-1} and "out" raises it.
    """
    if rates.k != omega.k:
        raise ValueError("rate table and state disagree on k")
    if rates.k == 2:
        bulk, boundary = _rates_k2, _boundary_k2
    elif _is_exclusion(rates):
        bulk, boundary = _rates_exclusion, _boundary_exclusion
    else:
        raise ValueError("stood-up rates are tabulated only for k = 2 and k-exclusion")
    out = []
    into, outof = boundary(omega, rates)
    if into:
        out.append((JumpEvent(0, "in", into), _apply(omega, {1: -1})))
    if outof:
        out.append((JumpEvent(0, "out", outof), _apply(omega, {1: +1})))
    # beyond depth + k the state is ground and every bulk move is blocked or
    # creates a deviation; scan one block further to be safe
    for r in range(2, omega.depth + 2 * omega.k + 2):
        right, left = bulk(omega, rates, r)
        if right:
            out.append((JumpEvent(r, "right", right), _apply(omega, {r: -1, r - 1: +1})))
        if left:
            out.append((JumpEvent(r, "left", left), _apply(omega, {r: +1, r - 1: -1})))
    return out


def omega_jumps_from_occupancy(omega: OmegaState, rates: RateTable) -> list[tuple[JumpEvent, OmegaState]]:
    """Stood-up transitions computed by reading site occupancies off the gap sequence.

    Independent of the tabulated indicator forms; valid for any k.
    """
    k = omega.k
    p, q = rates.p, rates.q
    out = []

    def right_rate(r: int) -> Fraction:
        # particle r must be the top of its stack, i.e. omega_{-r} >= 1
        if omega.at(r) == 0:
            return Fraction(0)
        y = 1 + _stack_size_below(omega, r)
        z = 0 if omega.at(r) >= 2 else 1 + _stack_size_above(omega, r + 1)
        if y > k or z > k:
            return Fraction(0)
        return p[y][z]

    def left_rate(r: int) -> Fraction:
        # particle r must be the bottom of its stack, i.e. omega_{-r+1} >= 1 (or r = 1)
        if r >= 2 and omega.at(r - 1) == 0:
            return Fraction(0)
        z = 1 + _stack_size_above(omega, r)
        if r == 1 or omega.at(r - 1) >= 2:
            y = 0
        else:
            y = 1 + _stack_size_below(omega, r - 1)
        if y > k or z > k:
            return Fraction(0)
        return q[y][z]

    into, outof = right_rate(1), left_rate(1)
    if into:
        out.append((JumpEvent(0, "in", into), _apply(omega, {1: -1})))
    if outof:
        out.append((JumpEvent(0, "out", outof), _apply(omega, {1: +1})))
    for r in range(2, omega.depth + 2 * k + 2):
        right, left = right_rate(r), left_rate(r)
        if right:
            out.append((JumpEvent(r, "right", right), _apply(omega, {r: -1, r - 1: +1})))
        if left:
            out.append((JumpEvent(r, "left", left), _apply(omega, {r: +1, r - 1: -1})))
    return out


def intertwine_check(eta: EtaState, rates: RateTable, omega_rates: RateTable | None = None) -> bool:
    """Do the eta moves and the stood-up moves match, target by target and rate by rate?"""
    omega_rates = rates if omega_rates is None else omega_rates
    omega = stand_up(eta)
    lhs: dict[OmegaState, Fraction] = {}
    for ev, eta2 in eta_jumps(eta, rates):
        key = stand_up(eta2)
        lhs[key] = lhs.get(key, Fraction(0)) + ev.rate
    rhs: dict[OmegaState, Fraction] = {}
    for ev, om2 in omega_jumps(omega, omega_rates):
        rhs[om2] = rhs.get(om2, Fraction(0)) + ev.rate
    return lhs == rhs


# enumeration helpers ---------------------------------------------------------------


def window_states(k: int, a: int, b: int, n: int | None = None) -> Iterator[EtaState]:
    """All states equal to the ground step outside sites a..b (optionally with N = n)."""
    for vals in itertools.product(range(k + 1), repeat=b - a + 1):
        eta = EtaState(k, a, vals)
        if n is None or conserved_n(eta) == n:
            yield eta
