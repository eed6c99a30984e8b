"""Nearest-neighbour rate tables on {0..k} and their product blocking measures."""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

Rate = Fraction


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class RateTable:
    """p[y][z]: rate of a right jump from a site holding y onto one holding z.

    q[y][z]: rate of a left jump from the site holding z onto the site holding y
    to its left. Both are (k+1) x (k+1) tables of exact rationals.
    """

    k: int
    p: tuple[tuple[Fraction, ...], ...]
    q: tuple[tuple[Fraction, ...], ...]
    name: str = ""

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be positive")
        for tab in (self.p, self.q):
            if len(tab) != self.k + 1 or any(len(row) != self.k + 1 for row in tab):
                raise ValueError("rate tables must be (k+1) x (k+1)")
        object.__setattr__(self, "p", tuple(tuple(_frac(v) for v in row) for row in self.p))
        object.__setattr__(self, "q", tuple(tuple(_frac(v) for v in row) for row in self.q))

    def scaled(self, which: str, y: int, z: int, factor) -> "RateTable":
        """Copy with a single rate multiplied by factor (used for negative controls)."""
        tabs = {"p": [list(r) for r in self.p], "q": [list(r) for r in self.q]}
        tabs[which][y][z] *= _frac(factor)
        return RateTable(self.k, tabs["p"], tabs["q"], self.name + "*")

    def to_json(self) -> str:
        def enc(tab):
            return [[f"{v.numerator}/{v.denominator}" for v in row] for row in tab]

        return json.dumps({"k": self.k, "p": enc(self.p), "q": enc(self.q)})

    @classmethod
    def from_json(cls, text: str) -> "RateTable":
        doc = json.loads(text)
        return cls(doc["k"], [[Fraction(v) for v in row] for row in doc["p"]],
                   [[Fraction(v) for v in row] for row in doc["q"]])


@dataclass(frozen=True)
class Violation:
    axiom: str
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def accepted(self) -> bool:
        return not self.violations


def _forced_zero(k: int, which: str, y: int, z: int) -> bool:
    if which == "p":
        return y == 0 or z == k
    return y == k or z == 0


def _check_b1(r: RateTable) -> list[Violation]:
    out = []
    for which, tab in (("p", r.p), ("q", r.q)):
        for y in range(r.k + 1):
            for z in range(r.k + 1):
                v = tab[y][z]
                if _forced_zero(r.k, which, y, z):
                    if v != 0:
                        out.append(Violation("B1", f"{which}({y},{z}) = {v} must vanish"))
                elif v <= 0:
                    out.append(Violation("positivity", f"{which}({y},{z}) = {v} must be positive"))
    return out


def validate(r: RateTable) -> ValidationReport:
    """Check the blocking axioms; all failures are collected, none raised."""
    out = _check_b1(r)
    if r.k != 2:
        out += _check_exclusion_pattern(r)
        return ValidationReport(tuple(out))
    p, q = r.p, r.q
    for z in (0, 1):
        if not p[2][z] >= p[1][z]:
            out.append(Violation("B2", f"p(2,{z}) = {p[2][z]} < p(1,{z}) = {p[1][z]}"))
    for y in (1, 2):
        if not p[y][0] >= p[y][1]:
            out.append(Violation("B2", f"p({y},0) = {p[y][0]} < p({y},1) = {p[y][1]}"))
    for z in (1, 2):
        if not q[0][z] >= q[1][z]:
            out.append(Violation("B2", f"q(0,{z}) = {q[0][z]} < q(1,{z}) = {q[1][z]}"))
    for y in (0, 1):
        if not q[y][2] >= q[y][1]:
            out.append(Violation("B2", f"q({y},2) = {q[y][2]} < q({y},1) = {q[y][1]}"))
    for y in (1, 2):
        for z in (0, 1):
            if not p[y][z] > q[z][y]:
                out.append(Violation("a", f"p({y},{z}) = {p[y][z]} <= q({z},{y}) = {q[z][y]}"))
    if q[0][1] and q[1][2]:
        lhs, rhs = p[1][0] / q[0][1], p[2][1] / q[1][2]
        if lhs != rhs:
            out.append(Violation("b", f"p(1,0)/q(0,1) = {lhs} != p(2,1)/q(1,2) = {rhs}"))
    den = q[0][1] * q[1][2] * p[2][0] * p[1][1]
    if den:
        c = p[1][0] * p[2][1] * q[1][1] * q[0][2] / den
        if c != 1:
            out.append(Violation("c", f"cycle product = {c} != 1"))
    return ValidationReport(tuple(out))


def _check_exclusion_pattern(r: RateTable) -> list[Violation]:
    out = []
    pv = {r.p[y][z] for y in range(1, r.k + 1) for z in range(r.k)}
    qv = {r.q[y][z] for y in range(r.k) for z in range(1, r.k + 1)}
    if len(pv) != 1 or len(qv) != 1:
        out.append(Violation("pattern", "general k tables must have constant allowed p and q rates"))
        return out
    (pp,), (qq,) = pv, qv
    if not pp > qq:
        out.append(Violation("a", f"right rate {pp} <= left rate {qq}"))
    return out


# derived parameters -----------------------------------------------------


@dataclass(frozen=True, order=True)
class TValue:
    """coef * t**tpow with coef rational and t known through t^2."""

    coef: Fraction
    tpow: int = 0

    def __mul__(self, other: "TValue") -> "TValue":
        return TValue(self.coef * other.coef, self.tpow + other.tpow)

    def inverse(self) -> "TValue":
        return TValue(1 / self.coef, -self.tpow)

    def rational(self, t_squared: Fraction) -> Fraction:
        if self.tpow % 2:
            raise ValueError("odd power of t is not rational in general")
        return self.coef * t_squared ** (self.tpow // 2)

    def value(self, t: float) -> float:
        return float(self.coef) * t**self.tpow


def t_equal(a: TValue, b: TValue, t_squared: Fraction) -> bool:
    """Exact equality of two t-monomials, given t^2 (t > 0)."""
    if (a.tpow - b.tpow) % 2:
        if a.coef == 0 and b.coef == 0:
            return True
        # a == b  <=>  a.coef^2 t^(2 a.tpow) == b.coef^2 t^(2 b.tpow) with matching signs
        if (a.coef > 0) != (b.coef > 0):
            return False
        lhs = TValue(a.coef * a.coef, 2 * a.tpow)
        rhs = TValue(b.coef * b.coef, 2 * b.tpow)
        return t_equal(lhs, rhs, t_squared)
    d = a.tpow - b.tpow
    if d >= 0:
        return a.coef * t_squared ** (d // 2) == b.coef
    return a.coef == b.coef * t_squared ** (-d // 2)


def exact_sqrt(x: Fraction) -> Fraction | None:
    if x < 0:
        return None
    n, d = math.isqrt(x.numerator), math.isqrt(x.denominator)
    if n * n == x.numerator and d * d == x.denominator:
        return Fraction(n, d)
    return None


@dataclass(frozen=True)
class BlockingParams:
    k: int
    p_asym: Fraction
    q_asym: Fraction
    qtilde: Fraction
    t_squared: Fraction
    f: tuple[TValue, ...]
    s: Mapping[tuple[int, int], TValue] = field(default_factory=dict)

    @property
    def t(self) -> Fraction | None:
        """Exact t when t^2 is a rational square, else None."""
        return exact_sqrt(self.t_squared)

    @property
    def t_float(self) -> float:
        return math.sqrt(self.t_squared)

    def f_factorial(self, z: int) -> TValue:
        acc = TValue(Fraction(1))
        for y in range(1, z + 1):
            acc = acc * self.f[y]
        return acc


def derive_params(r: RateTable) -> BlockingParams:
    rep = validate(r)
    if not rep.accepted:
        raise ValueError(f"rate table rejected: {[v.axiom for v in rep.violations]}")
    if r.k != 2:
        pp, qq = r.p[1][0], r.q[0][1]
        tot = pp + qq
        ones = TValue(Fraction(1))
        f = (TValue(Fraction(0)),) + (ones,) * r.k
        s = {(y, z): TValue(tot) for y in range(1, r.k + 1) for z in range(1, r.k + 1)}
        return BlockingParams(r.k, pp / tot, qq / tot, qq / pp, Fraction(1), f, s)
    p, q = r.p, r.q
    p10, q01 = p[1][0], q[0][1]
    tot = p10 + q01
    t2 = p10 * q[0][2] / (q01 * p[1][1])
    f = (TValue(Fraction(0)), TValue(Fraction(1), -1), TValue(Fraction(1), 1))
    s = {
        (1, 1): TValue(tot, 1),
        (1, 2): TValue(p[1][1] * tot / p10, 1),
        (2, 1): TValue(p[2][0] * tot / p10, -1),
        (2, 2): TValue(p[2][1] * tot / p10, -1),
    }
    return BlockingParams(2, p10 / tot, q01 / tot, q01 / p10, t2, f, s)


def reconstruct(params: BlockingParams) -> RateTable:
    """Rebuild p, q from p_asym, q_asym, s and f."""
    k = params.k
    p = [[Fraction(0)] * (k + 1) for _ in range(k + 1)]
    q = [[Fraction(0)] * (k + 1) for _ in range(k + 1)]
    for y in range(k + 1):
        for z in range(k + 1):
            if y >= 1 and z < k:
                v = TValue(params.p_asym) * params.s[(y, z + 1)] * params.f[y]
                p[y][z] = v.rational(params.t_squared)
            if y < k and z >= 1:
                v = TValue(params.q_asym) * params.s[(y + 1, z)] * params.f[z]
                q[y][z] = v.rational(params.t_squared)
    return RateTable(k, p, q, "reconstructed")


# marginals ----------------------------------------------------------------


def marginal_weight(i: int, z: int, params: BlockingParams, c: int = 0) -> TValue:
    """Unnormalized mu_i^c(z) = (p_asym/q_asym)^((i-c) z) / f(z)!, as coef * t^pow."""
    if not 0 <= z <= params.k:
        raise ValueError("occupancy out of range")
    ratio = 1 / params.qtilde
    return TValue(ratio ** ((i - c) * z)) * params.f_factorial(z).inverse()


def marginal(i: int, z: int, params: BlockingParams, c: float = 0.0) -> float:
    t = params.t_float
    qt = float(params.qtilde)
    w = [qt ** (-(i - c) * y) * params.f_factorial(y).inverse().value(t) for y in range(params.k + 1)]
    return w[z] / sum(w)


def marginal_exact(i: int, params: BlockingParams, c: int = 0) -> list[Fraction]:
    """Normalized marginal as exact rationals; needs a rational t."""
    t = params.t
    if t is None:
        raise ValueError("t is irrational; use marginal()")
    w = [marginal_weight(i, z, params, c) for z in range(params.k + 1)]
    vals = [x.coef * t**x.tpow for x in w]
    tot = sum(vals)
    return [v / tot for v in vals]


def class_probability(params: BlockingParams, c: float, m: int, tol: float = 1e-12,
                      max_sites: int = 100_000) -> float:
    """Probability that N = -m mod k under the product measure mu^c."""
    k = params.k
    t = params.t_float

    def marg(i: int) -> list[float]:
        # log-space weights avoid overflow far from the interface
        lq = math.log(float(params.qtilde))
        logs = [-(i - c) * y * lq + math.log(params.f_factorial(y).inverse().value(t)) for y in range(k + 1)]
        top = max(logs)
        w = [math.exp(v - top) for v in logs]
        tot = sum(w)
        return [x / tot for x in w]

    if k == 2:
        prod = 1.0
        for i in _sites_until_converged(lambda i: 1 - 2 * marg(i)[1], tol, max_sites):
            prod *= i
        odd = (1 - prod) / 2
        val = odd if m % 2 == 1 else 1 - odd
        return min(max(val, 0.0), 1.0)
    zeta = cmath.exp(2j * math.pi / k)
    total = 0j
    for rr in range(k):
        prod = 1 + 0j
        if rr:
            def factor(i, rr=rr):
                mu = marg(i)
                return 1 + sum((zeta ** (rr * j) - 1) * mu[j] for j in range(1, k))

            for val in _sites_until_converged(factor, tol, max_sites):
                prod *= val
        total += zeta ** (-rr * m) * prod
    return min(max((total / k).real, 0.0), 1.0)


def _sites_until_converged(factor, tol: float, max_sites: int):
    """Yield factor(i) for i = 0, 1, -1, 2, -2, ... until both tails are within tol of 1."""
    yield factor(0)
    quiet = 0
    for n in range(1, max_sites):
        a, b = factor(n), factor(-n)
        yield a
        yield b
        if abs(a - 1) < tol and abs(b - 1) < tol:
            quiet += 1
            if quiet >= 3:
                return
        else:
            quiet = 0
    raise RuntimeError("site product did not converge within the site budget")


# model families -----------------------------------------------------------


def q_integer(n: int, q: Fraction) -> Fraction:
    """[n]_q = q^(1-n) + q^(3-n) + ... + q^(n-1); [0]_q = 0."""
    return sum((q ** (n - 1 - 2 * j) for j in range(n)), Fraction(0))


def _check_q(q: Fraction) -> Fraction:
    q = _frac(q)
    if not 0 < q < 1:
        raise ValueError("q must lie in (0, 1)")
    return q


def asep_q1_table(q) -> RateTable:
    """ASEP(q, 1): p(y,z) = q^(y-z-3)[y][2-z], q(y,z) = q^(y-z+3)[2-y][z]."""
    q = _check_q(q)
    p_tab = [[q ** (y - z - 3) * q_integer(y, q) * q_integer(2 - z, q) for z in range(3)] for y in range(3)]
    q_tab = [[q ** (y - z + 3) * q_integer(2 - y, q) * q_integer(z, q) for z in range(3)] for y in range(3)]
    return RateTable(2, p_tab, q_tab, f"asep(q={q})")


def three_state_table(q, gamma, gamma_prime=None) -> RateTable:
    q = _check_q(q)
    gamma = _frac(gamma)
    gp = gamma if gamma_prime is None else _frac(gamma_prime)
    if not 0 < gamma <= 1:
        raise ValueError("gamma must lie in (0, 1]")
    zero = Fraction(0)
    p_tab = [[zero] * 3, [Fraction(1), gamma, zero], [Fraction(2), Fraction(1), zero]]
    q_tab = [[zero, q, 2 * q], [zero, gp * q, q], [zero] * 3]
    return RateTable(2, p_tab, q_tab, f"three-state(q={q},gamma={gamma})")


def k_exclusion_table(q, k: int) -> RateTable:
    q = _check_q(q)
    if k < 1:
        raise ValueError("k must be positive")
    p_tab = [[Fraction(int(y != 0 and z != k)) for z in range(k + 1)] for y in range(k + 1)]
    q_tab = [[q * int(z != 0 and y != k) for z in range(k + 1)] for y in range(k + 1)]
    return RateTable(k, p_tab, q_tab, f"{k}-exclusion(q={q})")


def model_table(model: str, q, gamma=Fraction(1, 2), k: int = 2) -> RateTable:
    """Look up a model family by name: asep, three-state, exclusion (with k)."""
    if model == "asep":
        return asep_q1_table(q)
    if model == "three-state":
        return three_state_table(q, gamma)
    if model in ("exclusion", "k-exclusion"):
        return k_exclusion_table(q, k)
    if model == "two-exclusion":
        return k_exclusion_table(q, 2)
    raise ValueError(f"unknown model {model!r}")


def rate_rows(tab: Sequence[Sequence[Fraction]]) -> str:
    return "\n".join(" ".join(str(v) for v in row) for row in tab)
