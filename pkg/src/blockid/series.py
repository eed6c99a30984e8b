"""Exact truncated power series in ``q``, ``t`` and Laurent ``z``.

Coefficients are Python ints. Truncation is by q-degree only: every stored
monomial has ``dq <= order`` and the t and z exponents are kept exactly.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping

Monomial = tuple[int, int, int]  # (dq, dt, dz)


def _clean(terms: Mapping[Monomial, int], order: int) -> dict[Monomial, int]:
    out = {}
    for mono, c in terms.items():
        dq, dt, _ = mono
        if dq < 0 or dt < 0:
            raise ValueError(f"negative q or t exponent in {mono}")
        if c and dq <= order:
            out[mono] = int(c)
    return out


@dataclass(frozen=True)
class TruncatedSeries:
    """Integer series sum c * q^dq t^dt z^dz known exactly up to q^order."""

    order: int
    terms: Mapping[Monomial, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.order < 0:
            raise ValueError("order must be nonnegative")
        object.__setattr__(self, "terms", _clean(self.terms, self.order))

    # construction -------------------------------------------------------

    @classmethod
    def zero(cls, order: int) -> "TruncatedSeries":
        return cls(order, {})

    @classmethod
    def one(cls, order: int) -> "TruncatedSeries":
        return cls(order, {(0, 0, 0): 1})

    @classmethod
    def monomial(cls, order: int, dq: int = 0, dt: int = 0, dz: int = 0,
                 coeff: int = 1) -> "TruncatedSeries":
        return cls(order, {(dq, dt, dz): coeff})

    @classmethod
    def from_q_coeffs(cls, coeffs: Iterable[int], order: int | None = None) -> "TruncatedSeries":
        coeffs = list(coeffs)
        if order is None:
            order = max(len(coeffs) - 1, 0)
        return cls(order, {(n, 0, 0): c for n, c in enumerate(coeffs) if n <= order})

    # arithmetic ---------------------------------------------------------

    def truncate(self, order: int) -> "TruncatedSeries":
        if order > self.order:
            raise ValueError("cannot raise the truncation order")
        return TruncatedSeries(order, self.terms)

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return add(self, other)

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return add(self, other.scale(-1))

    def __neg__(self) -> "TruncatedSeries":
        return self.scale(-1)

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        return mul(self, other)

    __rmul__ = __mul__

    def scale(self, c: int) -> "TruncatedSeries":
        return TruncatedSeries(self.order, {m: c * v for m, v in self.terms.items()})

    def shift(self, dq: int = 0, dt: int = 0, dz: int = 0) -> "TruncatedSeries":
        """Multiply by the monomial q^dq t^dt z^dz (dq, dt >= 0)."""
        if dq < 0 or dt < 0:
            raise ValueError("shift exponents in q and t must be nonnegative")
        return TruncatedSeries(
            self.order,
            {(a + dq, b + dt, c + dz): v for (a, b, c), v in self.terms.items()},
        )

    def map_t(self, sign: int) -> "TruncatedSeries":
        """Substitute t -> sign * t."""
        return TruncatedSeries(
            self.order,
            {(a, b, c): v * sign**b for (a, b, c), v in self.terms.items()},
        )

    # inspection ---------------------------------------------------------

    def coeff(self, dq: int, dt: int = 0, dz: int = 0) -> int:
        return self.terms.get((dq, dt, dz), 0)

    def z_support(self) -> list[int]:
        return sorted({dz for _, _, dz in self.terms})

    def q_coeffs(self) -> list[int]:
        """Coefficient list in q of a series without t or z dependence."""
        out = [0] * (self.order + 1)
        for (dq, dt, dz), v in self.terms.items():
            if dt or dz:
                raise ValueError("series depends on t or z")
            out[dq] = v
        return out

    def at_t(self, value: int) -> "TruncatedSeries":
        """Specialize t to an integer, keeping q and z."""
        acc: dict[Monomial, int] = defaultdict(int)
        for (dq, dt, dz), v in self.terms.items():
            acc[(dq, 0, dz)] += v * value**dt
        return TruncatedSeries(self.order, acc)

    def items(self) -> Iterator[tuple[Monomial, int]]:
        return iter(sorted(self.terms.items()))

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.order == other.order and dict(self.terms) == dict(other.terms)

    def __hash__(self):
        return hash((self.order, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        return f"TruncatedSeries(order={self.order}, {format_series(self)})"

    # serialization ------------------------------------------------------

    def to_records(self) -> list[dict]:
        return [{"dq": a, "dt": b, "dz": c, "coeff": str(v)} for (a, b, c), v in self.items()]

    def to_json(self) -> str:
        return json.dumps({"order": self.order, "terms": self.to_records()}, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "TruncatedSeries":
        doc = json.loads(text)
        return cls(doc["order"], {(r["dq"], r["dt"], r["dz"]): int(r["coeff"]) for r in doc["terms"]})


def format_series(a: TruncatedSeries) -> str:
    if not a.terms:
        return "0"
    parts = []
    for (dq, dt, dz), v in a.items():
        mono = "".join(
            sym if e == 1 else f"{sym}^{e}" for sym, e in (("q", dq), ("t", dt), ("z", dz)) if e
        )
        if not mono:
            parts.append(str(v))
        elif v == 1:
            parts.append(mono)
        elif v == -1:
            parts.append("-" + mono)
        else:
            parts.append(f"{v}*{mono}")
    return " + ".join(parts).replace("+ -", "- ")


def add(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    order = min(a.order, b.order)
    acc: dict[Monomial, int] = defaultdict(int)
    for src in (a, b):
        for m, v in src.terms.items():
            if m[0] <= order:
                acc[m] += v
    return TruncatedSeries(order, acc)


def _by_q(a: TruncatedSeries) -> dict[int, list[tuple[int, int, int]]]:
    rows: dict[int, list[tuple[int, int, int]]] = defaultdict(list)
    for (dq, dt, dz), v in a.terms.items():
        rows[dq].append((dt, dz, v))
    return rows


def mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    order = min(a.order, b.order)
    ra, rb = _by_q(a), _by_q(b)
    acc: dict[Monomial, int] = defaultdict(int)
    for qa, la in ra.items():
        for qb, lb in rb.items():
            dq = qa + qb
            if dq > order:
                continue
            for ta, za, va in la:
                for tb, zb, vb in lb:
                    acc[(dq, ta + tb, za + zb)] += va * vb
    return TruncatedSeries(order, acc)


def coeff_z(a: TruncatedSeries, k: int) -> TruncatedSeries:
    return TruncatedSeries(a.order, {(dq, dt, 0): v for (dq, dt, dz), v in a.terms.items() if dz == k})


def series_sum(items: Iterable[TruncatedSeries], order: int) -> TruncatedSeries:
    acc: dict[Monomial, int] = defaultdict(int)
    for s in items:
        if s.order < order:
            raise ValueError("summand known to lower order than requested")
        for m, v in s.terms.items():
            if m[0] <= order:
                acc[m] += v
    return TruncatedSeries(order, acc)


# infinite products ------------------------------------------------------

Poly = Mapping[Monomial, int]


@dataclass(frozen=True)
class FactorSpec:
    """A formal product prod_{i>=1} factor(i) of finite polynomials."""

    name: str
    factor: Callable[[int], Poly]

    def check_growth(self, i: int) -> None:
        """Non-constant terms of factor(i) must have q-degree >= i-1 and the constant term must be 1."""
        poly = self.factor(i)
        if poly.get((0, 0, 0), 0) != 1:
            raise ValueError(f"{self.name}: factor {i} has constant term != 1")
        for (dq, _, _), v in poly.items():
            if v and (dq, _, _) != (0, 0, 0) and dq < i - 1:
                raise ValueError(f"{self.name}: factor {i} has a term of q-degree {dq} < {i - 1}")


def product_rhs(spec: FactorSpec, order: int, extra_checks: int = 5) -> TruncatedSeries:
    """Expand the infinite product exactly up to q^order.

    Factors i > order + 1 only have non-constant terms of degree >= i - 1 > order,
    so they are congruent to 1; this is checked on the tail factors up to
    ``order + 1 + extra_checks``.
    """
    for i in range(order + 2, order + 2 + extra_checks):
        spec.check_growth(i)
    acc = TruncatedSeries.one(order)
    for i in range(1, order + 2):
        acc = mul(acc, TruncatedSeries(order, spec.factor(i)))
    return acc


def family_k2(sign: int = 1) -> FactorSpec:
    """(1 + s t z q^i + z^2 q^2i)(1 + s t z^-1 q^(i-1) + z^-2 q^(2i-2))."""

    def factor(i: int) -> Poly:
        left = {(0, 0, 0): 1, (i, 1, 1): sign, (2 * i, 0, 2): 1}
        right = {(0, 0, 0): 1, (i - 1, 1, -1): sign, (2 * i - 2, 0, -2): 1}
        return _poly_mul(left, right)

    return FactorSpec(f"k2[{'+' if sign > 0 else '-'}]", factor)


def family_exclusion(k: int) -> FactorSpec:
    """(sum_a q^(a i) z^a)(sum_a q^(a(i-1)) z^-a), a = 0..k, without t."""

    def factor(i: int) -> Poly:
        left = {(a * i, 0, a): 1 for a in range(k + 1)}
        right = {(a * (i - 1), 0, -a): 1 for a in range(k + 1)}
        return _poly_mul(left, right)

    return FactorSpec(f"exclusion[{k}]", factor)


def family_jacobi() -> FactorSpec:
    """(1 - q^i)(1 + z q^i)(1 + z^-1 q^(i-1))."""

    def factor(i: int) -> Poly:
        return _poly_mul(
            _poly_mul({(0, 0, 0): 1, (i, 0, 0): -1}, {(0, 0, 0): 1, (i, 0, 1): 1}),
            {(0, 0, 0): 1, (i - 1, 0, -1): 1},
        )

    return FactorSpec("jacobi", factor)


def family_jacobi_square() -> FactorSpec:
    """(1 - q^2i)(1 + z q^(2i-1))(1 + z^-1 q^(2i-1))."""

    def factor(i: int) -> Poly:
        return _poly_mul(
            _poly_mul({(0, 0, 0): 1, (2 * i, 0, 0): -1}, {(0, 0, 0): 1, (2 * i - 1, 0, 1): 1}),
            {(0, 0, 0): 1, (2 * i - 1, 0, -1): 1},
        )

    return FactorSpec("jacobi-square", factor)


def family_theta_odd(sign: int = 1) -> FactorSpec:
    """(1 + s z q^(2i-1))(1 + s z^-1 q^(2i-1))."""

    def factor(i: int) -> Poly:
        return _poly_mul({(0, 0, 0): 1, (2 * i - 1, 0, 1): sign}, {(0, 0, 0): 1, (2 * i - 1, 0, -1): sign})

    return FactorSpec(f"theta-odd[{'+' if sign > 0 else '-'}]", factor)


def family_theta_square(sign: int = 1) -> FactorSpec:
    """((1 + s z q^i)(1 + s z^-1 q^(i-1)))^2."""

    def factor(i: int) -> Poly:
        one = _poly_mul({(0, 0, 0): 1, (i, 0, 1): sign}, {(0, 0, 0): 1, (i - 1, 0, -1): sign})
        return _poly_mul(one, one)

    return FactorSpec(f"theta-square[{'+' if sign > 0 else '-'}]", factor)


def _poly_mul(a: Poly, b: Poly) -> dict[Monomial, int]:
    acc: dict[Monomial, int] = defaultdict(int)
    for (qa, ta, za), va in a.items():
        for (qb, tb, zb), vb in b.items():
            acc[(qa + qb, ta + tb, za + zb)] += va * vb
    return {m: v for m, v in acc.items() if v}


def q_product(order: int, exponents: Callable[[int], Iterable[tuple[int, int]]]) -> TruncatedSeries:
    """prod over i >= 1 of prod (1 - q^e)^p for (e, p) in exponents(i); p may be negative.

    Only exponents e >= 1 are allowed; factors with e > order are dropped.
    """
    coeffs = [0] * (order + 1)
    coeffs[0] = 1
    i = 1
    while True:
        pairs = [(e, p) for e, p in exponents(i)]
        if all(e > order for e, _ in pairs) and i > order:
            break
        for e, p in pairs:
            if e < 1:
                raise ValueError("product exponents must be positive")
            if e > order:
                continue
            for _ in range(abs(p)):
                if p > 0:
                    for n in range(order, e - 1, -1):
                        coeffs[n] -= coeffs[n - e]
                else:
                    for n in range(e, order + 1):
                        coeffs[n] += coeffs[n - e]
        i += 1
    return TruncatedSeries.from_q_coeffs(coeffs, order)


def q_product_plus(order: int, exponents: Callable[[int], Iterable[tuple[int, int]]]) -> TruncatedSeries:
    """prod over i >= 1 of prod (1 + q^e)^p for p >= 0."""
    coeffs = [0] * (order + 1)
    coeffs[0] = 1
    for i in range(1, order + 2):
        for e, p in exponents(i):
            if p < 0:
                raise ValueError("only nonnegative powers of (1 + q^e)")
            if e < 1 or e > order:
                continue
            for _ in range(p):
                for n in range(order, e - 1, -1):
                    coeffs[n] += coeffs[n - e]
    return TruncatedSeries.from_q_coeffs(coeffs, order)


# Laurent series in a single variable q ----------------------------------


@dataclass(frozen=True)
class LaurentQSeries:
    """sum_{n=lo}^{hi} coeffs[n-lo] q^n, exact through q^hi."""

    lo: int
    hi: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if self.hi < self.lo - 1:
            raise ValueError("hi must be >= lo - 1")
        if len(self.coeffs) != self.hi - self.lo + 1:
            raise ValueError("coefficient count does not match [lo, hi]")

    @classmethod
    def from_dict(cls, d: Mapping[int, int], hi: int) -> "LaurentQSeries":
        support = [e for e, v in d.items() if v and e <= hi]
        lo = min(support) if support else 0
        lo = min(lo, hi + 1)
        return cls(lo, hi, tuple(d.get(e, 0) for e in range(lo, hi + 1)))

    def coeff(self, n: int) -> int:
        if n > self.hi:
            raise ValueError(f"q^{n} beyond exact range {self.hi}")
        if n < self.lo:
            return 0
        return self.coeffs[n - self.lo]

    def as_dict(self) -> dict[int, int]:
        return {self.lo + j: v for j, v in enumerate(self.coeffs) if v}

    def __mul__(self, other: "LaurentQSeries") -> "LaurentQSeries":
        # exactness: a = A + O(q^(ha+1)), b = B + O(q^(hb+1))
        hi = min(self.hi + other.lo, other.hi + self.lo)
        acc: dict[int, int] = defaultdict(int)
        for ea, va in self.as_dict().items():
            for eb, vb in other.as_dict().items():
                if ea + eb <= hi:
                    acc[ea + eb] += va * vb
        return LaurentQSeries.from_dict(acc, hi)

    def __add__(self, other: "LaurentQSeries") -> "LaurentQSeries":
        hi = min(self.hi, other.hi)
        acc: dict[int, int] = defaultdict(int)
        for src in (self, other):
            for e, v in src.as_dict().items():
                if e <= hi:
                    acc[e] += v
        return LaurentQSeries.from_dict(acc, hi)

    def to_csv(self) -> str:
        return "".join(f"{self.lo + j},{v}\n" for j, v in enumerate(self.coeffs))


def substitute(a: TruncatedSeries, alpha: int, t_poly: Mapping[int, int], target: int,
               bound: int = 2) -> LaurentQSeries:
    """Map q -> q^alpha and t -> T(q) for a z-free series, exactly up to q^target.

    Every monomial must satisfy dt <= bound * dq + 1; the unseen part (dq > order)
    then starts at q-degree >= (alpha - bound*s)(order + 1) - s where s is the
    largest negative exponent magnitude of T.
    """
    if alpha < 1:
        raise ValueError("alpha must be positive")
    t_poly = {e: c for e, c in t_poly.items() if c}
    s = max([0] + [-e for e in t_poly])
    slope = alpha - bound * s
    if slope <= 0:
        raise ValueError("substitution does not converge under the declared t bound")
    exact_to = slope * (a.order + 1) - s - 1
    if target > exact_to:
        raise ValueError(f"series of order {a.order} is exact only through q^{exact_to}")
    powers: list[dict[int, int]] = [{0: 1}]
    acc: dict[int, int] = defaultdict(int)
    for (dq, dt, dz), v in a.terms.items():
        if dz:
            raise ValueError("substitute needs a z-free series; extract coefficients first")
        if dt > bound * dq + 1:
            raise ValueError(f"monomial q^{dq} t^{dt} violates dt <= {bound}*dq + 1")
        while len(powers) <= dt:
            nxt: dict[int, int] = defaultdict(int)
            for e1, c1 in powers[-1].items():
                for e2, c2 in t_poly.items():
                    nxt[e1 + e2] += c1 * c2
            powers.append(dict(nxt))
        base = alpha * dq
        for e, c in powers[dt].items():
            if base + e <= target:
                acc[base + e] += v * c
    return LaurentQSeries.from_dict(acc, target)
