"""Truncated verification of the product identities and their specializations.

Each check builds a sum side from the enumerated normalizers with explicit
q-shifts and a product side from ``series.product_rhs``, then compares the
coefficients of z^k' for |k'| <= W up to the requested q-order.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from functools import lru_cache

from .gfp import gf_enumerated
from .normalizers import s_even, s_k, s_odd
from .series import (
    LaurentQSeries,
    TruncatedSeries,
    coeff_z,
    family_exclusion,
    family_jacobi,
    family_jacobi_square,
    family_k2,
    family_theta_odd,
    family_theta_square,
    product_rhs,
    q_product,
    q_product_plus,
    substitute,
)

IDENTITY_IDS = ("main", "jacobi", "asep", "three-state", "two-exclusion", "products",
                "k-exclusion:<k>", "offset-law:<k>:<k'>")

# leading coefficients of the t = 2 normalizers
THREE_STATE_EVEN_HEAD = (1, 4, 9, 20, 42, 80, 147, 260, 445)
THREE_STATE_ODD_DOUBLED_HEAD = (2, 4, 12, 24, 50, 92, 172, 296, 510)
PHI2_HEAD = (1, 1, 3, 5, 9, 14, 24, 35, 55)
ODD_T1_HEAD = (1, 2, 3, 6, 10, 16, 26, 40, 60)
PHI3_HEAD = (1, 1, 3, 6, 11, 18, 31, 49, 78)

ASEP_T = {1: 1, -1: 1}  # t = q + 1/q


@dataclass(frozen=True)
class Discrepancy:
    label: str
    monomial: tuple[int, int, int]
    lhs: int
    rhs: int


@dataclass
class IdentityReport:
    identity: str
    order: int
    z_window: int | None
    equal: bool = True
    discrepancy: Discrepancy | None = None
    checks: list[dict] = field(default_factory=list)

    def compare(self, label: str, lhs: TruncatedSeries, rhs: TruncatedSeries,
                order: int | None = None, **info) -> bool:
        order = self.order if order is None else order
        a, b = lhs.truncate(order), rhs.truncate(order)
        ok = a == b
        if not ok and self.discrepancy is None:
            keys = sorted(set(a.terms) | set(b.terms))
            mono = next(m for m in keys if a.terms.get(m, 0) != b.terms.get(m, 0))
            self.discrepancy = Discrepancy(label, mono, a.terms.get(mono, 0), b.terms.get(mono, 0))
        self.equal &= ok
        self.checks.append({"label": label, "order": order, "equal": ok, **info})
        return ok

    def compare_list(self, label: str, got: list[int], want: tuple[int, ...]) -> bool:
        got = list(got[: len(want)])
        ok = got == list(want)
        if not ok and self.discrepancy is None:
            n = next(i for i, (x, y) in enumerate(zip(got + [None] * len(want), want)) if x != y)
            self.discrepancy = Discrepancy(label, (n, 0, 0), got[n] if n < len(got) else 0, want[n])
        self.equal &= ok
        self.checks.append({"label": label, "order": len(want) - 1, "equal": ok})
        return ok

    def to_dict(self) -> dict:
        d = asdict(self)
        if self.discrepancy is not None:
            d["discrepancy"]["monomial"] = list(self.discrepancy.monomial)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


# cached building blocks --------------------------------------------------


@lru_cache(maxsize=None)
def _even(order: int) -> TruncatedSeries:
    return s_even(order).series


@lru_cache(maxsize=None)
def _odd(order: int) -> TruncatedSeries:
    return s_odd(order).series


@lru_cache(maxsize=None)
def _sk(k: int, m: int, order: int) -> TruncatedSeries:
    return s_k(k, m, order).series


@lru_cache(maxsize=None)
def _k2_products(order: int) -> tuple[TruncatedSeries, TruncatedSeries]:
    return product_rhs(family_k2(1), order), product_rhs(family_k2(-1), order)


def _to_series(a: LaurentQSeries, order: int) -> TruncatedSeries:
    if a.as_dict() and min(a.as_dict()) < 0:
        raise ValueError("negative q-power where a power series was expected")
    return TruncatedSeries(order, {(e, 0, 0): v for e, v in a.as_dict().items()})


def _z_sum(parts: dict[int, TruncatedSeries], order: int) -> TruncatedSeries:
    terms: dict[tuple[int, int, int], int] = {}
    for kp, s in parts.items():
        for (dq, dt, _), v in s.terms.items():
            terms[(dq, dt, kp)] = terms.get((dq, dt, kp), 0) + v
    return TruncatedSeries(order, terms)


def _drop_z(a: TruncatedSeries) -> TruncatedSeries:
    """Specialize z = 1."""
    terms: dict[tuple[int, int, int], int] = {}
    for (dq, dt, _), v in a.terms.items():
        terms[(dq, dt, 0)] = terms.get((dq, dt, 0), 0) + v
    return TruncatedSeries(a.order, terms)


def offset_shift(k: int, kp: int) -> tuple[int, int, int]:
    """(ell, m, q-shift) with kp = k*ell - m and 0 <= m < k."""
    ell = -((-kp) // k)
    m = k * ell - kp
    return ell, m, k * ell * (ell + 1) // 2 - m * ell


# checks --------------------------------------------------------------------


def check_main(order: int = 10, z_window: int = 6) -> IdentityReport:
    rep = IdentityReport("main", order, z_window)
    se, so = _even(order), _odd(order)
    pp, pm = _k2_products(order)
    plus, minus = pp + pm, pp - pm
    zero = TruncatedSeries.zero(order)
    for kp in range(-z_window, z_window + 1):
        if kp % 2 == 0:
            ell = kp // 2
            shift = ell * (ell + 1)
            rep.compare(f"even z^{kp}", (se * 2).shift(dq=shift), coeff_z(plus, kp), min_degree=shift, k=kp)
            rep.compare(f"even-vanish z^{kp}", zero, coeff_z(minus, kp), k=kp)
        else:
            ell = (kp - 1) // 2
            shift = (ell + 1) ** 2
            rep.compare(f"odd z^{kp}", (so * 2).shift(dq=shift, dt=1), coeff_z(minus, kp), min_degree=shift, k=kp)
            rep.compare(f"odd-vanish z^{kp}", zero, coeff_z(plus, kp), k=kp)
    return rep


def check_offset_law(k_rep: int, kp: int, order: int = 10) -> IdentityReport:
    rep = IdentityReport(f"offset-law:{k_rep}:{kp}", order, None)
    ell, m, shift = offset_shift(k_rep, kp)
    if k_rep == 2:
        base = _even(order) if m == 0 else _odd(order).shift(dt=1)
        rep.compare(f"offset {kp}", gf_enumerated(kp, 2, order), base.shift(dq=shift), min_degree=shift)
    else:
        rep.compare(f"offset {kp}", gf_enumerated(kp, k_rep, order).at_t(1),
                    _sk(k_rep, m, order).shift(dq=shift), min_degree=shift)
    return rep


def check_jacobi(order: int = 20, z_window: int = 6) -> IdentityReport:
    rep = IdentityReport("jacobi", order, z_window)
    squares, triangles = {}, {}
    j = 0
    while j * j <= order:
        for kp in {j, -j}:
            squares[kp] = TruncatedSeries.monomial(order, dq=j * j)
        j += 1
    for kp in range(-2 * order - 2, 2 * order + 2):
        if kp * (kp + 1) // 2 <= order:
            triangles[kp] = TruncatedSeries.monomial(order, dq=kp * (kp + 1) // 2)
    prod_sq = product_rhs(family_jacobi_square(), order)
    prod_tri = product_rhs(family_jacobi(), order)
    zero = TruncatedSeries.zero(order)
    for kp in range(-z_window, z_window + 1):
        rep.compare(f"squares z^{kp}", squares.get(kp, zero), coeff_z(prod_sq, kp), k=kp)
        rep.compare(f"triangles z^{kp}", triangles.get(kp, zero), coeff_z(prod_tri, kp), k=kp)
    rep.compare("squares at z=1", _drop_z(_z_sum(squares, order)), _drop_z(prod_sq))
    rep.compare("triangles at z=1", _drop_z(_z_sum(triangles, order)), _drop_z(prod_tri))
    return rep


def asep_specialized(order: int) -> tuple[TruncatedSeries, TruncatedSeries]:
    """S_even and S_odd at q -> q^4, t -> q + 1/q, exact through q^order."""
    n = (order + 1) // 2
    se = _to_series(substitute(_even(n), 4, ASEP_T, order), order)
    so = _to_series(substitute(_odd(n), 4, ASEP_T, order), order)
    return se, so


def check_asep(order: int = 30, z_window: int = 5) -> IdentityReport:
    rep = IdentityReport("asep", order, z_window)
    se, so = asep_specialized(order)
    one = TruncatedSeries.one(order)
    euler = q_product(order, lambda i: [(2 * i, 1)])
    one_plus_q2 = TruncatedSeries.from_q_coeffs([1, 0, 1], order)
    rep.compare("even closed form", se * euler, one)
    rep.compare("odd closed form", one_plus_q2 * so * euler, one)

    tp, tm = product_rhs(family_theta_odd(1), order), product_rhs(family_theta_odd(-1), order)
    for kp in range(-z_window, z_window + 1):
        if kp % 2:
            lhs = (se * 2).shift(dq=kp * kp)
            rep.compare(f"odd powers z^{kp}", lhs, coeff_z(tp - tm, kp), k=kp)
        else:
            lhs = (one_plus_q2 * so * 2).shift(dq=kp * kp)
            rep.compare(f"even powers z^{kp}", lhs, coeff_z(tp + tm, kp), k=kp)

    # the general products collapse under q -> q^4, t -> [2]_q, z -> q^-2 z
    n2 = (order + 1) // 2 + z_window
    pp, pm = _k2_products(n2)
    for sign, general, theta in ((1, pp, tp), (-1, pm, tm)):
        for kp in range(-z_window, z_window + 1):
            sub = substitute(coeff_z(general, kp), 4, ASEP_T, order + 2 * kp)
            moved = {e - 2 * kp: v for e, v in sub.as_dict().items()}
            lhs = _to_series(LaurentQSeries.from_dict(moved, order), order)
            rep.compare(f"collapse {'+' if sign > 0 else '-'} z^{kp}", lhs, coeff_z(theta, kp), k=kp)
    return rep


def three_state_products(order: int) -> tuple[TruncatedSeries, TruncatedSeries]:
    inv = q_product(order, lambda i: [(i, -1)])
    even = q_product_plus(order, lambda i: [(2 * i - 1, 2), (i, 1)]) * inv
    odd = q_product_plus(order, lambda i: [(2 * i, 2), (i, 1)]) * inv
    return even, odd


def check_three_state(order: int = 8, z_window: int = 4) -> IdentityReport:
    rep = IdentityReport("three-state", order, z_window)
    se, so = _even(order).at_t(2), _odd(order).at_t(2)
    rep.compare_list("even head", se.q_coeffs(), THREE_STATE_EVEN_HEAD[: order + 1])
    rep.compare_list("odd head", (so * 2).q_coeffs(), THREE_STATE_ODD_DOUBLED_HEAD[: order + 1])
    pe, po = three_state_products(order)
    rep.compare("even product", se, pe)
    rep.compare("odd product", so, po)
    sp, sm = product_rhs(family_theta_square(1), order), product_rhs(family_theta_square(-1), order)
    for kp in range(-z_window, z_window + 1):
        if kp % 2 == 0:
            ell = kp // 2
            rep.compare(f"even z^{kp}", (se * 2).shift(dq=ell * (ell + 1)), coeff_z(sp + sm, kp), k=kp)
        else:
            ell = (kp - 1) // 2
            rep.compare(f"odd z^{kp}", (so * 4).shift(dq=(ell + 1) ** 2), coeff_z(sp - sm, kp), k=kp)
        # two-coloured rows: each distinct part gets one of two colours
        rep.compare(f"colouring z^{kp}", gf_enumerated(kp, 2, order).at_t(2), coeff_z(sp, kp), k=kp)
    return rep


def check_two_exclusion(order: int = 8, z_window: int = 4) -> IdentityReport:
    rep = IdentityReport("two-exclusion", order, z_window)
    se, so = _even(order).at_t(1), _odd(order).at_t(1)
    pp, pm = (p.at_t(1) for p in _k2_products(order))
    for kp in range(-z_window, z_window + 1):
        if kp % 2 == 0:
            ell = kp // 2
            rep.compare(f"even z^{kp}", (se * 2).shift(dq=ell * (ell + 1)), coeff_z(pp + pm, kp), k=kp)
        else:
            ell = (kp - 1) // 2
            rep.compare(f"odd z^{kp}", (so * 2).shift(dq=(ell + 1) ** 2), coeff_z(pp - pm, kp), k=kp)
    return rep


def phi_products(order: int) -> dict[str, TruncatedSeries]:
    phi2 = q_product(order, lambda i: [(i, -1), (12 * i - 10, -1), (12 * i - 9, -1),
                                       (12 * i - 3, -1), (12 * i - 2, -1)])
    odd1 = q_product(order, lambda i: [(2 * i - 1, -2), (12 * i - 8, -1), (12 * i - 6, -1),
                                       (12 * i - 4, -1), (12 * i, -1)])
    phi3 = q_product(order, lambda i: [(12 * i - 6, 1), (6 * i - 5, -1), (6 * i - 4, -2), (6 * i - 3, -3),
                                       (6 * i - 2, -2), (6 * i - 1, -1), (12 * i, -1)])
    return {"phi2": phi2, "odd-t1": odd1, "phi3": phi3}


def check_phi_products(order: int = 8) -> IdentityReport:
    rep = IdentityReport("products", order, None)
    prods = phi_products(order)
    for label, (k, m), head in (("phi2", (2, 0), PHI2_HEAD), ("odd-t1", (2, 1), ODD_T1_HEAD),
                                ("phi3", (3, 0), PHI3_HEAD)):
        s = _sk(k, m, order)
        rep.compare_list(f"{label} head", s.q_coeffs(), head[: order + 1])
        rep.compare(f"{label} product", s, prods[label])
    return rep


def check_k_exclusion(k: int, order: int = 8, z_window: int = 5) -> IdentityReport:
    """Class-restricted form: coeff of z^(k*ell - m) equals S_{-m} q^(k ell(ell+1)/2 - m ell)."""
    if k < 2:
        raise ValueError("k must be at least 2")
    rep = IdentityReport(f"k-exclusion:{k}", order, z_window)
    prod = product_rhs(family_exclusion(k), order)
    for kp in range(-z_window, z_window + 1):
        ell, m, shift = offset_shift(k, kp)
        rep.compare(f"z^{kp}", _sk(k, m, order).shift(dq=shift), coeff_z(prod, kp),
                    min_degree=shift, k=kp, ell=ell, m=m)
    return rep


def run_identity(identity: str, order: int | None = None, z_window: int | None = None) -> IdentityReport:
    """Dispatch on an identity id such as ``main``, ``k-exclusion:3`` or ``offset-law:2:4``."""
    name, *args = identity.split(":")
    kw = {}
    if order is not None:
        kw["order"] = order
    with_window = dict(kw, **({"z_window": z_window} if z_window is not None else {}))
    try:
        if name == "main" and not args:
            return check_main(**with_window)
        if name == "jacobi" and not args:
            return check_jacobi(**with_window)
        if name == "asep" and not args:
            return check_asep(**with_window)
        if name == "three-state" and not args:
            return check_three_state(**with_window)
        if name == "two-exclusion" and not args:
            return check_two_exclusion(**with_window)
        if name == "products" and not args:
            return check_phi_products(**kw)
        if name == "k-exclusion" and len(args) == 1:
            return check_k_exclusion(int(args[0]), **with_window)
        if name == "offset-law" and len(args) == 2:
            return check_offset_law(int(args[0]), int(args[1]), **kw)
    except ValueError as exc:
        raise ValueError(f"bad identity id {identity!r}: {exc}") from exc
    raise ValueError(f"unknown identity id {identity!r}; expected one of {', '.join(IDENTITY_IDS)}")
