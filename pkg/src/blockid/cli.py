"""Command-line front end: verify identities, print expansions, run the bijections, simulate."""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from importlib import resources
from typing import Sequence

from . import gfp as G
from .blocking import derive_params, model_table
from .identities import IDENTITY_IDS, asep_specialized, phi_products, run_identity
from .normalizers import s_even, s_k, s_odd
from .series import (
    TruncatedSeries,
    coeff_z,
    family_exclusion,
    family_jacobi,
    family_jacobi_square,
    family_k2,
    family_theta_odd,
    family_theta_square,
    product_rhs,
)
from .standup import OmegaState

MODELS = ("two-exclusion", "asep", "three-state", "k-exclusion")
SEQUENCES = ("s_even", "s_odd", "s_k", "gfp", "asep-even", "asep-odd", "three-state-even",
             "three-state-odd", "phi2", "odd-t1", "phi3")
FAMILIES = ("k2", "k2-minus", "exclusion", "jacobi", "jacobi-square", "theta-odd", "theta-square")


class UsageError(Exception):
    pass


def load_schema(name: str) -> dict:
    """JSON schema shipped for an output kind: identity_report, gfp_list, biject, series_terms, simulation."""
    return json.loads(resources.files("blockid").joinpath(f"schemas/{name}.json").read_text())


def _emit(obj, out) -> None:
    out.write(json.dumps(obj, indent=2) + "\n")


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.replace(" ", "").split(",") if v != ""]
    except ValueError as exc:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from exc


def _series_rows(s: TruncatedSeries, bivariate: bool) -> list[tuple[int, ...]]:
    if bivariate:
        return [(dq, dt, v) for (dq, dt, _), v in s.items()]
    return [(n, v) for n, v in enumerate(s.q_coeffs())]


def _write_rows(rows, header: str, out) -> None:
    out.write(header + "\n")
    for row in rows:
        out.write(",".join(map(str, row)) + "\n")


# subcommands ------------------------------------------------------------------------


def cmd_verify(args, out) -> int:
    try:
        rep = run_identity(args.identity, args.order, args.zwindow)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if args.json:
        _emit(rep.to_dict(), out)
    else:
        status = "equal" if rep.equal else "NOT equal"
        out.write(f"{rep.identity}: {status} (order {rep.order}, {len(rep.checks)} comparisons)\n")
        if rep.discrepancy:
            d = rep.discrepancy
            out.write(f"  first discrepancy in {d.label} at q^{d.monomial[0]} t^{d.monomial[1]}: "
                      f"{d.lhs} vs {d.rhs}\n")
    return 0 if rep.equal else 1


def _family(name: str, k: int):
    return {
        "k2": lambda: family_k2(1),
        "k2-minus": lambda: family_k2(-1),
        "exclusion": lambda: family_exclusion(k),
        "jacobi": family_jacobi,
        "jacobi-square": family_jacobi_square,
        "theta-odd": lambda: family_theta_odd(1),
        "theta-square": lambda: family_theta_square(1),
    }[name]()


def cmd_expand(args, out) -> int:
    prod = product_rhs(_family(args.family, args.k), args.order)
    rows = []
    for kp in range(-args.zwindow, args.zwindow + 1):
        for (dq, dt, _), v in coeff_z(prod, kp).items():
            rows.append((kp, dq, dt, v))
    if args.json:
        _emit({"family": args.family, "order": args.order,
               "terms": [dict(zip(("z", "n", "m", "coeff"), r)) for r in rows]}, out)
    else:
        _write_rows(rows, "z,n,m,coeff", out)
    return 0


def cmd_enumerate(args, out) -> int:
    if args.n < 0:
        raise UsageError("--n must be nonnegative")
    gs = G.enumerate_gfps(args.n, args.offset, args.k)
    if args.json:
        _emit([dict(g.to_dict(), weight=g.weight, distinct=G.distinct_parts(g)) for g in gs], out)
    else:
        for g in gs:
            out.write(f"{g}  m={G.distinct_parts(g)}\n")
        out.write(f"# {len(gs)} GFPs of weight {args.n}, offset {args.offset}, bound {args.k}\n")
    return 0


def _class_of(text: str, k: int) -> int:
    if text == "even":
        return 0
    if text == "odd":
        return 1
    try:
        m = int(text)
    except ValueError as exc:
        raise UsageError("--class is even, odd or an integer 0..k-1") from exc
    if not 0 <= m < k:
        raise UsageError("--class must lie in 0..k-1")
    return m


def _gfp_arg(args) -> G.Gfp:
    if not args.gfp:
        raise UsageError("--gfp is required, e.g. --gfp '4 2 2;2 2 0'")
    try:
        return G.Gfp.parse(args.gfp, args.k)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def cmd_biject(args, out) -> int:
    try:
        if args.map == "psi":
            if not args.omega:
                raise UsageError("--omega is required for psi")
            om = OmegaState(args.k, _class_of(args.cls, args.k), tuple(_int_list(args.omega)))
            res = G.psi(om)
            info = {"input": {"k": om.k, "m": om.m, "omega": list(om.vals), "weight": om.weight()}}
        elif args.map == "psi-inverse":
            g = _gfp_arg(args)
            om = G.psi_inverse(g)
            res = None
            info = {"input": g.to_dict(), "omega": list(om.vals), "m": om.m}
        elif args.map == "phi":
            g = _gfp_arg(args)
            res = G.phi(g, args.ell)
            info = {"input": g.to_dict(), "ell": args.ell}
        elif args.map == "wright":
            g = _gfp_arg(args)
            if g.k_rep != 1:
                raise UsageError("wright needs --k 1")
            res = G.wright(g, args.shift)
            info = {"input": g.to_dict(), "shift": args.shift}
        else:  # frobenius
            if not args.partition:
                raise UsageError("--partition is required for frobenius")
            res = G.frobenius(_int_list(args.partition))
            info = {"input": {"partition": _int_list(args.partition)}}
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if res is not None:
        info["output"] = dict(res.to_dict(), weight=res.weight, distinct=G.distinct_parts(res))
    if args.json:
        _emit(dict(info, map=args.map), out)
    elif res is not None:
        out.write(f"{res}  weight={res.weight} offset={res.offset}\n")
        if args.diagram:
            out.write(G.to_diagram(res).render() + "\n")
    else:
        out.write(",".join(map(str, info["omega"])) + f"  class={info['m']}\n")
    return 0


def cmd_simulate(args, out) -> int:
    from .simulate import build_window_chain, exact_occupation, exact_stationary, gillespie

    try:
        q = Fraction(args.q)
        gamma = Fraction(args.gamma)
        rates = model_table(args.model, q, gamma, args.k)
        derive_params(rates)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(str(exc)) from exc
    if args.window < 1:
        raise UsageError("--window must be positive")
    a = -(args.window // 2) + 1
    b = a + args.window - 1
    if args.horizon is None and args.jumps is None:
        raise UsageError("give --horizon or --jumps")
    chain = build_window_chain(rates, a, b, args.n)
    if not chain.states:
        raise UsageError("no states with this conserved quantity fit in the window")
    pi = exact_stationary(chain)
    init = chain.states[max(range(len(pi)), key=pi.__getitem__)]  # a most likely state
    stats = gillespie(chain, init, args.horizon, args.seed, args.jumps, sites=(a, b))
    exact = exact_occupation(chain, pi, (a, b))
    rows = [(site, v, frac, se, float(exact[site - a][v])) for site, v, frac, se in stats.to_rows()]
    if args.csv:
        _write_rows(rows, "site,value,fraction,stderr,exact", out)
    else:
        _emit({
            "model": args.model, "q": str(q), "window": [a, b], "seed": stats.seed,
            "total_time": stats.total_time, "jumps": stats.jumps,
            "conserved": sorted(stats.conserved),
            "occupation": [dict(zip(("site", "value", "fraction", "stderr", "exact"), r)) for r in rows],
        }, out)
    return 0


def _sequence(args) -> tuple[TruncatedSeries, bool]:
    n = args.order
    name = args.name
    if name == "s_even":
        return s_even(n).series, True
    if name == "s_odd":
        return s_odd(n).series, True
    if name == "s_k":
        m = (-args.offset) % args.k
        return s_k(args.k, m, n).series, False
    if name == "gfp":
        return G.gf_enumerated(args.offset, args.k, n), args.k == 2
    if name in ("asep-even", "asep-odd"):
        se, so = asep_specialized(n)
        return (se if name == "asep-even" else so), False
    if name in ("three-state-even", "three-state-odd"):
        src = s_even(n) if name.endswith("even") else s_odd(n)
        return src.series.at_t(2), False
    return phi_products(n)[name], False


def cmd_sequence(args, out) -> int:
    try:
        series, bivariate = _sequence(args)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    rows = _series_rows(series, bivariate)
    if args.json:
        keys = ("n", "m", "coeff") if bivariate else ("n", "coeff")
        _emit({"name": args.name, "order": args.order, "terms": [dict(zip(keys, r)) for r in rows]}, out)
    elif args.csv:
        _write_rows(rows, "n,m,coeff" if bivariate else "n,coeff", out)
    else:
        out.write(" ".join(str(v) for v in series.q_coeffs()) + "\n")
    return 0


# parser -------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="blockid", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="check an identity to a q-order")
    v.add_argument("identity", help=f"one of {', '.join(IDENTITY_IDS)}")
    v.add_argument("--order", type=int)
    v.add_argument("--zwindow", type=int)
    v.add_argument("--json", action="store_true")
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("expand", help="expand a product side by powers of z")
    e.add_argument("family", choices=FAMILIES)
    e.add_argument("--order", type=int, default=8)
    e.add_argument("--zwindow", type=int, default=2)
    e.add_argument("--k", type=int, default=2)
    e.add_argument("--json", action="store_true")
    e.add_argument("--csv", action="store_true")
    e.set_defaults(func=cmd_expand)

    n = sub.add_parser("enumerate", help="list GFPs of a weight and offset")
    n.add_argument("--n", type=int, required=True)
    n.add_argument("--offset", type=int, default=0)
    n.add_argument("--k", type=int, default=2)
    n.add_argument("--json", action="store_true")
    n.set_defaults(func=cmd_enumerate)

    b = sub.add_parser("biject", help="run psi, phi, wright or frobenius on one input")
    b.add_argument("map", choices=("psi", "psi-inverse", "phi", "wright", "frobenius"))
    b.add_argument("--omega", help="gaps omega_{-1},omega_{-2},...")
    b.add_argument("--class", dest="cls", default="even", help="even, odd or m")
    b.add_argument("--gfp", help="rows as 'a1 a2 ;b1 b2'")
    b.add_argument("--partition", help="parts as 8,8,7,3")
    b.add_argument("--ell", type=int, default=0)
    b.add_argument("--shift", type=int, default=0)
    b.add_argument("--k", type=int, default=2)
    b.add_argument("--diagram", action="store_true")
    b.add_argument("--json", action="store_true")
    b.set_defaults(func=cmd_biject)

    s = sub.add_parser("simulate", help="Gillespie run on a finite window against the exact law")
    s.add_argument("--model", choices=MODELS, default="two-exclusion")
    s.add_argument("--q", default="1/2")
    s.add_argument("--gamma", default="1/2")
    s.add_argument("--k", type=int, default=2)
    s.add_argument("--n", type=int, default=0, help="conserved quantity of the component")
    s.add_argument("--window", type=int, default=8)
    s.add_argument("--horizon", type=float)
    s.add_argument("--jumps", type=int)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--csv", action="store_true")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_simulate)

    q = sub.add_parser("sequence", help="coefficients of a normalizer or product")
    q.add_argument("name", choices=SEQUENCES)
    q.add_argument("--order", type=int, default=8)
    q.add_argument("--k", type=int, default=2)
    q.add_argument("--offset", type=int, default=0)
    q.add_argument("--csv", action="store_true")
    q.add_argument("--json", action="store_true")
    q.set_defaults(func=cmd_sequence)
    return p


def run(argv: Sequence[str] | None = None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    for name in ("order", "zwindow"):
        val = getattr(args, name, None)
        if val is not None and val < 0:
            parser.print_usage(sys.stderr)
            sys.stderr.write(f"blockid: error: --{name} must be nonnegative\n")
            return 2
    try:
        return args.func(args, out)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"blockid: error: {exc}\n")
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
