"""Command line front end.

Every command prints one JSON document (schema ``feynpoly/1``).  Exit codes:
0 success, 1 failed self-check, 2 unparsable input, 3 violated
precondition (divergent integrand, non-generic point, ...), 4 exhausted
budget.
"""

from __future__ import annotations

import argparse
import sys
import time
from fractions import Fraction

from . import __version__
from .blowup import (
    UnionClosedFamily,
    affine_ring_check,
    cooccurrence,
    divisor_incidence,
    enumerate_flags,
    face_poset,
)
from .canon import canonical_key, key_to_text
from .convergence import power_count
from .errors import FeynpolyError, ParseError
from .graph import all_edge_subsets, is_mm, is_momentum_spanning, motic_subgraphs, subgraph_loops
from .hopf import antipode, coproduct, coradical_bound, coradical_degree, reduced_delta_key, GraphTensor
from .integrate import Integrand, integrate
from .io import dumps, error_report, load_graph, load_kinpoint, report, write_atomic
from .poly import parse_poly
from .strata import descendants_by_degree, e1_vanishing_bounds, face_maps_json, nested_chains
from .symanzik import KINDS, factorization_remainder, phi, psi, space_of, xi


def _parse_gamma(text: str) -> frozenset:
    try:
        return frozenset(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise ParseError(f"bad edge list {text!r}; expected e.g. 1,3,4") from None


def cmd_poly(args) -> dict:
    g = load_graph(args.graph)
    return {"psi": psi(g, args.method).to_string(),
            "phi": phi(g, "deletion" if args.method == "kirchhoff" else args.method).to_string(),
            "xi": xi(g).to_string(), "loops": g.loop_number, "edges": len(g.edges)}


def cmd_motic(args) -> dict:
    g = load_graph(args.graph)
    rows = []
    for gamma in motic_subgraphs(g, include_self=True):
        rows.append({"edges": sorted(gamma), "loops": subgraph_loops(g, gamma), "mm": is_mm(g, gamma)})
    return {"motic": rows, "count": len(rows)}


def cmd_coproduct(args) -> dict:
    g = load_graph(args.graph)
    out = {"graph": key_to_text(canonical_key(g))}
    if args.reduced:
        out["reduced_coproduct"] = GraphTensor(reduced_delta_key(canonical_key(g))).to_json()
    else:
        out["coproduct"] = coproduct(g).to_json()
    if args.antipode:
        out["antipode"] = antipode(g).to_json()
    out["coradical_degree"] = coradical_degree(g)
    out["coradical_bound"] = coradical_bound(g)
    return out


def cmd_factor_check(args) -> dict:
    g = load_graph(args.graph)
    subsets = [_parse_gamma(args.gamma)] if args.gamma else list(all_edge_subsets(g))
    rows, failures = [], 0
    for gamma in subsets:
        for kind in KINDS:
            if kind == "PhiIR" and not (g.has_kinematics and is_momentum_spanning(g, gamma)):
                continue
            if kind == "XiIR" and not (g.has_kinematics and is_mm(g, gamma)):
                continue
            f = factorization_remainder(g, gamma, kind)
            failures += not f.holds
            if args.gamma or not f.holds:
                rows.append({"gamma": sorted(gamma), "kind": kind, "holds": f.holds,
                             "min_degree": f.min_degree, "bound": f.bound,
                             "remainder": f.remainder.to_string()})
    return {"subsets": len(subsets), "failures": failures, "ok": failures == 0, "rows": rows}


def cmd_atlas(args) -> dict:
    g = load_graph(args.graph)
    B = UnionClosedFamily.from_graph(g)
    charts = enumerate_flags(B)
    divs = B.divisors
    co = cooccurrence(B, charts)
    inc = [[1 if divisor_incidence(B, x, y) else 0 for y in divs] for x in divs]
    agree = all((x == y) or ((frozenset({x, y}) in co) == divisor_incidence(B, x, y))
                for x in divs for y in divs)
    out = {"ground": sorted(B.ground), "family": [sorted(m) for m in B.sorted_members()],
           "charts": [c.to_json() for c in charts], "divisors": [sorted(d) for d in divs],
           "incidence": inc, "incidence_matches_charts": agree}
    if not args.no_poset:
        out["poset"] = face_poset(B, charts).to_json()
    if args.ring:
        out["affine_ring"] = affine_ring_check(B).to_json()
    return out


def cmd_converge(args) -> dict:
    g = load_graph(args.graph)
    return power_count(g, args.d).to_json()


def cmd_integrate(args) -> dict:
    g = load_graph(args.graph)
    point = load_kinpoint(args.point, g.nq, g.nm) if args.point else None
    integrand = None
    if args.numerator is not None:
        if args.A is None:
            raise ParseError("--numerator needs --A (and --B for graphs with kinematics)")
        P = parse_poly(args.numerator, g.nalpha, space_of(g))
        integrand = Integrand(P, Fraction(args.A), Fraction(args.B or 0))
    t0 = time.perf_counter()
    res = integrate(g, args.d, point, integrand, rtol=args.rtol, seed=args.seed,
                    max_subdivisions=args.max_subdivisions, max_samples=args.max_samples)
    out = res.to_json()
    out["seconds"] = round(time.perf_counter() - t0, 3)
    out["seed"] = args.seed
    if not args.per_sector:
        out.pop("per_sector")
    return out


def cmd_strata(args) -> dict:
    g = load_graph(args.graph)
    chains = nested_chains(g)
    table = e1_vanishing_bounds(g, chains)
    out = {"chains": [r.to_json() for r in chains],
           "max_chain_length": max(r.codim for r in chains),
           "e1": [{"p": p, "q": q, "possibly_nonzero": v} for (p, q), v in sorted(table.items())],
           "face_maps": face_maps_json(g)}
    if args.degree is not None:
        words = descendants_by_degree(g, args.degree)
        out["descendants"] = [{"word": [key_to_text(k) for k in w], "degree": d} for w, d in words.items()]
    return out


def cmd_selfcheck(args) -> dict:
    from .selfcheck import run_selfcheck

    return run_selfcheck(quick=args.quick)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="feynpoly", description="Graph polynomials, motic Hopf algebra, "
                                "blow-up atlases and parametric integrals of Feynman graphs.")
    p.add_argument("--version", action="version", version=f"feynpoly {__version__}")
    p.add_argument("-o", "--output", help="write the JSON report to this file instead of standard output")
    sub = p.add_subparsers(dest="command", required=True)

    def graph_cmd(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("graph", help="graph file (JSON or text) or builtin:NAME")
        sp.set_defaults(func=func)
        return sp

    sp = graph_cmd("poly", cmd_poly, "Symanzik polynomials Psi, Phi, Xi")
    sp.add_argument("--method", choices=["deletion", "trees", "kirchhoff"], default="deletion")
    graph_cmd("motic", cmd_motic, "motic subgraphs")
    sp = graph_cmd("coproduct", cmd_coproduct, "coproduct in the motic Hopf algebra")
    sp.add_argument("--reduced", action="store_true", help="drop the 1 (x) G and G (x) 1 terms")
    sp.add_argument("--antipode", action="store_true")
    sp = graph_cmd("factor-check", cmd_factor_check, "check the factorization of graph polynomials")
    sp.add_argument("--gamma", help="comma separated edge labels; default: every edge subset")
    sp = graph_cmd("atlas", cmd_atlas, "charts, divisors and faces of the motic blow-up")
    sp.add_argument("--no-poset", action="store_true")
    sp.add_argument("--ring", action="store_true", help="also verify the affine ring relations")
    sp = graph_cmd("converge", cmd_converge, "power counting and convergence")
    sp.add_argument("-d", type=int, default=4, help="spacetime dimension (even)")
    sp = graph_cmd("integrate", cmd_integrate, "numerical parametric integral")
    sp.add_argument("-d", type=int, default=4)
    sp.add_argument("--point", help="kinematic point: JSON file or inline JSON object")
    sp.add_argument("--numerator", help="numerator polynomial in a1, a2, ...")
    sp.add_argument("--A", help="power of Psi in the denominator (with --numerator)")
    sp.add_argument("--B", help="power of Xi in the denominator (with --numerator)")
    sp.add_argument("--rtol", type=float, default=1e-6)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--max-subdivisions", type=int, default=20000)
    sp.add_argument("--max-samples", type=int, default=2 ** 26)
    sp.add_argument("--per-sector", action="store_true")
    sp = graph_cmd("strata", cmd_strata, "nested motic chains and spectral sequence bounds")
    sp.add_argument("--degree", type=int, help="also list descendants of at most this degree")
    sp = sub.add_parser("selfcheck", help="run the invariant suite on the built-in graphs")
    sp.add_argument("--quick", action="store_true")
    sp.set_defaults(func=cmd_selfcheck)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    code = 0
    try:
        result = args.func(args)
        doc = report(args.command, result)
        if args.command == "selfcheck" and not result.get("ok", False):
            code = 1
    except FeynpolyError as exc:
        code = exc.exit_code
        doc = error_report(args.command, exc, code)
    except OSError as exc:
        code = 2
        doc = error_report(args.command, exc, code)
    text = dumps(doc)
    if args.output:
        write_atomic(args.output, text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
