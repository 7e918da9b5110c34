"""Command-line entry point: ``threshcap <command> ...``."""
from __future__ import annotations

import argparse
import datetime
import json
import sys
from pathlib import Path

from . import constructions, extremal, netcap, polycap, setcap
from .core import Architecture, CapExceeded, DimensionError, LayeredNetwork, PointSet, truth_table
from .formats import (
    FormatError,
    emit_report,
    load_json,
    load_point_set,
    network_from_json,
    network_to_json,
    parse_architecture,
    plain,
    truth_table_from_json,
    truth_table_to_json,
    unit_from_json,
)

EXIT_OK, EXIT_INPUT, EXIT_BUDGET, EXIT_VERIFY = 0, 2, 3, 4


class VerifyFailure(Exception):
    def __init__(self, payload):
        super().__init__("verification failed")
        self.payload = payload


def _set_capacity(args):
    S = load_point_set(args.points)
    if args.bounds_only:
        return setcap.set_capacity_bounds(S)
    return setcap.set_capacity(S, exact=True, cap=args.max_points, jobs=args.jobs)


def _net_capacity(args):
    arch = Architecture(parse_architecture(args.arch))
    budget = netcap.Budget.parse(args.budget)
    if args.points:
        S = load_point_set(args.points)
        report = netcap.network_upper_bounds(arch, input_log_cardinality=None)
        report.subject = f"{arch} on {len(S)} points"
        if not args.bounds_only:
            report.exact_count = len(netcap.enumerate_network_functions(arch, S, budget, jobs=args.jobs))
        if S.is_boolean:
            restricted = netcap.restricted_capacity_bounds(S, arch.sizes[1:], budget)
            report.bounds.extend(restricted.report.bounds)
            report.notes.extend(restricted.report.notes)
            report.notes.append(f"VC dimension {restricted.vc_dimension}; "
                                f"Sauer-Shelah check {'passes' if restricted.sauer_shelah_holds else 'FAILS'}")
        return report
    if args.bounds_only:
        report = netcap.network_lower_bounds(arch)
        report.bounds.extend(netcap.network_upper_bounds(arch).bounds)
        return report
    return netcap.exact_network_capacity(arch, budget, jobs=args.jobs)


def _bounds(args):
    arch = Architecture(parse_architecture(args.arch))
    report = netcap.network_lower_bounds(arch)
    log_card = None
    if args.input_bits is not None:
        log_card = args.input_bits
    report.bounds.extend(netcap.network_upper_bounds(arch, log_card).bounds)
    est = netcap.estimated_capacity(arch)
    report.notes.append(f"estimated capacity {est.value} = " + " + ".join(map(str, est.terms)))
    return report


def _construct(args):
    kind = args.kind
    if kind == "exponential":
        m = constructions.exponential_map(args.k)
        net = LayeredNetwork((m,))
        return {**network_to_json(net), "info": {"kind": kind, "k": args.k}}
    if kind == "enrichment":
        result = constructions.enrichment_map(args.n, args.m)
        info = {"kind": kind, "case": result.case, "k": result.k, "verified_injective": result.verified}
        if result.params is not None:
            info["balance"] = result.params
        return {**network_to_json(LayeredNetwork((result.map,))), "info": info}
    if kind == "multiplex":
        doc = load_json(args.units)
        units = [unit_from_json(u) for u in (doc["units"] if isinstance(doc, dict) else doc)]
        S = load_point_set(args.points) if args.points else None
        net = constructions.multiplex(units, S)
        plan = constructions.MultiplexPlan.of(len(units))
        return {**network_to_json(net), "info": {"kind": kind, "selector_bits": plan.m_minus,
                                                 "codes": [list(c) for c in plan.codes]}}
    if kind == "stack":
        modules = [network_from_json(load_json(p)) for p in args.modules]
        target = parse_architecture(args.target) if args.target else None
        net, plan = constructions.stack(modules, target)
        return {**network_to_json(net), "info": {"kind": kind, "plan": plan}}
    raise FormatError(f"unknown construction {kind!r}")


def _verify(args):
    net = network_from_json(load_json(args.network))
    if args.table:
        reference = truth_table_from_json(load_json(args.table))
    else:
        reference = truth_table(network_from_json(load_json(args.against)))
    ok, witness = constructions.verify_equivalence(net, reference)
    payload = {"equivalent": ok, "counterexample": list(witness) if witness else None}
    if witness is not None:
        payload["expected"] = list(reference[witness])
        payload["actual"] = list(net(witness))
        raise VerifyFailure(payload)
    return payload


def _optimize(args):
    goal = args.goal
    if goal == "max-nodes":
        best = extremal.optimal_architecture_nodes(args.N)
        check = extremal.brute_force_extremal(args.N, ranking=False)
        return {"objective": "estimated capacity", "arch": list(best.arch), "value": best.value,
                "brute_force_value": check.value, "closed_form_4N3_over_27": extremal.closed_form_max_nodes(args.N)}
    if goal == "max-nodes-input":
        best = extremal.optimal_architecture_nodes_input(args.N, args.n1)
        check = extremal.brute_force_extremal(args.N, args.n1, ranking=False)
        return {"objective": "estimated capacity", "arch": list(best.arch), "value": best.value,
                "brute_force_arch": list(check.arch), "brute_force_value": check.value}
    if goal == "min":
        arch = extremal.minimal_architecture(args.n1, nodes=args.nodes, connections=args.connections)
        return {"objective": "estimated capacity", "arch": list(arch), "value": extremal.c_hat(arch.sizes),
                "nodes": arch.nodes, "connections": arch.connections}
    raise FormatError(f"unknown goal {goal!r}")


def _poly(args):
    if args.target == "set":
        S = load_point_set(args.points)
        return polycap.poly_capacity(S, args.degree, exact=not args.bounds_only, cap=args.max_points, jobs=args.jobs)
    return polycap.poly_network_bounds(args.n, args.m, args.degree)


def _regions(args):
    bound = extremal.shallow_region_bound(args.n, args.m)
    return {"n": args.n, "m": args.m,
            "affine_regions": bound.regions,
            "central_regions": setcap.region_count(args.m, args.n, affine=False),
            "assignment_bound": bound.assignment_bound}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "table"), default=None,
                        help="default: json for construct, table otherwise")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--jobs", type=int, default=1, help="parallel labeling chunks")
    common.add_argument("--timestamps", action="store_true", help="add a generation time to the payload")
    mode = argparse.ArgumentParser(add_help=False)
    group = mode.add_mutually_exclusive_group()
    group.add_argument("--exact", dest="bounds_only", action="store_false", default=False)
    group.add_argument("--bounds-only", dest="bounds_only", action="store_true")
    mode.add_argument("--max-points", type=int, default=setcap.DEFAULT_POINT_CAP)

    parser = argparse.ArgumentParser(prog="threshcap", description="Capacity of linear threshold networks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("set-capacity", parents=[common, mode], help="count threshold functions on a point set")
    p.add_argument("points", help="points file or cube:n")
    p.set_defaults(run=_set_capacity)

    p = sub.add_parser("net-capacity", parents=[common, mode], help="exact capacity of a small architecture")
    p.add_argument("arch", help="layer sizes, e.g. 3,2,1")
    p.add_argument("--points", help="restrict the input to this set")
    p.add_argument("--budget", action="append", default=[], metavar="NAME=VALUE")
    p.set_defaults(run=_net_capacity)

    p = sub.add_parser("bounds", parents=[common], help="formula bounds for an architecture")
    p.add_argument("arch")
    p.add_argument("--input-bits", type=int, help="log2 of the input set size, for the restricted bound")
    p.set_defaults(run=_bounds)

    p = sub.add_parser("construct", help="build a verified gadget network")
    csub = p.add_subparsers(dest="kind", required=True)
    c = csub.add_parser("exponential", parents=[common])
    c.add_argument("k", type=int)
    c = csub.add_parser("enrichment", parents=[common])
    c.add_argument("n", type=int)
    c.add_argument("m", type=int)
    c = csub.add_parser("multiplex", parents=[common])
    c.add_argument("units", help="JSON list of units, or {\"units\": [...]}")
    c.add_argument("--points", help="domain of the units (default: the cube)")
    c = csub.add_parser("stack", parents=[common])
    c.add_argument("modules", nargs="+", help="network JSON files of shape (a, b, c, 1)")
    c.add_argument("--target", help="target architecture n1,...,nL to check module shapes")
    p.set_defaults(run=_construct)

    p = sub.add_parser("verify", parents=[common], help="compare a network with a truth table")
    p.add_argument("network")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--table", help="truth table JSON")
    src.add_argument("--against", help="another network JSON")
    p.set_defaults(run=_verify)

    p = sub.add_parser("optimize", help="extremal architectures for the estimated capacity")
    osub = p.add_subparsers(dest="goal", required=True)
    o = osub.add_parser("max-nodes", parents=[common])
    o.add_argument("N", type=int)
    o = osub.add_parser("max-nodes-input", parents=[common])
    o.add_argument("N", type=int)
    o.add_argument("n1", type=int)
    o = osub.add_parser("min", parents=[common])
    o.add_argument("n1", type=int)
    budget = o.add_mutually_exclusive_group(required=True)
    budget.add_argument("--nodes", type=int)
    budget.add_argument("--connections", type=int)
    p.set_defaults(run=_optimize)

    p = sub.add_parser("poly", help="polynomial threshold capacity")
    psub = p.add_subparsers(dest="target", required=True)
    q = psub.add_parser("set", parents=[common, mode])
    q.add_argument("points")
    q.add_argument("--degree", "-d", type=int, required=True)
    q = psub.add_parser("net", parents=[common])
    q.add_argument("n", type=int)
    q.add_argument("m", type=int)
    q.add_argument("--degree", "-d", type=int, required=True)
    p.set_defaults(run=_poly)

    p = sub.add_parser("regions", parents=[common], help="hyperplane region counts and assignment bound")
    p.add_argument("n", type=int)
    p.add_argument("m", type=int)
    p.set_defaults(run=_regions)
    return parser


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _render(payload, args) -> str:
    if args.format is None:
        args.format = "json" if args.command == "construct" else "table"
    if args.timestamps:
        doc = plain(payload)
        stamp = datetime.datetime.now(datetime.timezone.utc).isoformat()
        doc = {**doc, "generated_at": stamp} if isinstance(doc, dict) else {"result": doc, "generated_at": stamp}
        if args.format == "json":
            return json.dumps(doc, indent=2) + "\n"
        payload = doc
    return emit_report(payload, args.format)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        payload = args.run(args)
    except VerifyFailure as exc:
        _write(_render(exc.payload, args), args.out)
        return EXIT_VERIFY
    except constructions.VerificationFailed as exc:
        print(f"threshcap: verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except CapExceeded as exc:
        print(f"threshcap: refused, budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (FormatError, DimensionError, ValueError, KeyError, TypeError) as exc:
        print(f"threshcap: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    _write(_render(payload, args), args.out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
