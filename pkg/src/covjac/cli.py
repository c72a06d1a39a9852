"""Command line front end.

Every subcommand reads JSON, runs one exact computation or verification,
prints the machine-readable report to standard output (and to --out when
given), and puts a one-line verdict on standard error.  Exit codes: 0
all checks passed, 1 a verification failed, 2 malformed input, 3 a
resource cap was hit.  Identical seed and configuration give
byte-identical reports; nothing time- or host-dependent is emitted.
"""

from __future__ import annotations

import argparse
import json
import sys

from .covering import VoltageGraph, connectivity_criterion, derived_graph
from .errors import (
    DisconnectedGraphError,
    ResourceLimitError,
    RingMismatchError,
)
from .fitting import closed_form_shift1, shift1_via_presentation
from .graphs import graph_from_json, graph_to_json, jacobian, spanning_tree_count
from .groupring import FinAbGroup
from .iwasawa import ZpVoltageGraph, verify_icnf, verify_kida
from .theorems import (
    run_corpus,
    verify_duality,
    verify_main_theorem,
    verify_norm_identities,
)
from .zeta import verify_three_term


def _parse_orders(text: str) -> tuple:
    try:
        orders = tuple(int(x) for x in text.split(","))
    except ValueError as exc:
        raise ValueError(f"bad group orders {text!r}") from exc
    if not orders or any(n < 1 for n in orders):
        raise ValueError(f"bad group orders {text!r}")
    return orders


def _load_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ValueError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path} is not valid JSON: {exc}") from exc


def _emit(report: dict, out_path: str | None) -> None:
    text = json.dumps(report, indent=2, sort_keys=False)
    print(text)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")


def _verdict(passed: bool) -> int:
    print("PASS" if passed else "FAIL", file=sys.stderr)
    return 0 if passed else 1


def cmd_jacobian(args) -> int:
    g = graph_from_json(_load_json(args.input))
    struct = jacobian(g)
    report = {
        "invariant_factors": list(struct.invariant_factors),
        "trees": spanning_tree_count(g),
    }
    _emit(report, args.out)
    print("OK", file=sys.stderr)
    return 0


def cmd_derive(args) -> int:
    vg = VoltageGraph.from_json(_load_json(args.input))
    cover = derived_graph(vg)
    report = {
        "base_vertices": vg.base.vertex_count,
        "group_order": vg.group.size,
        "cover": graph_to_json(cover.graph),
        "connected": connectivity_criterion(vg),
    }
    _emit(report, args.out)
    print("OK", file=sys.stderr)
    return 0


def _voltage_check(args, check) -> int:
    vg = VoltageGraph.from_json(_load_json(args.input))
    report = check(vg)
    _emit(report.to_json(), args.out)
    return _verdict(report.passed)


def cmd_verify_main(args) -> int:
    return _voltage_check(args, verify_main_theorem)


def cmd_verify_duality(args) -> int:
    return _voltage_check(args, verify_duality)


def cmd_verify_norm(args) -> int:
    return _voltage_check(args, verify_norm_identities)


def cmd_fitt_shift(args) -> int:
    group = FinAbGroup(_parse_orders(args.orders))
    via_pres = shift1_via_presentation(group)
    closed = closed_form_shift1(group)
    match = via_pres == closed
    report = {
        "orders": list(group.orders),
        "match": match,
        "via_presentation": via_pres.to_json(),
        "closed_form": closed.to_json(),
    }
    _emit(report, args.out)
    return _verdict(match)


def cmd_zeta(args) -> int:
    vg = VoltageGraph.from_json(_load_json(args.input))
    report = verify_three_term(vg, L=args.truncate)
    _emit(report, args.out)
    return _verdict(report["passed"])


def _tower_from_args(args) -> ZpVoltageGraph:
    data = _load_json(args.input)
    if args.prime is not None:
        data = dict(data)
        data["prime"] = args.prime
    if "prime" not in data:
        raise ValueError("no prime given: use -p or a 'prime' field")
    return ZpVoltageGraph.from_json(data)


def cmd_iwasawa(args) -> int:
    zvg = _tower_from_args(args)
    report = verify_icnf(zvg, n_max=args.layers)
    _emit(report.to_json(), args.out)
    return _verdict(report.passed)


def cmd_kida(args) -> int:
    zvg = _tower_from_args(args)
    report = verify_kida(zvg, n_max=args.layers)
    _emit(report, args.out)
    return _verdict(report["passed"])


def cmd_selftest(args) -> int:
    groups = None
    if args.orders:
        groups = (_parse_orders(args.orders),)
    kwargs = {"seed": args.seed, "per_group": args.cases}
    if groups is not None:
        kwargs["groups"] = groups
    summary = run_corpus(**kwargs)
    _emit(summary, args.out)
    return _verdict(summary["passed"])


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="covjac",
        description="Exact Jacobian groups of graph coverings and their invariants.",
    )
    sub = top.add_subparsers(dest="command", required=True)

    def add(name, fn, needs_input=True):
        p = sub.add_parser(name)
        if needs_input:
            p.add_argument("input", help="JSON input file")
        p.add_argument("--out", default=None, help="also write the report here")
        p.set_defaults(fn=fn)
        return p

    add("jacobian", cmd_jacobian)
    add("derive", cmd_derive)
    add("verify-main", cmd_verify_main)
    add("verify-duality", cmd_verify_duality)
    add("verify-norm", cmd_verify_norm)

    p = add("fitt-shift", cmd_fitt_shift, needs_input=False)
    p.add_argument("--orders", required=True, help="cyclic factor orders, e.g. 2,2")

    p = add("zeta", cmd_zeta)
    p.add_argument("--truncate", type=int, default=8, help="series cutoff degree")

    for name, fn in (("iwasawa", cmd_iwasawa), ("kida", cmd_kida)):
        p = add(name, fn)
        p.add_argument("-p", "--prime", type=int, default=None)
        p.add_argument("--layers", type=int, default=None if name == "kida" else 4)

    p = add("selftest", cmd_selftest, needs_input=False)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cases", type=int, default=5, help="covers per group")
    p.add_argument("--orders", default=None, help="restrict to one group")

    return top


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ResourceLimitError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return 3
    except (ValueError, KeyError, DisconnectedGraphError, RingMismatchError) as exc:
        print(f"bad input: {exc}", file=sys.stderr)
        return 2
    except ArithmeticError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
