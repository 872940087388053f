"""Command-line interface.

Every subcommand prints one JSON document on stdout. Human-readable tables
requested with ``--pretty`` go to stderr. Exit codes: 0 ok, 1 domain error,
2 usage error.
"""
from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

from .compress import pullback
from .dynamic import (CompressionState, add_attributes, add_objects, build_state, delete_attributes,
                      delete_objects, read_state, save_state, verify_against_batch)
from .errors import SvisError
from .partition import joint_partition, partition_by_equivalence, partition_by_relation
from .reduct import (choose_one, discernibility_function, lift_reduct, system_discernibility_matrix,
                     system_reducts)
from .relations import (induced_system, parse_thresholds, tolerance_exact,
                        tolerance_ge, tolerance_ge_joint, tolerance_valueset)
from .table import parse_cell, read_table


def _emit(payload) -> None:
    sys.stdout.write(json.dumps(payload, indent=2) + "\n")


def _note(text: str) -> None:
    sys.stderr.write(text.rstrip("\n") + "\n")


def _split(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def _load_table(args):
    return read_table(args.input, allow_empty=args.allow_empty)


def _is_state_file(path: str) -> bool:
    if not path.endswith(".json"):
        return False
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except ValueError:
            return False
    return isinstance(data, dict) and "version" in data


def _write_state(state: CompressionState, path: str) -> None:
    Path(path).write_text(save_state(state), encoding="utf-8")


def cmd_relations(args) -> int:
    table = _load_table(args)
    if args.attr is None:
        if args.kind != "ge":
            raise SvisError("--attr is required for --kind exact/valueset")
        rel = tolerance_ge_joint(table, parse_thresholds(args.thresholds, len(table.attributes)))
    elif args.kind == "ge":
        rel = tolerance_ge(table, args.attr, int(args.param or 1))
    elif args.kind == "exact":
        if args.param is None:
            raise SvisError("--param is required for --kind exact")
        rel = tolerance_exact(table, args.attr, int(args.param))
    else:
        if args.param is None:
            raise SvisError('--param is required for --kind valueset, e.g. --param "{0}"')
        rel = tolerance_valueset(table, args.attr, parse_cell(args.param, allow_empty=True))
    if args.pretty:
        for x in rel.universe:
            _note(f"{x}: {{{', '.join(rel.neighbors(x))}}}")
    _emit(rel.to_dict())
    return 0


def cmd_partition(args) -> int:
    table = _load_table(args)
    if args.by == "equivalence":
        attrs = _split(args.attrs) if args.attrs is not None else list(table.attributes)
        part = partition_by_equivalence(table, attrs)
        _emit(part.to_list())
        return 0
    thresholds = parse_thresholds(args.thresholds, len(table.attributes))
    if args.attr is not None:
        h = thresholds[table.attribute_index(args.attr)]
        _emit(partition_by_relation(tolerance_ge(table, args.attr, h)).to_list())
        return 0
    system = induced_system(table, thresholds, lax=args.lax)
    parts = {n: partition_by_relation(r) for n, r in system.relations}
    joint = joint_partition(list(parts.values()), table.objects)
    if args.pretty:
        for x in table.objects:
            cells = [f"C{p.block_of[x] + 1}" for p in parts.values()]
            _note(f"{x}  " + "  ".join(cells) + f"  | C{joint.block_of[x] + 1}")
    _emit({"partitions": {n: p.to_list() for n, p in parts.items()}, "joint": joint.to_list()})
    return 0


def cmd_compress(args) -> int:
    table = _load_table(args)
    thresholds = parse_thresholds(args.thresholds, len(table.attributes))
    state = build_state(table, thresholds, lax=args.lax)
    verified = None
    if args.verify:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            source = induced_system(table, thresholds, lax=True)
        verified = all(pullback(state.mapping, state.image[n]) == r for n, r in source.relations)
        if not verified:
            raise SvisError("pullback of the image system does not reproduce the source relations")
    payload = {
        "objects": len(table),
        "image_size": len(state.joint),
        "partitions": {a: p.to_list() for a, p in zip(table.attributes, state.partitions)},
        "joint": state.joint.to_list(),
        "mapping": state.mapping.to_dict(),
        "image": state.image.to_dict(),
        "verified": verified,
    }
    if args.figures:
        from .plotting import plot_partition_layout, plot_relation_system
        out = Path(args.figures)
        columns = dict(zip(table.attributes, state.partitions))
        columns["joint"] = state.joint
        payload["figures"] = [str(p) for p in (
            plot_relation_system(state.source_system(), out / "relations.png", "source relations"),
            plot_relation_system(state.image, out / "image.png", "image relations"),
            plot_partition_layout(columns, out / "partitions.png", "partitions"),
        )]
    if args.out:
        _write_state(state, args.out)
        payload["state"] = args.out
    if args.pretty:
        _note(f"{len(table)} objects -> {len(state.joint)} image objects")
        for y, b in zip(state.mapping.image, state.mapping.blocks):
            _note(f"{y}: {', '.join(b)}")
    _emit(payload)
    return 0


def cmd_reduce(args) -> int:
    if _is_state_file(args.input):
        state = read_state(args.input)
    else:
        table = _load_table(args)
        state = build_state(table, parse_thresholds(args.thresholds, len(table.attributes)),
                            lax=args.lax)
    image = state.image
    clauses = discernibility_function(system_discernibility_matrix(image)).to_list()
    reducts = [lift_reduct(image, state.table.attributes, r)
               for r in system_reducts(image, args.method)]
    if args.one:
        best = choose_one(reducts)
        reducts = [best] if best is not None else []
    if args.pretty:
        for r in reducts:
            _note("{" + ", ".join(r) + "}")
    _emit({"reducts": [list(r) for r in reducts], "method": args.method,
           "discernibility_clauses": clauses, "image_size": len(image.universe)})
    return 0


def cmd_update(args) -> int:
    state = read_state(args.state)
    op, arg = args.operation, args.argument
    if op == "add-attrs":
        columns = read_table(arg)
        h = parse_thresholds(args.thresholds, len(columns.attributes))
        new = add_attributes(state, columns, h)
    elif op == "del-attrs":
        new = delete_attributes(state, _split(arg))
    elif op == "add-objs":
        new = add_objects(state, read_table(arg))
    else:
        new = delete_objects(state, _split(arg))
    payload = {"report": new.report, "image_size": len(new.joint),
               "joint": new.joint.to_list(), "compressed": new.t_table.to_dict()}
    if args.out:
        _write_state(new, args.out)
        payload["state"] = args.out
    else:
        payload["state"] = json.loads(save_state(new))
    if args.pretty:
        _note(new.t_table.pretty())
    _emit(payload)
    return 0


def cmd_verify(args) -> int:
    report = verify_against_batch(read_state(args.state))
    _emit(report)
    return 0 if report["equal"] else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="svis", description="Set-valued information systems: relations, compression, reducts.")
    sub = parser.add_subparsers(dest="command", required=True)

    def table_cmd(name, help_text):
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.add_argument("input", help="table file (.csv or .json)")
        p.add_argument("--allow-empty", action="store_true", help="accept empty cells {}")
        p.add_argument("--pretty", action="store_true", help="human-readable summary on stderr")
        return p

    p = table_cmd("relations", "dump a tolerance relation")
    p.add_argument("--kind", choices=["ge", "exact", "valueset"], default="ge")
    p.add_argument("--attr", help="attribute (omit for the joint >= relation)")
    p.add_argument("--param", help='threshold h, exact size h, or value set like "{0,1}"')
    p.add_argument("--thresholds", help="comma-separated per-attribute thresholds (default 1,...,1)")
    p.set_defaults(func=cmd_relations)

    p = table_cmd("partition", "dump neighborhood or cell-identity partitions")
    p.add_argument("--by", choices=["relation", "equivalence"], default="relation")
    p.add_argument("--attr", help="single attribute (relation mode)")
    p.add_argument("--attrs", help="comma-separated attribute subset (equivalence mode)")
    p.add_argument("--thresholds")
    p.add_argument("--lax", action="store_true", help="warn instead of failing on non-covering relations")
    p.set_defaults(func=cmd_partition)

    p = table_cmd("compress", "compress the induced tolerance system by its joint partition")
    p.add_argument("--thresholds")
    p.add_argument("--verify", action=argparse.BooleanOptionalAction, default=True,
                   help="check that pulling the image back reproduces every relation")
    p.add_argument("--out", help="write the compression state here")
    p.add_argument("--lax", action="store_true")
    p.add_argument("--figures", metavar="DIR", help="render relation and partition figures into DIR")
    p.set_defaults(func=cmd_compress)

    p = table_cmd("reduce", "attribute reducts of a table or a saved state")
    p.add_argument("--method", choices=["primes", "bruteforce"], default="primes")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--all", dest="one", action="store_false", help="all reducts (default)")
    g.add_argument("--one", dest="one", action="store_true",
                   help="smallest reduct, ties broken by attribute names")
    p.add_argument("--thresholds")
    p.add_argument("--lax", action="store_true")
    p.set_defaults(func=cmd_reduce, one=False)

    p = sub.add_parser("update", help="apply an incremental edit to a saved state")
    p.add_argument("state")
    p.add_argument("operation", choices=["add-attrs", "del-attrs", "add-objs", "del-objs"])
    p.add_argument("argument", help="table file for add-*, comma-separated names for del-*")
    p.add_argument("--thresholds", help="thresholds for added attributes")
    p.add_argument("--out", help="write the new state here (default: inline in the output)")
    p.add_argument("--pretty", action="store_true")
    p.set_defaults(func=cmd_update)

    p = sub.add_parser("verify", help="compare a saved state with batch recomputation")
    p.add_argument("state")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            warnings.showwarning = lambda msg, *a, **k: _note(f"warning: {msg}")
            return args.func(args)
    except (SvisError, OSError) as exc:
        _note(f"error: {exc}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
