"""Command-line frontend: generation, checks, sweeps, bounds, and export.

Interchange is canonical JSON (sorted keys, sorted domains, sorted tuples,
UTF-8, LF) so documents round-trip byte-identically.  Exit codes follow one
contract everywhere: 0 success / property holds, 1 checked-and-fails,
2 usage, input, or budget error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional

from . import bounds as bounds_mod
from . import consistency, families, verifier
from .core import ElementMap, Signature, Structure, StructureError
from .families import AbelianGroup, Diagram, TreeShape
from .morphisms import (
    KINDS,
    check_morphism,
    enumerate_embeddings,
    enumerate_homomorphisms,
    find_homomorphism,
    is_isomorphic,
)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_ERROR = 2


# ---------------------------------------------------------------------------
# canonical JSON documents

def structure_to_doc(s: Structure) -> dict:
    return {
        "signature": [{"name": n, "arity": a} for n, a in s.signature.symbols],
        "domain": list(s.domain),
        "relations": {name: [list(t) for t in sorted(ts)] for name, ts in s.relations_items()},
    }


def structure_from_doc(doc: dict) -> Structure:
    try:
        sig = Signature([(entry["name"], entry["arity"]) for entry in doc["signature"]])
        domain = doc["domain"]
        for x in domain:
            if "\n" in x:
                raise StructureError("identifiers must not contain newlines")
        relations = {
            name: [tuple(t) for t in ts] for name, ts in doc.get("relations", {}).items()
        }
        return Structure(sig, domain, relations)
    except (KeyError, TypeError) as exc:
        raise StructureError(f"malformed structure document: {exc}") from None


def diagram_to_doc(d: Diagram) -> dict:
    return {
        "base": structure_to_doc(d.base),
        "left": structure_to_doc(d.left),
        "right": structure_to_doc(d.right),
        "leftEmb": dict(d.left_emb.items()),
        "rightEmb": dict(d.right_emb.items()),
    }


def diagram_from_doc(doc: dict) -> Diagram:
    try:
        base = structure_from_doc(doc["base"])
        left = structure_from_doc(doc["left"])
        right = structure_from_doc(doc["right"])
        left_emb = ElementMap(base.domain, left.domain, doc["leftEmb"])
        right_emb = ElementMap(base.domain, right.domain, doc["rightEmb"])
    except (KeyError, TypeError) as exc:
        raise StructureError(f"malformed diagram document: {exc}") from None
    return Diagram(base, left, right, left_emb, right_emb)


def dump_canonical(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _write(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)


def _read_json(path: str) -> dict:
    if path == "-":
        return json.load(sys.stdin)
    with open(path, "r", encoding="utf-8") as handle:
        return json.load(handle)


def load_structure(path: str) -> Structure:
    return structure_from_doc(_read_json(path))


def load_diagram(path: str) -> Diagram:
    return diagram_from_doc(_read_json(path))


# ---------------------------------------------------------------------------
# DOT export

def structure_to_dot(s: Structure, symmetric: tuple[str, ...] = ()) -> str:
    """Deterministic DOT rendering.

    Binary relations become labeled edges, undirected for the relations
    listed as symmetric (orientation pairs deduplicated); unary predicates
    annotate node labels; wider tuples become auxiliary factor nodes with
    port-numbered edges to their components.
    """
    lines = ["digraph structure {"]
    labels: dict[str, list[str]] = {x: [] for x in s.domain}
    for name, ts in s.relations_items():
        if s.signature.arity(name) == 1:
            for (x,) in sorted(ts):
                labels[x].append(name)
    for x in s.domain:
        suffix = f"\\n{','.join(labels[x])}" if labels[x] else ""
        lines.append(f'  "{x}" [label="{x}{suffix}"];')
    for name, ts in s.relations_items():
        arity = s.signature.arity(name)
        if arity == 1:
            continue
        if arity == 2:
            if name in symmetric:
                seen = set()
                for (u, v) in sorted(ts):
                    if (v, u) in seen:
                        continue
                    seen.add((u, v))
                    lines.append(f'  "{u}" -> "{v}" [label="{name}", dir=none];')
            else:
                for (u, v) in sorted(ts):
                    lines.append(f'  "{u}" -> "{v}" [label="{name}"];')
        else:
            for index, t in enumerate(sorted(ts)):
                factor = f"{name}#{index}"
                lines.append(f'  "{factor}" [shape=point, label="{name}"];')
                for port, x in enumerate(t, start=1):
                    lines.append(f'  "{factor}" -> "{x}" [label="{port}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# commands

def _cmd_gen(args) -> int:
    group = AbelianGroup.parse(args.group) if args.group else None
    if args.family == "fn":
        if args.n is None:
            raise StructureError("gen fn needs --n")
        doc = (
            diagram_to_doc(families.diagram_Fn(args.n))
            if args.diagram
            else structure_to_doc(families.gen_Fn(args.n))
        )
    elif args.family == "g":
        if not args.shape:
            raise StructureError("gen g needs --shape")
        shape = TreeShape.parse(args.shape)
        doc = (
            diagram_to_doc(families.diagram_G(shape))
            if args.diagram
            else structure_to_doc(families.gen_G(shape))
        )
    elif args.family == "lineq":
        if args.n is None or group is None:
            raise StructureError("gen lineq needs --n and --group")
        shape = TreeShape.parse(args.shape) if args.shape else None
        if args.diagram:
            doc = diagram_to_doc(families.diagram_lineq(args.n, group, shape=shape))
        else:
            instance = families.tree_instance(args.n, shape)
            marked = families.marking(instance, _parse_mark(args.mark, group), group)
            doc = structure_to_doc(marked)
    elif args.family == "path":
        if args.n is None:
            raise StructureError("gen path needs --n")
        doc = structure_to_doc(families.gen_Pn(args.n))
    elif args.family == "template":
        if group is None:
            raise StructureError("gen template needs --group")
        doc = structure_to_doc(families.build_template(group))
    else:
        raise StructureError(f"unknown family {args.family!r}")
    _write(args.output, dump_canonical(doc))
    return EXIT_OK


def _parse_mark(text: Optional[str], group: AbelianGroup) -> tuple[int, ...]:
    if text is None:
        return group.zero
    try:
        parts = tuple(int(p) for p in text.split("-"))
    except ValueError:
        raise StructureError(f"bad group element: {text!r}") from None
    if len(parts) != len(group.orders):
        raise StructureError(f"element {text!r} has wrong component count for {group!r}")
    return parts


def _cmd_hom(args) -> int:
    a = load_structure(args.src)
    b = load_structure(args.dst)
    kind = args.kind
    if kind == "isomorphism" and not args.all:
        return EXIT_OK if is_isomorphic(a, b) else EXIT_FAIL
    if kind == "embedding":
        maps = list(enumerate_embeddings(a, b).members)
    elif kind == "homomorphism":
        if args.all or args.count:
            maps = enumerate_homomorphisms(a, b)
        else:
            found = find_homomorphism(a, b)
            maps = [found] if found is not None else []
    else:
        maps = [
            f
            for f in enumerate_homomorphisms(a, b)
            if check_morphism(f, a, b, kind)
        ]
    if args.all:
        for f in maps:
            sys.stdout.write(json.dumps(dict(f.items()), sort_keys=True) + "\n")
    if args.count:
        sys.stdout.write(f"{len(maps)}\n")
    return EXIT_OK if maps else EXIT_FAIL


def _cmd_consist(args) -> int:
    instance = load_structure(args.instance)
    template = load_structure(args.template)
    if consistency.is_consistent(instance, template, args.k, args.l):
        sys.stdout.write("consistent\n")
        return EXIT_OK
    if args.trace:
        trace = consistency.spoiler_trace(instance, template, args.k, args.l)
        assert trace is not None
        _write(args.trace, dump_canonical(_trace_to_doc(trace.root)))
    sys.stdout.write("inconsistent\n")
    return EXIT_FAIL


def _trace_to_doc(node: consistency.TraceNode) -> dict:
    return {
        "pebbles": list(node.pebbles),
        "values": list(node.values),
        "action": node.action,
        "target": list(node.target),
        "children": [
            {"reply": list(values), "node": _trace_to_doc(child)}
            for values, child in node.children
        ],
    }


def _oracle_for(spec: str) -> verifier.ClassOracle:
    if spec == "fn":
        return verifier.forbh_oracle(families.FnFamily(), size_bound=0)
    if spec == "g":
        return verifier.forbh_oracle(families.GFamily(), size_bound=0)
    if spec.startswith("lineq:"):
        try:
            k_text, l_text, group_text = spec[len("lineq:") :].split(",")
            k, l = int(k_text), int(l_text)
        except ValueError:
            raise StructureError(f"bad class spec {spec!r}; expected lineq:<k>,<l>,<group>") from None
        template = families.build_template(AbelianGroup.parse(group_text))
        return verifier.consistency_oracle(template, k, l)
    raise StructureError(f"unknown class {spec!r}")


def _cmd_confuse(args) -> int:
    diagram = load_diagram(args.diagram)
    oracle = _oracle_for(args.cls)
    if args.cls == "g":
        # glued copies carry at most as many leaves as the base; margin of 2
        leaves = max(len(diagram.base.domain), 2)
        oracle = verifier.forbh_oracle(
            families.GFamily(), size_bound=0, hard_cap=2 * (leaves + 2)
        )
    report = verifier.check_confusion(
        diagram,
        args.m,
        oracle,
        mode=args.mode,
        samples=args.samples,
        seed=args.seed,
        jobs=args.jobs,
    )
    sys.stdout.write(dump_canonical(report.to_dict()))
    return EXIT_OK if report.verdict else EXIT_FAIL


def _cmd_bounds(args) -> int:
    if args.find_m:
        m = bounds_mod.minimal_m(args.n, args.r, args.t, cap=args.cap)
        doc: dict = {"n": args.n, "r": args.r, "t": args.t, "cap": str(args.cap)}
        if m is None:
            doc["minimal_m"] = None
        else:
            doc["minimal_m"] = str(m)
            doc["report"] = bounds_mod.condition_holds(
                bounds_mod.BoundsParams(args.r, args.t, args.n, m)
            ).to_dict()
        sys.stdout.write(dump_canonical(doc))
        return EXIT_OK
    if args.m is None:
        raise StructureError("bounds needs --m or --find-m")
    report = bounds_mod.condition_holds(bounds_mod.BoundsParams(args.r, args.t, args.n, args.m))
    sys.stdout.write(dump_canonical(report.to_dict()))
    return EXIT_OK


def _cmd_export_dot(args) -> int:
    s = load_structure(args.structure)
    _write(args.output, structure_to_dot(s, tuple(args.symmetric)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="finstruct",
        description="Finite relational structures: generation, checks, sweeps, bounds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a family structure or diagram")
    gen.add_argument("family", choices=["fn", "g", "lineq", "path", "template"])
    gen.add_argument("--n", type=int)
    gen.add_argument("--group", help="cyclic factors, e.g. 2 or 2x2")
    gen.add_argument("--shape", help="tree shape, e.g. ((..)(..))")
    gen.add_argument("--mark", help="marking element for lineq instances, e.g. 1 or 1-0")
    gen.add_argument("--diagram", action="store_true", help="emit the diagram instead")
    gen.add_argument("--output", "-o", default="-")
    gen.set_defaults(func=_cmd_gen)

    hom = sub.add_parser("hom", help="homomorphism search between two structures")
    hom.add_argument("--from", dest="src", required=True)
    hom.add_argument("--to", dest="dst", required=True)
    hom.add_argument("--kind", default="homomorphism", choices=list(KINDS))
    hom.add_argument("--all", action="store_true", help="print every map as JSON")
    hom.add_argument("--count", action="store_true", help="print the number of maps")
    hom.set_defaults(func=_cmd_hom)

    consist = sub.add_parser("consist", help="(k,l)-consistency verdict")
    consist.add_argument("instance")
    consist.add_argument("template")
    consist.add_argument("--k", type=int, required=True)
    consist.add_argument("--l", type=int, required=True)
    consist.add_argument("--trace", help="write a spoiler strategy tree here when inconsistent")
    consist.set_defaults(func=_cmd_consist)

    confuse = sub.add_parser("confuse", help="coloring sweep over a diagram")
    confuse.add_argument("--diagram", required=True)
    confuse.add_argument("--m", type=int, required=True)
    confuse.add_argument("--mode", default="exhaustive", choices=["exhaustive", "sample"])
    confuse.add_argument("--samples", type=int, default=0)
    confuse.add_argument("--seed", type=int, default=0)
    confuse.add_argument("--class", dest="cls", required=True, help="fn | g | lineq:<k>,<l>,<group>")
    confuse.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    confuse.set_defaults(func=_cmd_confuse)

    bounds_p = sub.add_parser("bounds", help="threshold condition arithmetic")
    bounds_p.add_argument("--n", type=int, required=True)
    bounds_p.add_argument("--r", type=int, required=True)
    bounds_p.add_argument("--t", type=int, required=True)
    bounds_p.add_argument("--m", type=int)
    bounds_p.add_argument("--find-m", action="store_true")
    bounds_p.add_argument("--cap", type=int, default=10**6)
    bounds_p.set_defaults(func=_cmd_bounds)

    dot = sub.add_parser("export-dot", help="render a structure document as DOT")
    dot.add_argument("structure")
    dot.add_argument("--output", "-o", default="-")
    dot.add_argument("--symmetric", nargs="*", default=[], help="relations drawn undirected")
    dot.set_defaults(func=_cmd_export_dot)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except (StructureError, consistency.BudgetExceeded, OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
