"""Command-line surface: build an index, query entities and neighborhoods.

Exit codes: 0 success (diagnostics are warnings, not failures), 1 IO or
schema errors, 2 usage errors, 3 entity not found. Summaries go to stderr;
query data goes to stdout so output can be piped.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections import deque
from pathlib import Path

from .entities import EntityId
from .graph import SchemaError, UniAstIndex, index_to_json, load_index, serialize_index
from .indexer import IndexOptions, build_index
from .project import NotADirectory

RELATION_NAMES = ("dependency", "reference", "implementation", "group")

EXIT_OK = 0
EXIT_IO = 1
EXIT_USAGE = 2
EXIT_NOT_FOUND = 3


def _relation_list(text: str) -> tuple[str, ...]:
    names = tuple(part.strip() for part in text.split(",") if part.strip())
    if not names:
        raise argparse.ArgumentTypeError("at least one relation required")
    for name in names:
        if name not in RELATION_NAMES:
            raise argparse.ArgumentTypeError(
                f"unknown relation {name!r}; expected a subset of {','.join(RELATION_NAMES)}"
            )
    return names


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="uniast",
        description="Build and query a function-level code index.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    index_cmd = sub.add_parser("index", help="index a repository into a JSON file")
    index_cmd.add_argument("root", help="repository root directory")
    index_cmd.add_argument("--monorepo", action="store_true", help="one module per workspace")
    index_cmd.add_argument("--output", default="uniast.json", help="output path (default: uniast.json)")
    index_cmd.add_argument(
        "--exclude", action="append", default=[], metavar="GLOB",
        help="additional exclude pattern (repeatable)",
    )
    index_cmd.add_argument(
        "--include-root-module", action="store_true",
        help="in monorepo mode, also index the root package's own sources",
    )
    index_cmd.add_argument("--jobs", type=_positive_int, default=1, help="parse-phase worker threads")

    query_cmd = sub.add_parser("query", help="query a built index")
    query_cmd.add_argument("index", help="path to the index JSON")
    query_sub = query_cmd.add_subparsers(dest="query_command", required=True)

    entity_cmd = query_sub.add_parser("entity", help="print one entity record")
    entity_cmd.add_argument("id", help="entity id (module#package#symbol)")

    neighbors_cmd = query_sub.add_parser("neighbors", help="breadth-first neighborhood of an entity")
    neighbors_cmd.add_argument("id", help="entity id (module#package#symbol)")
    neighbors_cmd.add_argument(
        "--relation", type=_relation_list, default=("dependency",),
        help="comma-separated relations to follow (default: dependency)",
    )
    neighbors_cmd.add_argument("--depth", type=_positive_int, default=1, help="hop count (default: 1)")
    return parser


def cmd_index(args: argparse.Namespace) -> int:
    options = IndexOptions(
        monorepo=args.monorepo,
        excludes=tuple(args.exclude),
        include_root_module=args.include_root_module,
        jobs=args.jobs,
    )
    try:
        result = build_index(Path(args.root), options)
    except NotADirectory as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    for warning in result.stats.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    data = serialize_index(result.index)
    try:
        Path(args.output).write_bytes(data)
    except OSError as exc:
        print(f"error: cannot write {args.output}: {exc}", file=sys.stderr)
        return EXIT_IO
    print(result.stats.summary_line(), file=sys.stderr)
    return EXIT_OK


def _load_index_or_fail(path: str) -> UniAstIndex | None:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        print(f"error: cannot read {path}: {exc}", file=sys.stderr)
        return None
    try:
        return load_index(data)
    except SchemaError as exc:
        print(f"error: {path}: {exc}", file=sys.stderr)
        return None


def cmd_query_entity(args: argparse.Namespace) -> int:
    index = _load_index_or_fail(args.index)
    if index is None:
        return EXIT_IO
    try:
        entity_id = EntityId.parse(args.id)
    except ValueError:
        print(f"error: malformed entity id: {args.id}", file=sys.stderr)
        return EXIT_NOT_FOUND
    record = index.entity_record(entity_id)
    if record is None:
        print(f"error: entity not found: {args.id}", file=sys.stderr)
        return EXIT_NOT_FOUND
    doc = {
        "id": args.id,
        "exported": record.exported,
        "kind": record.kind,
        "signature": record.signature,
        "source_text": record.source_text,
        "span": {
            "byte_end": record.byte_end,
            "byte_start": record.byte_start,
            "end_line": record.end_line,
            "file": record.file,
            "start_line": record.start_line,
        },
    }
    print(json.dumps(doc, sort_keys=True, indent=2))
    return EXIT_OK


def neighbors_of(
    index: UniAstIndex, center: str, relations: tuple[str, ...], depth: int
) -> list[dict]:
    """Breadth-first traversal over the selected relations. Each entity
    appears once, at its minimum hop count, tagged with the relation that
    first reached it; output is sorted by (hops, id)."""
    adjacency: dict[str, list[tuple[str, str]]] = {}
    wanted = set(relations)
    for edge in index.graph.edges:
        if edge.relation in wanted:
            adjacency.setdefault(edge.from_id.render(), []).append(
                (edge.to_id.render(), edge.relation)
            )
    for targets in adjacency.values():
        targets.sort()

    seen = {center}
    results: list[dict] = []
    queue = deque([(center, 0)])
    while queue:
        node, hops = queue.popleft()
        if hops == depth:
            continue
        for target, relation in adjacency.get(node, []):
            if target in seen:
                continue
            seen.add(target)
            record = index.entity_record(EntityId.parse(target))
            results.append(
                {
                    "hops": hops + 1,
                    "id": target,
                    "relation": relation,
                    "signature": record.signature if record else "",
                }
            )
            queue.append((target, hops + 1))
    results.sort(key=lambda r: (r["hops"], r["id"]))
    return results


def cmd_query_neighbors(args: argparse.Namespace) -> int:
    index = _load_index_or_fail(args.index)
    if index is None:
        return EXIT_IO
    try:
        entity_id = EntityId.parse(args.id)
    except ValueError:
        print(f"error: malformed entity id: {args.id}", file=sys.stderr)
        return EXIT_NOT_FOUND
    if index.entity_record(entity_id) is None:
        print(f"error: entity not found: {args.id}", file=sys.stderr)
        return EXIT_NOT_FOUND
    neighbors = neighbors_of(index, args.id, args.relation, args.depth)
    print(json.dumps({"center": args.id, "neighbors": neighbors}, sort_keys=True, indent=2))
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_arg_parser()
    args = parser.parse_args(argv)
    if args.command == "index":
        return cmd_index(args)
    if args.command == "query":
        if args.query_command == "entity":
            return cmd_query_entity(args)
        return cmd_query_neighbors(args)
    parser.error("unknown command")  # pragma: no cover
    return EXIT_USAGE  # pragma: no cover


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
