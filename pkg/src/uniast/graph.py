"""Code graph assembly and the serialized index format.

The graph holds one node per entity and four edge kinds: Dependency (uses),
Reference (the stored inverse of every Dependency), Implementation (class
implements interface), and Group (declared together). Serialization is
canonical: sorted object keys, sorted edge list, no floating-point fields,
so identical indexes are byte-identical on disk.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .entities import Entity, EntityId
from .resolve import Internal, Resolution, Unresolved

REL_DEPENDENCY = "dependency"
REL_REFERENCE = "reference"
REL_IMPLEMENTATION = "implementation"
REL_GROUP = "group"

RELATIONS = (REL_DEPENDENCY, REL_REFERENCE, REL_IMPLEMENTATION, REL_GROUP)
SITE_KINDS = ("call", "method_call", "constructor", "type_ref", "import_ref")
ENTITY_KINDS = ("function", "type", "variable")


class SchemaError(Exception):
    """A structural problem in a serialized index, located by document path."""

    def __init__(self, path: str, message: str) -> None:
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message


@dataclass(frozen=True, slots=True)
class Edge:
    from_id: EntityId
    to_id: EntityId
    relation: str
    site_kind: str | None = None


@dataclass(slots=True)
class CodeGraph:
    nodes: list[EntityId]  # sorted by rendered id
    edges: list[Edge]  # deduplicated, sorted


@dataclass(slots=True)
class EntityRecord:
    kind: str
    file: str
    byte_start: int
    byte_end: int
    start_line: int
    end_line: int
    signature: str
    source_text: str
    exported: bool


@dataclass(slots=True)
class PackageRecord:
    functions: dict[str, EntityRecord] = field(default_factory=dict)
    types: dict[str, EntityRecord] = field(default_factory=dict)
    variables: dict[str, EntityRecord] = field(default_factory=dict)

    def all_records(self) -> dict[str, EntityRecord]:
        merged: dict[str, EntityRecord] = {}
        merged.update(self.functions)
        merged.update(self.types)
        merged.update(self.variables)
        return merged


@dataclass(slots=True)
class ModuleRecord:
    dependencies: list[str]
    files: list[str]
    packages: dict[str, PackageRecord]


@dataclass(slots=True)
class UniAstIndex:
    repo_name: str
    modules: dict[str, ModuleRecord]
    graph: CodeGraph
    diagnostics: dict

    def entity_record(self, entity_id: EntityId) -> EntityRecord | None:
        module = self.modules.get(entity_id.module_path)
        if module is None:
            return None
        package = module.packages.get(entity_id.package_path)
        if package is None:
            return None
        return package.all_records().get(entity_id.symbol_name)


def _edge_sort_key(edge: Edge):
    return (edge.from_id.render(), edge.relation, edge.to_id.render(), edge.site_kind or "")


def build_graph(
    entities: list[Entity],
    resolutions: list[tuple["object", Resolution]],
) -> CodeGraph:
    """Assemble nodes and edges from resolved dependency sites.

    Internal resolutions produce a Dependency edge and its mirrored
    Reference; resolved ``implements`` clauses produce Implementation edges;
    ``group_anchor`` produces Group edges. External/Builtin/Unresolved
    resolutions produce no edges; self-references are dropped.
    """
    by_id = {e.id: e for e in entities}
    nodes = sorted((e.id for e in entities), key=EntityId.render)
    node_set = set(nodes)
    edge_set: set[Edge] = set()

    for site, resolution in resolutions:
        if not isinstance(resolution, Internal):
            continue
        source = site.from_id
        target = resolution.target
        assert target in node_set, f"resolver returned unknown entity {target.render()}"
        if source == target:
            continue
        if site.from_implements_clause:
            from_entity = by_id.get(source)
            to_entity = by_id.get(target)
            if (
                from_entity is not None
                and to_entity is not None
                and from_entity.type_flavor == "class"
                and to_entity.type_flavor == "interface"
            ):
                edge_set.add(Edge(source, target, REL_IMPLEMENTATION, None))
        edge_set.add(Edge(source, target, REL_DEPENDENCY, site.site_kind))
        edge_set.add(Edge(target, source, REL_REFERENCE, site.site_kind))

    for entity in entities:
        if entity.group_anchor is not None and entity.group_anchor != entity.id:
            assert entity.group_anchor in node_set
            edge_set.add(Edge(entity.id, entity.group_anchor, REL_GROUP, None))

    return CodeGraph(nodes, sorted(edge_set, key=_edge_sort_key))


# --- serialization -----------------------------------------------------------


def _record_to_json(record: EntityRecord) -> dict:
    return {
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


def index_to_json(index: UniAstIndex) -> dict:
    return {
        "diagnostics": index.diagnostics,
        "graph": {
            "edges": [
                {
                    "from": e.from_id.render(),
                    "relation": e.relation,
                    "site_kind": e.site_kind,
                    "to": e.to_id.render(),
                }
                for e in index.graph.edges
            ],
            "nodes": [n.render() for n in index.graph.nodes],
        },
        "modules": {
            module_path: {
                "dependencies": module.dependencies,
                "files": module.files,
                "packages": {
                    package_path: {
                        "functions": {k: _record_to_json(v) for k, v in sorted(pkg.functions.items())},
                        "types": {k: _record_to_json(v) for k, v in sorted(pkg.types.items())},
                        "variables": {k: _record_to_json(v) for k, v in sorted(pkg.variables.items())},
                    }
                    for package_path, pkg in sorted(module.packages.items())
                },
            }
            for module_path, module in sorted(index.modules.items())
        },
        "repo_name": index.repo_name,
    }


def serialize_index(index: UniAstIndex) -> bytes:
    """Canonical UTF-8 JSON bytes: sorted keys, two-space indent, trailing
    newline. Byte-identical for identical indexes."""
    doc = index_to_json(index)
    return (json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=True) + "\n").encode("utf-8")


# --- loading / validation ----------------------------------------------------


def _require(condition: bool, path: str, message: str) -> None:
    if not condition:
        raise SchemaError(path, message)


def _require_keys(obj: dict, keys: set[str], path: str) -> None:
    _require(isinstance(obj, dict), path, "expected an object")
    actual = set(obj.keys())
    missing = keys - actual
    extra = actual - keys
    _require(not missing, path, f"missing keys: {sorted(missing)}")
    _require(not extra, path, f"unknown keys: {sorted(extra)}")


def _load_record(obj: dict, file_hint: str, path: str) -> EntityRecord:
    _require_keys(obj, {"exported", "kind", "signature", "source_text", "span"}, path)
    _require(isinstance(obj["exported"], bool), f"{path}.exported", "expected a boolean")
    _require(obj["kind"] in ENTITY_KINDS, f"{path}.kind", f"expected one of {ENTITY_KINDS}")
    _require(isinstance(obj["signature"], str), f"{path}.signature", "expected a string")
    _require(isinstance(obj["source_text"], str), f"{path}.source_text", "expected a string")
    span = obj["span"]
    _require_keys(span, {"byte_end", "byte_start", "end_line", "file", "start_line"}, f"{path}.span")
    for key in ("byte_end", "byte_start", "end_line", "start_line"):
        _require(
            isinstance(span[key], int) and not isinstance(span[key], bool),
            f"{path}.span.{key}", "expected an integer",
        )
    _require(isinstance(span["file"], str), f"{path}.span.file", "expected a string")
    _require(span["byte_start"] <= span["byte_end"], f"{path}.span", "byte_start > byte_end")
    return EntityRecord(
        kind=obj["kind"],
        file=span["file"],
        byte_start=span["byte_start"],
        byte_end=span["byte_end"],
        start_line=span["start_line"],
        end_line=span["end_line"],
        signature=obj["signature"],
        source_text=obj["source_text"],
        exported=obj["exported"],
    )


def _parse_node_id(text: str, path: str) -> EntityId:
    try:
        return EntityId.parse(text)
    except (ValueError, AttributeError, TypeError):
        raise SchemaError(path, f"invalid entity id {text!r}") from None


def load_index(data: bytes) -> UniAstIndex:
    """Parse and validate serialized index bytes.

    Raises SchemaError naming the offending document path on missing or
    ill-typed fields, unknown nodes in edges, or node/record mismatches.
    """
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, ValueError) as exc:
        raise SchemaError("$", f"not valid JSON: {exc}") from exc

    _require_keys(doc, {"diagnostics", "graph", "modules", "repo_name"}, "$")
    _require(isinstance(doc["repo_name"], str), "repo_name", "expected a string")

    diagnostics = doc["diagnostics"]
    _require_keys(diagnostics, {"parse_errors", "unresolved_by_reason"}, "diagnostics")
    _require(
        isinstance(diagnostics["parse_errors"], int) and not isinstance(diagnostics["parse_errors"], bool),
        "diagnostics.parse_errors", "expected an integer",
    )
    reasons = diagnostics["unresolved_by_reason"]
    _require_keys(reasons, {"cycle", "not_found", "shadowed", "unsupported"}, "diagnostics.unresolved_by_reason")
    for reason, count in reasons.items():
        _require(
            isinstance(count, int) and not isinstance(count, bool),
            f"diagnostics.unresolved_by_reason.{reason}", "expected an integer",
        )

    graph_doc = doc["graph"]
    _require_keys(graph_doc, {"edges", "nodes"}, "graph")
    _require(isinstance(graph_doc["nodes"], list), "graph.nodes", "expected a list")
    nodes: list[EntityId] = []
    for i, node_text in enumerate(graph_doc["nodes"]):
        _require(isinstance(node_text, str), f"graph.nodes[{i}]", "expected a string")
        nodes.append(_parse_node_id(node_text, f"graph.nodes[{i}]"))
    node_set = {n.render() for n in nodes}

    _require(isinstance(graph_doc["edges"], list), "graph.edges", "expected a list")
    edges: list[Edge] = []
    for i, edge_doc in enumerate(graph_doc["edges"]):
        path = f"graph.edges[{i}]"
        _require_keys(edge_doc, {"from", "relation", "site_kind", "to"}, path)
        _require(edge_doc["relation"] in RELATIONS, f"{path}.relation", f"expected one of {RELATIONS}")
        site_kind = edge_doc["site_kind"]
        _require(
            site_kind is None or site_kind in SITE_KINDS,
            f"{path}.site_kind", f"expected null or one of {SITE_KINDS}",
        )
        for end in ("from", "to"):
            _require(isinstance(edge_doc[end], str), f"{path}.{end}", "expected a string")
            _require(
                edge_doc[end] in node_set,
                f"{path}.{end}", f"unknown node {edge_doc[end]!r}",
            )
        edges.append(
            Edge(
                _parse_node_id(edge_doc["from"], f"{path}.from"),
                _parse_node_id(edge_doc["to"], f"{path}.to"),
                edge_doc["relation"],
                site_kind,
            )
        )

    modules_doc = doc["modules"]
    _require(isinstance(modules_doc, dict), "modules", "expected an object")
    modules: dict[str, ModuleRecord] = {}
    record_ids: set[str] = set()
    for module_path, module_doc in modules_doc.items():
        mpath = f"modules.{module_path}"
        _require_keys(module_doc, {"dependencies", "files", "packages"}, mpath)
        deps = module_doc["dependencies"]
        _require(
            isinstance(deps, list) and all(isinstance(d, str) for d in deps),
            f"{mpath}.dependencies", "expected a list of strings",
        )
        files = module_doc["files"]
        _require(
            isinstance(files, list) and all(isinstance(f, str) for f in files),
            f"{mpath}.files", "expected a list of strings",
        )
        packages: dict[str, PackageRecord] = {}
        _require(isinstance(module_doc["packages"], dict), f"{mpath}.packages", "expected an object")
        for package_path, package_doc in module_doc["packages"].items():
            ppath = f"{mpath}.packages.{package_path}"
            _require_keys(package_doc, {"functions", "types", "variables"}, ppath)
            package = PackageRecord()
            for bucket, expected_kind in (("functions", "function"), ("types", "type"), ("variables", "variable")):
                bucket_doc = package_doc[bucket]
                _require(isinstance(bucket_doc, dict), f"{ppath}.{bucket}", "expected an object")
                for symbol, record_doc in bucket_doc.items():
                    rpath = f"{ppath}.{bucket}.{symbol}"
                    record = _load_record(record_doc, package_path, rpath)
                    _require(record.kind == expected_kind, f"{rpath}.kind", f"expected {expected_kind!r}")
                    getattr(package, bucket)[symbol] = record
                    record_ids.add(EntityId.make(module_path, package_path, symbol).render())
            packages[package_path] = package
        modules[module_path] = ModuleRecord(deps, files, packages)

    _require(
        record_ids == node_set,
        "graph.nodes",
        "graph nodes and entity records do not match: "
        f"only-in-nodes={sorted(node_set - record_ids)[:3]} only-in-records={sorted(record_ids - node_set)[:3]}",
    )

    return UniAstIndex(doc["repo_name"], modules, CodeGraph(nodes, edges), diagnostics)
