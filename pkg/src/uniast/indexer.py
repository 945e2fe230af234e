"""End-to-end index construction for a repository.

Phases: discover layout, parse every file (optionally across worker
threads), extract entities and dependency sites, build per-file export
tables, resolve all sites against the completed tables, assemble the graph
and the serialized index. Only the parse phase is parallel; every later
phase is deterministic regardless of worker count.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .entities import (
    DependencySite,
    DuplicateSymbol,
    Entity,
    collect_dependency_sites,
    extract_entities,
    file_imports,
    file_type_env,
)
from .graph import (
    CodeGraph,
    EntityRecord,
    ModuleRecord,
    PackageRecord,
    UniAstIndex,
    build_graph,
)
from .nodes import SourceFileAst
from .parser import parse_file
from .project import ProjectLayout, discover_layout
from .resolve import (
    External,
    Resolution,
    Resolver,
    Unresolved,
    build_export_table,
)

UNRESOLVED_REASONS = ("cycle", "not_found", "shadowed", "unsupported")


@dataclass(slots=True)
class IndexOptions:
    monorepo: bool = False
    excludes: tuple[str, ...] = ()
    include_root_module: bool = False
    jobs: int = 1


@dataclass(slots=True)
class IndexStats:
    files: int = 0
    entities: int = 0
    dependency_edges: int = 0
    unresolved: int = 0
    parse_errors: int = 0
    elapsed_seconds: float = 0.0
    warnings: list[str] = field(default_factory=list)

    def summary_line(self) -> str:
        return (
            f"files={self.files} entities={self.entities} "
            f"dependency_edges={self.dependency_edges} unresolved={self.unresolved} "
            f"elapsed={self.elapsed_seconds:.2f}s"
        )


@dataclass(slots=True)
class BuildResult:
    index: UniAstIndex
    stats: IndexStats
    layout: ProjectLayout
    asts: dict[str, SourceFileAst]
    entities: list[Entity]
    sites: list[DependencySite]
    resolutions: list[tuple[DependencySite, Resolution]]


def _read_source(path: Path) -> str:
    return path.read_bytes().decode("utf-8", errors="replace")


def build_index(root: Path | str, options: IndexOptions | None = None) -> BuildResult:
    """Index the repository at ``root``. Raises NotADirectory; everything
    else (unparseable files, unresolvable names) lands in diagnostics."""
    options = options or IndexOptions()
    started = time.perf_counter()
    root = Path(root)
    layout = discover_layout(
        root,
        monorepo=options.monorepo,
        extra_excludes=tuple(options.excludes),
        include_root_module=options.include_root_module,
    )
    warnings = list(layout.warnings)

    work = [(m.name, f) for m in layout.modules for f in m.source_files]

    def parse_one(item: tuple[str, str]) -> tuple[str, str, SourceFileAst]:
        module_name, rel_path = item
        ast = parse_file(rel_path, _read_source(root / rel_path))
        return module_name, rel_path, ast

    if options.jobs > 1 and len(work) > 1:
        with ThreadPoolExecutor(max_workers=options.jobs) as pool:
            parsed = list(pool.map(parse_one, work))
    else:
        parsed = [parse_one(item) for item in work]

    asts: dict[str, SourceFileAst] = {}
    entities: list[Entity] = []
    sites: list[DependencySite] = []
    export_tables = {}
    imports_by_file = {}
    file_type_envs = {}
    duplicates: list[DuplicateSymbol] = []
    parse_errors = 0
    for module_name, rel_path, ast in parsed:
        asts[rel_path] = ast
        parse_errors += len(ast.errors)
        export_tables[rel_path] = build_export_table(ast, rel_path)
        imports_by_file[rel_path] = file_imports(ast)
        file_type_envs[rel_path] = file_type_env(ast)
        file_entities = extract_entities(ast, module_name, rel_path, duplicates)
        entities.extend(file_entities)
        sites.extend(collect_dependency_sites(ast, file_entities))
    warnings.extend(f"duplicate symbol {d.name!r} in {d.package_path}" for d in duplicates)

    resolver = Resolver(layout, export_tables, imports_by_file, entities, file_type_envs)
    resolutions = resolver.resolve_sites(sites)
    warnings.extend(resolver.warnings)

    graph = build_graph(entities, resolutions)
    index = _assemble_index(layout, entities, resolutions, graph, parse_errors)

    stats = IndexStats(
        files=len(work),
        entities=len(entities),
        dependency_edges=sum(1 for e in graph.edges if e.relation == "dependency"),
        unresolved=sum(index.diagnostics["unresolved_by_reason"].values()),
        parse_errors=parse_errors,
        elapsed_seconds=time.perf_counter() - started,
        warnings=warnings,
    )
    return BuildResult(index, stats, layout, asts, entities, sites, resolutions)


def _assemble_index(
    layout: ProjectLayout,
    entities: list[Entity],
    resolutions: list[tuple[DependencySite, Resolution]],
    graph: CodeGraph,
    parse_errors: int,
) -> UniAstIndex:
    observed_external: dict[str, set[str]] = {m.name: set() for m in layout.modules}
    unresolved_by_reason = {reason: 0 for reason in UNRESOLVED_REASONS}
    for site, resolution in resolutions:
        if isinstance(resolution, External):
            observed_external.setdefault(site.from_id.module_path, set()).add(resolution.package_name)
        elif isinstance(resolution, Unresolved):
            unresolved_by_reason[resolution.reason] += 1

    modules: dict[str, ModuleRecord] = {}
    for module in layout.modules:
        deps = sorted(set(module.manifest.dependencies) | observed_external.get(module.name, set()))
        packages = {f: PackageRecord() for f in module.source_files}
        modules[module.name] = ModuleRecord(deps, list(module.source_files), packages)

    for entity in entities:
        module = modules.get(entity.id.module_path)
        if module is None:
            continue
        package = module.packages.setdefault(entity.id.package_path, PackageRecord())
        record = EntityRecord(
            kind=entity.kind,
            file=entity.id.package_path,
            byte_start=entity.span.byte_start,
            byte_end=entity.span.byte_end,
            start_line=entity.span.start_line,
            end_line=entity.span.end_line,
            signature=entity.signature,
            source_text=entity.source_text,
            exported=entity.is_exported,
        )
        bucket = {"function": package.functions, "type": package.types, "variable": package.variables}[entity.kind]
        bucket[entity.id.symbol_name] = record

    diagnostics = {
        "parse_errors": parse_errors,
        "unresolved_by_reason": unresolved_by_reason,
    }
    return UniAstIndex(layout.repo_name, modules, graph, diagnostics)
