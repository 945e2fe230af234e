"""Cross-file symbol resolution: aliases, re-exports, and barrel files.

Every dependency site resolves in-process to the entity that originally
declares the name (never an intermediate re-export), to an external package,
to a builtin, or to an Unresolved diagnostic. Resolution runs after all
files are parsed and is read-only over the shared tables.

``hops`` counts the files whose declarations or export tables were consulted
on the successful chain: 1 for a local declaration or a direct import, +1
per re-export hop (so a single barrel file gives hops=2).
"""

from __future__ import annotations

import posixpath
from dataclasses import dataclass, field

from .entities import (
    SITE_CALL,
    SITE_CONSTRUCTOR,
    SITE_IMPORT_REF,
    SITE_METHOD_CALL,
    SITE_TYPE_REF,
    DependencySite,
    Entity,
    EntityId,
    ImportedName,
)
from .nodes import (
    ClassDecl,
    EnumDecl,
    ExportDefaultExpr,
    ExportNamedDecl,
    ExportStarDecl,
    FunctionDecl,
    InterfaceDecl,
    SourceFileAst,
    TypeAliasDecl,
    VariableStatement,
)
from .project import ProjectLayout

# Names with language- or runtime-provided meaning: they never produce graph
# edges. Kept deliberately small and documented; extend with care since any
# name here can no longer resolve to a user entity unless locally declared.
BUILTIN_NAMES = frozenset(
    {
        # primitive and special types
        "string", "number", "boolean", "void", "any", "unknown", "never",
        "null", "undefined", "object", "symbol", "bigint", "this",
        # standard library types and constructors
        "Promise", "Array", "Map", "Set", "WeakMap", "WeakSet", "Record",
        "Partial", "Required", "Readonly", "Pick", "Omit", "Exclude",
        "Extract", "NonNullable", "Parameters", "ReturnType", "Awaited",
        "Error", "TypeError", "RangeError", "Date", "RegExp", "Function",
        "Object", "String", "Number", "Boolean", "Symbol", "BigInt",
        "Iterable", "Iterator", "Generator", "ArrayBuffer", "DataView",
        "Int8Array", "Uint8Array", "Float32Array", "Float64Array",
        # runtime globals
        "console", "JSON", "Math", "Reflect", "Proxy", "Infinity", "NaN",
        "globalThis", "parseInt", "parseFloat", "isNaN", "isFinite",
        "encodeURIComponent", "decodeURIComponent", "structuredClone",
        "setTimeout", "setInterval", "clearTimeout", "clearInterval",
        "queueMicrotask", "fetch", "atob", "btoa",
    }
)

SOURCE_EXT_PROBES = (".ts", ".tsx")
INDEX_PROBES = ("index.ts", "index.tsx", "src/index.ts", "src/index.tsx")

REASON_SHADOWED = "shadowed"
REASON_NOT_FOUND = "not_found"
REASON_CYCLE = "cycle"
REASON_UNSUPPORTED = "unsupported"


# --- resolution results ------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Internal:
    target: EntityId
    hops: int


@dataclass(frozen=True, slots=True)
class External:
    package_name: str


@dataclass(frozen=True, slots=True)
class Builtin:
    pass


@dataclass(frozen=True, slots=True)
class Unresolved:
    reason: str


Resolution = Internal | External | Builtin | Unresolved


# --- export tables -----------------------------------------------------------


@dataclass(frozen=True, slots=True)
class ExportLocal:
    symbol_name: str


@dataclass(frozen=True, slots=True)
class ExportReExport:
    from_specifier: str
    original_name: str  # "*" marks `export * as ns from ...` (unsupported)


@dataclass(slots=True)
class ExportTable:
    file: str
    entries: dict[str, ExportLocal | ExportReExport]
    star_from: list[str]  # ordered star re-export specifiers


def build_export_table(ast: SourceFileAst, package_path: str) -> ExportTable:
    """One entry per export binding; aliases map exported name -> original."""
    entries: dict[str, ExportLocal | ExportReExport] = {}
    star_from: list[str] = []
    for st in ast.statements:
        if isinstance(st, ExportNamedDecl):
            for binding in st.names:
                if st.from_specifier is None:
                    entries.setdefault(binding.exported_name, ExportLocal(binding.local_name))
                else:
                    entries.setdefault(
                        binding.exported_name,
                        ExportReExport(st.from_specifier, binding.local_name),
                    )
        elif isinstance(st, ExportStarDecl):
            if st.alias is None:
                star_from.append(st.from_specifier)
            else:
                entries.setdefault(st.alias, ExportReExport(st.from_specifier, "*"))
        elif isinstance(st, ExportDefaultExpr):
            if st.local_name:
                entries.setdefault("default", ExportLocal(st.local_name))
        elif isinstance(st, (FunctionDecl, ClassDecl)):
            if st.is_default_export:
                entries.setdefault("default", ExportLocal(st.name))
            elif st.is_exported:
                entries.setdefault(st.name, ExportLocal(st.name))
        elif isinstance(st, (InterfaceDecl, TypeAliasDecl, EnumDecl)):
            if st.is_exported:
                entries.setdefault(st.name, ExportLocal(st.name))
        elif isinstance(st, VariableStatement) and st.is_exported:
            for decl in st.declarators:
                if decl.name:
                    entries.setdefault(decl.name, ExportLocal(decl.name))
    return ExportTable(package_path, entries, star_from)


# --- module specifier resolution ---------------------------------------------


def external_package_name(specifier: str) -> str:
    parts = specifier.split("/")
    if specifier.startswith("@") and len(parts) >= 2:
        return parts[0] + "/" + parts[1]
    return parts[0]


def resolve_specifier(
    from_file: str,
    specifier: str,
    layout: ProjectLayout,
    file_set: set[str] | None = None,
) -> str | External | None:
    """Resolve an import/export specifier to a project file, an external
    package, or None (not found).

    Relative specifiers probe the exact path, then each recognized extension,
    then ``<path>/index`` with each extension. Bare specifiers are external,
    except that in monorepo mode a bare specifier equal to a sibling module's
    manifest name resolves to that module's root index file.
    """
    if not specifier:
        return None
    files = file_set if file_set is not None else layout.file_set()
    if specifier.startswith("."):
        base = posixpath.normpath(posixpath.join(posixpath.dirname(from_file), specifier))
        if base.startswith(".."):
            return None
        candidates = [base]
        candidates += [base + ext for ext in SOURCE_EXT_PROBES]
        candidates += [posixpath.join(base, "index") + ext for ext in SOURCE_EXT_PROBES]
        for candidate in candidates:
            if candidate in files:
                return candidate
        return None
    if specifier.startswith("/"):
        return None
    if layout.mode == "monorepo":
        for module in layout.modules:
            if module.manifest.name == specifier:
                prefix = module.root_dir + "/" if module.root_dir else ""
                for probe in INDEX_PROBES:
                    candidate = prefix + probe
                    if candidate in module.source_files:
                        return candidate
                return None
    return External(external_package_name(specifier))


# --- the resolver ------------------------------------------------------------


@dataclass(slots=True)
class LocalTypeEnv:
    """Receiver types from exactly two inference rules (``const x = new T()``
    initializers and explicit ``x: T`` annotations): a flat per-entity map
    (first binding wins), with file-level variables as fallback."""

    by_entity: dict[EntityId, dict[str, str]] = field(default_factory=dict)
    by_file: dict[str, dict[str, str]] = field(default_factory=dict)

    def lookup(self, entity_id: EntityId, name: str) -> str | None:
        local = self.by_entity.get(entity_id, {}).get(name)
        if local is not None:
            return local
        return self.by_file.get(entity_id.package_path, {}).get(name)


class Resolver:
    """Phase-two resolution over immutable per-file tables."""

    def __init__(
        self,
        layout: ProjectLayout,
        export_tables: dict[str, ExportTable],
        imports_by_file: dict[str, dict[str, ImportedName]],
        entities: list[Entity],
        file_type_envs: dict[str, dict[str, str]] | None = None,
    ) -> None:
        self.layout = layout
        self.tables = export_tables
        self.imports = imports_by_file
        self.file_set = layout.file_set()
        self.module_of_file = layout.module_of_file()
        self.by_id: dict[EntityId, Entity] = {e.id: e for e in entities}
        self.by_file: dict[str, dict[str, Entity]] = {}
        for e in entities:
            self.by_file.setdefault(e.id.package_path, {})[e.id.symbol_name] = e
        self.type_env = LocalTypeEnv(
            {e.id: e.local_type_env for e in entities if e.local_type_env},
            file_type_envs or {},
        )
        self.warnings: list[str] = []
        self._symbol_memo: dict[tuple[str, str], Resolution] = {}

    # -- core lookups --

    def _local_entity(self, file: str, name: str) -> Entity | None:
        return self.by_file.get(file, {}).get(name)

    def resolve_symbol(self, file: str, name: str) -> Resolution:
        """Trace ``name`` in ``file`` to its declaring entity, following the
        import binding through aliases, re-exports, and barrel files."""
        key = (file, name)
        memo = self._symbol_memo.get(key)
        if memo is not None:
            return memo
        result = self._resolve_symbol_uncached(file, name)
        self._symbol_memo[key] = result
        return result

    def _resolve_symbol_uncached(self, file: str, name: str) -> Resolution:
        local = self._local_entity(file, name)
        if local is not None:
            return Internal(local.id, 1)
        binding = self.imports.get(file, {}).get(name)
        if binding is None:
            return Unresolved(REASON_NOT_FOUND)
        if binding.imported_name == "*":
            return Unresolved(REASON_UNSUPPORTED)  # bare namespace object
        target = resolve_specifier(file, binding.specifier, self.layout, self.file_set)
        if isinstance(target, External):
            return target
        if target is None:
            return Unresolved(REASON_NOT_FOUND)
        return self._lookup_export(target, binding.imported_name, {(file, name)}, 1)

    def _lookup_export(
        self, file: str, name: str, visited: set[tuple[str, str]], hops: int
    ) -> Resolution:
        if (file, name) in visited:
            return Unresolved(REASON_CYCLE)
        visited = visited | {(file, name)}
        table = self.tables.get(file)
        if table is None:
            return Unresolved(REASON_NOT_FOUND)
        entry = table.entries.get(name)
        if isinstance(entry, ExportLocal):
            entity = self._local_entity(file, entry.symbol_name)
            if entity is None:
                return Unresolved(REASON_NOT_FOUND)
            return Internal(entity.id, hops)
        if isinstance(entry, ExportReExport):
            if entry.original_name == "*":
                return Unresolved(REASON_UNSUPPORTED)
            target = resolve_specifier(file, entry.from_specifier, self.layout, self.file_set)
            if isinstance(target, External):
                return target
            if target is None:
                return Unresolved(REASON_NOT_FOUND)
            return self._lookup_export(target, entry.original_name, visited, hops + 1)
        # no named entry: search star re-exports in recorded order
        successes: list[Resolution] = []
        saw_cycle = False
        for spec in table.star_from:
            target = resolve_specifier(file, spec, self.layout, self.file_set)
            if isinstance(target, External) or target is None:
                continue  # names behind external star sources are unknowable
            result = self._lookup_export(target, name, set(visited), hops + 1)
            if isinstance(result, (Internal, External)):
                successes.append(result)
            elif isinstance(result, Unresolved) and result.reason == REASON_CYCLE:
                saw_cycle = True
        if successes:
            if len(successes) > 1:
                self.warnings.append(
                    f"name {name!r} matches multiple star re-exports in {file}; first wins"
                )
            return successes[0]
        if saw_cycle:
            return Unresolved(REASON_CYCLE)
        return Unresolved(REASON_NOT_FOUND)

    def _resolve_name(self, file: str, name: str) -> Resolution:
        """Site-level resolution of a possibly dotted name written in ``file``.

        Order: local declaration, import chain, builtin, not found. A dotted
        name whose head is a namespace import resolves to the named member of
        the target file; any other dotted name resolves to its container."""
        head, _, rest = name.partition(".")
        binding = self.imports.get(file, {}).get(head)
        if rest and binding is not None and binding.imported_name == "*":
            member = rest.split(".", 1)[0]
            target = resolve_specifier(file, binding.specifier, self.layout, self.file_set)
            if isinstance(target, External):
                return target
            if target is None:
                return Unresolved(REASON_NOT_FOUND)
            return self._lookup_export(target, member, set(), 1)
        if self._local_entity(file, head) is not None:
            return Internal(self._local_entity(file, head).id, 1)
        if binding is not None:
            return self.resolve_symbol(file, head)
        if head in BUILTIN_NAMES:
            return Builtin()
        return Unresolved(REASON_NOT_FOUND)

    # -- method dispatch over inferred receiver types --

    def _find_method(
        self, type_entity: Entity, method: str, visited: set[EntityId]
    ) -> Entity | None:
        """Find ``Type.method`` on the type or up its extends chain."""
        if type_entity.id in visited:
            return None
        visited.add(type_entity.id)
        qualified = f"{type_entity.id.symbol_name}.{method}"
        found = self.by_file.get(type_entity.id.package_path, {}).get(qualified)
        if found is not None:
            return found
        for ref in type_entity.extends_refs:
            parent = self._resolve_name(type_entity.id.package_path, ref.name)
            if isinstance(parent, Internal):
                parent_entity = self.by_id.get(parent.target)
                if parent_entity is not None and parent_entity.kind == "type":
                    result = self._find_method(parent_entity, method, visited)
                    if result is not None:
                        return result
        return None

    def _resolve_method_call(self, site: DependencySite) -> Resolution:
        file = site.from_id.package_path
        raw = site.raw_name
        if "." not in raw:
            return self._resolve_name(file, raw)
        head, rest = raw.split(".", 1)
        hint = self.type_env.lookup(site.from_id, head)
        if hint:
            if "." in rest:
                return Unresolved(REASON_UNSUPPORTED)
            type_resolution = self._resolve_name(file, hint)
            if isinstance(type_resolution, Builtin):
                return Builtin()
            if isinstance(type_resolution, External):
                return type_resolution
            if isinstance(type_resolution, Internal):
                type_entity = self.by_id.get(type_resolution.target)
                if type_entity is None or type_entity.kind != "type":
                    return Unresolved(REASON_UNSUPPORTED)
                method_entity = self._find_method(type_entity, rest, set())
                if method_entity is None:
                    return Unresolved(REASON_NOT_FOUND)
                return Internal(method_entity.id, type_resolution.hops)
            return type_resolution
        binding = self.imports.get(file, {}).get(head)
        if binding is not None and binding.imported_name == "*":
            return self._resolve_name(file, raw)
        if (
            head in BUILTIN_NAMES
            and self._local_entity(file, head) is None
            and binding is None
        ):
            return Builtin()
        return Unresolved(REASON_UNSUPPORTED)

    # -- entry point --

    def resolve_site(self, site: DependencySite) -> Resolution:
        file = site.from_id.package_path
        raw = site.raw_name
        if site.site_kind == SITE_METHOD_CALL:
            return self._resolve_method_call(site)
        if site.site_kind in (SITE_CALL, SITE_CONSTRUCTOR, SITE_TYPE_REF, SITE_IMPORT_REF):
            return self._resolve_name(file, raw)
        return Unresolved(REASON_UNSUPPORTED)

    def resolve_sites(
        self, sites: list[DependencySite]
    ) -> list[tuple[DependencySite, Resolution]]:
        """Resolve every site; deterministic and idempotent."""
        return [(site, self.resolve_site(site)) for site in sites]
