"""Symbol resolution: export tables, specifier probing, chains, cycles."""

from __future__ import annotations

from pathlib import Path

import pytest

from uniast.entities import collect_dependency_sites, extract_entities, file_imports, file_type_env
from uniast.indexer import build_index, IndexOptions
from uniast.parser import parse_file
from uniast.project import discover_layout
from uniast.resolve import (
    Builtin,
    External,
    ExportLocal,
    ExportReExport,
    Internal,
    Resolver,
    Unresolved,
    build_export_table,
    resolve_specifier,
)

FIXTURES = Path(__file__).parent / "fixtures"


def make_resolver(files: dict[str, str], tmp_path, monorepo: bool = False):
    for rel, content in files.items():
        p = tmp_path / rel
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(content, encoding="utf-8")
    layout = discover_layout(tmp_path, monorepo=monorepo)
    tables, imports, envs, entities = {}, {}, {}, []
    for module in layout.modules:
        for f in module.source_files:
            ast = parse_file(f, (tmp_path / f).read_text(encoding="utf-8"))
            tables[f] = build_export_table(ast, f)
            imports[f] = file_imports(ast)
            envs[f] = file_type_env(ast)
            ents = extract_entities(ast, module.name, f)
            entities.extend(ents)
            collect_dependency_sites(ast, ents)
    return Resolver(layout, tables, imports, entities, envs), layout


def test_export_table_barrel():
    ast = parse_file("index.ts", 'export { UserRepo as Repo } from "./user-repo";\n')
    table = build_export_table(ast, "index.ts")
    assert table.entries == {"Repo": ExportReExport("./user-repo", "UserRepo")}
    assert table.star_from == []


def test_export_table_local_class():
    ast = parse_file("user-repo.ts", "export class UserRepo {}\n")
    table = build_export_table(ast, "user-repo.ts")
    assert table.entries == {"UserRepo": ExportLocal("UserRepo")}


def test_export_table_star_order():
    ast = parse_file("b.ts", "export * from './a';\nexport * from './b';\n")
    table = build_export_table(ast, "b.ts")
    assert table.star_from == ["./a", "./b"]


def test_export_table_locals_and_default():
    ast = parse_file(
        "m.ts",
        "const inner = 1;\nexport { inner as outer };\nexport default function main() {}\n",
    )
    table = build_export_table(ast, "m.ts")
    assert table.entries["outer"] == ExportLocal("inner")
    assert table.entries["default"] == ExportLocal("main")


def test_resolve_specifier_relative(tmp_path):
    resolver, layout = make_resolver(
        {"index.ts": "export const a = 1;\n", "service.ts": "import { a } from './index';\n"},
        tmp_path,
    )
    assert resolve_specifier("service.ts", "./index", layout) == "index.ts"
    assert resolve_specifier("service.ts", "./missing", layout) is None


def test_resolve_specifier_bare_is_external(tmp_path):
    _, layout = make_resolver({"a.ts": "export const x = 1;\n"}, tmp_path)
    assert resolve_specifier("a.ts", "left-pad", layout) == External("left-pad")
    assert resolve_specifier("a.ts", "lodash/fp", layout) == External("lodash")
    assert resolve_specifier("a.ts", "@scope/pkg/deep", layout) == External("@scope/pkg")


def test_resolve_specifier_directory_index(tmp_path):
    _, layout = make_resolver(
        {"lib/index.ts": "export const x = 1;\n", "main.ts": "import { x } from './lib';\n"},
        tmp_path,
    )
    assert resolve_specifier("main.ts", "./lib", layout) == "lib/index.ts"


def test_resolve_specifier_monorepo_sibling():
    layout = discover_layout(FIXTURES / "monorepo", monorepo=True)
    resolved = resolve_specifier("packages/a/src/greet.ts", "pkg-b", layout)
    assert resolved == "packages/b/src/index.ts"


def test_resolve_symbol_through_barrel(tmp_path):
    resolver, _ = make_resolver(
        {
            "user-repo.ts": "export class UserRepo {\n  getById(id: string) { return id; }\n}\n",
            "index.ts": 'export { UserRepo as Repo } from "./user-repo";\n',
            "service.ts": 'import { Repo } from "./index";\nexport function loadUser() { return new Repo(); }\n',
        },
        tmp_path,
    )
    resolution = resolver.resolve_symbol("service.ts", "Repo")
    assert isinstance(resolution, Internal)
    assert resolution.target.render().endswith("user-repo.ts#UserRepo")
    assert resolution.hops == 2


def test_resolve_symbol_local_is_one_hop(tmp_path):
    resolver, _ = make_resolver(
        {"user-repo.ts": "export class UserRepo {}\n"}, tmp_path
    )
    resolution = resolver.resolve_symbol("user-repo.ts", "UserRepo")
    assert isinstance(resolution, Internal) and resolution.hops == 1


def test_resolve_symbol_cycle(tmp_path):
    resolver, _ = make_resolver(
        {
            "a.ts": 'export { X } from "./b";\n',
            "b.ts": 'export { X } from "./a";\n',
            "main.ts": 'import { X } from "./a";\n',
        },
        tmp_path,
    )
    assert resolver.resolve_symbol("main.ts", "X") == Unresolved("cycle")


def test_resolve_symbol_external_chain(tmp_path):
    resolver, _ = make_resolver(
        {
            "re.ts": 'export { pad } from "left-pad";\n',
            "main.ts": 'import { pad } from "./re";\n',
        },
        tmp_path,
    )
    assert resolver.resolve_symbol("main.ts", "pad") == External("left-pad")


def test_builtin_resolution(tmp_path):
    from uniast.entities import DependencySite, EntityId
    from uniast.lexer import Span

    resolver, _ = make_resolver({"a.ts": "export function f(x: string) { return x; }\n"}, tmp_path)
    site = DependencySite(
        EntityId.make(resolver.layout.repo_name, "a.ts", "f"),
        "type_ref", "string", Span(0, 0, 1, 1, 1, 1),
    )
    assert resolver.resolve_site(site) == Builtin()


def test_local_declaration_beats_builtin(tmp_path):
    resolver, _ = make_resolver(
        {"a.ts": "export function Promise() { return 1; }\nexport function f() { return Promise(); }\n"},
        tmp_path,
    )
    for site in [s for e in resolver.by_id.values() for s in e.deps]:
        if site.raw_name == "Promise" and site.site_kind == "call":
            resolution = resolver.resolve_site(site)
            assert isinstance(resolution, Internal)
            return
    pytest.fail("no Promise call site found")


def test_method_call_resolution_via_new(tmp_path):
    result = build_index(FIXTURES / "userrepo")
    method = [
        (s, r) for s, r in result.resolutions if s.site_kind == "method_call"
    ]
    assert len(method) == 1
    site, resolution = method[0]
    assert isinstance(resolution, Internal)
    assert resolution.target.render() == "demo#user-repo.ts#UserRepo.getById"


def test_method_call_on_extends_chain():
    result = build_index(FIXTURES / "extends_chain")
    by_raw = {s.raw_name: r for s, r in result.resolutions if s.site_kind == "method_call"}
    assert by_raw["d.run"].target.render() == "extends-chain#base.ts#Base.run"
    assert by_raw["c.ping"].target.render() == "extends-chain#derived.ts#SameFileBase.ping"


def test_method_call_outside_rules_unsupported(tmp_path):
    resolver, _ = make_resolver(
        {"a.ts": "export function f(x) { return x.anything(); }\n"}, tmp_path
    )
    sites = [s for e in resolver.by_id.values() for s in e.deps if s.site_kind == "method_call"]
    assert len(sites) == 1
    assert resolver.resolve_site(sites[0]) == Unresolved("unsupported")


def test_builtin_receiver_method_is_builtin(tmp_path):
    resolver, _ = make_resolver(
        {"a.ts": "export function f() { const m = new Map(); return m.get(1); }\n"}, tmp_path
    )
    sites = [s for e in resolver.by_id.values() for s in e.deps if s.site_kind == "method_call"]
    assert resolver.resolve_site(sites[0]) == Builtin()


def test_star_ambiguity_first_wins_with_warning():
    result = build_index(FIXTURES / "star_ambig")
    shared = [
        r for s, r in result.resolutions if s.raw_name == "shared" and s.site_kind == "call"
    ]
    assert shared[0].target.render() == "star-ambig#alpha.ts#shared"
    assert any("multiple star re-exports" in w for w in result.stats.warnings)


def test_namespace_member_resolution(tmp_path):
    resolver, _ = make_resolver(
        {
            "vals.ts": "export const A = 1;\nexport function go() { return 2; }\n",
            "use.ts": 'import * as vals from "./vals";\nexport function f() { vals.go(); return vals.A; }\n',
        },
        tmp_path,
    )
    sites = [s for e in resolver.by_id.values() for s in e.deps]
    by_key = {(s.site_kind, s.raw_name): resolver.resolve_site(s) for s in sites}
    assert by_key[("method_call", "vals.go")].target.render().endswith("vals.ts#go")
    assert by_key[("import_ref", "vals.A")].target.render().endswith("vals.ts#A")


def test_internal_targets_always_exist():
    for fixture in ["userrepo", "barrels", "star_ambig", "shadowing", "extends_chain", "implements", "misc"]:
        result = build_index(FIXTURES / fixture)
        ids = {e.id for e in result.entities}
        for _, resolution in result.resolutions:
            if isinstance(resolution, Internal):
                assert resolution.target in ids


def test_resolution_idempotent():
    first = build_index(FIXTURES / "barrels")
    second = build_index(FIXTURES / "barrels")
    assert [(s.raw_name, r) for s, r in first.resolutions] == [
        (s.raw_name, r) for s, r in second.resolutions
    ]


def test_hops_bounded_by_file_count():
    for fixture in ["userrepo", "barrels", "star_ambig", "misc"]:
        result = build_index(FIXTURES / fixture)
        n_files = result.stats.files
        for _, resolution in result.resolutions:
            if isinstance(resolution, Internal):
                assert 1 <= resolution.hops <= n_files
