"""Parser unit tests: subset grammar, error recovery, ASI, totality."""

from __future__ import annotations

import dataclasses

import hypothesis.strategies as st
from hypothesis import given, settings

from uniast.lexer import Span
from uniast.nodes import (
    ArrowFunction,
    Call,
    ClassDecl,
    ErrorMember,
    ErrorNode,
    ExportNamedDecl,
    ExportStarDecl,
    ExpressionStatement,
    FunctionDecl,
    Identifier,
    ImportDecl,
    InterfaceDecl,
    Literal,
    MethodMember,
    New,
    OtherExpr,
    OtherStatement,
    PropertyAccess,
    SourceFileAst,
    VariableStatement,
)
from uniast.parser import parse_file

SERVICE_TS = """import { Repo } from "./index";
export function loadUser(id: string) {
  const repo = new Repo();
  return repo.getById(id);
}
"""


def iter_spanned_children(obj):
    """Yield all nested objects that carry a ``span`` attribute."""
    for f in dataclasses.fields(obj):
        value = getattr(obj, f.name)
        items = value if isinstance(value, list) else [value]
        for item in items:
            if item is None or isinstance(item, (str, int, bool, Span)):
                continue
            if hasattr(item, "span"):
                yield item


def walk_spanned(obj):
    for child in iter_spanned_children(obj):
        yield child
        yield from walk_spanned(child)


def assert_span_nesting(node):
    for child in iter_spanned_children(node):
        if hasattr(node, "span"):
            assert node.span.contains(child.span), (
                f"{type(child).__name__} span {child.span} escapes "
                f"{type(node).__name__} span {node.span}"
            )
        assert_span_nesting(child)


def count_recovery_nodes(ast: SourceFileAst) -> int:
    count = 0
    for st_ in ast.statements:
        if isinstance(st_, ErrorNode):
            count += 1
        for node in walk_spanned(st_):
            if isinstance(node, (ErrorNode, ErrorMember)):
                count += 1
            elif isinstance(node, OtherStatement) and node.from_error:
                count += 1
    for st_ in ast.statements:
        if isinstance(st_, OtherStatement) and st_.from_error:
            count += 1
    return count


def test_service_file_shape():
    ast = parse_file("service.ts", SERVICE_TS)
    assert len(ast.statements) == 2
    assert ast.errors == []
    imp, fn = ast.statements
    assert isinstance(imp, ImportDecl)
    assert [(b.local_name, b.imported_name) for b in imp.bindings] == [("Repo", "Repo")]
    assert imp.specifier == "./index"
    assert isinstance(fn, FunctionDecl)
    assert fn.name == "loadUser"
    assert fn.is_exported
    assert [p.name for p in fn.params] == ["id"]
    assert [r.name for p in fn.params for r in p.type_refs] == ["string"]


def test_empty_file():
    ast = parse_file("empty.ts", "")
    assert ast.statements == []
    assert ast.errors == []


def test_error_recovery_resyncs_at_statement_keyword():
    ast = parse_file("b.ts", "function f( {\nexport const k = 1;")
    kinds = [type(s).__name__ for s in ast.statements]
    assert kinds == ["ErrorNode", "VariableStatement"]
    assert len(ast.errors) == 1
    var = ast.statements[1]
    assert var.declarators[0].name == "k"
    assert var.is_exported


def test_error_recovery_consumes_top_level_close_brace():
    ast = parse_file("c.ts", ") }\nconst ok = 1;")
    assert isinstance(ast.statements[0], ErrorNode)
    assert isinstance(ast.statements[-1], VariableStatement)
    assert len(ast.errors) >= 1


def test_reexport_and_star_export():
    ast = parse_file("index.ts", 'export { UserRepo as Repo } from "./user-repo";\nexport * from "./other";')
    named, star = ast.statements
    assert isinstance(named, ExportNamedDecl)
    assert [(b.exported_name, b.local_name) for b in named.names] == [("Repo", "UserRepo")]
    assert named.from_specifier == "./user-repo"
    assert isinstance(star, ExportStarDecl)
    assert star.from_specifier == "./other"
    assert star.alias is None


def test_import_forms():
    src = (
        'import Default from "./a";\n'
        'import * as ns from "./b";\n'
        'import Default2, { x, y as z } from "./c";\n'
        'import type { T } from "./d";\n'
        'import "./side-effect";\n'
    )
    ast = parse_file("imports.ts", src)
    assert ast.errors == []
    decls = [s for s in ast.statements if isinstance(s, ImportDecl)]
    assert len(decls) == 5
    assert decls[0].bindings[0].imported_name == "default"
    assert decls[1].bindings[0].local_name == "ns"
    assert decls[1].bindings[0].imported_name == "*"
    assert [(b.local_name, b.imported_name) for b in decls[2].bindings] == [
        ("Default2", "default"), ("x", "x"), ("z", "y"),
    ]
    assert decls[3].is_type_only and decls[3].bindings[0].is_type_only
    assert decls[4].bindings == []


def test_class_with_heritage_and_members():
    src = (
        "export class Svc extends Base implements Api {\n"
        "  count: number = start();\n"
        "  run(x: Widget): Result { return x.go(); }\n"
        "  static make() { return new Svc(); }\n"
        "}\n"
    )
    ast = parse_file("svc.ts", src)
    cls = ast.statements[0]
    assert isinstance(cls, ClassDecl)
    assert [r.name for r in cls.extends_refs] == ["Base"]
    assert [r.name for r in cls.implements_refs] == ["Api"]
    methods = [m for m in cls.members if isinstance(m, MethodMember)]
    assert [m.name for m in methods] == ["run", "make"]
    assert methods[1].is_static
    assert ast.errors == []


def test_asi_statement_separation():
    src = "const a = 1\nconst b = 2\nreturn_like()\n"
    ast = parse_file("asi.ts", src)
    assert [type(s).__name__ for s in ast.statements] == [
        "VariableStatement", "VariableStatement", "ExpressionStatement",
    ]
    assert ast.errors == []


def test_asi_call_continues_across_newline():
    src = "const x = f\n(1)\n"
    ast = parse_file("asi2.ts", src)
    # `(` can continue the expression, so this is one statement
    assert len(ast.statements) == 1
    assert ast.errors == []


def test_multiline_template_with_holes():
    src = "const t = `a ${getName(user)} b ${x + 1} c`;\n"
    ast = parse_file("tpl.ts", src)
    decl = ast.statements[0].declarators[0]
    assert isinstance(decl.init, Literal)
    assert len(decl.init.children) == 2
    call = decl.init.children[0]
    assert isinstance(call, Call)
    assert isinstance(call.callee, Identifier) and call.callee.name == "getName"
    # hole spans nest inside the template literal span
    assert decl.init.span.contains(call.span)


def test_arrow_forms():
    src = (
        "const f = (a: Widget, b = 2): Result => { return g(a); };\n"
        "const h = x => x * 2;\n"
        "const k = async () => run();\n"
    )
    ast = parse_file("arrows.ts", src)
    assert ast.errors == []
    inits = [s.declarators[0].init for s in ast.statements]
    assert all(isinstance(i, ArrowFunction) for i in inits)
    assert [p.name for p in inits[0].params] == ["a", "b"]
    assert [r.name for r in inits[0].params[0].type_refs] == ["Widget"]
    assert [r.name for r in inits[0].return_type_refs] == ["Result"]


def test_new_with_dotted_callee():
    ast = parse_file("n.ts", "const a = new ns.Thing(1);")
    init = ast.statements[0].declarators[0].init
    assert isinstance(init, New)
    assert init.callee_name == "ns.Thing"


def test_property_chain():
    ast = parse_file("p.ts", "a.b.c(arg);")
    expr = ast.statements[0].expr
    assert isinstance(expr, Call)
    assert isinstance(expr.callee, PropertyAccess)
    assert expr.callee.prop == "c"


def test_declare_and_namespace_are_balanced_regions():
    src = 'declare module "foo" { const x: number; }\nnamespace NS { const q = 1; }\ndeclare const g: number;\n'
    ast = parse_file("d.ts", src)
    assert [type(s).__name__ for s in ast.statements] == ["OtherStatement"] * 3
    assert ast.errors == []


def test_statement_spans_non_overlapping_and_ordered():
    ast = parse_file("s.ts", SERVICE_TS)
    spans = [s.span for s in ast.statements]
    for before, after in zip(spans, spans[1:]):
        assert before.byte_end <= after.byte_start


def test_span_nesting_on_rich_file():
    src = (
        SERVICE_TS
        + "export class C extends B implements I { p: T = init(); m(a: A) { return this.p; } }\n"
        + "const t = `x ${deep(call(1))} y`;\n"
        + "export const m1 = 1, m2 = two();\n"
    )
    ast = parse_file("rich.ts", src)
    file_span = Span(0, 10**9, 1, 1, 10**9, 10**9)
    for s in ast.statements:
        assert file_span.contains(s.span)
        assert_span_nesting(s)


def test_errors_iff_recovery_nodes():
    cases = [
        "",
        SERVICE_TS,
        "function f( {\nexport const k = 1;",
        "class X { 12 + }",
        "const = ;",
        ") ( ] [",
        "export function ok() { return 1; }",
    ]
    for src in cases:
        ast = parse_file("t.ts", src)
        assert (len(ast.errors) == 0) == (count_recovery_nodes(ast) == 0), repr(src)


def test_deterministic_reparse():
    src = SERVICE_TS + "const weird = `${a}` + [1,2].map(x => x);"
    assert parse_file("t.ts", src) == parse_file("t.ts", src)


def test_deep_nesting_is_total():
    parse_file("deep.ts", "(" * 4000 + ")" * 4000 + ";")
    parse_file("deep2.ts", "const x = " + "[" * 2000 + "]" * 2000 + ";")
    parse_file("deep3.ts", "function f() {" * 400 + "}" * 400)


@given(st.text(max_size=300))
@settings(max_examples=400, deadline=None)
def test_parse_totality_fuzz(source):
    ast = parse_file("fuzz.ts", source)
    assert isinstance(ast.statements, list)
    assert (len(ast.errors) == 0) == (count_recovery_nodes(ast) == 0)
    for s in ast.statements:
        assert_span_nesting(s)


@given(
    st.lists(
        st.sampled_from(
            [
                "export", "import", "function", "class", "const", "let",
                "interface", "enum", "type", "{", "}", "(", ")", "=>", "=",
                ";", ",", "x", "y", "name", '"./mod"', "new", "return",
                "extends", "implements", "from", "as", "*", ":", "string",
                "1", "`t${", "}`", ".", "...", "@", "async", "<", ">",
            ]
        ),
        max_size=25,
    )
)
@settings(max_examples=400, deadline=None)
def test_parse_totality_token_soup(parts):
    source = " ".join(parts)
    ast = parse_file("soup.ts", source)
    assert isinstance(ast.statements, list)
    assert (len(ast.errors) == 0) == (count_recovery_nodes(ast) == 0)


@given(st.text(max_size=200))
@settings(max_examples=150, deadline=None)
def test_parse_determinism_fuzz(source):
    assert parse_file("a.ts", source) == parse_file("a.ts", source)
