"""Entity extraction and dependency-site collection for one parsed file.

Entities are the function/type/variable nodes of the index. Class methods
become qualified ``Class.method`` function entities so that method calls can
resolve to function-granularity nodes. Dependency sites record every place
an entity calls, constructs, or names something that may live elsewhere;
they are resolved against the whole project in a later phase.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .lexer import Span
from .nodes import (
    ArrowFunction,
    Block,
    Call,
    ClassDecl,
    ControlStmt,
    Declarator,
    EnumDecl,
    ExpressionStatement,
    Expression,
    FunctionDecl,
    Identifier,
    ImportBinding,
    ImportDecl,
    InterfaceDecl,
    Literal,
    MethodMember,
    NameRef,
    New,
    OtherExpr,
    Param,
    PropertyAccess,
    PropertyMember,
    ReturnStmt,
    SourceFileAst,
    ThrowStmt,
    TypeAliasDecl,
    VariableStatement,
)

SITE_CALL = "call"
SITE_METHOD_CALL = "method_call"
SITE_CONSTRUCTOR = "constructor"
SITE_TYPE_REF = "type_ref"
SITE_IMPORT_REF = "import_ref"

KIND_FUNCTION = "function"
KIND_TYPE = "type"
KIND_VARIABLE = "variable"

_WS_RE = re.compile(r"\s+")


def _collapse(text: str) -> str:
    return _WS_RE.sub(" ", text).strip()


@dataclass(frozen=True, slots=True)
class ImportedName:
    """A local name bound by an import, flattened with its module specifier."""

    local_name: str
    imported_name: str  # "default", "*", or the exported name
    specifier: str
    is_type_only: bool


@dataclass(frozen=True, slots=True)
class EntityId:
    """Identity triple; rendered as ``module#package#symbol``."""

    module_path: str
    package_path: str
    symbol_name: str

    @staticmethod
    def make(module_path: str, package_path: str, symbol_name: str) -> "EntityId":
        def clean(part: str) -> str:
            part = part.replace("#", "_")
            return part if part else "_"

        return EntityId(clean(module_path), clean(package_path), clean(symbol_name))

    def render(self) -> str:
        return f"{self.module_path}#{self.package_path}#{self.symbol_name}"

    @staticmethod
    def parse(text: str) -> "EntityId":
        parts = text.split("#")
        if len(parts) != 3 or not all(parts):
            raise ValueError(f"invalid entity id: {text!r}")
        return EntityId(parts[0], parts[1], parts[2])


@dataclass(slots=True)
class DependencySite:
    from_id: EntityId
    site_kind: str
    raw_name: str
    span: Span
    from_implements_clause: bool = False


@dataclass(slots=True)
class DuplicateSymbol:
    name: str
    package_path: str


@dataclass(slots=True)
class Entity:
    id: EntityId
    kind: str  # function | type | variable
    source_text: str
    span: Span
    signature: str
    is_exported: bool
    deps: list[DependencySite] = field(default_factory=list)
    group_anchor: EntityId | None = None
    # internals (not serialized)
    type_flavor: str = ""  # class | interface | alias | enum for kind=type
    extends_refs: list[NameRef] = field(default_factory=list)
    implements_refs: list[NameRef] = field(default_factory=list)
    local_type_env: dict[str, str] = field(default_factory=dict)
    node: object = None
    char_start: int = 0
    char_end: int = 0


def render_signature(node, source: str, declarator: Declarator | None = None, var_kind: str = "", exported: bool = False) -> str:
    """Single-line signature: headers for functions/types, ``const name: T``
    for variables. Internal whitespace collapses to single spaces."""
    if isinstance(node, (FunctionDecl, ClassDecl, InterfaceDecl, TypeAliasDecl, EnumDecl)):
        return _collapse(source[node.char_start:node.header_char_end])
    if isinstance(node, MethodMember):
        return _collapse(source[node.char_start:node.header_char_end])
    if isinstance(node, VariableStatement):
        assert declarator is not None
        prefix = ("export " if exported else "") + var_kind + " "
        if isinstance(declarator.init, ArrowFunction):
            arrow = declarator.init
            return _collapse(prefix + source[declarator.char_start:arrow.header_char_end])
        text = prefix + (declarator.name or "")
        if declarator.type_char_range is not None:
            cs, ce = declarator.type_char_range
            text += source[cs:ce]
        return _collapse(text)
    raise TypeError(f"no signature rule for {type(node).__name__}")


def extract_entities(
    ast: SourceFileAst,
    module_path: str,
    package_path: str,
    diagnostics: list[DuplicateSymbol] | None = None,
) -> list[Entity]:
    """Convert one file's AST into entities. Duplicate top-level names keep
    the first declaration and record a diagnostic."""
    source = ast.source
    entities: list[Entity] = []
    seen: set[str] = set()

    def add(entity: Entity) -> bool:
        if entity.id.symbol_name in seen:
            if diagnostics is not None:
                diagnostics.append(DuplicateSymbol(entity.id.symbol_name, package_path))
            return False
        seen.add(entity.id.symbol_name)
        entities.append(entity)
        return True

    def eid(symbol: str) -> EntityId:
        return EntityId.make(module_path, package_path, symbol)

    for st in ast.statements:
        if isinstance(st, FunctionDecl):
            add(
                Entity(
                    eid(st.name), KIND_FUNCTION,
                    source[st.char_start:st.char_end], st.span,
                    render_signature(st, source), st.is_exported,
                    node=st, char_start=st.char_start, char_end=st.char_end,
                )
            )
        elif isinstance(st, ClassDecl):
            ok = add(
                Entity(
                    eid(st.name), KIND_TYPE,
                    source[st.char_start:st.char_end], st.span,
                    render_signature(st, source), st.is_exported,
                    type_flavor="class",
                    extends_refs=st.extends_refs,
                    implements_refs=st.implements_refs,
                    node=st, char_start=st.char_start, char_end=st.char_end,
                )
            )
            if ok:
                for member in st.members:
                    if isinstance(member, MethodMember) and member.name:
                        add(
                            Entity(
                                eid(f"{st.name}.{member.name}"), KIND_FUNCTION,
                                source[member.char_start:member.char_end], member.span,
                                render_signature(member, source), st.is_exported,
                                node=member, char_start=member.char_start, char_end=member.char_end,
                            )
                        )
        elif isinstance(st, InterfaceDecl):
            add(
                Entity(
                    eid(st.name), KIND_TYPE,
                    source[st.char_start:st.char_end], st.span,
                    render_signature(st, source), st.is_exported,
                    type_flavor="interface",
                    extends_refs=st.extends_refs,
                    node=st, char_start=st.char_start, char_end=st.char_end,
                )
            )
        elif isinstance(st, TypeAliasDecl):
            add(
                Entity(
                    eid(st.name), KIND_TYPE,
                    source[st.char_start:st.char_end], st.span,
                    render_signature(st, source), st.is_exported,
                    type_flavor="alias",
                    node=st, char_start=st.char_start, char_end=st.char_end,
                )
            )
        elif isinstance(st, EnumDecl):
            add(
                Entity(
                    eid(st.name), KIND_TYPE,
                    source[st.char_start:st.char_end], st.span,
                    render_signature(st, source), st.is_exported,
                    type_flavor="enum",
                    node=st, char_start=st.char_start, char_end=st.char_end,
                )
            )
        elif isinstance(st, VariableStatement):
            multi = len(st.declarators) > 1
            anchor: EntityId | None = None
            for decl in st.declarators:
                if not decl.name:
                    continue  # destructuring patterns produce no entities
                is_arrow = st.kind == "const" and isinstance(decl.init, ArrowFunction)
                kind = KIND_FUNCTION if is_arrow else KIND_VARIABLE
                if multi:
                    cs, ce, span = decl.char_start, decl.char_end, decl.span
                else:
                    cs, ce, span = st.char_start, st.char_end, st.span
                entity = Entity(
                    eid(decl.name), kind,
                    source[cs:ce], span,
                    render_signature(st, source, decl, st.kind, st.is_exported),
                    st.is_exported,
                    group_anchor=anchor if multi and anchor is not None else None,
                    node=(st, decl), char_start=cs, char_end=ce,
                )
                if add(entity) and multi and anchor is None:
                    anchor = entity.id
    return entities


# --- dependency-site collection ---------------------------------------------

_HINT_SENTINEL = ""  # bound name with no inferred type


class _SiteWalker:
    """Walks one entity's annotations, initializers, and body, emitting
    dependency sites with lexical-scope shadowing: names bound by parameters
    or local declarations produce no sites."""

    def __init__(
        self,
        entity: Entity,
        source: str,
        imports: dict[str, "ImportedName"],
        type_param_names: set[str],
    ) -> None:
        self.entity = entity
        self.source = source
        self.imports = imports
        self.type_params = type_param_names
        self.scopes: list[dict[str, str]] = []
        self.sites: list[DependencySite] = []
        self.import_uses: set[str] = set()

    # -- scope helpers --

    def _push(self) -> None:
        self.scopes.append({})

    def _pop(self) -> None:
        self.scopes.pop()

    def _bind(self, name: str, type_name: str | None = None) -> None:
        if self.scopes:
            self.scopes[-1][name] = type_name or _HINT_SENTINEL
        if type_name and name not in self.entity.local_type_env:
            self.entity.local_type_env[name] = type_name

    def _bound(self, name: str) -> bool:
        return any(name in scope for scope in self.scopes)

    # -- site emission --

    def _emit(self, site_kind: str, raw: str, span: Span, implements: bool = False) -> None:
        self.sites.append(
            DependencySite(self.entity.id, site_kind, raw, span, implements)
        )

    def _emit_import_use(self, binding_name: str, raw: str, span: Span) -> None:
        """One site per imported name used inside the entity. Uses of
        type-only imports stay type references."""
        if raw in self.import_uses:
            return
        self.import_uses.add(raw)
        binding = self.imports[binding_name]
        kind = SITE_TYPE_REF if binding.is_type_only else SITE_IMPORT_REF
        self._emit(kind, raw, span)

    def _use_name(self, name: str, span: Span) -> None:
        """A bare identifier reference: only imported names produce sites."""
        if self._bound(name):
            return
        if name in self.imports:
            self._emit_import_use(name, name, span)

    # -- type refs --

    def _type_refs(self, refs: list[NameRef]) -> None:
        for ref in refs:
            head = ref.name.split(".", 1)[0]
            if head in self.type_params or self._bound(head):
                continue
            self._emit(SITE_TYPE_REF, ref.name, ref.span)
            if head in self.imports:
                self._emit_import_use(head, ref.name if "." in ref.name and self.imports[head].imported_name == "*" else head, ref.span)

    # -- expressions --

    def _flatten(self, expr: Expression) -> str | None:
        parts: list[str] = []
        node = expr
        while isinstance(node, PropertyAccess):
            parts.append(node.prop)
            node = node.obj
        if isinstance(node, Identifier):
            parts.append(node.name)
            return ".".join(reversed(parts))
        return None

    def walk_expr(self, expr: Expression | None) -> None:
        if expr is None:
            return
        if isinstance(expr, Identifier):
            self._use_name(expr.name, expr.span)
            return
        if isinstance(expr, PropertyAccess):
            base = expr.obj
            while isinstance(base, PropertyAccess):
                base = base.obj
            if isinstance(base, Identifier):
                if not self._bound(base.name) and base.name in self.imports and self.imports[base.name].imported_name == "*":
                    dotted = self._flatten(expr)
                    if dotted is not None:
                        self._emit_import_use(base.name, dotted, expr.span)
                        return
            self.walk_expr(expr.obj)
            return
        if isinstance(expr, Call):
            self._walk_call(expr)
            return
        if isinstance(expr, New):
            self._walk_new(expr)
            return
        if isinstance(expr, Literal):
            for child in expr.children:
                self.walk_expr(child)
            return
        if isinstance(expr, ArrowFunction):
            self._walk_function_like(expr.params, expr.return_type_refs, expr.body_block, expr.body_expr)
            return
        if isinstance(expr, OtherExpr):
            if not expr.opaque:
                self._type_refs(expr.type_refs)
                for child in expr.children:
                    self.walk_expr(child)
            return

    def _walk_call(self, call: Call) -> None:
        callee = call.callee
        if isinstance(callee, Identifier):
            if not self._bound(callee.name):
                self._emit(SITE_CALL, callee.name, call.span)
                if callee.name in self.imports:
                    self._emit_import_use(callee.name, callee.name, callee.span)
        elif isinstance(callee, PropertyAccess):
            dotted = self._flatten(callee)
            if dotted is not None:
                head = dotted.split(".", 1)[0]
                self._emit(SITE_METHOD_CALL, dotted, call.span)
                if not self._bound(head) and head in self.imports:
                    binding = self.imports[head]
                    self._emit_import_use(head, dotted if binding.imported_name == "*" else head, callee.span)
            else:
                raw = _collapse(self.source[callee.char_start:callee.char_end])[:120]
                self._emit(SITE_METHOD_CALL, raw, call.span)
                self.walk_expr(callee.obj)
        else:
            self.walk_expr(callee)
        for arg in call.args:
            self.walk_expr(arg)

    def _walk_new(self, new: New) -> None:
        if new.callee_name is not None:
            head = new.callee_name.split(".", 1)[0]
            if not self._bound(head):
                span = new.callee_name_span or new.span
                self._emit(SITE_CONSTRUCTOR, new.callee_name, span)
                if head in self.imports:
                    binding = self.imports[head]
                    self._emit_import_use(head, new.callee_name if binding.imported_name == "*" else head, span)
        else:
            self.walk_expr(new.callee_expr)
        for arg in new.args:
            self.walk_expr(arg)

    # -- statements and blocks --

    def _walk_function_like(
        self,
        params: list[Param],
        return_refs: list[NameRef],
        body_block: Block | None,
        body_expr: Expression | None,
    ) -> None:
        self._push()
        for param in params:
            type_name = param.type_refs[0].name if param.type_refs else None
            for name in param.bound_names:
                self._bind(name, type_name if name == param.name else None)
        for param in params:
            self._type_refs(param.type_refs)
            if param.default is not None:
                self.walk_expr(param.default)
        self._type_refs(return_refs)
        if body_block is not None:
            self.walk_block(body_block, push=False)
        if body_expr is not None:
            self.walk_expr(body_expr)
        self._pop()

    def walk_block(self, block: Block, push: bool = True) -> None:
        if push:
            self._push()
        for name in block.bound_names:
            self._bind(name)
        for st in block.statements:
            self.walk_statement(st)
        if push:
            self._pop()

    def _declarator_type(self, decl: Declarator) -> str | None:
        if decl.type_refs:
            return decl.type_refs[0].name
        if isinstance(decl.init, New) and decl.init.callee_name:
            return decl.init.callee_name
        return None

    def _walk_variable_statement(self, st: VariableStatement) -> None:
        for decl in st.declarators:
            self._type_refs(decl.type_refs)
            if decl.init is not None:
                self.walk_expr(decl.init)
            type_name = self._declarator_type(decl)
            for name in decl.bound_names:
                self._bind(name, type_name if name == decl.name else None)

    def walk_statement(self, st) -> None:
        if isinstance(st, VariableStatement):
            self._walk_variable_statement(st)
        elif isinstance(st, ExpressionStatement):
            self.walk_expr(st.expr)
        elif isinstance(st, ReturnStmt):
            self.walk_expr(st.expr)
        elif isinstance(st, ThrowStmt):
            self.walk_expr(st.expr)
        elif isinstance(st, ControlStmt):
            self._push()
            if st.header_decl is not None:
                self._walk_variable_statement(st.header_decl)
            for expr in st.header_exprs:
                self.walk_expr(expr)
            for block in st.blocks:
                self.walk_block(block)
            self._pop()
        elif isinstance(st, Block):
            self.walk_block(st)
        elif isinstance(st, FunctionDecl):
            if st.name:
                self._bind(st.name)
            self._walk_function_like(st.params, st.return_type_refs, st.body, None)
        elif isinstance(st, ClassDecl):
            if st.name:
                self._bind(st.name)
            self._type_refs(st.extends_refs)
            self._type_refs(st.implements_refs)
            for member in st.members:
                if isinstance(member, MethodMember):
                    self._walk_function_like(member.params, member.return_type_refs, member.body, None)
                elif isinstance(member, PropertyMember):
                    self._type_refs(member.type_refs)
                    self.walk_expr(member.init)
        elif isinstance(st, TypeAliasDecl):
            if st.name:
                self._bind(st.name)
            self._type_refs(st.type_refs)
        elif isinstance(st, EnumDecl):
            if st.name:
                self._bind(st.name)
            for member in st.members:
                self.walk_expr(member.init)
        # imports/exports/Other/Error statements contribute nothing here


def file_imports(ast: SourceFileAst) -> dict[str, ImportedName]:
    """Map local name -> import record for one file (first binding wins)."""
    imports: dict[str, ImportedName] = {}
    for st in ast.statements:
        if isinstance(st, ImportDecl):
            for binding in st.bindings:
                imports.setdefault(
                    binding.local_name,
                    ImportedName(binding.local_name, binding.imported_name, st.specifier, binding.is_type_only),
                )
    return imports


def file_type_env(ast: SourceFileAst) -> dict[str, str]:
    """Top-level variable types from the two inference rules."""
    env: dict[str, str] = {}
    for st in ast.statements:
        if isinstance(st, VariableStatement):
            for decl in st.declarators:
                if not decl.name or decl.name in env:
                    continue
                if decl.type_refs:
                    env[decl.name] = decl.type_refs[0].name
                elif isinstance(decl.init, New) and decl.init.callee_name:
                    env[decl.name] = decl.init.callee_name
    return env


def collect_dependency_sites(ast: SourceFileAst, entities: list[Entity]) -> list[DependencySite]:
    """Emit dependency sites for every entity of the file and attach them to
    ``entity.deps``. Shadowed names yield no sites; builtins are filtered at
    resolution time, not here."""
    imports = file_imports(ast)
    all_sites: list[DependencySite] = []

    for entity in entities:
        node = entity.node
        type_params: set[str] = set()
        decl_node = node[0] if isinstance(node, tuple) else node
        if hasattr(decl_node, "type_param_names"):
            type_params = set(decl_node.type_param_names)
        walker = _SiteWalker(entity, ast.source, imports, type_params)

        if isinstance(node, FunctionDecl):
            walker._walk_function_like(node.params, node.return_type_refs, node.body, None)
        elif isinstance(node, MethodMember):
            walker._walk_function_like(node.params, node.return_type_refs, node.body, None)
        elif isinstance(node, ClassDecl):
            walker._type_refs(node.extends_refs)
            for ref in node.implements_refs:
                head = ref.name.split(".", 1)[0]
                if head in type_params:
                    continue
                walker._emit(SITE_TYPE_REF, ref.name, ref.span, implements=True)
                if head in imports:
                    walker._emit_import_use(head, ref.name if imports[head].imported_name == "*" else head, ref.span)
            for member in node.members:
                if isinstance(member, PropertyMember):
                    walker._type_refs(member.type_refs)
                    walker.walk_expr(member.init)
        elif isinstance(node, InterfaceDecl):
            walker._type_refs(node.extends_refs)
            walker._type_refs(node.member_type_refs)
        elif isinstance(node, TypeAliasDecl):
            walker._type_refs(node.type_refs)
        elif isinstance(node, EnumDecl):
            for member in node.members:
                walker.walk_expr(member.init)
        elif isinstance(node, tuple):  # (VariableStatement, Declarator)
            st, decl = node
            walker._type_refs(decl.type_refs)
            if isinstance(decl.init, ArrowFunction):
                arrow = decl.init
                walker._walk_function_like(arrow.params, arrow.return_type_refs, arrow.body_block, arrow.body_expr)
            elif decl.init is not None:
                walker.walk_expr(decl.init)

        entity.deps = walker.sites
        all_sites.extend(walker.sites)
    return all_sites
