"""AST node definitions for parsed source files.

Nodes carry a byte-oriented ``Span`` (for the serialized index) plus char
offsets into the decoded source text (for slicing). The statement and
expression inventories are intentionally small: constructs outside the
supported subset are absorbed into ``OtherStatement`` / ``OtherExpr``
regions whose spans stay correct, so parsing is always total.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .lexer import Span


@dataclass(slots=True)
class NameRef:
    """An identifier (possibly dotted, e.g. ``ns.Thing``) with its location."""

    name: str
    span: Span
    char_start: int
    char_end: int


@dataclass(slots=True)
class Node:
    span: Span
    char_start: int
    char_end: int


# --- expressions -----------------------------------------------------------


@dataclass(slots=True)
class Identifier(Node):
    name: str


@dataclass(slots=True)
class PropertyAccess(Node):
    obj: "Expression"
    prop: str


@dataclass(slots=True)
class Call(Node):
    callee: "Expression"
    args: list["Expression"]


@dataclass(slots=True)
class New(Node):
    # Dotted callee name when the callee is a plain (possibly qualified)
    # identifier; None for computed callees, which live in ``callee_expr``.
    callee_name: str | None
    callee_name_span: Span | None
    callee_expr: "Expression | None"
    args: list["Expression"]


@dataclass(slots=True)
class Literal(Node):
    # Template literals keep their substitution expressions as children.
    children: list["Expression"] = field(default_factory=list)


@dataclass(slots=True)
class Param:
    name: str | None  # None for destructuring patterns
    bound_names: list[str]
    type_refs: list[NameRef]
    default: "Expression | None"
    span: Span
    char_start: int
    char_end: int


@dataclass(slots=True)
class ArrowFunction(Node):
    params: list[Param]
    return_type_refs: list[NameRef]
    body_block: "Block | None"  # brace-bodied form
    body_expr: "Expression | None"  # concise form
    header_char_end: int = 0  # end of params + return annotation


@dataclass(slots=True)
class OtherExpr(Node):
    """Catch-all expression: operator chains, literals with parts, or opaque
    out-of-grammar regions. Opaque regions have no children and yield no
    dependency sites."""

    children: list["Expression"] = field(default_factory=list)
    type_refs: list[NameRef] = field(default_factory=list)  # e.g. `x as T`
    opaque: bool = False


Expression = Identifier | PropertyAccess | Call | New | Literal | ArrowFunction | OtherExpr


# --- statements ------------------------------------------------------------


@dataclass(slots=True)
class ImportBinding:
    local_name: str
    imported_name: str  # "default", "*", or the exported name
    is_type_only: bool


@dataclass(slots=True)
class ImportDecl(Node):
    bindings: list[ImportBinding]
    specifier: str
    is_type_only: bool


@dataclass(slots=True)
class ExportBinding:
    exported_name: str
    local_name: str  # name at the source side (local or re-exported original)


@dataclass(slots=True)
class ExportNamedDecl(Node):
    names: list[ExportBinding]
    from_specifier: str | None  # None when exporting local bindings
    is_type_only: bool


@dataclass(slots=True)
class ExportStarDecl(Node):
    from_specifier: str
    alias: str | None  # `export * as ns from ...`


@dataclass(slots=True)
class ExportDefaultExpr(Node):
    local_name: str | None  # set when the exported expression is a bare identifier
    expr: Expression | None


@dataclass(slots=True)
class Block(Node):
    statements: list["Statement"]
    bound_names: list[str] = field(default_factory=list)  # params / catch bindings


@dataclass(slots=True)
class Declarator:
    name: str | None  # None for destructuring patterns
    bound_names: list[str]
    type_refs: list[NameRef]
    init: Expression | None
    span: Span
    char_start: int
    char_end: int
    type_char_range: tuple[int, int] | None = None  # the ": T" annotation slice


@dataclass(slots=True)
class VariableStatement(Node):
    kind: str  # const | let | var
    declarators: list[Declarator]
    is_exported: bool


@dataclass(slots=True)
class FunctionDecl(Node):
    name: str
    params: list[Param]
    return_type_refs: list[NameRef]
    body: Block | None
    is_exported: bool
    is_default_export: bool
    type_param_names: list[str]
    header_char_end: int  # end of the header (params + return annotation)


@dataclass(slots=True)
class MethodMember:
    name: str
    params: list[Param]
    return_type_refs: list[NameRef]
    body: Block | None
    is_static: bool
    span: Span
    char_start: int
    char_end: int
    header_char_end: int


@dataclass(slots=True)
class PropertyMember:
    name: str
    type_refs: list[NameRef]
    init: Expression | None
    span: Span
    char_start: int
    char_end: int


@dataclass(slots=True)
class ErrorMember:
    span: Span
    char_start: int
    char_end: int


ClassMember = MethodMember | PropertyMember | ErrorMember


@dataclass(slots=True)
class ClassDecl(Node):
    name: str
    extends_refs: list[NameRef]
    implements_refs: list[NameRef]
    members: list[ClassMember]
    is_exported: bool
    is_default_export: bool
    type_param_names: list[str]
    header_char_end: int


@dataclass(slots=True)
class InterfaceDecl(Node):
    name: str
    extends_refs: list[NameRef]
    member_type_refs: list[NameRef]
    is_exported: bool
    type_param_names: list[str]
    header_char_end: int


@dataclass(slots=True)
class TypeAliasDecl(Node):
    name: str
    type_refs: list[NameRef]
    is_exported: bool
    type_param_names: list[str]
    header_char_end: int


@dataclass(slots=True)
class EnumMember:
    name: str
    init: Expression | None


@dataclass(slots=True)
class EnumDecl(Node):
    name: str
    members: list[EnumMember]
    is_exported: bool
    header_char_end: int


@dataclass(slots=True)
class ExpressionStatement(Node):
    expr: Expression


@dataclass(slots=True)
class ReturnStmt(Node):
    expr: Expression | None


@dataclass(slots=True)
class ThrowStmt(Node):
    expr: Expression


@dataclass(slots=True)
class ControlStmt(Node):
    """if/while/for/do/switch/try in one shape: header expressions and
    declarations plus nested blocks, which is all site collection needs."""

    keyword: str
    header_decl: VariableStatement | None
    header_exprs: list[Expression]
    blocks: list[Block]


@dataclass(slots=True)
class OtherStatement(Node):
    """Balanced region for constructs outside the grammar (``declare``,
    ``namespace``, labels, ...). ``from_error`` marks recovery regions."""

    from_error: bool = False


@dataclass(slots=True)
class ErrorNode(Node):
    message: str


Statement = (
    ImportDecl
    | ExportNamedDecl
    | ExportStarDecl
    | ExportDefaultExpr
    | FunctionDecl
    | ClassDecl
    | InterfaceDecl
    | TypeAliasDecl
    | EnumDecl
    | VariableStatement
    | ExpressionStatement
    | ReturnStmt
    | ThrowStmt
    | ControlStmt
    | Block
    | OtherStatement
    | ErrorNode
)


@dataclass(slots=True)
class SourceFileAst:
    """Parse result of one file: ordered statements plus recovery errors."""

    path: str
    statements: list[Statement]
    errors: list[tuple[Span, str]]
    source: str
