"""Recursive-descent parser with error recovery for the supported subset.

Parsing is total: syntax errors produce an ``ErrorNode`` (or an error-flagged
region inside a declaration), a recorded diagnostic, and resynchronization at
the next statement-start keyword or top-level closing brace. Constructs
outside the grammar are consumed as balanced-token regions so that spans and
source text stay correct.

A newline ends a statement when the next token cannot continue it (automatic
semicolon insertion); explicit semicolons are optional throughout.
"""

from __future__ import annotations

from .lexer import Span, Token, TokenKind, TRIVIA_KINDS, tokenize
from .nodes import (
    ArrowFunction,
    Block,
    Call,
    ClassDecl,
    ControlStmt,
    Declarator,
    EnumDecl,
    EnumMember,
    ErrorMember,
    ErrorNode,
    ExportBinding,
    ExportDefaultExpr,
    ExportNamedDecl,
    ExportStarDecl,
    Expression,
    ExpressionStatement,
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
    OtherStatement,
    Param,
    PropertyAccess,
    PropertyMember,
    ReturnStmt,
    SourceFileAst,
    Statement,
    ThrowStmt,
    TypeAliasDecl,
    VariableStatement,
)

_STMT_START_WORDS = frozenset(
    {
        "import", "export", "function", "class", "interface", "type", "enum",
        "const", "let", "var", "async", "declare", "namespace", "module",
    }
)

_MODIFIER_WORDS = frozenset(
    {
        "static", "async", "public", "private", "protected", "readonly",
        "abstract", "declare", "override", "accessor", "get", "set",
    }
)

_BINARY_OPS = frozenset(
    {
        "+", "-", "*", "/", "%", "**", "==", "!=", "===", "!==", "<", ">",
        "<=", ">=", "&&", "||", "??", "&", "|", "^", "<<", ">>", ">>>",
    }
)

_ASSIGN_OPS = frozenset(
    {
        "=", "+=", "-=", "*=", "/=", "%=", "**=", "<<=", ">>=", ">>>=",
        "&&=", "||=", "??=", "&=", "|=", "^=",
    }
)

_WORDY = (TokenKind.IDENTIFIER, TokenKind.KEYWORD)

_MAX_DEPTH = 120


class _ParseFailure(Exception):
    def __init__(self, message: str) -> None:
        super().__init__(message)
        self.message = message


def _nl_flags(raw_tokens: list[Token]) -> tuple[list[Token], list[bool]]:
    """Split trivia out, recording which significant tokens follow a line break."""
    sig: list[Token] = []
    flags: list[bool] = []
    pending = False
    for t in raw_tokens:
        if t.kind is TokenKind.NEWLINE:
            pending = True
        elif t.kind is TokenKind.COMMENT:
            if t.end_line > t.start_line:
                pending = True
        elif t.kind is TokenKind.WHITESPACE:
            pass
        else:
            sig.append(t)
            flags.append(pending)
            pending = False
    return sig, flags


def _eof_token(source: str, sig: list[Token]) -> Token:
    if sig:
        last = sig[-1]
        return Token(
            TokenKind.EOF, "", last.byte_end, last.byte_end,
            last.char_end, last.char_end,
            last.end_line, last.end_col, last.end_line, last.end_col,
        )
    nbytes = len(source) if source.isascii() else len(source.encode("utf-8"))
    nlines = 1 + sum(source.count(c) for c in "\n  ") + source.count("\r") - source.count("\r\n")
    return Token(TokenKind.EOF, "", nbytes, nbytes, len(source), len(source), nlines, 1, nlines, 1)


class Parser:
    def __init__(
        self,
        path: str,
        source: str,
        tokens: list[Token] | None = None,
        nl_before: list[bool] | None = None,
        errors: list[tuple[Span, str]] | None = None,
    ) -> None:
        self.path = path
        self.source = source
        if tokens is None:
            sig, flags = _nl_flags(tokenize(source))
        else:
            sig, flags = tokens, list(nl_before or [False] * len(tokens))
        self.toks = sig + [_eof_token(source, sig)]
        self.nl = flags + [True]
        self.pos = 0
        self.errors: list[tuple[Span, str]] = errors if errors is not None else []
        self.depth = 0

    # -- token access --------------------------------------------------

    def _cur(self) -> Token:
        return self.toks[self.pos]

    def _peek(self, offset: int = 1) -> Token:
        idx = self.pos + offset
        return self.toks[idx] if idx < len(self.toks) else self.toks[-1]

    def _at_eof(self) -> bool:
        return self._cur().kind is TokenKind.EOF

    def _at(self, lexeme: str) -> bool:
        return self._cur().lexeme == lexeme

    def _at_word(self, lexeme: str) -> bool:
        t = self._cur()
        return t.kind in _WORDY and t.lexeme == lexeme

    def _advance(self) -> Token:
        t = self.toks[self.pos]
        if self.pos < len(self.toks) - 1:
            self.pos += 1
        return t

    def _expect(self, lexeme: str) -> Token:
        if self._at(lexeme):
            return self._advance()
        t = self._cur()
        raise _ParseFailure(f"expected {lexeme!r}, found {t.lexeme!r}")

    def _expect_word(self) -> Token:
        t = self._cur()
        if t.kind in _WORDY:
            return self._advance()
        raise _ParseFailure(f"expected a name, found {t.lexeme!r}")

    def _nl_before_cur(self) -> bool:
        return self.nl[self.pos] if self.pos < len(self.nl) else True

    # -- spans ----------------------------------------------------------

    def _span(self, start: Token, end: Token) -> tuple[Span, int, int]:
        if end.char_end < start.char_start:
            end = start
        span = Span(
            start.byte_start, end.byte_end,
            start.start_line, start.start_col,
            end.end_line, end.end_col,
        )
        return span, start.char_start, end.char_end

    def _prev(self) -> Token:
        return self.toks[self.pos - 1] if self.pos > 0 else self.toks[0]

    def _record_error(self, span: Span, message: str) -> None:
        self.errors.append((span, message))

    # -- statement termination (ASI) -------------------------------------

    def _end_statement(self) -> Token | None:
        """Consume the statement terminator. Returns the ``;`` token if present."""
        if self._at(";"):
            return self._advance()
        if self._at_eof() or self._at("}") or self._nl_before_cur():
            return None
        raise _ParseFailure(f"expected end of statement before {self._cur().lexeme!r}")

    # -- balanced-region helpers -----------------------------------------

    def _consume_balanced_region(self, stop: frozenset[str], consume_stop: bool) -> Token:
        """Consume tokens, respecting (){}[] nesting, until a stop lexeme at
        relative depth zero or EOF. Returns the last consumed token."""
        depth = 0
        last = self._cur()
        while not self._at_eof():
            t = self._cur()
            if depth == 0 and t.lexeme in stop:
                if consume_stop:
                    last = self._advance()
                return last
            if t.lexeme in "([{":
                depth += 1
            elif t.lexeme in ")]}":
                if depth == 0:
                    return last
                depth -= 1
            last = self._advance()
        return last

    def _consume_matching(self, open_lexeme: str) -> Token:
        """Consume from the current opener through its matching closer."""
        pairs = {"(": ")", "[": "]", "{": "}"}
        close = pairs[open_lexeme]
        depth = 0
        last = self._cur()
        while not self._at_eof():
            t = self._advance()
            last = t
            if t.lexeme in pairs:
                depth += 1
            elif t.lexeme in (")", "]", "}"):
                depth -= 1
                if depth == 0 and t.lexeme == close:
                    return last
                if depth < 0:
                    return last
        return last

    def _consume_pattern(self) -> Token:
        """Consume a destructuring pattern from its opener. Unlike
        ``_consume_matching`` this refuses to run past an unbalanced region,
        so a broken pattern fails fast and statement recovery can resync."""
        depth = 0
        i = self.pos
        end = -1
        while i < len(self.toks) - 1:
            lex = self.toks[i].lexeme
            if lex in "([{":
                depth += 1
            elif lex in ")]}":
                depth -= 1
                if depth <= 0:
                    end = i
                    break
            i += 1
        if end < 0:
            raise _ParseFailure("unterminated destructuring pattern")
        self.pos = end + 1
        return self.toks[end]

    # =====================================================================
    # top level
    # =====================================================================

    def parse(self) -> SourceFileAst:
        statements: list[Statement] = []
        while not self._at_eof():
            start_pos = self.pos
            try:
                st = self._parse_statement()
            except _ParseFailure as failure:
                st = self._recover(start_pos, failure.message)
            if self.pos == start_pos:  # guarantee progress
                st = self._recover(start_pos, f"unexpected token {self._cur().lexeme!r}")
            statements.append(st)
        return SourceFileAst(self.path, statements, self.errors, self.source)

    def _recover(self, start_pos: int, message: str) -> ErrorNode:
        self.pos = max(self.pos, start_pos)
        if self.pos == start_pos and not self._at_eof():
            self._advance()
        depth = 0
        while not self._at_eof():
            t = self._cur()
            if t.kind in _WORDY and t.lexeme in _STMT_START_WORDS:
                break
            if t.lexeme == "{":
                depth += 1
            elif t.lexeme == "}":
                self._advance()
                if depth == 0:
                    break
                depth -= 1
                continue
            self._advance()
        start_tok = self.toks[min(start_pos, len(self.toks) - 1)]
        span, cs, ce = self._span(start_tok, self._prev())
        self._record_error(span, message)
        return ErrorNode(span, cs, ce, message)

    def _parse_statement(self) -> Statement:
        t = self._cur()
        lex = t.lexeme

        if t.lexeme == "@":
            return self._parse_decorated()
        if t.kind is TokenKind.KEYWORD:
            if lex == "import":
                return self._parse_import()
            if lex == "export":
                return self._parse_export()
            if lex == "function":
                return self._parse_function(t, False, False)
            if lex == "class":
                return self._parse_class(t, False, False)
            if lex == "interface":
                return self._parse_interface(t, False)
            if lex == "enum":
                return self._parse_enum(t, False)
            if lex == "const" and self._peek().lexeme == "enum":
                self._advance()
                return self._parse_enum(t, False)
            if lex in ("const", "let", "var"):
                return self._parse_variable_statement(t, False)
        elif t.kind is TokenKind.IDENTIFIER:
            if lex == "type" and self._peek().kind in _WORDY and self._peek(2).lexeme in ("=", "<"):
                return self._parse_type_alias(t, False)
            if lex == "async" and self._peek().lexeme == "function":
                self._advance()
                return self._parse_function(t, False, False)
            if lex == "abstract" and self._peek().lexeme == "class":
                self._advance()
                return self._parse_class(t, False, False)
            if lex in ("declare", "namespace", "module") and self._peek().kind in _WORDY + (TokenKind.STRING,):
                return self._parse_other_region(t)

        return self._parse_block_statement()

    def _parse_decorated(self) -> Statement:
        start = self._cur()
        while self._at("@"):
            self._advance()
            if self._cur().kind in _WORDY:
                self._advance()
                while self._at(".") and self._peek().kind in _WORDY:
                    self._advance()
                    self._advance()
            if self._at("("):
                self._consume_matching("(")
        inner = self._parse_statement()
        span, _, ce = self._span(start, self._prev())
        inner.span = Span(
            start.byte_start, inner.span.byte_end,
            start.start_line, start.start_col,
            inner.span.end_line, inner.span.end_col,
        )
        inner.char_start = start.char_start
        return inner

    def _parse_other_region(self, start: Token) -> OtherStatement:
        """Consume an out-of-grammar statement (declare/namespace/...) as a
        balanced region ending at ``;``, a top-level block, or a line break."""
        if self._cur() is start:
            self._advance()
        while not self._at_eof():
            t = self._cur()
            if t.lexeme == ";":
                self._advance()
                break
            if t.lexeme == "{":
                self._consume_matching("{")
                break
            if t.lexeme == "}":
                break
            if self._nl_before_cur():
                prev = self._prev()
                # stop at a newline unless the previous token obviously continues
                if prev.lexeme not in (".", ",", "=", "(", "[", "<"):
                    break
            self._advance()
        span, cs, ce = self._span(start, self._prev())
        return OtherStatement(span, cs, ce)

    # -- imports / exports ------------------------------------------------

    def _string_value(self, tok: Token) -> str:
        lex = tok.lexeme
        if len(lex) >= 2 and lex[-1] == lex[0]:
            return lex[1:-1]
        return lex[1:]

    def _parse_import(self) -> Statement:
        start = self._expect("import")
        if self._at("("):  # dynamic import expression at statement position
            self.pos -= 1
            expr = self._parse_expression()
            self._end_statement()
            span, cs, ce = self._span(start, self._prev())
            return ExpressionStatement(span, cs, ce, expr)
        bindings: list[ImportBinding] = []
        is_type_only = False

        if self._cur().kind is TokenKind.STRING:
            spec_tok = self._advance()
            self._end_statement()
            span, cs, ce = self._span(start, self._prev())
            return ImportDecl(span, cs, ce, [], self._string_value(spec_tok), False)

        if self._at_word("type") and self._peek().lexeme != "from" and self._peek().lexeme != ",":
            nxt = self._peek()
            if nxt.lexeme in ("{", "*") or nxt.kind in _WORDY:
                is_type_only = True
                self._advance()

        if self._cur().kind in _WORDY and not self._at("{"):
            name = self._advance().lexeme
            bindings.append(ImportBinding(name, "default", is_type_only))
            if self._at(","):
                self._advance()

        if self._at("*"):
            self._advance()
            if not self._at_word("as"):
                raise _ParseFailure("expected 'as' after '*' in import")
            self._advance()
            local = self._expect_word().lexeme
            bindings.append(ImportBinding(local, "*", is_type_only))
        elif self._at("{"):
            self._advance()
            while not self._at("}") and not self._at_eof():
                entry_type_only = is_type_only
                if self._at_word("type") and self._peek().kind in _WORDY and self._peek().lexeme != "as":
                    entry_type_only = True
                    self._advance()
                imported = self._expect_word().lexeme
                local = imported
                if self._at_word("as"):
                    self._advance()
                    local = self._expect_word().lexeme
                bindings.append(ImportBinding(local, imported, entry_type_only))
                if self._at(","):
                    self._advance()
                else:
                    break
            self._expect("}")

        if not self._at_word("from"):
            raise _ParseFailure("expected 'from' in import declaration")
        self._advance()
        if self._cur().kind is not TokenKind.STRING:
            raise _ParseFailure("expected module specifier string")
        spec_tok = self._advance()
        self._end_statement()
        span, cs, ce = self._span(start, self._prev())
        return ImportDecl(span, cs, ce, bindings, self._string_value(spec_tok), is_type_only)

    def _parse_export(self) -> Statement:
        start = self._expect("export")
        is_type_only = False
        if self._at_word("type"):
            nxt = self._peek()
            if nxt.lexeme in ("{", "*"):
                is_type_only = True
                self._advance()
            elif nxt.kind in _WORDY and self._peek(2).lexeme in ("=", "<"):
                return self._parse_type_alias(start, True)

        if self._at("*"):
            self._advance()
            alias = None
            if self._at_word("as"):
                self._advance()
                alias = self._expect_word().lexeme
            if not self._at_word("from"):
                raise _ParseFailure("expected 'from' in star re-export")
            self._advance()
            if self._cur().kind is not TokenKind.STRING:
                raise _ParseFailure("expected module specifier string")
            spec_tok = self._advance()
            self._end_statement()
            span, cs, ce = self._span(start, self._prev())
            return ExportStarDecl(span, cs, ce, self._string_value(spec_tok), alias)

        if self._at("{"):
            self._advance()
            names: list[ExportBinding] = []
            while not self._at("}") and not self._at_eof():
                if self._at_word("type") and self._peek().kind in _WORDY and self._peek().lexeme != "as":
                    self._advance()
                original = self._expect_word().lexeme
                exported = original
                if self._at_word("as"):
                    self._advance()
                    exported = self._expect_word().lexeme
                names.append(ExportBinding(exported, original))
                if self._at(","):
                    self._advance()
                else:
                    break
            self._expect("}")
            from_spec = None
            if self._at_word("from"):
                self._advance()
                if self._cur().kind is not TokenKind.STRING:
                    raise _ParseFailure("expected module specifier string")
                from_spec = self._string_value(self._advance())
            self._end_statement()
            span, cs, ce = self._span(start, self._prev())
            return ExportNamedDecl(span, cs, ce, names, from_spec, is_type_only)

        if self._at("default"):
            self._advance()
            if self._at("function") or (self._at_word("async") and self._peek().lexeme == "function"):
                if self._at_word("async"):
                    self._advance()
                return self._parse_function(start, True, True)
            if self._at("class") or (self._at_word("abstract") and self._peek().lexeme == "class"):
                if self._at_word("abstract"):
                    self._advance()
                return self._parse_class(start, True, True)
            expr = self._parse_expression()
            self._end_statement()
            span, cs, ce = self._span(start, self._prev())
            local = expr.name if isinstance(expr, Identifier) else None
            return ExportDefaultExpr(span, cs, ce, local, expr)

        t = self._cur()
        lex = t.lexeme
        if lex == "function":
            return self._parse_function(start, True, False)
        if lex == "async" and self._peek().lexeme == "function":
            self._advance()
            return self._parse_function(start, True, False)
        if lex == "class":
            return self._parse_class(start, True, False)
        if lex == "abstract" and self._peek().lexeme == "class":
            self._advance()
            return self._parse_class(start, True, False)
        if lex == "interface":
            return self._parse_interface(start, True)
        if lex == "enum":
            return self._parse_enum(start, True)
        if lex == "const" and self._peek().lexeme == "enum":
            self._advance()
            return self._parse_enum(start, True)
        if lex in ("const", "let", "var"):
            return self._parse_variable_statement(start, True)
        if lex == "declare":
            return self._parse_other_region(start)
        raise _ParseFailure(f"expected declaration or export clause, found {lex!r}")

    # -- type scanning ------------------------------------------------------

    def _scan_type(self, stop: frozenset[str], stop_at_arrow: bool = False) -> tuple[list[NameRef], Token | None]:
        """Scan a type region, collecting referenced (possibly dotted) names.

        Object-type member keys are skipped. Nesting in ``(){}[]<>`` is
        respected; a stop lexeme at relative depth zero ends the region.
        Returns the collected refs and the last consumed token.
        """
        refs: list[NameRef] = []
        depth = 0
        angle = 0
        brace = 0
        expect_operand = True
        last: Token | None = None
        while not self._at_eof():
            t = self._cur()
            lex = t.lexeme
            if depth == 0 and angle == 0:
                if lex in stop:
                    break
                if stop_at_arrow and lex == "=>":
                    break
                if lex in ("}", ")", "]") :
                    break
                if lex == "{" and not expect_operand:
                    break
            if t.kind in _WORDY:
                if t.kind is TokenKind.KEYWORD and lex not in ("this", "null", "void", "true", "false", "typeof", "new", "import"):
                    last = self._advance()
                    expect_operand = True
                    continue
                if lex == "typeof":
                    # value position follows; skip the dotted name
                    last = self._advance()
                    while self._cur().kind in _WORDY:
                        last = self._advance()
                        if self._at(".") and self._peek().kind in _WORDY:
                            last = self._advance()
                        else:
                            break
                    expect_operand = False
                    continue
                start_tok = t
                parts = [self._advance().lexeme]
                last = start_tok
                while self._at(".") and self._peek().kind in _WORDY:
                    self._advance()
                    last = self._advance()
                    parts.append(last.lexeme)
                nxt = self._cur().lexeme
                is_key = brace > 0 and (nxt == ":" or (nxt == "?" and self._peek().lexeme == ":"))
                if not is_key and t.kind is TokenKind.IDENTIFIER:
                    span, cs, ce = self._span(start_tok, last)
                    refs.append(NameRef(".".join(parts), span, cs, ce))
                expect_operand = False
                continue
            if lex in ("(", "[", "{"):
                if lex == "{":
                    brace += 1
                depth += 1
                last = self._advance()
                expect_operand = True
                continue
            if lex in (")", "]", "}"):
                if depth == 0:
                    break
                if lex == "}" and brace > 0:
                    brace -= 1
                depth -= 1
                last = self._advance()
                expect_operand = False
                continue
            if lex == "<":
                angle += 1
                last = self._advance()
                expect_operand = True
                continue
            if lex in (">", ">>", ">>>"):
                closes = len(lex)
                if angle == 0:
                    break
                angle = max(0, angle - closes)
                last = self._advance()
                expect_operand = False
                continue
            if lex in ("|", "&", ",", "=>", "extends", "?", ":", ".", "keyof", "infer", "readonly", "is", ";"):
                last = self._advance()
                expect_operand = True
                continue
            if t.kind in (TokenKind.STRING, TokenKind.NUMBER, TokenKind.TEMPLATE):
                last = self._advance()
                expect_operand = False
                continue
            if lex == "-" and self._cur().kind is TokenKind.PUNCTUATION:
                last = self._advance()  # negative literal types
                expect_operand = True
                continue
            break
        return refs, last

    def _scan_type_params(self) -> list[str]:
        """Consume a balanced ``<...>`` type-parameter list, returning the
        declared parameter names."""
        names: list[str] = []
        angle = 0
        expecting_name = False
        while not self._at_eof():
            t = self._cur()
            lex = t.lexeme
            if lex == "<":
                angle += 1
                expecting_name = angle == 1
                self._advance()
                continue
            if lex in (">", ">>", ">>>"):
                angle -= len(lex)
                self._advance()
                if angle <= 0:
                    break
                continue
            if lex == "," and angle == 1:
                expecting_name = True
                self._advance()
                continue
            if expecting_name and t.kind is TokenKind.IDENTIFIER and angle == 1:
                names.append(lex)
                expecting_name = False
                self._advance()
                continue
            if lex in ("(", "[", "{"):
                self._consume_matching(lex)
                continue
            self._advance()
        return names

    # -- declarations ---------------------------------------------------

    def _parse_params(self) -> list[Param]:
        self._expect("(")
        params: list[Param] = []
        while not self._at(")") and not self._at_eof():
            start_tok = self._cur()
            if self._at(","):
                self._advance()
                continue
            if self._at("..."):
                self._advance()
            name: str | None = None
            bound: list[str] = []
            if self._cur().lexeme in ("{", "["):
                opener = self._cur()
                last = self._consume_pattern()
                bound = self._names_in_region(opener, last)
            elif self._cur().kind in _WORDY:
                name = self._advance().lexeme
                bound = [name]
            else:
                raise _ParseFailure(f"expected parameter, found {self._cur().lexeme!r}")
            if self._at("?"):
                self._advance()
            type_refs: list[NameRef] = []
            if self._at(":"):
                self._advance()
                type_refs, _ = self._scan_type(frozenset({",", "=", ")"}))
            default = None
            if self._at("="):
                self._advance()
                default = self._parse_assignment()
            end_tok = self._prev()
            span, cs, ce = self._span(start_tok, end_tok)
            params.append(Param(name, bound, type_refs, default, span, cs, ce))
            if self._at(","):
                self._advance()
            elif not self._at(")"):
                raise _ParseFailure(f"expected ',' or ')' in parameters, found {self._cur().lexeme!r}")
        self._expect(")")
        return params

    def _names_in_region(self, start_tok: Token, end_tok: Token) -> list[str]:
        """All identifier lexemes between two tokens (inclusive); used to
        over-approximate the names bound by a destructuring pattern."""
        names = []
        i = self.pos - 1
        while i >= 0 and self.toks[i] is not start_tok:
            i -= 1
        j = i
        while j < self.pos:
            t = self.toks[j]
            if t.kind is TokenKind.IDENTIFIER:
                names.append(t.lexeme)
            j += 1
        return names

    def _parse_function(self, start: Token, is_exported: bool, is_default: bool) -> FunctionDecl:
        self._expect("function")
        if self._at("*"):
            self._advance()
        name = "default" if is_default else ""
        if self._cur().kind in _WORDY and not self._at("("):
            name = self._advance().lexeme
        if not name:
            raise _ParseFailure("function declaration requires a name")
        type_params: list[str] = []
        if self._at("<"):
            type_params = self._scan_type_params()
        params = self._parse_params()
        return_refs: list[NameRef] = []
        if self._at(":"):
            self._advance()
            return_refs, _ = self._scan_type(frozenset({";", "="}))
        header_end = self._prev().char_end
        body = None
        if self._at("{"):
            body = self._parse_block()
        else:
            self._end_statement()
        span, cs, ce = self._span(start, self._prev())
        return FunctionDecl(
            span, cs, ce, name, params, return_refs, body,
            is_exported, is_default, type_params, header_end,
        )

    def _parse_heritage_name(self) -> NameRef | None:
        if self._cur().kind not in _WORDY:
            return None
        start_tok = self._advance()
        last = start_tok
        parts = [start_tok.lexeme]
        while self._at(".") and self._peek().kind in _WORDY:
            self._advance()
            last = self._advance()
            parts.append(last.lexeme)
        if self._at("<"):
            saved_end = self._scan_type_args_end()
            if saved_end >= 0:
                self.pos = saved_end
        span, cs, ce = self._span(start_tok, last)
        return NameRef(".".join(parts), span, cs, ce)

    def _scan_type_args_end(self) -> int:
        """From a ``<`` token, find the position just past the balanced type
        arguments, or -1 if the region does not look like type arguments."""
        i = self.pos
        angle = 0
        steps = 0
        while i < len(self.toks) - 1 and steps < 400:
            lex = self.toks[i].lexeme
            if lex == "<":
                angle += 1
            elif lex in (">", ">>", ">>>"):
                angle -= len(lex)
                if angle <= 0:
                    return i + 1
            elif lex in (";", "{") or self.toks[i].kind is TokenKind.EOF:
                return -1
            elif lex in ("(", "[") :
                depth = 0
                while i < len(self.toks) - 1:
                    l2 = self.toks[i].lexeme
                    if l2 in ("(", "["):
                        depth += 1
                    elif l2 in (")", "]"):
                        depth -= 1
                        if depth == 0:
                            break
                    i += 1
                    steps += 1
            i += 1
            steps += 1
        return -1

    def _parse_class(self, start: Token, is_exported: bool, is_default: bool) -> ClassDecl:
        self._expect("class")
        name = "default" if is_default else ""
        if self._cur().kind in _WORDY and not self._at("{"):
            name = self._advance().lexeme
        if not name:
            raise _ParseFailure("class declaration requires a name")
        type_params: list[str] = []
        if self._at("<"):
            type_params = self._scan_type_params()
        extends_refs: list[NameRef] = []
        implements_refs: list[NameRef] = []
        while not self._at("{") and not self._at_eof():
            if self._at("extends"):
                self._advance()
                ref = self._parse_heritage_name()
                if ref is not None:
                    extends_refs.append(ref)
                else:
                    self._consume_balanced_region(frozenset({"{", "implements"}), False)
            elif self._at_word("implements"):
                self._advance()
                while True:
                    ref = self._parse_heritage_name()
                    if ref is not None:
                        implements_refs.append(ref)
                    if self._at(","):
                        self._advance()
                    else:
                        break
            else:
                raise _ParseFailure(f"unexpected token {self._cur().lexeme!r} in class header")
        header_end = self._prev().char_end
        self._expect("{")
        members = self._parse_class_members()
        span, cs, ce = self._span(start, self._prev())
        return ClassDecl(
            span, cs, ce, name, extends_refs, implements_refs, members,
            is_exported, is_default, type_params, header_end,
        )

    def _parse_class_members(self) -> list:
        members: list = []
        while not self._at("}") and not self._at_eof():
            if self._at(";"):
                self._advance()
                continue
            start_pos = self.pos
            try:
                member = self._parse_class_member()
                if member is not None:
                    members.append(member)
            except _ParseFailure as failure:
                if self.pos == start_pos:
                    self._advance()
                self._consume_balanced_region(frozenset({";", "}"}), False)
                if self._at(";"):
                    self._advance()
                start_tok = self.toks[start_pos]
                span, cs, ce = self._span(start_tok, self._prev())
                self._record_error(span, failure.message)
                members.append(ErrorMember(span, cs, ce))
            if self.pos == start_pos:
                self._advance()
        if self._at("}"):
            self._advance()
        else:
            last = self._prev()
            span, cs, ce = self._span(last, last)
            self._record_error(span, "unterminated class body")
            members.append(ErrorMember(span, cs, ce))
        return members

    def _parse_class_member(self):
        start_tok = self._cur()
        if start_tok.lexeme == "@":
            while self._at("@"):
                self._advance()
                if self._cur().kind in _WORDY:
                    self._advance()
                    while self._at(".") and self._peek().kind in _WORDY:
                        self._advance()
                        self._advance()
                if self._at("("):
                    self._consume_matching("(")
        is_static = False
        while self._cur().kind in _WORDY and self._cur().lexeme in _MODIFIER_WORDS:
            nxt = self._peek()
            if nxt.lexeme in ("(", ":", "=", ";", "}", "<", "?", "!") or nxt.kind is TokenKind.EOF:
                break  # the word is the member name itself
            if self._cur().lexeme == "static":
                is_static = True
            self._advance()
        if self._at("*"):
            self._advance()

        name: str | None = None
        t = self._cur()
        if t.kind in _WORDY:
            name = self._advance().lexeme
        elif t.kind in (TokenKind.STRING, TokenKind.NUMBER):
            self._advance()
            name = None  # literal member names produce no entities
        elif t.lexeme == "[":
            self._consume_matching("[")
            name = None  # computed names are out of scope
        else:
            raise _ParseFailure(f"expected class member, found {t.lexeme!r}")

        if self._at("?") or self._at("!"):
            self._advance()
        if self._at("<"):
            self._scan_type_params()

        if self._at("("):
            params = self._parse_params()
            return_refs: list[NameRef] = []
            if self._at(":"):
                self._advance()
                return_refs, _ = self._scan_type(frozenset({";"}))
            header_end = self._prev().char_end
            body = None
            if self._at("{"):
                body = self._parse_block()
            elif self._at(";"):
                self._advance()
            span, cs, ce = self._span(start_tok, self._prev())
            if name is None:
                return None
            return MethodMember(name, params, return_refs, body, is_static, span, cs, ce, header_end)

        type_refs: list[NameRef] = []
        if self._at(":"):
            self._advance()
            type_refs, _ = self._scan_type(frozenset({"=", ";"}))
        init = None
        if self._at("="):
            self._advance()
            init = self._parse_assignment()
        if self._at(";"):
            self._advance()
        elif not (self._at("}") or self._nl_before_cur() or self._at_eof()):
            raise _ParseFailure(f"expected end of class member before {self._cur().lexeme!r}")
        span, cs, ce = self._span(start_tok, self._prev())
        if name is None:
            return None
        return PropertyMember(name, type_refs, init, span, cs, ce)

    def _parse_interface(self, start: Token, is_exported: bool) -> InterfaceDecl:
        self._expect("interface")
        name = self._expect_word().lexeme
        type_params: list[str] = []
        if self._at("<"):
            type_params = self._scan_type_params()
        extends_refs: list[NameRef] = []
        if self._at("extends"):
            self._advance()
            while True:
                ref = self._parse_heritage_name()
                if ref is not None:
                    extends_refs.append(ref)
                if self._at(","):
                    self._advance()
                else:
                    break
        header_end = self._prev().char_end
        self._expect("{")
        member_refs: list[NameRef] = []
        depth = 1
        while not self._at_eof():
            t = self._cur()
            if t.lexeme == "{":
                depth += 1
                self._advance()
            elif t.lexeme == "}":
                depth -= 1
                self._advance()
                if depth == 0:
                    break
            elif t.lexeme == ":":
                self._advance()
                refs, _ = self._scan_type(frozenset({";", ","}))
                member_refs.extend(refs)
            elif t.lexeme == "(":
                self._advance()  # method signature params: scan annotations inside
            else:
                self._advance()
        span, cs, ce = self._span(start, self._prev())
        return InterfaceDecl(span, cs, ce, name, extends_refs, member_refs, is_exported, type_params, header_end)

    def _parse_type_alias(self, start: Token, is_exported: bool) -> TypeAliasDecl:
        self._advance()  # 'type'
        name = self._expect_word().lexeme
        type_params: list[str] = []
        if self._at("<"):
            type_params = self._scan_type_params()
        header_end = self._prev().char_end
        self._expect("=")
        refs, _ = self._scan_type(frozenset({";"}))
        if self._at(";"):
            self._advance()
        span, cs, ce = self._span(start, self._prev())
        return TypeAliasDecl(span, cs, ce, name, refs, is_exported, type_params, header_end)

    def _parse_enum(self, start: Token, is_exported: bool) -> EnumDecl:
        self._expect("enum")
        name = self._expect_word().lexeme
        header_end = self._prev().char_end
        self._expect("{")
        members: list[EnumMember] = []
        while not self._at("}") and not self._at_eof():
            t = self._cur()
            if t.kind in _WORDY or t.kind is TokenKind.STRING:
                member_name = self._advance().lexeme
                if t.kind is TokenKind.STRING:
                    member_name = self._string_value(t)
                init = None
                if self._at("="):
                    self._advance()
                    init = self._parse_assignment()
                members.append(EnumMember(member_name, init))
                if self._at(","):
                    self._advance()
            else:
                raise _ParseFailure(f"expected enum member, found {t.lexeme!r}")
        self._expect("}")
        span, cs, ce = self._span(start, self._prev())
        return EnumDecl(span, cs, ce, name, members, is_exported, header_end)

    def _parse_variable_statement(self, start: Token, is_exported: bool) -> VariableStatement:
        kind = self._advance().lexeme  # const | let | var
        declarators: list[Declarator] = []
        while True:
            d_start = self._cur()
            name: str | None = None
            bound: list[str] = []
            if self._cur().lexeme in ("{", "["):
                opener = self._cur()
                self._consume_pattern()
                bound = self._names_in_region(opener, self._prev())
            elif self._cur().kind in _WORDY:
                name = self._advance().lexeme
                bound = [name]
            else:
                raise _ParseFailure(f"expected variable name, found {self._cur().lexeme!r}")
            if self._at("!"):
                self._advance()
            type_refs: list[NameRef] = []
            type_char_range = None
            if self._at(":"):
                colon = self._advance()
                type_refs, last = self._scan_type(frozenset({"=", ",", ";"}))
                type_char_range = (colon.char_start, (last or colon).char_end)
            init = None
            if self._at("="):
                self._advance()
                init = self._parse_assignment()
            span, cs, ce = self._span(d_start, self._prev())
            declarators.append(Declarator(name, bound, type_refs, init, span, cs, ce, type_char_range))
            if self._at(","):
                self._advance()
            else:
                break
        self._end_statement()
        span, cs, ce = self._span(start, self._prev())
        return VariableStatement(span, cs, ce, kind, declarators, is_exported)

    # -- blocks and body statements --------------------------------------

    def _parse_block(self, bound_names: list[str] | None = None) -> Block:
        start = self._expect("{")
        self.depth += 1
        try:
            if self.depth > _MAX_DEPTH:
                self.pos -= 1
                last = self._consume_matching("{")
                span, cs, ce = self._span(start, last)
                return Block(span, cs, ce, [], bound_names or [])
            statements: list[Statement] = []
            while not self._at("}") and not self._at_eof():
                start_pos = self.pos
                try:
                    st = self._parse_block_statement()
                except _ParseFailure as failure:
                    st = self._recover_in_block(start_pos, failure.message)
                if self.pos == start_pos:
                    st = self._recover_in_block(start_pos, f"unexpected token {self._cur().lexeme!r}")
                statements.append(st)
            if self._at("}"):
                self._advance()
            else:
                last = self._prev()
                span, _, _ = self._span(last, last)
                self._record_error(span, "unterminated block")
                statements.append(OtherStatement(span, last.char_start, last.char_end, from_error=True))
            span, cs, ce = self._span(start, self._prev())
            return Block(span, cs, ce, statements, bound_names or [])
        finally:
            self.depth -= 1

    def _recover_in_block(self, start_pos: int, message: str) -> OtherStatement:
        self.pos = max(self.pos, start_pos)
        if self.pos == start_pos and not self._at_eof() and not self._at("}"):
            self._advance()
        self._consume_balanced_region(frozenset({";"}), False)
        if self._at(";"):
            self._advance()
        start_tok = self.toks[min(start_pos, len(self.toks) - 1)]
        span, cs, ce = self._span(start_tok, self._prev())
        self._record_error(span, message)
        return OtherStatement(span, cs, ce, from_error=True)

    def _parse_block_statement(self) -> Statement:
        t = self._cur()
        lex = t.lexeme

        if t.kind is TokenKind.KEYWORD:
            if lex in ("const", "let", "var"):
                if lex == "const" and self._peek().lexeme == "enum":
                    self._advance()
                    return self._parse_enum(t, False)
                return self._parse_variable_statement(t, False)
            if lex == "return":
                self._advance()
                expr = None
                if not (self._at(";") or self._at("}") or self._at_eof() or self._nl_before_cur()):
                    expr = self._parse_expression()
                self._end_statement()
                span, cs, ce = self._span(t, self._prev())
                return ReturnStmt(span, cs, ce, expr)
            if lex == "throw":
                self._advance()
                expr = self._parse_expression()
                self._end_statement()
                span, cs, ce = self._span(t, self._prev())
                return ThrowStmt(span, cs, ce, expr)
            if lex in ("if", "while", "switch"):
                return self._parse_keyword_control(t)
            if lex == "for":
                return self._parse_for(t)
            if lex == "do":
                return self._parse_do(t)
            if lex == "try":
                return self._parse_try(t)
            if lex in ("break", "continue", "debugger"):
                self._advance()
                if self._cur().kind is TokenKind.IDENTIFIER and not self._nl_before_cur():
                    self._advance()  # label
                self._end_statement()
                span, cs, ce = self._span(t, self._prev())
                return OtherStatement(span, cs, ce)
            if lex == "function":
                return self._parse_function(t, False, False)
            if lex == "class":
                return self._parse_class(t, False, False)
            if lex == "import":
                return self._parse_import()
            if lex == "export":
                return self._parse_export()
            if lex == "interface":
                return self._parse_interface(t, False)
            if lex == "enum":
                return self._parse_enum(t, False)
        elif t.kind is TokenKind.IDENTIFIER:
            if lex == "async" and self._peek().lexeme == "function":
                self._advance()
                return self._parse_function(t, False, False)
            if lex == "type" and self._peek().kind in _WORDY and self._peek(2).lexeme in ("=", "<"):
                return self._parse_type_alias(t, False)

        if lex == "{":
            return self._parse_block()
        if lex == ";":
            self._advance()
            span, cs, ce = self._span(t, t)
            return OtherStatement(span, cs, ce)
        if lex == "@":
            return self._parse_decorated()

        expr = self._parse_expression()
        self._end_statement()
        span, cs, ce = self._span(t, self._prev())
        return ExpressionStatement(span, cs, ce, expr)

    def _parse_body_or_block(self) -> Block:
        if self._at("{"):
            return self._parse_block()
        start = self._cur()
        st = self._parse_block_statement()
        span, cs, ce = self._span(start, self._prev())
        return Block(span, cs, ce, [st], [])

    def _parse_keyword_control(self, start: Token) -> ControlStmt:
        keyword = self._advance().lexeme
        self._expect("(")
        header = self._parse_expression()
        self._expect(")")
        blocks: list[Block] = []
        header_exprs = [header]
        if keyword == "switch":
            self._expect("{")
            statements: list[Statement] = []
            while not self._at("}") and not self._at_eof():
                if self._at("case"):
                    self._advance()
                    header_exprs.append(self._parse_assignment())
                    self._expect(":")
                    continue
                if self._at("default"):
                    self._advance()
                    self._expect(":")
                    continue
                start_pos = self.pos
                try:
                    statements.append(self._parse_block_statement())
                except _ParseFailure as failure:
                    statements.append(self._recover_in_block(start_pos, failure.message))
                if self.pos == start_pos:
                    statements.append(self._recover_in_block(start_pos, "unexpected token in switch"))
            if self._at("}"):
                self._advance()
            span, cs, ce = self._span(start, self._prev())
            blocks.append(Block(span, cs, ce, statements, []))
            return ControlStmt(span, cs, ce, keyword, None, header_exprs, blocks)

        blocks.append(self._parse_body_or_block())
        if keyword == "if" and self._at("else"):
            self._advance()
            blocks.append(self._parse_body_or_block())
        span, cs, ce = self._span(start, self._prev())
        return ControlStmt(span, cs, ce, keyword, None, header_exprs, blocks)

    def _parse_for(self, start: Token) -> ControlStmt:
        self._advance()
        if self._at_word("await"):
            self._advance()
        self._expect("(")
        header_decl: VariableStatement | None = None
        header_exprs: list[Expression] = []

        if self._cur().lexeme in ("const", "let", "var"):
            kind_tok = self._cur()
            kind = self._advance().lexeme
            d_start = self._cur()
            name: str | None = None
            bound: list[str] = []
            if self._cur().lexeme in ("{", "["):
                opener = self._cur()
                self._consume_pattern()
                bound = self._names_in_region(opener, self._prev())
            else:
                name = self._expect_word().lexeme
                bound = [name]
            type_refs: list[NameRef] = []
            if self._at(":"):
                self._advance()
                type_refs, _ = self._scan_type(frozenset({"=", ";", ")"}))
            init = None
            if self._at("="):
                self._advance()
                init = self._parse_assignment(no_in=True)
            span, cs, ce = self._span(d_start, self._prev())
            declarators = [Declarator(name, bound, type_refs, init, span, cs, ce)]
            if self._at_word("of") or self._at("in"):
                self._advance()
                header_exprs.append(self._parse_expression())
            else:
                while self._at(","):
                    self._advance()
                    d2 = self._cur()
                    n2 = self._expect_word().lexeme
                    tr2: list[NameRef] = []
                    if self._at(":"):
                        self._advance()
                        tr2, _ = self._scan_type(frozenset({"=", ";", ")"}))
                    i2 = None
                    if self._at("="):
                        self._advance()
                        i2 = self._parse_assignment(no_in=True)
                    sp2, c2s, c2e = self._span(d2, self._prev())
                    declarators.append(Declarator(n2, [n2], tr2, i2, sp2, c2s, c2e))
                self._expect(";")
                if not self._at(";"):
                    header_exprs.append(self._parse_expression())
                self._expect(";")
                if not self._at(")"):
                    header_exprs.append(self._parse_expression())
            vspan, vcs, vce = self._span(kind_tok, self._prev())
            header_decl = VariableStatement(vspan, vcs, vce, kind, declarators, False)
        elif self._at(";"):
            self._advance()
            if not self._at(";"):
                header_exprs.append(self._parse_expression())
            self._expect(";")
            if not self._at(")"):
                header_exprs.append(self._parse_expression())
        else:
            first = self._parse_expression(no_in=True)
            header_exprs.append(first)
            if self._at_word("of") or self._at("in"):
                self._advance()
                header_exprs.append(self._parse_expression())
            else:
                if self._at(";"):
                    self._advance()
                    if not self._at(";"):
                        header_exprs.append(self._parse_expression())
                    self._expect(";")
                    if not self._at(")"):
                        header_exprs.append(self._parse_expression())
        self._expect(")")
        body = self._parse_body_or_block()
        span, cs, ce = self._span(start, self._prev())
        return ControlStmt(span, cs, ce, "for", header_decl, header_exprs, [body])

    def _parse_do(self, start: Token) -> ControlStmt:
        self._advance()
        body = self._parse_body_or_block()
        header_exprs: list[Expression] = []
        if self._at("while"):
            self._advance()
            self._expect("(")
            header_exprs.append(self._parse_expression())
            self._expect(")")
            self._end_statement()
        span, cs, ce = self._span(start, self._prev())
        return ControlStmt(span, cs, ce, "do", None, header_exprs, [body])

    def _parse_try(self, start: Token) -> ControlStmt:
        self._advance()
        blocks = [self._parse_block()]
        if self._at("catch"):
            self._advance()
            bound: list[str] = []
            if self._at("("):
                self._advance()
                if self._cur().lexeme in ("{", "["):
                    opener = self._cur()
                    self._consume_pattern()
                    bound = self._names_in_region(opener, self._prev())
                elif self._cur().kind in _WORDY:
                    bound = [self._advance().lexeme]
                if self._at(":"):
                    self._advance()
                    self._scan_type(frozenset({")"}))
                self._expect(")")
            blocks.append(self._parse_block(bound))
        if self._at("finally"):
            self._advance()
            blocks.append(self._parse_block())
        span, cs, ce = self._span(start, self._prev())
        return ControlStmt(span, cs, ce, "try", None, [], blocks)

    # -- expressions ------------------------------------------------------

    def _parse_expression(self, no_in: bool = False) -> Expression:
        first = self._parse_assignment(no_in=no_in)
        if not self._at(","):
            return first
        children = [first]
        start_cs = first.char_start
        start_span = first.span
        while self._at(","):
            self._advance()
            children.append(self._parse_assignment(no_in=no_in))
        last = children[-1]
        span = Span(
            start_span.byte_start, last.span.byte_end,
            start_span.start_line, start_span.start_col,
            last.span.end_line, last.span.end_col,
        )
        return OtherExpr(span, start_cs, last.char_end, children=children)

    def _opaque_expr(self, stop: frozenset[str]) -> OtherExpr:
        start = self._cur()
        if not self._at_eof() and start.lexeme not in stop:
            if start.lexeme in "([{":
                self._consume_matching(start.lexeme)
            else:
                self._advance()
            self._consume_balanced_region(stop, False)
        span, cs, ce = self._span(start, self._prev())
        return OtherExpr(span, cs, ce, opaque=True)

    def _parse_assignment(self, no_in: bool = False) -> Expression:
        self.depth += 1
        try:
            if self.depth > _MAX_DEPTH:
                return self._opaque_expr(frozenset({",", ";", ")", "]", "}", ":"}))
            operands = [self._parse_unary(no_in=no_in)]
            type_refs: list[NameRef] = []
            while True:
                t = self._cur()
                lex = t.lexeme
                if t.kind is TokenKind.PUNCTUATION and (lex in _BINARY_OPS or lex in _ASSIGN_OPS):
                    self._advance()
                    operands.append(self._parse_unary(no_in=no_in))
                    continue
                if t.kind is TokenKind.KEYWORD and (lex == "instanceof" or (lex == "in" and not no_in)):
                    self._advance()
                    operands.append(self._parse_unary(no_in=no_in))
                    continue
                if t.kind is TokenKind.IDENTIFIER and lex in ("as", "satisfies") and not self._nl_before_cur():
                    self._advance()
                    if self._at_word("const"):
                        self._advance()
                    else:
                        refs, _ = self._scan_type(
                            frozenset({",", ";", ")", "]", "}", ":", "?", "=", "=>"})
                        )
                        type_refs.extend(refs)
                    continue
                if lex == "?" and t.kind is TokenKind.PUNCTUATION:
                    self._advance()
                    operands.append(self._parse_assignment())
                    self._expect(":")
                    operands.append(self._parse_assignment(no_in=no_in))
                    continue
                break
            if len(operands) == 1 and not type_refs:
                return operands[0]
            first = operands[0]
            end_tok = self._prev()  # covers trailing `as T` type regions
            span = Span(
                first.span.byte_start, max(end_tok.byte_end, operands[-1].span.byte_end),
                first.span.start_line, first.span.start_col,
                end_tok.end_line, end_tok.end_col,
            )
            char_end = max(end_tok.char_end, operands[-1].char_end)
            return OtherExpr(span, first.char_start, char_end, children=operands, type_refs=type_refs)
        finally:
            self.depth -= 1

    _PREFIX_PUNCT = frozenset({"!", "~", "+", "-", "++", "--", "..."})
    _PREFIX_KEYWORDS = frozenset({"typeof", "void", "delete", "await", "yield"})

    def _parse_unary(self, no_in: bool = False) -> Expression:
        t = self._cur()
        prefixes = 0
        start = t
        while True:
            t = self._cur()
            if t.kind is TokenKind.PUNCTUATION and t.lexeme in self._PREFIX_PUNCT:
                self._advance()
                prefixes += 1
                continue
            if (t.kind is TokenKind.KEYWORD and t.lexeme in self._PREFIX_KEYWORDS) or (
                t.kind is TokenKind.IDENTIFIER and t.lexeme == "await"
            ):
                self._advance()
                prefixes += 1
                continue
            break
        expr = self._parse_postfix(self._parse_primary())
        if prefixes:
            span = Span(
                start.byte_start, expr.span.byte_end,
                start.start_line, start.start_col,
                expr.span.end_line, expr.span.end_col,
            )
            return OtherExpr(span, start.char_start, expr.char_end, children=[expr])
        return expr

    def _parse_arguments(self) -> list[Expression]:
        self._expect("(")
        args: list[Expression] = []
        while not self._at(")") and not self._at_eof():
            if self._at(","):
                self._advance()
                continue
            if self._at("..."):
                self._advance()
            args.append(self._parse_assignment())
            if self._at(","):
                self._advance()
            elif not self._at(")"):
                raise _ParseFailure(f"expected ',' or ')' in arguments, found {self._cur().lexeme!r}")
        self._expect(")")
        return args

    def _parse_postfix(self, expr: Expression) -> Expression:
        while True:
            t = self._cur()
            lex = t.lexeme
            if lex in (".", "?."):
                if self._peek().kind in _WORDY:
                    self._advance()
                    prop_tok = self._advance()
                    span = Span(
                        expr.span.byte_start, prop_tok.byte_end,
                        expr.span.start_line, expr.span.start_col,
                        prop_tok.end_line, prop_tok.end_col,
                    )
                    expr = PropertyAccess(span, expr.char_start, prop_tok.char_end, expr, prop_tok.lexeme)
                    continue
                if lex == "?." and self._peek().lexeme == "(":
                    self._advance()
                    args = self._parse_arguments()
                    end = self._prev()
                    span = Span(
                        expr.span.byte_start, end.byte_end,
                        expr.span.start_line, expr.span.start_col,
                        end.end_line, end.end_col,
                    )
                    expr = Call(span, expr.char_start, end.char_end, expr, args)
                    continue
                break
            if lex == "(":
                args = self._parse_arguments()
                end = self._prev()
                span = Span(
                    expr.span.byte_start, end.byte_end,
                    expr.span.start_line, expr.span.start_col,
                    end.end_line, end.end_col,
                )
                expr = Call(span, expr.char_start, end.char_end, expr, args)
                continue
            if lex == "[":
                self._advance()
                index = self._parse_expression()
                self._expect("]")
                end = self._prev()
                span = Span(
                    expr.span.byte_start, end.byte_end,
                    expr.span.start_line, expr.span.start_col,
                    end.end_line, end.end_col,
                )
                expr = OtherExpr(span, expr.char_start, end.char_end, children=[expr, index])
                continue
            if lex == "!" and not self._nl_before_cur():
                self._advance()
                continue
            if lex in ("++", "--") and not self._nl_before_cur():
                self._advance()
                continue
            if t.kind is TokenKind.TEMPLATE:  # tagged template
                tpl = self._advance()
                children = [expr] + self._template_children(tpl)
                span = Span(
                    expr.span.byte_start, tpl.byte_end,
                    expr.span.start_line, expr.span.start_col,
                    tpl.end_line, tpl.end_col,
                )
                expr = OtherExpr(span, expr.char_start, tpl.char_end, children=children)
                continue
            if lex == "<" and isinstance(expr, (Identifier, PropertyAccess)):
                end_pos = self._scan_type_args_end()
                if end_pos >= 0 and end_pos < len(self.toks) and self.toks[end_pos].lexeme == "(":
                    self.pos = end_pos
                    continue
                break
            break
        return expr

    def _parse_primary(self) -> Expression:
        t = self._cur()
        lex = t.lexeme
        kind = t.kind

        if kind is TokenKind.IDENTIFIER:
            if self._peek().lexeme == "=>":
                return self._parse_arrow_from_single_param()
            if lex == "async":
                nxt = self._peek()
                if nxt.kind is TokenKind.IDENTIFIER and self._peek(2).lexeme == "=>":
                    self._advance()
                    return self._parse_arrow_from_single_param()
                if nxt.lexeme == "(":
                    arrow = self._try_parse_arrow(skip_async=True)
                    if arrow is not None:
                        return arrow
            self._advance()
            span, cs, ce = self._span(t, t)
            return Identifier(span, cs, ce, lex)

        if kind is TokenKind.KEYWORD:
            if lex in ("this", "super", "true", "false", "null"):
                self._advance()
                span, cs, ce = self._span(t, t)
                return Literal(span, cs, ce)
            if lex == "new":
                return self._parse_new(t)
            if lex == "function":
                return self._parse_function_expression(t)
            if lex == "class":
                return self._parse_class_expression(t)
            if lex == "import" and self._peek().lexeme == "(":
                self._advance()
                args = self._parse_arguments()
                end = self._prev()
                span, cs, ce = self._span(t, end)
                return OtherExpr(span, cs, ce, children=args)
            raise _ParseFailure(f"unexpected keyword {lex!r} in expression")

        if kind in (TokenKind.NUMBER, TokenKind.STRING, TokenKind.REGEX):
            self._advance()
            span, cs, ce = self._span(t, t)
            return Literal(span, cs, ce)

        if kind is TokenKind.TEMPLATE:
            self._advance()
            span, cs, ce = self._span(t, t)
            return Literal(span, cs, ce, children=self._template_children(t))

        if lex == "(":
            arrow = self._try_parse_arrow(skip_async=False)
            if arrow is not None:
                return arrow
            self._advance()
            if self._at(")"):  # `()` without `=>`: malformed; treat as opaque
                end = self._advance()
                span, cs, ce = self._span(t, end)
                return OtherExpr(span, cs, ce, opaque=True)
            inner = self._parse_expression()
            self._expect(")")
            return inner

        if lex == "[":
            return self._parse_array_literal(t)
        if lex == "{":
            return self._parse_object_literal(t)
        if lex == "<":  # type assertion `<T>expr` (non-JSX subset)
            end_pos = self._scan_type_args_end()
            if end_pos >= 0:
                self.pos = end_pos
                return self._parse_unary()
            raise _ParseFailure("unexpected '<' in expression")

        raise _ParseFailure(f"unexpected token {lex!r} in expression")

    def _parse_arrow_from_single_param(self) -> ArrowFunction:
        name_tok = self._advance()
        pspan, pcs, pce = self._span(name_tok, name_tok)
        param = Param(name_tok.lexeme, [name_tok.lexeme], [], None, pspan, pcs, pce)
        header_end = self._prev().char_end
        self._expect("=>")
        return self._finish_arrow(name_tok, [param], [], header_end)

    def _try_parse_arrow(self, skip_async: bool) -> ArrowFunction | None:
        """Speculatively parse ``(params) [: Ret] => body`` from the current
        position. Returns None (position restored) if this is not an arrow."""
        saved = self.pos
        start = self._cur()
        if skip_async:
            self._advance()
        if not self._at("("):
            self.pos = saved
            return None
        open_tok = self._cur()
        self._consume_matching("(")
        return_refs: list[NameRef] = []
        if self._at(":"):
            probe = self.pos
            self._advance()
            return_refs, _ = self._scan_type(frozenset({";", ",", ")", "]", "}"}), stop_at_arrow=True)
            if not self._at("=>"):
                self.pos = saved
                return None
        if not self._at("=>"):
            self.pos = saved
            return None
        # reparse the parameter list properly
        arrow_pos = self.pos
        self.pos = saved
        if skip_async:
            self._advance()
        params = self._parse_params()
        self.pos = arrow_pos
        header_end = self._prev().char_end
        self._expect("=>")
        return self._finish_arrow(start, params, return_refs, header_end)

    def _finish_arrow(
        self, start: Token, params: list[Param], return_refs: list[NameRef], header_end: int
    ) -> ArrowFunction:
        body_block = None
        body_expr = None
        if self._at("{"):
            body_block = self._parse_block()
        else:
            body_expr = self._parse_assignment()
        end = self._prev()
        span, cs, ce = self._span(start, end)
        return ArrowFunction(span, cs, ce, params, return_refs, body_block, body_expr, header_end)

    def _parse_new(self, start: Token) -> Expression:
        self._advance()
        if self._at(".") and self._peek().lexeme == "target":
            self._advance()
            end = self._advance()
            span, cs, ce = self._span(start, end)
            return OtherExpr(span, cs, ce)
        callee_name = None
        callee_span = None
        callee_expr: Expression | None = None
        if self._cur().kind in _WORDY and self._cur().lexeme not in ("(",):
            name_start = self._advance()
            last = name_start
            parts = [name_start.lexeme]
            while self._at(".") and self._peek().kind in _WORDY:
                self._advance()
                last = self._advance()
                parts.append(last.lexeme)
            callee_name = ".".join(parts)
            callee_span, _, _ = self._span(name_start, last)
            if self._at("<"):
                end_pos = self._scan_type_args_end()
                if end_pos >= 0:
                    self.pos = end_pos
        else:
            callee_expr = self._parse_unary()
        args: list[Expression] = []
        if self._at("("):
            args = self._parse_arguments()
        end = self._prev()
        span, cs, ce = self._span(start, end)
        return New(span, cs, ce, callee_name, callee_span, callee_expr, args)

    def _parse_function_expression(self, start: Token) -> ArrowFunction:
        self._advance()
        if self._at("*"):
            self._advance()
        bound: list[str] = []
        if self._cur().kind in _WORDY:
            bound = [self._advance().lexeme]  # named fn expr binds its own name
        if self._at("<"):
            self._scan_type_params()
        params = self._parse_params()
        return_refs: list[NameRef] = []
        if self._at(":"):
            self._advance()
            return_refs, _ = self._scan_type(frozenset({";"}))
        header_end = self._prev().char_end
        body = self._parse_block(bound)
        span, cs, ce = self._span(start, self._prev())
        return ArrowFunction(span, cs, ce, params, return_refs, body, None, header_end)

    def _parse_class_expression(self, start: Token) -> OtherExpr:
        self._advance()
        while not self._at("{") and not self._at_eof() and not self._at(";"):
            self._advance()
        if self._at("{"):
            self._consume_matching("{")
        span, cs, ce = self._span(start, self._prev())
        return OtherExpr(span, cs, ce, opaque=True)

    def _parse_array_literal(self, start: Token) -> OtherExpr:
        self._advance()
        children: list[Expression] = []
        while not self._at("]") and not self._at_eof():
            if self._at(","):
                self._advance()
                continue
            if self._at("..."):
                self._advance()
            children.append(self._parse_assignment())
            if self._at(","):
                self._advance()
            elif not self._at("]"):
                raise _ParseFailure(f"expected ',' or ']' in array, found {self._cur().lexeme!r}")
        self._expect("]")
        span, cs, ce = self._span(start, self._prev())
        return OtherExpr(span, cs, ce, children=children)

    def _parse_object_literal(self, start: Token) -> OtherExpr:
        self._advance()
        children: list[Expression] = []
        while not self._at("}") and not self._at_eof():
            if self._at(","):
                self._advance()
                continue
            if self._at("..."):
                self._advance()
                children.append(self._parse_assignment())
                continue
            t = self._cur()
            # accessor or method modifiers
            if t.kind in _WORDY and t.lexeme in ("get", "set", "async") and self._peek().kind in _WORDY:
                self._advance()
                t = self._cur()
            if self._at("*"):
                self._advance()
                t = self._cur()
            if t.lexeme == "[":
                self._advance()
                children.append(self._parse_assignment())
                self._expect("]")
            elif t.kind in _WORDY or t.kind in (TokenKind.STRING, TokenKind.NUMBER):
                self._advance()
            else:
                raise _ParseFailure(f"expected object member, found {t.lexeme!r}")
            if self._at("("):  # method shorthand
                params = self._parse_params()
                return_refs: list[NameRef] = []
                if self._at(":"):
                    self._advance()
                    return_refs, _ = self._scan_type(frozenset({";"}))
                header_end = self._prev().char_end
                body = self._parse_block()
                mspan, mcs, mce = self._span(t, self._prev())
                children.append(ArrowFunction(mspan, mcs, mce, params, return_refs, body, None, header_end))
            elif self._at(":"):
                self._advance()
                children.append(self._parse_assignment())
            elif t.kind is TokenKind.IDENTIFIER and (self._at(",") or self._at("}")):
                span, cs, ce = self._span(t, t)
                children.append(Identifier(span, cs, ce, t.lexeme))  # shorthand
            elif self._at("="):  # inside destructuring-ish contexts
                self._advance()
                children.append(self._parse_assignment())
            if self._at(","):
                self._advance()
            elif not self._at("}"):
                raise _ParseFailure(f"expected ',' or '}}' in object, found {self._cur().lexeme!r}")
        self._expect("}")
        span, cs, ce = self._span(start, self._prev())
        return OtherExpr(span, cs, ce, children=children)

    # -- template substitution sub-parsing --------------------------------

    def _template_children(self, tpl: Token) -> list[Expression]:
        holes = _template_holes(tpl.lexeme)
        if not holes:
            return []
        children: list[Expression] = []
        ascii_lexeme = tpl.lexeme.isascii()
        for rel_start, rel_end in holes:
            if rel_end <= rel_start:
                continue
            text = tpl.lexeme[rel_start:rel_end]
            abs_char = tpl.char_start + rel_start
            if ascii_lexeme:
                abs_byte = tpl.byte_start + rel_start
            else:
                abs_byte = tpl.byte_start + len(tpl.lexeme[:rel_start].encode("utf-8"))
            prefix = tpl.lexeme[:rel_start]
            breaks, after_last = _count_breaks(prefix)
            if breaks:
                hole_line = tpl.start_line + breaks
                hole_col = rel_start - after_last + 1
            else:
                hole_line = tpl.start_line
                hole_col = tpl.start_col + rel_start
            sig, flags = _nl_flags(tokenize(text))
            shifted = [
                _shift_token(t, abs_char, abs_byte, hole_line, hole_col)
                for t in sig
            ]
            sub = Parser(self.path, self.source, tokens=shifted, nl_before=flags, errors=self.errors)
            try:
                expr = sub._parse_expression()
            except _ParseFailure:
                span = Span(abs_byte, abs_byte + (len(text) if text.isascii() else len(text.encode("utf-8"))), hole_line, hole_col, hole_line, hole_col + len(text))
                expr = OtherExpr(span, abs_char, abs_char + len(text), opaque=True)
            children.append(expr)
        return children


def _count_breaks(text: str) -> tuple[int, int]:
    breaks = text.count("\n") + text.count(" ") + text.count(" ")
    breaks += text.count("\r") - text.count("\r\n")
    if not breaks:
        return 0, 0
    last = max(text.rfind(c) for c in "\n\r  ")
    return breaks, last + 1


def _shift_token(t: Token, char_delta: int, byte_delta: int, base_line: int, base_col: int) -> Token:
    if t.start_line == 1:
        start_line = base_line
        start_col = base_col + t.start_col - 1
    else:
        start_line = base_line + t.start_line - 1
        start_col = t.start_col
    if t.end_line == 1:
        end_line = base_line
        end_col = base_col + t.end_col - 1
    else:
        end_line = base_line + t.end_line - 1
        end_col = t.end_col
    return Token(
        t.kind, t.lexeme,
        t.byte_start + byte_delta, t.byte_end + byte_delta,
        t.char_start + char_delta, t.char_end + char_delta,
        start_line, start_col, end_line, end_col,
    )


def _template_holes(lexeme: str) -> list[tuple[int, int]]:
    """Char ranges (relative to the lexeme) of top-level ``${...}`` contents."""
    holes: list[tuple[int, int]] = []
    n = len(lexeme)
    i = 1 if lexeme.startswith("`") else 0
    stack: list[int] = [-1]
    hole_start = -1
    while i < n:
        c = lexeme[i]
        if stack[-1] == -1:
            if c == "\\":
                i += 2
                continue
            if c == "`":
                stack.pop()
                i += 1
                if not stack:
                    break
                continue
            if c == "$" and i + 1 < n and lexeme[i + 1] == "{":
                stack.append(0)
                if len(stack) == 2:
                    hole_start = i + 2
                i += 2
                continue
            i += 1
        else:
            if c == "{":
                stack[-1] += 1
                i += 1
            elif c == "}":
                if stack[-1] == 0:
                    stack.pop()
                    if len(stack) == 1 and hole_start >= 0:
                        holes.append((hole_start, i))
                        hole_start = -1
                else:
                    stack[-1] -= 1
                i += 1
            elif c == "`":
                stack.append(-1)
                i += 1
            elif c in "\"'":
                quote = c
                i += 1
                while i < n and lexeme[i] != quote and lexeme[i] not in "\n\r  ":
                    i += 2 if lexeme[i] == "\\" else 1
                if i < n and lexeme[i] == quote:
                    i += 1
            elif c == "/" and i + 1 < n and lexeme[i + 1] == "/":
                while i < n and lexeme[i] not in "\n\r  ":
                    i += 1
            elif c == "/" and i + 1 < n and lexeme[i + 1] == "*":
                end = lexeme.find("*/", i + 2)
                i = n if end == -1 else end + 2
            else:
                i += 1
    if hole_start >= 0 and len(stack) >= 2:
        holes.append((hole_start, n))
    return holes


def parse_file(path: str, source: str) -> SourceFileAst:
    """Parse one source file. Total: syntax errors are recorded and recovered
    from, never raised."""
    return Parser(path, source).parse()
