"""Lexer for the supported TypeScript-like language subset.

Produces a full-fidelity token stream: concatenating the lexemes of all
tokens (trivia included) reproduces the input exactly. Tokenization is
total -- bytes that fit no rule become single-character error tokens, and
unterminated strings, comments, and templates extend to the line end or
end of input rather than failing.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum


class TokenKind(Enum):
    IDENTIFIER = "identifier"
    KEYWORD = "keyword"
    PUNCTUATION = "punctuation"
    STRING = "string"
    NUMBER = "number"
    TEMPLATE = "template"
    REGEX = "regex"
    COMMENT = "comment-trivia"
    WHITESPACE = "whitespace-trivia"
    NEWLINE = "newline-trivia"
    ERROR = "error"
    EOF = "eof"


TRIVIA_KINDS = frozenset({TokenKind.COMMENT, TokenKind.WHITESPACE, TokenKind.NEWLINE})

# Reserved words of the base language. Contextual keywords (type, as, from,
# of, async, declare, namespace, readonly, ...) lex as identifiers; the
# parser recognizes them by lexeme where the grammar needs them.
RESERVED_WORDS = frozenset(
    {
        "break", "case", "catch", "class", "const", "continue", "debugger",
        "default", "delete", "do", "else", "enum", "export", "extends",
        "false", "finally", "for", "function", "if", "import", "in",
        "instanceof", "new", "null", "return", "super", "switch", "this",
        "throw", "true", "try", "typeof", "var", "void", "while", "with",
        "let", "static", "yield", "await", "implements", "interface",
        "package", "private", "protected", "public",
    }
)

_LINE_TERMINATORS = "\n\r  "


@dataclass(frozen=True, slots=True)
class Span:
    """Byte range plus 1-based line/column range of a source region.

    ``byte_end`` and ``end_col`` are exclusive.
    """

    byte_start: int
    byte_end: int
    start_line: int
    start_col: int
    end_line: int
    end_col: int

    def contains(self, other: "Span") -> bool:
        return self.byte_start <= other.byte_start and other.byte_end <= self.byte_end


@dataclass(slots=True)
class Token:
    kind: TokenKind
    lexeme: str
    byte_start: int
    byte_end: int
    char_start: int  # offset into the decoded text, for slicing
    char_end: int
    start_line: int
    start_col: int
    end_line: int
    end_col: int

    @property
    def span(self) -> Span:
        return Span(
            self.byte_start, self.byte_end,
            self.start_line, self.start_col,
            self.end_line, self.end_col,
        )


_MASTER = re.compile(
    r"""(?P<ws>[ \t\f\v]+)
      | (?P<nl>\r\n|[\n\r  ])
      | (?P<comment>//[^\n\r  ]*
                   |/\*[\s\S]*?\*/
                   |/\*[\s\S]*\Z)
      | (?P<number>0[xX][0-9a-fA-F][0-9a-fA-F_]*n?
                  |0[bB][01][01_]*n?
                  |0[oO][0-7][0-7_]*n?
                  |(?:\d[\d_]*(?:\.[\d_]*)?|\.\d[\d_]*)(?:[eE][+-]?\d+)?n?)
      | (?P<word>(?:[^\W\d]|\$)(?:\w|\$)*)
      | (?P<string>"(?:[^"\\\n\r  ]|\\[\s\S])*"?
                  |'(?:[^'\\\n\r  ]|\\[\s\S])*'?)
      | (?P<punct>>>>=|\.\.\.|===|!==|\*\*=|<<=|>>=|&&=|\|\|=|\?\?=
                 |>>>|=>|\?\.|\*\*|==|!=|<=|>=|&&|\|\||\?\?|\+\+|--
                 |\+=|-=|\*=|/=|%=|&=|\|=|\^=|<<|>>
                 |[{}()\[\];,.<>+\-*/%&|^!~?:=@\#])
    """,
    re.VERBOSE,
)

_GROUP_KIND = {
    "ws": TokenKind.WHITESPACE,
    "nl": TokenKind.NEWLINE,
    "comment": TokenKind.COMMENT,
    "number": TokenKind.NUMBER,
    "word": TokenKind.IDENTIFIER,
    "string": TokenKind.STRING,
    "punct": TokenKind.PUNCTUATION,
}

# A `/` starts a regex literal only where an expression may begin; after a
# value-like token it is a division operator.
_NO_REGEX_AFTER_PUNCT = frozenset({")", "]", "}", "++", "--"})
_VALUE_KEYWORDS = frozenset({"this", "super", "true", "false", "null"})


def _regex_allowed(prev_kind: TokenKind | None, prev_lexeme: str) -> bool:
    if prev_kind is None:
        return True
    if prev_kind is TokenKind.KEYWORD:
        return prev_lexeme not in _VALUE_KEYWORDS
    if prev_kind is TokenKind.PUNCTUATION:
        return prev_lexeme not in _NO_REGEX_AFTER_PUNCT
    return False


def _scan_regex(source: str, pos: int) -> int:
    """Scan a regex literal starting at ``pos`` (the opening slash).

    Returns the end offset, or -1 if no well-formed regex starts here
    (the caller then lexes a plain ``/`` operator).
    """
    i = pos + 1
    n = len(source)
    in_class = False
    while i < n:
        c = source[i]
        if c == "\\":
            i += 2
            continue
        if c in _LINE_TERMINATORS:
            return -1
        if in_class:
            if c == "]":
                in_class = False
        elif c == "[":
            in_class = True
        elif c == "/":
            i += 1
            while i < n and (source[i].isalnum() or source[i] in "_$"):
                i += 1
            return i
        i += 1
    return -1


def _scan_template(source: str, pos: int) -> int:
    """Scan a template literal starting at ``pos`` (the opening backtick).

    Handles nested ``${...}`` substitutions, including strings, comments,
    and further templates inside them, with an explicit mode stack so that
    arbitrarily deep nesting cannot overflow. An unterminated template
    extends to end of input.
    """
    n = len(source)
    i = pos + 1
    # Stack entries: -1 for template mode, >= 0 for expression mode where the
    # value is the open-brace depth inside the substitution.
    stack: list[int] = [-1]
    while i < n:
        c = source[i]
        if stack[-1] == -1:  # template text
            if c == "\\":
                i += 2
                continue
            if c == "`":
                stack.pop()
                i += 1
                if not stack:
                    return i
                continue
            if c == "$" and i + 1 < n and source[i + 1] == "{":
                stack.append(0)
                i += 2
                continue
            i += 1
        else:  # substitution expression
            if c == "{":
                stack[-1] += 1
                i += 1
            elif c == "}":
                if stack[-1] == 0:
                    stack.pop()
                else:
                    stack[-1] -= 1
                i += 1
            elif c == "`":
                stack.append(-1)
                i += 1
            elif c in "\"'":
                i += 1
                while i < n and source[i] != c and source[i] not in _LINE_TERMINATORS:
                    i += 2 if source[i] == "\\" else 1
                if i < n and source[i] == c:
                    i += 1
            elif c == "/" and i + 1 < n and source[i + 1] == "/":
                while i < n and source[i] not in _LINE_TERMINATORS:
                    i += 1
            elif c == "/" and i + 1 < n and source[i + 1] == "*":
                end = source.find("*/", i + 2)
                i = n if end == -1 else end + 2
            else:
                i += 1
    return n  # unterminated


def _count_lines(lexeme: str) -> tuple[int, int]:
    """Return (number of line breaks, offset of the char after the last break)."""
    breaks = lexeme.count("\n") + lexeme.count(" ") + lexeme.count(" ")
    breaks += lexeme.count("\r") - lexeme.count("\r\n")
    if not breaks:
        return 0, 0
    last = max(lexeme.rfind(c) for c in _LINE_TERMINATORS)
    return breaks, last + 1


def tokenize(source: str) -> list[Token]:
    """Lex ``source`` into a lossless token stream. Never fails."""
    tokens: list[Token] = []
    append = tokens.append
    pos = 0
    n = len(source)
    line = 1
    col = 1
    byte_pos = 0
    ascii_only = source.isascii()
    prev_kind: TokenKind | None = None
    prev_lexeme = ""

    while pos < n:
        ch = source[pos]
        end = -1
        kind: TokenKind | None = None

        if ch == "`":
            end = _scan_template(source, pos)
            kind = TokenKind.TEMPLATE
        elif (
            ch == "/"
            and (pos + 1 >= n or source[pos + 1] not in "/*")
            and _regex_allowed(prev_kind, prev_lexeme)
        ):
            scanned = _scan_regex(source, pos)
            if scanned != -1:
                end = scanned
                kind = TokenKind.REGEX

        if kind is None:
            m = _MASTER.match(source, pos)
            if m is not None:
                end = m.end()
                kind = _GROUP_KIND[m.lastgroup]  # type: ignore[index]
                if kind is TokenKind.IDENTIFIER and m.group() in RESERVED_WORDS:
                    kind = TokenKind.KEYWORD
            else:
                end = pos + 1
                kind = TokenKind.ERROR

        lexeme = source[pos:end]
        byte_len = end - pos if ascii_only else len(lexeme.encode("utf-8"))
        breaks, after_last_break = _count_lines(lexeme)
        if breaks:
            end_line = line + breaks
            end_col = len(lexeme) - after_last_break + 1
        else:
            end_line = line
            end_col = col + len(lexeme)

        append(
            Token(
                kind, lexeme,
                byte_pos, byte_pos + byte_len,
                pos, end,
                line, col, end_line, end_col,
            )
        )
        if kind not in TRIVIA_KINDS:
            prev_kind = kind
            prev_lexeme = lexeme
        pos = end
        byte_pos += byte_len
        line = end_line
        col = end_col

    return tokens
