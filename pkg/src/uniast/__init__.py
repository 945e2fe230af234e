"""uniast: function-level code indexer for a TypeScript-like module language.

Builds a hierarchical code index (repository -> modules -> packages ->
entities) plus a global dependency graph with four relation kinds, and
provides query tooling over the serialized index.
"""

__version__ = "0.1.0"

from .entities import DependencySite, Entity, EntityId
from .graph import CodeGraph, Edge, SchemaError, UniAstIndex, load_index, serialize_index
from .indexer import BuildResult, IndexOptions, IndexStats, build_index
from .lexer import Span, Token, TokenKind, tokenize
from .parser import parse_file
from .project import ModuleSpec, ProjectLayout, discover_layout, read_manifest
from .resolve import Builtin, External, Internal, Resolution, Unresolved

__all__ = [
    "BuildResult",
    "Builtin",
    "CodeGraph",
    "DependencySite",
    "Edge",
    "Entity",
    "EntityId",
    "External",
    "IndexOptions",
    "IndexStats",
    "Internal",
    "ModuleSpec",
    "ProjectLayout",
    "Resolution",
    "SchemaError",
    "Span",
    "Token",
    "TokenKind",
    "UniAstIndex",
    "Unresolved",
    "build_index",
    "discover_layout",
    "load_index",
    "parse_file",
    "read_manifest",
    "serialize_index",
    "tokenize",
    "__version__",
]
