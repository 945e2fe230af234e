"""Repository layout discovery: manifests, module boundaries, source files.

A repository is either a single module (one project) or, in monorepo mode,
one module per workspace directory matched by the root manifest's workspace
globs. Source enumeration is recursive, deterministic (sorted), and skips
installed dependencies, hidden directories, build output, and
declaration-only files.
"""

from __future__ import annotations

import fnmatch
import json
import posixpath
from dataclasses import dataclass, field
from pathlib import Path

SOURCE_EXTENSIONS = (".ts", ".tsx")
DECLARATION_SUFFIXES = (".d.ts", ".d.tsx")
MANIFEST_NAME = "package.json"

# Directory basenames never indexed; extend via the `extra_excludes` globs.
DEFAULT_EXCLUDED_DIRS = frozenset(
    {"node_modules", "dist", "build", "out", "__snapshots__"}
)


class MalformedManifest(Exception):
    def __init__(self, path: str) -> None:
        super().__init__(f"malformed manifest: {path}")
        self.path = path


class NotADirectory(Exception):
    def __init__(self, path: str) -> None:
        super().__init__(f"not a directory: {path}")
        self.path = path


@dataclass(slots=True)
class Manifest:
    name: str | None
    dependencies: list[str]
    workspaces: list[str]


@dataclass(slots=True)
class ModuleSpec:
    name: str
    root_dir: str  # repo-relative, "" for the repository root
    manifest: Manifest
    source_files: list[str]  # repo-relative, sorted


@dataclass(slots=True)
class ProjectLayout:
    repo_name: str
    modules: list[ModuleSpec]
    mode: str  # "single" | "monorepo"
    warnings: list[str] = field(default_factory=list)

    def file_set(self) -> set[str]:
        return {f for m in self.modules for f in m.source_files}

    def module_of_file(self) -> dict[str, str]:
        return {f: m.name for m in self.modules for f in m.source_files}


def read_manifest(path: Path) -> Manifest:
    """Read a package manifest. Dependencies are the union of the runtime and
    dev sections; unknown fields are ignored.

    Raises MalformedManifest when the file is not a JSON object.
    """
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (ValueError, OSError, UnicodeDecodeError) as exc:
        raise MalformedManifest(str(path)) from exc
    if not isinstance(data, dict):
        raise MalformedManifest(str(path))
    name = data.get("name")
    if not isinstance(name, str) or not name:
        name = None
    deps: list[str] = []
    for section in ("dependencies", "devDependencies"):
        sec = data.get(section)
        if isinstance(sec, dict):
            deps.extend(k for k in sec.keys() if isinstance(k, str))
    workspaces = data.get("workspaces")
    if isinstance(workspaces, dict):  # {"packages": [...]} variant
        workspaces = workspaces.get("packages")
    if not isinstance(workspaces, list):
        workspaces = []
    globs = [w for w in workspaces if isinstance(w, str)]
    return Manifest(name, sorted(set(deps)), globs)


def _read_manifest_or_anonymous(path: Path, warnings: list[str]) -> Manifest:
    if not path.is_file():
        return Manifest(None, [], [])
    try:
        return read_manifest(path)
    except MalformedManifest:
        warnings.append(f"malformed manifest ignored: {path}")
        return Manifest(None, [], [])


def _is_source_file(name: str) -> bool:
    if not name.endswith(SOURCE_EXTENSIONS):
        return False
    return not name.endswith(DECLARATION_SUFFIXES)


def _walk_sources(
    root: Path,
    base_rel: str,
    extra_excludes: tuple[str, ...],
    skip_dirs: set[str] | None = None,
) -> list[str]:
    """Collect repo-relative source files under ``root``/``base_rel``."""
    found: list[str] = []
    start = root / base_rel if base_rel else root
    stack = [start]
    while stack:
        directory = stack.pop()
        try:
            entries = sorted(directory.iterdir(), key=lambda p: p.name)
        except OSError:
            continue
        for entry in entries:
            rel = entry.relative_to(root).as_posix()
            if entry.is_dir():
                if entry.name.startswith("."):
                    continue
                if entry.name in DEFAULT_EXCLUDED_DIRS:
                    continue
                if skip_dirs and rel in skip_dirs:
                    continue
                if any(fnmatch.fnmatch(rel, g) or fnmatch.fnmatch(entry.name, g) for g in extra_excludes):
                    continue
                stack.append(entry)
            elif entry.is_file() and _is_source_file(entry.name):
                if any(fnmatch.fnmatch(rel, g) for g in extra_excludes):
                    continue
                found.append(rel)
    return sorted(found)


def _expand_workspace_dirs(root: Path, globs: list[str]) -> list[str]:
    """Workspace directories (repo-relative) matched by the manifest globs,
    in lexicographic order."""
    matched: set[str] = set()
    for pattern in globs:
        pattern = pattern.rstrip("/")
        for candidate in sorted(root.glob(pattern)):
            if candidate.is_dir() and not candidate.name.startswith("."):
                matched.add(candidate.relative_to(root).as_posix())
    return sorted(matched)


def discover_layout(
    root: Path,
    monorepo: bool = False,
    extra_excludes: tuple[str, ...] = (),
    include_root_module: bool = False,
) -> ProjectLayout:
    """Determine module boundaries and enumerate source files.

    Single mode: one module covering the whole repository, named from the
    root manifest (directory base name when absent). Monorepo mode: one
    module per workspace directory that carries a manifest; files matched by
    more than one workspace are assigned to the lexicographically first
    matching module with a warning.

    Raises NotADirectory; an empty project is a warning, not an error.
    """
    root = Path(root)
    if not root.is_dir():
        raise NotADirectory(str(root))
    warnings: list[str] = []
    root_manifest = _read_manifest_or_anonymous(root / MANIFEST_NAME, warnings)
    repo_name = root_manifest.name or root.resolve().name

    if not monorepo:
        files = _walk_sources(root, "", extra_excludes)
        module = ModuleSpec(repo_name, "", root_manifest, files)
        if not files:
            warnings.append("empty project: no source files found")
        return ProjectLayout(repo_name, [module], "single", warnings)

    workspace_dirs = _expand_workspace_dirs(root, root_manifest.workspaces)
    modules: list[ModuleSpec] = []
    taken_names: set[str] = set()
    claimed: set[str] = set()
    for ws_dir in workspace_dirs:
        manifest_path = root / ws_dir / MANIFEST_NAME
        if not manifest_path.is_file():
            warnings.append(f"workspace without manifest skipped: {ws_dir}")
            continue
        manifest = _read_manifest_or_anonymous(manifest_path, warnings)
        name = manifest.name or posixpath.basename(ws_dir)
        if name in taken_names:
            unique = ws_dir.replace("/", "_")
            warnings.append(f"duplicate module name {name!r}; using {unique!r} for {ws_dir}")
            name = unique
        taken_names.add(name)
        files = _walk_sources(root, ws_dir, extra_excludes)
        fresh = [f for f in files if f not in claimed]
        if len(fresh) != len(files):
            warnings.append(f"files matched by multiple workspaces assigned to an earlier module; skipped in {name}")
        claimed.update(fresh)
        modules.append(ModuleSpec(name, ws_dir, manifest, fresh))

    if include_root_module:
        root_files = [
            f
            for f in _walk_sources(root, "", extra_excludes, skip_dirs=set(workspace_dirs))
            if f not in claimed and not any(f.startswith(d + "/") for d in workspace_dirs)
        ]
        name = repo_name
        if name in taken_names:
            name = repo_name + "_root"
        modules.insert(0, ModuleSpec(name, "", root_manifest, root_files))

    if not any(m.source_files for m in modules):
        warnings.append("empty project: no source files found")
    return ProjectLayout(repo_name, modules, "monorepo", warnings)
