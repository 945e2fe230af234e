"""Seeded synthetic repository generator.

Emits valid source in the supported subset: leaf files with functions,
classes, interfaces, enums, and const groups; barrel files that re-export
(with aliases and stars) in chains of configurable depth; and consumer files
that import through the chains and exercise calls, constructors, method
calls, and type annotations. Output is a pure function of the config, so
generated repositories are reproducible across runs and machines.

Used by the test suite (graph invariants over many random repositories) and
by the benchmark scripts (large repositories for timing runs).
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path


@dataclass(slots=True)
class SynthConfig:
    n_files: int = 10
    min_entities_per_file: int = 1
    max_entities_per_file: int = 10
    reexport_depth: int = 4  # barrel chain length consumers import through
    target_lines_per_file: int = 0  # pad function bodies up to roughly this
    seed: int = 0


@dataclass(slots=True)
class _Export:
    name: str
    kind: str  # "function" | "class" | "interface"
    method: str | None = None  # one callable method for class exports


def _file_stem(index: int) -> str:
    return f"src/mod_{index:04d}"


def generate_repo(config: SynthConfig) -> dict[str, str]:
    """Generate {repo-relative path: source text} including the manifest."""
    rng = random.Random(config.seed)
    files: dict[str, str] = {}
    exports_by_file: dict[str, list[_Export]] = {}

    depth = max(0, min(config.reexport_depth - 1, config.n_files - 1))
    n_barrels = depth if config.n_files >= 3 else 0
    n_consumers = 1 if config.n_files >= 2 and n_barrels < config.n_files - 1 else 0
    n_leaves = max(1, config.n_files - n_barrels - n_consumers)

    leaf_paths: list[str] = []
    for i in range(n_leaves):
        path = f"{_file_stem(i)}.ts"
        source, exports = _leaf_file(i, rng, config, leaf_paths, exports_by_file)
        files[path] = source
        exports_by_file[path] = exports
        leaf_paths.append(path)

    # barrel chain: barrel_0 re-exports leaves, barrel_k re-exports barrel_{k-1}
    previous_layer = leaf_paths
    barrel_paths: list[str] = []
    for level in range(n_barrels):
        path = f"src/barrel_{level:02d}.ts"
        source, exports = _barrel_file(previous_layer, exports_by_file, rng)
        files[path] = source
        exports_by_file[path] = exports
        barrel_paths.append(path)
        previous_layer = [path]

    if n_consumers:
        entry = barrel_paths[-1] if barrel_paths else leaf_paths[-1]
        path = "src/consumer.ts"
        files[path] = _consumer_file(entry, exports_by_file[entry], rng, config)

    files["package.json"] = json.dumps({"name": "synth"}, indent=2) + "\n"
    return files


def _pad_body(lines: list[str], rng: random.Random, extra: int) -> None:
    for i in range(extra):
        a, b = rng.randint(1, 99), rng.randint(1, 99)
        lines.append(f"  const pad_{i} = {a} + {b} * {rng.randint(2, 9)};")


def _leaf_file(
    index: int,
    rng: random.Random,
    config: SynthConfig,
    earlier: list[str],
    exports_by_file: dict[str, list[_Export]],
) -> tuple[str, list[_Export]]:
    lines: list[str] = []
    exports: list[_Export] = []
    tag = f"{index:04d}"

    imported: list[tuple[str, _Export]] = []  # (local name, export)
    if earlier:
        for source_path in rng.sample(earlier, min(len(earlier), rng.randint(0, 2))):
            source_exports = exports_by_file[source_path]
            if not source_exports:
                continue
            chosen = rng.choice(source_exports)
            spec = "./" + source_path.removeprefix("src/").removesuffix(".ts")
            if rng.random() < 0.2:
                ns = f"ns_{len(imported)}_{tag}"
                lines.append(f'import * as {ns} from "{spec}";')
                imported.append((ns, _Export(f"{ns}.{chosen.name}", "namespace:" + chosen.kind, chosen.method)))
            elif rng.random() < 0.3:
                local = f"ali_{len(imported)}_{tag}"
                lines.append(f'import {{ {chosen.name} as {local} }} from "{spec}";')
                imported.append((local, _Export(local, chosen.kind, chosen.method)))
            else:
                lines.append(f'import {{ {chosen.name} }} from "{spec}";')
                imported.append((chosen.name, chosen))
    if lines:
        lines.append("")

    budget = rng.randint(config.min_entities_per_file, config.max_entities_per_file)
    emitted = 0
    local_functions: list[str] = []
    kinds = ["function", "class", "interface", "enum", "const_group", "alias"]
    while emitted < budget:
        kind = rng.choice(kinds) if emitted else "function"
        serial = f"{tag}_{emitted}"
        if kind == "function":
            name = f"fn_{serial}"
            body = [f"  const seed = {rng.randint(1, 999)};"]
            use = rng.choice(imported) if imported and rng.random() < 0.8 else None
            if use is not None:
                local, exp = use
                base_kind = exp.kind.removeprefix("namespace:")
                callee = exp.name if exp.kind.startswith("namespace:") else local
                if base_kind == "function":
                    body.append(f"  const got = {callee}(seed);")
                elif base_kind == "class":
                    body.append(f"  const obj = new {callee}();")
                    if exp.method:
                        body.append(f"  obj.{exp.method}();")
                elif base_kind == "interface":
                    body.append(f"  const cfg: {callee} = null as any;")
            if local_functions and rng.random() < 0.5:
                body.append(f"  return {rng.choice(local_functions)}(seed);")
            else:
                body.append("  return seed;")
            if config.target_lines_per_file:
                _pad_body(body, rng, max(0, config.target_lines_per_file // max(budget, 1) - len(body) - 2))
            lines.append(f"export function {name}(n: number): number {{")
            lines.extend(body)
            lines.append("}")
            local_functions.append(name)
            exports.append(_Export(name, "function"))
            emitted += 1
        elif kind == "class":
            name = f"Cls_{serial}"
            method = f"m_{serial}"
            heritage = ""
            impl = next((e for _, e in imported if e.kind == "interface"), None)
            if impl is not None and rng.random() < 0.6:
                heritage = f" implements {impl.name}"
            lines.append(f"export class {name}{heritage} {{")
            lines.append(f"  counter: number = {rng.randint(0, 9)};")
            inner = f"    return this.counter + {rng.randint(1, 9)};"
            if local_functions and rng.random() < 0.5:
                inner = f"    return {rng.choice(local_functions)}(this.counter);"
            lines.append(f"  {method}(): number {{")
            lines.append(inner)
            lines.append("  }")
            lines.append("}")
            exports.append(_Export(name, "class", method))
            emitted += 2  # class + method entity
        elif kind == "interface":
            name = f"Iface_{serial}"
            lines.append(f"export interface {name} {{")
            lines.append(f"  describe(input: string): string;")
            lines.append("}")
            exports.append(_Export(name, "interface"))
            emitted += 1
        elif kind == "enum":
            lines.append(f"export enum Mode_{serial} {{ On, Off = {rng.randint(2, 9)} }}")
            emitted += 1
        elif kind == "const_group":
            names = [f"k{j}_{serial}" for j in range(rng.randint(2, 3))]
            parts = ", ".join(f"{n} = {rng.randint(0, 99)}" for n in names)
            lines.append(f"export const {parts};")
            emitted += len(names)
        else:  # alias
            lines.append(f"export type Pair_{serial} = [number, string];")
            emitted += 1
        lines.append("")

    filler = 0
    while config.target_lines_per_file and len(lines) < config.target_lines_per_file:
        name = f"fill_{tag}_{filler}"
        body: list[str] = []
        _pad_body(body, rng, min(20, config.target_lines_per_file - len(lines)))
        lines.append(f"function {name}(n: number): number {{")
        lines.extend(body)
        lines.append("  return n;")
        lines.append("}")
        lines.append("")
        local_functions.append(name)
        filler += 1
    return "\n".join(lines).rstrip() + "\n", exports


def _barrel_file(
    layer: list[str],
    exports_by_file: dict[str, list[_Export]],
    rng: random.Random,
) -> tuple[str, list[_Export]]:
    lines: list[str] = []
    exports: list[_Export] = []
    starred: set[str] = set()
    for source_path in layer:
        spec = "./" + source_path.removeprefix("src/").removesuffix(".ts")
        source_exports = exports_by_file[source_path]
        if rng.random() < 0.5 or not source_exports:
            lines.append(f'export * from "{spec}";')
            starred.add(source_path)
            exports.extend(source_exports)
        else:
            picked = rng.sample(source_exports, min(len(source_exports), rng.randint(1, 3)))
            clauses = []
            for exp in picked:
                if rng.random() < 0.5:
                    alias = f"{exp.name}_x"
                    clauses.append(f"{exp.name} as {alias}")
                    exports.append(_Export(alias, exp.kind, exp.method))
                else:
                    clauses.append(exp.name)
                    exports.append(exp)
            lines.append(f'export {{ {", ".join(clauses)} }} from "{spec}";')
    return "\n".join(lines) + "\n", exports


def _consumer_file(
    entry: str,
    available: list[_Export],
    rng: random.Random,
    config: SynthConfig,
) -> str:
    spec = "./" + entry.removeprefix("src/").removesuffix(".ts")
    usable = [e for e in available if not e.kind.startswith("namespace:")]
    picked = rng.sample(usable, min(len(usable), rng.randint(1, 4))) if usable else []
    names = sorted({e.name for e in picked})
    lines = []
    if names:
        lines.append(f'import {{ {", ".join(names)} }} from "{spec}";')
    lines.append("")
    lines.append("export function consume(seed: number): number {")
    lines.append("  let acc = seed;")
    for exp in picked:
        if exp.kind == "function":
            lines.append(f"  acc = acc + {exp.name}(acc);")
        elif exp.kind == "class":
            var = f"v_{exp.name.lower()}"
            lines.append(f"  const {var} = new {exp.name}();")
            if exp.method:
                lines.append(f"  {var}.{exp.method}();")
        elif exp.kind == "interface":
            lines.append(f"  const c_{exp.name.lower()}: {exp.name} = null as any;")
    if config.target_lines_per_file:
        _pad_body(lines, rng, max(0, config.target_lines_per_file - len(lines) - 2))
    lines.append("  return acc;")
    lines.append("}")
    return "\n".join(lines) + "\n"


def write_repo(files: dict[str, str], dest: Path) -> None:
    for rel_path, content in files.items():
        target = dest / rel_path
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(content, encoding="utf-8")


def generate_and_write(config: SynthConfig, dest: Path) -> int:
    """Write a generated repository; returns total source line count."""
    files = generate_repo(config)
    write_repo(files, dest)
    return sum(text.count("\n") for path, text in files.items() if path.endswith(".ts"))
