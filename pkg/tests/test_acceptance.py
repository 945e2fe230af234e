"""Acceptance suite: one test per acceptance criterion, at stated tolerance.

Each test prints a PASS line on success (visible with ``pytest -s`` or in
captured output); a failing criterion fails its test with full detail.
Criterion 5 measures generated repositories with bounds fixed below as
constants of this suite; nothing is tuned at runtime.
"""

from __future__ import annotations

import itertools
import json
import math
import random
import socket
import time
from collections import deque
from pathlib import Path

import pytest

from oracle_resolver import oracle_resolution_map, pipeline_resolution_map
from uniast.cli import main, neighbors_of
from uniast.graph import load_index, serialize_index
from uniast.indexer import IndexOptions, build_index
from uniast.resolve import Internal
from uniast.synth import SynthConfig, generate_repo, write_repo

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = FIXTURES / "userrepo.golden.json"


def report(criterion: str, detail: str = "") -> None:
    print(f"ACCEPTANCE {criterion}: PASS {detail}".rstrip())


# -- criterion 1: three-file golden -------------------------------------------


def test_c1_three_file_golden(tmp_path):
    started = time.perf_counter()
    result = build_index(FIXTURES / "userrepo")
    data = serialize_index(result.index)
    elapsed = time.perf_counter() - started
    doc = json.loads(data)

    expected_entities = {
        ("demo#user-repo.ts#UserRepo", "type"),
        ("demo#user-repo.ts#UserRepo.getById", "function"),
        ("demo#service.ts#loadUser", "function"),
    }
    actual_entities = {(e.id.render(), e.kind) for e in result.entities}
    assert actual_entities == expected_entities

    deps = sorted(
        (e["from"], e["to"], e["site_kind"])
        for e in doc["graph"]["edges"]
        if e["relation"] == "dependency"
    )
    assert deps == [
        ("demo#service.ts#loadUser", "demo#user-repo.ts#UserRepo", "constructor"),
        ("demo#service.ts#loadUser", "demo#user-repo.ts#UserRepo", "import_ref"),
        ("demo#service.ts#loadUser", "demo#user-repo.ts#UserRepo.getById", "method_call"),
    ]
    refs = sorted(
        (e["to"], e["from"], e["site_kind"])
        for e in doc["graph"]["edges"]
        if e["relation"] == "reference"
    )
    assert refs == deps  # exact mirrors
    assert [e for e in doc["graph"]["edges"] if e["relation"] in ("implementation", "group")] == []

    repo_hops = {
        r.hops
        for s, r in result.resolutions
        if s.raw_name == "Repo" and isinstance(r, Internal)
    }
    assert repo_hops == {2}  # traced through the barrel file

    assert data == GOLDEN.read_bytes()
    assert elapsed < 1.0, f"took {elapsed:.3f}s"
    report("C1 three-file fixture golden", f"(elapsed {elapsed*1000:.0f}ms)")


# -- criterion 2: inverse bijection over 200 synthetic repositories -----------


def test_c2_inverse_bijection_200_repos(tmp_path):
    rng = random.Random(20260808)
    violations = []
    for run in range(200):
        config = SynthConfig(
            n_files=rng.randint(2, 20),
            min_entities_per_file=1,
            max_entities_per_file=rng.randint(1, 10),
            reexport_depth=rng.randint(1, 4),
            seed=rng.randrange(2**32),
        )
        dest = tmp_path / f"r{run}"
        write_repo(generate_repo(config), dest)
        index = build_index(dest).index
        deps = sorted(
            (e.from_id.render(), e.to_id.render(), e.site_kind)
            for e in index.graph.edges
            if e.relation == "dependency"
        )
        refs = sorted(
            (e.to_id.render(), e.from_id.render(), e.site_kind)
            for e in index.graph.edges
            if e.relation == "reference"
        )
        if deps != refs:
            violations.append((run, "mirror mismatch"))
        node_set = {n.render() for n in index.graph.nodes}
        record_ids = {
            f"{m}#{p}#{s}"
            for m, module in index.modules.items()
            for p, package in module.packages.items()
            for s in package.all_records()
        }
        for edge in index.graph.edges:
            if edge.from_id.render() not in node_set or edge.to_id.render() not in node_set:
                violations.append((run, "edge endpoint outside nodes"))
        if record_ids != node_set:
            violations.append((run, "node/record mismatch"))
    assert violations == []
    report("C2 inverse bijection", "(200 synthetic repositories, 0 violations)")


# -- criterion 3: oracle equivalence on the fixture suite ----------------------


def test_c3_oracle_equivalence():
    suite = [
        ("userrepo", False),
        ("barrels", False),
        ("star_ambig", False),
        ("shadowing", False),
        ("cycle2", False),
        ("extends_chain", False),
        ("implements", False),
        ("misc", False),
        ("monorepo", True),
    ]
    for fixture, monorepo in suite:
        root = FIXTURES / fixture
        result = build_index(root, IndexOptions(monorepo=monorepo))
        actual = pipeline_resolution_map(result)
        expected = oracle_resolution_map(root, result.layout, result.sites)
        assert actual == expected, f"resolution map diverges from oracle on {fixture}"
    report("C3 oracle equivalence", f"({len(suite)} fixture repositories)")


# -- criterion 4: byte-identical reruns across job counts ----------------------


def test_c4_determinism(tmp_path):
    fixtures = ["userrepo", "barrels", "star_ambig", "shadowing", "cycle2",
                "extends_chain", "implements", "misc"]
    for fixture in fixtures:
        outputs = []
        for run, jobs in enumerate(("1", "1", "8", "8")):
            out = tmp_path / f"{fixture}_{run}.json"
            code = main(["index", str(FIXTURES / fixture), "--output", str(out), "--jobs", jobs])
            assert code == 0
            outputs.append(out.read_bytes())
        assert len(set(outputs)) == 1, f"{fixture} not byte-identical across runs"
    out_a = tmp_path / "mono_a.json"
    out_b = tmp_path / "mono_b.json"
    assert main(["index", str(FIXTURES / "monorepo"), "--monorepo", "--output", str(out_a), "--jobs", "1"]) == 0
    assert main(["index", str(FIXTURES / "monorepo"), "--monorepo", "--output", str(out_b), "--jobs", "8"]) == 0
    assert out_a.read_bytes() == out_b.read_bytes()
    report("C4 determinism", "(jobs 1 vs 8, byte-identical)")


# -- criterion 5: scaled performance and zero-network structure ----------------


@pytest.fixture
def no_network(monkeypatch):
    def deny(*args, **kwargs):
        raise AssertionError("network operation attempted during indexing")

    monkeypatch.setattr(socket, "socket", deny)
    monkeypatch.setattr(socket, "create_connection", deny)


def test_c5_scaled_performance(tmp_path, no_network):
    sizes = (250, 500, 1000)
    times: list[float] = []
    total_lines = 0
    for n_files in sizes:
        dest = tmp_path / f"scale_{n_files}"
        files = generate_repo(SynthConfig(n_files=n_files, target_lines_per_file=160, seed=99))
        write_repo(files, dest)
        line_count = sum(t.count("\n") for p, t in files.items() if p.endswith(".ts"))
        if n_files == 1000:
            total_lines = line_count
        started = time.perf_counter()
        result = build_index(dest)
        data = serialize_index(result.index)
        elapsed = time.perf_counter() - started
        (dest / "uniast.json").write_bytes(data)
        times.append(elapsed)
        assert result.stats.parse_errors == 0
        assert result.stats.unresolved == 0

    assert total_lines >= 150_000, f"generator produced only {total_lines} lines"
    assert times[-1] <= 60.0, f"1,000-file indexing took {times[-1]:.1f}s"

    xs = [math.log(n) for n in sizes]
    ys = [math.log(t) for t in times]
    mean_x = sum(xs) / len(xs)
    mean_y = sum(ys) / len(ys)
    slope = sum((x - mean_x) * (y - mean_y) for x, y in zip(xs, ys)) / sum(
        (x - mean_x) ** 2 for x in xs
    )
    assert slope <= 2.0, f"log-log scaling slope {slope:.2f} exceeds quadratic"
    report(
        "C5 scaled performance",
        f"(1000 files/{total_lines} lines in {times[-1]:.1f}s, slope {slope:.2f}, network disabled)",
    )


# -- criterion 6: totality on a malformed-file corpus --------------------------


def _fuzz_corpus(dest: Path, count: int) -> None:
    rng = random.Random(6)
    tokens = [
        "function", "class", "export", "import", "{", "}", "(", ")", "=>",
        "const", "=", ";", "name", '"./x"', "`tpl${", "new", "extends",
        "1.5e", "\\", "@", "#", "interface", "*", "...", ",", ":",
    ]
    dest.mkdir(parents=True, exist_ok=True)
    for i in range(count):
        style = i % 4
        if style == 0:
            content = bytes(rng.randrange(256) for _ in range(rng.randint(1, 400)))
        elif style == 1:
            content = " ".join(rng.choice(tokens) for _ in range(rng.randint(1, 80))).encode()
        elif style == 2:
            content = ("function f( {\nexport const k_%d = ;" % i).encode()
        else:
            valid = f"export function ok_{i}(n: number) {{ return n; }}\n"
            content = valid.encode()[: rng.randint(5, len(valid))]
        (dest / f"fuzz_{i:04d}.ts").write_bytes(content)


def test_c6_error_totality(tmp_path):
    repo = tmp_path / "fuzzrepo"
    _fuzz_corpus(repo, 1000)
    out = tmp_path / "fuzz.json"
    code = main(["index", str(repo), "--output", str(out)])
    assert code == 0
    index = load_index(out.read_bytes())  # schema-valid by construction
    assert index.diagnostics["parse_errors"] > 0
    files = next(iter(index.modules.values())).files
    assert len(files) == 1000
    report(
        "C6 error totality",
        f"(1000 malformed files, exit 0, {index.diagnostics['parse_errors']} parse errors recorded)",
    )


# -- criterion 7: neighbors queries vs hand-computed BFS -----------------------

# The three-file fixture's full edge list, entered by hand from criterion 1.
L = "demo#service.ts#loadUser"
R = "demo#user-repo.ts#UserRepo"
G = "demo#user-repo.ts#UserRepo.getById"
HAND_EDGES = [
    (L, R, "dependency"),
    (L, R, "dependency"),  # constructor and import_ref collapse to one adjacency
    (L, G, "dependency"),
    (R, L, "reference"),
    (R, L, "reference"),
    (G, L, "reference"),
]


def hand_bfs(center: str, relations: set[str], depth: int) -> dict[str, int]:
    adjacency: dict[str, set[str]] = {}
    for from_id, to_id, relation in HAND_EDGES:
        if relation in relations:
            adjacency.setdefault(from_id, set()).add(to_id)
    seen = {center: 0}
    queue = deque([(center, 0)])
    while queue:
        node, hops = queue.popleft()
        if hops == depth:
            continue
        for target in sorted(adjacency.get(node, ())):
            if target not in seen:
                seen[target] = hops + 1
                queue.append((target, hops + 1))
    seen.pop(center)
    return seen


def test_c7_query_correctness(tmp_path):
    out = tmp_path / "l1.json"
    assert main(["index", str(FIXTURES / "userrepo"), "--output", str(out)]) == 0
    index = load_index(out.read_bytes())

    relation_names = ("dependency", "reference", "implementation", "group")
    subsets = [
        set(combo)
        for size in range(1, 5)
        for combo in itertools.combinations(relation_names, size)
    ]
    assert len(subsets) == 15
    checked = 0
    for center in (L, R, G):
        for subset in subsets:
            for depth in (1, 2, 3):
                expected = hand_bfs(center, subset, depth)
                actual = {
                    n["id"]: n["hops"]
                    for n in neighbors_of(index, center, tuple(sorted(subset)), depth)
                }
                assert actual == expected, (center, sorted(subset), depth)
                checked += 1
    report("C7 query correctness", f"({checked} center/relation-subset/depth combinations)")
