"""Acceptance gate: one test per criterion, each recording a PASS/FAIL line."""

import io
import random
import time

from conftest import record
from instances import two_block_boundary, wide_conflict
from oracles import brute_mhs, brute_mus, random_clauses, random_collection
from spacerev import cli
from spacerev.bench import check_trend, run_sweep
from spacerev.consistency import conflict_size, is_consistent, minimal_conflicts
from spacerev.errors import BudgetExceeded
from spacerev.flood import GenParams, compile, generate
from spacerev.graph import partition
from spacerev.hitting import combine_independent, combine_min_union, hs_tree
from spacerev.revision import check_h0, contained_revision, global_rdr


def test_criterion_1_hs_tree_oracle():
    rng = random.Random(101)
    t0 = time.perf_counter()
    mismatches = 0
    for _ in range(500):
        coll = random_collection(rng, rng.randint(0, 6), rng.randint(1, 10))
        if hs_tree(coll)[0] != brute_mhs(coll):
            mismatches += 1
    dt = time.perf_counter() - t0
    ok = mismatches == 0 and dt < 10
    record(1, ok, f"500 collections, {mismatches} mismatches, {dt:.2f}s (limit 10s)")
    assert ok


def test_criterion_2_mus_oracle():
    rng = random.Random(202)
    t0 = time.perf_counter()
    mismatches = 0
    for _ in range(300):
        cs = random_clauses(rng, rng.randint(1, 14), rng.randint(1, 10))
        if {c.clause_ids for c in minimal_conflicts(cs, max_card=None, max_nodes=None)} != brute_mus(cs):
            mismatches += 1
    dt = time.perf_counter() - t0
    ok = mismatches == 0 and dt < 60
    record(2, ok, f"300 clause sets, {mismatches} mismatches, {dt:.2f}s (limit 60s)")
    assert ok


def test_criterion_3_combination():
    rng = random.Random(303)
    t0 = time.perf_counter()
    bad = 0
    for _ in range(200):
        # element-disjoint parts
        parts, offset = [], 0
        for _ in range(rng.randint(1, 3)):
            n = rng.randint(1, 4)
            parts.append([frozenset(x + offset for x in c) for c in random_collection(rng, rng.randint(0, 3), n)])
            offset += n
        union = [c for p in parts for c in p]
        combined = {frozenset()}
        for p in parts:
            combined = combine_independent(combined, hs_tree(p)[0])
        bad += combined != brute_mhs(union)
        # arbitrary grouping of a shared-element collection
        coll = random_collection(rng, rng.randint(0, 6), rng.randint(1, 8))
        groups = [[] for _ in range(rng.randint(1, 4))]
        for c in coll:
            groups[rng.randrange(len(groups))].append(c)
        bad += combine_min_union([hs_tree(g)[0] for g in groups]) != brute_mhs(coll)
    dt = time.perf_counter() - t0
    ok = bad == 0 and dt < 30
    record(3, ok, f"200 decompositions x2, {bad} mismatches, {dt:.2f}s (limit 30s)")
    assert ok


def _instance(rng, i):
    if i % 2:
        return GenParams(rng.randint(10, 30), "path", rng.choice([3, 4]), 0.2, 0.6, rng.choice([1, 2]))
    rows, cols = rng.randint(3, 5), rng.randint(3, 5)
    size = rng.choice([1, 2]) if max(rows, cols) >= 5 else 1
    return GenParams(rows * cols, "grid", rng.choice([3, 4]), 0.2, 0.6, size, grid_cols=cols)


def test_criterion_4_contained_equals_global():
    rng = random.Random(404)
    k, kprime = 2, 4
    t0 = time.perf_counter()
    accepted = rejected = bad = 0
    i = 0
    while accepted < 200 and i < 2000:
        i += 1
        kb = compile(generate(_instance(rng, i), i))
        try:
            glob = global_rdr(kb, max_card=8, max_nodes=30_000)
        except BudgetExceeded:
            rejected += 1
            continue
        if any(conflict_size(c, kb) > kprime - k for c in glob.conflicts):
            rejected += 1
            continue
        res = contained_revision(kb, k, kprime, max_card=8)
        accepted += 1
        if res.global_hitting_sets != glob.global_hitting_sets or not is_consistent(res.revised_kb.clauses):
            bad += 1
    dt = time.perf_counter() - t0
    ok = accepted == 200 and bad == 0 and dt < 300
    record(4, ok, f"{accepted} instances ({rejected} rejected: oversized or over budget), {bad} failures, {dt:.1f}s (limit 300s)")
    assert ok


def test_criterion_5_boundary_conflict():
    kb = two_block_boundary()
    base = partition(kb.graph, 3, 4)
    local_ok = all(is_consistent([c for c in kb if c.footprint <= w]) for w in base.windows)
    res = contained_revision(kb, 3, 4)
    glob = global_rdr(kb)
    base_found = res.passes[0].new_conflicts
    shift_found = [p.origin for p in res.passes[1:] if p.new_conflicts]
    ok = (
        [len(b) for b in base.blocks] == [4, 3]
        and local_ok
        and base_found == 0
        and bool(shift_found)
        and res.chosen != frozenset()
        and res.chosen == glob.chosen
        and res.global_hitting_sets == glob.global_hitting_sets
    )
    record(5, ok, f"base pass found {base_found}, caught by {shift_found}, chosen {sorted(res.chosen)} = global {sorted(glob.chosen)}")
    assert ok


def test_criterion_6_divergence_flagged(tmp_path):
    kb = wide_conflict()
    graph, clauses = tmp_path / "g", tmp_path / "c"
    graph.write_text(kb.graph.to_text())
    clauses.write_text(kb.to_text())
    out = io.StringIO()
    code = cli.main(["compare", "--graph", str(graph), "--clauses", str(clauses), "--budget-card", "8", "--format", "tsv"], out=out)
    header, row = out.getvalue().strip().split("\n")
    fields = dict(zip(header.split("\t"), row.split("\t")))
    res = contained_revision(kb, 2, 4, max_card=8)
    ok = (
        code == cli.EXIT_OK
        and fields["verdict"] == "DIVERGENT (conjecture violated)"
        and fields["conjecture_verified"] == "no"
        and not res.conjecture_verified
        and not is_consistent(res.revised_kb.clauses)
    )
    record(6, ok, f"exit {code}, verdict {fields['verdict']!r}, conjecture_verified={fields['conjecture_verified']}, revised base left inconsistent")
    assert ok


def test_criterion_7_scaling_trend():
    t0 = time.perf_counter()
    rows = run_sweep(range(2, 17, 2), k=2, kprime=4, levels=6, repeat=3, instances=8)
    trend = check_trend(rows)
    dt = time.perf_counter() - t0
    reached = [r.blocks for r in rows if r.t_global is not None]
    ok = trend.ok and dt < 600
    growth = "n/a" if trend.global_growth is None else f"{trend.global_growth:.1f}x"
    record(
        7, ok,
        f"contained worst ratio to linear fit {trend.worst_linear_ratio:.2f} (limit 3), "
        f"global growth {growth} (need >10) up to {max(reached, default=0)} blocks, {dt:.1f}s",
    )
    assert ok


def test_criterion_8_h0_boundary():
    table = [(d_c, 3 * d_c, True) for d_c in range(0, 8)] + [(d_c, 3 * d_c - 1, False) for d_c in range(1, 8)]
    wrong = [(d, k, h) for d, k, h in table if check_h0(d, k).holds is not h]
    ok = not wrong
    record(8, ok, f"{len(table)} boundary rows, {len(wrong)} wrong")
    assert ok
