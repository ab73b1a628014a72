import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from instances import two_block_boundary, wide_conflict
from oracles import brute_consistent, brute_mhs, brute_mus
from spacerev.consistency import conflict_size, is_consistent, minimal_conflicts
from spacerev.errors import BudgetExceeded, UnrepairableConflict
from spacerev.flood import GenParams, compile, generate
from spacerev.graph import SeedPolicy, SpaceGraph, partition
from spacerev.hitting import filter_protected
from spacerev.kb import Clause, ClauseClass, KnowledgeBase, classify
from spacerev.revision import Regime, check_h0, contained_revision, global_rdr, pass_windows


@pytest.mark.parametrize(
    "d_c,k_r,holds",
    [(2, 6, True), (3, 6, False), (0, 0, True), (0, 12, True), (4, 12, True), (4, 11, False), (None, 12, False)],
)
def test_check_h0_table(d_c, k_r, holds):
    assert check_h0(d_c, k_r).holds is holds


def test_check_h0_rejects_negative():
    with pytest.raises(ValueError):
        check_h0(-1, 3)


def _kb(*clauses, n=1):
    return KnowledgeBase(tuple(clauses), SpaceGraph.path(n))


def test_global_rdr_examples():
    consistent = _kb(Clause.of(0, ["p@0"]), Clause.of(1, ["q@0"]))
    r = global_rdr(consistent)
    assert r.chosen == frozenset() and r.revised_kb == consistent
    protected = _kb(Clause.of(0, ["p@0"]), Clause.of(1, ["-p@0"], "S2"))
    assert global_rdr(protected).chosen == {0}
    tie = _kb(Clause.of(0, ["p@0"]), Clause.of(1, ["-p@0"]))
    r = global_rdr(tie)
    assert r.global_hitting_sets == brute_mhs([{0, 1}]) and r.chosen == {0}


def test_unrepairable():
    kb = _kb(Clause.of(0, ["p@0"], "S2"), Clause.of(1, ["-p@0"], "S2"))
    with pytest.raises(UnrepairableConflict) as info:
        global_rdr(kb)
    assert info.value.conflicts
    with pytest.raises(UnrepairableConflict):
        contained_revision(kb)


def test_contained_on_consistent_kb():
    kb = compile(generate(GenParams(12, interval_density=0.0), 3))
    r = contained_revision(kb, verify=True)
    assert r.chosen == frozenset() and r.global_hitting_sets == {frozenset()}
    assert set(r.regime_per_block.values()) == {Regime.SPACE_INDEPENDENT}
    assert r.conjecture_verified


def test_conflicts_inside_blocks_match_global():
    g = SpaceGraph.path(9)
    clauses = [
        Clause.of(0, ["p@0"]), Clause.of(1, ["-p@0", "q@1"], "S2"), Clause.of(2, ["-q@1"]),
        Clause.of(3, ["r@7"]), Clause.of(4, ["-r@7"]),
    ]
    kb = KnowledgeBase(tuple(clauses), g)
    cont, glob = contained_revision(kb, 2, 3), global_rdr(kb)
    assert cont.global_hitting_sets == glob.global_hitting_sets
    assert cont.chosen == glob.chosen == {0, 3}


def test_boundary_conflict_needs_a_shift():
    kb = two_block_boundary()
    base = partition(kb.graph, 3, 4)
    assert [sorted(b) for b in base.blocks] == [[0, 1, 2, 3], [4, 5, 6]]
    for window in base.windows:
        assert is_consistent([c for c in kb if c.footprint <= window])
    assert not is_consistent(kb.clauses)
    r = contained_revision(kb, 3, 4, verify=True)
    assert r.passes[0].new_conflicts == 0
    assert any(p.new_conflicts for p in r.passes[1:])
    g = global_rdr(kb)
    assert r.global_hitting_sets == g.global_hitting_sets
    assert r.chosen == g.chosen != frozenset()
    assert r.conjecture_verified


def test_wide_conflict_is_missed_and_flagged():
    kb = wide_conflict()
    (conf,) = minimal_conflicts(kb.clauses, max_card=8)
    assert conflict_size(conf, kb) == 3
    r = contained_revision(kb, 2, 4, max_card=8, verify=True)
    assert r.global_hitting_sets == {frozenset()}
    assert not r.conjecture_verified
    assert not is_consistent(r.revised_kb.clauses)
    assert any("inconsistent" in w for w in r.warnings)
    assert global_rdr(kb, max_card=8).global_hitting_sets != r.global_hitting_sets


def test_conjecture_never_claimed_without_verify():
    r = contained_revision(two_block_boundary(), 3, 4)
    assert not r.conjecture_verified


def test_block_removal_within_each_pass():
    kb = compile(generate(GenParams(30, "path", 4, 0.5, 0.8, planted_conflict_size=2, planted_count=2), 9))
    r = contained_revision(kb, 2, 4)
    base = partition(kb.graph, 2, 4)
    assert len(r.passes) == 5
    owner = {}
    for i, block in enumerate(base.blocks):
        for c in kb:
            if c.footprint <= block:
                owner[c.id] = i
    base_traces = r.passes[0].blocks
    seen_b = set()
    for bt in base_traces:
        assert not bt.window & seen_b
        assert bt.removed <= seen_b
        assert bt.removed == {c for c in seen_b if c in bt.window | bt.removed}
        seen_b |= {cid for cid, i in owner.items() if i == bt.index}
    for p in r.passes:
        for bt in p.blocks:
            assert not bt.window & bt.removed


def test_pass_windows_are_window_minus_earlier_b_clauses():
    kb = compile(generate(GenParams(16, "grid", 4, 0.5, 0.8), 2))
    blocking = partition(kb.graph, 1, 2)
    traces = pass_windows(kb, blocking)
    earlier = set()
    for i, bt in enumerate(traces):
        full = {c.id for c in kb if c.footprint <= blocking.windows[i]}
        assert bt.window | bt.removed == full
        assert bt.removed == full & earlier
        earlier |= {c.id for c in kb if classify(c, blocking, i) is ClauseClass.B}


def test_regimes():
    g = SpaceGraph.path(9)
    # block 0 = {0,1,2}, cover {3,4}; a crossing conflict sharing clause 0 with an inner one
    clauses = [
        Clause.of(0, ["p@2"]), Clause.of(1, ["-p@2"]),
        Clause.of(2, ["-p@2", "q@3"], "S2"), Clause.of(3, ["-q@3"]),
    ]
    kb = KnowledgeBase(tuple(clauses), g)
    assert contained_revision(kb, 2, 4).regime_per_block[0] is Regime.DEPENDENT
    disjoint = KnowledgeBase((Clause.of(0, ["s@0"]), Clause.of(1, ["-s@0"]), *clauses[2:], Clause.of(4, ["p@2"])), g)
    assert contained_revision(disjoint, 2, 4).regime_per_block[0] is Regime.INFO_INDEPENDENT
    inner = KnowledgeBase(tuple(clauses[:2]), g)
    assert contained_revision(inner, 2, 4).regime_per_block[0] is Regime.SPACE_INDEPENDENT


def _small_instance(seed):
    rng = random.Random(seed)
    if rng.random() < 0.5:
        params = GenParams(rng.randint(6, 14), "path", 3, 0.3, 0.6, planted_conflict_size=rng.choice([None, 1, 2]))
    else:
        params = GenParams(rng.choice([9, 12, 16]), "grid", 3, 0.3, 0.6, planted_conflict_size=rng.choice([None, 1]))
    return compile(generate(params, seed))


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=40)
def test_contained_equals_global_when_conflicts_are_small(seed):
    kb = _small_instance(seed)
    try:
        glob = global_rdr(kb, max_card=8)
    except BudgetExceeded:
        return
    if any(conflict_size(c, kb) > 2 for c in glob.conflicts):
        return
    r = contained_revision(kb, 2, 4, max_card=8, verify=True)
    assert r.global_hitting_sets == glob.global_hitting_sets
    assert r.conjecture_verified and is_consistent(r.revised_kb.clauses)
    assert not r.chosen & kb.protected_ids
    assert len(r.chosen) == len(glob.chosen)


def test_small_instances_against_brute_force():
    checked = 0
    for seed in range(200):
        kb = compile(generate(GenParams(6, "path", 3, 0.5, 0.7, planted_conflict_size=1), seed))
        if len(kb) > 16:
            continue
        mus = brute_mus(kb.clauses)
        expected = filter_protected(brute_mhs(mus), kb)
        r = contained_revision(kb, 1, 3, max_card=None, verify=True)
        assert r.global_hitting_sets == expected
        assert brute_consistent(r.revised_kb.clauses)
        checked += 1
    assert checked >= 20


def test_parallel_and_random_policy_agree():
    kb = compile(generate(GenParams(16, "grid", 4, 0.3, 0.7, planted_conflict_size=1), 7))
    serial = contained_revision(kb, 2, 4)
    assert len(serial.conflicts) > 5
    assert contained_revision(kb, 2, 4, jobs=2).global_hitting_sets == serial.global_hitting_sets
    randomized = contained_revision(kb, 2, 4, seed_policy=SeedPolicy.random(3), verify=True)
    assert randomized.global_hitting_sets == global_rdr(kb).global_hitting_sets


def test_warnings_for_thick_cover_and_general_graph():
    g = SpaceGraph.from_edges(range(4), [(0, 1), (1, 2), (2, 0), (2, 3)])
    kb = KnowledgeBase((Clause.of(0, ["p@0"]),), g)
    warnings = contained_revision(kb, 1, 3).warnings
    assert any("heuristic" in w for w in warnings)
    assert any("thickness" in w for w in warnings)


def test_h0_reported():
    r = contained_revision(wide_conflict(), 2, 4, k_r=8, max_card=8)
    assert r.h0.d_c == 0 and r.h0.holds  # the wide conflict is never seen locally
    g = global_rdr(wide_conflict(), k_r=8, max_card=8)
    assert g.h0.d_c == 3 and not g.h0.holds
    assert any("H0" in w for w in g.warnings)
