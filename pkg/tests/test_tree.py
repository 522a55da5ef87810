"""Learner semantics: candidate tracking, splitting, revision, inference."""

import random

import pytest

from oodyn.serialize import tree_to_text
from oodyn.state import (AE, RD, Object, ObjectState, Predicate,
                         QueryPredicateSet, extract_facts, pack_ae, pack_rd)
from oodyn.tree import (BRANCH, LEAF, Foldt, TrackingData, check_branch,
                        evaluate_exhaustive, evaluate_short_circuit,
                        match_vars, rank_greater)

PLAYER, WALL, DOOR = 0, 1, 2
POS, OPEN = 0, 1


def grid_state(rng, n_walls=4, doors=0, span=5):
    objs = [Object(0, PLAYER, {POS: (rng.randrange(span), rng.randrange(span))})]
    taken = set()
    oid = 1
    while len(taken) < n_walls:
        p = (rng.randrange(span), rng.randrange(span))
        if p not in taken:
            taken.add(p)
            objs.append(Object(oid, WALL, {POS: p}))
            oid += 1
    for _ in range(doors):
        p = (rng.randrange(span), rng.randrange(span))
        objs.append(Object(oid, DOOR, {POS: p, OPEN: (rng.randrange(2),)}))
        oid += 1
    return ObjectState(objs)


def wall_right_of_player(state):
    px, py = state.get(0).attributes[POS]
    return any(o.attributes[POS] == (px + 1, py)
               for o in state.objects if o.class_id == WALL)


# ---------------------------------------------------------------------------
# match_vars / check_branch
# ---------------------------------------------------------------------------

def test_match_vars_binds_and_checks():
    assert match_vars((50,), (0, 1), (50, 16)) == (50, 16)
    assert match_vars((50,), (0, 1), (51, 16)) is None, "bound var must agree"
    assert match_vars((50,), (1, 0), (16, 50)) == (50, 16)


def test_match_vars_unique_bindings():
    # an object cannot be bound to two different variables
    assert match_vars((50,), (1, 2), (16, 16)) is None
    assert match_vars((50,), (1,), (50,)) is None


def test_check_branch_extends_bindings():
    rng = random.Random(1)
    state = grid_state(rng, n_walls=3)
    px, py = state.get(0).attributes[POS]
    wall = state.objects[1]
    wall.attributes[POS] = (px + 1, py)
    state = ObjectState(state.objects)  # rebuild indexes
    facts = extract_facts(state)
    pred = Predicate(RD, POS, (1, 0), (PLAYER, WALL))
    hyp_like = type("H", (), {"pred_key": pred.key, "var_ids": (0, 1)})()
    taken, out = check_branch(facts, hyp_like, [(0,)])
    assert taken and (0, wall.id) in out


def test_check_branch_no_facts_returns_input():
    facts = extract_facts(grid_state(random.Random(2), n_walls=2))
    pred = Predicate(RD, POS, (9, 9), (PLAYER, WALL))
    hyp_like = type("H", (), {"pred_key": pred.key, "var_ids": (0, 1)})()
    taken, out = check_branch(facts, hyp_like, [(0,)])
    assert not taken and out == [(0,)]


# ---------------------------------------------------------------------------
# vectorized candidate evaluation == reference evaluation
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("n_existing,arg_classes", [
    (1, (PLAYER,)),
    (2, (PLAYER, WALL)),
    (3, (PLAYER, WALL, DOOR)),
])
def test_branch_vector_matches_check_branch(n_existing, arg_classes):
    rng = random.Random(n_existing)
    tracking = TrackingData(n_existing, arg_classes)
    for trial in range(40):
        state = grid_state(rng, n_walls=4, doors=2)
        facts = extract_facts(state)
        tracking._last_facts_scan = -1
        tracking.add_predicates(facts)
        # bindings consistent with the declared classes where possible
        pools = [[o.id for o in state.objects if o.class_id == c] or [99]
                 for c in arg_classes]
        bindings = []
        for _ in range(rng.randrange(1, 3)):
            b = []
            for pool in pools:
                choices = [x for x in pool if x not in b] or [101 + len(b)]
                b.append(rng.choice(choices))
            bindings.append(tuple(b))
        vec = tracking.branch_vector(facts, bindings)
        for row in range(tracking.n):
            hyp = tracking.hypothesis(row)
            want, _ = check_branch(facts, hyp, bindings)
            assert bool(vec[row]) == want, (
                f"row {row} {hyp.predicate} vars={hyp.var_ids} "
                f"bindings={bindings}")


def test_add_predicates_candidate_counts():
    # one unary predicate over the argument's own class with e=1 gives two
    # candidates: reuse X0 or bind a fresh variable
    tracking = TrackingData(1, (PLAYER,))
    state = ObjectState([Object(0, PLAYER, {POS: (1, 1)})])
    facts = extract_facts(state)
    tracking.add_predicates(facts)
    assert tracking.n == 2
    # re-presenting the same facts adds nothing
    tracking._last_facts_scan = -1
    tracking.add_predicates(facts)
    assert tracking.n == 2


def test_add_predicates_type_filtering():
    # a wall-only predicate cannot reuse a player variable
    tracking = TrackingData(1, (PLAYER,))
    state = ObjectState([Object(0, WALL, {POS: (2, 2)})])
    facts = extract_facts(state)
    tracking.add_predicates(facts)
    hyps = [tracking.hypothesis(r) for r in range(tracking.n)]
    assert all(h.var_ids == (1,) for h in hyps), "only fresh-variable wiring"


# ---------------------------------------------------------------------------
# update_tests / update_node_type behavior
# ---------------------------------------------------------------------------

def test_single_candidate_never_reports_new_best():
    # a wall predicate seen from a player-typed tracking admits exactly one
    # wiring (fresh variable), so no swap is ever possible
    tracking = TrackingData(1, (PLAYER,))
    rng = random.Random(3)
    state = ObjectState([Object(0, WALL, {POS: (1, 1)})])
    facts = extract_facts(state)
    tracking.add_predicates(facts)
    assert tracking.n == 1
    for _ in range(200):
        out = (rng.randrange(2),)
        assert tracking.update_tests(facts, [(0,)], out, 0.01) is False


def test_separating_candidate_splits_deterministic_concept():
    rng = random.Random(4)
    tree = Foldt(alpha=0.01, arg_types=(PLAYER,))
    for step in range(1500):
        state = grid_state(rng, n_walls=3)
        facts = extract_facts(state)
        out = (0, 0) if wall_right_of_player(state) else (1, 0)
        tree.observe(facts, (0,), out)
    assert tree.root.kind == BRANCH
    assert tree.split_events >= 1


def test_constant_stream_stays_single_leaf():
    rng = random.Random(5)
    tree = Foldt(alpha=0.01, arg_types=(PLAYER,))
    for _ in range(2000):
        facts = extract_facts(grid_state(rng, n_walls=3))
        tree.observe(facts, (0,), (0, 0))
    assert tree.root.kind == LEAF
    assert tree.split_events == 0
    facts = extract_facts(grid_state(rng, n_walls=3))
    assert tree.predict(facts, (0,)) == {(0, 0): 1.0}


def test_learns_wall_adjacency_rule():
    rng = random.Random(6)
    tree = Foldt(alpha=0.01, arg_types=(PLAYER,))
    for _ in range(3000):
        state = grid_state(rng, n_walls=4)
        facts = extract_facts(state)
        out = (0, 0) if wall_right_of_player(state) else (1, 0)
        tree.observe(facts, (0,), out)
    assert tree.root.kind == BRANCH
    hyp = tree.root.hypothesis
    p = hyp.predicate
    assert p.kind == RD and p.attr_id == POS
    assert set(p.arg_types) == {PLAYER, WALL}
    assert p.value in ((1, 0), (-1, 0))
    # predictions on both sides are point masses
    state = grid_state(rng, n_walls=4)
    facts = extract_facts(state)
    want = {(0, 0): 1.0} if wall_right_of_player(state) else {(1, 0): 1.0}
    assert tree.predict(facts, (0,)) == want


def test_learns_nested_binding_concept():
    # output depends on door adjacency and, for that same door, its flag
    rng = random.Random(7)
    tree = Foldt(alpha=0.01, arg_types=(PLAYER,))

    def door_right(state):
        px, py = state.get(0).attributes[POS]
        for o in state.objects:
            if o.class_id == DOOR and o.attributes[POS] == (px + 1, py):
                return o
        return None

    for _ in range(6000):
        state = grid_state(rng, n_walls=0, doors=3, span=3)
        facts = extract_facts(state)
        d = door_right(state)
        out = (1, 0) if d is None or d.attributes[OPEN] == (1,) else (0, 0)
        tree.observe(facts, (0,), out)
    # the learned tree must test door adjacency somewhere on its path and
    # reuse the bound door variable for the flag test
    assert tree.root.kind == BRANCH
    root_p = tree.root.hypothesis.predicate
    assert root_p.kind == RD and set(root_p.arg_types) == {PLAYER, DOOR}
    inner = tree.root.left
    assert inner.kind == BRANCH
    inner_h = inner.hypothesis
    assert inner_h.predicate.kind == AE
    assert inner_h.predicate.attr_id == OPEN
    assert inner_h.var_ids[0] < 2 + tree.root.hypothesis.n_new_vars
    assert inner_h.n_new_vars == 0, "flag test reuses the bound door variable"


def test_pure_noise_never_splits():
    rng = random.Random(8)
    tree = Foldt(alpha=0.01, arg_types=(PLAYER,))
    outs = [(0, 0), (1, 0), (0, 1), (-1, 0)]
    for _ in range(20000):
        facts = extract_facts(grid_state(rng, n_walls=3, span=3))
        tree.observe(facts, (0,), rng.choice(outs))
    assert tree.split_events == 0
    assert tree.root.kind == LEAF


def test_concept_drift_collapses_branch():
    rng = random.Random(9)
    tree = Foldt(alpha=0.01, arg_types=(PLAYER,))
    # phase 1: deterministic wall rule
    for _ in range(2500):
        state = grid_state(rng, n_walls=4)
        facts = extract_facts(state)
        out = (0, 0) if wall_right_of_player(state) else (1, 0)
        tree.observe(facts, (0,), out)
    assert tree.root.kind == BRANCH
    # phase 2: outputs become uncorrelated noise
    outs = [(0, 0), (1, 0)]
    for _ in range(20000):
        state = grid_state(rng, n_walls=4)
        facts = extract_facts(state)
        tree.observe(facts, (0,), rng.choice(outs))
        if tree.root.kind == LEAF:
            break
    assert tree.root.kind == LEAF, "branch with vanished advantage collapses"
    assert tree.collapse_events >= 1


def test_branch_updating_off_freezes_structure():
    rng = random.Random(10)
    tree = Foldt(alpha=0.01, arg_types=(PLAYER,), branch_updating=False)
    for _ in range(2500):
        state = grid_state(rng, n_walls=4)
        facts = extract_facts(state)
        out = (0, 0) if wall_right_of_player(state) else (1, 0)
        tree.observe(facts, (0,), out)
    assert tree.root.kind == BRANCH
    frozen_hyp = tree.root.hypothesis
    for _ in range(8000):
        state = grid_state(rng, n_walls=4)
        facts = extract_facts(state)
        tree.observe(facts, (0,), rng.choice([(0, 0), (1, 0)]))
    assert tree.root.kind == BRANCH
    assert tree.root.hypothesis is frozen_hyp
    assert tree.collapse_events == 0 and tree.revise_events == 0


# ---------------------------------------------------------------------------
# statistics bookkeeping invariants
# ---------------------------------------------------------------------------

def test_root_baseline_total_counts_observations():
    rng = random.Random(11)
    tree = Foldt(alpha=0.01, arg_types=(PLAYER,))
    n = 700
    for _ in range(n):
        state = grid_state(rng, n_walls=4)
        facts = extract_facts(state)
        out = (0, 0) if wall_right_of_player(state) else (1, 0)
        tree.observe(facts, (0,), out)
    assert tree.root.tracking.baseline.total == n
    if tree.root.kind == BRANCH:
        below = (tree.root.left.tracking.baseline.total
                 + tree.root.right.tracking.baseline.total)
        assert below <= n  # children were reset later than the root


def test_variable_count_invariant_after_mutations():
    rng = random.Random(12)
    tree = Foldt(alpha=0.01, arg_types=(PLAYER,))
    for _ in range(4000):
        state = grid_state(rng, n_walls=2, doors=2, span=3)
        facts = extract_facts(state)
        d = None
        px, py = state.get(0).attributes[POS]
        for o in state.objects:
            if o.class_id == DOOR and o.attributes[POS] == (px + 1, py):
                d = o
        out = (0, 0) if (d is not None and d.attributes[OPEN] == (0,)) else (1, 0)
        tree.observe(facts, (0,), out)
        for node in tree.nodes():
            if node.kind == BRANCH:
                h = node.hypothesis
                assert node.left.tracking.n_existing_vars == \
                    node.tracking.n_existing_vars + h.n_new_vars
                assert node.right.tracking.n_existing_vars == \
                    node.tracking.n_existing_vars
                assert len(node.left.tracking.var_class_types) == \
                    node.left.tracking.n_existing_vars
                assert len(node.right.tracking.var_class_types) == \
                    node.right.tracking.n_existing_vars


# ---------------------------------------------------------------------------
# inference paths
# ---------------------------------------------------------------------------

def test_short_circuit_on_single_leaf():
    tree = Foldt(alpha=0.01, arg_types=(PLAYER,))
    facts = extract_facts(grid_state(random.Random(0), n_walls=2))
    leaf, preferred, rank = evaluate_short_circuit(tree.root, facts, (0,))
    assert leaf is tree.root and preferred and rank == "1"


def test_rank_comparison_prefers_shallow_lefts():
    assert rank_greater("11", "101")   # shallow bits equal, next: left beats right
    assert rank_greater("101", "100")
    assert not rank_greater("01", "11")
    assert rank_greater("1", "")


def trained_tree(seed, n=5000, doors=2):
    rng = random.Random(seed)
    tree = Foldt(alpha=0.01, arg_types=(PLAYER,))
    for _ in range(n):
        state = grid_state(rng, n_walls=3, doors=doors, span=4)
        facts = extract_facts(state)
        d = None
        px, py = state.get(0).attributes[POS]
        for o in state.objects:
            if o.class_id == DOOR and o.attributes[POS] == (px + 1, py):
                d = o
        if wall_right_of_player(state):
            out = (0, 0)
        elif d is not None and d.attributes[OPEN] == (0,):
            out = (0, 1)
        else:
            out = (1, 0)
        tree.observe(facts, (0,), out)
    return tree


def test_short_circuit_equals_exhaustive_everywhere():
    tree = trained_tree(13)
    rng = random.Random(14)
    for _ in range(500):
        state = grid_state(rng, n_walls=3, doors=2, span=4)
        facts = extract_facts(state)
        exhaustive = evaluate_exhaustive(tree.root, facts, [(0,)])
        fast, _, _ = evaluate_short_circuit(tree.root, facts, (0,))
        assert fast is exhaustive
        qps = QueryPredicateSet(state)
        fast_q, _, _ = evaluate_short_circuit(tree.root, qps, (0,))
        assert fast_q is exhaustive


def test_query_inference_touches_fewer_predicates():
    tree = trained_tree(15)
    rng = random.Random(16)
    state = grid_state(rng, n_walls=3, doors=2, span=4)
    facts = extract_facts(state)
    qps = QueryPredicateSet(state)
    tree.predict(qps, (0,))
    assert 0 < len(qps.cache) < len(facts.cnt)


def test_fresh_tree_predicts_empty_distribution():
    tree = Foldt(alpha=0.01, arg_types=(PLAYER,))
    facts = extract_facts(grid_state(random.Random(17), n_walls=2))
    assert tree.predict(facts, (0,)) == {}


def test_identical_streams_identical_trees():
    a = trained_tree(18, n=2500)
    b = trained_tree(18, n=2500)
    assert tree_to_text(a) == tree_to_text(b)
