"""Fact extraction, scanning, and the on-demand predicate cache."""

import random

import pytest

from oodyn.state import (AE, RD, GroundPredicate, Object, ObjectState,
                         Predicate, QueryPredicateSet, extract_facts,
                         pack_ae, pack_rd, scan, unpack)

WALL, PLAYER, DOOR, KEY, GOAL = 0, 1, 2, 3, 4
POS, STATUS, LOCKED = 0, 1, 2


def keylike_state() -> ObjectState:
    return ObjectState([
        Object(2, WALL, {POS: (2, 0)}),
        Object(16, WALL, {POS: (4, 2)}),
        Object(30, WALL, {POS: (3, 5)}),
        Object(50, PLAYER, {POS: (5, 2)}),
        Object(51, DOOR, {POS: (3, 4), LOCKED: (1,)}),
        Object(52, KEY, {POS: (4, 1), STATUS: (0,)}),
        Object(53, GOAL, {POS: (2, 4)}),
    ])


def test_pack_unpack_roundtrip():
    rng = random.Random(7)
    for _ in range(300):
        c1 = rng.randrange(0, 63)
        attr = rng.randrange(0, 16)
        vec = tuple(rng.randrange(-2000, 2000) for _ in range(rng.randrange(1, 4)))
        key = pack_ae(c1, attr, vec)
        assert unpack(key) == (AE, c1, 63, attr, vec)
        c2 = rng.randrange(0, 63)
        key = pack_rd(c1, c2, attr, vec)
        assert unpack(key) == (RD, c1, c2, attr, vec)


def test_state_invariants_enforced():
    with pytest.raises(ValueError):
        ObjectState([Object(1, 0, {0: (1,)}), Object(1, 0, {0: (2,)})])
    with pytest.raises(ValueError):
        ObjectState([Object(1, 0, {0: (1,)}), Object(2, 0, {0: (1, 2)})])


def test_extract_contains_player_position_fact():
    facts = extract_facts(keylike_state())
    key = pack_ae(PLAYER, POS, (5, 2))
    assert [a for a in facts.get_args(key)] == [(50,)]


def test_extract_single_object_single_attr():
    facts = extract_facts(ObjectState([Object(9, 0, {0: (4,)})]))
    assert len(facts) == 1
    assert facts.get_args(pack_ae(0, 0, (4,))) == [(9,)]


def test_extract_relative_difference_between_player_and_wall():
    facts = extract_facts(keylike_state())
    # wall 16 at (4,2) minus player 50 at (5,2): (-1, 0), player bound first
    key = pack_rd(PLAYER, WALL, POS, (-1, 0))
    assert (50, 16) in facts.get_args(key)
    # and the mirrored ordering is stored too
    key = pack_rd(WALL, PLAYER, POS, (1, 0))
    assert (16, 50) in facts.get_args(key)


def test_extract_fact_count_formula():
    # n objects of one class sharing one attribute: n AE facts plus
    # n(n-1)/2 pairs in both orders
    n = 7
    objs = [Object(i, 0, {0: (i, 2 * i)}) for i in range(n)]
    facts = extract_facts(ObjectState(objs))
    assert len(facts) == n + n * (n - 1)


def random_state(rng, n_classes=3, n_objects=8, span=4) -> ObjectState:
    objs = []
    for i in range(n_objects):
        c = rng.randrange(n_classes)
        attrs = {0: (rng.randrange(span), rng.randrange(span))}
        if c == 2:
            attrs[1] = (rng.randrange(2),)
        objs.append(Object(i, c, attrs))
    return ObjectState(objs)


def test_scan_examples():
    state = keylike_state()
    locked = Predicate(AE, LOCKED, (1,), (DOOR,))
    assert [g.arguments for g in scan(state, locked)] == [(51,)]
    nobody = Predicate(RD, POS, (9, 9), (PLAYER, GOAL))
    assert scan(state, nobody) == []


def test_scan_rejects_unknown_kind():
    state = keylike_state()
    bogus = Predicate(2, POS, (0, 0), (WALL, WALL))
    with pytest.raises(ValueError):
        scan(state, bogus)


def test_scan_agrees_with_extract_facts_on_random_states():
    rng = random.Random(123)
    for _ in range(100):
        state = random_state(rng)
        facts = extract_facts(state)
        for key in facts.key_list:
            pred = facts.predicate(key)
            got = sorted(g.arguments for g in scan(state, pred))
            want = sorted(facts.get_args(key))
            assert got == want
        # and scanning a few absent predicates returns nothing
        for _ in range(5):
            pred = Predicate(RD, 0, (rng.randrange(5, 9), 7), (0, 1))
            assert scan(state, pred) == [g for g in facts.get_observations(pred)]


def test_query_set_caches_scans():
    state = keylike_state()
    qps = QueryPredicateSet(state)
    locked = Predicate(AE, LOCKED, (1,), (DOOR,))
    first = qps.get_observations(locked)
    assert qps.scan_count == 1
    second = qps.get_observations(locked)
    assert qps.scan_count == 1, "second identical query must not rescan"
    assert first == second


def test_query_set_get_value_cross_checked():
    rng = random.Random(5)
    for _ in range(30):
        state = random_state(rng)
        facts = extract_facts(state)
        qps = QueryPredicateSet(state)
        for key in facts.key_list[::3]:
            pred = facts.predicate(key)
            for g in facts.get_observations(pred)[:2]:
                assert qps.get_value(g)
        # a predicate absent from the state is false everywhere
        absent = Predicate(AE, 0, (99, 99), (0,))
        assert not qps.get_value(GroundPredicate(absent, (0,)))


def test_query_set_order_independent():
    state = keylike_state()
    facts = extract_facts(state)
    keys = facts.key_list[:12]
    a = QueryPredicateSet(state)
    b = QueryPredicateSet(state)
    for k in keys:
        a.get_observations(k)
    for k in reversed(keys):
        b.get_observations(k)
    for k in keys:
        assert sorted(g.arguments for g in a.cache[k]) == \
            sorted(g.arguments for g in b.cache[k])


def test_serialization_roundtrip():
    state = keylike_state()
    text = state.to_text()
    back = ObjectState.from_text(text)
    assert back == state
    assert back.to_text() == text
