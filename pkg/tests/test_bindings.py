"""Binding-enumeration tests against independent brute-force oracles."""

import math
from itertools import product as iproduct

import pytest

from oodyn.bindings import bindings, combinations, newvars, product


def bell_number(k: int) -> int:
    """Bell numbers via the triangle recurrence (independent oracle)."""
    row = [1]
    for _ in range(k):
        nxt = [row[-1]]
        for x in row:
            nxt.append(nxt[-1] + x)
        row = nxt
    return row[0]


def canonical(listing):
    """Rename variables to first-use order so equivalent listings collide."""
    seen = {}
    out = []
    for v in listing:
        if v not in seen:
            seen[v] = len(seen)
        out.append(seen[v])
    return tuple(out)


def brute_force_bindings(e: int, n: int) -> set:
    """All canonical wirings of n slots over e existing + any fresh variables."""
    out = set()
    # fresh ids chosen from e..e+n-1 is enough: at most n fresh slots
    for combo in iproduct(range(e + n), repeat=n):
        fresh = [v for v in combo if v >= e]
        # canonicalize fresh ids to first-use order starting at e
        seen = {}
        args = []
        for v in combo:
            if v < e:
                args.append(v)
            else:
                if v not in seen:
                    seen[v] = e + len(seen)
                args.append(seen[v])
        out.add((tuple(args), len(seen)))
    return out


def test_combinations_basics():
    assert combinations(3, 2) == [(0, 1), (0, 2), (1, 2)]
    assert combinations(5, 0) == [()]
    assert len(combinations(6, 3)) == math.comb(6, 3) == 20


def test_combinations_rejects_bad_r():
    with pytest.raises(ValueError):
        combinations(3, 4)


def test_product_shapes():
    assert product(2, 2) == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert product(0, 0) == [()]
    assert product(0, 2) == []


def test_newvars_listed_examples():
    assert set(newvars(1)) == {((0,), 1)}
    assert set(newvars(2)) == {((0, 0), 1), ((0, 1), 2)}
    # the five k=3 listings, ending with (X0, X1, X2)
    assert set(newvars(3)) == {((0, 0, 0), 1), ((0, 0, 1), 2), ((0, 1, 0), 2),
                               ((0, 1, 1), 2), ((0, 1, 2), 3)}


@pytest.mark.parametrize("k", range(7))
def test_newvars_counts_are_bell_numbers(k):
    assert len(newvars(k)) == bell_number(k)


def test_newvars_zero_is_empty_listing():
    assert newvars(0) == (((), 0),)


def test_bindings_base_cases():
    assert set(bindings(0, 1)) == {((0,), 1)}
    assert set(bindings(1, 1)) == {((0,), 0), ((1,), 1)}
    assert set(bindings(0, 2)) == {((0, 0), 1), ((0, 1), 2)}


@pytest.mark.parametrize("e", range(4))
@pytest.mark.parametrize("n", range(1, 4))
def test_bindings_match_brute_force(e, n):
    got = set(bindings(e, n))
    assert got == brute_force_bindings(e, n)
    assert len(got) == len(bindings(e, n)), "no duplicate listings"


@pytest.mark.parametrize("e", range(4))
@pytest.mark.parametrize("n", range(1, 4))
def test_bindings_structement(e, n):
    for args, n_new in bindings(e, n):
        assert all(v < e + n_new for v in args)
        # fresh ids appear first-use consecutive starting at e
        seen = []
        for v in args:
            if v >= e and v not in seen:
                assert v == e + len(seen)
                seen.append(v)
        assert len(seen) == n_new
