"""Enumeration of variable bindings for candidate test generation.

When a new predicate is observed at a tree node, one candidate test is
created per way of wiring the predicate's argument slots to variables.
Slots may reuse variables already bound higher in the tree or introduce
fresh ones; fresh variables are only enumerated up to renaming.
"""

from functools import lru_cache
from itertools import combinations as _combinations, product as _product


def combinations(n: int, r: int) -> list[tuple[int, ...]]:
    """All sorted r-subsets of {0..n-1}."""
    if r < 0 or r > n:
        raise ValueError(f"need 0 <= r <= n, got n={n} r={r}")
    return list(_combinations(range(n), r))


def product(n: int, r: int) -> list[tuple[int, ...]]:
    """The Cartesian product {0..n-1}^r. Empty when n == 0 and r > 0."""
    return list(_product(range(n), repeat=r))


def product_sets(sets: list[list[int]]) -> list[tuple[int, ...]]:
    """Cartesian product of an explicit list of collections."""
    return list(_product(*sets))


@lru_cache(maxsize=None)
def newvars(k: int) -> tuple[tuple[tuple[int, ...], int], ...]:
    """All ways to fill k slots with fresh variables, up to renaming.

    Returns (listing, n_new) pairs where listing assigns a variable index
    (0-based, first use in increasing order) to each slot and n_new is the
    number of distinct variables used.  |newvars(k)| is the k-th Bell
    number.  newvars(0) is the single empty listing so that callers can
    compose over "no new slots" uniformly.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    if k == 0:
        return (((), 0),)
    out = []
    for listing, n in newvars(k - 1):
        # reuse any of the n existing fresh variables, or add a new one
        for i in range(n):
            out.append((listing + (i,), n))
        out.append((listing + (n,), n + 1))
    return tuple(sorted(set(out)))


@lru_cache(maxsize=None)
def bindings(e: int, n: int) -> tuple[tuple[tuple[int, ...], int], ...]:
    """All variable listings for an n-ary predicate given e existing variables.

    Each result is (var_ids, n_new).  var_ids has one entry per argument
    slot; ids < e refer to variables bound above, ids >= e are fresh and
    appear first-use-consecutive.  Results are deduplicated and returned
    in a fixed lexicographic order so candidate creation is reproducible.
    """
    if e < 0 or n < 1:
        raise ValueError(f"need e >= 0 and n >= 1, got e={e} n={n}")
    result = set()
    for m in range(n + 1):
        slots_new = combinations(n, m)
        existing_vars = product(e, n - m)
        new_vars = newvars(m)
        for s_new in slots_new:
            s_exist = tuple(i for i in range(n) if i not in s_new)
            for v_new, k in new_vars:
                for v_exist in existing_vars:
                    args = [0] * n
                    for i, v in zip(s_exist, v_exist):
                        args[i] = v
                    for i, v in zip(s_new, v_new):
                        args[i] = v + e
                    result.add((tuple(args), k))
    return tuple(sorted(result))
