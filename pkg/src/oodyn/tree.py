"""Incremental induction of first-order logical decision trees.

A tree maps (fact set, argument objects) to a distribution over output
keys.  Branches hold existentially-quantified tests; taking a left branch
binds the test's fresh variables.  Learning is top-down and online: each
observation updates candidate-test statistics along its root-to-node path,
may promote a better test ("bubble up"), may split a leaf or revise or
collapse a branch, and recurses through the current branch tests carrying
the set of satisfying variable bindings.

Structure edits are gated on non-overlapping confidence intervals over the
predictive-power score, so leaves over genuinely stochastic outputs stay
leaves and the returned distributions estimate the true conditionals.

Candidate statistics are the hot path (every candidate at every node on
the path is updated per observation), so they live in flat numpy arrays
keyed by creation index; `Candidate`/`Hypothesis` views are materialized
on demand.  The semantics are identical to per-candidate bookkeeping.
"""

import math
from dataclasses import dataclass

import numpy as np

from .bindings import bindings as enumerate_bindings
from .state import AE, RD, Predicate
from .stats import ConfidenceInterval, FTable, hoeffding_halfwidth, interval_better

LEAF = 0
BRANCH = 1

# candidate wiring patterns (how argument slots map to variables)
_P_AE_BOUND = 0    # unary, slot wired to an existing variable
_P_AE_NEW = 1      # unary, slot gets a fresh variable
_P_RD_BB = 2       # binary, both slots existing
_P_RD_BN = 3       # binary, first existing / second fresh
_P_RD_NB = 4       # binary, first fresh / second existing
_P_RD_NN = 5       # binary, two distinct fresh variables
_P_DEAD = 6        # unsatisfiable wiring (same object in both slots)

_tracking_serial = 0


def _pack_meta(var_ids: tuple, n_new: int) -> int:
    meta = len(var_ids) | (n_new << 3)
    for i, v in enumerate(var_ids):
        meta |= (v & 0xFF) << (8 * (i + 1))
    return meta


def _unpack_meta(meta: int) -> tuple:
    arity = meta & 0x7
    n_new = (meta >> 3) & 0x1F
    var_ids = tuple((meta >> (8 * (i + 1))) & 0xFF for i in range(arity))
    return var_ids, n_new


@dataclass(frozen=True)
class Hypothesis:
    """A candidate test: a predicate plus the variable wiring of its slots."""

    predicate: Predicate
    var_ids: tuple
    n_new_vars: int
    var_class_types: tuple

    @property
    def pred_key(self) -> int:
        return self.predicate.key


class Candidate:
    """Read-only view of one tracked candidate and its joint counter."""

    __slots__ = ("hypothesis", "_tracking", "_row")

    def __init__(self, hypothesis, tracking, row):
        self.hypothesis = hypothesis
        self._tracking = tracking
        self._row = row

    @property
    def counter(self) -> FTable:
        return self._tracking.row_ftable(self._row)

    def score_interval(self, alpha: float) -> ConfidenceInterval:
        return self._tracking.row_interval(self._row, alpha)


def match_vars(binding: tuple, var_ids: tuple, args: tuple):
    """Extend `binding` so predicate slots wired by `var_ids` take `args`.

    Returns the extended binding, or None when a bound variable disagrees
    or an object would be bound twice (bindings are injective).
    """
    out = list(binding)
    for v, o in zip(var_ids, args):
        if v < len(out):
            if out[v] != o:
                return None
        else:
            if o in out:
                return None
            out.append(o)
    return tuple(out)


def check_branch(facts, hyp: Hypothesis, bindings_in: list):
    """Existential test evaluation with binding propagation.

    True (and every extended binding) iff some ground fact of the test's
    predicate is consistent with some incoming binding; otherwise false
    with the bindings unchanged.
    """
    fact_args = facts.get_args(hyp.pred_key)
    if fact_args:
        out = {}
        var_ids = hyp.var_ids
        for b in bindings_in:
            for gargs in fact_args:
                res = match_vars(b, var_ids, gargs)
                if res is not None:
                    out[res] = None
        if out:
            return True, list(out)
    return False, bindings_in


# ---------------------------------------------------------------------------
# Candidate tracking
# ---------------------------------------------------------------------------

class TrackingData:
    """Per-node statistics: baseline distribution plus all candidate tests.

    Candidates are stored columnar: packed predicate key, packed variable
    wiring, and count matrices C0/C1 of shape (candidates, outputs) for the
    test-false / test-true rows of each joint table.  `order` is the
    current ranking permutation (position 0 = current best).
    """

    __slots__ = ("n_existing_vars", "var_class_types", "observed", "baseline",
                 "n", "_cap", "_kcap", "n_outputs", "out_index", "out_keys",
                 "row_pred", "row_meta", "row_exist", "C0", "C1",
                 "sq0", "rs0", "sq1", "rs1", "order", "groups", "serial",
                 "_group_arrays", "_last_facts_scan")

    def __init__(self, n_existing_vars: int, var_class_types: tuple):
        global _tracking_serial
        _tracking_serial += 1
        self.serial = _tracking_serial
        self.n_existing_vars = n_existing_vars
        self.var_class_types = tuple(var_class_types)
        self.observed: set = set()
        self.baseline = FTable()
        self.n = 0
        self._cap = 0
        self._kcap = 0
        self.n_outputs = 0
        self.out_index: dict = {}
        self.out_keys: list = []
        self.row_pred = np.empty(0, dtype=np.int64)
        self.row_meta = np.empty(0, dtype=np.int64)
        self.row_exist = np.empty(0, dtype=bool)
        self.C0 = np.empty((0, 0), dtype=np.int64)
        self.C1 = np.empty((0, 0), dtype=np.int64)
        self.sq0 = np.empty(0, dtype=np.float64)
        self.rs0 = np.empty(0, dtype=np.float64)
        self.sq1 = np.empty(0, dtype=np.float64)
        self.rs1 = np.empty(0, dtype=np.float64)
        self.order = np.empty(0, dtype=np.int32)
        self.groups: dict = {}          # pattern -> {pred key -> row}
        self._group_arrays: dict = {}   # pattern -> (sorted keys, rows)
        self._last_facts_scan = -1

    # -- growth ------------------------------------------------------------

    def _grow_rows(self, need: int):
        cap = max(16, self._cap)
        while cap < need:
            cap *= 2
        for name in ("sq0", "rs0", "sq1", "rs1"):
            arr = getattr(self, name)
            new = np.zeros(cap, dtype=arr.dtype)
            new[: self.n] = arr[: self.n]
            setattr(self, name, new)
        for name, dtype in (("row_pred", np.int64), ("row_meta", np.int64),
                            ("row_exist", bool), ("order", np.int32)):
            arr = getattr(self, name)
            new = np.zeros(cap, dtype=dtype)
            new[: self.n] = arr[: self.n]
            setattr(self, name, new)
        for name in ("C0", "C1"):
            arr = getattr(self, name)
            new = np.zeros((cap, self._kcap), dtype=np.int64)
            new[: self.n, : self.n_outputs] = arr[: self.n, : self.n_outputs]
            setattr(self, name, new)
        self._cap = cap

    def _grow_outputs(self, need: int):
        kcap = max(2, self._kcap)
        while kcap < need:
            kcap *= 2
        for name in ("C0", "C1"):
            arr = getattr(self, name)
            new = np.zeros((self._cap, kcap), dtype=np.int64)
            new[: self.n, : self.n_outputs] = arr[: self.n, : self.n_outputs]
            setattr(self, name, new)
        self._kcap = kcap

    def output_col(self, y) -> int:
        col = self.out_index.get(y)
        if col is None:
            col = self.n_outputs
            if col >= self._kcap:
                self._grow_outputs(col + 1)
            self.out_index[y] = col
            self.out_keys.append(y)
            self.n_outputs = col + 1
        return col

    # -- candidate creation --------------------------------------------------

    def add_candidate(self, pred_key: int, var_ids: tuple, n_new: int) -> None:
        row = self.n
        if row >= self._cap:
            self._grow_rows(row + 1)
        self.row_pred[row] = pred_key
        self.row_meta[row] = _pack_meta(var_ids, n_new)
        pat = self._classify(var_ids)
        self.row_exist[row] = pat[0] in (_P_AE_NEW, _P_RD_NN)
        if pat[0] != _P_DEAD:
            self.groups.setdefault(pat, {})[pred_key] = row
            self._group_arrays.pop(pat, None)
        self.order[row] = row
        self.n = row + 1

    def _classify(self, var_ids: tuple) -> tuple:
        e = self.n_existing_vars
        if len(var_ids) == 1:
            v = var_ids[0]
            return (_P_AE_BOUND, v) if v < e else (_P_AE_NEW,)
        v0, v1 = var_ids
        if v0 == v1:
            return (_P_DEAD,)  # needs the same object in both slots
        if v0 < e and v1 < e:
            return (_P_RD_BB, v0, v1)
        if v0 < e:
            return (_P_RD_BN, v0)
        if v1 < e:
            return (_P_RD_NB, v1)
        return (_P_RD_NN,)

    def add_predicates(self, facts) -> None:
        """Create candidates for every predicate of `facts` not yet tracked.

        One candidate per type-consistent variable wiring.  Idempotent per
        fact set; predicates are processed in packed-key order so candidate
        creation (and hence tie-breaking) is reproducible.
        """
        if self._last_facts_scan == facts.serial:
            return
        self._last_facts_scan = facts.serial
        new_keys = facts.cnt.keys() - self.observed
        if not new_keys:
            return
        e = self.n_existing_vars
        var_types = self.var_class_types
        for key in sorted(new_keys):
            self.observed.add(key)
            pred = facts.predicate(key)
            arg_types = pred.arg_types
            for var_ids, n_new in enumerate_bindings(e, len(arg_types)):
                if self._consistent(var_ids, arg_types, var_types):
                    self.add_candidate(key, var_ids, n_new)

    @staticmethod
    def _consistent(var_ids, arg_types, var_types) -> bool:
        grown: list | None = None
        for i, v in enumerate(var_ids):
            restriction = arg_types[i]
            types = grown if grown is not None else var_types
            if v < len(types):
                vt = types[v]
                if vt is None:
                    if grown is None:
                        grown = list(var_types)
                    grown[v] = restriction
                elif restriction is not None and vt != restriction:
                    return False
            else:
                if grown is None:
                    grown = list(var_types)
                grown.append(restriction)
        return True

    def hypothesis_types(self, var_ids, arg_types) -> tuple:
        """Variable class list after binding this test (parent types extended)."""
        grown = list(self.var_class_types)
        for i, v in enumerate(var_ids):
            restriction = arg_types[i]
            if v < len(grown):
                if grown[v] is None:
                    grown[v] = restriction
            else:
                grown.append(restriction)
        return tuple(grown)

    def hypothesis(self, row: int, pred_cache=None) -> Hypothesis:
        key = int(self.row_pred[row])
        pred = pred_cache.predicate(key) if pred_cache is not None else Predicate.from_key(key)
        var_ids, n_new = _unpack_meta(int(self.row_meta[row]))
        return Hypothesis(pred, var_ids, n_new,
                          self.hypothesis_types(var_ids, pred.arg_types))

    # -- candidate evaluation -------------------------------------------------

    def _presence(self, facts) -> np.ndarray:
        cache = facts._presence_cache
        got = cache.get(self.serial)
        if got is not None and len(got) == self.n:
            return got
        keys = facts.sorted_keys()
        row_pred = self.row_pred[: self.n]
        if len(keys) == 0:
            pres = np.zeros(self.n, dtype=bool)
        else:
            idx = np.searchsorted(keys, row_pred)
            idx[idx == len(keys)] = 0
            pres = keys[idx] == row_pred
        cache[self.serial] = pres
        return pres

    def _group_rows(self, pat):
        """(sorted predicate keys, aligned rows) for one wiring pattern."""
        got = self._group_arrays.get(pat)
        if got is None:
            mapping = self.groups.get(pat)
            if not mapping:
                got = (None, None)
            else:
                keys = np.fromiter(mapping.keys(), dtype=np.int64, count=len(mapping))
                rows = np.fromiter(mapping.values(), dtype=np.int64, count=len(mapping))
                order = np.argsort(keys)
                got = (keys[order], rows[order])
            self._group_arrays[pat] = got
        return got

    @staticmethod
    def _match_rows(group, queries):
        keys, rows = group
        if keys is None or len(queries) == 0:
            return None
        idx = keys.searchsorted(queries)
        idx[idx == len(keys)] = 0
        mask = keys[idx] == queries
        if not mask.any():
            return None
        return rows[idx[mask]]

    def branch_vector(self, facts, bindings_in: list) -> np.ndarray:
        """Evaluate every candidate's test against the incoming bindings."""
        n = self.n
        base = self.row_exist[:n] & self._presence(facts)
        out = None
        for b in bindings_in:
            vb = base.copy()
            if len(b) == 1:
                offs, ons = self._corrections_single(facts, b[0])
                if offs is not None:
                    vb[offs] = False
                if ons is not None:
                    vb[ons] = True
            else:
                offs, ons = self._corrections_general(facts, b)
                for r in offs:
                    vb[r] = False
                for r in ons:
                    vb[r] = True
            out = vb if out is None else (out | vb)
        return out if out is not None else np.zeros(n, dtype=bool)

    def _corrections_single(self, facts, o):
        """Correction rows for a one-variable binding, as index arrays.

        With a single bound object there are no bound pairs: every
        relative-difference fact involving other objects keeps fresh
        variables available, so the exclusion tests collapse to array
        membership against per-object key sets.
        """
        off_parts = []
        ons_parts = []
        own_cnt1 = facts.own_cnt1_keys(o)
        if len(own_cnt1):
            got = self._match_rows(self._group_rows((_P_AE_NEW,)), own_cnt1)
            if got is not None:
                off_parts.append(got)
        off_nn = facts.isolated_pair_keys(o)
        if len(off_nn):
            got = self._match_rows(self._group_rows((_P_RD_NN,)), off_nn)
            if got is not None:
                off_parts.append(got)
        own = facts.own_keys_arr(o)
        if len(own):
            got = self._match_rows(self._group_rows((_P_AE_BOUND, 0)), own)
            if got is not None:
                ons_parts.append(got)
        fk = facts.first_keys_arr(o)
        if len(fk):
            got = self._match_rows(self._group_rows((_P_RD_BN, 0)), fk)
            if got is not None:
                ons_parts.append(got)
        sk = facts.second_keys_arr(o)
        if len(sk):
            got = self._match_rows(self._group_rows((_P_RD_NB, 0)), sk)
            if got is not None:
                ons_parts.append(got)
        offs = off_parts[0] if len(off_parts) == 1 else (
            np.concatenate(off_parts) if off_parts else None)
        ons = ons_parts[0] if len(ons_parts) == 1 else (
            np.concatenate(ons_parts) if ons_parts else None)
        return offs, ons

    def _corrections_general(self, facts, b):
        """Correction rows for multi-variable bindings (dict walk)."""
        groups_get = self.groups.get
        cnt = facts.cnt
        own_ae = facts.own_ae
        offs: list = []
        ons: list = []
        ae_owned: dict = {}
        touched: dict = {}
        first_of = []
        second_of = []
        for o in b:
            for k in own_ae.get(o, ()):
                ae_owned[k] = ae_owned.get(k, 0) + 1
            fc = facts.first_counts(o)
            first_of.append(fc)
            for k, c in fc.items():
                touched[k] = touched.get(k, 0) + c
            sc = facts.second_counts(o)
            second_of.append(sc)
            for k, c in sc.items():
                touched[k] = touched.get(k, 0) + c
        g = groups_get((_P_AE_NEW,))
        if g:
            for k, c in ae_owned.items():
                row = g.get(k)
                if row is not None and cnt[k] - c <= 0:
                    offs.append(row)
        g = groups_get((_P_RD_NN,))
        if g and touched:
            inside: dict = {}
            for o in b:
                for o2 in b:
                    for k in facts.pair_keys(o, o2):
                        inside[k] = inside.get(k, 0) + 1
            inside_get = inside.get
            for k, t in touched.items():
                row = g.get(k)
                if row is not None and cnt[k] - t + inside_get(k, 0) <= 0:
                    offs.append(row)
        for v, o in enumerate(b):
            g = groups_get((_P_AE_BOUND, v))
            if g:
                for k in own_ae.get(o, ()):
                    row = g.get(k)
                    if row is not None:
                        ons.append(row)
            g = groups_get((_P_RD_BN, v))
            if g:
                for k, c in first_of[v].items():
                    row = g.get(k)
                    if row is not None:
                        for o2 in b:
                            if o2 != o:
                                c -= facts.pair_keys(o, o2).count(k)
                        if c > 0:
                            ons.append(row)
            g = groups_get((_P_RD_NB, v))
            if g:
                for k, c in second_of[v].items():
                    row = g.get(k)
                    if row is not None:
                        for o2 in b:
                            if o2 != o:
                                c -= facts.pair_keys(o2, o).count(k)
                        if c > 0:
                            ons.append(row)
        for v0, o0 in enumerate(b):
            for v1, o1 in enumerate(b):
                if v0 == v1:
                    continue
                g = groups_get((_P_RD_BB, v0, v1))
                if g:
                    for k in facts.pair_keys(o0, o1):
                        row = g.get(k)
                        if row is not None:
                            ons.append(row)
        return offs, ons

    # -- statistics update ------------------------------------------------------

    def update_tests(self, facts, bindings_in: list, output, alpha: float) -> bool:
        """Record one observation in the baseline and every candidate table,
        then bubble confidently-better candidates up the ranking.

        Returns True exactly when a swap lands a new candidate at rank 0.
        """
        self.baseline.observe(0, output)
        n = self.n
        if n == 0:
            return False
        y = self.output_col(output)
        vec = self.branch_vector(facts, bindings_in)
        inv = ~vec
        c1 = self.C1[:n, y]
        old = c1[vec]
        c1[vec] = old + 1
        self.sq1[:n][vec] += 2.0 * old + 1.0
        self.rs1[:n][vec] += 1.0
        c0 = self.C0[:n, y]
        old0 = c0[inv]
        c0[inv] = old0 + 1
        self.sq0[:n][inv] += 2.0 * old0 + 1.0
        self.rs0[:n][inv] += 1.0
        if self.n_outputs == 1:
            # every table predicts its single output perfectly: all scores
            # are 1, so no interval can clear another and no swap can fire
            return False
        lo, hi = self._intervals(alpha)
        order = self.order[:n]
        lo_o = lo[order]
        hi_o = hi[order]
        if not np.any(lo_o[1:] > hi_o[:-1]):
            return False
        lo_l = lo_o.tolist()
        hi_l = hi_o.tolist()
        for i in range(n - 2, -1, -1):
            if lo_l[i + 1] > hi_l[i]:
                lo_l[i], lo_l[i + 1] = lo_l[i + 1], lo_l[i]
                hi_l[i], hi_l[i + 1] = hi_l[i + 1], hi_l[i]
                order[i], order[i + 1] = order[i + 1], order[i]
                if i == 0:
                    return True
        return False

    def batch_update(self, facts, bindings: list, output) -> None:
        """Fold a run of single-binding observations with one shared output
        into the tables at once.

        Only valid while the node has at most one output key: every table's
        score is then exactly 1, so no ranking swap, split, or collapse can
        fire between the individual observations and the fold is equivalent
        to processing them one at a time.
        """
        m = len(bindings)
        b = self.baseline
        c = b.counts.get((0, output), 0)
        b.counts[(0, output)] = c + m
        b.total += m
        b._row_totals[0] = b._row_totals.get(0, 0) + m
        b._row_sq[0] = b._row_sq.get(0, 0) + m * (2 * c + m)
        n = self.n
        if n == 0:
            return
        y = self.output_col(output)
        if self.n_outputs > 1:
            raise RuntimeError("batched update requires a single output key")
        base = self.row_exist[:n] & self._presence(facts)
        acc = base.astype(np.int64) * m
        for binding in bindings:
            if len(binding) == 1:
                offs, ons = self._corrections_single(facts, binding[0])
                if offs is not None:
                    acc[offs] -= 1
                if ons is not None:
                    acc[ons] += 1
            else:
                offs, ons = self._corrections_general(facts, binding)
                for r in offs:
                    acc[r] -= 1
                for r in ons:
                    acc[r] += 1
        old1 = self.C1[:n, y].copy()
        self.C1[:n, y] = old1 + acc
        self.sq1[:n] += acc * (2.0 * old1 + acc)
        self.rs1[:n] += acc
        rest = m - acc
        old0 = self.C0[:n, y].copy()
        self.C0[:n, y] = old0 + rest
        self.sq0[:n] += rest * (2.0 * old0 + rest)
        self.rs0[:n] += rest

    def _intervals(self, alpha: float):
        n = self.n
        rs0 = self.rs0[:n]
        rs1 = self.rs1[:n]
        t = rs0 + rs1
        with np.errstate(divide="ignore", invalid="ignore"):
            s = np.where(rs0 > 0, self.sq0[:n] / np.maximum(rs0, 1.0), 0.0) \
                + np.where(rs1 > 0, self.sq1[:n] / np.maximum(rs1, 1.0), 0.0)
            s = np.where(t > 0, s / np.maximum(t, 1.0), 0.0)
            hw = np.where(t > 0, np.sqrt(math.log(2.0 / alpha) / (2.0 * np.maximum(t, 1.0))), 1.0)
        return np.maximum(s - hw, 0.0), np.minimum(s + hw, 1.0)

    def row_interval(self, row: int, alpha: float) -> ConfidenceInterval:
        rs0 = self.rs0[row]
        rs1 = self.rs1[row]
        t = rs0 + rs1
        if t <= 0:
            return ConfidenceInterval(0.0, 1.0)
        s = 0.0
        if rs0 > 0:
            s += self.sq0[row] / rs0
        if rs1 > 0:
            s += self.sq1[row] / rs1
        s /= t
        hw = hoeffding_halfwidth(int(t), alpha)
        return ConfidenceInterval(max(0.0, s - hw), min(1.0, s + hw))

    def row_ftable(self, row: int) -> FTable:
        t = FTable()
        for col, y in enumerate(self.out_keys):
            for x, mat in ((0, self.C0), (1, self.C1)):
                c = int(mat[row, col])
                if c:
                    t.counts[(x, y)] = c
                    t.total += c
                    t._row_totals[x] = t._row_totals.get(x, 0) + c
                    t._row_sq[x] = t._row_sq.get(x, 0) + c * c
        return t

    def best_row(self) -> int:
        return int(self.order[0])

    def current(self, pred_cache=None) -> list:
        """Candidate views in current ranking order (index 0 = best)."""
        return [Candidate(self.hypothesis(int(r), pred_cache), self, int(r))
                for r in self.order[: self.n]]

    @property
    def candidate_count(self) -> int:
        return self.n


# ---------------------------------------------------------------------------
# Tree nodes and the tree itself
# ---------------------------------------------------------------------------

class FoldtNode:
    __slots__ = ("kind", "tracking", "hypothesis", "left", "right")

    def __init__(self, kind, tracking, hypothesis=None, left=None, right=None):
        self.kind = kind
        self.tracking = tracking
        self.hypothesis = hypothesis
        self.left = left
        self.right = right

    def is_leaf(self) -> bool:
        return self.kind == LEAF

    def is_branch(self) -> bool:
        return self.kind == BRANCH


class Foldt:
    """A first-order logical decision tree with online learning.

    `observe` consumes (facts, argument ids, output key); `predict` returns
    the reached leaf's output distribution (empty for a fresh tree, which
    callers interpret as "no change").  `branch_updating=False` freezes
    every branch at creation: no test revision and no collapse, the
    ablation setting.
    """

    def __init__(self, alpha: float = 0.01, arg_types: tuple = (0,),
                 branch_updating: bool = True):
        if not (0.0 < alpha < 1.0):
            raise ValueError("alpha must be in (0, 1)")
        self.alpha = alpha
        self.arg_types = tuple(arg_types)
        self.arg_count = len(self.arg_types)
        self.branch_updating = branch_updating
        self.root = FoldtNode(LEAF, TrackingData(self.arg_count, self.arg_types))
        self.n_observations = 0
        self.split_events = 0
        self.collapse_events = 0
        self.revise_events = 0

    def reset(self) -> None:
        self.root = FoldtNode(LEAF, TrackingData(self.arg_count, self.arg_types))
        self.n_observations = 0

    # -- learning --------------------------------------------------------------

    def observe(self, facts, args, output) -> None:
        if len(args) != self.arg_count:
            raise ValueError("argument count mismatch")
        self.n_observations += 1
        self._observe(self.root, facts, [tuple(args)], output)

    def can_batch(self, output) -> bool:
        """True when a shared-output run of observations may be folded."""
        tracking = self.root.tracking
        return (self.root.kind == LEAF
                and (tracking.n_outputs == 0
                     or (tracking.n_outputs == 1 and output in tracking.out_index)))

    def observe_batch(self, facts, args_list, output) -> None:
        """Observe many (args, output) samples with one shared output key.

        Semantically identical to sequential `observe` calls; see
        TrackingData.batch_update for the argument.
        """
        if not self.can_batch(output):
            raise RuntimeError("tree not eligible for batched observation")
        tracking = self.root.tracking
        tracking.add_predicates(facts)
        tracking.batch_update(facts, [tuple(a) for a in args_list], output)
        self.n_observations += len(args_list)

    def _observe(self, node, facts, bindings_in, output):
        tracking = node.tracking
        frozen_branch = node.kind == BRANCH and not self.branch_updating
        new_test = False
        if not frozen_branch:
            tracking.add_predicates(facts)
            new_test = tracking.update_tests(facts, bindings_in, output, self.alpha)
            if self._update_node_type(node):
                new_test = False
        if node.kind == BRANCH:
            if new_test:
                self._reset_branch(node)
                self.revise_events += 1
            else:
                taken, bindings_out = check_branch(facts, node.hypothesis, bindings_in)
                if taken:
                    self._observe(node.left, facts, bindings_out, output)
                else:
                    self._observe(node.right, facts, bindings_in, output)

    def _update_node_type(self, node) -> bool:
        tracking = node.tracking
        if node.kind == LEAF:
            if tracking.n == 0 or tracking.n_outputs <= 1:
                return False
            best = tracking.best_row()
            if interval_better(tracking.row_interval(best, self.alpha),
                               tracking.baseline.score_interval(self.alpha)):
                hyp = tracking.hypothesis(best)
                node.kind = BRANCH
                node.hypothesis = hyp
                node.left, node.right = self._fresh_children(tracking, hyp)
                self.split_events += 1
                return True
            return False
        collapse = tracking.n == 0
        if not collapse:
            best = tracking.best_row()
            collapse = not interval_better(
                tracking.row_interval(best, self.alpha),
                tracking.baseline.score_interval(self.alpha))
        if collapse:
            node.kind = LEAF
            node.hypothesis = None
            node.left = node.right = None
            self.collapse_events += 1
            return True
        return False

    def _reset_branch(self, node) -> None:
        tracking = node.tracking
        hyp = tracking.hypothesis(tracking.best_row())
        node.hypothesis = hyp
        node.left, node.right = self._fresh_children(tracking, hyp)

    @staticmethod
    def _fresh_children(tracking, hyp):
        # left: fresh variables bound, typed by the test
        # right: nothing new bound, parent's variable bookkeeping unchanged
        left = FoldtNode(LEAF, TrackingData(
            tracking.n_existing_vars + hyp.n_new_vars, hyp.var_class_types))
        right = FoldtNode(LEAF, TrackingData(
            tracking.n_existing_vars, tracking.var_class_types))
        return left, right

    # -- inference ---------------------------------------------------------------

    def predict(self, facts, args, short_circuit: bool = True) -> dict:
        if len(args) != self.arg_count:
            raise ValueError("argument count mismatch")
        if short_circuit:
            leaf, _, _ = evaluate_short_circuit(self.root, facts, tuple(args))
        else:
            leaf = evaluate_exhaustive(self.root, facts, [tuple(args)])
        return leaf.tracking.baseline.conditional_distribution(0)

    # -- inspection ----------------------------------------------------------------

    def nodes(self):
        stack = [self.root]
        while stack:
            node = stack.pop()
            yield node
            if node.kind == BRANCH:
                stack.append(node.right)
                stack.append(node.left)

    def depth(self) -> int:
        def d(node):
            if node.kind == LEAF:
                return 1
            return 1 + max(d(node.left), d(node.right))
        return d(self.root)

    def leaf_count(self) -> int:
        return sum(1 for n in self.nodes() if n.kind == LEAF)


def evaluate_exhaustive(node, facts, bindings_in: list):
    """Reference inference: full satisfying-binding sets at every branch."""
    while node.kind == BRANCH:
        taken, bindings_out = check_branch(facts, node.hypothesis, bindings_in)
        if taken:
            node = node.left
            bindings_in = bindings_out
        else:
            node = node.right
    return node


def rank_greater(a: str, b: str) -> bool:
    """Compare preference bitstrings: the shallowest decision dominates.

    Bits are appended as recursion unwinds, so the last character is the
    shallowest node's bit; compare from that end.
    """
    return a[::-1] > b[::-1]


def evaluate_short_circuit(node, facts, binding: tuple):
    """Depth-first inference returning as soon as an all-left path is found.

    Returns (leaf, preferred, rank) where `preferred` marks a fully-left
    downstream path and `rank` records the taken turns for arbitration
    among partially-satisfying bindings.  Reaches the same leaf as
    `evaluate_exhaustive`.
    """
    if node.kind == LEAF:
        return node, True, "1"
    hyp = node.hypothesis
    var_ids = hyp.var_ids
    best_leaf = None
    best_rank = ""
    for gargs in facts.get_args(hyp.pred_key):
        res = match_vars(binding, var_ids, gargs)
        if res is None:
            continue
        leaf, preferred, sub_rank = evaluate_short_circuit(node.left, facts, res)
        rank = sub_rank + "1"
        if preferred:
            return leaf, True, rank
        if rank_greater(rank, best_rank):
            best_rank = rank
            best_leaf = leaf
    if best_leaf is not None:
        return best_leaf, False, best_rank
    leaf, _, sub_rank = evaluate_short_circuit(node.right, facts, binding)
    return leaf, False, sub_rank + "0"
