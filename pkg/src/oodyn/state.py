"""Object-oriented states, the two predicate classes, and fact extraction.

A state is a set of typed objects, each with integer-vector attributes.
Conditions over states come in exactly two shapes:

  * attribute equality   P(X):    X[m] = v          (arity 1)
  * relative difference  P(X, Y): Y[m] - X[m] = v   (arity 2)

`extract_facts` materializes every true ground predicate of a state into a
FullPredicateSet, the structure the learner trains on.  Relative-difference
facts are stored for both argument orders so candidate generation never has
to consider mirrored predicates.  `QueryPredicateSet` is the lazy
alternative used for inference: facts are scanned from the state only when
a tree asks for them, then cached.

Predicates are interned as packed 63-bit integer keys so they can live in
sets, dicts, and numpy arrays cheaply.
"""

from dataclasses import dataclass, field

AE = 0  # attribute equality
RD = 1  # relative difference

_facts_serial = 0


def _next_facts_serial() -> int:
    global _facts_serial
    _facts_serial += 1
    return _facts_serial

_NO_CLASS = 63          # sentinel class slot for unary predicates
_VOFF = 1 << 13         # value components packed as 14-bit offsets
_VMAX = _VOFF - 1


# ---------------------------------------------------------------------------
# Predicate interning
# ---------------------------------------------------------------------------

def pack_ae(class_id: int, attr_id: int, value: tuple) -> int:
    return _pack(AE, class_id, _NO_CLASS, attr_id, value)


def pack_rd(class_a: int, class_b: int, attr_id: int, value: tuple) -> int:
    return _pack(RD, class_a, class_b, attr_id, value)


def _pack(kind: int, c1: int, c2: int, attr_id: int, value: tuple) -> int:
    if not (0 <= c1 < 63 and 0 <= c2 <= 63 and 0 <= attr_id < 64):
        raise ValueError(f"class/attr id out of packable range: {c1} {c2} {attr_id}")
    n = len(value)
    if not 1 <= n <= 3:
        raise ValueError(f"attribute vectors must have length 1..3, got {n}")
    key = (kind << 62) | (c1 << 56) | (c2 << 50) | (attr_id << 44) | (n << 42)
    for i, comp in enumerate(value):
        if not -_VOFF <= comp <= _VMAX:
            raise ValueError(f"value component {comp} out of packable range")
        key |= (comp + _VOFF) << (14 * i)
    return key


def unpack(key: int) -> tuple:
    """Inverse of the packers: (kind, c1, c2, attr_id, value)."""
    kind = (key >> 62) & 0x1
    c1 = (key >> 56) & 0x3F
    c2 = (key >> 50) & 0x3F
    attr_id = (key >> 44) & 0x3F
    n = (key >> 42) & 0x3
    value = tuple(((key >> (14 * i)) & 0x3FFF) - _VOFF for i in range(n))
    return kind, c1, c2, attr_id, value


@dataclass(frozen=True)
class Predicate:
    """A lifted condition template; `arg_types` restricts argument classes."""

    kind: int
    attr_id: int
    value: tuple
    arg_types: tuple

    @property
    def arity(self) -> int:
        return len(self.arg_types)

    @property
    def key(self) -> int:
        if self.kind == AE:
            return pack_ae(self.arg_types[0], self.attr_id, self.value)
        return pack_rd(self.arg_types[0], self.arg_types[1], self.attr_id, self.value)

    @staticmethod
    def from_key(key: int) -> "Predicate":
        kind, c1, c2, attr_id, value = unpack(key)
        types = (c1,) if kind == AE else (c1, c2)
        return Predicate(kind, attr_id, value, types)

    def __repr__(self):
        if self.kind == AE:
            return f"P[c{self.arg_types[0]}.a{self.attr_id}={self.value}](X)"
        return (f"P[a{self.attr_id}:Y-X={self.value}]"
                f"(c{self.arg_types[0]} X, c{self.arg_types[1]} Y)")


@dataclass(frozen=True)
class GroundPredicate:
    predicate: Predicate
    arguments: tuple

    def __post_init__(self):
        if len(self.arguments) != self.predicate.arity:
            raise ValueError("argument count does not match predicate arity")


# ---------------------------------------------------------------------------
# States
# ---------------------------------------------------------------------------

@dataclass
class Object:
    __slots__ = ("id", "class_id", "attributes")
    id: int
    class_id: int
    attributes: dict  # attr_id -> tuple[int, ...]


class ObjectState:
    """An immutable collection of objects with schema checks.

    All objects of one class carry the same attribute ids with the same
    vector lengths; ids are unique.  Mutating helpers return new states.
    """

    __slots__ = ("objects", "by_id", "_schema", "_shared_attrs")

    def __init__(self, objects: list, validate: bool = True):
        self.objects = list(objects)
        self.by_id = {o.id: o for o in self.objects}
        self._schema: dict = {}
        self._shared_attrs: dict = {}
        if validate:
            self._validate()

    def _validate(self):
        if len(self.by_id) != len(self.objects):
            raise ValueError("duplicate object ids in state")
        for o in self.objects:
            sig = tuple(sorted((m, len(v)) for m, v in o.attributes.items()))
            prev = self._schema.setdefault(o.class_id, sig)
            if prev != sig:
                raise ValueError(f"inconsistent schema for class {o.class_id}")

    def classes(self) -> set:
        return {o.class_id for o in self.objects}

    def of_class(self, class_id: int) -> list:
        return [o for o in self.objects if o.class_id == class_id]

    def get(self, obj_id: int) -> Object:
        return self.by_id[obj_id]

    def shared_attrs(self, ca: int, cb: int) -> tuple:
        """Attribute ids common to two classes, sorted."""
        key = (ca, cb)
        got = self._shared_attrs.get(key)
        if got is None:
            sa = {m for m, _ in self._class_sig(ca)}
            sb = {m for m, _ in self._class_sig(cb)}
            got = tuple(sorted(sa & sb))
            self._shared_attrs[key] = got
        return got

    def _class_sig(self, c: int):
        sig = self._schema.get(c)
        if sig is None:
            for o in self.objects:
                if o.class_id == c:
                    sig = tuple(sorted((m, len(v)) for m, v in o.attributes.items()))
                    self._schema[c] = sig
                    break
            else:
                raise KeyError(f"no objects of class {c}")
        return sig

    def replace_attr(self, obj_id: int, attr_id: int, value: tuple) -> "ObjectState":
        old = self.by_id[obj_id]
        attrs = dict(old.attributes)
        attrs[attr_id] = tuple(value)
        new = Object(old.id, old.class_id, attrs)
        objs = [new if o is old else o for o in self.objects]
        out = ObjectState.__new__(ObjectState)
        out.objects = objs
        by_id = dict(self.by_id)
        by_id[obj_id] = new
        out.by_id = by_id
        out._schema = {}
        out._shared_attrs = {}
        return out

    def copy(self) -> "ObjectState":
        return ObjectState(
            [Object(o.id, o.class_id, dict(o.attributes)) for o in self.objects],
            validate=False,
        )

    def __eq__(self, other):
        if not isinstance(other, ObjectState):
            return NotImplemented
        if len(self.objects) != len(other.objects):
            return False
        for o in self.objects:
            p = other.by_id.get(o.id)
            if p is None or p.class_id != o.class_id or p.attributes != o.attributes:
                return False
        return True

    def __len__(self):
        return len(self.objects)

    # -- serialization (one object per line: `id class_id attr=v1,v2 ...`) --

    def to_text(self) -> str:
        lines = []
        for o in self.objects:
            parts = [str(o.id), str(o.class_id)]
            for m in sorted(o.attributes):
                parts.append(f"{m}=" + ",".join(str(c) for c in o.attributes[m]))
            lines.append(" ".join(parts))
        return "\n".join(lines) + "\n"

    @staticmethod
    def from_text(text: str) -> "ObjectState":
        objs = []
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            oid, cid = int(parts[0]), int(parts[1])
            attrs = {}
            for tok in parts[2:]:
                m, vals = tok.split("=")
                attrs[int(m)] = tuple(int(x) for x in vals.split(","))
            objs.append(Object(oid, cid, attrs))
        return ObjectState(objs)


# ---------------------------------------------------------------------------
# Fact containers
# ---------------------------------------------------------------------------

class FullPredicateSet:
    """Every true ground predicate of a state, with lookup indexes.

    Beyond the fact lists themselves this keeps per-object and per-pair
    indexes (which predicates mention an object in which slot) that the
    learner's candidate evaluation relies on.
    """

    __slots__ = ("key_list", "cnt", "args", "own_ae", "firstc", "secondc",
                 "pairc", "_pred_cache", "_sorted_keys", "_presence_cache",
                 "n_facts", "serial")

    def __init__(self):
        self.serial = _next_facts_serial()
        self.key_list: list = []      # insertion order, deterministic
        self.cnt: dict = {}           # key -> number of ground facts
        self.args: dict = {}          # key -> list of argument tuples
        self.own_ae: dict = {}        # obj -> list of AE keys true of it
        self.firstc: dict = {}        # obj -> {rd key -> count as first arg}
        self.secondc: dict = {}       # obj -> {rd key -> count as second arg}
        self.pairc: dict = {}         # (i, j) -> list of rd keys
        self._pred_cache: dict = {}
        self._sorted_keys = None
        self._presence_cache: dict = {}
        self.n_facts = 0

    # building ------------------------------------------------------------

    def add_ae(self, key: int, obj_id: int) -> None:
        if key in self.cnt:
            self.cnt[key] += 1
            self.args[key].append((obj_id,))
        else:
            self.key_list.append(key)
            self.cnt[key] = 1
            self.args[key] = [(obj_id,)]
        self.own_ae.setdefault(obj_id, []).append(key)
        self.n_facts += 1

    def add_rd(self, key: int, i: int, j: int) -> None:
        if key in self.cnt:
            self.cnt[key] += 1
            self.args[key].append((i, j))
        else:
            self.key_list.append(key)
            self.cnt[key] = 1
            self.args[key] = [(i, j)]
        fc = self.firstc.setdefault(i, {})
        fc[key] = fc.get(key, 0) + 1
        sc = self.secondc.setdefault(j, {})
        sc[key] = sc.get(key, 0) + 1
        self.pairc.setdefault((i, j), []).append(key)
        self.n_facts += 1

    def add(self, g: GroundPredicate) -> None:
        """Record a true ground predicate (test/bench entry point)."""
        key = g.predicate.key
        if g.predicate.kind == AE:
            self.add_ae(key, g.arguments[0])
        else:
            self.add_rd(key, g.arguments[0], g.arguments[1])
        self._sorted_keys = None
        self._presence_cache.clear()

    # queries ---------------------------------------------------------------

    def predicates(self) -> list:
        return [self.predicate(k) for k in self.key_list]

    def predicate(self, key: int) -> Predicate:
        p = self._pred_cache.get(key)
        if p is None:
            p = Predicate.from_key(key)
            self._pred_cache[key] = p
        return p

    def get_observations(self, p) -> list:
        """All ground instances of predicate `p` (Predicate or packed key)."""
        key = p if isinstance(p, int) else p.key
        pred = self.predicate(key)
        return [GroundPredicate(pred, a) for a in self.args.get(key, ())]

    def get_args(self, key: int) -> list:
        return self.args.get(key, [])

    def get_value(self, g: GroundPredicate) -> bool:
        key = g.predicate.key
        return tuple(g.arguments) in self.args.get(key, ())

    def first_counts(self, o: int) -> dict:
        return self.firstc.get(o, {})

    def second_counts(self, o: int) -> dict:
        return self.secondc.get(o, {})

    def pair_keys(self, i: int, j: int):
        return self.pairc.get((i, j), ())

    # array views used by the learner's single-binding fast path

    def own_keys_arr(self, o: int):
        import numpy as np
        return np.array(self.own_ae.get(o, ()), dtype=np.int64)

    def own_cnt1_keys(self, o: int):
        import numpy as np
        return np.array([k for k in self.own_ae.get(o, ()) if self.cnt[k] == 1],
                        dtype=np.int64)

    def first_keys_arr(self, o: int):
        import numpy as np
        return np.fromiter(self.firstc.get(o, {}).keys(), dtype=np.int64)

    def second_keys_arr(self, o: int):
        import numpy as np
        return np.fromiter(self.secondc.get(o, {}).keys(), dtype=np.int64)

    def isolated_pair_keys(self, o: int):
        """Relative-difference keys whose facts all involve object o."""
        import numpy as np
        out = []
        fc = self.firstc.get(o, {})
        sc = self.secondc.get(o, {})
        for k in fc.keys() | sc.keys():
            if self.cnt[k] - fc.get(k, 0) - sc.get(k, 0) <= 0:
                out.append(k)
        return np.array(out, dtype=np.int64)

    def sorted_keys(self):
        import numpy as np
        if self._sorted_keys is None:
            self._sorted_keys = np.array(sorted(self.cnt), dtype=np.int64)
        return self._sorted_keys

    def __contains__(self, key: int) -> bool:
        return key in self.cnt

    def __len__(self):
        return self.n_facts


def extract_facts(state: ObjectState) -> FullPredicateSet:
    """Materialize every true fact of a state.

    One attribute-equality fact per (object, attribute); one
    relative-difference fact per ordered pair of distinct objects per
    shared attribute (both orders are emitted).  This is the plain
    reference construction; `build_fact_index` produces an equivalent
    container on an array backend for the learning hot path.
    """
    facts = FullPredicateSet()
    objs = state.objects
    n = len(objs)
    shared = state.shared_attrs
    for i in range(n):
        oi = objs[i]
        ci = oi.class_id
        ai = oi.attributes
        for m, v in ai.items():
            facts.add_ae(pack_ae(ci, m, v), oi.id)
        for j in range(i + 1, n):
            oj = objs[j]
            cj = oj.class_id
            aj = oj.attributes
            for m in shared(ci, cj):
                vi = ai[m]
                vj = aj[m]
                fwd = tuple(b - a for a, b in zip(vi, vj))
                rev = tuple(-d for d in fwd)
                facts.add_rd(pack_rd(ci, cj, m, fwd), oi.id, oj.id)
                facts.add_rd(pack_rd(cj, ci, m, rev), oj.id, oi.id)
    return facts


class IndexedFacts:
    """Array-backed fact container equivalent to `extract_facts` output.

    Relative-difference facts are computed with vectorized pairwise
    differences and kept in key-sorted arrays; per-object and per-pair
    views are materialized lazily.  Exposes the same query surface the
    learner uses on FullPredicateSet.
    """

    __slots__ = ("state", "cnt", "own_ae", "_ae_args", "_uniq", "_uniq_cnt",
                 "_rd_keys", "_rd_firsts", "_rd_seconds", "_rd_span",
                 "_first_group", "_second_group", "_first_cache",
                 "_second_cache", "_args_cache", "_pred_cache",
                 "_presence_cache", "_own_arr", "_own_cnt1", "_isolated",
                 "n_facts", "serial")

    def __init__(self, state: ObjectState):
        import numpy as np
        self.serial = _next_facts_serial()
        self.state = state
        self.own_ae: dict = {}
        self._ae_args: dict = {}
        cnt: dict = {}
        groups: dict = {}
        for o in state.objects:
            for m, v in o.attributes.items():
                key = pack_ae(o.class_id, m, v)
                if key in cnt:
                    cnt[key] += 1
                    self._ae_args[key].append((o.id,))
                else:
                    cnt[key] = 1
                    self._ae_args[key] = [(o.id,)]
                self.own_ae.setdefault(o.id, []).append(key)
                groups.setdefault(m, []).append(o)
        n_ae = sum(len(v) for v in self._ae_args.values())
        key_parts = []
        first_parts = []
        second_parts = []
        for m, objs in sorted(groups.items()):
            n = len(objs)
            if n < 2:
                continue
            length = len(objs[0].attributes[m])
            vals = np.array([o.attributes[m] for o in objs], dtype=np.int64)
            ids = np.array([o.id for o in objs], dtype=np.int64)
            cls = np.array([o.class_id for o in objs], dtype=np.int64)
            base = (1 << 62) | (m << 44) | (length << 42)
            keys = base + (cls[:, None] << 56) + (cls[None, :] << 50)
            for k in range(length):
                diff = vals[None, :, k] - vals[:, None, k]
                if diff.min() < -_VOFF or diff.max() > _VMAX:
                    raise ValueError("attribute difference out of packable range")
                keys = keys + ((diff + _VOFF) << (14 * k))
            off = ~np.eye(n, dtype=bool)
            key_parts.append(keys[off])
            first_parts.append(np.broadcast_to(ids[:, None], (n, n))[off])
            second_parts.append(np.broadcast_to(ids[None, :], (n, n))[off])
        if key_parts:
            keys = np.concatenate(key_parts)
            firsts = np.concatenate(first_parts)
            seconds = np.concatenate(second_parts)
            order = np.argsort(keys, kind="stable")
            self._rd_keys = keys[order]
            self._rd_firsts = firsts[order]
            self._rd_seconds = seconds[order]
            edges = np.flatnonzero(self._rd_keys[1:] != self._rd_keys[:-1]) + 1
            starts = np.concatenate(([0], edges, [len(self._rd_keys)]))
            uniq = self._rd_keys[starts[:-1]]
            self._rd_span = {int(k): (int(a), int(b)) for k, a, b in
                             zip(uniq.tolist(), starts[:-1].tolist(), starts[1:].tolist())}
            for k, (a, b) in self._rd_span.items():
                cnt[k] = b - a
        else:
            self._rd_keys = np.empty(0, dtype=np.int64)
            self._rd_firsts = np.empty(0, dtype=np.int64)
            self._rd_seconds = np.empty(0, dtype=np.int64)
            self._rd_span = {}
        self.cnt = cnt
        self.n_facts = n_ae + len(self._rd_keys)
        self._uniq = None
        self._uniq_cnt = None
        self._first_group = None
        self._second_group = None
        self._first_cache: dict = {}
        self._second_cache: dict = {}
        self._args_cache: dict = {}
        self._pred_cache: dict = {}
        self._presence_cache: dict = {}
        self._own_arr: dict = {}
        self._own_cnt1: dict = {}
        self._isolated = None

    # -- interface shared with FullPredicateSet --

    def predicate(self, key: int) -> Predicate:
        p = self._pred_cache.get(key)
        if p is None:
            p = Predicate.from_key(key)
            self._pred_cache[key] = p
        return p

    def predicates(self) -> list:
        return [self.predicate(k) for k in sorted(self.cnt)]

    def get_args(self, key: int) -> list:
        got = self._args_cache.get(key)
        if got is not None:
            return got
        if key in self._ae_args:
            got = self._ae_args[key]
        else:
            span = self._rd_span.get(key)
            if span is None:
                got = []
            else:
                a, b = span
                got = list(zip(self._rd_firsts[a:b].tolist(),
                               self._rd_seconds[a:b].tolist()))
        self._args_cache[key] = got
        return got

    def get_observations(self, p) -> list:
        key = p if isinstance(p, int) else p.key
        pred = self.predicate(key)
        return [GroundPredicate(pred, a) for a in self.get_args(key)]

    def get_value(self, g: GroundPredicate) -> bool:
        return tuple(g.arguments) in self.get_args(g.predicate.key)

    def _group_by(self, which: str):
        import numpy as np
        arr = self._rd_firsts if which == "first" else self._rd_seconds
        order = np.argsort(arr, kind="stable")
        objs = arr[order]
        keys = self._rd_keys[order]
        edges = np.flatnonzero(objs[1:] != objs[:-1]) + 1
        starts = np.concatenate(([0], edges, [len(objs)]))
        group = {}
        for idx in range(len(starts) - 1):
            a, b = int(starts[idx]), int(starts[idx + 1])
            group[int(objs[a])] = keys[a:b]
        return group

    def _counts_for(self, o: int, which: str) -> dict:
        cache = self._first_cache if which == "first" else self._second_cache
        got = cache.get(o)
        if got is None:
            if which == "first":
                if self._first_group is None:
                    self._first_group = self._group_by("first")
                keys = self._first_group.get(o)
            else:
                if self._second_group is None:
                    self._second_group = self._group_by("second")
                keys = self._second_group.get(o)
            got = {}
            if keys is not None:
                for k in keys.tolist():
                    got[k] = got.get(k, 0) + 1
            cache[o] = got
        return got

    def first_counts(self, o: int) -> dict:
        return self._counts_for(o, "first")

    def second_counts(self, o: int) -> dict:
        return self._counts_for(o, "second")

    _EMPTY_KEYS = None

    def _empty(self):
        import numpy as np
        if IndexedFacts._EMPTY_KEYS is None:
            IndexedFacts._EMPTY_KEYS = np.empty(0, dtype=np.int64)
        return IndexedFacts._EMPTY_KEYS

    def first_keys_arr(self, o: int):
        if self._first_group is None:
            self._first_group = self._group_by("first")
        got = self._first_group.get(o)
        return got if got is not None else self._empty()

    def second_keys_arr(self, o: int):
        if self._second_group is None:
            self._second_group = self._group_by("second")
        got = self._second_group.get(o)
        return got if got is not None else self._empty()

    def own_keys_arr(self, o: int):
        import numpy as np
        got = self._own_arr.get(o)
        if got is None:
            got = np.array(self.own_ae.get(o, ()), dtype=np.int64)
            self._own_arr[o] = got
        return got

    def own_cnt1_keys(self, o: int):
        import numpy as np
        got = self._own_cnt1.get(o)
        if got is None:
            got = np.array([k for k in self.own_ae.get(o, ())
                            if self.cnt[k] == 1], dtype=np.int64)
            self._own_cnt1[o] = got
        return got

    def isolated_pair_keys(self, o: int):
        """Relative-difference keys whose facts all involve object o."""
        if self._isolated is None:
            self._build_isolated()
        got = self._isolated.get(o)
        return got if got is not None else self._empty()

    def _build_isolated(self):
        """One vectorized pass computing isolated key sets for every object.

        A key is isolated for o when every one of its facts has o as an
        argument, i.e. the combined first/second touch count equals the
        key's total count.
        """
        import numpy as np
        self._isolated = {}
        nk = len(self._rd_keys)
        if nk == 0:
            return
        objs_all = np.concatenate((self._rd_firsts, self._rd_seconds))
        keys_all = np.concatenate((self._rd_keys, self._rd_keys))
        order = np.lexsort((keys_all, objs_all))
        oo = objs_all[order]
        ko = keys_all[order]
        pair_edge = np.empty(len(oo), dtype=bool)
        pair_edge[0] = True
        np.logical_or(oo[1:] != oo[:-1], ko[1:] != ko[:-1], out=pair_edge[1:])
        starts = np.flatnonzero(pair_edge)
        counts = np.diff(np.append(starts, len(oo)))
        keys_of_pair = ko[starts]
        objs_of_pair = oo[starts]
        # key totals via lookup into the sorted unique rd keys
        uniq = self._rd_keys[np.concatenate(([True], self._rd_keys[1:] != self._rd_keys[:-1]))] \
            if nk else self._rd_keys
        ucnt = np.diff(np.append(np.flatnonzero(
            np.concatenate(([True], self._rd_keys[1:] != self._rd_keys[:-1]))), nk))
        totals = ucnt[np.searchsorted(uniq, keys_of_pair)]
        isolated_mask = counts == totals
        iso_keys = keys_of_pair[isolated_mask]
        iso_objs = objs_of_pair[isolated_mask]
        obj_edge = np.concatenate(([True], iso_objs[1:] != iso_objs[:-1]))
        obj_starts = np.flatnonzero(obj_edge)
        bounds = np.append(obj_starts, len(iso_objs))
        for idx in range(len(obj_starts)):
            a, b = int(bounds[idx]), int(bounds[idx + 1])
            self._isolated[int(iso_objs[a])] = iso_keys[a:b]

    def pair_keys(self, i: int, j: int) -> list:
        if i == j:
            return ()
        oi = self.state.by_id.get(i)
        oj = self.state.by_id.get(j)
        if oi is None or oj is None:
            return ()
        out = []
        for m in self.state.shared_attrs(oi.class_id, oj.class_id):
            vi = oi.attributes[m]
            vj = oj.attributes[m]
            out.append(pack_rd(oi.class_id, oj.class_id, m,
                               tuple(b - a for a, b in zip(vi, vj))))
        return out

    def sorted_keys(self):
        import numpy as np
        if self._uniq is None:
            self._uniq = np.array(sorted(self.cnt), dtype=np.int64)
        return self._uniq

    def __contains__(self, key: int) -> bool:
        return key in self.cnt

    def __len__(self):
        return self.n_facts


def build_fact_index(state: ObjectState) -> IndexedFacts:
    """Fast equivalent of `extract_facts` for the learning loop."""
    return IndexedFacts(state)


# ---------------------------------------------------------------------------
# On-demand queries
# ---------------------------------------------------------------------------

class StateIndex:
    """Per-class and per-attribute-value object indexes for scanning."""

    __slots__ = ("by_class", "by_value")

    def __init__(self, state: ObjectState):
        self.by_class: dict = {}
        self.by_value: dict = {}
        for o in state.objects:
            self.by_class.setdefault(o.class_id, []).append(o)
            for m, v in o.attributes.items():
                self.by_value.setdefault((m, v), []).append(o)


def scan(state: ObjectState, p: Predicate, index: StateIndex | None = None) -> list:
    """All true bindings of `p` in `state`, via the value indexes."""
    if index is None:
        index = StateIndex(state)
    if p.kind == AE:
        c, m, v = p.arg_types[0], p.attr_id, p.value
        return [GroundPredicate(p, (o.id,))
                for o in index.by_value.get((m, v), ())
                if o.class_id == c]
    if p.kind == RD:
        c1, c2 = p.arg_types
        m, v = p.attr_id, p.value
        out = []
        for oi in index.by_class.get(c1, ()):
            v1 = oi.attributes.get(m)
            if v1 is None:
                continue
            target = tuple(a + d for a, d in zip(v1, v))
            for oj in index.by_value.get((m, target), ()):
                if oj.class_id == c2 and oj.id != oi.id:
                    out.append(GroundPredicate(p, (oi.id, oj.id)))
        return out
    raise ValueError(f"unknown predicate kind {p.kind}")


class QueryPredicateSet:
    """Lazy fact access: scan on first request, cache afterwards.

    Only predicates a tree actually tests get computed, which is the
    inference-side optimization the `query` ablation toggles.
    """

    __slots__ = ("state", "_index", "cache", "scan_count")

    def __init__(self, state: ObjectState):
        self.state = state
        self._index = None
        self.cache: dict = {}
        self.scan_count = 0

    def index(self) -> StateIndex:
        if self._index is None:
            self._index = StateIndex(self.state)
        return self._index

    def get_observations(self, p) -> list:
        pred = Predicate.from_key(p) if isinstance(p, int) else p
        key = pred.key
        got = self.cache.get(key)
        if got is None:
            got = scan(self.state, pred, self.index())
            self.cache[key] = got
            self.scan_count += 1
        return got

    def get_args(self, key: int) -> list:
        return [g.arguments for g in self.get_observations(key)]

    def get_value(self, g: GroundPredicate) -> bool:
        p = g.predicate
        if p.kind == AE:
            o = self.state.by_id.get(g.arguments[0])
            return (o is not None and o.class_id == p.arg_types[0]
                    and o.attributes.get(p.attr_id) == p.value)
        a = self.state.by_id.get(g.arguments[0])
        b = self.state.by_id.get(g.arguments[1])
        if a is None or b is None or a.id == b.id:
            return False
        if a.class_id != p.arg_types[0] or b.class_id != p.arg_types[1]:
            return False
        va = a.attributes.get(p.attr_id)
        vb = b.attributes.get(p.attr_id)
        if va is None or vb is None:
            return False
        return tuple(y - x for x, y in zip(va, vb)) == p.value
