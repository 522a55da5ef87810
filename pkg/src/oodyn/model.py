"""The object-oriented transition model: a table of per-rule trees.

One tree per (class, attribute, action) predicts the change of that
attribute for objects of that class when the action is taken.  Observing a
transition extracts the facts of the source state once and feeds every
(object, attribute) delta to its rule; predicting runs every rule against
a shared fact view of the state and adds the predicted deltas back onto
the input attributes.
"""

from dataclasses import dataclass

from .state import (ObjectState, QueryPredicateSet, build_fact_index,
                    extract_facts)
from .tree import Foldt


@dataclass(frozen=True)
class Transition:
    s: ObjectState
    action: int
    s_next: ObjectState


def _schema_compatible(s: ObjectState, t: ObjectState) -> bool:
    if len(s.objects) != len(t.objects):
        return False
    for o in s.objects:
        p = t.by_id.get(o.id)
        if p is None or p.class_id != o.class_id:
            return False
        if o.attributes.keys() != p.attributes.keys():
            return False
    return True


class PredictedState:
    """Per-attribute delta distributions plus the collapsed mode state.

    `distributions[(obj_id, attr_id)]` maps delta tuples to probabilities;
    an empty distribution means "no information" and collapses to a zero
    delta.  Mode collapse breaks ties on the lexicographically smallest
    delta.
    """

    __slots__ = ("source", "distributions")

    def __init__(self, source: ObjectState, distributions: dict):
        self.source = source
        self.distributions = distributions

    def mode_delta(self, obj_id: int, attr_id: int) -> tuple:
        dist = self.distributions.get((obj_id, attr_id))
        if not dist:
            o = self.source.by_id[obj_id]
            return (0,) * len(o.attributes[attr_id])
        best_p = max(dist.values())
        return min(d for d, p in dist.items() if p == best_p)

    def collapsed(self) -> ObjectState:
        objs = []
        for o in self.source.objects:
            attrs = {}
            for m, v in o.attributes.items():
                d = self.mode_delta(o.id, m)
                attrs[m] = tuple(a + b for a, b in zip(v, d))
            objs.append(type(o)(o.id, o.class_id, attrs))
        return ObjectState(objs, validate=False)

    def sampled(self, rng) -> ObjectState:
        """Draw one successor, sampling each attribute delta independently."""
        objs = []
        for o in self.source.objects:
            attrs = {}
            for m, v in o.attributes.items():
                dist = self.distributions.get((o.id, m))
                if not dist:
                    attrs[m] = v
                    continue
                deltas = sorted(dist)
                weights = [dist[d] for d in deltas]
                x = rng.random()
                acc = 0.0
                pick = deltas[-1]
                for d, w in zip(deltas, weights):
                    acc += w
                    if x <= acc:
                        pick = d
                        break
                attrs[m] = tuple(a + b for a, b in zip(v, pick))
            objs.append(type(o)(o.id, o.class_id, attrs))
        return ObjectState(objs, validate=False)


class TransitionModel:
    """Map from (class, attribute, action) to one decision tree."""

    def __init__(self, alpha: float = 0.01, branch_updating: bool = True):
        self.alpha = alpha
        self.branch_updating = branch_updating
        self.rules: dict = {}  # (class_id, attr_id, action) -> Foldt

    def rule(self, class_id: int, attr_id: int, action: int) -> Foldt:
        key = (class_id, attr_id, action)
        tree = self.rules.get(key)
        if tree is None:
            tree = Foldt(self.alpha, (class_id,), self.branch_updating)
            self.rules[key] = tree
        return tree

    def observe(self, t: Transition) -> None:
        if not _schema_compatible(t.s, t.s_next):
            raise ValueError("transition states have different object schemas")
        facts = build_fact_index(t.s)
        nxt = t.s_next.by_id
        per_rule: dict = {}
        for o in t.s.objects:
            after = nxt[o.id]
            for m, v in o.attributes.items():
                delta = tuple(b - a for a, b in zip(v, after.attributes[m]))
                per_rule.setdefault((o.class_id, m), []).append(((o.id,), delta))
        for (c, m), samples in per_rule.items():
            tree = self.rule(c, m, t.action)
            first_delta = samples[0][1]
            if (len(samples) > 1
                    and all(d == first_delta for _, d in samples)
                    and tree.can_batch(first_delta)):
                tree.observe_batch(facts, [a for a, _ in samples], first_delta)
            else:
                for args, delta in samples:
                    tree.observe(facts, args, delta)

    def predict(self, s: ObjectState, action: int, mode: str = "both") -> PredictedState:
        """Predict per-attribute delta distributions for every object.

        `mode` selects the inference optimizations: `none` (materialize all
        facts, full binding-set evaluation), `eval` (all facts,
        short-circuit), `query` (on-demand facts, full evaluation), `both`.
        """
        if mode in ("none", "eval"):
            facts = extract_facts(s)
        elif mode in ("query", "both"):
            facts = QueryPredicateSet(s)
        else:
            raise ValueError(f"unknown inference mode {mode!r}")
        short = mode in ("eval", "both")
        dists = {}
        rules = self.rules
        for o in s.objects:
            for m in o.attributes:
                tree = rules.get((o.class_id, m, action))
                if tree is None:
                    dists[(o.id, m)] = {}
                else:
                    dists[(o.id, m)] = tree.predict(facts, (o.id,), short_circuit=short)
        return PredictedState(s, dists)

    # -- persistence ------------------------------------------------------------

    def save_text(self) -> str:
        from .serialize import model_to_text
        return model_to_text(self)

    @staticmethod
    def load_text(text: str) -> "TransitionModel":
        from .serialize import model_from_text
        return model_from_text(text)
