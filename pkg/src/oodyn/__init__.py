"""Object-oriented transition learning with first-order logical decision trees."""

from .state import (AE, RD, GroundPredicate, Object, ObjectState, Predicate,
                    FullPredicateSet, QueryPredicateSet, extract_facts, scan)
from .stats import ConfidenceInterval, FTable, interval_better
from .tree import Foldt, Hypothesis, TrackingData, check_branch, match_vars
from .model import TransitionModel, PredictedState, Transition

__all__ = [
    "AE", "RD", "GroundPredicate", "Object", "ObjectState", "Predicate",
    "FullPredicateSet", "QueryPredicateSet", "extract_facts", "scan",
    "ConfidenceInterval", "FTable", "interval_better",
    "Foldt", "Hypothesis", "TrackingData", "check_branch", "match_vars",
    "TransitionModel", "PredictedState", "Transition",
]
