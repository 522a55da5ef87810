"""Joint count tables, the predictive-power score, and confidence intervals.

Every tracked test keeps an FTable: a joint counter over (test outcome,
observed output).  The table's score S is the expected confidence in the
correct output,

    S = sum over (x, y) of P(y|x) * P(x, y),

which is 1 exactly when each input key determines a single output.  Tests
are compared through confidence intervals around S; an interval "beats"
another only when the two do not overlap, which is what gates all tree
edits.

The interval is a distribution-free Hoeffding band: half-width
sqrt(ln(2/alpha) / (2 * total)), clamped to [0, 1].  It is monotone in the
sample count, widens as alpha shrinks, and alpha is the learner's only
hyperparameter.	 Any construction with those properties is interchangeable
here.
"""

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class ConfidenceInterval:
    lower: float
    upper: float

    def __post_init__(self):
        if not (0.0 <= self.lower <= self.upper <= 1.0):
            raise ValueError(f"invalid interval [{self.lower}, {self.upper}]")


def interval_better(a: ConfidenceInterval, b: ConfidenceInterval) -> bool:
    """True iff interval `a` lies strictly above `b` (no overlap)."""
    return a.lower > b.upper


def hoeffding_halfwidth(total: int, alpha: float) -> float:
    if total <= 0:
        return 1.0
    return math.sqrt(math.log(2.0 / alpha) / (2.0 * total))


class FTable:
    """Dynamically-growing joint counter over (input key, output key).

    Keys are opaque hashables; the key spaces grow as observations arrive
    and counts are never removed.
    """

    __slots__ = ("counts", "total", "_row_totals", "_row_sq")

    def __init__(self):
        self.counts: dict = {}          # (x, y) -> count
        self.total: int = 0
        self._row_totals: dict = {}     # x -> sum_y counts
        self._row_sq: dict = {}         # x -> sum_y counts^2

    def observe(self, x, y) -> None:
        c = self.counts.get((x, y), 0)
        self.counts[(x, y)] = c + 1
        self.total += 1
        self._row_totals[x] = self._row_totals.get(x, 0) + 1
        self._row_sq[x] = self._row_sq.get(x, 0) + 2 * c + 1

    def conditional_distribution(self, x) -> dict:
        """P(y | x) over observed outputs; empty when x was never seen."""
        row = {y: c for (xx, y), c in self.counts.items() if xx == x}
        t = sum(row.values())
        if t == 0:
            return {}
        return {y: c / t for y, c in row.items()}

    def score(self) -> float:
        """Point estimate of S; 0.0 for an empty table."""
        if self.total == 0:
            return 0.0
        acc = 0.0
        for x, sq in self._row_sq.items():
            acc += sq / self._row_totals[x]
        return acc / self.total

    def score_interval(self, alpha: float) -> ConfidenceInterval:
        """Confidence interval over S; [0, 1] when nothing was observed."""
        if not (0.0 < alpha < 1.0):
            raise ValueError(f"alpha must be in (0, 1), got {alpha}")
        if self.total == 0:
            return ConfidenceInterval(0.0, 1.0)
        s = self.score()
        hw = hoeffding_halfwidth(self.total, alpha)
        return ConfidenceInterval(max(0.0, s - hw), min(1.0, s + hw))

    def output_keys(self) -> set:
        return {y for (_, y) in self.counts}

    def copy(self) -> "FTable":
        t = FTable()
        t.counts = dict(self.counts)
        t.total = self.total
        t._row_totals = dict(self._row_totals)
        t._row_sq = dict(self._row_sq)
        return t
