"""Domain interface and shared grid machinery for the benchmark suite.

A domain knows how to generate levels and how to advance a state under an
action.  Rewards are folded into the transition: scored domains carry one
`game` object whose single scalar attribute accumulates the reward, so a
transition model that predicts attribute deltas predicts rewards for free.
"""

import random
from dataclasses import dataclass, field

from ..model import Transition
from ..state import Object, ObjectState

UP, DOWN, LEFT, RIGHT = (0, -1), (0, 1), (-1, 0), (1, 0)
DIRS = [RIGHT, LEFT, UP, DOWN]
DIR_NAMES = ["right", "left", "up", "down"]


class GenerationError(RuntimeError):
    """Raised when a level cannot be placed within the retry budget."""


@dataclass
class Domain:
    name: str
    action_names: list
    scored: bool = False
    stochastic: bool = False
    class_names: dict = field(default_factory=dict)
    attr_names: dict = field(default_factory=dict)

    @property
    def n_actions(self) -> int:
        return len(self.action_names)

    def generate(self, rng: random.Random, params: dict) -> ObjectState:
        raise NotImplementedError

    def transition(self, state: ObjectState, action: int,
                   rng: random.Random) -> ObjectState:
        raise NotImplementedError

    def true_delta_distribution(self, state: ObjectState, action: int,
                                obj_id: int) -> dict:
        """Exact conditional distribution of one object's per-attribute deltas.

        Returns {attr_id: {delta: prob}}.  Deterministic domains return
        point masses.
        """
        nxt = self.transition(state, action, _FrozenRng())
        o = state.by_id[obj_id]
        n = nxt.by_id[obj_id]
        return {m: {tuple(b - a for a, b in zip(v, n.attributes[m])): 1.0}
                for m, v in o.attributes.items()}


class _FrozenRng:
    """Stand-in RNG for deterministic transitions; any use is a bug."""

    def __getattr__(self, name):
        raise RuntimeError("deterministic domain consulted the RNG")


class EnvInstance:
    """One live environment: a domain, its parameters, and the current state."""

    def __init__(self, domain: Domain, params: dict, seed: int):
        self.domain = domain
        self.params = dict(params)
        self.rng = random.Random(seed)
        self.state = domain.generate(self.rng, self.params)

    def reset(self) -> ObjectState:
        self.state = self.domain.generate(self.rng, self.params)
        return self.state

    def step(self, action: int) -> Transition:
        if not 0 <= action < self.domain.n_actions:
            raise ValueError(f"action {action} outside the domain's action set")
        before = self.state
        after = self.domain.transition(before, action, self.rng)
        self.state = after
        return Transition(before, action, after)


# ---------------------------------------------------------------------------
# Grid helpers
# ---------------------------------------------------------------------------

def border_cells(width: int, height: int) -> list:
    cells = []
    for x in range(width):
        cells.append((x, 0))
        cells.append((x, height - 1))
    for y in range(1, height - 1):
        cells.append((0, y))
        cells.append((width - 1, y))
    return cells


def sample_distinct(rng: random.Random, cells: list, n: int) -> list:
    if n > len(cells):
        raise GenerationError(f"cannot place {n} objects on {len(cells)} cells")
    return rng.sample(cells, n)


def interior_cells(width: int, height: int) -> list:
    return [(x, y) for x in range(1, width - 1) for y in range(1, height - 1)]


def reachable(start, passable: set) -> set:
    seen = {start}
    frontier = [start]
    while frontier:
        x, y = frontier.pop()
        for dx, dy in DIRS:
            nxt = (x + dx, y + dy)
            if nxt in passable and nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    return seen


class GridBuilder:
    """Accumulates objects with sequential ids on a bordered grid."""

    def __init__(self, width: int, height: int):
        self.width = width
        self.height = height
        self.objects: list = []
        self.walls: set = set()
        self.used: set = set()

    def next_id(self) -> int:
        return len(self.objects)

    def add(self, class_id: int, attrs: dict) -> Object:
        o = Object(self.next_id(), class_id, attrs)
        self.objects.append(o)
        return o

    def add_border(self, wall_class: int):
        for cell in border_cells(self.width, self.height):
            self.add(wall_class, {0: cell})
            self.walls.add(cell)
            self.used.add(cell)

    def add_interior_walls(self, wall_class: int, n: int, rng: random.Random):
        free = [c for c in interior_cells(self.width, self.height)
                if c not in self.used]
        for cell in sample_distinct(rng, free, n):
            self.add(wall_class, {0: cell})
            self.walls.add(cell)
            self.used.add(cell)

    def place(self, rng: random.Random, n: int = 1) -> list:
        """Reserve n distinct free interior cells."""
        free = [c for c in interior_cells(self.width, self.height)
                if c not in self.used]
        cells = sample_distinct(rng, free, n)
        self.used.update(cells)
        return cells

    def state(self) -> ObjectState:
        return ObjectState(self.objects)
