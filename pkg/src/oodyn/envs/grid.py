"""The grid-world domains: walls, maze, coins, keys, doors, fish, switches,
gates, and the scale(n_p, n_c) family."""

import random

from ..state import Object, ObjectState
from .base import (DIRS, DIR_NAMES, Domain, GenerationError, GridBuilder,
                   reachable)

_RETRIES = 200


def _move_names():
    return list(DIR_NAMES)


def _wall_positions(state: ObjectState, wall_class: int = 0) -> set:
    return {o.attributes[0] for o in state.objects if o.class_id == wall_class}


def _find_at(state: ObjectState, class_id: int, pos) -> Object | None:
    for o in state.objects:
        if o.class_id == class_id and o.attributes[0] == pos:
            return o
    return None


def _shift(pos, d):
    return (pos[0] + d[0], pos[1] + d[1])


def _connected_gen(build_fn, rng, params):
    """Retry generation until special cells share one free component."""
    for _ in range(_RETRIES):
        result = build_fn(rng, params)
        if result is not None:
            return result
    raise GenerationError("could not generate a connected level")


class WallsDomain(Domain):
    WALL, PLAYER = 0, 1

    def __init__(self, name="walls"):
        super().__init__(name=name, action_names=_move_names(),
                         class_names={0: "wall", 1: "player"},
                         attr_names={0: "pos"})

    def generate(self, rng, params):
        g = GridBuilder(params.get("width", 8), params.get("height", 8))
        g.add_border(self.WALL)
        g.add_interior_walls(self.WALL, params.get("walls", 10), rng)
        (cell,) = g.place(rng)
        g.add(self.PLAYER, {0: cell})
        return g.state()

    def transition(self, state, action, rng):
        d = DIRS[action]
        player = state.of_class(self.PLAYER)[0]
        target = _shift(player.attributes[0], d)
        if target in _wall_positions(state):
            return state.copy()
        return state.replace_attr(player.id, 0, target)


class ScaleDomain(Domain):
    """Walls with n_p player classes, each with n_c copies of every move."""

    WALL = 0

    def __init__(self, n_players: int, n_copies: int):
        names = []
        for p in range(n_players):
            for d in DIR_NAMES:
                for c in range(n_copies):
                    names.append(f"p{p}-{d}-{c}")
        super().__init__(name=f"scale{n_players}x{n_copies}", action_names=names,
                         class_names={0: "wall",
                                      **{p + 1: f"player{p}" for p in range(n_players)}},
                         attr_names={0: "pos"})
        self.n_players = n_players
        self.n_copies = n_copies

    def decode(self, action):
        per_player = 4 * self.n_copies
        p, rest = divmod(action, per_player)
        d, _copy = divmod(rest, self.n_copies)
        return p + 1, DIRS[d]

    def generate(self, rng, params):
        g = GridBuilder(params.get("width", 8), params.get("height", 8))
        g.add_border(self.WALL)
        g.add_interior_walls(self.WALL, params.get("walls", 10), rng)
        free = [c for c in g.place(rng, self.n_players)]
        for p, cell in enumerate(free):
            g.add(p + 1, {0: cell})
        return g.state()

    def transition(self, state, action, rng):
        cls, d = self.decode(action)
        mover = state.of_class(cls)[0]
        target = _shift(mover.attributes[0], d)
        if target in _wall_positions(state):
            return state.copy()
        return state.replace_attr(mover.id, 0, target)


class MazeDomain(Domain):
    WALL, PLAYER, GOAL, GAME = 0, 1, 2, 3
    POS, SCORE = 0, 1

    def __init__(self, name="maze", scored=True):
        actions = _move_names() + ["stay"]
        super().__init__(name=name, action_names=actions, scored=scored,
                         class_names={0: "wall", 1: "player", 2: "goal", 3: "game"},
                         attr_names={0: "pos", 1: "score"})

    def generate(self, rng, params):
        def build(rng, params):
            g = GridBuilder(params.get("width", 8), params.get("height", 8))
            g.add_border(self.WALL)
            g.add_interior_walls(self.WALL, params.get("walls", 10), rng)
            cells = g.place(rng, 1 + params.get("goals", 2))
            player, goals = cells[0], cells[1:]
            free = {c for c in
                    (set((x, y) for x in range(g.width) for y in range(g.height))
                     - g.walls)}
            comp = reachable(player, free)
            if any(goal not in comp for goal in goals):
                return None
            g.add(self.PLAYER, {self.POS: player})
            for cell in goals:
                g.add(self.GOAL, {self.POS: cell})
            if self.scored:
                g.add(self.GAME, {self.SCORE: (0,)})
            return g.state()
        return _connected_gen(build, rng, params)

    def transition(self, state, action, rng):
        player = state.of_class(self.PLAYER)[0]
        pos = player.attributes[self.POS]
        walls = _wall_positions(state)
        reward = -1
        new_pos = pos
        if action < 4:
            target = _shift(pos, DIRS[action])
            if target in walls:
                reward = -2
            else:
                new_pos = target
        if reward == -1:
            goals = {o.attributes[self.POS] for o in state.of_class(self.GOAL)}
            if new_pos in goals:
                reward += 1
        nxt = state if new_pos == pos else state.replace_attr(player.id, self.POS, new_pos)
        if not self.scored:
            return nxt.copy() if nxt is state else nxt
        game = state.of_class(self.GAME)[0]
        score = game.attributes[self.SCORE][0] + reward
        return nxt.replace_attr(game.id, self.SCORE, (score,))


class CoinsDomain(Domain):
    WALL, PLAYER, COIN, GAME = 0, 1, 2, 3
    POS, USED, SCORE = 0, 1, 2

    def __init__(self, name="coins", scored=True):
        super().__init__(name=name, action_names=_move_names() + ["stay"],
                         scored=scored,
                         class_names={0: "wall", 1: "player", 2: "coin", 3: "game"},
                         attr_names={0: "pos", 1: "used", 2: "score"})

    def generate(self, rng, params):
        g = GridBuilder(params.get("width", 8), params.get("height", 8))
        g.add_border(self.WALL)
        g.add_interior_walls(self.WALL, params.get("walls", 10), rng)
        cells = g.place(rng, 1 + params.get("coins", 4))
        g.add(self.PLAYER, {self.POS: cells[0]})
        for cell in cells[1:]:
            g.add(self.COIN, {self.POS: cell, self.USED: (0,)})
        if self.scored:
            g.add(self.GAME, {self.SCORE: (0,)})
        return g.state()

    def transition(self, state, action, rng):
        player = state.of_class(self.PLAYER)[0]
        pos = player.attributes[self.POS]
        reward = -1
        new_pos = pos
        if action < 4:
            target = _shift(pos, DIRS[action])
            if target in _wall_positions(state):
                reward = -2
            else:
                new_pos = target
        nxt = state if new_pos == pos else state.replace_attr(player.id, self.POS, new_pos)
        if reward == -1:
            coin = _find_at(nxt, self.COIN, new_pos)
            if coin is not None and coin.attributes[self.USED] == (0,):
                nxt = nxt.replace_attr(coin.id, self.USED, (1,))
                reward += 1
        if not self.scored:
            return nxt.copy() if nxt is state else nxt
        game = state.of_class(self.GAME)[0]
        score = game.attributes[self.SCORE][0] + reward
        return nxt.replace_attr(game.id, self.SCORE, (score,))


class KeysDomain(Domain):
    WALL, PLAYER, DOOR, KEY, GOAL, GAME = 0, 1, 2, 3, 4, 5
    POS, STATUS, LOCKED, SCORE = 0, 1, 2, 3
    FREE, HELD, USED = 0, 1, 2

    def __init__(self, name="keys", scored=True):
        super().__init__(name=name, action_names=_move_names() + ["stay"],
                         scored=scored,
                         class_names={0: "wall", 1: "player", 2: "door",
                                      3: "key", 4: "goal", 5: "game"},
                         attr_names={0: "pos", 1: "status", 2: "locked", 3: "score"})

    def generate(self, rng, params):
        g = GridBuilder(params.get("width", 8), params.get("height", 8))
        g.add_border(self.WALL)
        g.add_interior_walls(self.WALL, params.get("walls", 8), rng)
        n_doors = params.get("doors", 2)
        n_keys = params.get("keys", 2)
        n_goals = params.get("goals", 1)
        cells = g.place(rng, 1 + n_doors + n_keys + n_goals)
        it = iter(cells)
        g.add(self.PLAYER, {self.POS: next(it)})
        for _ in range(n_doors):
            g.add(self.DOOR, {self.POS: next(it), self.LOCKED: (1,)})
        for _ in range(n_keys):
            g.add(self.KEY, {self.POS: next(it), self.STATUS: (self.FREE,)})
        for _ in range(n_goals):
            g.add(self.GOAL, {self.POS: next(it)})
        if self.scored:
            g.add(self.GAME, {self.SCORE: (0,)})
        return g.state()

    def _held_key(self, state):
        for o in state.of_class(self.KEY):
            if o.attributes[self.STATUS] == (self.HELD,):
                return o
        return None

    def transition(self, state, action, rng):
        player = state.of_class(self.PLAYER)[0]
        pos = player.attributes[self.POS]
        walls = _wall_positions(state)
        goals = {o.attributes[self.POS] for o in state.of_class(self.GOAL)}
        held = self._held_key(state)
        reward = -1
        nxt = state
        moved_to = pos
        if action < 4:
            target = _shift(pos, DIRS[action])
            door = _find_at(state, self.DOOR, target)
            key_at = _find_at(state, self.KEY, target)
            if target in walls:
                reward = -2
            elif door is not None and door.attributes[self.LOCKED] == (1,):
                if held is not None:
                    nxt = nxt.replace_attr(door.id, self.LOCKED, (0,))
                    nxt = nxt.replace_attr(held.id, self.STATUS, (self.USED,))
                    nxt = nxt.replace_attr(held.id, self.POS, target)
                    nxt = nxt.replace_attr(player.id, self.POS, target)
                    moved_to = target
                else:
                    reward = -2
            elif (key_at is not None and key_at.attributes[self.STATUS] == (self.FREE,)
                    and held is not None):
                reward = -2
            else:
                nxt = nxt.replace_attr(player.id, self.POS, target)
                if held is not None:
                    nxt = nxt.replace_attr(held.id, self.POS, target)
                if key_at is not None and key_at.attributes[self.STATUS] == (self.FREE,):
                    nxt = nxt.replace_attr(key_at.id, self.STATUS, (self.HELD,))
                moved_to = target
        if reward == -1 and moved_to in goals:
            reward += 1
        if nxt is state:
            nxt = state.copy()
        if not self.scored:
            return nxt
        game = state.of_class(self.GAME)[0]
        score = game.attributes[self.SCORE][0] + reward
        return nxt.replace_attr(game.id, self.SCORE, (score,))


class DoorsDomain(Domain):
    WALL, PLAYER, DOOR = 0, 1, 2
    POS, COLOR = 0, 1

    def __init__(self, name="doors"):
        super().__init__(name=name, action_names=_move_names() + ["change-color"],
                         class_names={0: "wall", 1: "player", 2: "door"},
                         attr_names={0: "pos", 1: "color"})

    def generate(self, rng, params):
        g = GridBuilder(params.get("width", 8), params.get("height", 8))
        g.add_border(self.WALL)
        g.add_interior_walls(self.WALL, params.get("walls", 8), rng)
        n_doors = params.get("doors", 3)
        cells = g.place(rng, 1 + n_doors)
        g.add(self.PLAYER, {self.POS: cells[0], self.COLOR: (rng.randrange(2),)})
        for cell in cells[1:]:
            g.add(self.DOOR, {self.POS: cell, self.COLOR: (rng.randrange(2),)})
        return g.state()

    def transition(self, state, action, rng):
        player = state.of_class(self.PLAYER)[0]
        if action == 4:
            color = player.attributes[self.COLOR][0]
            return state.replace_attr(player.id, self.COLOR, (1 - color,))
        target = _shift(player.attributes[self.POS], DIRS[action])
        if target in _wall_positions(state):
            return state.copy()
        door = _find_at(state, self.DOOR, target)
        if door is not None and door.attributes[self.COLOR] != player.attributes[self.COLOR]:
            return state.copy()
        return state.replace_attr(player.id, self.POS, target)


class FishDomain(Domain):
    WALL, FISH = 0, 1
    POS = 0

    def __init__(self, name="fish"):
        super().__init__(name=name, action_names=["wait"], stochastic=True,
                         class_names={0: "wall", 1: "fish"},
                         attr_names={0: "pos"})

    def generate(self, rng, params):
        g = GridBuilder(params.get("width", 8), params.get("height", 8))
        g.add_border(self.WALL)
        g.add_interior_walls(self.WALL, params.get("walls", 10), rng)
        for cell in g.place(rng, params.get("fish", 3)):
            g.add(self.FISH, {self.POS: cell})
        return g.state()

    def _open_dirs(self, walls, pos):
        return [d for d in DIRS if _shift(pos, d) not in walls]

    def transition(self, state, action, rng):
        walls = _wall_positions(state)
        nxt = state
        for fish in state.of_class(self.FISH):
            pos = fish.attributes[self.POS]
            options = self._open_dirs(walls, pos)
            if options:
                d = options[rng.randrange(len(options))]
                nxt = nxt.replace_attr(fish.id, self.POS, _shift(pos, d))
        return nxt.copy() if nxt is state else nxt

    def true_delta_distribution(self, state, action, obj_id):
        o = state.by_id[obj_id]
        if o.class_id != self.FISH:
            return {m: {(0,) * len(v): 1.0} for m, v in o.attributes.items()}
        walls = _wall_positions(state)
        options = self._open_dirs(walls, o.attributes[self.POS])
        if not options:
            return {self.POS: {(0, 0): 1.0}}
        p = 1.0 / len(options)
        return {self.POS: {d: p for d in options}}


class SwitchesDomain(Domain):
    WALL, PLAYER, SWITCH, LIGHT = 0, 1, 2, 3
    POS, CHANNEL, STATE = 0, 1, 2

    def __init__(self, name="switches"):
        super().__init__(name=name, action_names=_move_names() + ["toggle"],
                         class_names={0: "wall", 1: "player", 2: "switch", 3: "light"},
                         attr_names={0: "pos", 1: "channel", 2: "state"})

    def generate(self, rng, params):
        g = GridBuilder(params.get("width", 8), params.get("height", 8))
        g.add_border(self.WALL)
        g.add_interior_walls(self.WALL, params.get("walls", 8), rng)
        pairs = params.get("pairs", 3)
        cells = g.place(rng, 1 + 2 * pairs)
        g.add(self.PLAYER, {self.POS: cells[0]})
        for i in range(pairs):
            g.add(self.SWITCH, {self.POS: cells[1 + 2 * i], self.CHANNEL: (i,)})
            g.add(self.LIGHT, {self.POS: cells[2 + 2 * i], self.CHANNEL: (i,),
                               self.STATE: (rng.randrange(2),)})
        return g.state()

    def transition(self, state, action, rng):
        player = state.of_class(self.PLAYER)[0]
        pos = player.attributes[self.POS]
        if action < 4:
            target = _shift(pos, DIRS[action])
            if target in _wall_positions(state):
                return state.copy()
            return state.replace_attr(player.id, self.POS, target)
        switch = _find_at(state, self.SWITCH, pos)
        if switch is None:
            return state.copy()
        channel = switch.attributes[self.CHANNEL]
        for light in state.of_class(self.LIGHT):
            if light.attributes[self.CHANNEL] == channel:
                s = light.attributes[self.STATE][0]
                return state.replace_attr(light.id, self.STATE, (1 - s,))
        return state.copy()


class GatesDomain(Domain):
    WALL, PLAYER, GATE, GUARD, SWITCH = 0, 1, 2, 3, 4
    POS, STATE = 0, 1

    def __init__(self, name="gates"):
        actions = ([f"move-{d}" for d in DIR_NAMES]
                   + [f"jump-{d}" for d in DIR_NAMES]
                   + [f"guard-{d}" for d in DIR_NAMES])
        super().__init__(name=name, action_names=actions,
                         class_names={0: "wall", 1: "player", 2: "gate",
                                      3: "guard", 4: "switch"},
                         attr_names={0: "pos", 1: "state"})

    def generate(self, rng, params):
        g = GridBuilder(params.get("width", 8), params.get("height", 8))
        g.add_border(self.WALL)
        g.add_interior_walls(self.WALL, params.get("walls", 6), rng)
        n_gates = params.get("gates", 5)
        n_switches = params.get("switches", 3)
        cells = g.place(rng, 2 + n_gates + n_switches)
        it = iter(cells)
        g.add(self.PLAYER, {self.POS: next(it)})
        g.add(self.GUARD, {self.POS: next(it)})
        for _ in range(n_gates):
            g.add(self.GATE, {self.POS: next(it)})
        for _ in range(n_switches):
            g.add(self.SWITCH, {self.POS: next(it), self.STATE: (0,)})
        return g.state()

    def transition(self, state, action, rng):
        walls = _wall_positions(state)
        gates = {o.attributes[self.POS] for o in state.of_class(self.GATE)}
        if action >= 8:  # guard movement, blocked by walls only
            guard = state.of_class(self.GUARD)[0]
            target = _shift(guard.attributes[self.POS], DIRS[action - 8])
            if target in walls:
                return state.copy()
            return state.replace_attr(guard.id, self.POS, target)
        player = state.of_class(self.PLAYER)[0]
        pos = player.attributes[self.POS]
        if action < 4:  # normal move, blocked by walls and gates
            target = _shift(pos, DIRS[action])
            if target in walls or target in gates:
                return state.copy()
        else:  # jump: over an adjacent gate onto an unblocked cell
            d = DIRS[action - 4]
            over = _shift(pos, d)
            target = _shift(over, d)
            if over not in gates or target in walls or target in gates:
                return state.copy()
        nxt = state.replace_attr(player.id, self.POS, target)
        switch = _find_at(nxt, self.SWITCH, target)
        if switch is not None:
            s = switch.attributes[self.STATE][0]
            nxt = nxt.replace_attr(switch.id, self.STATE, (1 - s,))
        return nxt
