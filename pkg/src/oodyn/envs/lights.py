"""The lights domain: a tunable remote toggling lights, with rewards.

Tuning the remote costs a small penalty; toggling the light on the current
channel yields a large reward when it turns the light off and a large
penalty when it turns one on.  Magnitudes are -1 / +5 / -5; only the
ordering matters for learnability.
"""

import random

from ..state import Object, ObjectState
from .base import Domain

TUNE_PENALTY = -1
LIGHT_ON_PENALTY = -5
LIGHT_OFF_REWARD = 5


class LightsDomain(Domain):
    REMOTE, LIGHT, GAME = 0, 1, 2
    CHANNEL, STATE, SCORE = 0, 1, 2

    def __init__(self, name="lights", scored=True, channels=8):
        super().__init__(name=name, action_names=["up", "down", "toggle"],
                         scored=scored,
                         class_names={0: "remote", 1: "light", 2: "game"},
                         attr_names={0: "channel", 1: "state", 2: "score"})
        self.channels = channels

    def generate(self, rng: random.Random, params: dict) -> ObjectState:
        n_lights = min(params.get("lights", 4), self.channels)
        objs = [Object(0, self.REMOTE, {self.CHANNEL: (rng.randrange(self.channels),)})]
        for i, ch in enumerate(rng.sample(range(self.channels), n_lights)):
            objs.append(Object(1 + i, self.LIGHT,
                               {self.CHANNEL: (ch,), self.STATE: (rng.randrange(2),)}))
        if self.scored:
            objs.append(Object(1 + n_lights, self.GAME, {self.SCORE: (0,)}))
        return ObjectState(objs)

    def transition(self, state, action, rng):
        remote = state.of_class(self.REMOTE)[0]
        ch = remote.attributes[self.CHANNEL][0]
        reward = 0
        if action == 0:
            nxt = state.replace_attr(remote.id, self.CHANNEL, ((ch + 1) % self.channels,))
            reward = TUNE_PENALTY
        elif action == 1:
            nxt = state.replace_attr(remote.id, self.CHANNEL, ((ch - 1) % self.channels,))
            reward = TUNE_PENALTY
        else:
            nxt = None
            for light in state.of_class(self.LIGHT):
                if light.attributes[self.CHANNEL] == (ch,):
                    s = light.attributes[self.STATE][0]
                    nxt = state.replace_attr(light.id, self.STATE, (1 - s,))
                    reward = LIGHT_OFF_REWARD if s == 1 else LIGHT_ON_PENALTY
                    break
            if nxt is None:
                nxt = state.copy()
        if not self.scored:
            return nxt
        game = state.of_class(self.GAME)[0]
        score = game.attributes[self.SCORE][0] + reward
        return nxt.replace_attr(game.id, self.SCORE, (score,))
