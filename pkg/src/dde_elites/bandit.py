"""Sliding-window UCB1 over operator-ratio actions.

Rewards are archive-improvement fractions per batch, so mean reward and
the exploration bonus stay commensurate. Statistics come from a FIFO
window of the most recent records only, which keeps the policy responsive
as the archive (and with it each action's true value) drifts.
"""

from __future__ import annotations

from collections import deque
from typing import Sequence

import numpy as np

from .variation import OperatorRatios

# the nine (xover, line, iso) mixes selectable by default
DEFAULT_ACTIONS: tuple[tuple[float, float, float], ...] = (
    (0.0, 0.0, 1.0),
    (0.25, 0.0, 0.75),
    (0.5, 0.0, 0.5),
    (0.75, 0.0, 0.25),
    (1.0, 0.0, 0.0),
    (0.0, 0.25, 0.75),
    (0.0, 0.5, 0.5),
    (0.0, 0.75, 0.25),
    (0.0, 1.0, 0.0),
)

DEFAULT_WINDOW_LENGTH = 1000


class BanditState:
    """UCB1 with statistics over a bounded FIFO of (action, reward) records."""

    def __init__(self, actions: Sequence[tuple[float, float, float]] = DEFAULT_ACTIONS,
                 window_length: int = DEFAULT_WINDOW_LENGTH):
        if len(actions) < 1:
            raise ValueError("at least one action is required")
        if window_length < 1:
            raise ValueError(f"window_length must be >= 1, got {window_length}")
        self.actions = [OperatorRatios(*a) for a in actions]
        self.window_length = int(window_length)
        self._window: deque[tuple[int, float]] = deque()
        self._counts = np.zeros(len(self.actions), dtype=int)
        self._sums = np.zeros(len(self.actions))

    def records(self) -> list[tuple[int, float]]:
        """Window contents, oldest first."""
        return list(self._window)

    def select(self) -> int:
        """Index of the action with the greatest upper confidence bound.

        Untried actions have unbounded potential and are taken first
        (lowest index); remaining ties also resolve to the lowest index.
        """
        untried = np.flatnonzero(self._counts == 0)
        if len(untried):
            return int(untried[0])
        t = len(self._window)
        q = self._sums / self._counts
        ucb = q + np.sqrt(2.0 * np.log(t) / self._counts)
        return int(np.argmax(ucb))

    def update(self, action: int, successes: int, batch_size: int) -> None:
        """Record successes/batch_size for the action, evicting the oldest
        record once the window is full."""
        if not 0 <= action < len(self.actions):
            raise ValueError(f"action index {action} out of range")
        if batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {batch_size}")
        if not 0 <= successes <= batch_size:
            raise ValueError(f"successes={successes} outside [0, {batch_size}]")
        reward = successes / batch_size
        self._window.append((action, reward))
        self._counts[action] += 1
        self._sums[action] += reward
        if len(self._window) > self.window_length:
            old_action, old_reward = self._window.popleft()
            self._counts[old_action] -= 1
            self._sums[old_action] -= old_reward
