"""Synthetic temporal bipartite networks with tunable attachment and aging.

The generator realizes the rich-get-richer regime (attachment probability
proportional to current degree plus an offset) with an optional exponential
loss of interest in old items. It provides ground-truth regimes for the
predictors: with no aging, total degree and recent increase rank items the
same way on average; with strong aging, only the recent increase tracks
where the attention actually is.

One event is drawn per integer tick, so timestamps are 1..num_events and
window lengths are measured in ticks.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .events import Event

log = logging.getLogger(__name__)

_MAX_RESAMPLES = 10_000


@dataclass
class GenConfig:
    """Generator knobs.

    ``item_arrival_rate`` is items per tick: item ``j`` is born at tick
    ``floor(j / rate)`` (``math.inf`` puts the whole catalogue at t=0).
    ``decay_timescale`` is the e-folding age of an item's attractiveness
    (``math.inf`` disables aging). ``pa_offset`` is the additive
    attractiveness that lets zero-degree items acquire their first link.
    ``activity_exponent`` skews user choice towards already-active users
    (0 keeps it uniform).
    """

    num_users: int
    num_items: int
    num_events: int
    item_arrival_rate: float = math.inf
    decay_timescale: float = math.inf
    pa_offset: float = 1.0
    activity_exponent: float = 0.0
    rng_seed: int = 0

    def __post_init__(self):
        if min(self.num_users, self.num_items, self.num_events) < 1:
            raise ValueError("num_users, num_items and num_events must be positive")
        if self.num_events > self.num_users * self.num_items:
            raise ValueError(
                f"cannot draw {self.num_events} distinct user-item pairs from a "
                f"{self.num_users} x {self.num_items} grid"
            )
        if self.item_arrival_rate <= 0:
            raise ValueError("item_arrival_rate must be positive")
        if self.decay_timescale <= 0:
            raise ValueError("decay_timescale must be positive")
        if self.pa_offset <= 0:
            raise ValueError("pa_offset must be positive")


def _birth_times(config: GenConfig) -> np.ndarray:
    if math.isinf(config.item_arrival_rate):
        return np.zeros(config.num_items, dtype=np.int64)
    return (np.arange(config.num_items) / config.item_arrival_rate).astype(np.int64)


def generate(config: GenConfig) -> list[Event]:
    """Draw the event stream; deterministic for a fixed seed.

    Per tick: pick a user (uniform, or activity-weighted), pick an item with
    probability proportional to ``(degree + pa_offset) * exp(-age / theta)``
    among the items already born, resample the pair on a duplicate
    collision. Raises ``RuntimeError`` if a tick cannot place an event after
    many resamples (the alive catalogue is saturated).
    """
    rng = np.random.default_rng(config.rng_seed)
    birth = _birth_times(config)
    aging = not math.isinf(config.decay_timescale)

    item_deg = np.zeros(config.num_items, dtype=np.float64)
    user_deg = np.zeros(config.num_users, dtype=np.float64)
    seen: set[int] = set()
    events = []

    for t in range(1, config.num_events + 1):
        alive = int(np.searchsorted(birth, t, side="right"))
        weights = item_deg[:alive] + config.pa_offset
        if aging:
            weights = weights * np.exp((birth[:alive] - t) / config.decay_timescale)
        item_cum = np.cumsum(weights)
        if item_cum[-1] <= 0.0:  # all alive weights aged below float range
            item_cum = np.arange(1.0, alive + 1)

        user_cum = None
        if config.activity_exponent != 0.0:
            user_cum = np.cumsum((user_deg + 1.0) ** config.activity_exponent)

        for attempt in range(_MAX_RESAMPLES):
            item = int(np.searchsorted(item_cum, rng.random() * item_cum[-1], side="right"))
            if user_cum is None:
                user = int(rng.integers(config.num_users))
            else:
                user = int(np.searchsorted(user_cum, rng.random() * user_cum[-1], side="right"))
            key = user * config.num_items + item
            if key not in seen:
                break
        else:
            raise RuntimeError(
                f"tick {t}: could not place an event after {_MAX_RESAMPLES} resamples; "
                "the alive item catalogue is saturated"
            )
        seen.add(key)
        item_deg[item] += 1.0
        user_deg[user] += 1.0
        events.append(Event(user, item, t))
    return events


def generate_social(num_users: int, num_edges: int, attach_exponent: float = 0.0, seed: int = 0) -> list[tuple[int, int]]:
    """Directed follower->leader edges with in-degree preferential attachment.

    The follower is uniform; the leader is drawn with probability
    proportional to ``(followers + 1) ** attach_exponent`` (0 gives a
    uniform random directed graph). No self-loops or duplicate edges;
    deterministic for a fixed seed.
    """
    if num_users < 1:
        raise ValueError("num_users must be positive")
    if not 0 <= num_edges <= num_users * (num_users - 1):
        raise ValueError(
            f"cannot place {num_edges} distinct directed edges on {num_users} users"
        )
    rng = np.random.default_rng(seed)
    in_deg = np.zeros(num_users, dtype=np.float64)
    seen: set[int] = set()
    edges = []
    uniform = attach_exponent == 0.0
    for _ in range(num_edges):
        for attempt in range(_MAX_RESAMPLES):
            src = int(rng.integers(num_users))
            if uniform:
                dst = int(rng.integers(num_users))
            else:
                cum = np.cumsum((in_deg + 1.0) ** attach_exponent)
                dst = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
            key = src * num_users + dst
            if src != dst and key not in seen:
                break
        else:
            raise RuntimeError("edge sampling saturated; lower num_edges")
        seen.add(key)
        in_deg[dst] += 1.0
        edges.append((src, dst))
    return edges
