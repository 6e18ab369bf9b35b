"""Time-indexed store of user-item collection events.

The graph is built once from an event stream and is immutable afterwards;
every query is a pure read, so a graph can be shared freely between threads
or forked worker processes.

Time conventions used throughout the package:

* the degree of a node at time ``t`` counts events with ``timestamp <= t``;
* a window of length ``w`` ending at ``t`` covers the half-open interval
  ``(t - w, t]``;
* ``math.inf`` is accepted wherever a query time is expected and means
  "after the last event".

Timestamps are integer seconds whatever the source dataset; day- or
hour-resolution data is handled by choosing window lengths in seconds
(see the ``DAY`` / ``HOUR`` constants).
"""

from __future__ import annotations

import logging
from typing import Iterable, NamedTuple, Sequence

import numpy as np

log = logging.getLogger(__name__)

HOUR = 3_600
DAY = 86_400


class Event(NamedTuple):
    """One collection act: ``user_id`` picked up ``item_id`` at ``timestamp``."""

    user_id: int
    item_id: int
    timestamp: int


class TemporalBipartiteGraph:
    """Immutable bipartite user-item event store with snapshot degree queries.

    Construct with :func:`build` (accepts any sequence of events, unsorted,
    possibly with duplicate user/item pairs) or :meth:`from_arrays` for
    large pre-vectorized streams. Node identities are the integer ids seen
    in the events; internally both sides are mapped to compact indices
    ``0..U-1`` / ``0..I-1`` in ascending id order, which the ``*_vector``
    queries are aligned with.
    """

    def __init__(self, users, items, timestamps, duplicates_collapsed=0):
        # users/items/timestamps are parallel int64 arrays, already
        # deduplicated and sorted by (timestamp, user, item); use build().
        self._users_raw = users
        self._items_raw = items
        self._ts = timestamps
        self.duplicates_collapsed = int(duplicates_collapsed)

        self.user_ids, self._users = np.unique(users, return_inverse=True)
        self.item_ids, self._items = np.unique(items, return_inverse=True)

        # CSR-style per-entity timestamp lists (time-sorted within a group
        # because the global order is time-sorted and argsort is stable).
        self._user_event_ts, self._user_starts = self._group(
            self._users, self._ts, len(self.user_ids)
        )
        self._item_event_ts, self._item_starts = self._group(
            self._items, self._ts, len(self.item_ids)
        )

    @staticmethod
    def _group(idx, ts, count):
        order = np.argsort(idx, kind="stable")
        starts = np.zeros(count + 1, dtype=np.int64)
        np.cumsum(np.bincount(idx, minlength=count), out=starts[1:])
        return ts[order], starts

    @classmethod
    def from_arrays(cls, users, items, timestamps) -> "TemporalBipartiteGraph":
        """Build from parallel id/timestamp arrays; the fast path for bulk data."""
        users = np.asarray(users, dtype=np.int64)
        items = np.asarray(items, dtype=np.int64)
        ts = np.asarray(timestamps, dtype=np.int64)
        if users.size == 0:
            raise ValueError("empty event stream")
        if not (users.shape == items.shape == ts.shape):
            raise ValueError("users, items and timestamps must have equal length")
        neg = np.flatnonzero(ts < 0)
        if neg.size:
            k = neg[0]
            raise ValueError(
                "negative timestamp in event "
                f"(user={users[k]}, item={items[k]}, timestamp={ts[k]})"
            )

        # Collapse duplicate (user, item) pairs keeping the earliest timestamp:
        # sort by (user, item, ts) and keep the first row of every pair run.
        order = np.lexsort((ts, items, users))
        u, i, t = users[order], items[order], ts[order]
        first = np.ones(u.size, dtype=bool)
        first[1:] = (u[1:] != u[:-1]) | (i[1:] != i[:-1])
        collapsed = int(u.size - first.sum())
        u, i, t = u[first], i[first], t[first]
        if collapsed:
            log.debug("collapsed %d duplicate user-item events", collapsed)

        order = np.lexsort((i, u, t))
        return cls(u[order], i[order], t[order], duplicates_collapsed=collapsed)

    # -- basic shape ----------------------------------------------------

    @property
    def num_users(self) -> int:
        return len(self.user_ids)

    @property
    def num_items(self) -> int:
        return len(self.item_ids)

    @property
    def num_links(self) -> int:
        return len(self._ts)

    @property
    def t_first(self) -> int:
        return int(self._ts[0])

    @property
    def t_last(self) -> int:
        return int(self._ts[-1])

    @property
    def events(self) -> list[Event]:
        """Events sorted by timestamp. Materializes a list; meant for small graphs."""
        uu = self.user_ids[self._users]
        ii = self.item_ids[self._items]
        return [Event(int(a), int(b), int(c)) for a, b, c in zip(uu, ii, self._ts)]

    def __repr__(self):
        return (
            f"TemporalBipartiteGraph(users={self.num_users}, items={self.num_items}, "
            f"links={self.num_links}, span=[{self.t_first}, {self.t_last}])"
        )

    # -- id lookups ------------------------------------------------------

    def _user_index(self, user_id) -> int:
        pos = int(np.searchsorted(self.user_ids, user_id))
        if pos == len(self.user_ids) or self.user_ids[pos] != user_id:
            raise KeyError(f"unknown user id {user_id}")
        return pos

    def _item_index(self, item_id) -> int:
        pos = int(np.searchsorted(self.item_ids, item_id))
        if pos == len(self.item_ids) or self.item_ids[pos] != item_id:
            raise KeyError(f"unknown item id {item_id}")
        return pos

    def has_user(self, user_id) -> bool:
        pos = np.searchsorted(self.user_ids, user_id)
        return pos < len(self.user_ids) and self.user_ids[pos] == user_id

    def has_item(self, item_id) -> bool:
        pos = np.searchsorted(self.item_ids, item_id)
        return pos < len(self.item_ids) and self.item_ids[pos] == item_id

    def user_event_times(self, user_id) -> np.ndarray:
        """Sorted timestamps of one user's events (read-only view)."""
        k = self._user_index(user_id)
        return self._user_event_ts[self._user_starts[k] : self._user_starts[k + 1]]

    def item_event_times(self, item_id) -> np.ndarray:
        """Sorted timestamps of one item's events (read-only view)."""
        k = self._item_index(item_id)
        return self._item_event_ts[self._item_starts[k] : self._item_starts[k + 1]]

    # -- degree queries ----------------------------------------------------

    def item_degree_at(self, item_id, t) -> int:
        """Number of users who collected ``item_id`` by time ``t`` (inclusive)."""
        return int(np.searchsorted(self.item_event_times(item_id), t, side="right"))

    def user_degree_at(self, user_id, t) -> int:
        """Number of items ``user_id`` collected by time ``t`` (inclusive)."""
        return int(np.searchsorted(self.user_event_times(user_id), t, side="right"))

    def item_degree_increase(self, item_id, t, t_past) -> int:
        """Event count of ``item_id`` inside the window ``(t - t_past, t]``."""
        if t_past <= 0:
            raise ValueError(f"window length must be positive, got {t_past}")
        ts = self.item_event_times(item_id)
        hi = np.searchsorted(ts, t, side="right")
        lo = np.searchsorted(ts, t - t_past, side="right")
        return int(hi - lo)

    # -- vectorized queries (aligned with user_ids / item_ids order) -------

    def _time_pos(self, t) -> int:
        return int(np.searchsorted(self._ts, t, side="right"))

    def item_degree_vector(self, t) -> np.ndarray:
        """Degrees of all items at time ``t``, aligned with ``item_ids``."""
        pos = self._time_pos(t)
        return np.bincount(self._items[:pos], minlength=self.num_items)

    def user_degree_vector(self, t) -> np.ndarray:
        """Degrees of all users at time ``t``, aligned with ``user_ids``."""
        pos = self._time_pos(t)
        return np.bincount(self._users[:pos], minlength=self.num_users)

    def item_increase_vector(self, t, t_past) -> np.ndarray:
        """Per-item event counts inside ``(t - t_past, t]``, aligned with ``item_ids``."""
        if t_past <= 0:
            raise ValueError(f"window length must be positive, got {t_past}")
        lo = self._time_pos(t - t_past)
        hi = self._time_pos(t)
        return np.bincount(self._items[lo:hi], minlength=self.num_items)

    def window_events(self, t, t_past):
        """Compact (user, item) index pairs of the events in ``(t - t_past, t]``.

        Returned arrays index into ``user_ids`` / ``item_ids``; views, do not
        mutate.
        """
        if t_past <= 0:
            raise ValueError(f"window length must be positive, got {t_past}")
        lo = self._time_pos(t - t_past)
        hi = self._time_pos(t)
        return self._users[lo:hi], self._items[lo:hi]

    # -- ranking -----------------------------------------------------------

    def top_items_by_increase(self, t, t_past, n, require_seen=False):
        """Top ``n`` items by event count in ``(t - t_past, t]``.

        Returns ``(item_id, increase)`` pairs sorted by decreasing increase,
        ties broken by ascending item id. Zero-increase items pad the list
        (in id order) only when fewer than ``n`` items were active in the
        window. With ``require_seen`` only items already collected by time
        ``t`` are eligible; otherwise every item of the graph is.
        """
        if n < 1:
            raise ValueError(f"ranking depth must be >= 1, got {n}")
        inc = self.item_increase_vector(t, t_past)
        if require_seen:
            cand = np.flatnonzero(self.item_degree_vector(t) > 0)
        else:
            cand = np.arange(self.num_items)
        order = np.lexsort((self.item_ids[cand], -inc[cand]))[:n]
        chosen = cand[order]
        return [(int(self.item_ids[c]), int(inc[c])) for c in chosen]


def build(events: Sequence[Event] | Iterable[tuple]) -> TemporalBipartiteGraph:
    """Build a graph from an event sequence.

    Input may be unsorted and may contain duplicate (user, item) pairs;
    duplicates are collapsed keeping the earliest timestamp (the first
    collection act is the one that carries information). Raises
    ``ValueError`` on an empty stream or a negative timestamp.
    """
    arr = np.asarray(list(events) if not isinstance(events, np.ndarray) else events)
    if arr.size == 0:
        raise ValueError("empty event stream")
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise ValueError("events must be (user_id, item_id, timestamp) triples")
    arr = arr.astype(np.int64, copy=False)
    return TemporalBipartiteGraph.from_arrays(arr[:, 0], arr[:, 1], arr[:, 2])
