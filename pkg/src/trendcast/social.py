"""Static directed follower->leader network and user influence measures.

An edge ``(i, j)`` records that user ``i`` follows user ``j``: ``j`` is one
of ``i``'s leaders, ``i`` is one of ``j``'s followers. In-degree counts
followers, out-degree counts leaders.

Score-flow direction (documented deliberately, it is easy to get backwards):
both iterative measures push score *along* the stored edges, i.e. from a
follower to the users it follows, each follower splitting its score in equal
shares among its leaders. Influence therefore accrues to followed users, and
a "dangling" user is one who follows nobody (zero out-degree), not one
without followers.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable

import numpy as np
import scipy.sparse as sp

log = logging.getLogger(__name__)

MEASURES = ("in_degree", "pagerank", "leaderrank")


class SocialGraph:
    """Directed user-user graph, immutable after construction.

    Self-loops are dropped and duplicate edges collapsed (both counted).
    The vertex set is defined by the ids appearing in the edges plus any
    ids passed via ``users`` (so isolated users can exist).
    """

    def __init__(self, edges: Iterable[tuple], users: Iterable[int] | None = None):
        arr = np.asarray(list(edges), dtype=np.int64)
        if arr.size == 0:
            arr = arr.reshape(0, 2)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ValueError("edges must be (follower, leader) pairs")

        loops = arr[:, 0] == arr[:, 1]
        self.self_loops_dropped = int(loops.sum())
        arr = arr[~loops]
        deduped = np.unique(arr, axis=0) if arr.size else arr
        self.duplicates_dropped = int(arr.shape[0] - deduped.shape[0])

        ids = [deduped.ravel()]
        if users is not None:
            ids.append(np.asarray(list(users), dtype=np.int64))
        self.user_ids = np.unique(np.concatenate(ids)) if ids[0].size or len(ids) > 1 else np.empty(0, np.int64)

        self._src = np.searchsorted(self.user_ids, deduped[:, 0])
        self._dst = np.searchsorted(self.user_ids, deduped[:, 1])
        n = len(self.user_ids)
        self.out_degrees = np.bincount(self._src, minlength=n)
        self.in_degrees = np.bincount(self._dst, minlength=n)

    @property
    def num_users(self) -> int:
        return len(self.user_ids)

    @property
    def num_links(self) -> int:
        return len(self._src)

    def __repr__(self):
        return f"SocialGraph(users={self.num_users}, links={self.num_links})"

    def _flow_matrix(self) -> sp.csr_matrix:
        # M[j, i] = 1/out_degree(i) for every edge i -> j; M @ s moves score
        # from followers to leaders.
        n = self.num_users
        data = 1.0 / self.out_degrees[self._src]
        return sp.csr_matrix((data, (self._dst, self._src)), shape=(n, n))


def load_social_graph(path) -> SocialGraph:
    """Load an edge list: one ``follower leader`` pair of integer ids per line.

    Lines starting with ``#`` and blank lines are ignored. Raises
    ``ValueError`` (with the line number) on anything else that does not
    parse as two integers.
    """
    edges = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(
                    f"{path}:{lineno}: expected 'follower leader', got {line!r}"
                )
            try:
                edges.append((int(parts[0]), int(parts[1])))
            except ValueError:
                raise ValueError(
                    f"{path}:{lineno}: non-integer id in {line!r}"
                ) from None
    graph = SocialGraph(edges)
    if graph.self_loops_dropped or graph.duplicates_dropped:
        log.info(
            "%s: dropped %d self-loops, collapsed %d duplicate edges",
            path,
            graph.self_loops_dropped,
            graph.duplicates_dropped,
        )
    return graph


def write_edge_list(edges: Iterable[tuple], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for a, b in edges:
            fh.write(f"{a} {b}\n")


@dataclass
class InfluenceVector:
    """Per-user influence scores, aligned with ``user_ids`` (ascending)."""

    measure: str
    user_ids: np.ndarray
    values: np.ndarray
    iterations_used: int = 0
    residual: float = 0.0
    converged: bool = True

    def get(self, user_id, default=0.0) -> float:
        pos = np.searchsorted(self.user_ids, user_id)
        if pos < len(self.user_ids) and self.user_ids[pos] == user_id:
            return float(self.values[pos])
        return float(default)

    def lookup(self, user_ids) -> np.ndarray:
        """Vectorized ``get``: unknown users map to 0."""
        ids = np.asarray(user_ids)
        pos = np.searchsorted(self.user_ids, ids).clip(max=max(len(self.user_ids) - 1, 0))
        out = np.zeros(ids.shape, dtype=np.float64)
        if len(self.user_ids):
            hit = self.user_ids[pos] == ids
            out[hit] = self.values[pos[hit]]
        return out

    def as_dict(self) -> dict:
        return {int(u): float(v) for u, v in zip(self.user_ids, self.values)}


def influence_in_degree(graph: SocialGraph) -> InfluenceVector:
    """Influence = number of followers."""
    return InfluenceVector("in_degree", graph.user_ids, graph.in_degrees.copy())


def influence_pagerank(
    graph: SocialGraph, delta: float = 0.85, tol: float = 1e-10, max_iter: int = 1000
) -> InfluenceVector:
    """PageRank-style influence over the follower->leader flow.

    Fixed point of ``s_j = (1 - delta)/N + delta * sum_{i follows j} s_i / out(i)``
    with the score mass of dangling users (out-degree 0) redistributed
    uniformly every iteration, so the scores sum to 1 throughout. Starts
    uniform; stops when the L1 change drops below ``tol`` or after
    ``max_iter`` sweeps (then the result carries ``converged=False``).
    """
    if not 0.0 < delta < 1.0:
        raise ValueError(f"damping must lie in (0, 1), got {delta}")
    n = graph.num_users
    if n == 0:
        return InfluenceVector("pagerank", graph.user_ids, np.empty(0))

    flow = graph._flow_matrix()
    dangling = np.flatnonzero(graph.out_degrees == 0)
    s = np.full(n, 1.0 / n)
    iterations, residual = 0, np.inf
    for iterations in range(1, max_iter + 1):
        loose = s[dangling].sum() / n if dangling.size else 0.0
        s_next = (1.0 - delta) / n + delta * (flow @ s + loose)
        residual = float(np.abs(s_next - s).sum())
        s = s_next
        if residual < tol:
            break
    converged = residual < tol
    if not converged:
        log.warning(
            "pagerank did not converge in %d iterations (residual %.3e)",
            max_iter,
            residual,
        )
    return InfluenceVector("pagerank", graph.user_ids, s, iterations, residual, converged)


def influence_leaderrank(
    graph: SocialGraph, tol: float = 1e-10, max_iter: int = 1000
) -> InfluenceVector:
    """LeaderRank influence: damping-free score flow with a ground node.

    The graph is augmented with a ground node linked bidirectionally to all
    N users, which removes dangling users and the need for a damping
    parameter. Users start with score 1, the ground node with 0, and every
    node passes its full score in equal shares along its out-edges. After
    convergence the ground node's score is redistributed equally to all
    users, so the reported user scores sum to N.
    """
    n = graph.num_users
    if n == 0:
        raise ValueError("leaderrank needs at least one user")

    g = n  # ground node index in the augmented graph
    src = np.concatenate([graph._src, np.arange(n), np.full(n, g)])
    dst = np.concatenate([graph._dst, np.full(n, g), np.arange(n)])
    out = np.bincount(src, minlength=n + 1)
    flow = sp.csr_matrix((1.0 / out[src], (dst, src)), shape=(n + 1, n + 1))

    s = np.concatenate([np.ones(n), [0.0]])
    iterations, residual = 0, np.inf
    for iterations in range(1, max_iter + 1):
        s_next = flow @ s
        residual = float(np.abs(s_next - s).sum())
        s = s_next
        if residual < tol:
            break
    converged = residual < tol
    if not converged:
        log.warning(
            "leaderrank did not converge in %d iterations (residual %.3e); "
            "this happens on graphs where user-user edges are absent or purely "
            "bipartite with the ground node",
            max_iter,
            residual,
        )
    values = s[:n] + s[g] / n
    return InfluenceVector("leaderrank", graph.user_ids, values, iterations, residual, converged)


def compute_influence(graph: SocialGraph, measure: str, **kwargs) -> InfluenceVector:
    """Dispatch by measure name; see ``MEASURES``."""
    if measure == "in_degree":
        return influence_in_degree(graph)
    if measure == "pagerank":
        return influence_pagerank(graph, **kwargs)
    if measure == "leaderrank":
        return influence_leaderrank(graph, **kwargs)
    raise ValueError(f"unknown influence measure {measure!r} (choose from {MEASURES})")
