"""Fixed-radius neighbour queries: dense brute force and a uniform-grid index."""

from __future__ import annotations

from collections import defaultdict

import numpy as np


def brute_force_adjacency(positions, radius: float, active=None) -> np.ndarray:
    """Boolean matrix ``A[i, j]``: ``i != j``, both active, ``|x_i - x_j| < radius``."""
    pos = np.asarray(positions, dtype=float)
    n = len(pos)
    diff = pos[:, None, :] - pos[None, :, :]
    adj = np.einsum("ijk,ijk->ij", diff, diff) < radius * radius
    np.fill_diagonal(adj, False)
    if active is not None:
        active = np.asarray(active, dtype=bool)
        adj &= active[:, None] & active[None, :]
    return adj.reshape(n, n)


class UniformGrid:
    """Bucket points into square cells of side ``radius``.

    Any pair closer than ``radius`` lies in the same or an adjacent cell,
    so a query inspects at most nine buckets.
    """

    def __init__(self, positions, radius: float, active=None):
        self.positions = np.asarray(positions, dtype=float)
        self.radius = float(radius)
        n = len(self.positions)
        self.active = np.ones(n, dtype=bool) if active is None else np.asarray(active, dtype=bool)
        self.cells = np.floor(self.positions / self.radius).astype(np.int64)
        self.buckets: dict[tuple[int, int], list[int]] = defaultdict(list)
        for i in np.flatnonzero(self.active):
            self.buckets[tuple(self.cells[i])].append(int(i))

    def query(self, i: int) -> list[int]:
        """Active neighbours of agent ``i`` in ascending index order."""
        if not self.active[i]:
            return []
        cx, cy = self.cells[i]
        xi = self.positions[i]
        r2 = self.radius * self.radius
        found = []
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                for j in self.buckets.get((cx + dx, cy + dy), ()):
                    if j != i and np.sum((self.positions[j] - xi) ** 2) < r2:
                        found.append(j)
        return sorted(found)

    def adjacency(self) -> np.ndarray:
        n = len(self.positions)
        adj = np.zeros((n, n), dtype=bool)
        for i in np.flatnonzero(self.active):
            adj[i, self.query(int(i))] = True
        return adj


def adjacency(positions, radius: float, active=None, method: str = "brute") -> np.ndarray:
    if method == "grid":
        return UniformGrid(positions, radius, active).adjacency()
    return brute_force_adjacency(positions, radius, active)
