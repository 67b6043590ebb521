"""Routing path lengths between grid positions."""

from __future__ import annotations

from collections.abc import Sequence

from flasq.circuit import GridCoord


def manhattan(a: GridCoord, b: GridCoord) -> int:
    return abs(a.row - b.row) + abs(a.col - b.col)


def path3(a: GridCoord, b: GridCoord, c: GridCoord) -> float:
    """Shortest rectilinear tree joining three points.

    For three terminals the optimal tree has a single median Steiner point,
    whose length is half the perimeter of pairwise distances.
    """
    total = manhattan(a, b) + manhattan(a, c) + manhattan(b, c)
    return total // 2 if total % 2 == 0 else total / 2


def steiner_estimate(points: Sequence[GridCoord]) -> int:
    """Rectilinear minimum spanning tree length over four or more points.

    Uses Prim's algorithm on the dense Manhattan graph, growing from the
    lexicographically smallest point and breaking ties lexicographically so
    the tree (not only its length) is reproducible.

    Raises:
        ValueError: if fewer than four points are given.
    """
    if len(points) < 4:
        raise ValueError(f"steiner_estimate needs at least 4 points, got {len(points)}")
    pts = sorted(points)
    n = len(pts)
    in_tree = [False] * n
    best = [float("inf")] * n
    best[0] = 0
    total = 0
    for _ in range(n):
        # First index with the minimum key is the lexicographically smallest.
        u = min((i for i in range(n) if not in_tree[i]), key=lambda i: best[i])
        in_tree[u] = True
        total += best[u]
        for v in range(n):
            if not in_tree[v]:
                w = manhattan(pts[u], pts[v])
                if w < best[v]:
                    best[v] = w
    return int(total)


def connecting_path_length(points: Sequence[GridCoord]) -> float:
    """Dispatch to the exact (k <= 3) or approximate (k >= 4) path length."""
    pts = list(dict.fromkeys(points))
    if len(pts) <= 1:
        return 0
    if len(pts) == 2:
        return manhattan(pts[0], pts[1])
    if len(pts) == 3:
        return path3(*pts)
    return steiner_estimate(pts)
