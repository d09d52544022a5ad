"""Consistent orientations of a finite family of walls.

A wall is a pair of complementary half-spaces given as bitmasks over a finite
universe. An orientation picks one half-space per wall; it is consistent when
the picked half-spaces pairwise intersect, which for a complement-closed
family is the same as being upward closed under inclusion.
"""

from __future__ import annotations

from typing import Sequence

Orientation = tuple[bool, ...]  # True picks the first half-space of the wall


def consistent_orientations(walls: Sequence[tuple[int, int]]) -> list[Orientation]:
    n = len(walls)
    half = [(w[1], w[0]) for w in walls]  # index by bool: half[k][True] is walls[k][0]
    # allowed[k][l] = set of (s, t) combos with half[k][s] & half[l][t] != 0
    ok = [[None] * n for _ in range(n)]
    for k in range(n):
        for l in range(k):
            ok[k][l] = {(s, t) for s in (False, True) for t in (False, True)
                        if half[k][s] & half[l][t]}
    out: list[Orientation] = []
    choice: list[bool] = []

    def rec(k):
        if k == n:
            out.append(tuple(choice))
            return
        for s in (True, False):
            if not half[k][s]:
                continue
            if all((s, choice[l]) in ok[k][l] for l in range(k)):
                choice.append(s)
                rec(k + 1)
                choice.pop()

    rec(0)
    return out


def flip_edges(vertices: Sequence[Orientation]) -> list[tuple[int, int, int]]:
    """Pairs of orientations differing on exactly one wall, as (i, j, wall)."""
    pos = {v: i for i, v in enumerate(vertices)}
    edges = []
    for i, v in enumerate(vertices):
        for k in range(len(v)):
            if v[k]:
                w = v[:k] + (False,) + v[k + 1:]
                j = pos.get(w)
                if j is not None:
                    edges.append((i, j, k))
    edges.sort()
    return edges


def principal(walls: Sequence[tuple[int, int]], point: int) -> Orientation:
    """The orientation picking, from each wall, the half-space holding ``point``."""
    bit = 1 << point
    return tuple(bool(w[0] & bit) for w in walls)
