"""Exact integer lattice geometry.

Horizontal axes are stored in doubled coordinates (``y2 = 2 * y``) so that the
half-integer mirror line between two robots on one column stays exact.
"""

from __future__ import annotations

from enum import Enum
from math import gcd
from typing import Iterable, NamedTuple, Sequence


class InvalidConfigurationError(ValueError):
    """Two robots share a grid point."""


class NotSameVerticalError(ValueError):
    pass


class GridPoint(NamedTuple):
    x: int
    y: int


class HorizontalAxis(NamedTuple):
    """The horizontal line ``y = y2 / 2``."""

    y2: int

    def contains_row(self, y: int) -> bool:
        return self.y2 == 2 * y


# A lambda sequence is a tuple of 0/1 bits, index 0 holding the first row
# outward from the axis. Trailing zeros are never stored.
LambdaSequence = tuple


class Side(Enum):
    ABOVE = "above"
    BELOW = "below"
    NONE = "none"

    def mirrored(self) -> "Side":
        if self is Side.ABOVE:
            return Side.BELOW
        if self is Side.BELOW:
            return Side.ABOVE
        return Side.NONE


def cross(o: Sequence[int], a: Sequence[int], b: Sequence[int]) -> int:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def strictly_between(a: Sequence[int], b: Sequence[int], c: Sequence[int]) -> bool:
    """True iff ``c`` lies on the open segment ``(a, b)``."""
    if cross(a, b, c) != 0:
        return False
    if (c[0] == a[0] and c[1] == a[1]) or (c[0] == b[0] and c[1] == b[1]):
        return False
    return (min(a[0], b[0]) <= c[0] <= max(a[0], b[0])
            and min(a[1], b[1]) <= c[1] <= max(a[1], b[1]))


def visible_from(origin: Sequence[int], others: Iterable[Sequence[int]]) -> dict:
    """Map each primitive lattice direction to the index of the nearest point.

    A point is visible from ``origin`` iff it is the nearest one along its
    primitive direction, so one pass with a gcd reduction suffices.
    """
    ox, oy = origin[0], origin[1]
    best: dict = {}
    for idx, p in enumerate(others):
        dx, dy = p[0] - ox, p[1] - oy
        g = gcd(dx, dy)
        if g == 0:
            raise InvalidConfigurationError(f"point {tuple(p)} coincides with {tuple(origin)}")
        key = (dx // g, dy // g)
        cur = best.get(key)
        if cur is None or g < cur[0]:
            best[key] = (g, idx)
    return best


def visible_set(positions: Sequence[Sequence[int]], i: int) -> set[int]:
    """Indices of robots visible from ``positions[i]`` (opaque robots)."""
    if len(set(map(tuple, positions))) != len(positions):
        raise InvalidConfigurationError("duplicate positions")
    origin = positions[i]
    others = [j for j in range(len(positions)) if j != i]
    best = visible_from(origin, (positions[j] for j in others))
    return {others[idx] for _, idx in best.values()}


def midline(p: Sequence[int], q: Sequence[int]) -> HorizontalAxis:
    if p[0] != q[0]:
        raise NotSameVerticalError(f"{tuple(p)} and {tuple(q)} are not on one column")
    if p[1] == q[1]:
        raise ValueError("midline of a point with itself")
    return HorizontalAxis(p[1] + q[1])


def _strip(bits: list) -> tuple:
    while bits and bits[-1] == 0:
        bits.pop()
    return tuple(bits)


def lambda_from_rows(rows: Iterable[int], k: HorizontalAxis) -> tuple[tuple, tuple]:
    """Lambda pair for a column given only its occupied rows."""
    above: dict[int, int] = {}
    below: dict[int, int] = {}
    for y in rows:
        d = 2 * y - k.y2
        if d > 0:
            above[(d + 1) // 2] = 1
        elif d < 0:
            below[(1 - d) // 2] = 1
    up = [0] * max(above, default=0)
    for j in above:
        up[j - 1] = 1
    down = [0] * max(below, default=0)
    for j in below:
        down[j - 1] = 1
    return _strip(up), _strip(down)


def lambda_pair(column: int, occupied: Iterable[Sequence[int]], k: HorizontalAxis) -> tuple[tuple, tuple]:
    """Occupancy sequences of ``column`` read outward from ``k``, above then below.

    A robot lying exactly on ``k`` belongs to neither sequence.
    """
    return lambda_from_rows((p[1] for p in occupied if p[0] == column), k)


def compare_lambda(a: tuple, b: tuple) -> int:
    """Lexicographic comparison of two 0-padded bit sequences (-1, 0, 1)."""
    n = max(len(a), len(b))
    a = a + (0,) * (n - len(a))
    b = b + (0,) * (n - len(b))
    return (a > b) - (a < b)


def line_symmetric(column: int, occupied: Iterable[Sequence[int]], k: HorizontalAxis) -> bool:
    up, down = lambda_pair(column, occupied, k)
    return up == down


def dominant_from_rows(rows: Iterable[int], k: HorizontalAxis) -> Side:
    up, down = lambda_from_rows(rows, k)
    c = compare_lambda(up, down)
    if c > 0:
        return Side.ABOVE
    if c < 0:
        return Side.BELOW
    return Side.NONE


def dominant_side(column: int, occupied: Iterable[Sequence[int]], k: HorizontalAxis) -> Side:
    return dominant_from_rows((p[1] for p in occupied if p[0] == column), k)


def reflection_axis(config: Iterable[Sequence[int]]) -> HorizontalAxis | None:
    """The empty horizontal mirror axis of ``config``, if one exists.

    Any horizontal mirror symmetry swaps the extreme rows, so the only
    candidate is ``y2 = min_y + max_y``.
    """
    pts = {(p[0], p[1]) for p in config}
    if not pts:
        raise ValueError("empty configuration")
    ys = [y for _, y in pts]
    y2 = min(ys) + max(ys)
    if any(2 * y == y2 for y in ys):
        return None
    if all((x, y2 - y) in pts for x, y in pts):
        return HorizontalAxis(y2)
    return None


def mirror(points: Iterable[Sequence[int]], k: HorizontalAxis) -> list[GridPoint]:
    return [GridPoint(p[0], k.y2 - p[1]) for p in points]


def translate(points: Iterable[Sequence[int]], dx: int, dy: int) -> list[GridPoint]:
    return [GridPoint(p[0] + dx, p[1] + dy) for p in points]


def enclosing_dims(points: Iterable[Sequence[int]]) -> tuple[int, int]:
    """(height, width) of the smallest enclosing rectangle, in grid edges."""
    pts = list(points)
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    return max(ys) - min(ys), max(xs) - min(xs)
