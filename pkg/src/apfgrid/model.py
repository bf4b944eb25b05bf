"""World state, local frames, snapshots and the configuration classifiers."""

from __future__ import annotations

from math import gcd
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable, NamedTuple, Sequence

from .geometry import GridPoint, InvalidConfigurationError, reflection_axis, visible_from


class Light(str, Enum):
    OFF = "off"
    TERMINAL1 = "terminal1"
    SYMMETRIC = "symmetric"
    DECIDER = "decider"
    CALL = "call"
    LEADER1 = "leader1"
    LEADER = "leader"
    DONE = "done"


class Move(str, Enum):
    UP = "up"
    DOWN = "down"
    LEFT = "left"
    RIGHT = "right"
    NULL = "null"

    @property
    def delta(self) -> tuple[int, int]:
        return _DELTAS[self]


_DELTAS = {
    Move.UP: (0, 1),
    Move.DOWN: (0, -1),
    Move.LEFT: (-1, 0),
    Move.RIGHT: (1, 0),
    Move.NULL: (0, 0),
}


class Action(NamedTuple):
    new_light: Light
    move: Move = Move.NULL


class CollisionError(RuntimeError):
    def __init__(self, mover, occupant, at):
        super().__init__(f"robot {mover} moved onto robot {occupant} at {tuple(at)}")
        self.mover = mover
        self.occupant = occupant
        self.at = at


class UnknownRobotError(KeyError):
    pass


@dataclass(frozen=True)
class Robot:
    id: int
    pos: GridPoint
    light: Light = Light.OFF
    chirality: int = 1

    def __post_init__(self):
        if self.chirality not in (1, -1):
            raise ValueError(f"chirality must be +1 or -1, got {self.chirality!r}")


class Snapshot(NamedTuple):
    """A robot's view: relative positions in its own frame, with lights."""

    self_light: Light
    others: frozenset  # of ((dx, dy), Light)


@dataclass(frozen=True)
class Configuration:
    robots: tuple

    def __post_init__(self):
        object.__setattr__(self, "robots", tuple(self.robots))
        if len({r.pos for r in self.robots}) != len(self.robots):
            raise InvalidConfigurationError("two robots share a grid point")
        if len({r.id for r in self.robots}) != len(self.robots):
            raise ValueError("robot ids must be unique")

    @classmethod
    def from_points(cls, points: Iterable[Sequence[int]], lights=None, chirality=None,
                    ids=None) -> "Configuration":
        pts = [GridPoint(int(p[0]), int(p[1])) for p in points]
        lights = list(lights) if lights is not None else [Light.OFF] * len(pts)
        chir = list(chirality) if chirality else [1] * len(pts)
        ids = list(ids) if ids is not None else list(range(len(pts)))
        if not len(lights) == len(chir) == len(ids) == len(pts):
            raise ValueError("lights, chirality and ids must match the number of points")
        return cls(tuple(Robot(r, p, Light(l), c) for r, p, l, c in zip(ids, pts, lights, chir)))

    @property
    def positions(self) -> list[GridPoint]:
        return [r.pos for r in self.robots]

    @property
    def lights(self) -> list[Light]:
        return [r.light for r in self.robots]

    def index_of(self, rid) -> int:
        for i, r in enumerate(self.robots):
            if r.id == rid:
                return i
        raise UnknownRobotError(rid)

    def robot(self, rid) -> Robot:
        return self.robots[self.index_of(rid)]

    def __len__(self):
        return len(self.robots)


def observe(positions: Sequence[Sequence[int]], lights: Sequence[Light], chirality: int, i: int):
    """Snapshot of robot ``i`` plus the indices it sees; the engine's hot path.

    Same nearest-per-primitive-direction rule as ``visible_from``, inlined.
    """
    ox, oy = positions[i]
    best: dict = {}
    for j, (x, y) in enumerate(positions):
        if j == i:
            continue
        dx, dy = x - ox, y - oy
        g = gcd(dx, dy)
        if g == 0:
            raise InvalidConfigurationError(f"robots {i} and {j} share {(x, y)}")
        key = (dx // g, dy // g)
        cur = best.get(key)
        if cur is None or g < cur[0]:
            best[key] = (g, j)
    seen = [j for _, j in best.values()]
    others = frozenset(
        ((positions[j][0] - ox, chirality * (positions[j][1] - oy)), lights[j]) for j in seen
    )
    return Snapshot(lights[i], others), seen


def snapshot_at(positions: Sequence[Sequence[int]], lights: Sequence[Light], chirality: int, i: int) -> Snapshot:
    return observe(positions, lights, chirality, i)[0]


def take_snapshot(config: Configuration, rid) -> Snapshot:
    i = config.index_of(rid)
    return snapshot_at(config.positions, config.lights, config.robots[i].chirality, i)


def global_delta(move: Move, chirality: int) -> tuple[int, int]:
    dx, dy = move.delta
    return dx, dy * chirality


def apply_action(config: Configuration, rid, action: Action) -> Configuration:
    """Apply a light change and a unit move atomically."""
    i = config.index_of(rid)
    r = config.robots[i]
    dx, dy = global_delta(action.move, r.chirality)
    dest = GridPoint(r.pos.x + dx, r.pos.y + dy)
    if dest != r.pos:
        for other in config.robots:
            if other.pos == dest:
                raise CollisionError(r.id, other.id, dest)
    robots = list(config.robots)
    robots[i] = replace(r, pos=dest, light=action.new_light)
    return Configuration(tuple(robots))


def is_stable_configuration(config: Configuration) -> bool:
    deciders = [r for r in config.robots if r.light is Light.DECIDER]
    if len(deciders) != 2 or deciders[0].pos.x != deciders[1].pos.x:
        return False
    if any(r.light is not Light.OFF for r in config.robots if r.light is not Light.DECIDER):
        return False
    rest = [r.pos for r in config.robots if r.light is Light.OFF]
    col = deciders[0].pos.x
    rows = {d.pos.y for d in deciders}
    if any(p.x == col or p.y in rows for p in rest):
        return False
    for d in deciders:
        others = [r.pos for r in config.robots if r is not d]
        if any(p.x < d.pos.x for p in others):
            return False
        upper_empty = not any(p.y >= d.pos.y for p in others)
        lower_empty = not any(p.y <= d.pos.y for p in others)
        if not (upper_empty or lower_empty):
            return False
    return True


def is_leader_configuration(config: Configuration) -> bool:
    leaders = [r for r in config.robots if r.light is Light.LEADER]
    if len(leaders) != 1:
        return False
    leader = leaders[0]
    others = [r for r in config.robots if r is not leader]
    if any(r.light is not Light.OFF for r in others):
        return False
    lx, ly = leader.pos
    pts = [r.pos for r in others]
    if any(p.x == lx or p.y == ly for p in pts):
        return False
    if any(p.x < lx for p in pts):
        return False
    return not any(p.y > ly for p in pts) or not any(p.y < ly for p in pts)


def is_solvable(config: Configuration | Iterable[Sequence[int]]) -> bool:
    pts = config.positions if isinstance(config, Configuration) else list(config)
    return reflection_axis(pts) is None


def _normalized(points: Iterable[Sequence[int]]) -> frozenset:
    pts = [(p[0], p[1]) for p in points]
    mx = min(x for x, _ in pts)
    my = min(y for _, y in pts)
    return frozenset((x - mx, y - my) for x, y in pts)


def same_shape(points: Iterable[Sequence[int]], targets: Iterable[Sequence[int]]) -> bool:
    """Equal up to translation and reflection across a horizontal line.

    Only the x direction is shared, so a formed pattern is defined up to that
    reflection.
    """
    a = _normalized(points)
    b = _normalized(targets)
    if a == b:
        return True
    return a == _normalized((x, -y) for x, y in b)


def pattern_formed(config: Configuration, targets) -> bool:
    pts = getattr(targets, "points", targets)
    pts = list(pts)
    if len(pts) != len(config):
        raise ValueError(f"pattern has {len(pts)} points but there are {len(config)} robots")
    if any(r.light is not Light.DONE for r in config.robots):
        return False
    return same_shape(config.positions, pts)
