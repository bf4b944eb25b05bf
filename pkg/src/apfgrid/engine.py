"""Discrete-event execution of robots under an adversarial scheduler.

A robot's Look and Compute are one atomic event; its Move is a later event.
The light computed at Look becomes visible immediately, while the unit move
waits for the Move event, so other robots may act on a stale position.
"""

from __future__ import annotations

import random
from math import gcd
from dataclasses import dataclass, field
from typing import Callable, Iterable, NamedTuple, Sequence

from .controller import TargetPattern, compute as default_controller
from .geometry import GridPoint, enclosing_dims
from .model import (
    Action,
    CollisionError,
    Configuration,
    Light,
    Move,
    Robot,
    Snapshot,
    global_delta,
    is_solvable,
    same_shape,
    observe,
    snapshot_at,
)

LOOK = "Look"
MOVE = "Move"

DEFAULT_FAIRNESS = 16


class UnsolvableInstanceError(ValueError):
    pass


class TraceRecord(NamedTuple):
    seq: int
    robot: int
    kind: str
    pos_before: GridPoint
    pos_after: GridPoint
    light_before: Light
    light_after: Light


@dataclass
class RunStats:
    k: int
    total_moves: int
    m_ser: int
    n_ser: int
    M_ser: int
    N_ser: int
    events: int = 0

    @property
    def D(self) -> int:
        return max(self.m_ser, self.n_ser, self.M_ser, self.N_ser, self.k)

    def as_dict(self) -> dict:
        return {
            "k": self.k, "total_moves": self.total_moves, "events": self.events,
            "m_ser": self.m_ser, "n_ser": self.n_ser, "M_ser": self.M_ser, "N_ser": self.N_ser,
            "D": self.D,
        }


@dataclass
class Outcome:
    kind: str  # Success | Collision | Deadlock | Timeout
    stats: RunStats
    trace: list
    final: Configuration
    error: CollisionError | None = None
    looks: list | None = None

    @property
    def ok(self) -> bool:
        return self.kind == "Success"


class World:
    """Mutable simulation state; single writer (the scheduler loop).

    Each robot's decision is cached and only dropped when a robot it could
    see (before or after the change) moves or changes light. A robot hidden
    behind a nearer one on the same ray can neither appear nor disappear
    from a snapshot, so the cache stays exact.
    """

    def __init__(self, config: Configuration, targets: TargetPattern,
                 controller: Callable = default_controller, record_looks: bool = False):
        self.ids = [r.id for r in config.robots]
        self.positions = [r.pos for r in config.robots]
        self.lights = [r.light for r in config.robots]
        self.chirality = [r.chirality for r in config.robots]
        self.k = len(self.ids)
        self.targets = targets
        self.controller = controller
        self.passive = getattr(controller, "passive_lights", frozenset())
        self.pending: list = [None] * self.k
        self.pending_count = 0
        self.event_counter = 0
        self.last_active = [0] * self.k
        self._cache: list = [None] * self.k
        self.occupied = {p: i for i, p in enumerate(self.positions)}
        self.total_moves = 0
        self.done_count = sum(l is Light.DONE for l in self.lights)
        self.looks = [] if record_looks else None

    # -- views -------------------------------------------------------------
    @property
    def config(self) -> Configuration:
        return Configuration(tuple(
            Robot(self.ids[i], self.positions[i], self.lights[i], self.chirality[i]) for i in range(self.k)
        ))

    def snapshot(self, i: int) -> Snapshot:
        return snapshot_at(self.positions, self.lights, self.chirality[i], i)

    def enabled_events(self) -> list[tuple[int, str]]:
        return [(i, MOVE if self.pending[i] is not None else LOOK) for i in range(self.k)]

    def productive_events(self) -> list[tuple[int, str]]:
        """Enabled events that change something: pending Moves and non-waiting Looks.

        A Look that keeps the light and moves nowhere is indistinguishable
        from the robot staying asleep, so policies draw from this list.
        """
        out = []
        for i in range(self.k):
            if self.pending[i] is not None:
                out.append((i, MOVE))
            else:
                _, action = self.decide(i)
                if action.move is not Move.NULL or action.new_light is not self.lights[i]:
                    out.append((i, LOOK))
        return out

    def quiescent(self) -> bool:
        """Nothing pending and every robot would keep its light and stay put."""
        return self.pending_count == 0 and not self.productive_events()

    def candidates(self) -> list[tuple[int, str]]:
        return self.productive_events() or self.enabled_events()

    def all_done(self) -> bool:
        return self.done_count == self.k

    def formed(self) -> bool:
        return self.all_done() and same_shape(self.positions, self.targets.points)

    # -- decision cache ----------------------------------------------------
    def decide(self, i: int) -> tuple[Snapshot, Action]:
        cached = self._cache[i]
        if cached is not None:
            return cached[0], cached[1]
        light = self.lights[i]
        if light in self.passive and self.looks is None:
            # the controller ignores the view entirely; nothing to invalidate
            entry = (None, Action(light), ())
        else:
            snap, seen = observe(self.positions, self.lights, self.chirality[i], i)
            entry = (snap, self.controller(snap, self.targets), seen)
        self._cache[i] = entry
        return entry[0], entry[1]

    def _clear_ray(self, a, b) -> bool:
        dx, dy = b[0] - a[0], b[1] - a[1]
        g = gcd(dx, dy)
        sx, sy = dx // g, dy // g
        occ = self.occupied
        return not any((a[0] + t * sx, a[1] + t * sy) in occ for t in range(1, g))

    def _invalidate(self, j: int, arrived=None) -> None:
        cache = self._cache
        cache[j] = None
        for i in range(self.k):
            entry = cache[i]
            if entry is None:
                continue
            if j in entry[2] or (arrived is not None and self._clear_ray(self.positions[i], arrived)):
                cache[i] = None

    # -- events ------------------------------------------------------------
    def fire(self, i: int, kind: str) -> TraceRecord:
        seq = self.event_counter
        self.event_counter += 1
        self.last_active[i] = self.event_counter
        pos = self.positions[i]
        light = self.lights[i]
        if kind == LOOK:
            if self.pending[i] is not None:
                raise RuntimeError(f"robot {self.ids[i]} looked with a move pending")
            snap, action = self.decide(i)
            if self.looks is not None:
                self.looks.append((self.ids[i], snap, action))
            if action.move is not Move.NULL:
                self.pending[i] = action.move
                self.pending_count += 1
            if action.new_light is not light:
                self.lights[i] = action.new_light
                self.done_count += (action.new_light is Light.DONE) - (light is Light.DONE)
                self._invalidate(i)
            return TraceRecord(seq, self.ids[i], LOOK, pos, pos, light, self.lights[i])
        move = self.pending[i]
        if move is None:
            raise RuntimeError(f"robot {self.ids[i]} has no pending move")
        dx, dy = global_delta(move, self.chirality[i])
        dest = GridPoint(pos.x + dx, pos.y + dy)
        if dest in self.occupied:
            raise CollisionError(self.ids[i], self.ids[self.occupied[dest]], dest)
        self.pending[i] = None
        self.pending_count -= 1
        del self.occupied[pos]
        self.occupied[dest] = i
        self.positions[i] = dest
        self.total_moves += 1
        self._invalidate(i, dest)
        return TraceRecord(seq, self.ids[i], MOVE, pos, dest, light, light)


# -- scheduling policies -----------------------------------------------------

class Policy:
    """Chooses the next event among the enabled ones."""

    name = "policy"

    def reset(self, world: World) -> None:
        pass

    def choose(self, world: World) -> tuple[int, str]:
        raise NotImplementedError


class RandomAsync(Policy):
    name = "random"

    def __init__(self, seed: int = 0):
        self.seed = seed

    def reset(self, world):
        self.rng = random.Random(self.seed)

    def choose(self, world):
        events = world.candidates()
        return events[self.rng.randrange(len(events))]


class _Rounds(Policy):
    """Lock-step rounds: each activated robot Looks, then each pending Move runs.

    Looks inside a round run in index order, so a light set by an earlier Look
    of the round is already visible to later ones.
    """

    def reset(self, world):
        self.queue: list = []
        self.round = 0

    def activated(self, world) -> list[int]:
        raise NotImplementedError

    def choose(self, world):
        while True:
            while self.queue:
                ev = self.queue.pop(0)
                i, kind = ev
                if kind == MOVE and world.pending[i] is None:
                    continue
                if kind == LOOK and world.pending[i] is not None:
                    continue
                return ev
            active = self.activated(world)
            self.round += 1
            self.queue = [(i, LOOK) for i in active if world.pending[i] is None]
            self.queue += [(i, MOVE) for i in active]
            # robots stranded with a pending move from an earlier round
            self.queue += [(i, MOVE) for i in range(world.k) if i not in active and world.pending[i] is not None]


class FSync(_Rounds):
    name = "fsync"

    def activated(self, world):
        return list(range(world.k))


class RoundRobinSSync(_Rounds):
    """Each round activates robot ``round mod k`` plus a seeded random subset."""

    name = "ssync"

    def __init__(self, seed: int = 0):
        self.seed = seed

    def reset(self, world):
        super().reset(world)
        self.rng = random.Random(self.seed)

    def activated(self, world):
        forced = self.round % world.k
        return [i for i in range(world.k) if i == forced or self.rng.random() < 0.5]


class LaggardAsync(Policy):
    """Random interleaving, except one victim's Move is held back ``delay`` events.

    The victim rotates through the robots each time its held Move executes.
    """

    name = "laggard"

    def __init__(self, seed: int = 0, delay: int = 8):
        self.seed = seed
        self.delay = delay

    def reset(self, world):
        self.rng = random.Random(self.seed)
        self.victim = 0
        self.held_since = None

    def choose(self, world):
        enabled = world.candidates()
        v = self.victim
        if world.pending[v] is not None:
            if self.held_since is None:
                self.held_since = world.event_counter
            if world.event_counter - self.held_since >= self.delay:
                self.held_since = None
                self.victim = (v + 1) % world.k
                return (v, MOVE)
            choices = [e for e in enabled if e[0] != v] or enabled
        else:
            choices = enabled
        return choices[self.rng.randrange(len(choices))]


class ForcedPolicy(Policy):
    """Replays a fixed event sequence of (robot id, kind) pairs.

    Once the sequence is used up, ``then`` takes over if given; otherwise the
    run ends as Exhausted.
    """

    name = "forced"

    def __init__(self, events: Sequence[tuple], then: Policy | None = None):
        self.events = list(events)
        self.then = then

    def reset(self, world):
        self.pos = 0
        self.index = {rid: i for i, rid in enumerate(world.ids)}
        if self.then is not None:
            self.then.reset(world)

    def choose(self, world):
        if self.pos >= len(self.events):
            if self.then is None:
                raise StopIteration
            return self.then.choose(world)
        rid, kind = self.events[self.pos]
        self.pos += 1
        return (self.index[rid], kind)


POLICIES = {
    "random": RandomAsync,
    "fsync": lambda seed=0: FSync(),
    "ssync": RoundRobinSSync,
    "laggard": LaggardAsync,
}


def make_policy(name: str, seed: int = 0) -> Policy:
    try:
        factory = POLICIES[name]
    except KeyError:
        raise ValueError(f"unknown policy {name!r}") from None
    return factory(seed=seed)


# -- driver ------------------------------------------------------------------

def initial_stats(initial: Configuration, targets: TargetPattern) -> RunStats:
    m, n = enclosing_dims(initial.positions)
    M, N = enclosing_dims(targets.points)
    return RunStats(k=len(initial), total_moves=0, m_ser=m, n_ser=n, M_ser=M, N_ser=N)


def validate_instance(initial: Configuration, targets: TargetPattern) -> None:
    if len(initial) != len(targets):
        raise ValueError(f"{len(initial)} robots but {len(targets)} targets")
    if any(r.light is not Light.OFF for r in initial.robots):
        raise ValueError("every robot must start with its light off")
    if not is_solvable(initial):
        raise UnsolvableInstanceError("initial configuration has an empty horizontal mirror axis")


def step(world: World, policy: Policy, fairness: int | None = DEFAULT_FAIRNESS) -> TraceRecord:
    """Execute one event chosen by ``policy``, overriding it to keep the run fair.

    Every window of ``fairness * k`` consecutive events contains an event of
    every robot: the most starved robot is activated regardless of the policy
    (possibly for a waiting Look) once it has idled ``(fairness - 1) * k``
    events, which leaves room for all k robots to hit the limit at once.
    ``fairness=None`` trusts the policy (used for replays).
    """
    if fairness is not None:
        starving = min(range(world.k), key=world.last_active.__getitem__)
        if world.event_counter - world.last_active[starving] >= (fairness - 1) * world.k:
            kind = MOVE if world.pending[starving] is not None else LOOK
            return world.fire(starving, kind)
    i, kind = policy.choose(world)
    return world.fire(i, kind)


def run(initial: Configuration, targets: TargetPattern, policy: Policy, max_events: int = 1_000_000,
        fairness: int | None = DEFAULT_FAIRNESS, controller: Callable = default_controller,
        record_trace: bool = True, record_looks: bool = False,
        on_event: Callable | None = None) -> Outcome:
    validate_instance(initial, targets)
    world = World(initial, targets, controller=controller, record_looks=record_looks)
    policy.reset(world)
    trace: list = []
    stats = initial_stats(initial, targets)
    kind = "Timeout"
    error = None
    while world.event_counter < max_events:
        if world.quiescent():
            kind = "Deadlock"
            break
        try:
            rec = step(world, policy, fairness)
        except CollisionError as exc:
            kind, error = "Collision", exc
            break
        except StopIteration:
            kind = "Exhausted"
            break
        if record_trace:
            trace.append(rec)
        if on_event is not None:
            on_event(world, rec)
        if world.formed():
            kind = "Success"
            break
    stats.total_moves = world.total_moves
    stats.events = world.event_counter
    return Outcome(kind, stats, trace, world.config, error, world.looks)


def check_move_bound(stats: RunStats, c: int = 10) -> bool:
    return stats.total_moves <= c * stats.k * stats.D
