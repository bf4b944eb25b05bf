"""Slow, independent reference implementations used to cross-check the fast paths.

Visibility is decided with rational arithmetic on every candidate blocker and
solvability by trying every horizontal axis in range; neither touches the
lattice-direction code in ``geometry``. The schedule explorer reuses the
engine's snapshot function (its job is to cover interleavings, not geometry)
but has its own state handling and pattern check.
"""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .controller import TargetPattern, compute as default_controller
from .model import Configuration, Light, Move, global_delta, observe

SUCCESS = "Success"
COLLISION = "Collision"
DEADLOCK = "Deadlock"
DEPTH_EXCEEDED = "DepthExceeded"

DEFAULT_DEPTH = 100_000


def brute_visibility(positions: Sequence[Sequence[int]], i: int) -> set[int]:
    """Indices visible from robot ``i``: no third robot on the open segment."""
    ax, ay = positions[i][0], positions[i][1]
    others = [(m, c[0] - ax, c[1] - ay) for m, c in enumerate(positions) if m != i]
    out = set()
    for j, dx, dy in others:
        norm = dx * dx + dy * dy
        for m, ex, ey in others:
            if m != j and dx * ey == dy * ex and 0 < dx * ex + dy * ey < norm:
                break
        else:
            out.add(j)
    return out


def brute_solvability(positions: Sequence[Sequence[int]]) -> bool:
    """False iff some horizontal mirror axis maps the set onto itself and holds no robot."""
    pts = {(p[0], p[1]) for p in positions}
    ys = [y for _, y in pts]
    for y2 in range(2 * min(ys) - 2, 2 * max(ys) + 3):
        mirrored = {(x, y2 - y) for x, y in pts}
        if mirrored == pts and not any(2 * y == y2 for _, y in pts):
            return False
    return True


def brute_same_shape(points: Sequence[Sequence[int]], targets: Sequence[Sequence[int]]) -> bool:
    """Try every translation taking some point onto some target, with and without a y flip."""
    pts = {(p[0], p[1]) for p in points}
    tgt = {(p[0], p[1]) for p in targets}
    if len(pts) != len(tgt):
        return False
    for flip in (1, -1):
        img = {(x, flip * y) for x, y in pts}
        ax, ay = next(iter(img))
        for tx, ty in tgt:
            dx, dy = tx - ax, ty - ay
            if {(x + dx, y + dy) for x, y in img} == tgt:
                return True
    return False


# -- exhaustive interleaving exploration ---------------------------------------

@dataclass
class ExplorationResult:
    states_visited: int
    outcomes: Counter
    counterexample: list | None = None
    # event paths leading to each state cut off by the depth limit
    frontier: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.outcomes.get(COLLISION, 0) == 0 and self.outcomes.get(DEADLOCK, 0) == 0


def _canonical(pos, lights, pending):
    mx = min(x for x, _ in pos)
    my = min(y for _, y in pos)
    return tuple((x - mx, y - my, l, m) for (x, y), l, m in zip(pos, lights, pending))


def _formed(pos, lights, targets: TargetPattern) -> bool:
    return all(l is Light.DONE for l in lights) and brute_same_shape(pos, targets.points)


def explore_all_schedules(initial: Configuration, targets: TargetPattern,
                          depth_limit: int = DEFAULT_DEPTH,
                          state_cache: dict | None = None,
                          controller: Callable = default_controller) -> ExplorationResult:
    """Breadth-first search over every enabled event at every state.

    States are (position, light, pending move) per robot, translated so the
    bounding box starts at the origin. Success states are leaves. A run fails
    if it can collide, or if some strongly connected set of states contains a
    transition of every robot: a fair adversary can then keep the system
    there forever without forming the pattern. A state where every robot
    only waits is the one-state case of that rule.

    ``state_cache`` may be passed in to share the state index across calls;
    it maps canonical state to id.
    """
    if len(initial) != len(targets):
        raise ValueError(f"{len(initial)} robots but {len(targets)} targets")
    if not brute_solvability(initial.positions):
        raise ValueError("initial configuration is not solvable")
    ids = [r.id for r in initial.robots]
    chir = [r.chirality for r in initial.robots]
    k = len(ids)
    index = {} if state_cache is None else state_cache
    index.clear()
    states: list = []
    parent: list = []   # (parent id, event) per state
    depth: list = []
    edges: list = []    # per state: list of (robot, successor id)
    outcomes: Counter = Counter()
    counterexample = None
    frontier = []

    def path_to(sid: int) -> list:
        out = []
        while parent[sid] is not None:
            sid, ev = parent[sid]
            out.append(ev)
        out.reverse()
        return out

    def add(key, raw, par, d):
        sid = index.get(key)
        if sid is None:
            sid = len(states)
            index[key] = sid
            states.append(raw)
            parent.append(par)
            depth.append(d)
            edges.append(None)
            queue.append(sid)
        return sid

    start = (tuple(r.pos for r in initial.robots), tuple(r.light for r in initial.robots), (None,) * k)
    queue: deque = deque()
    add(_canonical(*start), start, None, 0)
    while queue:
        sid = queue.popleft()
        pos, lights, pending = states[sid]
        if _formed(pos, lights, targets):
            outcomes[SUCCESS] += 1
            edges[sid] = []
            continue
        if depth[sid] >= depth_limit:
            outcomes[DEPTH_EXCEEDED] += 1
            frontier.append(path_to(sid))
            edges[sid] = []
            continue
        out = []
        occupied = set(pos)
        for i in range(k):
            move = pending[i]
            if move is not None:
                dx, dy = global_delta(move, chir[i])
                dest = (pos[i][0] + dx, pos[i][1] + dy)
                ev = (ids[i], "Move")
                if dest in occupied:
                    outcomes[COLLISION] += 1
                    if counterexample is None:
                        counterexample = path_to(sid) + [ev]
                    continue
                npos = pos[:i] + (dest,) + pos[i + 1:]
                npend = pending[:i] + (None,) + pending[i + 1:]
                nxt = (npos, lights, npend)
                out.append((i, add(_canonical(*nxt), nxt, (sid, ev), depth[sid] + 1)))
                continue
            snap, _ = observe(pos, lights, chir[i], i)
            action = controller(snap, targets)
            if action.new_light is lights[i] and action.move is Move.NULL:
                out.append((i, sid))
                continue
            nlights = lights[:i] + (action.new_light,) + lights[i + 1:]
            npend = pending
            if action.move is not Move.NULL:
                npend = pending[:i] + (action.move,) + pending[i + 1:]
            nxt = (pos, nlights, npend)
            out.append((i, add(_canonical(*nxt), nxt, (sid, (ids[i], "Look")), depth[sid] + 1)))
        edges[sid] = out

    for comp in _strongly_connected(edges):
        members = set(comp)
        movers = {i for s in comp for i, t in edges[s] if t in members}
        if len(movers) == k:
            outcomes[DEADLOCK] += 1
            if counterexample is None:
                counterexample = path_to(min(comp, key=depth.__getitem__))
    return ExplorationResult(len(states), outcomes, counterexample, frontier)


def _strongly_connected(edges: list) -> list[list[int]]:
    """Iterative Tarjan over ``edges[v] = [(label, w), ...]``."""
    n = len(edges)
    low = [0] * n
    num = [-1] * n
    on_stack = [False] * n
    stack: list = []
    comps = []
    counter = 0
    for root in range(n):
        if num[root] != -1:
            continue
        work = [(root, 0)]
        num[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, pos = work[-1]
            succ = edges[v]
            if pos < len(succ):
                work[-1] = (v, pos + 1)
                w = succ[pos][1]
                if num[w] == -1:
                    num[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w]:
                    low[v] = min(low[v], num[w])
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == num[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comps.append(comp)
    return comps
