"""Per-robot decision procedure: leader election (two phases) and pattern formation.

Everything here is a pure function of a :class:`Snapshot` (and the target
pattern). Predicates are evaluated over the visible robots only.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, NamedTuple, Sequence

from .geometry import GridPoint, Side, dominant_from_rows, lambda_from_rows, HorizontalAxis
from .model import Action, Light, Move, Snapshot

OFF, TERMINAL1, SYMMETRIC, DECIDER = Light.OFF, Light.TERMINAL1, Light.SYMMETRIC, Light.DECIDER
CALL, LEADER1, LEADER, DONE = Light.CALL, Light.LEADER1, Light.LEADER, Light.DONE

PHASE1_LIGHTS = frozenset({TERMINAL1, SYMMETRIC})
PHASE2_LIGHTS = frozenset({DECIDER, CALL, LEADER1})
PHASE3_LIGHTS = frozenset({LEADER, DONE})


@dataclass(frozen=True)
class TargetPattern:
    """Target points in their total order t_0 ... t_{n-1}.

    Points are normalized to min x = 0 and min y = 0. In the agreed frame the
    leader sits at (0, -1) and robots travel along row 0, so the pattern is
    embedded one row higher: t_j lands on ``(t_j.x, t_j.y + 1)``.
    """

    points: tuple

    def __len__(self):
        return len(self.points)

    @property
    def n(self) -> int:
        return len(self.points)

    def embedded(self, j: int) -> GridPoint:
        p = self.points[j]
        return GridPoint(p.x, p.y + 1)


def order_targets(raw: Iterable[Sequence[int]]) -> TargetPattern:
    raw_list = [GridPoint(int(p[0]), int(p[1])) for p in raw]
    pts = set(raw_list)
    if not pts:
        raise ValueError("a pattern needs at least one point")
    if len(raw_list) != len(pts):
        raise ValueError("pattern points must be distinct")
    mx = min(p.x for p in pts)
    my = min(p.y for p in pts)
    norm = [GridPoint(p.x - mx, p.y - my) for p in pts]
    norm.sort(key=lambda p: (-p.y, -p.x))
    return TargetPattern(tuple(norm))


class Frame(NamedTuple):
    """Affine map from a robot's local frame to the agreed frame.

    ``agreed = (x + tx, sign * y + ty)``; the leader's initial spot is (0, -1).
    """

    tx: int
    ty: int
    sign: int

    def to_agreed(self, p) -> GridPoint:
        return GridPoint(p[0] + self.tx, self.sign * p[1] + self.ty)

    def local_move(self, m: Move) -> Move:
        if self.sign == 1 or m in (Move.LEFT, Move.RIGHT, Move.NULL):
            return m
        return Move.DOWN if m is Move.UP else Move.UP


class View:
    """Derived quantities of one snapshot, in the robot's local frame."""

    __slots__ = ("me", "pts", "col_up", "col_down", "li_x", "ri_x", "li", "ri")

    def __init__(self, s: Snapshot):
        self.me = s.self_light
        self.pts = [(p[0], p[1], l) for p, l in s.others]
        up = down = None
        li_x = ri_x = None
        for x, y, l in self.pts:
            if x == 0:
                if y > 0 and (up is None or y < up[0]):
                    up = (y, l)
                elif y < 0 and (down is None or y > down[0]):
                    down = (y, l)
            elif x < 0:
                if li_x is None or x > li_x:
                    li_x = x
            elif ri_x is None or x < ri_x:
                ri_x = x
        self.col_up = up
        self.col_down = down
        self.li_x = li_x
        self.ri_x = ri_x
        self.li = [(y, l) for x, y, l in self.pts if x == li_x] if li_x is not None else []
        self.ri = [(y, l) for x, y, l in self.pts if x == ri_x] if ri_x is not None else []

    # own vertical line
    def column(self):
        return [c for c in (self.col_up, self.col_down) if c is not None]

    @property
    def terminal(self) -> bool:
        return self.col_up is None or self.col_down is None

    @property
    def singleton(self) -> bool:
        return self.col_up is None and self.col_down is None

    # half planes, "other robots" only
    @property
    def left_open(self) -> bool:
        return self.li_x is not None

    @property
    def left_closed(self) -> bool:
        return self.li_x is not None or not self.singleton

    @property
    def upper_closed(self) -> bool:
        return any(y >= 0 for _, y, _ in self.pts)

    @property
    def lower_closed(self) -> bool:
        return any(y <= 0 for _, y, _ in self.pts)


def _wait(light: Light) -> Action:
    return Action(light, Move.NULL)


def _side_of_self(y2: int) -> Side:
    # self sits at row 0 of its own frame
    if -y2 > 0:
        return Side.ABOVE
    if -y2 < 0:
        return Side.BELOW
    return Side.NONE


def _away_from(y: int) -> Move:
    return Move.DOWN if y > 0 else Move.UP


def _ri_symmetric(v: View, y2: int) -> bool:
    up, down = lambda_from_rows((y for y, _ in v.ri), HorizontalAxis(y2))
    return up == down


def _in_dominant_half(v: View, y2: int) -> bool:
    side = dominant_from_rows((y for y, _ in v.ri), HorizontalAxis(y2))
    return side is not Side.NONE and side is _side_of_self(y2)


def _on_k_of_ri(v: View, y2: int):
    for y, l in v.ri:
        if 2 * y == y2:
            return l
    return None


def phase1_step(s: Snapshot) -> Action:
    v = View(s)
    me = v.me
    if me is OFF:
        if v.terminal and not v.left_open and not any(l is LEADER1 for _, l in v.ri):
            return Action(TERMINAL1, Move.LEFT)
        # the two terminal1 robots must be alone on L_I, i.e. they already
        # stepped off the original first line
        t1 = [y for y, l in v.li if l is TERMINAL1]
        if len(v.li) == 2 and len(t1) == 2 and t1[0] + t1[1] == 0:
            return Action(LEADER1)
        return _wait(me)

    if me is TERMINAL1:
        # a stray terminal1 that raced a leader1 into existence backs off
        if any(l is LEADER1 for _, l in s.others):
            return Action(OFF)
        column = v.column()
        partner = next((y for y, l in column if l is TERMINAL1), None)
        if partner is not None:
            y2 = partner
            on_k = _on_k_of_ri(v, y2)
            if on_k is None:
                if _ri_symmetric(v, y2):
                    return Action(SYMMETRIC)
                if _in_dominant_half(v, y2):
                    return Action(LEADER1)
            elif on_k is LEADER1:
                return Action(OFF)
            return _wait(me)
        if any(l is SYMMETRIC for _, l in column):
            return Action(SYMMETRIC)
        if any(l in (LEADER1, OFF) for _, l in column):
            return Action(OFF)
        if v.singleton and all(l is OFF for _, l in v.ri):
            return Action(LEADER1)
        return _wait(me)

    if me is SYMMETRIC:
        partner = next((y for y, l in v.column() if l in (SYMMETRIC, DECIDER)), None)
        if partner is not None:
            if v.upper_closed and v.lower_closed:
                return Action(SYMMETRIC, _away_from(partner))
            return Action(DECIDER)
    return _wait(me)


def _closest_to_k(v: View, y2: int) -> bool:
    mine = abs(y2)
    return not any(abs(2 * y - y2) < mine for y, _ in v.column())


def _nearest_on_side(v: View, y2: int) -> bool:
    """No robot of my column lies between me and K, nor on K itself.

    Only this robot can see whether K meets its column, so it stands for
    the column instead of the terminal one, which may be screened off.
    """
    toward = v.col_down if y2 < 0 else v.col_up
    if toward is None:
        return True
    # the neighbour must sit beyond K, on the far side from me
    d = 2 * toward[0] - y2
    return d < 0 if y2 < 0 else d > 0


def phase2_step(s: Snapshot) -> Action:
    v = View(s)
    me = v.me
    if me is DECIDER:
        # L_I covers the partner that turned leader1 and already stepped left
        if any(l is LEADER1 for _, l in v.ri + v.li + v.column()):
            return Action(OFF)
        partner = next((y for y, l in v.column() if l is DECIDER), None)
        if partner is not None and _on_k_of_ri(v, partner) is None:
            if _ri_symmetric(v, partner):
                if all(l is CALL for _, l in v.ri):
                    return Action(DECIDER, Move.RIGHT)
            elif _in_dominant_half(v, partner):
                return Action(LEADER1)
        elif any(l is DECIDER for _, l in v.ri):
            return Action(DECIDER, Move.RIGHT)
        elif any(l is CALL for _, l in v.column()) and not any(l is DECIDER for _, l in v.li):
            if all(l is CALL for _, l in v.ri):
                return Action(DECIDER, Move.RIGHT)
        return _wait(me)

    if me is OFF:
        deciders = [y for y, l in v.li if l is DECIDER]
        if len(deciders) == 2:
            y2 = deciders[0] + deciders[1]
            if y2 == 0:
                return Action(LEADER1)
            if _ri_symmetric(v, y2):
                if _closest_to_k(v, y2) or any(l is CALL for _, l in v.column()):
                    return Action(CALL)
            elif _in_dominant_half(v, y2) and _nearest_on_side(v, y2):
                return Action(LEADER1)
        return _wait(me)

    if me is CALL:
        if any(l is LEADER1 for _, l in v.ri) or any(l is LEADER1 for _, l in v.li):
            return Action(OFF)
        return _wait(me)

    if me is LEADER1:
        if all(l is OFF for _, l in v.li) and all(l is OFF for _, l in v.ri):
            if not v.upper_closed or not v.lower_closed:
                if v.left_closed:
                    return Action(LEADER1, Move.LEFT)
                return Action(LEADER)
            if not v.terminal:
                return Action(LEADER1, Move.LEFT)
            column = v.column()
            if column:
                return Action(LEADER1, _away_from(column[0][0]))
            return Action(LEADER1, Move.UP)
        if any(l is LEADER1 for _, l in v.li):
            return Action(OFF)
    return _wait(me)


def agreed_frame(s: Snapshot, targets: TargetPattern | None = None) -> Frame | None:
    """The agreed coordinate frame as seen from this robot, if derivable.

    Non-leaders anchor on the visible leader. The leader anchors on itself
    while off robots remain, and on the lowest visible done robots after.
    """
    others = list(s.others)
    if s.self_light is LEADER:
        if targets is not None and not any(l is OFF for _, l in others):
            done = [p for p, l in others if l is DONE]
            if not done or targets.n < 2:
                return None
            # all done robots sit on the agreed positive side, or on the
            # leader's own row once it steps into its target
            sign = -1 if any(p[1] < 0 for p in done) else 1
            low = min(sign * p[1] for p in done)
            anchor = min((p for p in done if sign * p[1] == low), key=lambda p: p[0])
            placed = [targets.embedded(j) for j in range(targets.n - 1)]
            ay = min(p.y for p in placed)
            ax = min(p.x for p in placed if p.y == ay)
            return Frame(ax - anchor[0], ay - sign * anchor[1], sign)
        sign = _side_sign(others)
        return Frame(0, -1, sign)
    leader = next((p for p, l in others if l is LEADER), None)
    if leader is None:
        return None
    lx, ly = leader
    if ly != 0:
        sign = 1 if ly < 0 else -1
    else:
        sign = _side_sign(others)
    return Frame(-lx, -1 - sign * ly, sign)


def _side_sign(others) -> int:
    # every robot off the leader's row lies on the agreed positive side
    if any(p[1] > 0 for p, l in others if l is not LEADER):
        return 1
    if any(p[1] < 0 for p, l in others if l is not LEADER):
        return -1
    return 1


def _toward(cur: int, goal: int, neg: Move, pos: Move) -> Move:
    return pos if goal > cur else neg


def line_move(j: int, me: GridPoint) -> Move:
    """Agreed-frame step of LineMove(j) for a robot at ``me``."""
    if me.y == 0:
        if me.x == j:
            return Move.DOWN
        return _toward(me.x, j, Move.LEFT, Move.RIGHT)
    return _toward(me.y, 0, Move.DOWN, Move.UP)


def target_move(target: GridPoint, me: GridPoint) -> Move:
    """Agreed-frame step of TargetMove toward an embedded target."""
    row = target.y - 1
    if me.y == row:
        if me.x == target.x:
            return Move.UP
        return _toward(me.x, target.x, Move.LEFT, Move.RIGHT)
    return _toward(me.y, row, Move.DOWN, Move.UP)


def phase3_step(s: Snapshot, targets: TargetPattern) -> Action:
    me_light = s.self_light
    n = targets.n
    if me_light is DONE:
        return _wait(DONE)
    if me_light is LEADER:
        if n == 1:
            return Action(DONE)
        if any(l is OFF for _, l in s.others):
            return _wait(LEADER)
        f = agreed_frame(s, targets)
        if f is None:
            return _wait(LEADER)
        me = f.to_agreed((0, 0))
        goal = targets.embedded(n - 1)
        if me == goal:
            return Action(DONE)
        return Action(LEADER, f.local_move(target_move(goal, me)))
    if me_light is not OFF:
        return _wait(me_light)

    f = agreed_frame(s, targets)
    if f is None:
        return _wait(OFF)
    me = f.to_agreed((0, 0))
    pts = [(f.to_agreed(p), l) for p, l in s.others]

    def go(step: Move) -> Action:
        return Action(OFF, f.local_move(step))

    def reach(j: int) -> Action:
        goal = targets.embedded(j)
        if me == goal:
            return Action(DONE)
        return go(target_move(goal, me))

    if me.y > -1:
        leftmost = not any(p.y == me.y and p.x < me.x for p, _ in pts)
        strip_empty = not any(-1 < p.y < me.y for p, _ in pts)
        if leftmost and strip_empty:
            row = sorted(p.x for p, l in pts if p.y == -1 and l is not LEADER)
            i = len(row)
            if i == 0:
                if any(l is DONE for _, l in pts):
                    return reach(n - 2)
                if n == 2:
                    return reach(0)
                return go(line_move(1, me))
            if row == list(range(1, i + 1)):
                return go(line_move(i + 1, me))
            if row == list(range(n - i, n)):
                return reach(n - i - 2)
        return _wait(OFF)

    if me.y == -1 and not any(p.y > -1 and l is OFF for p, l in pts):
        return go(Move.UP)
    return _wait(OFF)


def select_phase(s: Snapshot) -> int:
    """Which of the three procedures drives this robot now (1, 2 or 3)."""
    me = s.self_light
    if me in PHASE3_LIGHTS:
        return 3
    if me in PHASE1_LIGHTS:
        return 1
    if me in PHASE2_LIGHTS:
        return 2
    seen = {l for _, l in s.others}
    if seen & PHASE3_LIGHTS:
        return 3
    if seen & PHASE2_LIGHTS:
        return 2
    return 1


@lru_cache(maxsize=1 << 16)
def compute(s: Snapshot, targets: TargetPattern) -> Action:
    phase = select_phase(s)
    if phase == 3:
        return phase3_step(s, targets)
    if phase == 2:
        return phase2_step(s)
    return phase1_step(s)


# lights whose action never depends on the snapshot
compute.passive_lights = frozenset({DONE})
