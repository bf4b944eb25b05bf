"""Trace scanners that check the leader-election milestones of a run.

A :class:`TraceMonitor` rebuilds the configuration from the initial robots
and the event records alone, so it can audit a trace file as well as a live
run (pass ``monitor.feed`` wrapped as the engine's ``on_event``).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .engine import LOOK, MOVE, TraceRecord
from .model import Configuration, Light, Robot, is_leader_configuration, is_stable_configuration

OFF, DECIDER, LEADER1, LEADER = Light.OFF, Light.DECIDER, Light.LEADER1, Light.LEADER


@dataclass
class MonitorReport:
    # seq of the first event after which the milestone held, or None
    election_seq: int | None = None
    leader_seq: int | None = None
    decider_promotions: int = 0
    decider_violations: list = field(default_factory=list)
    double_leader1: int = 0
    double_leader1_violations: list = field(default_factory=list)

    @property
    def milestones_ok(self) -> bool:
        return (self.election_seq is not None and self.leader_seq is not None
                and self.election_seq <= self.leader_seq)

    @property
    def clean(self) -> bool:
        return not self.decider_violations and not self.double_leader1_violations


class TraceMonitor:
    def __init__(self, initial: Configuration):
        self.ids = [r.id for r in initial.robots]
        self.chir = {r.id: r.chirality for r in initial.robots}
        self.pos = {r.id: r.pos for r in initial.robots}
        self.light = {r.id: r.light for r in initial.robots}
        self.counts = Counter(self.light.values())
        self.k = len(self.ids)
        self.report = MonitorReport()
        self._pair = None      # (left id, right id) while two leader1 lights coexist
        self._moved: set = set()
        self._pair_bad = False

    def config(self) -> Configuration:
        return Configuration(tuple(Robot(r, self.pos[r], self.light[r], self.chir[r]) for r in self.ids))

    def on_event(self, world, rec: TraceRecord) -> None:
        self.feed(rec)

    def feed(self, rec: TraceRecord) -> None:
        rid = rec.robot
        if rec.kind == LOOK:
            if rec.light_before is DECIDER and rec.light_after is LEADER1:
                self._check_decider(rid, rec)
            if rec.light_before is not rec.light_after:
                self.counts[rec.light_before] -= 1
                self.counts[rec.light_after] += 1
                self.light[rid] = rec.light_after
        elif rec.kind == MOVE:
            self.pos[rid] = rec.pos_after
            self._moved.add(rid)
        self._check_pairs(rec)
        self._check_milestones(rec.seq)

    def _check_decider(self, rid, rec) -> None:
        self.report.decider_promotions += 1
        # the partner decider shares the column and does not count
        x = self.pos[rid].x
        blockers = [r for r in self.ids if r != rid and (
            self.pos[r].x < x or (self.pos[r].x == x and self.light[r] is not DECIDER))]
        if blockers:
            self.report.decider_violations.append((rec.seq, rid, blockers))

    def _check_pairs(self, rec: TraceRecord) -> None:
        holders = [r for r in self.ids if self.light[r] is LEADER1] if self.counts[LEADER1] >= 2 or self._pair else []
        rep = self.report
        if self._pair is None:
            if len(holders) >= 2:
                rep.double_leader1 += 1
                self._moved = set()
                self._pair_bad = False
                self._pair = tuple(sorted(holders, key=lambda r: self.pos[r].x))
                self._check_columns(rec.seq)
            return
        left, right = self._pair[0], self._pair[-1]
        if len(holders) >= 2:
            self._check_columns(rec.seq)
            return
        # the interval just closed: the right one must have turned off in place
        if not (rec.kind == LOOK and rec.robot == right and rec.light_after is OFF
                and right not in self._moved and len(self._pair) == 2):
            rep.double_leader1_violations.append((rec.seq, "interval not closed by the right robot turning off"))
        self._pair = None

    def _check_columns(self, seq: int) -> None:
        if self._pair_bad:
            return
        holders = [r for r in self.ids if self.light[r] is LEADER1]
        xs = sorted(self.pos[r].x for r in holders)
        bad = len(holders) != 2 or xs[0] == xs[1] or any(
            xs[0] < self.pos[r].x < xs[1] for r in self.ids)
        if bad:
            self._pair_bad = True
            self.report.double_leader1_violations.append((seq, "leader1 robots not on consecutive occupied columns"))

    def _check_milestones(self, seq: int) -> None:
        rep = self.report
        c = self.counts
        if rep.election_seq is None:
            if c[LEADER1] == 1 or (c[DECIDER] == 2 and c[OFF] == self.k - 2
                                   and is_stable_configuration(self.config())):
                rep.election_seq = seq
        elif rep.leader_seq is None:
            if c[LEADER] == 1 and c[OFF] == self.k - 1 and is_leader_configuration(self.config()):
                rep.leader_seq = seq


def scan(initial: Configuration, records) -> MonitorReport:
    mon = TraceMonitor(initial)
    for rec in records:
        mon.feed(rec)
    return mon.report
