"""Seeded instance generation and batch runs."""

from __future__ import annotations

import random
from dataclasses import dataclass, asdict
from typing import Callable, Iterable, Iterator, Sequence

from .controller import order_targets
from .engine import check_move_bound, make_policy, run
from .geometry import visible_set
from .model import Configuration, is_solvable, pattern_formed
from .monitors import TraceMonitor

POLICY_NAMES = ("random", "fsync", "ssync", "laggard")


def random_points(k: int, spread: int, rng: random.Random) -> list[tuple[int, int]]:
    pts: set = set()
    while len(pts) < k:
        pts.add((rng.randint(0, spread), rng.randint(0, spread)))
    return sorted(pts)


def random_solvable(k: int, spread: int, rng: random.Random) -> list[tuple[int, int]]:
    """Rejection-sample ``k`` distinct points in ``[0, spread]^2`` until solvable."""
    if k < 1:
        raise ValueError("need at least one robot")
    if spread < k:
        raise ValueError(f"spread {spread} must be at least the robot count {k}")
    while True:
        pts = random_points(k, spread, rng)
        if is_solvable(pts):
            return pts


def near_symmetric(k: int, spread: int, rng: random.Random) -> list[tuple[int, int]]:
    """A solvable set that is one or two robots away from an empty-axis mirror symmetry.

    Mirror pairs about a random half-integer axis, plus extra robots placed
    at or right of the last pair's column. These drive leader election
    through its symmetric branch (decider and call robots), which uniform
    sampling almost never reaches.
    """
    if k < 3:
        return random_solvable(k, spread, rng)
    half = (k - 1) // 2
    while True:
        y2 = 2 * rng.randint(0, max(0, spread // 2 - 1)) + 1
        pairs: set = set()
        while len(pairs) < half:
            x, y = rng.randint(0, spread), rng.randint(0, spread)
            if 2 * y < y2 and y2 - y <= spread:
                pairs.add((x, y))
        pts = {p for x, y in pairs for p in ((x, y), (x, y2 - y))}
        right = max(x for x, _ in pts)
        while len(pts) < k:
            pts.add((min(spread, right + rng.randint(0, 2)), rng.randint(0, spread)))
        if is_solvable(pts):
            return sorted(pts)


def generate(k: int, spread: int, seed: int) -> tuple[list, list]:
    """A solvable instance and a pattern of the same size, both from one seed."""
    rng = random.Random(seed)
    inst = random_solvable(k, spread, rng)
    pat = random_solvable(k, spread, rng)
    return inst, pat


@dataclass
class RunRecord:
    instance: int
    k: int
    policy: str
    seed: int
    outcome: str
    total_moves: int
    events: int
    D: int
    ratio: float          # total_moves / (k * D)
    bound_ok: bool
    formed: bool
    milestones_ok: bool
    decider_promotions: int
    decider_violations: int
    leader1_pairs: int
    leader1_violations: int

    def as_row(self) -> dict:
        return asdict(self)


def run_one(instance_id: int, robots: Sequence, pattern: Sequence, policy: str, seed: int,
            chirality: Sequence[int] | None = None, bound_constant: int = 10,
            max_events: int = 1_000_000, fairness: int | None = 16, monitor: bool = True) -> RunRecord:
    initial = Configuration.from_points(robots, chirality=chirality)
    targets = order_targets(pattern)
    mon = TraceMonitor(initial) if monitor else None
    out = run(initial, targets, make_policy(policy, seed), max_events=max_events, fairness=fairness,
              record_trace=False, on_event=mon.on_event if mon else None)
    st = out.stats
    formed = out.kind == "Success" and pattern_formed(out.final, pattern)
    rep = mon.report if mon else None
    return RunRecord(
        instance=instance_id, k=st.k, policy=policy, seed=seed, outcome=out.kind,
        total_moves=st.total_moves, events=st.events, D=st.D,
        ratio=st.total_moves / (st.k * st.D),
        bound_ok=out.kind == "Success" and check_move_bound(st, bound_constant),
        formed=formed,
        milestones_ok=bool(rep and rep.milestones_ok),
        decider_promotions=rep.decider_promotions if rep else 0,
        decider_violations=len(rep.decider_violations) if rep else 0,
        leader1_pairs=rep.double_leader1 if rep else 0,
        leader1_violations=len(rep.double_leader1_violations) if rep else 0,
    )


def campaign_instances(count: int, seed: int, k_range=(2, 15), max_spread: int = 25,
                       near_symmetric_share: float = 0.5) -> list[tuple[list, list]]:
    """``count`` solvable instances with k drawn from ``k_range`` and spread from [k, max_spread].

    A share of the starting sets comes from :func:`near_symmetric`.
    """
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        k = rng.randint(*k_range)
        spread = rng.randint(k, max(k, max_spread))
        sampler = near_symmetric if rng.random() < near_symmetric_share else random_solvable
        out.append((sampler(k, spread, rng), random_solvable(k, spread, rng)))
    return out


def safety_campaign(instances: Sequence[tuple[list, list]], seeds: Iterable[int],
                    policies: Sequence[str] = POLICY_NAMES, **kw) -> Iterator[RunRecord]:
    """Every instance under every policy and seed.

    The fsync schedule does not consume randomness, so it runs once per
    instance and the record is repeated for the remaining seeds.
    """
    seeds = list(seeds)
    for idx, (robots, pattern) in enumerate(instances):
        for pol in policies:
            if pol == "fsync":
                rec = run_one(idx, robots, pattern, pol, seeds[0], **kw)
                for s in seeds:
                    yield RunRecord(**{**rec.as_row(), "seed": s})
                continue
            for s in seeds:
                yield run_one(idx, robots, pattern, pol, s, **kw)


# -- oracle equivalence -------------------------------------------------------

def random_config(rng: random.Random, max_k: int = 20, lim: int = 30) -> list[tuple[int, int]]:
    """Random distinct points in ``[-lim, lim]^2``.

    The box half-width is drawn too, so small boxes produce plenty of
    collinear triples; half of the sets are mirrored across a random
    horizontal axis to exercise the symmetric branch of solvability.
    """
    k = rng.randint(1, max_k)
    w = rng.randint(1, lim)
    cap = (2 * w + 1) ** 2
    pts: set = set()
    while len(pts) < min(k, cap):
        pts.add((rng.randint(-w, w), rng.randint(-w, w)))
    if rng.random() < 0.5:
        y2 = rng.randint(-w, w)
        mirrored = {(x, y2 - y) for x, y in pts}
        pts = {p for p in pts | mirrored if -lim <= p[1] <= lim}
        if rng.random() < 0.5:
            # dropping the axis row may empty the set; keep it in that case
            pts = {p for p in pts if 2 * p[1] != y2} or pts
    return sorted(pts)


@dataclass
class Divergence:
    check: str
    positions: list
    index: int | None
    fast: object
    brute: object


def oracle_campaign(count: int, seed: int,
                    visible: Callable = visible_set, solvable: Callable = is_solvable,
                    max_k: int = 20, lim: int = 30) -> Divergence | None:
    """Compare the fast geometry with the brute-force oracles; first divergence or None."""
    from .oracle import brute_solvability, brute_visibility

    rng = random.Random(seed)
    for _ in range(count):
        pts = random_config(rng, max_k, lim)
        for i in range(len(pts)):
            fast, slow = visible(pts, i), brute_visibility(pts, i)
            if fast != slow:
                return Divergence("visibility", pts, i, sorted(fast), sorted(slow))
        fast, slow = solvable(pts), brute_solvability(pts)
        if fast != slow:
            return Divergence("solvability", pts, None, fast, slow)
    return None
