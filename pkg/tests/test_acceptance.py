"""Acceptance criteria, each reported as one PASS/FAIL line in the terminal summary."""

import itertools
import random
import time
from collections import Counter

import pytest

from apfgrid.campaign import campaign_instances, oracle_campaign, random_solvable, safety_campaign
from apfgrid.controller import order_targets
from apfgrid.engine import ForcedPolicy, RandomAsync, UnsolvableInstanceError, make_policy, run
from apfgrid.fileio import parse_trace, trace_lines
from apfgrid.model import Configuration, is_solvable
from apfgrid.oracle import COLLISION, DEADLOCK, DEPTH_EXCEEDED, explore_all_schedules

pytestmark = pytest.mark.slow

SEEDS = range(10)


@pytest.fixture(scope="module")
def campaign():
    t = time.time()
    recs = list(safety_campaign(campaign_instances(1000, 2024), SEEDS))
    return recs, time.time() - t


def test_c1_safety_campaign(campaign, verdict):
    recs, secs = campaign
    outcomes = Counter(r.outcome for r in recs)
    unformed = sum(r.outcome == "Success" and not r.formed for r in recs)
    ok = set(outcomes) == {"Success"} and unformed == 0 and len(recs) == 40_000
    verdict("C1 safety campaign", ok, f"{len(recs)} runs, {dict(outcomes)}, {unformed} unformed, {secs:.0f}s")
    assert ok


def test_c2_move_bound(campaign, verdict):
    recs, _ = campaign
    over = [r for r in recs if r.outcome == "Success" and not r.bound_ok]
    worst = max(r.ratio for r in recs)
    ok = not over
    verdict("C2 moves <= 10 k D", ok, f"max moves/(kD) = {worst:.3f}, {len(over)} over")
    assert ok


def test_c3_phase_milestones(campaign, verdict):
    recs, _ = campaign
    missed = sum(not r.milestones_ok for r in recs)
    verdict("C3 election then leader configuration", missed == 0, f"{missed} runs missed a milestone")
    assert missed == 0


def test_c4_decider_promotion(campaign, verdict):
    recs, _ = campaign
    bad = sum(r.decider_violations for r in recs)
    seen = sum(r.decider_promotions for r in recs)
    verdict("C4 decider promotion with empty left half", bad == 0, f"{seen} promotions, {bad} violations")
    assert bad == 0


def test_c5_leader1_pairs(campaign, verdict):
    recs, _ = campaign
    bad = sum(r.leader1_violations for r in recs)
    seen = sum(r.leader1_pairs for r in recs)
    verdict("C5 simultaneous leader1 pairs", bad == 0, f"{seen} pairs, {bad} violations")
    assert bad == 0


def test_c6_oracle_equivalence(verdict):
    t = time.time()
    div = oracle_campaign(10_000, 6)
    secs = time.time() - t
    ok = div is None and secs < 60
    verdict("C6 oracle equivalence", ok, f"divergence={div}, {secs:.1f}s")
    assert ok


def _shapes(k, w):
    cells = [(x, y) for x in range(w) for y in range(w)]
    return [c for c in itertools.combinations(cells, k)
            if min(x for x, _ in c) == 0 and min(y for _, y in c) == 0]


def test_c7_exhaustive_exploration(verdict):
    outcomes, runs, stuck = Counter(), 0, 0
    for k in (2, 3):
        instances = [c for c in _shapes(k, 4) if is_solvable(c)]
        for pts, pat in itertools.product(instances, _shapes(k, 3)):
            initial, targets = Configuration.from_points(pts), order_targets(pat)
            res = explore_all_schedules(initial, targets, depth_limit=100_000)
            runs += 1
            outcomes.update(res.outcomes)
            for path in res.frontier:
                out = run(initial, targets, ForcedPolicy(path, then=RandomAsync(0)), fairness=None)
                stuck += not out.ok
    leaves = sum(outcomes.values())
    cut = outcomes.get(DEPTH_EXCEEDED, 0)
    ok = (outcomes.get(COLLISION, 0) == outcomes.get(DEADLOCK, 0) == 0
          and cut < 0.001 * leaves and stuck == 0)
    verdict("C7 exhaustive exploration k <= 3", ok, f"{runs} instances, {dict(outcomes)}, {stuck} cut paths stuck")
    assert ok


def _flip(config: Configuration) -> Configuration:
    return Configuration.from_points([(p.x, -p.y) for p in config.positions],
                                     chirality=[-r.chirality for r in config.robots],
                                     ids=[r.id for r in config.robots])


def test_c8_replay_and_frame_invariance(verdict):
    rng = random.Random(8)
    replay_bad = flip_bad = 0
    for n in range(100):
        k = rng.randint(2, 12)
        spread = rng.randint(k, 20)
        pts, pat = random_solvable(k, spread, rng), random_solvable(k, spread, rng)
        initial = Configuration.from_points(pts, chirality=[rng.choice((-1, 1)) for _ in pts])
        targets = order_targets(pat)
        out = run(initial, targets, make_policy(rng.choice(("random", "laggard", "ssync")), n))
        tf = parse_trace(trace_lines(initial, pat, out.trace, out.kind))

        again = run(tf.initial, order_targets(tf.targets), ForcedPolicy(tf.events()), fairness=None)
        replay_bad += again.final != out.final or again.trace != out.trace

        a = run(initial, targets, ForcedPolicy(tf.events()), fairness=None, record_looks=True)
        b = run(_flip(initial), targets, ForcedPolicy(tf.events()), fairness=None, record_looks=True)
        flip_bad += [(r, act) for r, _, act in a.looks] != [(r, act) for r, _, act in b.looks]
    ok = replay_bad == flip_bad == 0
    verdict("C8 replay and mirrored frame", ok, f"100 runs, {replay_bad} replay and {flip_bad} mirror mismatches")
    assert ok


def _mirror_symmetric(cells):
    """(symmetric, robot on axis) for a horizontal mirror axis, if any."""
    s = set(cells)
    for y2 in range(-8, 9):
        if {(x, y2 - y) for x, y in cells} == s:
            return True, any(2 * y == y2 for _, y in cells)
    return False, False


def test_c9_unsolvability_gate(verdict):
    cells = [(x, y) for x in range(5) for y in range(5)]
    rejected = accepted = wrong = unsafe = 0
    rng = random.Random(9)
    for pts in itertools.combinations(cells, 4):
        sym, on_axis = _mirror_symmetric(pts)
        if not sym:
            continue
        initial = Configuration.from_points(pts)
        pat = random_solvable(4, 5, rng)
        targets = order_targets(pat)
        if not on_axis:
            try:
                run(initial, targets, RandomAsync(0))
            except UnsolvableInstanceError:
                rejected += 1
            else:
                wrong += 1
            continue
        if not is_solvable(pts):
            wrong += 1
            continue
        accepted += 1
        for rec in safety_campaign([(list(pts), pat)], SEEDS):
            unsafe += not (rec.outcome == "Success" and rec.formed and rec.bound_ok
                           and rec.milestones_ok and rec.decider_violations == rec.leader1_violations == 0)
    ok = wrong == unsafe == 0 and rejected > 0 and accepted > 0
    verdict("C9 symmetric 4-robot gate", ok,
            f"{rejected} empty-axis rejected, {accepted} on-axis accepted, {wrong} misjudged, {unsafe} bad runs")
    assert ok
