import pytest
from hypothesis import given, settings, strategies as st

from apfgrid.campaign import generate
from apfgrid.controller import order_targets
from apfgrid.engine import (
    LOOK,
    MOVE,
    FSync,
    ForcedPolicy,
    LaggardAsync,
    RandomAsync,
    RunStats,
    UnsolvableInstanceError,
    World,
    check_move_bound,
    make_policy,
    run,
)
from apfgrid.model import Action, Configuration, Light, Move, pattern_formed
from apfgrid.monitors import scan

POLICIES = ["random", "fsync", "ssync", "laggard"]


def world_of(points, pattern=None):
    c = Configuration.from_points(points)
    return World(c, order_targets(pattern or points))


def test_enabled_events_all_idle():
    w = world_of([(0, 0), (2, 1), (4, 3)])
    assert w.enabled_events() == [(0, LOOK), (1, LOOK), (2, LOOK)]


def test_enabled_events_with_pending_moves():
    w = world_of([(0, 0), (2, 1), (4, 3)])
    w.pending[1] = Move.LEFT
    assert sorted(w.enabled_events()) == [(0, LOOK), (1, MOVE), (2, LOOK)]
    w.pending = [Move.UP] * 3
    assert all(kind == MOVE for _, kind in w.enabled_events())


def test_fsync_round_is_all_looks_then_all_moves():
    inst, pat = generate(5, 10, 3)
    out = run(Configuration.from_points(inst), order_targets(pat), FSync())
    assert out.ok
    first = out.trace[:5]
    assert [r.kind for r in first] == [LOOK] * 5
    assert sorted(r.robot for r in first) == [0, 1, 2, 3, 4]
    # the round's moves come next, then the following round opens with looks
    rest = [r.kind for r in out.trace[5:]]
    movers = rest.index(LOOK)
    assert movers >= 1 and rest[:movers] == [MOVE] * movers


def test_random_async_is_reproducible():
    inst, pat = generate(6, 12, 5)
    a = run(Configuration.from_points(inst), order_targets(pat), RandomAsync(42))
    b = run(Configuration.from_points(inst), order_targets(pat), RandomAsync(42))
    assert a.trace == b.trace


def _row_watcher(s, targets):
    """Step up if the other robot shares my row, down otherwise; then wait."""
    if s.self_light is not Light.OFF:
        return Action(s.self_light)
    same_row = any(dy == 0 for (_, dy), _ in s.others)
    return Action(Light.DECIDER, Move.UP if same_row else Move.DOWN)


def test_laggard_executes_stale_move():
    stale_runs = 0
    for seed in range(20):
        out = run(Configuration.from_points([(0, 0), (5, 0)]), order_targets([(0, 0), (1, 0)]),
                  LaggardAsync(seed, delay=8), controller=_row_watcher, record_looks=True)
        assert out.kind == "Deadlock"  # the toy controller never finishes
        look = next(a for rid, _, a in out.looks if rid == 0)
        i_look = next(i for i, r in enumerate(out.trace) if r.robot == 0 and r.kind == LOOK)
        i_move = next(i for i, r in enumerate(out.trace) if r.robot == 0 and r.kind == MOVE)
        move = out.trace[i_move]
        assert (move.pos_after.y - move.pos_before.y) == look.move.delta[1]
        other_moved = any(r.robot == 1 and r.kind == MOVE for r in out.trace[i_look:i_move])
        if other_moved:
            # the world changed under robot 0, yet it used the old view
            assert look.move is Move.UP
            stale_runs += 1
    assert stale_runs > 0


def test_single_robot_regression():
    out = run(Configuration.from_points([(7, 3)]), order_targets([(0, 0)]), RandomAsync(0))
    assert out.kind == "Success"
    assert out.stats.total_moves == 1
    assert [(r.kind, r.light_after.value) for r in out.trace] == [
        (LOOK, "terminal1"), (MOVE, "terminal1"), (LOOK, "leader1"), (LOOK, "leader"), (LOOK, "done")]
    assert out.final.robots[0].pos == (6, 3)


def test_symmetric_instance_rejected():
    with pytest.raises(UnsolvableInstanceError):
        run(Configuration.from_points([(0, 0), (0, 2), (3, 0), (3, 2)]),
            order_targets([(0, 0), (1, 0), (2, 0), (3, 0)]), RandomAsync(0))


def test_size_mismatch_rejected():
    with pytest.raises(ValueError):
        run(Configuration.from_points([(0, 0), (1, 2)]), order_targets([(0, 0)]), RandomAsync(0))


def test_three_robot_final_set_is_policy_independent():
    initial = Configuration.from_points([(0, 0), (1, 2), (2, 1)])
    targets = order_targets([(0, 0), (1, 0), (2, 2)])
    finals = set()
    for pol in POLICIES:
        for seed in range(100):
            out = run(initial, targets, make_policy(pol, seed), record_trace=False)
            assert out.kind == "Success"
            finals.add(frozenset(out.final.positions))
    assert finals == {frozenset({(-1, 2), (0, 2), (1, 4)})}


def test_check_move_bound():
    st_ = RunStats(k=1, total_moves=1, m_ser=0, n_ser=0, M_ser=0, N_ser=0)
    assert st_.D == 1
    assert check_move_bound(st_, 10)
    assert not check_move_bound(st_, 0)


def _gaps_ok(trace, k, window):
    last = {i: -1 for i in range(k)}
    for r in trace:
        if r.seq - last[r.robot] > window:
            return False
        last[r.robot] = r.seq
    end = len(trace)
    return all(end - 1 - s < window for s in last.values())


@settings(max_examples=25)
@given(st.integers(2, 8), st.integers(0, 10_000), st.sampled_from(POLICIES), st.integers(2, 16))
def test_fairness_window(k, seed, policy, bound):
    inst, pat = generate(k, 2 * k, seed)
    out = run(Configuration.from_points(inst), order_targets(pat), make_policy(policy, seed), fairness=bound)
    assert out.ok
    assert _gaps_ok(out.trace, k, bound * k)


@settings(max_examples=25)
@given(st.integers(1, 8), st.integers(0, 10_000), st.sampled_from(POLICIES))
def test_each_event_changes_at_most_one_robot_by_one_step(k, seed, policy):
    inst, pat = generate(k, 2 * k, seed)
    out = run(Configuration.from_points(inst), order_targets(pat), make_policy(policy, seed))
    assert out.ok and pattern_formed(out.final, pat)
    for r in out.trace:
        step = abs(r.pos_after.x - r.pos_before.x) + abs(r.pos_after.y - r.pos_before.y)
        if r.kind == LOOK:
            assert step == 0
        else:
            assert step == 1 and r.light_before is r.light_after


@settings(max_examples=25)
@given(st.integers(1, 8), st.integers(0, 10_000))
def test_move_follows_its_own_look(k, seed):
    inst, pat = generate(k, 2 * k, seed)
    out = run(Configuration.from_points(inst), order_targets(pat), LaggardAsync(seed), record_looks=True)
    looks = iter(out.looks)
    pending = {}
    for r in out.trace:
        if r.kind == LOOK:
            rid, _, action = next(looks)
            assert rid == r.robot and r.robot not in pending
            if action.move is not Move.NULL:
                pending[r.robot] = action
        else:
            action = pending.pop(r.robot)
            assert r.pos_after.x - r.pos_before.x == action.move.delta[0]


@pytest.mark.parametrize("policy", ["fsync", "ssync"])
def test_synchronous_traces_are_asynchronous_schedules(policy):
    for seed in range(5):
        inst, pat = generate(6, 12, seed)
        initial, targets = Configuration.from_points(inst), order_targets(pat)
        out = run(initial, targets, make_policy(policy, seed))
        replay = run(initial, targets, ForcedPolicy([(r.robot, r.kind) for r in out.trace]), fairness=None)
        assert replay.kind == out.kind == "Success"
        assert replay.trace == out.trace


def test_fsync_from_all_off_reaches_one_leader1():
    for seed in range(30):
        inst, pat = generate(7, 14, seed)
        initial = Configuration.from_points(inst)
        out = run(initial, order_targets(pat), FSync())
        rep = scan(initial, out.trace)
        assert rep.election_seq is not None and rep.milestones_ok


def _crasher(s, targets):
    """Every robot steps right; a robot with a right neighbour one step away collides."""
    if s.self_light is Light.OFF:
        return Action(Light.DECIDER, Move.RIGHT)
    return Action(s.self_light)


def test_collision_detected():
    out = run(Configuration.from_points([(0, 0), (1, 0)]), order_targets([(0, 0), (1, 0)]),
              ForcedPolicy([(0, LOOK), (0, MOVE)]), controller=_crasher, fairness=None)
    assert out.kind == "Collision"
    assert (out.error.mover, out.error.occupant) == (0, 1)


def test_timeout():
    inst, pat = generate(6, 12, 0)
    out = run(Configuration.from_points(inst), order_targets(pat), RandomAsync(0), max_events=10)
    assert out.kind == "Timeout" and out.stats.events == 10


def test_forced_policy_exhausts():
    inst, pat = generate(4, 8, 0)
    out = run(Configuration.from_points(inst), order_targets(pat), ForcedPolicy([]), fairness=None)
    assert out.kind == "Exhausted"
