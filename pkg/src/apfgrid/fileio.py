"""Instance, pattern and trace files.

Instances and patterns are small JSON objects. A trace is JSON Lines: an
``Init`` header holding the starting robots and the pattern, one object per
event, and an ``End`` footer with the outcome. A trace without its footer,
with a gap in ``seq`` or with an unparsable line is rejected as truncated.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .engine import LOOK, MOVE, TraceRecord
from .geometry import GridPoint
from .model import Configuration, Light


class MalformedInputError(ValueError):
    """A file does not follow its schema."""


def _points(raw, what: str) -> list[tuple[int, int]]:
    if not isinstance(raw, list):
        raise MalformedInputError(f"{what} must be a list of [x, y] pairs")
    out = []
    for p in raw:
        if (not isinstance(p, list) or len(p) != 2
                or not all(isinstance(c, int) and not isinstance(c, bool) for c in p)):
            raise MalformedInputError(f"{what}: bad point {p!r}")
        out.append((p[0], p[1]))
    if len(set(out)) != len(out):
        raise MalformedInputError(f"{what}: duplicate points")
    return out


def _load_json(path) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise MalformedInputError(f"{path}: {exc}") from exc
    if not isinstance(data, dict):
        raise MalformedInputError(f"{path}: expected a JSON object")
    return data


@dataclass(frozen=True)
class Instance:
    robots: tuple
    chirality: tuple

    def configuration(self) -> Configuration:
        return Configuration.from_points(self.robots, chirality=list(self.chirality))


def parse_instance(data: dict) -> Instance:
    robots = _points(data.get("robots"), "robots")
    if not robots:
        raise MalformedInputError("robots: need at least one robot")
    chir = data.get("chirality", [])
    if not isinstance(chir, list) or any(c not in (1, -1) or isinstance(c, bool) for c in chir):
        raise MalformedInputError("chirality must be a list of +1/-1")
    if chir and len(chir) != len(robots):
        raise MalformedInputError("chirality length must match the robot count")
    return Instance(tuple(robots), tuple(chir or [1] * len(robots)))


def parse_pattern(data: dict) -> list[tuple[int, int]]:
    targets = _points(data.get("targets"), "targets")
    if not targets:
        raise MalformedInputError("targets: need at least one point")
    return targets


def load_instance(path) -> Instance:
    return parse_instance(_load_json(path))


def load_pattern(path) -> list[tuple[int, int]]:
    return parse_pattern(_load_json(path))


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def instance_json(robots: Sequence[Sequence[int]], chirality: Sequence[int] | None = None) -> dict:
    data = {"robots": [[p[0], p[1]] for p in robots]}
    if chirality is not None:
        data["chirality"] = list(chirality)
    return data


def pattern_json(targets: Sequence[Sequence[int]]) -> dict:
    return {"targets": [[p[0], p[1]] for p in targets]}


# -- traces --------------------------------------------------------------------

def record_json(rec: TraceRecord) -> dict:
    return {
        "seq": rec.seq, "robot": rec.robot, "kind": rec.kind,
        "pos_before": list(rec.pos_before), "pos_after": list(rec.pos_after),
        "light_before": rec.light_before.value, "light_after": rec.light_after.value,
    }


def trace_lines(initial: Configuration, targets: Sequence[Sequence[int]], records: Iterable[TraceRecord],
                outcome: str, extra: dict | None = None) -> Iterable[str]:
    yield dumps({
        "kind": "Init",
        "robots": [[r.id, r.pos.x, r.pos.y, r.chirality] for r in initial.robots],
        "targets": [[p[0], p[1]] for p in targets],
    })
    n = 0
    for rec in records:
        n += 1
        yield dumps(record_json(rec))
    yield dumps({"kind": "End", "outcome": outcome, "events": n, **(extra or {})})


def write_trace(path, initial, targets, records, outcome: str, extra: dict | None = None) -> None:
    with open(path, "w") as fh:
        for line in trace_lines(initial, targets, records, outcome, extra):
            fh.write(line + "\n")


@dataclass
class TraceFile:
    initial: Configuration
    targets: list
    records: list
    outcome: str
    footer: dict

    def events(self) -> list[tuple]:
        return [(r.robot, r.kind) for r in self.records]


def _record(obj: dict) -> TraceRecord:
    try:
        kind = obj["kind"]
        if kind not in (LOOK, MOVE):
            raise MalformedInputError(f"unknown record kind {kind!r}")
        return TraceRecord(
            int(obj["seq"]), obj["robot"], kind,
            GridPoint(*obj["pos_before"]), GridPoint(*obj["pos_after"]),
            Light(obj["light_before"]), Light(obj["light_after"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedInputError(f"bad trace record {obj!r}: {exc}") from exc


def parse_trace(lines: Iterable[str]) -> TraceFile:
    objs = []
    for n, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            objs.append(json.loads(line))
        except json.JSONDecodeError as exc:
            raise MalformedInputError(f"line {n}: {exc}") from exc
    if not objs or objs[0].get("kind") != "Init":
        raise MalformedInputError("trace does not start with an Init record")
    if objs[-1].get("kind") != "End":
        raise MalformedInputError("trace is truncated: no End record")
    head, body, foot = objs[0], objs[1:-1], objs[-1]
    try:
        ids = [r[0] for r in head["robots"]]
        initial = Configuration.from_points(
            [(r[1], r[2]) for r in head["robots"]], chirality=[r[3] for r in head["robots"]], ids=ids)
        targets = _points(head["targets"], "targets")
    except (KeyError, TypeError, IndexError, ValueError) as exc:
        raise MalformedInputError(f"bad Init record: {exc}") from exc
    records = [_record(o) for o in body]
    known = set(ids)
    if any(r.robot not in known for r in records):
        raise MalformedInputError("trace mentions a robot missing from its Init record")
    if [r.seq for r in records] != list(range(len(records))):
        raise MalformedInputError("trace is truncated: seq numbers are not contiguous")
    if foot.get("events") != len(records):
        raise MalformedInputError("trace is truncated: event count does not match End record")
    return TraceFile(initial, targets, records, foot.get("outcome", ""), foot)


def read_trace(path) -> TraceFile:
    try:
        with open(path) as fh:
            return parse_trace(fh)
    except (OSError, UnicodeDecodeError) as exc:
        raise MalformedInputError(f"{path}: {exc}") from exc
