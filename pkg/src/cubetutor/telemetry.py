"""Session event log: event records, log file I/O, validation, features.

One event per line, tab-separated, fixed column order (ts, student_id,
kind, task_kind, task_id, move, context), empty fields written as "-".
The column order is load-bearing; report goldens diff on it.

Aggregation folds a student's events into the eight-feature vector used
by the analytics pipeline.  cube_resets counts resets in every context;
the challenge-only reading stays available via reset_breakdown.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

EVENT_KINDS = (
    "session_start",
    "task_start",
    "task_complete",
    "cube_move",
    "cube_reset",
    "hint_request",
    "walkthrough_step",
    "session_end",
)

TASK_KINDS = ("practice", "challenge")

CONTEXTS = ("practice", "challenge", "free")

FEATURE_NAMES = (
    "practice_tasks",
    "challenge_started",
    "challenge_completed",
    "cube_resets",
    "cube_moves",
    "pct_non_ai_moves",
    "pct_practice_moves",
    "pct_challenge_moves",
)

_EMPTY = "-"


@dataclass(frozen=True)
class SessionEvent:
    student_id: str
    timestamp: int
    kind: str
    task_kind: str | None = None
    task_id: str | None = None
    move: str | None = None
    context: str = "free"

    def __post_init__(self) -> None:
        if self.kind not in EVENT_KINDS:
            raise ValueError(f"unknown event kind: {self.kind!r}")
        if self.context not in CONTEXTS:
            raise ValueError(f"unknown context: {self.context!r}")
        if self.kind == "cube_move" and not self.move:
            raise ValueError("cube_move event requires a move token")
        if self.kind in ("task_start", "task_complete"):
            if self.task_kind is None or self.task_id is None:
                raise ValueError(f"{self.kind} event requires task_kind and task_id")
        if self.task_kind is not None and self.task_kind not in TASK_KINDS:
            raise ValueError(f"unknown task kind: {self.task_kind!r}")
        for field in (self.student_id, self.task_kind, self.task_id, self.move):
            if field is not None and (not field or "\t" in field or "\n" in field):
                raise ValueError(f"malformed field value: {field!r}")


@dataclass(frozen=True)
class FeatureVector:
    practice_tasks: int
    challenge_started: int
    challenge_completed: int
    cube_resets: int
    cube_moves: int
    pct_non_ai_moves: float
    pct_practice_moves: float
    pct_challenge_moves: float

    def as_tuple(self) -> tuple[float, ...]:
        return (
            float(self.practice_tasks),
            float(self.challenge_started),
            float(self.challenge_completed),
            float(self.cube_resets),
            float(self.cube_moves),
            self.pct_non_ai_moves,
            self.pct_practice_moves,
            self.pct_challenge_moves,
        )


def format_event(event: SessionEvent) -> str:
    fields = (
        str(event.timestamp),
        event.student_id,
        event.kind,
        event.task_kind or _EMPTY,
        event.task_id or _EMPTY,
        event.move or _EMPTY,
        event.context,
    )
    return "\t".join(fields)


def parse_event(line: str) -> SessionEvent:
    fields = line.rstrip("\n").split("\t")
    if len(fields) != 7:
        raise ValueError(f"event line has {len(fields)} fields, expected 7: {line!r}")
    ts, student_id, kind, task_kind, task_id, move, context = fields
    return SessionEvent(
        student_id=student_id,
        timestamp=int(ts),
        kind=kind,
        task_kind=None if task_kind == _EMPTY else task_kind,
        task_id=None if task_id == _EMPTY else task_id,
        move=None if move == _EMPTY else move,
        context=context,
    )


def write_log(events: Iterable[SessionEvent], path: str | Path) -> None:
    text = "".join(format_event(e) + "\n" for e in events)
    Path(path).write_text(text, encoding="utf-8")


def append_event(path: str | Path, event: SessionEvent) -> None:
    with open(path, "a", encoding="utf-8") as handle:
        handle.write(format_event(event) + "\n")


def read_log(path: str | Path) -> list[SessionEvent]:
    events = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip():
            events.append(parse_event(line))
    return events


def validate_log(events: Sequence[SessionEvent]) -> list[str]:
    """Findings for out-of-order clocks, orphan completions, early moves."""
    violations = []
    last_ts: dict[str, int] = {}
    started: dict[str, bool] = {}
    open_tasks: dict[str, set[tuple[str, str]]] = {}
    for event in events:
        sid = event.student_id
        if sid in last_ts and event.timestamp < last_ts[sid]:
            violations.append(
                f"{sid}: timestamp {event.timestamp} after {last_ts[sid]} is not monotone")
        last_ts[sid] = max(event.timestamp, last_ts.get(sid, event.timestamp))
        if event.kind == "session_start":
            started[sid] = True
        elif event.kind == "cube_move" and not started.get(sid):
            violations.append(f"{sid}: cube_move before session_start")
        elif event.kind == "task_start":
            open_tasks.setdefault(sid, set()).add((event.task_kind, event.task_id))
        elif event.kind == "task_complete":
            key = (event.task_kind, event.task_id)
            if key in open_tasks.get(sid, set()):
                open_tasks[sid].discard(key)
            else:
                violations.append(
                    f"{sid}: task_complete for {event.task_kind} {event.task_id} "
                    "without matching task_start")
    return violations


def _aggregate_student(events: Iterable[SessionEvent]) -> FeatureVector:
    practice_tasks = 0
    challenge_started = 0
    challenge_completed = 0
    cube_resets = 0
    moves_by_context = {context: 0 for context in CONTEXTS}
    for event in events:
        if event.kind == "task_start" and event.task_kind == "challenge":
            challenge_started += 1
        elif event.kind == "task_complete":
            if event.task_kind == "practice":
                practice_tasks += 1
            else:
                challenge_completed += 1
        elif event.kind == "cube_reset":
            cube_resets += 1
        elif event.kind == "cube_move":
            moves_by_context[event.context] += 1
    cube_moves = sum(moves_by_context.values())
    if cube_moves:
        pct_free = moves_by_context["free"] / cube_moves
        pct_practice = moves_by_context["practice"] / cube_moves
        pct_challenge = moves_by_context["challenge"] / cube_moves
    else:
        pct_free = pct_practice = pct_challenge = 0.0
    return FeatureVector(
        practice_tasks, challenge_started, challenge_completed,
        cube_resets, cube_moves, pct_free, pct_practice, pct_challenge)


def aggregate(events: Sequence[SessionEvent], student_id: str) -> FeatureVector:
    violations = validate_log(events)
    if violations:
        raise ValueError("log failed validation: " + "; ".join(violations))
    return _aggregate_student(e for e in events if e.student_id == student_id)


def aggregate_cohort(events: Sequence[SessionEvent]) -> dict[str, FeatureVector]:
    """Per-student feature vectors, keyed and ordered by student id."""
    violations = validate_log(events)
    if violations:
        raise ValueError("log failed validation: " + "; ".join(violations))
    by_student: dict[str, list[SessionEvent]] = {}
    for event in events:
        by_student.setdefault(event.student_id, []).append(event)
    return {sid: _aggregate_student(by_student[sid]) for sid in sorted(by_student)}


def reset_breakdown(events: Sequence[SessionEvent], student_id: str) -> Mapping[str, int]:
    """Reset counts split by context; the challenge entry is the
    narrower during-a-challenge-task reading of the reset feature."""
    counts = {context: 0 for context in CONTEXTS}
    for event in events:
        if event.student_id == student_id and event.kind == "cube_reset":
            counts[event.context] += 1
    return counts
