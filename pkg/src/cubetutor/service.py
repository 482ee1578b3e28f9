"""HTTP session service for live tutoring.

Each session owns an append-only event log under the data directory
(logs/{student_id}__{session_id}.log); the log is the source of truth,
and on restart session state is rebuilt by replaying it.  Task start
states come from fixed seeds, so replay re-derives them exactly.
Reads never append events; every action appends exactly one.
"""

from __future__ import annotations

import os
import re
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from fastapi import Body, FastAPI, HTTPException

from .analytics import LogValidationError, run_pipeline
from .cube import (
    SOLVED,
    CubeState,
    Metric,
    apply_move,
    parse_move,
    scramble,
    state_to_string,
)
from .guidance import (
    Walkthrough,
    hint,
    plan_walkthrough,
    scenario_catalog,
    step_forward,
    step_rewind,
)
from .patterns import MaskedPattern, matches, pattern_to_string, white_cross_pattern
from .solver import PatternDatabase, build_pdb
from .telemetry import SessionEvent, append_event, read_log

SCENARIO_SEED = 101

# (seed, scramble length): one gentle challenge, one deep one.
CHALLENGE_TASKS = {
    "c1": (31, 3),
    "c2": (32, 8),
}

_STUDENT_ID = re.compile(r"[A-Za-z0-9_\-]{1,64}")

_HIDDEN_FACES = (("down", 45), ("back", 36), ("left", 9))


def default_data_dir() -> Path:
    return Path(os.environ.get("CUBETUTOR_DATA", "cubetutor-data"))


def challenge_initial(task_id: str) -> CubeState:
    seed, length = CHALLENGE_TASKS[task_id]
    state, _ = scramble(seed, length, Metric.HTM)
    return state


def mirror_view(state: CubeState) -> dict:
    """The three faces a front-facing render hides, 27 facelets."""
    text = state_to_string(state)
    faces = {name: text[start:start + 9] for name, start in _HIDDEN_FACES}
    return {"faces": faces, "facelets": "".join(faces.values())}


def replay_events(events: list[SessionEvent]) -> tuple[CubeState, Optional[tuple[str, str]]]:
    """Fold a session log back into (cube state, active task)."""
    state = SOLVED
    active: Optional[tuple[str, str]] = None
    for event in events:
        if event.kind == "session_start":
            state, active = SOLVED, None
        elif event.kind == "task_start":
            active = (event.task_kind, event.task_id)
            state = _task_initial(event.task_kind, event.task_id)
        elif event.kind == "task_complete":
            active = None
        elif event.kind == "cube_move":
            state = apply_move(state, parse_move(event.move))
        elif event.kind == "cube_reset":
            state = _task_initial(*active) if active else SOLVED
    return state, active


_catalog_cache: Optional[list] = None


def _scenarios():
    global _catalog_cache
    if _catalog_cache is None:
        _catalog_cache = scenario_catalog(SCENARIO_SEED)
    return _catalog_cache


def _task_initial(kind: str, task_id: str) -> CubeState:
    if kind == "practice":
        for scenario in _scenarios():
            if str(scenario.id) == task_id:
                return scenario.start_state
        raise KeyError(f"unknown practice task {task_id!r}")
    if kind == "challenge":
        if task_id not in CHALLENGE_TASKS:
            raise KeyError(f"unknown challenge task {task_id!r}")
        return challenge_initial(task_id)
    raise KeyError(f"unknown task kind {kind!r}")


def _task_goal(kind: str, task_id: str) -> MaskedPattern:
    if kind == "practice":
        for scenario in _scenarios():
            if str(scenario.id) == task_id:
                return scenario.goal
        raise KeyError(f"unknown practice task {task_id!r}")
    return white_cross_pattern()


@dataclass
class Session:
    id: str
    student_id: str
    log_path: Path
    current_state: CubeState = SOLVED
    active_task: Optional[tuple[str, str]] = None
    walkthrough: Optional[Walkthrough] = None
    last_ts: int = 0
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    @property
    def context(self) -> str:
        return self.active_task[0] if self.active_task else "free"

    @property
    def goal(self) -> MaskedPattern:
        if self.active_task:
            return _task_goal(*self.active_task)
        return white_cross_pattern()

    @property
    def initial_state(self) -> CubeState:
        if self.active_task:
            return _task_initial(*self.active_task)
        return SOLVED


class TutorService:
    def __init__(self, data_dir: Path | str):
        self.data_dir = Path(data_dir)
        self.logs_dir = self.data_dir / "logs"
        self.logs_dir.mkdir(parents=True, exist_ok=True)
        self.pdb: PatternDatabase = build_pdb(white_cross_pattern(), Metric.QTM)
        self.sessions: dict[str, Session] = {}
        self._restore_sessions()

    def _restore_sessions(self) -> None:
        for path in sorted(self.logs_dir.glob("*__*.log")):
            student_id, _, session_id = path.stem.partition("__")
            events = read_log(path)
            if not events:
                continue
            state, active = replay_events(events)
            self.sessions[session_id] = Session(
                id=session_id, student_id=student_id, log_path=path,
                current_state=state, active_task=active,
                last_ts=max(e.timestamp for e in events))

    def create_session(self, student_id: str) -> Session:
        if not _STUDENT_ID.fullmatch(student_id or ""):
            raise HTTPException(400, "invalid student id")
        session_id = uuid.uuid4().hex[:12]
        path = self.logs_dir / f"{student_id}__{session_id}.log"
        session = Session(id=session_id, student_id=student_id, log_path=path)
        self.sessions[session_id] = session
        self._emit(session, "session_start")
        return session

    def get(self, session_id: str) -> Session:
        session = self.sessions.get(session_id)
        if session is None:
            raise HTTPException(404, f"unknown session {session_id!r}")
        return session

    def _emit(self, session: Session, kind: str, *, move: str | None = None,
              context: str | None = None) -> None:
        ts = max(int(time.time() * 1000), session.last_ts + 1)
        session.last_ts = ts
        task_kind, task_id = session.active_task or (None, None)
        event = SessionEvent(
            student_id=session.student_id, timestamp=ts, kind=kind,
            task_kind=task_kind, task_id=task_id, move=move,
            context=context if context is not None else session.context)
        append_event(session.log_path, event)

    def snapshot(self, session: Session, **extra) -> dict:
        goal = session.goal
        body = {
            "session_id": session.id,
            "student_id": session.student_id,
            "state": state_to_string(session.current_state),
            "context": session.context,
            "active_task": (
                {"kind": session.active_task[0], "task_id": session.active_task[1]}
                if session.active_task else None),
            "goal": pattern_to_string(goal),
            "goal_reached": matches(session.current_state, goal),
        }
        body.update(extra)
        return body

    def _walkthrough(self, session: Session) -> Walkthrough:
        if session.walkthrough is None:
            session.walkthrough = plan_walkthrough(
                session.current_state, session.goal, self.pdb)
        return session.walkthrough

    def act(self, session_id: str, payload: dict) -> dict:
        session = self.get(session_id)
        action = payload.get("action")
        with session.lock:
            if action == "move":
                token = payload.get("move")
                if not token or not isinstance(token, str):
                    raise HTTPException(400, "move action requires a move token")
                try:
                    move = parse_move(token)
                except ValueError as exc:
                    raise HTTPException(400, str(exc))
                session.current_state = apply_move(session.current_state, move)
                session.walkthrough = None
                self._emit(session, "cube_move", move=move.notation)
                return self.snapshot(session)
            if action == "reset":
                session.current_state = session.initial_state
                session.walkthrough = None
                self._emit(session, "cube_reset")
                return self.snapshot(session)
            if action == "start_task":
                kind = payload.get("task_kind")
                task_id = str(payload.get("task_id", ""))
                if kind not in ("practice", "challenge"):
                    raise HTTPException(400, f"unknown task kind {kind!r}")
                try:
                    initial = _task_initial(kind, task_id)
                except KeyError as exc:
                    raise HTTPException(400, str(exc.args[0]))
                session.active_task = (kind, task_id)
                session.current_state = initial
                session.walkthrough = None
                self._emit(session, "task_start")
                return self.snapshot(session)
            if action == "complete_task":
                if session.active_task is None:
                    raise HTTPException(409, "no active task")
                if not matches(session.current_state, session.goal):
                    raise HTTPException(409, "goal not reached")
                self._emit(session, "task_complete")
                session.active_task = None
                session.walkthrough = None
                return self.snapshot(session)
            if action == "hint":
                move, text = hint(session.current_state, session.goal, self.pdb)
                self._emit(session, "hint_request")
                return self.snapshot(session, hint={
                    "move": move.notation if move else None, "text": text})
            if action in ("walkthrough_forward", "walkthrough_rewind"):
                walkthrough = self._walkthrough(session)
                try:
                    stepper = step_forward if action == "walkthrough_forward" else step_rewind
                    session.walkthrough = stepper(walkthrough)
                except ValueError as exc:
                    raise HTTPException(409, str(exc))
                self._emit(session, "walkthrough_step")
                return self.snapshot(
                    session, walkthrough=walkthrough_body(session.walkthrough))
            raise HTTPException(400, f"unknown action {action!r}")

    def student_events(self, student_id: str) -> list[SessionEvent]:
        events: list[SessionEvent] = []
        for path in sorted(self.logs_dir.glob(f"{student_id}__*.log")):
            events.extend(read_log(path))
        events.sort(key=lambda e: e.timestamp)
        return events

    def all_events(self) -> list[SessionEvent]:
        events: list[SessionEvent] = []
        for path in sorted(self.logs_dir.glob("*__*.log")):
            events.extend(read_log(path))
        events.sort(key=lambda e: e.timestamp)
        return events


def walkthrough_body(w: Walkthrough) -> dict:
    return {
        "cursor": w.cursor,
        "length": len(w.steps),
        "steps": [
            {
                "index": step.index,
                "move": step.move.notation,
                "explanation": step.explanation,
                "subgoal_id": step.subgoal_id,
                "pre_state": state_to_string(step.pre_state),
                "post_state": state_to_string(step.post_state),
            }
            for step in w.steps
        ],
    }


def create_app(data_dir: Path | str | None = None) -> FastAPI:
    service = TutorService(data_dir if data_dir is not None else default_data_dir())
    app = FastAPI(title="cubetutor")
    app.state.service = service

    @app.post("/sessions", status_code=201)
    def create_session(payload: dict = Body(...)) -> dict:
        session = service.create_session(str(payload.get("student_id", "")))
        return service.snapshot(session)

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str) -> dict:
        return service.snapshot(service.get(session_id))

    @app.post("/sessions/{session_id}/actions")
    def post_action(session_id: str, payload: dict = Body(...)) -> dict:
        return service.act(session_id, payload)

    @app.get("/sessions/{session_id}/mirror")
    def get_mirror(session_id: str) -> dict:
        return mirror_view(service.get(session_id).current_state)

    @app.get("/sessions/{session_id}/walkthrough")
    def get_walkthrough(session_id: str) -> dict:
        session = service.get(session_id)
        with session.lock:
            return walkthrough_body(service._walkthrough(session))

    @app.get("/scenarios")
    def get_scenarios() -> list[dict]:
        return [
            {
                "id": s.id,
                "title": s.title,
                "start_state": state_to_string(s.start_state),
                "goal": pattern_to_string(s.goal),
                "max_moves": s.max_moves,
            }
            for s in _scenarios()
        ]

    @app.get("/logs/{student_id}")
    def get_log(student_id: str) -> dict:
        events = service.student_events(student_id)
        if not events:
            raise HTTPException(404, f"no events for student {student_id!r}")
        from .telemetry import format_event
        return {"student_id": student_id,
                "events": [format_event(e) for e in events]}

    @app.post("/analytics/run")
    def analytics_run(payload: dict = Body(default={})) -> dict:
        out_dir = Path(payload.get("out_dir") or service.data_dir / "reports")
        log_path = payload.get("log_path")
        if log_path is None:
            events = service.all_events()
            combined = service.data_dir / "combined.log"
            from .telemetry import write_log
            write_log(events, combined)
            log_path = combined
        try:
            return run_pipeline(
                log_path, out_dir, payload.get("scores_path"),
                kmax=int(payload.get("kmax", 8)),
                seed=int(payload.get("seed", 0)),
                draws=int(payload.get("draws", 10_000)),
                restarts=int(payload.get("restarts", 25)))
        except LogValidationError as exc:
            raise HTTPException(400, {"violations": exc.violations})
        except ValueError as exc:
            raise HTTPException(400, str(exc))

    return app
