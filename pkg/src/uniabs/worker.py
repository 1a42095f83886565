"""Analysis worker: a message-driven wrapper around the engine.

One WorkerState runs one analysis at a time in a background thread; the
UI toplevel exchanges single JSON objects with it. `handle_message`
returns when the worker is quiescent again: either the analysis finished
(`done`), it is blocked waiting for interactive input (`input-request`),
or the message was answered statelessly (`options-metadata`, `error`).

Protocol summary (message `type` values):
  to the worker:   start{program, language, config, options}
                   input{data} | interrupt{} | query-options{config}
  from the worker: output{data} | input-request{prompt}
                   done{status, report} | options-metadata{options} | error{message}
"""
from __future__ import annotations

import json
import queue
import threading
from dataclasses import asdict

from .config import (
    ConfigError,
    OptionError,
    build_stack,
    list_options,
    parse_config,
    set_option,
)
from .engine import run
from .engine.channels import IOChannel
from .engine.core import Cancelled
from .engine.interactive import run_session
from .frontend import FrontendError, parse, typecheck

_CANCEL = object()


class _WorkerChannel(IOChannel):
    def __init__(self, worker: "WorkerState"):
        self.worker = worker
        self._tail = ""  # last unterminated line, used as the input prompt

    def write(self, text: str) -> None:
        self.worker._emit({"type": "output", "data": text})
        if text.endswith("\n"):
            self._tail = ""
        else:
            self._tail = (self._tail + text).rsplit("\n", 1)[-1]

    def read_line(self) -> str:
        worker = self.worker
        worker._emit({"type": "input-request", "prompt": self._tail})
        worker._awaiting_input = True
        worker._quiescent.put("paused")
        value = worker._input_queue.get()
        worker._awaiting_input = False
        if value is _CANCEL:
            raise Cancelled()
        return value  # type: ignore[return-value]


class WorkerState:
    def __init__(self):
        self._outbox: list[dict] = []
        self._lock = threading.Lock()
        self._thread: threading.Thread | None = None
        self._quiescent: queue.Queue = queue.Queue()
        self._input_queue: queue.Queue = queue.Queue()
        self._cancel = threading.Event()
        self._awaiting_input = False

    # --- plumbing ---

    def _emit(self, message: dict) -> None:
        with self._lock:
            self._outbox.append(message)

    def _drain(self) -> list[dict]:
        with self._lock:
            out = self._outbox
            self._outbox = []
        return out

    @property
    def running(self) -> bool:
        return self._thread is not None and self._thread.is_alive()

    def _wait_quiescent(self) -> str:
        token = self._quiescent.get()
        if token == "done" and self._thread is not None:
            self._thread.join()
            self._thread = None
        return token

    # --- message handling ---

    def handle_message(self, message: object) -> list[dict]:
        if not isinstance(message, dict) or "type" not in message:
            return [{"type": "error", "message": "malformed message"}]
        mtype = message["type"]
        if mtype == "query-options":
            return [self._query_options(message)]
        if mtype == "start":
            replies: list[dict] = []
            if self.running:
                if not self._awaiting_input:
                    return [{"type": "error", "message": "analysis in progress"}]
                self._do_interrupt()  # implicit interrupt of the paused session
                replies.extend(self._drain())
            replies.extend(self._start(message))
            return replies
        if mtype == "input":
            if not (self.running and self._awaiting_input):
                return [{"type": "error", "message": "no pending input request"}]
            if "data" not in message or not isinstance(message["data"], str):
                return [{"type": "error", "message": "input expects a string 'data'"}]
            self._input_queue.put(message["data"])
            self._wait_quiescent()
            return self._drain()
        if mtype == "interrupt":
            if not self.running:
                return [{"type": "error", "message": "no analysis in progress"}]
            if self._awaiting_input:
                # Parked at an input request: no other call is waiting, so
                # deliver the cancellation and collect the aborted report.
                self._do_interrupt()
                return self._drain()
            # Computing: the pending start/input call delivers the done
            # message; just raise the flag (polled at statement bounds).
            self._cancel.set()
            return []
        return [{"type": "error", "message": f"unknown message type {mtype!r}"}]

    def _query_options(self, message: dict) -> dict:
        try:
            stack = build_stack(_parse_config_value(message.get("config")))
        except ConfigError as exc:
            return {"type": "error", "message": str(exc)}
        options = [
            {
                "key": meta.key,
                "owner": meta.owner,
                "kind": meta.kind,
                "default": meta.default,
                "doc": meta.doc,
                "choices": list(meta.choices),
            }
            for meta in list_options(stack)
        ]
        return {"type": "options-metadata", "options": options}

    def _start(self, message: dict) -> list[dict]:
        if message.get("language", "universal") != "universal":
            return [{"type": "error", "message": "unsupported language"}]
        try:
            stack = build_stack(_parse_config_value(message.get("config")))
        except ConfigError as exc:
            return [{"type": "error", "message": str(exc)}]
        options = message.get("options") or {}
        if not isinstance(options, dict):
            return [{"type": "error", "message": "options must be an object"}]
        try:
            for key, value in options.items():
                set_option(stack, key, _option_text(value))
        except OptionError as exc:
            return [{"type": "error", "message": str(exc)}]
        source = message.get("program")
        if not isinstance(source, str):
            return [{"type": "error", "message": "start expects a 'program' string"}]
        try:
            program = typecheck(parse(source, "<program>"))
        except FrontendError as exc:
            return [
                {"type": "error", "message": "\n".join(str(d) for d in exc.diagnostics)}
            ]

        self._cancel = threading.Event()
        self._input_queue = queue.Queue()
        self._quiescent = queue.Queue()
        self._awaiting_input = False
        channel = _WorkerChannel(self)

        def task():
            try:
                if stack.options.get("engine") == "interactive":
                    report = run_session(
                        program, stack, channel, cancel=self._cancel.is_set
                    )
                else:
                    report = run(program, stack, channel, cancel=self._cancel.is_set)
                status = 3 if report.aborted else (1 if report.alarms else 0)
                self._emit(
                    {"type": "done", "status": status, "report": report.to_json_dict()}
                )
            except BaseException as exc:  # engine bug: still report done
                self._emit(
                    {
                        "type": "done",
                        "status": 3,
                        "report": {"alarms": [], "prints": [],
                                   "summary": {"proved": 0, "alarms": 0},
                                   "aborted": True},
                        "detail": f"worker crashed: {exc}",
                    }
                )
            finally:
                self._quiescent.put("done")

        self._thread = threading.Thread(target=task, daemon=True)
        self._thread.start()
        self._wait_quiescent()
        return self._drain()

    def _do_interrupt(self) -> None:
        self._cancel.set()
        if self._awaiting_input:
            self._input_queue.put(_CANCEL)
        while True:
            token = self._quiescent.get()
            if token == "done":
                break
            # analysis paused for input after the interrupt: unblock it
            if self._awaiting_input:
                self._input_queue.put(_CANCEL)
        if self._thread is not None:
            self._thread.join()
            self._thread = None


def _parse_config_value(config: object):
    if isinstance(config, str):
        return parse_config(config)
    return parse_config(json.dumps(config))


def _option_text(value: object) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def handle_message(state: WorkerState, message: object) -> list[dict]:
    return state.handle_message(message)
