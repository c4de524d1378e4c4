"""Append-only event history of one design run.

Every run owns a directory holding ``events.jsonl`` (one JSON event per
line, sequence-numbered from 0) plus a ``summary.json`` snapshot that is
rewritten on status changes.  Events are the single source of truth:
the HTTP event stream, the dashboard and the trajectory export are all
folds over this file.

Event types: run_config, message, iteration, steering, status, summary.
"""

from __future__ import annotations

import json
import os
import threading
from datetime import datetime, timezone

from ..dataset import generate_splits
from ..train_tools import ToolRequest, execute_tool_request
from .types import IterationRecord

EVENTS_FILE = "events.jsonl"
SUMMARY_FILE = "summary.json"


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


class RunLog:
    """Single-writer event log with thread-safe tailing."""

    def __init__(self, run_id: str, directory: str | None = None):
        self.run_id = run_id
        self.directory = directory
        self.events: list = []
        self.cond = threading.Condition()
        self._fh = None
        if directory is not None:
            os.makedirs(directory, exist_ok=True)
            self._fh = open(os.path.join(directory, EVENTS_FILE), "a",
                            encoding="utf-8")

    def append(self, event_type: str, **payload) -> dict:
        with self.cond:
            event = {"seq": len(self.events), "ts": _now(), "type": event_type}
            event.update(payload)
            self.events.append(event)
            if self._fh is not None:
                self._fh.write(json.dumps(event) + "\n")
                self._fh.flush()
            self.cond.notify_all()
        return event

    def write_summary(self, summary: dict):
        if self.directory is None:
            return
        path = os.path.join(self.directory, SUMMARY_FILE)
        tmp = path + ".tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(summary, fh, indent=2)
        os.replace(tmp, path)

    def close(self):
        if self._fh is not None:
            self._fh.close()
            self._fh = None

    # -- read helpers -------------------------------------------------------

    def snapshot(self) -> list:
        with self.cond:
            return list(self.events)

    def wait_for(self, seq: int, timeout: float | None = None) -> list:
        """Block until events past ``seq`` exist; returns the new slice."""
        with self.cond:
            if len(self.events) <= seq:
                self.cond.wait(timeout=timeout)
            return self.events[seq:]


class RunLogView:
    """Read-side model over a list of events."""

    def __init__(self, run_id: str, events: list):
        self.run_id = run_id
        self.events = events

    @property
    def config(self) -> dict:
        for event in self.events:
            if event["type"] == "run_config":
                return event["config"]
        return {}

    @property
    def status(self) -> str:
        status = "running"
        for event in self.events:
            if event["type"] == "status":
                status = event["status"]
        return status

    def iteration_records(self) -> list:
        return [IterationRecord.from_dict(e["record"]) for e in self.events
                if e["type"] == "iteration"]

    def steering_events(self) -> list:
        return [e for e in self.events if e["type"] == "steering"]

    def messages(self) -> list:
        return [e["message"] for e in self.events if e["type"] == "message"]

    def best(self):
        """(iteration index, test RMSE) of the best successful iteration."""
        best_index, best_rmse = None, None
        for record in self.iteration_records():
            if record.ok:
                rmse = record.result["test_RMSE"]
                if best_rmse is None or rmse < best_rmse:
                    best_index, best_rmse = record.index, rmse
        return best_index, best_rmse

    def summary(self) -> dict:
        best_index, best_rmse = self.best()
        usage = {"prompt_tokens": 0, "completion_tokens": 0}
        for message in self.messages():
            for key in usage:
                usage[key] += (message.get("usage") or {}).get(key, 0)
        return {"run_id": self.run_id, "status": self.status,
                "iterations": len(self.iteration_records()),
                "best_iteration": best_index, "best_test_RMSE": best_rmse,
                "token_usage": usage, "config": self.config}


def load_run_log(directory: str) -> RunLogView:
    events = []
    with open(os.path.join(directory, EVENTS_FILE), encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                events.append(json.loads(line))
    run_id = os.path.basename(os.path.normpath(directory))
    return RunLogView(run_id, events)


# Fields of a ToolResult that replay must reproduce bit-identically;
# wall_time is measured, not computed, so it is exempt.
REPLAY_FIELDS = ("test_RMSE", "val_RMSE_history", "train_RMSE_last_batch",
                 "n_gates_in_VQC", "n_trainable_params_total",
                 "n_trainable_params_VQC", "circuit_depth")


def _recompute(record, splits, master_seed: int):
    """Re-run one logged iteration; returns ToolResult or ToolError."""
    from ..train_tools import ToolError
    from .schemas import tool_request_from_call

    if record.request is not None:
        request = ToolRequest.from_dict(record.request)
    else:
        # Argument mapping failed when logged; reproducing that failure
        # is the replay.
        try:
            request = tool_request_from_call(record.raw_call.get("tool", ""),
                                             record.raw_call.get("arguments", {}))
        except ToolError as exc:
            return exc
    return execute_tool_request(request, splits, master_seed)


def replay_run(view: RunLogView, splits=None) -> list:
    """Re-execute every logged request; returns per-iteration comparisons.

    Each entry is ``{"index", "ok", "mismatches"}`` where ``ok`` means the
    recomputed outcome matches the logged one on every replay field (or
    both failed with the same error message).
    """
    config = view.config
    master_seed = int(config.get("master_seed", 0))
    if splits is None:
        splits = generate_splits(master_seed)
    comparisons = []
    for record in view.iteration_records():
        outcome = _recompute(record, splits, master_seed)
        mismatches = []
        if record.ok:
            if not isinstance(outcome, Exception):
                recomputed = outcome.to_dict()
                for field in REPLAY_FIELDS:
                    if recomputed[field] != record.result[field]:
                        mismatches.append(field)
            else:
                mismatches.append("outcome-kind")
        else:
            if isinstance(outcome, Exception):
                if outcome.to_dict()["message"] != record.error["message"]:
                    mismatches.append("message")
            else:
                mismatches.append("outcome-kind")
        comparisons.append({"index": record.index, "ok": not mismatches,
                            "mismatches": mismatches})
    return comparisons
