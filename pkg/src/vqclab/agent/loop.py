"""The closed design loop: propose, train, feed back, repeat.

One :class:`AgentRun` drives one conversation.  Each assistant turn
either calls the training tool (one call per turn) or ends the run with
a ``DONE:`` line.  Tool failures are fed back verbatim; the agent gets
``max_repair_attempts`` consecutive tries before the failed design slot
is forfeited and the loop moves on.  Between tool executions there is a
steering window: user messages injected while a tool runs are queued
and delivered before the next assistant turn, never dropped.
"""

from __future__ import annotations

import json
import queue
import threading
import uuid
from datetime import datetime, timezone

from ..dataset import generate_splits
from ..train_tools import ToolError, execute_with_trace
from .endpoint import EndpointError, ProtocolError, llm_chat, make_endpoint
from .runlog import RunLog, RunLogView
from .schemas import TOOL_SCHEMAS, system_prompt, tool_request_from_call
from .types import IterationRecord, Message, RunConfig

_NUDGE = ("Continue: submit your next design with a tool call, or finish with "
          "a line starting 'DONE:'.")
_MAX_TEXT_ONLY_TURNS = 3


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


class AgentRun:
    """Single-writer design loop; hosts may steer and interrupt it."""

    def __init__(self, config: RunConfig, run_id: str | None = None,
                 log_dir: str | None = None, splits=None, endpoint=None):
        self.config = config
        self.run_id = run_id or uuid.uuid4().hex[:12]
        self.log = RunLog(self.run_id, log_dir)
        self.splits = splits if splits is not None else generate_splits(config.master_seed)
        self.endpoint = endpoint if endpoint is not None else make_endpoint(config.endpoint)
        self.steering = queue.Queue()
        self.status = "running"
        self._interrupted = threading.Event()
        self.messages: list = []

    # -- external controls --------------------------------------------------

    def inject_steering(self, text: str):
        """Queue a user message; it reaches the agent before its next turn."""
        if not text or not text.strip():
            raise ValueError("steering message must not be empty")
        if self.status in ("agent_stopped", "budget_exhausted", "aborted"):
            raise ValueError(f"run is {self.status}; steering is closed")
        self.steering.put(text)

    def interrupt(self):
        self._interrupted.set()

    # -- internals -----------------------------------------------------------

    def _set_status(self, status: str):
        # Event first, flag second: a reader that observes a terminal flag
        # is guaranteed to find the matching status event in the log.
        self.log.append("status", status=status)
        self.status = status
        self.log.write_summary(self.view().summary())

    def _say(self, message: Message):
        self.messages.append(message)
        self.log.append("message", message=message.to_dict())

    def _drain_steering(self, iteration: int, block_s: float = 0.0):
        try:
            text = self.steering.get(timeout=block_s) if block_s > 0 else \
                self.steering.get_nowait()
        except queue.Empty:
            return
        while True:
            self.log.append("steering", text=text, after_iteration=iteration)
            self._say(Message(role="user", content=text))
            try:
                text = self.steering.get_nowait()
            except queue.Empty:
                return

    def view(self) -> RunLogView:
        return RunLogView(self.run_id, self.log.snapshot())

    # -- the loop ------------------------------------------------------------

    def run(self) -> RunLogView:
        config = self.config
        self.log.append("run_config", config=config.to_dict(), run_id=self.run_id)
        self._set_status("running")
        self._say(Message(role="system", content=system_prompt(config.architecture)))
        self._say(Message(role="user", content=config.prompt))
        schemas = [TOOL_SCHEMAS[config.architecture]]

        iteration = 0
        budget_used = 0
        repairs = 0
        text_only_turns = 0
        try:
            while budget_used < config.budget:
                self._drain_steering(iteration)
                if self._interrupted.is_set():
                    self._set_status("aborted")
                    return self.view()
                try:
                    assistant = llm_chat(self.messages, schemas, self.endpoint)
                except ProtocolError as exc:
                    # Protocol slips are repairable: tell the agent what broke.
                    self._say(Message(role="user",
                                      content=f"Protocol error: {exc}. Reply with "
                                              "exactly one tool call or a DONE: line."))
                    repairs += 1
                    if repairs >= config.max_repair_attempts:
                        budget_used += 1
                        repairs = 0
                    continue
                self._say(assistant)

                if assistant.tool_call is None:
                    if any(line.strip().startswith("DONE:")
                           for line in assistant.content.splitlines()):
                        self._set_status("agent_stopped")
                        return self.view()
                    text_only_turns += 1
                    if text_only_turns >= _MAX_TEXT_ONLY_TURNS:
                        self._set_status("agent_stopped")
                        return self.view()
                    self._say(Message(role="user", content=_NUDGE))
                    continue

                text_only_turns = 0
                iteration += 1
                started = _now()
                call = assistant.tool_call
                request_dict = None
                lr_history, circuit_ascii = [], ""
                try:
                    request = tool_request_from_call(call.name, call.arguments)
                    request_dict = request.to_dict()
                    outcome, trace = execute_with_trace(request, self.splits,
                                                        config.master_seed)
                    lr_history = trace.lr_history
                    circuit_ascii = trace.circuit_ascii
                except ToolError as exc:
                    outcome = exc
                ok = not isinstance(outcome, ToolError)
                record = IterationRecord(
                    index=iteration,
                    rationale=assistant.content,
                    raw_call={"tool": call.name, "arguments": call.arguments},
                    request=request_dict,
                    result=outcome.to_dict() if ok else None,
                    error=None if ok else outcome.to_dict(),
                    lr_history=lr_history,
                    circuit_ascii=circuit_ascii,
                    started=started, finished=_now())
                self.log.append("iteration", record=record.to_dict())
                payload = outcome.to_dict() if ok else {"error": outcome.to_dict()}
                self._say(Message(role="tool", content=json.dumps(payload),
                                  tool_call_id=call.id))
                if ok:
                    budget_used += 1
                    repairs = 0
                else:
                    repairs += 1
                    if repairs >= config.max_repair_attempts:
                        budget_used += 1
                        repairs = 0
                if budget_used < config.budget and config.steering_wait_s > 0:
                    self._set_status("waiting_steering")
                    self._drain_steering(iteration, block_s=config.steering_wait_s)
                    self._set_status("running")
            self._set_status("budget_exhausted")
            return self.view()
        except EndpointError as exc:
            # Permanent endpoint failure: abort but keep the partial log.
            self.log.append("message", message=Message(
                role="user", content=f"run aborted: {exc}").to_dict())
            self._set_status("aborted")
            return self.view()
        finally:
            self.log.write_summary(self.view().summary())
            self.log.close()


def run_agent_loop(config: RunConfig, run_id: str | None = None,
                   log_dir: str | None = None, splits=None,
                   endpoint=None) -> RunLogView:
    """Execute one full design run and return its event view."""
    return AgentRun(config, run_id=run_id, log_dir=log_dir, splits=splits,
                    endpoint=endpoint).run()


def inject_user_steering(run: AgentRun, text: str):
    run.inject_steering(text)
