"""Chat-completion endpoints: live HTTP and the scripted stand-in.

The wire shape is the de-facto chat-completions protocol: a ``messages``
array, a ``tools`` array of function schemas, and assistant responses
that either carry text or a ``tool_calls`` entry.  Credentials come
from an environment variable named in the endpoint config and are never
logged or echoed.
"""

from __future__ import annotations

import json
import os
import re
import time

from .types import EndpointConfig, Message, ToolCall


class EndpointError(Exception):
    """Transport-level failure talking to the chat endpoint."""


class AuthError(EndpointError):
    pass


class ProtocolError(EndpointError):
    """The endpoint answered, but not with text or a usable tool call."""


def messages_to_wire(messages) -> list:
    wire = []
    for msg in messages:
        if msg.role == "assistant" and msg.tool_call is not None:
            wire.append({
                "role": "assistant",
                "content": msg.content or None,
                "tool_calls": [{
                    "id": msg.tool_call.id,
                    "type": "function",
                    "function": {"name": msg.tool_call.name,
                                 "arguments": json.dumps(msg.tool_call.arguments)},
                }],
            })
        elif msg.role == "tool":
            wire.append({"role": "tool", "tool_call_id": msg.tool_call_id,
                         "content": msg.content})
        else:
            wire.append({"role": msg.role, "content": msg.content})
    return wire


def _parse_assistant(payload: dict) -> Message:
    try:
        choice = payload["choices"][0]["message"]
    except (KeyError, IndexError, TypeError):
        raise ProtocolError(f"response has no choices/message: {payload!r}") from None
    content = choice.get("content") or ""
    tool_call = None
    calls = choice.get("tool_calls") or []
    if calls:
        call = calls[0]  # the loop drives one tool call per turn
        fn = call.get("function", {})
        raw_args = fn.get("arguments", "{}")
        try:
            arguments = json.loads(raw_args) if isinstance(raw_args, str) else raw_args
        except json.JSONDecodeError as exc:
            raise ProtocolError(
                f"tool call arguments are not valid JSON: {exc.msg}") from None
        if not isinstance(arguments, dict):
            raise ProtocolError("tool call arguments must be a JSON object")
        tool_call = ToolCall(id=call.get("id") or "call_0",
                             name=fn.get("name", ""), arguments=arguments)
    if not content and tool_call is None:
        raise ProtocolError("assistant response carries neither text nor a tool call")
    usage = payload.get("usage") or None
    return Message(role="assistant", content=content, tool_call=tool_call, usage=usage)


class HttpChatEndpoint:
    """POSTs to ``{base_url}/chat/completions`` with retry and backoff."""

    MAX_ATTEMPTS = 3
    BACKOFF_S = 1.0

    def __init__(self, config: EndpointConfig, timeout: float = 120.0):
        self.config = config
        self.timeout = timeout

    def _headers(self) -> dict:
        headers = {"Content-Type": "application/json"}
        env = self.config.api_key_env
        if env:
            key = os.environ.get(env)
            if not key:
                raise AuthError(f"no credential found in environment variable {env!r}")
            headers["Authorization"] = f"Bearer {key}"
        return headers

    def chat(self, messages, tool_schemas) -> Message:
        import requests

        body = {
            "model": self.config.model,
            "messages": messages_to_wire(messages),
            "temperature": self.config.temperature,
        }
        if tool_schemas:
            body["tools"] = [schema.to_wire() for schema in tool_schemas]
        url = self.config.base_url.rstrip("/") + "/chat/completions"
        headers = self._headers()

        last_exc = None
        for attempt in range(self.MAX_ATTEMPTS):
            try:
                resp = requests.post(url, json=body, headers=headers,
                                     timeout=self.timeout)
            except (requests.ConnectionError, requests.Timeout) as exc:
                last_exc = EndpointError(f"endpoint unreachable: {exc}")
            else:
                if resp.status_code in (401, 403):
                    raise AuthError(
                        f"endpoint rejected the credential from environment "
                        f"variable {self.config.api_key_env!r} "
                        f"(HTTP {resp.status_code})")
                if resp.status_code >= 500:
                    last_exc = EndpointError(
                        f"endpoint error HTTP {resp.status_code}: {resp.text[:500]}")
                elif resp.status_code >= 400:
                    raise EndpointError(
                        f"endpoint error HTTP {resp.status_code}: {resp.text[:500]}")
                else:
                    return _parse_assistant(resp.json())
            time.sleep(self.BACKOFF_S * 2 ** attempt)
        raise last_exc


_RETRAIN_PATTERN = re.compile(
    r"retrain the best model for (\d+) epochs", re.IGNORECASE)


class ScriptedEndpoint:
    """Deterministic stand-in replaying a playlist of assistant turns.

    Each turn is ``{"text": ...}`` or ``{"tool": name, "arguments": {...}}``
    (optionally with a rationale under ``"text"``).  When the playlist is
    exhausted the endpoint signals completion.  One steering phrase is
    understood: a user message matching "retrain the best model for N
    epochs" replays the lowest-RMSE prior request with the new epoch
    count, taking priority over the playlist.
    """

    def __init__(self, turns):
        self.turns = list(turns)
        self.cursor = 0
        self.call_counter = 0
        self.users_seen = 0
        self.pending_retrain: int | None = None

    def _next_id(self) -> str:
        self.call_counter += 1
        return f"call_{self.call_counter}"

    def chat(self, messages, tool_schemas) -> Message:
        self._note_steering(messages)
        steered = self._steered_turn(messages)
        if steered is not None:
            return steered
        if self.cursor >= len(self.turns):
            return Message(role="assistant",
                           content="DONE: scripted playlist exhausted")
        turn = self.turns[self.cursor]
        self.cursor += 1
        tool_call = None
        if "tool" in turn:
            tool_call = ToolCall(id=self._next_id(), name=turn["tool"],
                                 arguments=turn.get("arguments", {}))
        return Message(role="assistant", content=turn.get("text", ""),
                       tool_call=tool_call)

    def _note_steering(self, messages):
        users = [m for m in messages if m.role == "user"]
        for msg in users[self.users_seen:]:
            match = _RETRAIN_PATTERN.search(msg.content)
            if match:
                self.pending_retrain = int(match.group(1))
        self.users_seen = len(users)

    def _steered_turn(self, messages) -> Message | None:
        if self.pending_retrain is None:
            return None
        best = self._best_prior_arguments(messages)
        if best is None:
            return None  # nothing to retrain yet; keep the instruction pending
        epochs = self.pending_retrain
        self.pending_retrain = None
        arguments = dict(best)
        arguments["epochs"] = epochs
        tool_name = next((m.tool_call.name for m in messages
                          if m.role == "assistant" and m.tool_call), "")
        return Message(role="assistant",
                       content=f"Retraining the best design for {epochs} epochs.",
                       tool_call=ToolCall(id=self._next_id(), name=tool_name,
                                          arguments=arguments))

    @staticmethod
    def _best_prior_arguments(messages) -> dict | None:
        calls = {m.tool_call.id: m.tool_call.arguments
                 for m in messages if m.role == "assistant" and m.tool_call}
        best_args, best_rmse = None, None
        for msg in messages:
            if msg.role != "tool" or msg.tool_call_id not in calls:
                continue
            try:
                payload = json.loads(msg.content)
            except json.JSONDecodeError:
                continue
            rmse = payload.get("test_RMSE")
            if rmse is None:
                continue
            if best_rmse is None or rmse < best_rmse:
                best_rmse, best_args = rmse, calls[msg.tool_call_id]
        return best_args


def make_endpoint(config: EndpointConfig):
    if config.kind == "scripted":
        return ScriptedEndpoint(config.turns)
    return HttpChatEndpoint(config)


def llm_chat(messages, tool_schemas, endpoint) -> Message:
    """One assistant turn from the given endpoint."""
    return endpoint.chat(messages, tool_schemas)
