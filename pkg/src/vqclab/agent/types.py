"""Conversation and run-state records for the design loop."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class ToolCall:
    id: str
    name: str
    arguments: dict

    def to_dict(self) -> dict:
        return {"id": self.id, "name": self.name, "arguments": self.arguments}

    @classmethod
    def from_dict(cls, raw: dict) -> "ToolCall":
        return cls(id=raw["id"], name=raw["name"], arguments=raw["arguments"])


@dataclass
class Message:
    role: str  # system | user | assistant | tool
    content: str = ""
    tool_call: ToolCall | None = None
    tool_call_id: str | None = None  # set on tool messages
    usage: dict | None = None  # prompt/completion token counts

    def to_dict(self) -> dict:
        out = {"role": self.role, "content": self.content}
        if self.tool_call is not None:
            out["tool_call"] = self.tool_call.to_dict()
        if self.tool_call_id is not None:
            out["tool_call_id"] = self.tool_call_id
        if self.usage:
            out["usage"] = self.usage
        return out

    @classmethod
    def from_dict(cls, raw: dict) -> "Message":
        tc = raw.get("tool_call")
        return cls(role=raw["role"], content=raw.get("content", ""),
                   tool_call=ToolCall.from_dict(tc) if tc else None,
                   tool_call_id=raw.get("tool_call_id"),
                   usage=raw.get("usage"))


@dataclass(frozen=True)
class ToolSchema:
    name: str
    description: str  # full docstring shown to the model
    parameters: dict  # JSON-schema style parameter descriptors
    variant: str  # ToolRequest variant this schema drives

    def to_wire(self) -> dict:
        """Shape used in the chat endpoint's ``tools`` array."""
        return {"type": "function",
                "function": {"name": self.name, "description": self.description,
                             "parameters": self.parameters}}


@dataclass(frozen=True)
class EndpointConfig:
    kind: str  # "http" or "scripted"
    base_url: str = ""
    model: str = ""
    api_key_env: str = ""
    temperature: float = 0.0
    turns: tuple = ()  # scripted playlist

    def to_dict(self) -> dict:
        if self.kind == "scripted":
            return {"kind": "scripted", "turns": list(self.turns)}
        return {"kind": "http", "base_url": self.base_url, "model": self.model,
                "api_key_env": self.api_key_env, "temperature": self.temperature}

    @classmethod
    def from_dict(cls, raw: dict) -> "EndpointConfig":
        kind = raw.get("kind", "http")
        if kind == "scripted":
            return cls(kind="scripted", turns=tuple(raw.get("turns", ())))
        return cls(kind="http", base_url=raw.get("base_url", ""),
                   model=raw.get("model", ""), api_key_env=raw.get("api_key_env", ""),
                   temperature=float(raw.get("temperature", 0.0)))


@dataclass(frozen=True)
class RunConfig:
    architecture: str  # simple | quanv | full_quantum
    budget: int  # design iterations the agent may spend
    prompt: str  # initial user message
    endpoint: EndpointConfig
    master_seed: int = 0
    max_repair_attempts: int = 3
    steering_wait_s: float = 0.0  # pause after each tool result for steering

    def to_dict(self) -> dict:
        return {"architecture": self.architecture, "budget": self.budget,
                "prompt": self.prompt, "endpoint": self.endpoint.to_dict(),
                "master_seed": self.master_seed,
                "max_repair_attempts": self.max_repair_attempts,
                "steering_wait_s": self.steering_wait_s}

    @classmethod
    def from_dict(cls, raw: dict) -> "RunConfig":
        if not isinstance(raw.get("budget"), int) or raw["budget"] < 1:
            raise ValueError("budget must be a positive integer")
        return cls(architecture=raw["architecture"], budget=raw["budget"],
                   prompt=raw.get("prompt", ""),
                   endpoint=EndpointConfig.from_dict(raw.get("endpoint", {})),
                   master_seed=int(raw.get("master_seed", 0)),
                   max_repair_attempts=int(raw.get("max_repair_attempts", 3)),
                   steering_wait_s=float(raw.get("steering_wait_s", 0.0)))


@dataclass
class IterationRecord:
    index: int  # contiguous from 1, one per tool execution
    rationale: str  # assistant text accompanying the tool call
    raw_call: dict  # the tool call as received: {"tool", "arguments"}
    request: dict | None = None  # ToolRequest.to_dict() once mapping succeeded
    result: dict | None = None  # ToolResult.to_dict() on success
    error: dict | None = None  # ToolError.to_dict() on failure
    lr_history: list = field(default_factory=list)
    circuit_ascii: str = ""  # diagram shown when an iteration is inspected
    started: str = ""
    finished: str = ""

    @property
    def ok(self) -> bool:
        return self.result is not None

    def to_dict(self) -> dict:
        return {"index": self.index, "rationale": self.rationale,
                "raw_call": self.raw_call, "request": self.request,
                "result": self.result, "error": self.error,
                "lr_history": self.lr_history,
                "circuit_ascii": self.circuit_ascii,
                "started": self.started, "finished": self.finished}

    @classmethod
    def from_dict(cls, raw: dict) -> "IterationRecord":
        return cls(index=raw["index"], rationale=raw.get("rationale", ""),
                   raw_call=raw.get("raw_call", {}), request=raw.get("request"),
                   result=raw.get("result"), error=raw.get("error"),
                   lr_history=raw.get("lr_history", []),
                   circuit_ascii=raw.get("circuit_ascii", ""),
                   started=raw.get("started", ""), finished=raw.get("finished", ""))


RUN_STATUSES = ("running", "waiting_steering", "agent_stopped", "budget_exhausted",
                "aborted")
TERMINAL_STATUSES = ("agent_stopped", "budget_exhausted", "aborted")
