"""Design-loop agent: conversation state, endpoints, run log, the loop."""

from .endpoint import (AuthError, EndpointError, HttpChatEndpoint,
                       ProtocolError, ScriptedEndpoint, llm_chat, make_endpoint)
from .loop import AgentRun, inject_user_steering, run_agent_loop
from .runlog import RunLog, RunLogView, load_run_log, replay_run
from .schemas import (SCHEMA_BY_TOOL_NAME, SYSTEM_PROMPT_VERSION, TOOL_SCHEMAS,
                      system_prompt, tool_request_from_call)
from .types import (EndpointConfig, IterationRecord, Message, RunConfig,
                    RUN_STATUSES, TERMINAL_STATUSES, ToolCall, ToolSchema)

__all__ = [
    "AgentRun", "run_agent_loop", "inject_user_steering",
    "RunLog", "RunLogView", "load_run_log", "replay_run",
    "TOOL_SCHEMAS", "SCHEMA_BY_TOOL_NAME", "SYSTEM_PROMPT_VERSION",
    "system_prompt", "tool_request_from_call",
    "EndpointConfig", "IterationRecord", "Message", "RunConfig",
    "ToolCall", "ToolSchema", "RUN_STATUSES", "TERMINAL_STATUSES",
    "HttpChatEndpoint", "ScriptedEndpoint", "make_endpoint", "llm_chat",
    "EndpointError", "AuthError", "ProtocolError",
]
