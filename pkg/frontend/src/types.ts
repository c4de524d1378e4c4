/** Wire shapes of the run-event stream and the view model folded from it. */

export interface RunEvent {
  seq: number;
  ts: string;
  type: string;
  [key: string]: unknown;
}

export interface ToolCallPayload {
  id: string;
  name: string;
  arguments: Record<string, unknown>;
}

export interface TranscriptMessage {
  role: "system" | "user" | "assistant" | "tool";
  content: string;
  tool_call?: ToolCallPayload;
  tool_call_id?: string;
  usage?: Record<string, number>;
}

export interface ToolResultPayload {
  test_RMSE: number;
  val_RMSE_history: number[];
  train_RMSE_last_batch: number;
  n_gates_in_VQC: number;
  n_trainable_params_total: number;
  n_trainable_params_VQC: number;
  circuit_depth: number;
  wall_time: number;
}

export interface ToolErrorPayload {
  phase: string;
  message: string;
  construct?: string;
}

export interface IterationPayload {
  index: number;
  rationale: string;
  raw_call: { tool: string; arguments: Record<string, unknown> };
  request: Record<string, unknown> | null;
  result: ToolResultPayload | null;
  error: ToolErrorPayload | null;
  lr_history: number[];
  circuit_ascii: string;
  started: string;
  finished: string;
}

/** One row of the iteration table (and of the trajectory CSV). */
export interface IterationRow {
  index: number;
  ok: boolean;
  testRmse: number | null;
  vqcParams: number | null;
  gates: number | null;
  depth: number | null;
  error: ToolErrorPayload | null;
  result: ToolResultPayload | null;
  circuitAscii: string;
  rationale: string;
  epochs: number | null;
}

export interface SteeringMark {
  afterIteration: number;
  text: string;
}

export interface PendingSteering {
  key: string;
  text: string;
}

export type RunStatus =
  | "running"
  | "waiting_steering"
  | "agent_stopped"
  | "budget_exhausted"
  | "aborted";

export const TERMINAL_STATUSES: RunStatus[] = [
  "agent_stopped",
  "budget_exhausted",
  "aborted",
];

/** Everything the run view renders, derived purely from the event stream. */
export interface RunViewModel {
  runId: string;
  status: RunStatus;
  lastSeq: number;
  config: Record<string, unknown> | null;
  iterations: IterationRow[];
  steering: SteeringMark[];
  transcript: TranscriptMessage[];
  pendingSteering: PendingSteering[];
  bestIteration: number | null;
  bestRmse: number | null;
}

export interface RunHandle {
  run_id: string;
  status: RunStatus;
  iterations: number;
  best_iteration: number | null;
  best_test_RMSE: number | null;
}
