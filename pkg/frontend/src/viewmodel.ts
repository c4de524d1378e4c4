/**
 * The run view model is a pure fold over the event stream: the same
 * events in the same order always produce an identical model, so a
 * page refresh (full replay) reconstructs exactly the live state.
 */

import {
  IterationPayload,
  IterationRow,
  PendingSteering,
  RunEvent,
  RunStatus,
  RunViewModel,
  TranscriptMessage,
} from "./types.js";

export function emptyViewModel(runId: string): RunViewModel {
  return {
    runId,
    status: "running",
    lastSeq: -1,
    config: null,
    iterations: [],
    steering: [],
    transcript: [],
    pendingSteering: [],
    bestIteration: null,
    bestRmse: null,
  };
}

function toRow(record: IterationPayload): IterationRow {
  const result = record.result;
  const request = record.request as { epochs?: number } | null;
  return {
    index: record.index,
    ok: result !== null,
    testRmse: result ? result.test_RMSE : null,
    vqcParams: result ? result.n_trainable_params_VQC : null,
    gates: result ? result.n_gates_in_VQC : null,
    depth: result ? result.circuit_depth : null,
    error: record.error,
    result,
    circuitAscii: record.circuit_ascii ?? "",
    rationale: record.rationale ?? "",
    epochs: request?.epochs ?? null,
  };
}

/** Apply one event; returns a new model, never mutating the input. */
export function applyEvent(vm: RunViewModel, event: RunEvent): RunViewModel {
  const next: RunViewModel = {
    ...vm,
    lastSeq: event.seq,
    iterations: vm.iterations,
    steering: vm.steering,
    transcript: vm.transcript,
    pendingSteering: vm.pendingSteering,
  };
  switch (event.type) {
    case "run_config": {
      next.config = event["config"] as Record<string, unknown>;
      break;
    }
    case "status": {
      next.status = event["status"] as RunStatus;
      break;
    }
    case "message": {
      const message = event["message"] as TranscriptMessage;
      next.transcript = [...vm.transcript, message];
      break;
    }
    case "iteration": {
      const row = toRow(event["record"] as unknown as IterationPayload);
      next.iterations = [...vm.iterations, row];
      if (row.ok && row.testRmse !== null &&
          (next.bestRmse === null || row.testRmse < next.bestRmse)) {
        next.bestRmse = row.testRmse;
        next.bestIteration = row.index;
      }
      break;
    }
    case "steering": {
      const text = event["text"] as string;
      next.steering = [
        ...vm.steering,
        { afterIteration: event["after_iteration"] as number, text },
      ];
      // The service echoed the message: the matching draft is no longer
      // pending (the transcript entry arrives as its own message event).
      next.pendingSteering = vm.pendingSteering.filter((p) => p.text !== text);
      break;
    }
    default:
      break; // summaries and future event kinds do not affect the view
  }
  return next;
}

export function foldEvents(runId: string, events: RunEvent[]): RunViewModel {
  let vm = emptyViewModel(runId);
  for (const event of events) {
    vm = applyEvent(vm, event);
  }
  return vm;
}

/** Optimistic draft; cleared only by the service's steering echo. */
export function addPendingSteering(
  vm: RunViewModel,
  pending: PendingSteering,
): RunViewModel {
  return { ...vm, pendingSteering: [...vm.pendingSteering, pending] };
}

/** Rows behind both charts: successful iterations in temporal order. */
export function trajectoryPoints(vm: RunViewModel): IterationRow[] {
  return vm.iterations.filter((row) => row.ok);
}
