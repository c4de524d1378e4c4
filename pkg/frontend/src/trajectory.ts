/**
 * CSV of the iteration metrics, matching the lab CLI's `trajectory`
 * output byte for byte: same header, same row shapes, floats in
 * shortest round-trip form.
 */

import { RunViewModel } from "./types.js";

export const TRAJECTORY_HEADER =
  "iteration,status,test_RMSE,n_trainable_params_VQC,n_gates_in_VQC," +
  "circuit_depth";

export function trajectoryCsv(vm: RunViewModel): string {
  const lines = [TRAJECTORY_HEADER];
  for (const row of vm.iterations) {
    if (row.ok) {
      lines.push(
        `${row.index},ok,${row.testRmse},${row.vqcParams},${row.gates},` +
          `${row.depth}`,
      );
    } else {
      lines.push(`${row.index},error,,,,`);
    }
  }
  return lines.join("\n") + "\n";
}
