/**
 * Browser wiring: run list, live run view (linked charts, iteration
 * table, transcript, steering box).  State lives in the view model
 * fold; the DOM re-renders from it on every event.
 */

import { escapeXml, rmseVsIterationSvg, trajectorySvg } from "./charts.js";
import { ServiceClient, ServiceRejection, Subscription } from "./client.js";
import { trajectoryCsv } from "./trajectory.js";
import { IterationRow, RunViewModel, TERMINAL_STATUSES } from "./types.js";
import {
  addPendingSteering,
  applyEvent,
  emptyViewModel,
} from "./viewmodel.js";

const params = new URLSearchParams(window.location.search);
const serviceUrl = params.get("service") ?? window.location.origin;
const client = new ServiceClient(serviceUrl);

const root = document.getElementById("app") as HTMLElement;

let vm: RunViewModel | null = null;
let subscription: Subscription | null = null;
let selectedIteration: number | null = null;
let steeringNotice = "";

function currentRunId(): string | null {
  const match = window.location.hash.match(/^#\/runs\/(.+)$/);
  return match ? match[1] : null;
}

async function route(): Promise<void> {
  subscription?.close();
  subscription = null;
  const runId = currentRunId();
  if (runId) {
    openRun(runId);
  } else {
    await renderRunList();
  }
}

async function renderRunList(): Promise<void> {
  let rows = "";
  try {
    const { runs } = await client.listRuns();
    rows = runs
      .map(
        (run) => `
          <tr>
            <td><a href="#/runs/${run.run_id}">${run.run_id}</a></td>
            <td><span class="status ${run.status}">${run.status}</span></td>
            <td class="num">${run.iterations}</td>
            <td class="num">${run.best_test_RMSE?.toFixed(4) ?? "-"}</td>
          </tr>`,
      )
      .join("");
  } catch (error) {
    rows = `<tr><td colspan="4" class="error">service unreachable: ${
      escapeXml(String(error))
    }</td></tr>`;
  }
  root.innerHTML = `
    <h1>circuit design runs</h1>
    <table class="runs">
      <thead><tr><th>run</th><th>status</th><th>iterations</th><th>best RMSE</th></tr></thead>
      <tbody>${rows}</tbody>
    </table>
    <details class="newrun">
      <summary>new run</summary>
      <textarea id="run-config" rows="12" spellcheck="false">${escapeXml(
        JSON.stringify(exampleConfig(), null, 2),
      )}</textarea>
      <button id="create-run">start</button>
      <span id="create-error" class="error"></span>
    </details>`;
  document.getElementById("create-run")?.addEventListener("click", async () => {
    const errorBox = document.getElementById("create-error") as HTMLElement;
    try {
      const config = JSON.parse(
        (document.getElementById("run-config") as HTMLTextAreaElement).value,
      );
      const { run_id } = await client.createRun(config);
      window.location.hash = `#/runs/${run_id}`;
    } catch (error) {
      errorBox.textContent = String(
        error instanceof ServiceRejection ? error.message : error,
      );
    }
  });
}

function openRun(runId: string): void {
  vm = emptyViewModel(runId);
  selectedIteration = null;
  steeringNotice = "";
  renderRun();
  subscription = client.subscribeEvents(runId, (event) => {
    if (!vm) return;
    vm = applyEvent(vm, event);
    renderRun();
  });
  subscription.done.catch((error) => {
    root.innerHTML = `<p class="error">${escapeXml(String(error))}</p>`;
  });
}

function renderRun(): void {
  if (!vm) return;
  const terminal = TERMINAL_STATUSES.includes(vm.status);
  const selected =
    vm.iterations.find((r) => r.index === selectedIteration) ?? null;
  root.innerHTML = `
    <p class="crumbs"><a href="#">runs</a> / ${vm.runId}
      <span class="status ${vm.status}">${vm.status}</span>
      ${terminal ? "" : '<button id="interrupt">interrupt</button>'}
    </p>
    <div class="charts">
      <figure>
        <figcaption>test RMSE per iteration</figcaption>
        ${rmseVsIterationSvg(vm)}
      </figure>
      <figure>
        <figcaption>search trajectory (RMSE over circuit parameters)</figcaption>
        ${trajectorySvg(vm)}
      </figure>
    </div>
    <div class="columns">
      <section class="iterations">
        <h2>iterations <a id="csv" href="#" title="download CSV">csv</a></h2>
        <table>
          <thead><tr><th>#</th><th>RMSE</th><th>params</th><th>gates</th>
            <th>depth</th><th>epochs</th></tr></thead>
          <tbody>
            ${vm.iterations
              .map(
                (row) => `
              <tr class="${row.ok ? "" : "failed"} ${
                row.index === selectedIteration ? "selected" : ""
              }" data-iteration="${row.index}">
                <td>${row.index}${row.index === vm!.bestIteration ? " *" : ""}</td>
                <td class="num">${row.testRmse?.toFixed(4) ?? "error"}</td>
                <td class="num">${row.vqcParams ?? ""}</td>
                <td class="num">${row.gates ?? ""}</td>
                <td class="num">${row.depth ?? ""}</td>
                <td class="num">${row.epochs ?? ""}</td>
              </tr>`,
              )
              .join("")}
          </tbody>
        </table>
        ${selected ? detailPanel(selected) : ""}
      </section>
      <section class="transcript">
        <h2>transcript</h2>
        <div class="messages">
          ${vm.transcript
            .map(
              (message) => `
            <div class="msg ${message.role}">
              <span class="role">${message.role}</span>
              <pre>${escapeXml(clip(message.content, 4000))}</pre>
              ${message.tool_call
                ? `<details><summary>tool call: ${message.tool_call.name}</summary>
                   <pre>${escapeXml(
                     JSON.stringify(message.tool_call.arguments, null, 2),
                   )}</pre></details>`
                : ""}
            </div>`,
            )
            .join("")}
          ${vm.pendingSteering
            .map(
              (pending) => `
            <div class="msg pending">
              <span class="role">you (sending...)</span>
              <pre>${escapeXml(pending.text)}</pre>
            </div>`,
            )
            .join("")}
        </div>
        <form id="steer">
          <input id="steer-text" type="text"
                 placeholder="steer the agent between iterations"
                 ${terminal ? "disabled" : ""} />
          <button ${terminal ? "disabled" : ""}>send</button>
          <span class="error">${escapeXml(steeringNotice)}</span>
        </form>
      </section>
    </div>`;

  document.getElementById("interrupt")?.addEventListener("click", () => {
    void client.interrupt(vm!.runId);
  });
  document.getElementById("csv")?.addEventListener("click", (event) => {
    event.preventDefault();
    downloadCsv();
  });
  for (const tr of root.querySelectorAll("tr[data-iteration]")) {
    tr.addEventListener("click", () => {
      selectedIteration = Number((tr as HTMLElement).dataset.iteration);
      renderRun();
    });
  }
  for (const pt of root.querySelectorAll("[data-iteration].pt, g.err")) {
    pt.addEventListener("click", () => {
      selectedIteration = Number((pt as SVGElement).dataset.iteration);
      renderRun();
    });
  }
  document.getElementById("steer")?.addEventListener("submit", (event) => {
    event.preventDefault();
    void submitSteering();
  });
}

function detailPanel(row: IterationRow): string {
  return `
    <div class="detail">
      <h3>iteration ${row.index}</h3>
      ${row.rationale ? `<p class="rationale">${escapeXml(row.rationale)}</p>` : ""}
      ${row.ok
        ? `<pre class="circuit">${escapeXml(row.circuitAscii || "(no diagram)")}</pre>
           <pre class="result">${escapeXml(JSON.stringify(row.result, null, 2))}</pre>`
        : `<pre class="error">${escapeXml(row.error?.message ?? "failed")}</pre>`}
    </div>`;
}

async function submitSteering(): Promise<void> {
  if (!vm) return;
  const input = document.getElementById("steer-text") as HTMLInputElement;
  const text = input.value.trim();
  if (!text) return;
  const key = `${vm.runId}-${Date.now()}`;
  vm = addPendingSteering(vm, { key, text });
  steeringNotice = "";
  input.value = "";
  renderRun();
  try {
    await client.sendSteering(vm.runId, text, key);
  } catch (error) {
    vm = { ...vm, pendingSteering: vm.pendingSteering.filter((p) => p.key !== key) };
    steeringNotice =
      error instanceof ServiceRejection ? error.message : String(error);
    renderRun();
  }
}

function downloadCsv(): void {
  if (!vm) return;
  const blob = new Blob([trajectoryCsv(vm)], { type: "text/csv" });
  const link = document.createElement("a");
  link.href = URL.createObjectURL(blob);
  link.download = `${vm.runId}-trajectory.csv`;
  link.click();
  URL.revokeObjectURL(link.href);
}

function clip(text: string, limit: number): string {
  return text.length > limit ? text.slice(0, limit) + "..." : text;
}

function exampleConfig(): Record<string, unknown> {
  return {
    architecture: "simple",
    budget: 5,
    prompt:
      "Design circuits for this task; start simple and improve from the metrics.",
    master_seed: 42,
    steering_wait_s: 5.0,
    endpoint: {
      kind: "http",
      base_url: "https://api.example.com/v1",
      model: "your-model",
      api_key_env: "LAB_API_KEY",
      temperature: 0.2,
    },
  };
}

window.addEventListener("hashchange", () => void route());
void route();
