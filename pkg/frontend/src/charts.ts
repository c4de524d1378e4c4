/**
 * Pure SVG builders for the two linked charts.  No DOM access: both
 * return markup strings, so they render identically in tests and in
 * the browser.
 */

import { RunViewModel } from "./types.js";
import { trajectoryPoints } from "./viewmodel.js";

export interface ChartGeometry {
  width: number;
  height: number;
  margin: number;
}

const DEFAULT_GEOMETRY: ChartGeometry = { width: 460, height: 300, margin: 44 };

interface Scale {
  (value: number): number;
}

function linearScale(lo: number, hi: number, outLo: number, outHi: number): Scale {
  const span = hi - lo || 1;
  return (value) => outLo + ((value - lo) / span) * (outHi - outLo);
}

function niceTicks(lo: number, hi: number, count = 5): number[] {
  const span = hi - lo || 1;
  const step = Math.pow(10, Math.floor(Math.log10(span / count)));
  const err = span / (count * step);
  const factor = err >= 7.5 ? 10 : err >= 3 ? 5 : err >= 1.5 ? 2 : 1;
  const size = factor * step;
  const start = Math.ceil(lo / size) * size;
  const ticks: number[] = [];
  for (let v = start; v <= hi + 1e-12; v += size) {
    ticks.push(Number(v.toPrecision(12)));
  }
  return ticks;
}

function frame(
  geometry: ChartGeometry,
  xTicks: number[],
  yTicks: number[],
  sx: Scale,
  sy: Scale,
  xLabel: string,
  yLabel: string,
): string {
  const { width, height, margin } = geometry;
  const parts: string[] = [];
  parts.push(
    `<rect class="plot" x="${margin}" y="${margin / 2}" ` +
      `width="${width - 1.5 * margin}" height="${height - 1.5 * margin}" />`,
  );
  for (const t of xTicks) {
    const x = sx(t);
    parts.push(
      `<line class="grid" x1="${x}" y1="${margin / 2}" x2="${x}" ` +
        `y2="${height - margin}" />`,
      `<text class="tick" x="${x}" y="${height - margin + 14}" ` +
        `text-anchor="middle">${t}</text>`,
    );
  }
  for (const t of yTicks) {
    const y = sy(t);
    parts.push(
      `<line class="grid" x1="${margin}" y1="${y}" ` +
        `x2="${width - margin / 2}" y2="${y}" />`,
      `<text class="tick" x="${margin - 6}" y="${y + 4}" ` +
        `text-anchor="end">${t}</text>`,
    );
  }
  parts.push(
    `<text class="label" x="${(width + margin / 2) / 2}" ` +
      `y="${height - 6}" text-anchor="middle">${xLabel}</text>`,
    `<text class="label" x="12" y="${height / 2}" text-anchor="middle" ` +
      `transform="rotate(-90 12 ${height / 2})">${yLabel}</text>`,
  );
  return parts.join("");
}

/**
 * Test RMSE per iteration.  Successful iterations are dots joined by a
 * line, failures are crosses on the top edge, steering boundaries are
 * dashed vertical lines, the best iteration is ringed.
 */
export function rmseVsIterationSvg(
  vm: RunViewModel,
  geometry: ChartGeometry = DEFAULT_GEOMETRY,
): string {
  const { width, height, margin } = geometry;
  const good = trajectoryPoints(vm);
  const rmses = good.map((r) => r.testRmse as number);
  const maxIter = Math.max(vm.iterations.length, 1);
  const loY = rmses.length ? Math.min(...rmses) : 0;
  const hiY = rmses.length ? Math.max(...rmses) : 1;
  const padY = (hiY - loY || hiY || 1) * 0.1;
  const sx = linearScale(1, Math.max(maxIter, 2), margin, width - margin / 2);
  const sy = linearScale(loY - padY, hiY + padY, height - margin, margin / 2);

  const parts: string[] = [];
  parts.push(
    frame(geometry, niceTicks(1, maxIter, Math.min(maxIter, 8)).filter(Number.isInteger),
      niceTicks(loY - padY, hiY + padY), sx, sy, "iteration", "test RMSE"),
  );
  for (const mark of vm.steering) {
    const x = sx(mark.afterIteration + 0.5);
    parts.push(
      `<line class="steering" x1="${x}" y1="${margin / 2}" x2="${x}" ` +
        `y2="${height - margin}" stroke-dasharray="5 4">` +
        `<title>${escapeXml(mark.text)}</title></line>`,
    );
  }
  const path = good
    .map((r, i) => `${i === 0 ? "M" : "L"}${sx(r.index)},${sy(r.testRmse as number)}`)
    .join(" ");
  if (good.length > 1) {
    parts.push(`<path class="series" d="${path}" fill="none" />`);
  }
  for (const row of vm.iterations) {
    if (row.ok) {
      const ring = row.index === vm.bestIteration
        ? `<circle class="best" cx="${sx(row.index)}" cy="${sy(row.testRmse as number)}" r="8" fill="none" />`
        : "";
      parts.push(
        ring +
          `<circle class="pt" data-iteration="${row.index}" cx="${sx(row.index)}" ` +
          `cy="${sy(row.testRmse as number)}" r="4">` +
          `<title>iteration ${row.index}: RMSE ${row.testRmse}</title></circle>`,
      );
    } else {
      const x = sx(row.index);
      const y = margin / 2 + 8;
      parts.push(
        `<g class="err" data-iteration="${row.index}">` +
          `<line x1="${x - 4}" y1="${y - 4}" x2="${x + 4}" y2="${y + 4}" />` +
          `<line x1="${x - 4}" y1="${y + 4}" x2="${x + 4}" y2="${y - 4}" />` +
          `<title>${escapeXml(row.error?.message ?? "failed")}</title></g>`,
      );
    }
  }
  return svg(geometry, parts.join(""));
}

/**
 * Search trajectory in (circuit parameter count, test RMSE) space:
 * successful iterations joined by arrows in temporal order.
 */
export function trajectorySvg(
  vm: RunViewModel,
  geometry: ChartGeometry = DEFAULT_GEOMETRY,
): string {
  const { width, height, margin } = geometry;
  const good = trajectoryPoints(vm);
  const xs = good.map((r) => r.vqcParams as number);
  const ys = good.map((r) => r.testRmse as number);
  const loX = xs.length ? Math.min(...xs) : 0;
  const hiX = xs.length ? Math.max(...xs) : 1;
  const loY = ys.length ? Math.min(...ys) : 0;
  const hiY = ys.length ? Math.max(...ys) : 1;
  const padX = (hiX - loX || hiX || 1) * 0.12;
  const padY = (hiY - loY || hiY || 1) * 0.12;
  const sx = linearScale(loX - padX, hiX + padX, margin, width - margin / 2);
  const sy = linearScale(loY - padY, hiY + padY, height - margin, margin / 2);

  const parts: string[] = [
    `<defs><marker id="arrow" viewBox="0 0 8 8" refX="7" refY="4" ` +
      `markerWidth="6" markerHeight="6" orient="auto-start-reverse">` +
      `<path d="M0,0 L8,4 L0,8 z" /></marker></defs>`,
    frame(geometry, niceTicks(loX - padX, hiX + padX),
      niceTicks(loY - padY, hiY + padY), sx, sy,
      "circuit parameters", "test RMSE"),
  ];
  for (let i = 1; i < good.length; i++) {
    const a = good[i - 1];
    const b = good[i];
    parts.push(
      `<line class="hop" marker-end="url(#arrow)" ` +
        `x1="${sx(a.vqcParams as number)}" y1="${sy(a.testRmse as number)}" ` +
        `x2="${sx(b.vqcParams as number)}" y2="${sy(b.testRmse as number)}" />`,
    );
  }
  good.forEach((row, i) => {
    const ring = row.index === vm.bestIteration
      ? `<circle class="best" cx="${sx(row.vqcParams as number)}" cy="${sy(row.testRmse as number)}" r="8" fill="none" />`
      : "";
    parts.push(
      ring +
        `<circle class="pt" data-iteration="${row.index}" ` +
        `cx="${sx(row.vqcParams as number)}" cy="${sy(row.testRmse as number)}" ` +
        `r="4" style="opacity:${0.45 + (0.55 * (i + 1)) / good.length}">` +
        `<title>iteration ${row.index}: ${row.vqcParams} params, ` +
        `RMSE ${row.testRmse}</title></circle>`,
    );
  });
  for (const mark of vm.steering) {
    const at = good.filter((r) => r.index <= mark.afterIteration).pop();
    if (at) {
      parts.push(
        `<text class="star" x="${sx(at.vqcParams as number) + 6}" ` +
          `y="${sy(at.testRmse as number) - 6}">*</text>`,
      );
    }
  }
  return svg(geometry, parts.join(""));
}

function svg(geometry: ChartGeometry, body: string): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${geometry.width} ` +
    `${geometry.height}" width="${geometry.width}" height="${geometry.height}">` +
    body +
    `</svg>`
  );
}

export function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
