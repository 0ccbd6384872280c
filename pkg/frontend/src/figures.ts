/** The four figure kinds rendered from runs.csv / sweep.csv tables. */

import {
  RUNS_HEADER,
  SchemaError,
  Table,
  column,
  numericColumn,
  requireColumns,
} from "./csv";
import { fitLogLogSlope } from "./fit";
import {
  HEIGHT,
  MARGIN,
  PALETTE,
  WIDTH,
  axes,
  circle,
  closeSvg,
  linearScale,
  line,
  openSvg,
  polyline,
  rect,
  text,
} from "./svg";

const PLOT = {
  x0: MARGIN.left,
  x1: WIDTH - MARGIN.right,
  y0: HEIGHT - MARGIN.bottom,
  y1: MARGIN.top,
};

const MAX_TRACES = 8;

/** Mean regret against the task horizon on log-log axes, slope annotated. */
export function renderRegretCurve(sweep: Table): string {
  requireColumns(sweep, ["N", "regret"], "regret_curve input");
  const ns = numericColumn(sweep, "N");
  const regrets = numericColumn(sweep, "regret");
  if (ns.length < 2) {
    throw new SchemaError("regret_curve needs at least two sweep rows");
  }
  const order = ns.map((_, i) => i).sort((a, b) => ns[a]! - ns[b]!);
  const xs = order.map((i) => Math.log10(ns[i]!));
  const ys = order.map((i) => Math.log10(regrets[i]!));
  const slope = fitLogLogSlope(
    order.map((i) => ns[i]!),
    order.map((i) => regrets[i]!),
  );

  const x = linearScale(Math.min(...xs), Math.max(...xs), PLOT.x0, PLOT.x1);
  const y = linearScale(Math.min(...ys), Math.max(...ys), PLOT.y0, PLOT.y1);
  let out = openSvg("mean regret vs task horizon (log-log)");
  out += axes("log10 N", "log10 regret", x, y);
  const pts: Array<[number, number]> = xs.map((vx, i) => [x(vx), y(ys[i]!)]);
  out += polyline(pts, PALETTE[0]!);
  for (const [px, py] of pts) {
    out += circle(px, py, 4, PALETTE[0]!);
  }
  out += text(PLOT.x1, PLOT.y1 + 14, `slope=${slope.toFixed(3)}`, {
    anchor: "end",
    size: 14,
    fill: PALETTE[3]!,
  });
  return out + closeSvg();
}

interface TrialRows {
  trial: string;
  tasks: number[];
  indices: number[];
}

function groupByTrial(table: Table, valueColumn: string): TrialRows[] {
  const trials = column(table, "trial");
  const tasks = numericColumn(table, "task");
  const values = numericColumn(table, valueColumn);
  const byTrial = new Map<string, TrialRows>();
  for (let i = 0; i < trials.length; i++) {
    const key = trials[i]!;
    let bucket = byTrial.get(key);
    if (!bucket) {
      bucket = { trial: key, tasks: [], indices: [] };
      byTrial.set(key, bucket);
    }
    bucket.tasks.push(tasks[i]!);
    bucket.indices.push(values[i]!);
  }
  return [...byTrial.values()];
}

/** Candidate-set size against the task index, one trace per trial. */
export function renderCandidatesTrace(runs: Table): string {
  requireColumns(runs, RUNS_HEADER, "candidates_trace input");
  const groups = groupByTrial(runs, "candidates").slice(0, MAX_TRACES);
  const maxTask = Math.max(...groups.map((g) => Math.max(...g.tasks)));
  const maxSize = Math.max(1, ...groups.map((g) => Math.max(...g.indices)));
  const x = linearScale(1, maxTask, PLOT.x0, PLOT.x1);
  const y = linearScale(0, maxSize, PLOT.y0, PLOT.y1);
  let out = openSvg("live candidate policies per task");
  out += axes("task", "candidates", x, y);
  groups.forEach((g, gi) => {
    const pts: Array<[number, number]> = g.tasks.map((t, i) => [x(t), y(g.indices[i]!)]);
    out += polyline(pts, PALETTE[gi % PALETTE.length]!, 1);
  });
  out += text(PLOT.x1, PLOT.y1 + 14, `${groups.length} trial(s)`, {
    anchor: "end",
    size: 11,
  });
  return out + closeSvg();
}

/** Fraction of trials committing to each policy index. */
export function renderCoverageBars(runs: Table): string {
  requireColumns(runs, RUNS_HEADER, "coverage_bars input");
  const trials = column(runs, "trial");
  const phases = column(runs, "phase");
  const policies = column(runs, "policy");
  const committed = new Map<string, string>();
  for (let i = 0; i < trials.length; i++) {
    const phase = phases[i]!;
    if (phase === "exploit" || phase === "fixed") {
      committed.set(trials[i]!, policies[i]!);
    }
  }
  const counts = new Map<string, number>();
  for (const policy of committed.values()) {
    counts.set(policy, (counts.get(policy) ?? 0) + 1);
  }
  const total = committed.size;
  let out = openSvg("committed-policy frequency across trials");
  if (total === 0) {
    out += text(WIDTH / 2, HEIGHT / 2, "no committed-phase rows", { anchor: "middle" });
    return out + closeSvg();
  }
  const labels = [...counts.keys()].sort((a, b) => Number(a) - Number(b));
  const x = linearScale(0, labels.length, PLOT.x0, PLOT.x1);
  const y = linearScale(0, 1, PLOT.y0, PLOT.y1);
  out += axes("policy index", "fraction of trials", x, y);
  labels.forEach((label, i) => {
    const frac = counts.get(label)! / total;
    const left = x(i + 0.2);
    const width = x(i + 0.8) - left;
    out += rect(left, y(frac), width, PLOT.y0 - y(frac), PALETTE[2]!);
    out += text((x(i + 0.2) + x(i + 0.8)) / 2, PLOT.y0 + 18, label, {
      anchor: "middle",
      size: 11,
    });
    out += text((x(i + 0.2) + x(i + 0.8)) / 2, y(frac) - 6, frac.toFixed(3), {
      anchor: "middle",
      size: 10,
    });
  });
  return out + closeSvg();
}

const PHASE_COLORS = new Map([
  ["esc1", PALETTE[4]!],
  ["esc2", PALETTE[5]!],
  ["explore", PALETTE[1]!],
  ["exploit", PALETTE[0]!],
  ["fixed", PALETTE[7]!],
]);

/** Per-trial phase bands over the task axis (search, explore, exploit, fixed). */
export function renderEscTimeline(runs: Table): string {
  requireColumns(runs, RUNS_HEADER, "esc_timeline input");
  const trials = column(runs, "trial");
  const tasks = numericColumn(runs, "task");
  const phases = column(runs, "phase");
  const keys: string[] = [];
  for (const t of trials) {
    if (!keys.includes(t)) {
      keys.push(t);
    }
  }
  const shown = keys.slice(0, MAX_TRACES);
  const maxTask = Math.max(...tasks);
  const x = linearScale(1, maxTask, PLOT.x0, PLOT.x1);
  const bandHeight = (PLOT.y0 - PLOT.y1) / Math.max(shown.length, 1);
  let out = openSvg("phase timeline per trial");
  out += line(PLOT.x0, PLOT.y0, PLOT.x1, PLOT.y0);
  out += text((PLOT.x0 + PLOT.x1) / 2, HEIGHT - 12, "task", { anchor: "middle" });
  shown.forEach((key, row) => {
    const top = PLOT.y1 + row * bandHeight;
    out += text(PLOT.x0 - 8, top + bandHeight / 2 + 4, `trial ${key}`, {
      anchor: "end",
      size: 10,
    });
    // contiguous segments of equal phase
    let segPhase: string | null = null;
    let segStart = 0;
    let prevTask = 0;
    const flush = (end: number) => {
      if (segPhase === null) {
        return;
      }
      const color = PHASE_COLORS.get(segPhase) ?? "#cccccc";
      out += rect(x(segStart), top + 2, x(end) - x(segStart) + 1, bandHeight - 4, color);
    };
    for (let i = 0; i < trials.length; i++) {
      if (trials[i] !== key) {
        continue;
      }
      const phase = phases[i]!;
      const task = tasks[i]!;
      if (phase !== segPhase) {
        flush(prevTask);
        segPhase = phase;
        segStart = task;
      }
      prevTask = task;
    }
    flush(prevTask);
  });
  let legendX = PLOT.x0;
  for (const [phase, color] of PHASE_COLORS) {
    if (!phases.includes(phase)) {
      continue;
    }
    out += rect(legendX, PLOT.y1 - 18, 12, 12, color);
    out += text(legendX + 16, PLOT.y1 - 8, phase, { size: 11 });
    legendX += 90;
  }
  if (!phases.includes("esc1") && !phases.includes("esc2")) {
    out += text(PLOT.x1, PLOT.y1 - 8, "no search-phase rows", { anchor: "end", size: 11 });
  }
  return out + closeSvg();
}
