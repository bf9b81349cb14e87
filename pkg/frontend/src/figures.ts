/**
 * Option builders: one echarts option per figure kind, multi-panel via grid
 * indices. Kept free of any rendering so tests can inspect panel and series
 * structure directly.
 */

import type { EChartsOption, SeriesOption } from "echarts";
import { LogRow, SweepRow, readLog, readPathCsv, readSweep, seriesName } from "./schema";

export type FigureKind =
  | "trajectory3d"
  | "eta_series"
  | "accel_series"
  | "ed_series"
  | "metric_bars";

export const FIGURE_KINDS: FigureKind[] = [
  "trajectory3d", "eta_series", "accel_series", "ed_series", "metric_bars",
];

export interface FigureSpec {
  kind: FigureKind;
  inputs: string[];
  output: string;
  /** Reference waypoint CSV, drawn under trajectory panels. */
  pathFile?: string;
}

const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

const BASE: EChartsOption = {
  animation: false,
  backgroundColor: "#ffffff",
  textStyle: { fontFamily: "sans-serif" },
  color: PALETTE,
};

interface Panel {
  title: string;
  xName: string;
  yName: string;
}

/** Two stacked (or 2x2) cartesian grids with shared styling. */
function panelGrids(n: number): EChartsOption {
  if (n === 1) {
    return {
      grid: [{ left: 70, right: 30, top: 45, bottom: 55 }],
    };
  }
  if (n === 2) {
    return {
      grid: [
        { left: 70, right: 30, top: 45, height: "33%" },
        { left: 70, right: 30, bottom: 55, height: "33%" },
      ],
    };
  }
  return {
    grid: [
      { left: 70, width: "38%", top: 45, height: "32%" },
      { right: 40, width: "38%", top: 45, height: "32%" },
      { left: 70, width: "38%", bottom: 60, height: "32%" },
      { right: 40, width: "38%", bottom: 60, height: "32%" },
    ],
  };
}

function panelAxes(panels: Panel[], categories?: string[]): EChartsOption {
  return {
    title: panels.map((p, i) => ({
      text: p.title,
      textStyle: { fontSize: 13 },
      left: i % 2 === 0 || panels.length <= 2 ? 70 : undefined,
      right: panels.length > 2 && i % 2 === 1 ? 40 : undefined,
      top: i < 2 || panels.length <= 2 ? 8 : undefined,
    })).map((t, i) => (panels.length === 2 && i === 1 ? { ...t, top: "52%" } : t)),
    xAxis: panels.map((p, i) => ({
      gridIndex: i,
      type: categories ? ("category" as const) : ("value" as const),
      name: p.xName,
      nameLocation: "middle" as const,
      nameGap: 28,
      data: categories,
    })),
    yAxis: panels.map((p, i) => ({
      gridIndex: i,
      type: "value" as const,
      name: p.yName,
      nameGap: 45,
      nameLocation: "middle" as const,
    })),
  };
}

function lineSeries(
  name: string,
  data: Array<[number, number]>,
  panel: number,
  style?: Partial<SeriesOption>,
): SeriesOption {
  return {
    type: "line",
    name,
    data,
    xAxisIndex: panel,
    yAxisIndex: panel,
    showSymbol: false,
    lineStyle: { width: 1.2 },
    ...style,
  } as SeriesOption;
}

function multiPanelFromLogs(
  spec: FigureSpec,
  panels: Panel[],
  extract: (row: LogRow, panel: number) => [number, number],
): EChartsOption {
  const series: SeriesOption[] = [];
  for (const input of spec.inputs) {
    const rows = readLog(input);
    const name = seriesName(input);
    panels.forEach((_, p) => {
      series.push(lineSeries(name, rows.map((r) => extract(r, p)), p));
    });
  }
  return {
    ...BASE,
    ...panelGrids(panels.length),
    ...panelAxes(panels),
    legend: { bottom: 2, data: spec.inputs.map(seriesName) },
    series,
  };
}

function trajectory(spec: FigureSpec): EChartsOption {
  const panels: Panel[] = [
    { title: "Top view", xName: "x [m]", yName: "y [m]" },
    { title: "Side view", xName: "x [m]", yName: "z [m]" },
  ];
  const series: SeriesOption[] = [];
  if (spec.pathFile) {
    const pts = readPathCsv(spec.pathFile);
    const style: Partial<SeriesOption> = {
      lineStyle: { width: 1, type: "dashed", color: "#666" } as never,
      itemStyle: { color: "#666" } as never,
    };
    series.push(lineSeries("reference", pts.map((p) => [p[0], p[1]]), 0, style));
    series.push(lineSeries("reference", pts.map((p) => [p[0], p[2]]), 1, style));
  }
  for (const input of spec.inputs) {
    const rows = readLog(input);
    const name = seriesName(input);
    series.push(lineSeries(name, rows.map((r) => [r.x, r.y]), 0));
    series.push(lineSeries(name, rows.map((r) => [r.x, r.z]), 1));
  }
  const names = spec.inputs.map(seriesName);
  return {
    ...BASE,
    ...panelGrids(2),
    ...panelAxes(panels),
    legend: { bottom: 2, data: spec.pathFile ? ["reference", ...names] : names },
    series,
  };
}

function metricBars(spec: FigureSpec): EChartsOption {
  if (spec.inputs.length !== 1) {
    throw new Error("metric_bars expects exactly one sweep.csv input");
  }
  const rows: SweepRow[] = readSweep(spec.inputs[0]);
  const levels = rows.map((r) => r.l_d.toPrecision(4));
  const metrics = ["eta_lon", "eta_lat", "a_yc", "a_zc"];
  const panels: Panel[] = metrics.map((m) => ({
    title: m,
    xName: "l_d [rad/s]",
    yName: m.startsWith("a_") ? "[m/s^2]" : "[rad]",
  }));
  const series: SeriesOption[] = [];
  metrics.forEach((m, p) => {
    for (const stat of ["mean", "std"] as const) {
      series.push({
        type: "bar",
        name: stat,
        data: rows.map((r) => r[`${m}_${stat}`]),
        xAxisIndex: p,
        yAxisIndex: p,
      } as SeriesOption);
    }
  });
  return {
    ...BASE,
    ...panelGrids(4),
    ...panelAxes(panels, levels),
    legend: { bottom: 2, data: ["mean", "std"] },
    series,
  };
}

export function buildOptions(spec: FigureSpec): EChartsOption {
  if (spec.inputs.length === 0) throw new Error("no input files given");
  switch (spec.kind) {
    case "trajectory3d":
      return trajectory(spec);
    case "eta_series":
      return multiPanelFromLogs(
        spec,
        [
          { title: "Lateral look-ahead angle", xName: "t [s]", yName: "eta_lat [rad]" },
          { title: "Longitudinal look-ahead angle", xName: "t [s]", yName: "eta_lon [rad]" },
        ],
        (r, p) => [r.t, p === 0 ? r.eta_lat : r.eta_lon],
      );
    case "accel_series":
      return multiPanelFromLogs(
        spec,
        [
          { title: "Lateral acceleration command", xName: "t [s]", yName: "a_yc [m/s^2]" },
          { title: "Normal acceleration command", xName: "t [s]", yName: "a_zc [m/s^2]" },
        ],
        (r, p) => [r.t, p === 0 ? r.a_yc : r.a_zc],
      );
    case "ed_series":
      return multiPanelFromLogs(
        spec,
        [{ title: "Distance error", xName: "t [s]", yName: "e_d [m]" }],
        (r) => [r.t, r.e_d],
      );
    case "metric_bars":
      return metricBars(spec);
    default: {
      const never: never = spec.kind;
      throw new Error(`unknown figure kind ${never}`);
    }
  }
}
