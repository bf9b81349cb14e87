/**
 * Server-side SVG rendering. The zrender backend stamps global instance and
 * class counters into class attributes; those are rewritten by first
 * occurrence so repeated renders of the same figure are byte-identical.
 */

import * as echarts from "echarts";
import * as fs from "fs";
import { FigureSpec, buildOptions } from "./figures";

export function normalizeSvg(svg: string): string {
  // Instance prefix (zr0-, zr1-, ...) varies with the process-global chart
  // counter; the cls numbering is global across instances. Strip the former,
  // renumber the latter by first occurrence.
  const stripped = svg.replace(/\bzr\d+-/g, "zr-");
  const mapping = new Map<string, string>();
  return stripped.replace(/\bzr-cls-(\d+)\b/g, (match) => {
    let stable = mapping.get(match);
    if (stable === undefined) {
      stable = `zr-cls-${mapping.size}`;
      mapping.set(match, stable);
    }
    return stable;
  });
}

export function renderSvg(spec: FigureSpec, width = 900, height = 560): string {
  const option = buildOptions(spec);
  const chart = echarts.init(null, null, { renderer: "svg", ssr: true, width, height });
  try {
    chart.setOption(option);
    return normalizeSvg(chart.renderToSVGString());
  } finally {
    chart.dispose();
  }
}

export function renderToFile(spec: FigureSpec, width = 900, height = 560): void {
  fs.writeFileSync(spec.output, renderSvg(spec, width, height), "utf-8");
}
