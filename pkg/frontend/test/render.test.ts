import * as fs from "fs";
import * as os from "os";
import * as path from "path";
import { describe, expect, it } from "vitest";

import { buildOptions, FigureSpec } from "../src/figures";
import { renderSvg } from "../src/render";
import { EmptyInput, SchemaMismatch, readLog, readSweep } from "../src/schema";
import { main } from "../src/cli";

const FIX = path.join(__dirname, "fixtures");
const CMP = ["rllp", "rllp_fixed_comp", "rllp_optimal"].map((v) =>
  path.join(FIX, "cmp", `${v}.csv`),
);
const SWEEP = path.join(FIX, "sweep", "sweep.csv");
const RUN = path.join(FIX, "run", "run.csv");
const WAYPOINTS = path.join(FIX, "waypoints.csv");

function tmpFile(name: string): string {
  return path.join(fs.mkdtempSync(path.join(os.tmpdir(), "rllp-plots-")), name);
}

function spec(kind: FigureSpec["kind"], inputs: string[], extra: Partial<FigureSpec> = {}): FigureSpec {
  return { kind, inputs, output: tmpFile("fig.svg"), ...extra };
}

function seriesOf(option: any): any[] {
  return Array.isArray(option.series) ? option.series : [option.series];
}

describe("schema", () => {
  it("reads all compare logs", () => {
    for (const f of CMP) {
      const rows = readLog(f);
      expect(rows.length).toBe(200);
      expect(rows[0].t).toBe(0);
    }
  });

  it("reads the sweep summary", () => {
    const rows = readSweep(SWEEP);
    expect(rows.length).toBe(3);
    expect(rows[0].l_d).toBe(0);
  });

  it("names the missing column", () => {
    const bad = tmpFile("bad.csv");
    fs.writeFileSync(bad, "t,x,y\n0,1,2\n");
    expect(() => readLog(bad)).toThrowError(SchemaMismatch);
    expect(() => readLog(bad)).toThrowError(/eta_lat|z/);
  });

  it("rejects empty inputs", () => {
    const empty = tmpFile("empty.csv");
    fs.writeFileSync(
      empty,
      "t,x,y,z,chi,gamma,target_idx,eta_lat,eta_lon,a_yc,a_zc,e_d,k1,k2,qp_status,clipped,d_chi,d_gamma\n",
    );
    expect(() => readLog(empty)).toThrowError(EmptyInput);
  });
});

describe("figure structure", () => {
  it("accel_series over the compare logs: 2 panels, 3 series each", () => {
    const option: any = buildOptions(spec("accel_series", CMP));
    expect(option.grid).toHaveLength(2);
    expect(option.xAxis).toHaveLength(2);
    const series = seriesOf(option);
    expect(series).toHaveLength(6);
    expect(series.filter((s) => s.xAxisIndex === 0)).toHaveLength(3);
    expect(series.filter((s) => s.xAxisIndex === 1)).toHaveLength(3);
    expect(new Set(series.map((s) => s.name)).size).toBe(3);
  });

  it("eta_series mirrors the two-angle layout", () => {
    const option: any = buildOptions(spec("eta_series", CMP));
    expect(option.grid).toHaveLength(2);
    expect(seriesOf(option)).toHaveLength(6);
  });

  it("ed_series is a single panel", () => {
    const option: any = buildOptions(spec("ed_series", CMP));
    expect(option.grid).toHaveLength(1);
    expect(seriesOf(option)).toHaveLength(3);
  });

  it("metric_bars over sweep.csv: 4 panels, mean+std bars", () => {
    const option: any = buildOptions(spec("metric_bars", [SWEEP]));
    expect(option.grid).toHaveLength(4);
    const series = seriesOf(option);
    expect(series).toHaveLength(8);
    expect(series.every((s) => s.type === "bar")).toBe(true);
    expect(option.xAxis[0].data).toHaveLength(3); // one group per l_d level
  });

  it("trajectory3d gets top+side panels and a reference overlay", () => {
    const option: any = buildOptions(spec("trajectory3d", [RUN], { pathFile: WAYPOINTS }));
    expect(option.grid).toHaveLength(2);
    const series = seriesOf(option);
    expect(series).toHaveLength(4); // (reference + run) x 2 panels
    expect(series.filter((s) => s.name === "reference")).toHaveLength(2);
  });
});

describe("rendering", () => {
  it("renders every kind on the compare/sweep outputs", () => {
    const specs: FigureSpec[] = [
      spec("accel_series", CMP),
      spec("eta_series", CMP),
      spec("ed_series", CMP),
      spec("metric_bars", [SWEEP]),
      spec("trajectory3d", [RUN], { pathFile: WAYPOINTS }),
    ];
    for (const s of specs) {
      const svg = renderSvg(s);
      expect(svg.startsWith("<svg")).toBe(true);
      expect(svg.length).toBeGreaterThan(2000);
    }
  });

  it("is byte-identical on rerun", () => {
    for (const s of [
      spec("accel_series", CMP),
      spec("metric_bars", [SWEEP]),
    ]) {
      const first = renderSvg(s);
      const second = renderSvg(s);
      expect(second).toBe(first);
    }
  });

  it("has no leftover renderer counters", () => {
    const svg = renderSvg(spec("ed_series", CMP));
    expect(svg).not.toMatch(/zr\d+-cls-/);
  });
});

describe("cli", () => {
  it("writes the requested file", () => {
    const out = tmpFile("cli.svg");
    const rc = main([
      "--kind", "accel_series",
      ...CMP.flatMap((f) => ["--input", f]),
      "--output", out,
    ]);
    expect(rc).toBe(0);
    expect(fs.existsSync(out)).toBe(true);
  });

  it("rejects unknown kinds", () => {
    expect(main(["--kind", "sparkline", "--input", RUN, "--output", "x.svg"])).toBe(1);
  });

  it("fails cleanly on schema mismatch", () => {
    const bad = tmpFile("bad.csv");
    fs.writeFileSync(bad, "a,b\n1,2\n");
    expect(main(["--kind", "ed_series", "--input", bad, "--output", tmpFile("o.svg")])).toBe(1);
  });
});
