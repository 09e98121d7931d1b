/**
 * Bindings over the scattering + GP core for Node scripts and notebooks.
 *
 * Every call delegates to the core package through its public surfaces
 * (CLI subcommands, the binary feature-cache container, manifests and the
 * predictions JSON); no numerics are re-implemented here, so outputs are
 * bit-for-bit those of the core library.
 */

import { mkdirSync, mkdtempSync, readFileSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { npyBytes } from "./binary.js";
import { Matrix, readCache, writeCache } from "./cache.js";
import { runCli, withWorkdir } from "./runner.js";

export { Matrix, readCache, writeCache } from "./cache.js";
export { npyBytes, crc32 } from "./binary.js";
export { runCli } from "./runner.js";

export interface ImageBatch {
  /** n * channels * size * size values, C-order. */
  data: Float64Array;
  n: number;
  channels: number;
  size: number;
}

export interface ScatterOptions {
  numScales: number;
  numAngles?: number;
  maxOrder?: number;
  variant?: "windowed" | "global" | "rotinv";
  threads?: number;
}

export interface GpOptions {
  kernel?: string; // family[,ard]
  iters?: number;
  lr?: number;
  seed?: number;
  standardize?: boolean;
}

export interface SvgpOptions extends GpOptions {
  inducing?: number;
  batch?: number;
  steps?: number;
}

export interface Predictions {
  mean: Float64Array;
  variance: Float64Array;
  standardizedMean: Float64Array;
  standardizedVariance: Float64Array;
  targetStats: { mean: number; std: number };
}

export interface MetricsReport {
  rmse_raw: number;
  rmse_standardized: number;
  nll: number;
  qce: number;
  pi_mu: number;
  pi_sigma: number;
  n_test: number;
}

export interface BoTraceRow {
  iteration: number;
  index: number;
  value: number;
  best: number;
  regret: number;
}

export interface BoOptions {
  init?: number;
  iters?: number;
  pool?: number;
  kernel?: string;
  direction?: "minimize" | "maximize";
  gpIters?: number;
  seed?: number;
  standardize?: boolean;
}

const MANIFEST_HEADER = "# scatgp-manifest v1";

function writeManifest(
  path: string,
  rows: { path: string; target: number; split: "train" | "test" }[],
): void {
  const lines = [MANIFEST_HEADER];
  for (const row of rows) {
    lines.push(`${row.path}\t${row.target}\t${row.split}`);
  }
  writeFileSync(path, lines.join("\n") + "\n");
}

function writeImages(dir: string, images: ImageBatch): string[] {
  const { n, channels, size } = images;
  const per = channels * size * size;
  mkdirSync(join(dir, "images"), { recursive: true });
  const paths: string[] = [];
  for (let i = 0; i < n; i++) {
    const rel = `images/img_${String(i).padStart(5, "0")}.npy`;
    const slice = images.data.subarray(i * per, (i + 1) * per);
    writeFileSync(
      join(dir, rel),
      npyBytes(slice.slice(), [channels, size, size]),
    );
    paths.push(rel);
  }
  return paths;
}

function parsePredictions(text: string): Predictions {
  const raw = JSON.parse(text);
  return {
    mean: Float64Array.from(raw.mean),
    variance: Float64Array.from(raw.variance),
    standardizedMean: Float64Array.from(raw.standardized_mean),
    standardizedVariance: Float64Array.from(raw.standardized_variance),
    targetStats: { mean: raw.target_stats.mean, std: raw.target_stats.std },
  };
}

/** Scattering features of an image batch; rows follow batch order. */
export async function scatter(
  images: ImageBatch,
  options: ScatterOptions,
): Promise<Matrix> {
  if (images.n === 0) {
    // dimension is defined by the configuration, not worth a subprocess
    throw new Error("scatter needs at least one image");
  }
  return withWorkdir(async (dir) => {
    const paths = writeImages(dir, images);
    writeManifest(
      join(dir, "manifest.tsv"),
      paths.map((p) => ({ path: p, target: 0, split: "train" as const })),
    );
    const cachePath = join(dir, "features.bscf");
    await runCli([
      "features", "extract",
      "--manifest", join(dir, "manifest.tsv"),
      "--out", cachePath,
      "--j", String(options.numScales),
      "--l", String(options.numAngles ?? 8),
      "--order", String(options.maxOrder ?? 2),
      "--variant", options.variant ?? "global",
      "--threads", String(options.threads ?? 1),
    ]);
    const { data, rows, cols } = readCache(cachePath);
    return { data, rows, cols };
  });
}

async function fitPredict(
  head: "gp" | "svgp",
  x: Matrix,
  y: Float64Array,
  xTest: Matrix,
  options: GpOptions & SvgpOptions,
): Promise<Predictions> {
  if (x.rows !== y.length) {
    throw new Error(`${x.rows} feature rows vs ${y.length} targets`);
  }
  if (x.cols !== xTest.cols) {
    throw new Error(`train dim ${x.cols} != test dim ${xTest.cols}`);
  }
  return withWorkdir(async (dir) => {
    writeCache(join(dir, "train.bscf"), x);
    writeManifest(
      join(dir, "train.tsv"),
      Array.from(y, (target, i) => ({
        path: `row_${i}`, target, split: "train" as const,
      })),
    );
    writeCache(join(dir, "test.bscf"), xTest);
    writeManifest(
      join(dir, "test.tsv"),
      Array.from({ length: xTest.rows }, (_, i) => ({
        path: `row_${i}`, target: 0, split: "test" as const,
      })),
    );
    const model = join(dir, "model.npz");
    const fitArgs = [
      head, "fit",
      "--features", join(dir, "train.bscf"),
      "--targets", join(dir, "train.tsv"),
      "--kernel", options.kernel ?? "rbf",
      "--seed", String(options.seed ?? 0),
      "--standardize", options.standardize === false ? "off" : "on",
      "--out", model,
    ];
    if (head === "gp") {
      fitArgs.push("--iters", String(options.iters ?? 500),
                   "--lr", String(options.lr ?? 0.05));
    } else {
      fitArgs.push("--inducing", String(options.inducing ?? 1024),
                   "--batch", String(options.batch ?? 256),
                   "--steps", String(options.steps ?? 5000),
                   "--lr", String(options.lr ?? 0.01));
    }
    await runCli(fitArgs);
    const predPath = join(dir, "preds.json");
    await runCli([
      head, "eval",
      "--model", model,
      "--features", join(dir, "test.bscf"),
      "--targets", join(dir, "test.tsv"),
      "--metrics-out", join(dir, "metrics.json"),
      "--pred-out", predPath,
    ]);
    return parsePredictions(readFileSync(predPath, "utf8"));
  });
}

/** Exact-GP regression: fit on (x, y), predict marginals at xTest. */
export function gpFitPredict(
  x: Matrix,
  y: Float64Array,
  xTest: Matrix,
  options: GpOptions = {},
): Promise<Predictions> {
  return fitPredict("gp", x, y, xTest, options);
}

/** Sparse variational GP: fit on (x, y), predict marginals at xTest. */
export function svgpFitPredict(
  x: Matrix,
  y: Float64Array,
  xTest: Matrix,
  options: SvgpOptions = {},
): Promise<Predictions> {
  return fitPredict("svgp", x, y, xTest, options);
}

/** A fitted model kept on disk; predict any number of times, then dispose. */
export class FittedModel {
  constructor(
    private readonly head: "gp" | "svgp",
    private readonly dir: string,
    private readonly dim: number,
  ) {}

  get modelPath(): string {
    return join(this.dir, "model.npz");
  }

  async predict(xTest: Matrix): Promise<Predictions> {
    if (xTest.cols !== this.dim) {
      throw new Error(`test dim ${xTest.cols} != train dim ${this.dim}`);
    }
    writeCache(join(this.dir, "test.bscf"), xTest);
    writeManifest(
      join(this.dir, "test.tsv"),
      Array.from({ length: xTest.rows }, (_, i) => ({
        path: `row_${i}`, target: 0, split: "test" as const,
      })),
    );
    const predPath = join(this.dir, "preds.json");
    await runCli([
      this.head, "eval",
      "--model", this.modelPath,
      "--features", join(this.dir, "test.bscf"),
      "--targets", join(this.dir, "test.tsv"),
      "--metrics-out", join(this.dir, "metrics.json"),
      "--pred-out", predPath,
    ]);
    return parsePredictions(readFileSync(predPath, "utf8"));
  }

  dispose(): void {
    rmSync(this.dir, { recursive: true, force: true });
  }
}

async function fitModel(
  head: "gp" | "svgp",
  x: Matrix,
  y: Float64Array,
  options: GpOptions & SvgpOptions,
): Promise<FittedModel> {
  if (x.rows !== y.length) {
    throw new Error(`${x.rows} feature rows vs ${y.length} targets`);
  }
  const dir = mkdtempSync(join(tmpdir(), "scatgp-model-"));
  writeCache(join(dir, "train.bscf"), x);
  writeManifest(
    join(dir, "train.tsv"),
    Array.from(y, (target, i) => ({
      path: `row_${i}`, target, split: "train" as const,
    })),
  );
  const fitArgs = [
    head, "fit",
    "--features", join(dir, "train.bscf"),
    "--targets", join(dir, "train.tsv"),
    "--kernel", options.kernel ?? "rbf",
    "--seed", String(options.seed ?? 0),
    "--standardize", options.standardize === false ? "off" : "on",
    "--out", join(dir, "model.npz"),
  ];
  if (head === "gp") {
    fitArgs.push("--iters", String(options.iters ?? 500),
                 "--lr", String(options.lr ?? 0.05));
  } else {
    fitArgs.push("--inducing", String(options.inducing ?? 1024),
                 "--batch", String(options.batch ?? 256),
                 "--steps", String(options.steps ?? 5000),
                 "--lr", String(options.lr ?? 0.01));
  }
  await runCli(fitArgs);
  return new FittedModel(head, dir, x.cols);
}

/** Fit an exact GP and keep the model around for repeated prediction. */
export function gpFit(
  x: Matrix,
  y: Float64Array,
  options: GpOptions = {},
): Promise<FittedModel> {
  return fitModel("gp", x, y, options);
}

/** Predict with a previously fitted model. */
export function gpPredict(
  model: FittedModel,
  xTest: Matrix,
): Promise<Predictions> {
  return model.predict(xTest);
}

/** Fit a sparse variational GP and keep the model for prediction. */
export function svgpFit(
  x: Matrix,
  y: Float64Array,
  options: SvgpOptions = {},
): Promise<FittedModel> {
  return fitModel("svgp", x, y, options);
}

/** Uncertainty metrics of predictions against true targets. */
export async function metricsReport(
  predictions: Predictions,
  yTrue: Float64Array,
): Promise<MetricsReport> {
  return withWorkdir(async (dir) => {
    const predPath = join(dir, "preds.json");
    writeFileSync(
      predPath,
      JSON.stringify({
        mean: Array.from(predictions.mean),
        variance: Array.from(predictions.variance),
        standardized_mean: Array.from(predictions.standardizedMean),
        standardized_variance: Array.from(predictions.standardizedVariance),
        target_stats: {
          mean: predictions.targetStats.mean,
          std: predictions.targetStats.std,
        },
      }),
    );
    writeManifest(
      join(dir, "truth.tsv"),
      Array.from(yTrue, (target, i) => ({
        path: `row_${i}`, target, split: "test" as const,
      })),
    );
    const out = await runCli([
      "metrics", "report", "--pred", predPath,
      "--truth", join(dir, "truth.tsv"),
    ]);
    const report: Record<string, number> = {};
    for (const line of out.trim().split("\n")) {
      const [key, value] = line.split(":").map((s) => s.trim());
      report[key] = Number(value);
    }
    return report as unknown as MetricsReport;
  });
}

/** Pool-based Bayesian optimization over candidate features. */
export async function boRun(
  pool: Matrix,
  targets: Float64Array,
  options: BoOptions = {},
): Promise<BoTraceRow[]> {
  if (pool.rows !== targets.length) {
    throw new Error(`${pool.rows} pool rows vs ${targets.length} targets`);
  }
  return withWorkdir(async (dir) => {
    writeCache(join(dir, "pool.bscf"), pool);
    writeManifest(
      join(dir, "pool.tsv"),
      Array.from(targets, (target, i) => ({
        path: `row_${i}`, target, split: "train" as const,
      })),
    );
    const tracePath = join(dir, "trace.csv");
    await runCli([
      "bo", "run",
      "--pool-features", join(dir, "pool.bscf"),
      "--pool-targets", join(dir, "pool.tsv"),
      "--init", String(options.init ?? 50),
      "--iters", String(options.iters ?? 50),
      "--pool", String(options.pool ?? pool.rows),
      "--kernel", options.kernel ?? "matern52",
      "--direction", options.direction ?? "minimize",
      "--standardize", options.standardize === false ? "off" : "on",
      "--gp-iters", String(options.gpIters ?? 500),
      "--seed", String(options.seed ?? 0),
      "--trace-out", tracePath,
    ]);
    const lines = readFileSync(tracePath, "utf8").trim().split("\n");
    return lines.slice(1).map((line) => {
      const [iteration, index, value, best, regret] = line.split(",");
      return {
        iteration: Number(iteration),
        index: Number(index),
        value: Number(value),
        best: Number(best),
        regret: Number(regret),
      };
    });
  });
}
