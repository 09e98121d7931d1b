/**
 * Equivalence suite: every binding output must be bit-for-bit equal to
 * the core library called directly on the same inputs (the reference
 * scripts), across 10 randomized cases.
 */

import { execFileSync } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync, writeFileSync, mkdirSync } from "node:fs";
import { tmpdir } from "node:os";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { afterAll, describe, expect, it } from "vitest";

import { npyBytes } from "../src/binary.js";
import { Matrix, readCache, writeCache } from "../src/cache.js";
import {
  boRun,
  gpFit,
  gpFitPredict,
  gpPredict,
  ImageBatch,
  metricsReport,
  scatter,
  svgpFitPredict,
} from "../src/index.js";
import { pythonBinary } from "../src/runner.js";

const HERE = dirname(fileURLToPath(import.meta.url));
const workdirs: string[] = [];

function tempdir(): string {
  const dir = mkdtempSync(join(tmpdir(), "scatgp-ts-test-"));
  workdirs.push(dir);
  return dir;
}

afterAll(() => {
  for (const dir of workdirs) rmSync(dir, { recursive: true, force: true });
});

/** Deterministic PRNG so failures reproduce; adequate randomness for tests. */
function lcg(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state * 1664525 + 1013904223) >>> 0;
    return state / 2 ** 32;
  };
}

function randomArray(rand: () => number, length: number): Float64Array {
  const out = new Float64Array(length);
  for (let i = 0; i < length; i++) out[i] = 2.0 * rand() - 1.0;
  return out;
}

function readFloat64(path: string): Float64Array {
  const raw = readFileSync(path);
  const aligned = new ArrayBuffer(raw.length);
  raw.copy(new Uint8Array(aligned));
  return new Float64Array(aligned);
}

function expectBitwiseEqual(got: Float64Array, want: Float64Array): void {
  expect(got.length).toBe(want.length);
  const gotBits = new BigUint64Array(got.buffer, got.byteOffset, got.length);
  const wantBits = new BigUint64Array(want.buffer, want.byteOffset, want.length);
  for (let i = 0; i < got.length; i++) {
    expect(gotBits[i]).toBe(wantBits[i]);
  }
}

function makeBatch(rand: () => number, n: number, channels: number,
                   size: number): ImageBatch {
  return { data: randomArray(rand, n * channels * size * size), n, channels, size };
}

describe("bound scatter equals the core library bitwise", () => {
  const cases = [
    { seed: 1, n: 3, channels: 1, size: 32, j: 3, l: 8, variant: "global" },
    { seed: 2, n: 2, channels: 3, size: 16, j: 2, l: 4, variant: "global" },
    { seed: 3, n: 2, channels: 1, size: 16, j: 2, l: 4, variant: "windowed" },
    { seed: 4, n: 2, channels: 1, size: 16, j: 3, l: 8, variant: "rotinv" },
    { seed: 5, n: 1, channels: 2, size: 32, j: 4, l: 8, variant: "global" },
  ] as const;

  for (const c of cases) {
    it(`case seed=${c.seed} ${c.variant} ${c.channels}x${c.size}`, async () => {
      const batch = makeBatch(lcg(c.seed), c.n, c.channels, c.size);
      const features = await scatter(batch, {
        numScales: c.j, numAngles: c.l, variant: c.variant,
      });

      // reference: write the same images, run the core library directly
      const dir = tempdir();
      mkdirSync(join(dir, "images"));
      const per = c.channels * c.size * c.size;
      for (let i = 0; i < c.n; i++) {
        writeFileSync(
          join(dir, "images", `img_${String(i).padStart(5, "0")}.npy`),
          npyBytes(batch.data.slice(i * per, (i + 1) * per),
                   [c.channels, c.size, c.size]),
        );
      }
      const out = join(dir, "reference.bin");
      execFileSync(pythonBinary(), [
        join(HERE, "reference_scatter.py"), dir, String(c.n), String(c.j),
        String(c.l), "2", c.variant, out,
      ]);
      expectBitwiseEqual(features.data, readFloat64(out));
    }, 120_000);
  }
});

describe("bound GP fit/predict equals the core library bitwise", () => {
  const cases = [
    { seed: 11, n: 20, d: 5, nt: 7, kernel: "rbf", iters: 30 },
    { seed: 12, n: 15, d: 3, nt: 4, kernel: "matern52", iters: 25 },
    { seed: 13, n: 12, d: 4, nt: 5, kernel: "rbf,ard", iters: 20 },
    { seed: 14, n: 18, d: 2, nt: 3, kernel: "matern52,ard", iters: 15 },
    { seed: 15, n: 10, d: 6, nt: 2, kernel: "rbf", iters: 0 },
  ] as const;

  for (const c of cases) {
    it(`case seed=${c.seed} ${c.kernel} n=${c.n}`, async () => {
      const rand = lcg(c.seed);
      const x: Matrix = { data: randomArray(rand, c.n * c.d), rows: c.n, cols: c.d };
      const y = randomArray(rand, c.n);
      const xTest: Matrix = {
        data: randomArray(rand, c.nt * c.d), rows: c.nt, cols: c.d,
      };
      const pred = await gpFitPredict(x, y, xTest, {
        kernel: c.kernel, iters: c.iters, lr: 0.05,
      });

      const dir = tempdir();
      const write = (name: string, arr: Float64Array) => {
        const path = join(dir, name);
        writeFileSync(path, Buffer.from(arr.buffer, arr.byteOffset, arr.byteLength));
        return path;
      };
      const out = join(dir, "reference.bin");
      execFileSync(pythonBinary(), [
        join(HERE, "reference_gp.py"),
        write("x.bin", x.data), String(c.n), String(c.d),
        write("y.bin", y), write("xt.bin", xTest.data), String(c.nt),
        c.kernel, String(c.iters), "0.05", out,
      ]);
      const reference = readFloat64(out);
      expectBitwiseEqual(pred.mean, reference.subarray(0, c.nt));
      expectBitwiseEqual(pred.variance, reference.subarray(c.nt, 2 * c.nt));
      expectBitwiseEqual(pred.standardizedMean,
                         reference.subarray(2 * c.nt, 3 * c.nt));
      expectBitwiseEqual(pred.standardizedVariance,
                         reference.subarray(3 * c.nt, 4 * c.nt));
    }, 120_000);
  }
});

describe("remaining verbs work end to end", () => {
  it("gpFit keeps a reusable model; predictions match the one-shot path", async () => {
    const rand = lcg(41);
    const n = 14, d = 3;
    const x: Matrix = { data: randomArray(rand, n * d), rows: n, cols: d };
    const y = randomArray(rand, n);
    const xa: Matrix = { data: randomArray(rand, 4 * d), rows: 4, cols: d };
    const xb: Matrix = { data: randomArray(rand, 3 * d), rows: 3, cols: d };
    const model = await gpFit(x, y, { kernel: "rbf", iters: 20 });
    try {
      const predA = await gpPredict(model, xa);
      const predB = await model.predict(xb);
      expect(predA.mean.length).toBe(4);
      expect(predB.mean.length).toBe(3);
      const oneShot = await gpFitPredict(x, y, xa, { kernel: "rbf", iters: 20 });
      expectBitwiseEqual(predA.mean, oneShot.mean);
      expectBitwiseEqual(predA.variance, oneShot.variance);
    } finally {
      model.dispose();
    }
  }, 180_000);

  it("cache round-trips through the shared binary format", () => {
    const rand = lcg(77);
    const matrix: Matrix = { data: randomArray(rand, 12), rows: 3, cols: 4 };
    const dir = tempdir();
    const path = join(dir, "m.bscf");
    writeCache(path, matrix);
    const back = readCache(path);
    expect(back.rows).toBe(3);
    expect(back.cols).toBe(4);
    expectBitwiseEqual(back.data, matrix.data);
  });

  it("svgp fit/predict returns positive variances", async () => {
    const rand = lcg(21);
    const n = 25, d = 3;
    const x: Matrix = { data: randomArray(rand, n * d), rows: n, cols: d };
    const y = randomArray(rand, n);
    const xTest: Matrix = { data: randomArray(rand, 5 * d), rows: 5, cols: d };
    const pred = await svgpFitPredict(x, y, xTest, {
      inducing: 8, batch: 16, steps: 30, seed: 0,
    });
    expect(pred.mean.length).toBe(5);
    for (const v of pred.standardizedVariance) expect(v).toBeGreaterThan(0);
  }, 180_000);

  it("metrics report recovers the trivial-baseline anchor", async () => {
    const n = 64;
    const pred = {
      mean: new Float64Array(n).fill(2.0),
      variance: new Float64Array(n).fill(9.0),
      standardizedMean: new Float64Array(n),
      standardizedVariance: new Float64Array(n).fill(1.0),
      targetStats: { mean: 2.0, std: 3.0 },
    };
    const rand = lcg(5);
    const truths = new Float64Array(n);
    for (let i = 0; i < n; i++) truths[i] = 2.0 + 3.0 * (2 * rand() - 1);
    const report = await metricsReport(pred, truths);
    expect(report.pi_mu).toBeCloseTo(3.92, 12);
    expect(report.pi_sigma).toBeCloseTo(0.0, 12);
    expect(report.n_test).toBe(n);
  }, 60_000);

  it("bo run returns a monotone trace", async () => {
    const rand = lcg(31);
    const size = 40, d = 2;
    const pool: Matrix = { data: randomArray(rand, size * d), rows: size, cols: d };
    const targets = new Float64Array(size);
    for (let i = 0; i < size; i++) {
      const a = pool.data[i * d], b = pool.data[i * d + 1];
      targets[i] = Math.sin(3 * a) + b * b;
    }
    const trace = await boRun(pool, targets, {
      init: 6, iters: 8, pool: size, gpIters: 40, seed: 1,
    });
    expect(trace.length).toBe(8);
    for (let i = 1; i < trace.length; i++) {
      expect(trace[i].best).toBeLessThanOrEqual(trace[i - 1].best + 1e-12);
      expect(trace[i].regret).toBeLessThanOrEqual(trace[i - 1].regret + 1e-12);
    }
    expect(trace[trace.length - 1].regret).toBeGreaterThanOrEqual(0);
  }, 120_000);
});
