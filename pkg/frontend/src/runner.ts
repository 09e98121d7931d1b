/** Subprocess plumbing around the core command-line tool. */

import { execFile } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

/** Python interpreter used to launch the core package. */
export function pythonBinary(): string {
  return process.env.SCATGP_PYTHON ?? "python3";
}

export function runCli(args: string[]): Promise<string> {
  return new Promise((resolve, reject) => {
    execFile(
      pythonBinary(),
      ["-m", "scatgp.cli", ...args],
      { maxBuffer: 64 * 1024 * 1024 },
      (error, stdout, stderr) => {
        if (error) {
          reject(
            new Error(`scatgp ${args[0] ?? ""} failed: ${stderr || error.message}`),
          );
        } else {
          resolve(stdout);
        }
      },
    );
  });
}

export async function withWorkdir<T>(
  fn: (dir: string) => Promise<T>,
): Promise<T> {
  const dir = mkdtempSync(join(tmpdir(), "scatgp-"));
  try {
    return await fn(dir);
  } finally {
    rmSync(dir, { recursive: true, force: true });
  }
}
