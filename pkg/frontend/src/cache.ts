/**
 * The feature-cache container shared with the core library.
 *
 * Layout: magic "BSCF", u32 version, u64 row count, u64 dimension, a
 * 32-byte scattering-config digest, row-major float64 LE body, and a u32
 * CRC32 footer over header plus body.
 */

import { readFileSync, writeFileSync } from "node:fs";

import { crc32 } from "./binary.js";

const MAGIC = "BSCF";
const VERSION = 1;
const HEADER_SIZE = 4 + 4 + 8 + 8 + 32;

export interface Matrix {
  data: Float64Array; // row-major, rows * cols
  rows: number;
  cols: number;
}

export function matrixRow(m: Matrix, i: number): Float64Array {
  return m.data.subarray(i * m.cols, (i + 1) * m.cols);
}

export function writeCache(
  path: string,
  matrix: Matrix,
  digest?: Uint8Array,
): void {
  if (digest !== undefined && digest.length !== 32) {
    throw new Error("digest must be exactly 32 bytes");
  }
  const header = Buffer.alloc(HEADER_SIZE);
  header.write(MAGIC, 0, "latin1");
  header.writeUInt32LE(VERSION, 4);
  header.writeBigUInt64LE(BigInt(matrix.rows), 8);
  header.writeBigUInt64LE(BigInt(matrix.cols), 16);
  if (digest !== undefined) {
    Buffer.from(digest).copy(header, 24);
  }
  const body = Buffer.from(
    matrix.data.buffer,
    matrix.data.byteOffset,
    matrix.data.byteLength,
  );
  const footer = Buffer.alloc(4);
  footer.writeUInt32LE(crc32(Buffer.concat([header, body])), 0);
  writeFileSync(path, Buffer.concat([header, body, footer]));
}

export function readCache(path: string): Matrix & { digest: Uint8Array } {
  const raw = readFileSync(path);
  if (raw.length < HEADER_SIZE + 4) {
    throw new Error(`${path}: truncated cache file`);
  }
  if (raw.toString("latin1", 0, 4) !== MAGIC) {
    throw new Error(`${path}: bad magic`);
  }
  const version = raw.readUInt32LE(4);
  if (version !== VERSION) {
    throw new Error(`${path}: unsupported version ${version}`);
  }
  const rows = Number(raw.readBigUInt64LE(8));
  const cols = Number(raw.readBigUInt64LE(16));
  const digest = new Uint8Array(raw.subarray(24, 56));
  const bodyEnd = HEADER_SIZE + rows * cols * 8;
  if (raw.length !== bodyEnd + 4) {
    throw new Error(`${path}: unexpected file size`);
  }
  const stored = raw.readUInt32LE(bodyEnd);
  if (crc32(raw.subarray(0, bodyEnd)) !== stored) {
    throw new Error(`${path}: checksum mismatch`);
  }
  // copy into a fresh ArrayBuffer: aligned and detached from the file buffer
  const aligned = new ArrayBuffer(rows * cols * 8);
  raw.copy(new Uint8Array(aligned), 0, HEADER_SIZE, bodyEnd);
  return { data: new Float64Array(aligned), rows, cols, digest };
}
