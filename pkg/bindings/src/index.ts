/**
 * Typed-array bindings for the gridprop propagation kernels.
 *
 * The kernels run in the gridprop CLI; this layer validates inputs, ships
 * them across the NPY wire format, and returns the outputs as fresh
 * Float64Arrays.  Dispatch is async (child process), so callers never block
 * the host event loop, and input buffers are only ever read.
 */

import { execFile } from "node:child_process";
import { mkdtemp, readFile, rm, writeFile } from "node:fs/promises";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { promisify } from "node:util";

import { decodeNpy, encodeNpy } from "./npy.js";

const execFileAsync = promisify(execFile);

export const VERSION = "0.1.0";

/** Interpreter used to launch the core CLI; override via GRIDPROP_PYTHON. */
export function pythonExecutable(): string {
  return process.env.GRIDPROP_PYTHON ?? "python3";
}

export interface GuideArray {
  /** row-major (height, width, channels) values */
  data: Float64Array;
  height: number;
  width: number;
  channels: number;
}

export interface FieldArray {
  /** channel-major (channels, height, width) values */
  data: Float64Array;
  channels: number;
  height: number;
  width: number;
}

export type CombineMode = "parallel" | "gp-lp" | "lp-gp";

export interface PseudoLabelOptions {
  zetaG?: number;
  zetaS?: number;
  radius?: number;
  iterations?: number;
  mode?: CombineMode;
  feature?: GuideArray;
}

export interface PseudoLabelResult {
  yGlobal: FieldArray;
  yLocal: FieldArray;
  mode: CombineMode;
  cascaded: boolean;
}

/** Raised when the core rejects the inputs (shape/validation, exit code 4). */
export class CoreValidationError extends Error {}
/** Raised when the core cannot be reached or files cannot move (exit code 3 etc.). */
export class CoreDispatchError extends Error {}

function checkGuide(guide: GuideArray, name = "image"): void {
  const { data, height, width, channels } = guide;
  if (!(data instanceof Float64Array)) {
    throw new CoreValidationError(`${name}.data must be a Float64Array`);
  }
  if (!Number.isInteger(height) || !Number.isInteger(width) || !Number.isInteger(channels)
      || height < 1 || width < 1 || channels < 1) {
    throw new CoreValidationError(`${name} dims must be positive integers`);
  }
  if (data.length !== height * width * channels) {
    throw new CoreValidationError(
      `${name}.data has ${data.length} values, expected ${height * width * channels}`,
    );
  }
  for (let i = 0; i < data.length; i++) {
    if (!Number.isFinite(data[i])) {
      throw new CoreValidationError(`${name} contains a non-finite value at index ${i}`);
    }
  }
}

function checkField(field: FieldArray, name = "phi"): void {
  const { data, channels, height, width } = field;
  if (!(data instanceof Float64Array)) {
    throw new CoreValidationError(`${name}.data must be a Float64Array`);
  }
  if (!Number.isInteger(channels) || !Number.isInteger(height) || !Number.isInteger(width)
      || channels < 1 || height < 1 || width < 1) {
    throw new CoreValidationError(`${name} dims must be positive integers`);
  }
  if (data.length !== channels * height * width) {
    throw new CoreValidationError(
      `${name}.data has ${data.length} values, expected ${channels * height * width}`,
    );
  }
  for (let i = 0; i < data.length; i++) {
    if (!Number.isFinite(data[i])) {
      throw new CoreValidationError(`${name} contains a non-finite value at index ${i}`);
    }
  }
}

function checkPositive(value: number, name: string): void {
  if (!Number.isFinite(value) || value <= 0) {
    throw new CoreValidationError(`${name} must be a positive finite number, got ${value}`);
  }
}

async function runCli(args: string[], cwd: string): Promise<void> {
  try {
    await execFileAsync(pythonExecutable(), ["-m", "gridprop", ...args], {
      cwd,
      maxBuffer: 1 << 24,
    });
  } catch (err) {
    const e = err as { code?: number | string; stderr?: string; message?: string };
    const detail = (e.stderr ?? e.message ?? "unknown failure").trim();
    if (e.code === 4) {
      throw new CoreValidationError(detail);
    }
    throw new CoreDispatchError(detail);
  }
}

interface PropagateRequest {
  image: GuideArray;
  phi: FieldArray;
  zetaG: number;
  zetaS: number;
  radius: number;
  iterations: number;
  mode: CombineMode;
  feature?: GuideArray;
}

async function propagateViaCli(req: PropagateRequest): Promise<{ g: FieldArray; s: FieldArray }> {
  checkGuide(req.image);
  checkField(req.phi);
  if (req.phi.height !== req.image.height || req.phi.width !== req.image.width) {
    throw new CoreValidationError(
      `phi is ${req.phi.height}x${req.phi.width} but image is ${req.image.height}x${req.image.width}`,
    );
  }
  checkPositive(req.zetaG, "zetaG");
  checkPositive(req.zetaS, "zetaS");
  checkPositive(req.radius, "radius");
  checkPositive(req.iterations, "iterations");
  if (req.feature) {
    checkGuide(req.feature, "feature");
  }

  const dir = await mkdtemp(join(tmpdir(), "gridprop-"));
  try {
    const imagePath = join(dir, "image.npy");
    const unaryPath = join(dir, "phi.npy");
    await writeFile(
      imagePath,
      encodeNpy([req.image.height, req.image.width, req.image.channels], req.image.data),
    );
    await writeFile(
      unaryPath,
      encodeNpy([req.phi.channels, req.phi.height, req.phi.width], req.phi.data),
    );
    const args = [
      "propagate",
      "--image", imagePath,
      "--unary", unaryPath,
      "--mode", req.mode,
      "--zeta-g", String(req.zetaG),
      "--zeta-s", String(req.zetaS),
      "--radius", String(req.radius),
      "--iters", String(req.iterations),
      "--out-prefix", join(dir, "out"),
    ];
    if (req.feature) {
      const featurePath = join(dir, "feature.npy");
      await writeFile(
        featurePath,
        encodeNpy(
          [req.feature.height, req.feature.width, req.feature.channels],
          req.feature.data,
        ),
      );
      args.push("--feature", featurePath);
    }
    await runCli(args, dir);

    const g = decodeNpy(await readFile(join(dir, "out_g.npy")));
    const s = decodeNpy(await readFile(join(dir, "out_s.npy")));
    const toField = (arr: { shape: number[]; data: Float64Array }): FieldArray => ({
      data: arr.data,
      channels: arr.shape[0],
      height: arr.shape[1],
      width: arr.shape[2],
    });
    return { g: toField(g), s: toField(s) };
  } finally {
    await rm(dir, { recursive: true, force: true });
  }
}

/** Global propagation of phi over the image's spanning tree. */
export async function boundGlobalPropagate(
  image: GuideArray,
  phi: FieldArray,
  zetaG: number,
): Promise<FieldArray> {
  const { g } = await propagateViaCli({
    image,
    phi,
    zetaG,
    // the local arm of the parallel pass is discarded; keep it minimal
    zetaS: 1.0,
    radius: 1,
    iterations: 1,
    mode: "parallel",
  });
  return g;
}

/** Iterated local window propagation of phi under the image. */
export async function boundLocalPropagate(
  image: GuideArray,
  phi: FieldArray,
  zetaS: number,
  radius = 2,
  iterations = 20,
): Promise<FieldArray> {
  const { s } = await propagateViaCli({
    image,
    phi,
    zetaG: 1.0,
    zetaS,
    radius,
    iterations,
    mode: "parallel",
  });
  return s;
}

/** Full pseudo-label generation in the requested combination mode. */
export async function boundGeneratePseudoLabels(
  image: GuideArray,
  phi: FieldArray,
  options: PseudoLabelOptions = {},
): Promise<PseudoLabelResult> {
  const mode = options.mode ?? "parallel";
  const { g, s } = await propagateViaCli({
    image,
    phi,
    zetaG: options.zetaG ?? 0.07,
    zetaS: options.zetaS ?? 0.15,
    radius: options.radius ?? 2,
    iterations: options.iterations ?? 20,
    mode,
    feature: options.feature,
  });
  return { yGlobal: g, yLocal: s, mode, cascaded: mode !== "parallel" };
}

/** Version string of the core library the binding dispatches to. */
export async function coreVersion(): Promise<string> {
  try {
    const { stdout } = await execFileAsync(pythonExecutable(), ["-m", "gridprop", "--version"]);
    return stdout.trim();
  } catch (err) {
    throw new CoreDispatchError(`cannot query core version: ${(err as Error).message}`);
  }
}
