/**
 * Minimal NPY v1.0 reader/writer for little-endian float64 arrays in C order.
 * This is the wire format the gridprop CLI consumes and produces.
 */

const MAGIC = Buffer.from("\x93NUMPY", "latin1");

export interface NpyArray {
  shape: number[];
  data: Float64Array;
}

export function encodeNpy(shape: number[], data: Float64Array): Buffer {
  const count = shape.reduce((a, b) => a * b, 1);
  if (count !== data.length) {
    throw new Error(`shape [${shape}] does not match data length ${data.length}`);
  }
  const shapeText =
    shape.length === 1 ? `(${shape[0]},)` : `(${shape.join(", ")})`;
  let header = `{'descr': '<f8', 'fortran_order': False, 'shape': ${shapeText}, }`;
  // total header size (magic + version + length field + text) padded to 64
  const base = MAGIC.length + 2 + 2;
  const padded = Math.ceil((base + header.length + 1) / 64) * 64;
  header = header.padEnd(padded - base - 1, " ") + "\n";

  const out = Buffer.alloc(padded + count * 8);
  MAGIC.copy(out, 0);
  out.writeUInt8(1, 6); // major version
  out.writeUInt8(0, 7); // minor version
  out.writeUInt16LE(header.length, 8);
  out.write(header, 10, "latin1");
  // Float64Array is platform-endian; Node targets are little-endian
  Buffer.from(data.buffer, data.byteOffset, data.byteLength).copy(out, padded);
  return out;
}

export function decodeNpy(raw: Buffer): NpyArray {
  if (!raw.subarray(0, 6).equals(MAGIC)) {
    throw new Error("not an NPY file (bad magic)");
  }
  const major = raw.readUInt8(6);
  const headerLen =
    major === 1 ? raw.readUInt16LE(8) : raw.readUInt32LE(8);
  const headerStart = major === 1 ? 10 : 12;
  const header = raw.subarray(headerStart, headerStart + headerLen).toString("latin1");

  const descr = /'descr':\s*'([^']+)'/.exec(header)?.[1];
  if (descr !== "<f8") {
    throw new Error(`unsupported dtype ${descr}; expected little-endian float64`);
  }
  if (/'fortran_order':\s*True/.test(header)) {
    throw new Error("fortran-order arrays are not supported");
  }
  const shapeText = /'shape':\s*\(([^)]*)\)/.exec(header)?.[1] ?? "";
  const shape = shapeText
    .split(",")
    .map((s) => s.trim())
    .filter((s) => s.length > 0)
    .map((s) => Number.parseInt(s, 10));

  const count = shape.reduce((a, b) => a * b, 1);
  const body = raw.subarray(headerStart + headerLen);
  if (body.byteLength < count * 8) {
    throw new Error(`NPY payload truncated: need ${count * 8} bytes, have ${body.byteLength}`);
  }
  // copy so the result is aligned and detached from the file buffer
  const data = new Float64Array(count);
  for (let i = 0; i < count; i++) {
    data[i] = body.readDoubleLE(i * 8);
  }
  return { shape, data };
}
