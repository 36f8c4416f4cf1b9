/**
 * Readers for the exported text tables: the basin grid (x1,x2,label) and
 * set-region membership files (x1,x2,contained), both sampled on the same
 * regular 2-D mesh.
 */

export interface MeshTable {
  /** sorted unique x1 coordinates (columns of the plot) */
  xs: number[];
  /** sorted unique x2 coordinates (rows of the plot) */
  ys: number[];
  /** values indexed [ix * ys.length + iy], matching (xs[ix], ys[iy]) */
  values: Uint8Array;
}

export class FileFormatError extends Error {}

function splitLines(text: string): string[] {
  return text
    .split(/\r?\n/)
    .map((line) => line.trim())
    .filter((line) => line.length > 0);
}

function buildMesh(
  rows: Array<[number, number, number]>,
  source: string,
): MeshTable {
  const xs = Array.from(new Set(rows.map((r) => r[0]))).sort((a, b) => a - b);
  const ys = Array.from(new Set(rows.map((r) => r[1]))).sort((a, b) => a - b);
  if (xs.length * ys.length !== rows.length) {
    throw new FileFormatError(
      `${source}: ${rows.length} records do not form a full ` +
        `${xs.length} x ${ys.length} mesh`,
    );
  }
  const xIndex = new Map(xs.map((v, i) => [v, i]));
  const yIndex = new Map(ys.map((v, i) => [v, i]));
  const values = new Uint8Array(rows.length);
  const seen = new Uint8Array(rows.length);
  for (const [x, y, v] of rows) {
    const ix = xIndex.get(x)!;
    const iy = yIndex.get(y)!;
    const flat = ix * ys.length + iy;
    if (seen[flat]) {
      throw new FileFormatError(`${source}: duplicate record at (${x}, ${y})`);
    }
    seen[flat] = 1;
    values[flat] = v;
  }
  return { xs, ys, values };
}

function parseTable(
  text: string,
  source: string,
  lastColumn: string,
  decode: (raw: string) => number,
): MeshTable {
  const lines = splitLines(text);
  if (lines.length === 0) {
    throw new FileFormatError(`${source}: empty file`);
  }
  const header = lines[0].split(",");
  if (header.length !== 3 || header[0] !== "x1" || header[1] !== "x2" || header[2] !== lastColumn) {
    throw new FileFormatError(
      `${source}: expected header 'x1,x2,${lastColumn}', got '${lines[0]}'`,
    );
  }
  const rows: Array<[number, number, number]> = [];
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].split(",");
    if (parts.length !== 3) {
      throw new FileFormatError(`${source}:${i + 1}: expected 3 fields`);
    }
    const x = Number(parts[0]);
    const y = Number(parts[1]);
    if (!Number.isFinite(x) || !Number.isFinite(y)) {
      throw new FileFormatError(`${source}:${i + 1}: bad coordinates`);
    }
    rows.push([x, y, decode(parts[2])]);
  }
  if (rows.length === 0) {
    throw new FileFormatError(`${source}: no records`);
  }
  return buildMesh(rows, source);
}

/** Grid export: label column holds in_roa / not_in_roa; stored as 1 / 0. */
export function parseGrid(text: string, source = "grid"): MeshTable {
  return parseTable(text, source, "label", (raw) => {
    if (raw === "in_roa") return 1;
    if (raw === "not_in_roa") return 0;
    throw new FileFormatError(`${source}: unknown label '${raw}'`);
  });
}

/** Set-region export: contained column holds 0 / 1. */
export function parseRegion(text: string, source = "region"): MeshTable {
  return parseTable(text, source, "contained", (raw) => {
    if (raw === "0") return 0;
    if (raw === "1") return 1;
    throw new FileFormatError(`${source}: contained must be 0 or 1, got '${raw}'`);
  });
}

/** Regions must be sampled on exactly the grid's mesh. */
export function assertSameMesh(grid: MeshTable, region: MeshTable, source: string): void {
  const same =
    grid.xs.length === region.xs.length &&
    grid.ys.length === region.ys.length &&
    grid.xs.every((v, i) => v === region.xs[i]) &&
    grid.ys.every((v, i) => v === region.ys[i]);
  if (!same) {
    throw new FileFormatError(`${source}: region mesh does not match the grid mesh`);
  }
}
