/**
 * Composes the region picture: points outside the basin in black, points
 * covered by any learned set in green, everything else white, plus a
 * marker on the grid point nearest the equilibrium at the origin.
 */

import { assertSameMesh, MeshTable } from "./csv";

export type Rgb = [number, number, number];

export interface RenderStyle {
  outsideColor: Rgb;
  insideColor: Rgb;
  backgroundColor: Rgb;
  markerColor: Rgb;
  /** integer pixel size of one grid cell */
  scale: number;
}

export const DEFAULT_STYLE: RenderStyle = {
  outsideColor: [0, 0, 0],
  insideColor: [0, 170, 60],
  backgroundColor: [255, 255, 255],
  markerColor: [220, 40, 40],
  scale: 4,
};

export interface RenderedImage {
  width: number;
  height: number;
  rgb: Uint8Array;
}

function nearestIndex(values: number[], target: number): number {
  let best = 0;
  for (let i = 1; i < values.length; i++) {
    if (Math.abs(values[i] - target) < Math.abs(values[best] - target)) {
      best = i;
    }
  }
  return best;
}

/**
 * One pixel block per grid point; x1 runs left to right, x2 bottom to top.
 * Covered points win over outside points so coverage mistakes stay visible.
 */
export function render(
  grid: MeshTable,
  regions: MeshTable[],
  style: Partial<RenderStyle> = {},
): RenderedImage {
  const st: RenderStyle = { ...DEFAULT_STYLE, ...style };
  if (!Number.isInteger(st.scale) || st.scale < 1) {
    throw new Error("scale must be a positive integer");
  }
  regions.forEach((region, i) => assertSameMesh(grid, region, `region ${i + 1}`));

  const nx = grid.xs.length;
  const ny = grid.ys.length;
  const covered = new Uint8Array(nx * ny);
  for (const region of regions) {
    for (let i = 0; i < covered.length; i++) {
      if (region.values[i]) covered[i] = 1;
    }
  }

  const markerX = nearestIndex(grid.xs, 0);
  const markerY = nearestIndex(grid.ys, 0);

  const width = nx * st.scale;
  const height = ny * st.scale;
  const rgb = new Uint8Array(width * height * 3);
  for (let ix = 0; ix < nx; ix++) {
    for (let iy = 0; iy < ny; iy++) {
      const flat = ix * ny + iy;
      let color: Rgb;
      if (ix === markerX && iy === markerY) {
        color = st.markerColor;
      } else if (covered[flat]) {
        color = st.insideColor;
      } else if (grid.values[flat] === 0) {
        color = st.outsideColor;
      } else {
        color = st.backgroundColor;
      }
      paintBlock(rgb, width, ix, ny - 1 - iy, st.scale, color);
    }
  }
  return { width, height, rgb };
}

function paintBlock(
  rgb: Uint8Array,
  width: number,
  col: number,
  row: number,
  scale: number,
  color: Rgb,
): void {
  for (let dy = 0; dy < scale; dy++) {
    const base = ((row * scale + dy) * width + col * scale) * 3;
    for (let dx = 0; dx < scale; dx++) {
      rgb[base + dx * 3] = color[0];
      rgb[base + dx * 3 + 1] = color[1];
      rgb[base + dx * 3 + 2] = color[2];
    }
  }
}
