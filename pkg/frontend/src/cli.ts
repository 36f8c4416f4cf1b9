#!/usr/bin/env node
/**
 * render --grid FILE [--sets FILE...] --out FILE.png
 *        [--scale N] [--title TEXT] [--inside HEX] [--outside HEX]
 *
 * Reads a basin grid export and any number of set-region exports and
 * writes a raster image. Exits 1 on missing or malformed inputs.
 */

import * as fs from "node:fs";

import { FileFormatError, parseGrid, parseRegion } from "./csv";
import { encodePng, TextEntry } from "./png";
import { DEFAULT_STYLE, render, RenderStyle, Rgb } from "./render";

interface CliArgs {
  grid: string;
  sets: string[];
  out: string;
  scale: number;
  title?: string;
  inside?: Rgb;
  outside?: Rgb;
}

export function parseArgs(argv: string[]): CliArgs {
  const args: CliArgs = { grid: "", sets: [], out: "", scale: DEFAULT_STYLE.scale };
  let i = 0;
  const next = (flag: string): string => {
    if (i + 1 >= argv.length) throw new Error(`${flag} needs a value`);
    return argv[++i];
  };
  for (; i < argv.length; i++) {
    const flag = argv[i];
    switch (flag) {
      case "--grid":
        args.grid = next(flag);
        break;
      case "--sets":
        args.sets.push(next(flag));
        while (i + 1 < argv.length && !argv[i + 1].startsWith("--")) {
          args.sets.push(argv[++i]);
        }
        break;
      case "--out":
        args.out = next(flag);
        break;
      case "--scale":
        args.scale = Number(next(flag));
        break;
      case "--title":
        args.title = next(flag);
        break;
      case "--inside":
        args.inside = parseHexColor(next(flag));
        break;
      case "--outside":
        args.outside = parseHexColor(next(flag));
        break;
      default:
        throw new Error(`unknown flag ${flag}`);
    }
  }
  if (!args.grid) throw new Error("--grid is required");
  if (!args.out) throw new Error("--out is required");
  if (!Number.isInteger(args.scale) || args.scale < 1) {
    throw new Error("--scale must be a positive integer");
  }
  return args;
}

export function parseHexColor(text: string): Rgb {
  const m = /^#?([0-9a-fA-F]{6})$/.exec(text);
  if (!m) throw new Error(`bad color '${text}'; expected RRGGBB`);
  const v = parseInt(m[1], 16);
  return [(v >> 16) & 0xff, (v >> 8) & 0xff, v & 0xff];
}

export function runCli(argv: string[]): number {
  let args: CliArgs;
  try {
    args = parseArgs(argv);
  } catch (err) {
    process.stderr.write(`error: ${(err as Error).message}\n`);
    return 1;
  }
  try {
    const grid = parseGrid(fs.readFileSync(args.grid, "utf8"), args.grid);
    const regions = args.sets.map((path) => parseRegion(fs.readFileSync(path, "utf8"), path));
    const style: Partial<RenderStyle> = { scale: args.scale };
    if (args.inside) style.insideColor = args.inside;
    if (args.outside) style.outsideColor = args.outside;
    const image = render(grid, regions, style);
    const texts: TextEntry[] = [{ keyword: "Software", value: "roa-region-plot" }];
    if (args.title) texts.push({ keyword: "Title", value: args.title });
    fs.writeFileSync(args.out, encodePng(image.width, image.height, image.rgb, texts));
    process.stdout.write(
      `wrote ${args.out} (${image.width}x${image.height}, ${regions.length} region file(s))\n`,
    );
    return 0;
  } catch (err) {
    if (err instanceof FileFormatError || (err as NodeJS.ErrnoException).code === "ENOENT") {
      process.stderr.write(`error: ${(err as Error).message}\n`);
      return 1;
    }
    throw err;
  }
}

if (require.main === module) {
  process.exit(runCli(process.argv.slice(2)));
}
