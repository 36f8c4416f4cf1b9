/**
 * Minimal PNG writer (and matching reader for tests): 8-bit RGB, no
 * interlacing, filter type 0 on every scanline. Deflate comes from
 * node's zlib; CRC32 is implemented here (node 20 does not expose one).
 */

import * as zlib from "node:zlib";

const SIGNATURE = Buffer.from([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a]);

const CRC_TABLE = (() => {
  const table = new Uint32Array(256);
  for (let n = 0; n < 256; n++) {
    let c = n;
    for (let k = 0; k < 8; k++) {
      c = c & 1 ? 0xedb88320 ^ (c >>> 1) : c >>> 1;
    }
    table[n] = c >>> 0;
  }
  return table;
})();

export function crc32(data: Buffer): number {
  let c = 0xffffffff;
  for (let i = 0; i < data.length; i++) {
    c = CRC_TABLE[(c ^ data[i]) & 0xff] ^ (c >>> 8);
  }
  return (c ^ 0xffffffff) >>> 0;
}

function chunk(type: string, payload: Buffer): Buffer {
  const head = Buffer.alloc(4);
  head.writeUInt32BE(payload.length);
  const body = Buffer.concat([Buffer.from(type, "ascii"), payload]);
  const crc = Buffer.alloc(4);
  crc.writeUInt32BE(crc32(body));
  return Buffer.concat([head, body, crc]);
}

export interface TextEntry {
  keyword: string;
  value: string;
}

/** rgb is 3 bytes per pixel, row-major from the top-left. */
export function encodePng(
  width: number,
  height: number,
  rgb: Uint8Array,
  texts: TextEntry[] = [],
): Buffer {
  if (width < 1 || height < 1) {
    throw new Error("image must have positive dimensions");
  }
  if (rgb.length !== width * height * 3) {
    throw new Error(`pixel buffer has ${rgb.length} bytes, expected ${width * height * 3}`);
  }
  const ihdr = Buffer.alloc(13);
  ihdr.writeUInt32BE(width, 0);
  ihdr.writeUInt32BE(height, 4);
  ihdr[8] = 8; // bit depth
  ihdr[9] = 2; // color type: truecolor RGB
  ihdr[10] = 0; // deflate
  ihdr[11] = 0; // adaptive filtering
  ihdr[12] = 0; // no interlace

  const stride = width * 3;
  const raw = Buffer.alloc((stride + 1) * height);
  for (let row = 0; row < height; row++) {
    raw[row * (stride + 1)] = 0; // filter type 0
    raw.set(rgb.subarray(row * stride, (row + 1) * stride), row * (stride + 1) + 1);
  }

  const chunks = [SIGNATURE, chunk("IHDR", ihdr)];
  for (const t of texts) {
    chunks.push(chunk("tEXt", Buffer.from(`${t.keyword}\0${t.value}`, "latin1")));
  }
  chunks.push(chunk("IDAT", zlib.deflateSync(raw, { level: 9 })));
  chunks.push(chunk("IEND", Buffer.alloc(0)));
  return Buffer.concat(chunks);
}

export interface DecodedPng {
  width: number;
  height: number;
  rgb: Uint8Array;
  texts: TextEntry[];
}

/** Reads exactly the subset of PNG this module writes. */
export function decodePng(data: Buffer): DecodedPng {
  if (!data.subarray(0, 8).equals(SIGNATURE)) {
    throw new Error("not a PNG file");
  }
  let offset = 8;
  let width = 0;
  let height = 0;
  const idat: Buffer[] = [];
  const texts: TextEntry[] = [];
  while (offset < data.length) {
    const length = data.readUInt32BE(offset);
    const type = data.subarray(offset + 4, offset + 8).toString("ascii");
    const payload = data.subarray(offset + 8, offset + 8 + length);
    if (type === "IHDR") {
      width = payload.readUInt32BE(0);
      height = payload.readUInt32BE(4);
      if (payload[8] !== 8 || payload[9] !== 2) {
        throw new Error("only 8-bit RGB images are supported");
      }
    } else if (type === "IDAT") {
      idat.push(Buffer.from(payload));
    } else if (type === "tEXt") {
      const sep = payload.indexOf(0);
      texts.push({
        keyword: payload.subarray(0, sep).toString("latin1"),
        value: payload.subarray(sep + 1).toString("latin1"),
      });
    }
    offset += 12 + length;
  }
  const raw = zlib.inflateSync(Buffer.concat(idat));
  const stride = width * 3;
  const rgb = new Uint8Array(width * height * 3);
  for (let row = 0; row < height; row++) {
    if (raw[row * (stride + 1)] !== 0) {
      throw new Error("unsupported scanline filter");
    }
    rgb.set(raw.subarray(row * (stride + 1) + 1, (row + 1) * (stride + 1)), row * stride);
  }
  return { width, height, rgb, texts };
}
