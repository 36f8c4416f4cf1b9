import { describe, expect, it } from "vitest";

import { crc32, decodePng, encodePng } from "../src/png";

describe("crc32", () => {
  it("matches the standard test vector", () => {
    expect(crc32(Buffer.from("123456789", "ascii"))).toBe(0xcbf43926);
  });

  it("of the empty buffer is zero", () => {
    expect(crc32(Buffer.alloc(0))).toBe(0);
  });
});

describe("png round trip", () => {
  it("encodes and decodes pixels exactly", () => {
    const width = 5;
    const height = 3;
    const rgb = new Uint8Array(width * height * 3);
    for (let i = 0; i < rgb.length; i++) rgb[i] = (i * 37) % 256;
    const decoded = decodePng(encodePng(width, height, rgb));
    expect(decoded.width).toBe(width);
    expect(decoded.height).toBe(height);
    expect(Array.from(decoded.rgb)).toEqual(Array.from(rgb));
  });

  it("starts with the png signature", () => {
    const data = encodePng(1, 1, new Uint8Array([1, 2, 3]));
    expect(Array.from(data.subarray(0, 8))).toEqual([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a]);
  });

  it("carries text metadata", () => {
    const data = encodePng(1, 1, new Uint8Array(3), [{ keyword: "Title", value: "demo" }]);
    const texts = decodePng(data).texts;
    expect(texts).toContainEqual({ keyword: "Title", value: "demo" });
  });

  it("is deterministic", () => {
    const rgb = new Uint8Array([9, 8, 7, 6, 5, 4]);
    const a = encodePng(2, 1, rgb);
    const b = encodePng(2, 1, rgb);
    expect(a.equals(b)).toBe(true);
  });

  it("rejects a wrong buffer size", () => {
    expect(() => encodePng(2, 2, new Uint8Array(5))).toThrow(/expected/);
  });
});
