export { FileFormatError, MeshTable, assertSameMesh, parseGrid, parseRegion } from "./csv";
export { DecodedPng, TextEntry, crc32, decodePng, encodePng } from "./png";
export { DEFAULT_STYLE, RenderStyle, RenderedImage, Rgb, render } from "./render";
export { parseArgs, parseHexColor, runCli } from "./cli";
