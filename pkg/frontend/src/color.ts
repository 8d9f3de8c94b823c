/** HSL helpers matching the service's conversion, for painting the wheel. */

import type { HslDict } from "./types.js";

function roundHalfUp(x: number): number {
  return Math.floor(x + 0.5);
}

/** Hexcone HSL to 8-bit RGB, identical rounding to the server. */
export function hslToRgb(h: number, s: number, l: number): [number, number, number] {
  const hue = ((h % 360) + 360) % 360;
  const chroma = (1 - Math.abs(2 * l - 1)) * s;
  const hp = hue / 60;
  const x = chroma * (1 - Math.abs((hp % 2) - 1));
  const sextant = Math.min(Math.floor(hp), 5);
  const table: [number, number, number][] = [
    [chroma, x, 0],
    [x, chroma, 0],
    [0, chroma, x],
    [0, x, chroma],
    [x, 0, chroma],
    [chroma, 0, x],
  ];
  const [r1, g1, b1] = table[sextant];
  const m = l - chroma / 2;
  return [
    roundHalfUp(255 * (r1 + m)),
    roundHalfUp(255 * (g1 + m)),
    roundHalfUp(255 * (b1 + m)),
  ];
}

export function rgbHex(r: number, g: number, b: number): string {
  const two = (v: number) => v.toString(16).padStart(2, "0").toUpperCase();
  return `#${two(r)}${two(g)}${two(b)}`;
}

export function hslHex(c: HslDict): string {
  const [r, g, b] = hslToRgb(c.h, c.s, c.l);
  return rgbHex(r, g, b);
}

/** Color of a disc position: angle is hue, radius saturation. */
export function discColor(x: number, y: number, lightness: number): [number, number, number] {
  const r = Math.hypot(x, y);
  if (r === 0) return hslToRgb(0, 0, lightness);
  const h = (Math.atan2(y, x) * 180) / Math.PI;
  return hslToRgb(h, Math.min(r, 1), lightness);
}
