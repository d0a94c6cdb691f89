/**
 * Tiny software canvas: an RGBA pixel buffer with the handful of drawing
 * primitives the figure scripts need. Everything is deterministic; there are
 * no timestamps, fonts, or platform-dependent rasterizers anywhere near it.
 */

import { GLYPH_HEIGHT, GLYPH_WIDTH, glyph } from "./font.js";

export type Color = [number, number, number, number];

export class Raster {
  readonly width: number;
  readonly height: number;
  readonly data: Uint8Array;

  constructor(width: number, height: number, background: Color = [255, 255, 255, 255]) {
    this.width = width;
    this.height = height;
    this.data = new Uint8Array(width * height * 4);
    for (let i = 0; i < width * height; i++) {
      this.data.set(background, i * 4);
    }
  }

  set(x: number, y: number, color: Color): void {
    if (x < 0 || y < 0 || x >= this.width || y >= this.height) return;
    this.data.set(color, (y * this.width + x) * 4);
  }

  blend(x: number, y: number, color: Color, alpha: number): void {
    if (x < 0 || y < 0 || x >= this.width || y >= this.height) return;
    const i = (y * this.width + x) * 4;
    for (let c = 0; c < 3; c++) {
      this.data[i + c] = Math.round(this.data[i + c] * (1 - alpha) + color[c] * alpha);
    }
  }

  fillRect(x0: number, y0: number, w: number, h: number, color: Color): void {
    for (let y = y0; y < y0 + h; y++) {
      for (let x = x0; x < x0 + w; x++) {
        this.set(x, y, color);
      }
    }
  }

  blendRect(x0: number, y0: number, w: number, h: number, color: Color, alpha: number): void {
    for (let y = y0; y < y0 + h; y++) {
      for (let x = x0; x < x0 + w; x++) {
        this.blend(x, y, color, alpha);
      }
    }
  }

  /** Bresenham segment, clipped by set(). */
  line(x0: number, y0: number, x1: number, y1: number, color: Color): void {
    let x = Math.round(x0);
    let y = Math.round(y0);
    const xe = Math.round(x1);
    const ye = Math.round(y1);
    const dx = Math.abs(xe - x);
    const dy = -Math.abs(ye - y);
    const sx = x < xe ? 1 : -1;
    const sy = y < ye ? 1 : -1;
    let err = dx + dy;
    for (;;) {
      this.set(x, y, color);
      if (x === xe && y === ye) break;
      const e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        x += sx;
      }
      if (e2 <= dx) {
        err += dx;
        y += sy;
      }
    }
  }

  polyline(xs: number[], ys: number[], color: Color): void {
    for (let i = 1; i < xs.length; i++) {
      this.line(xs[i - 1], ys[i - 1], xs[i], ys[i], color);
    }
  }

  text(x: number, y: number, text: string, color: Color, scale = 1): void {
    let cx = x;
    for (const ch of text) {
      const mask = glyph(ch.toLowerCase());
      if (mask) {
        for (let gy = 0; gy < GLYPH_HEIGHT; gy++) {
          for (let gx = 0; gx < GLYPH_WIDTH; gx++) {
            if (!mask[gy][gx]) continue;
            for (let sy = 0; sy < scale; sy++) {
              for (let sx = 0; sx < scale; sx++) {
                this.set(cx + gx * scale + sx, y + gy * scale + sy, color);
              }
            }
          }
        }
      }
      cx += (GLYPH_WIDTH + 1) * scale;
    }
  }
}

/** Dark-to-bright perceptual ramp (magma-like anchor interpolation), v in [0, 1]. */
export function heatColor(v: number): Color {
  const anchors: [number, Color][] = [
    [0.0, [0, 0, 4, 255]],
    [0.25, [81, 18, 124, 255]],
    [0.5, [183, 55, 121, 255]],
    [0.75, [252, 137, 97, 255]],
    [1.0, [252, 253, 191, 255]],
  ];
  const t = Math.min(1, Math.max(0, v));
  for (let i = 1; i < anchors.length; i++) {
    if (t <= anchors[i][0]) {
      const [t0, c0] = anchors[i - 1];
      const [t1, c1] = anchors[i];
      const f = (t - t0) / (t1 - t0);
      return [
        Math.round(c0[0] + f * (c1[0] - c0[0])),
        Math.round(c0[1] + f * (c1[1] - c0[1])),
        Math.round(c0[2] + f * (c1[2] - c0[2])),
        255,
      ];
    }
  }
  return anchors[anchors.length - 1][1];
}

export const FLAG_COLORS: Record<string, Color> = {
  transmitted: [64, 220, 255, 255],
  reflected: [255, 170, 40, 255],
  interior: [120, 255, 120, 255],
  ok: [235, 235, 235, 255],
  halted_node: [255, 80, 80, 255],
  exited_grid: [255, 80, 255, 255],
};

export function flagColor(flag: string): Color {
  return FLAG_COLORS[flag] ?? [200, 200, 200, 255];
}
