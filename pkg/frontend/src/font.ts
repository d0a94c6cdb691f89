/**
 * 5x7 bitmap glyphs for axis labels and annotations. Covers digits, the
 * characters of scientific notation, and the letters the plot labels use.
 */

const RAWS: Record<string, string[]> = {
  "0": ["01110", "10001", "10011", "10101", "11001", "10001", "01110"],
  "1": ["00100", "01100", "00100", "00100", "00100", "00100", "01110"],
  "2": ["01110", "10001", "00001", "00010", "00100", "01000", "11111"],
  "3": ["11110", "00001", "00001", "01110", "00001", "00001", "11110"],
  "4": ["00010", "00110", "01010", "10010", "11111", "00010", "00010"],
  "5": ["11111", "10000", "11110", "00001", "00001", "10001", "01110"],
  "6": ["00110", "01000", "10000", "11110", "10001", "10001", "01110"],
  "7": ["11111", "00001", "00010", "00100", "01000", "01000", "01000"],
  "8": ["01110", "10001", "10001", "01110", "10001", "10001", "01110"],
  "9": ["01110", "10001", "10001", "01111", "00001", "00010", "01100"],
  ".": ["00000", "00000", "00000", "00000", "00000", "01100", "01100"],
  "-": ["00000", "00000", "00000", "11111", "00000", "00000", "00000"],
  "+": ["00000", "00100", "00100", "11111", "00100", "00100", "00000"],
  "=": ["00000", "00000", "11111", "00000", "11111", "00000", "00000"],
  "e": ["00000", "00000", "01110", "10001", "11111", "10000", "01110"],
  "s": ["00000", "00000", "01111", "10000", "01110", "00001", "11110"],
  "l": ["01100", "00100", "00100", "00100", "00100", "00100", "01110"],
  "o": ["00000", "00000", "01110", "10001", "10001", "10001", "01110"],
  "p": ["00000", "00000", "11110", "10001", "11110", "10000", "10000"],
  "n": ["00000", "00000", "10110", "11001", "10001", "10001", "10001"],
  "t": ["01000", "01000", "11110", "01000", "01000", "01001", "00110"],
  "x": ["00000", "00000", "10001", "01010", "00100", "01010", "10001"],
  "r": ["00000", "00000", "10110", "11001", "10000", "10000", "10000"],
  "d": ["00001", "00001", "01111", "10001", "10001", "10001", "01111"],
  "i": ["00100", "00000", "01100", "00100", "00100", "00100", "01110"],
  "a": ["00000", "00000", "01110", "00001", "01111", "10001", "01111"],
  "u": ["00000", "00000", "10001", "10001", "10001", "10011", "01101"],
  " ": ["00000", "00000", "00000", "00000", "00000", "00000", "00000"],
};

export const GLYPH_WIDTH = 5;
export const GLYPH_HEIGHT = 7;

const GLYPHS = new Map<string, boolean[][]>();
for (const [ch, rows] of Object.entries(RAWS)) {
  GLYPHS.set(ch, rows.map((row) => [...row].map((c) => c === "1")));
}

/** Pixel mask for ch, or undefined if the face lacks it (caller skips). */
export function glyph(ch: string): boolean[][] | undefined {
  return GLYPHS.get(ch);
}

export function textWidth(text: string, scale = 1): number {
  return text.length * (GLYPH_WIDTH + 1) * scale;
}
