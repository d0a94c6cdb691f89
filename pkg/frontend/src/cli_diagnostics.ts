#!/usr/bin/env node
/**
 * plot-diagnostics <report-glob> <out.png>
 *
 * The glob may contain '*' within one directory (quote it in the shell).
 * Prints a one-line JSON summary ({reports, slope, width, height}). Exit 2
 * on usage errors, 1 when the glob is empty or a report is corrupt.
 */

import { DataError } from "./data.js";
import { plotDiagnostics } from "./plot_diagnostics.js";

const args = process.argv.slice(2);
if (args.length !== 2) {
  console.error("usage: plot-diagnostics <report-glob> <out.png>");
  process.exit(2);
}

try {
  const summary = plotDiagnostics(args[0], args[1]);
  console.log(JSON.stringify(summary));
} catch (err) {
  if (err instanceof DataError) {
    console.error(`input error: ${err.message}`);
  } else {
    console.error(String(err));
  }
  process.exit(1);
}
