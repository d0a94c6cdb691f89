#!/usr/bin/env node
/**
 * plot-trajectories <trajectories.csv> <frames.ndjson> <out.png>
 *
 * Prints a one-line JSON summary ({worldlines, frames, width, height}) on
 * success. Exit 2 on usage errors, 1 on unreadable or mismatched inputs.
 */

import { DataError } from "./data.js";
import { plotTrajectories } from "./plot_trajectories.js";

const args = process.argv.slice(2);
if (args.length !== 3) {
  console.error("usage: plot-trajectories <trajectories.csv> <frames.ndjson> <out.png>");
  process.exit(2);
}

try {
  const summary = plotTrajectories(args[0], args[1], args[2]);
  console.log(JSON.stringify(summary));
} catch (err) {
  if (err instanceof DataError) {
    console.error(`input error: ${err.message}`);
  } else {
    console.error(String(err));
  }
  process.exit(1);
}
