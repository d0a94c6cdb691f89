#!/usr/bin/env python3
"""A Gaussian packet at rest spreads; its guiding fields tell the story.

The amplitude-slope field p_I grows linearly away from the center, the
curvature energy V_qu is an inverted parabola whose outward push drives the
spreading, and the velocity field is exactly linear in x, so worldlines are
straight lines in the stretched coordinate x / sigma(t).
"""

import pathlib

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from bohmflow import (InitialStateSpec, PhysicalUnits, PotentialSpec,
                      SimulationConfig, build_grid, compute_bohm_fields,
                      propagate)
from bohmflow.analytic import gaussian_sigma
from bohmflow.derivatives import trapezoid

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

units = PhysicalUnits()
grid = build_grid(-12, 12, 2048)
cfg = SimulationConfig(grid, units, PotentialSpec.free(),
                       InitialStateSpec.gaussian(0.0, 1.0, 0.0),
                       dt=2e-3, n_steps=1000, frame_stride=100, seed=0)
run = propagate(cfg)
print(f"propagated to t={run[-1].time:.1f}, norm drift {run.norm_drift:.1e}")

# field profiles at three times
fig, axes = plt.subplots(3, 1, figsize=(7, 8), sharex=True)
for frame in (run[0], run[5], run[-1]):
    fs = compute_bohm_fields(frame)
    label = f"t = {frame.time:.1f}"
    axes[0].plot(grid.x, fs.P, label=label)
    axes[1].plot(grid.x, np.where(fs.valid_mask, fs.v_r, np.nan), label=label)
    axes[2].plot(grid.x, np.where(fs.valid_mask, fs.V_qu, np.nan), label=label)
axes[0].set_ylabel("P")
axes[1].set_ylabel("v_r")
axes[2].set_ylabel("V_qu")
axes[2].set_xlabel("x")
axes[2].set_ylim(-1, 1)
for ax in axes:
    ax.legend(loc="upper right", fontsize=8)
fig.tight_layout()
fig.savefig(OUT / "spreading_fields.png", dpi=120)

# measured width against the closed form
times, widths = [], []
for frame in run:
    P = frame.density()
    var = trapezoid(P * grid.x**2, grid.dx) - trapezoid(P * grid.x, grid.dx) ** 2
    times.append(frame.time)
    widths.append(np.sqrt(var))
times = np.array(times)
expected = [gaussian_sigma(t, 1.0, units) for t in times]

fig, ax = plt.subplots(figsize=(6, 4))
ax.plot(times, widths, "o", label="measured")
ax.plot(times, expected, "-", label="sigma0 sqrt(1 + (t/2 sigma0^2)^2)")
ax.set_xlabel("t")
ax.set_ylabel("packet width")
ax.legend()
fig.tight_layout()
fig.savefig(OUT / "spreading_width.png", dpi=120)
print("wrote", OUT / "spreading_fields.png", "and", OUT / "spreading_width.png")
