"""Crank-Nicolson time stepping for the 1D Schroedinger equation.

The scheme solves (I + i dt H / 2 hbar) psi_new = (I - i dt H / 2 hbar) psi
with a second-order central Laplacian and Dirichlet edges. The Cayley form is
exactly unitary in the discrete l2 norm, so probability is conserved to
solver precision; accuracy (not stability) suggests dt <= dx^2 m / hbar,
which is advisory and not enforced.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .core import (BOUNDARY_TOLERANCE, NumericalError, PhysicalUnits,
                   SimulationConfig, WavefunctionFrame, evaluate_potential,
                   init_wavefunction)


class _CrankNicolsonStepper:
    """Pre-factored coefficients for repeated steps under a static potential."""

    def __init__(self, potential: np.ndarray, dx: float, dt: float, units: PhysicalUnits):
        if dt == 0.0:
            raise NumericalError("dt must be nonzero")
        n = potential.size
        r = units.hbar * dt / (4.0 * units.mass * dx * dx)
        diag = 1.0 + 1j * (2.0 * r + dt * potential / (2.0 * units.hbar))
        off = np.full(n, -1j * r)
        # banded storage for scipy.linalg.solve_banded, (1, 1) bands
        self._ab = np.zeros((3, n), dtype=complex)
        self._ab[0, 1:] = off[1:]
        self._ab[1, :] = diag
        self._ab[2, :-1] = off[:-1]
        self._rhs_diag = np.conj(diag)  # 1 - i(...) with real potential
        self._rhs_off = 1j * r
        self.dt = dt

    def step(self, psi: np.ndarray) -> np.ndarray:
        rhs = self._rhs_diag * psi
        rhs[1:] += self._rhs_off * psi[:-1]
        rhs[:-1] += self._rhs_off * psi[1:]
        try:
            return scipy.linalg.solve_banded((1, 1), self._ab, rhs,
                                             overwrite_ab=False, overwrite_b=True,
                                             check_finite=False)
        except (scipy.linalg.LinAlgError, ValueError) as exc:
            raise NumericalError(f"tridiagonal solve broke down (dt/dx pathology?): {exc}") from exc


def step_crank_nicolson(frame: WavefunctionFrame, potential: np.ndarray, dt: float,
                        units: PhysicalUnits = PhysicalUnits()) -> WavefunctionFrame:
    """Advance one frame by dt. Negative dt runs the scheme backward in time."""
    stepper = _CrankNicolsonStepper(np.asarray(potential, dtype=float), frame.grid.dx, dt, units)
    return WavefunctionFrame(frame.grid, frame.time + dt, stepper.step(frame.values.copy()))


@dataclass
class PropagationResult:
    """Stored frames plus run health: norm drift and confinement violations.

    Behaves as a sequence of WavefunctionFrame.
    """

    frames: list[WavefunctionFrame]
    norm_drift: float = 0.0
    confinement_violations: list[tuple[float, float]] = field(default_factory=list)

    def __len__(self):
        return len(self.frames)

    def __getitem__(self, i):
        return self.frames[i]

    def __iter__(self):
        return iter(self.frames)

    @property
    def times(self) -> np.ndarray:
        return np.array([f.time for f in self.frames])


def propagate(config: SimulationConfig,
              initial_frame: WavefunctionFrame | None = None) -> PropagationResult:
    """Run n_steps of Crank-Nicolson, storing every frame_stride-th frame.

    The t=0 frame and the final frame are always stored. Norm drift is the
    largest |norm - 1| across stored frames; frames whose edge amplitude
    exceeds the confinement threshold are recorded with their time, never
    silently dropped.
    """
    potential = evaluate_potential(config.potential, config.grid, config.units)
    if initial_frame is None:
        frame = init_wavefunction(config.initial_state, config.grid, config.units,
                                  config.potential)
    else:
        frame = initial_frame

    stepper = _CrankNicolsonStepper(potential, config.grid.dx, config.dt, config.units)
    result = PropagationResult(frames=[frame])

    def _monitor(f: WavefunctionFrame):
        result.norm_drift = max(result.norm_drift, abs(f.norm() - 1.0))
        ratio = f.boundary_ratio()
        if ratio >= BOUNDARY_TOLERANCE:
            result.confinement_violations.append((f.time, ratio))

    _monitor(frame)
    psi = frame.values.copy()
    for step in range(1, config.n_steps + 1):
        psi = stepper.step(psi)
        if step % config.frame_stride == 0 or step == config.n_steps:
            # time from the step count, immune to accumulation error
            frame = WavefunctionFrame(config.grid, result.frames[0].time + step * config.dt, psi)
            result.frames.append(frame)
            _monitor(frame)
    return result
