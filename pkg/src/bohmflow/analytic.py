"""Closed-form reference states used as oracles and for constructing frames
at arbitrary times without running the propagator.

The free-Gaussian formulas below are exercised against the PDE itself in the
test suite (symbolic substitution), so the rest of the code may trust them.
"""

from __future__ import annotations

import math

import numpy as np

from .core import Grid1D, PhysicalUnits, WavefunctionFrame, hermite_eigenstate


def gaussian_tau(t: float, sigma0: float, units: PhysicalUnits) -> float:
    """Dimensionless spreading parameter hbar*t / (2 m sigma0^2)."""
    return units.hbar * t / (2.0 * units.mass * sigma0**2)


def gaussian_sigma(t: float, sigma0: float, units: PhysicalUnits) -> float:
    """Width of |psi|^2 at time t: sigma(t) = sigma0 * sqrt(1 + tau^2)."""
    tau = gaussian_tau(t, sigma0, units)
    return sigma0 * math.sqrt(1.0 + tau * tau)


def free_gaussian_values(x: np.ndarray, t: float, x0: float, sigma0: float,
                         k0: float, units: PhysicalUnits = PhysicalUnits()) -> np.ndarray:
    """Freely evolving Gaussian packet.

    psi(x,0) = (2 pi sigma0^2)^(-1/4) exp(-(x-x0)^2 / 4 sigma0^2) exp(i k0 x)

    evolves under the free Schroedinger equation into

    psi(x,t) = (2 pi sigma0^2)^(-1/4) (1 + i tau)^(-1/2)
               exp(i k0 x - i hbar k0^2 t / 2m)
               exp(-(x - x0 - hbar k0 t/m)^2 / (4 sigma0^2 (1 + i tau)))

    with tau = hbar t / (2 m sigma0^2).
    """
    hbar, m = units.hbar, units.mass
    tau = gaussian_tau(t, sigma0, units)
    xc = x0 + hbar * k0 * t / m
    u = x - xc
    amp = (2.0 * math.pi * sigma0**2) ** (-0.25) / np.sqrt(1.0 + 1j * tau)
    phase = 1j * (k0 * x - hbar * k0**2 * t / (2.0 * m))
    return amp * np.exp(phase - u * u / (4.0 * sigma0**2 * (1.0 + 1j * tau)))


def free_gaussian_frame(grid: Grid1D, t: float, x0: float, sigma0: float,
                        k0: float, units: PhysicalUnits = PhysicalUnits()) -> WavefunctionFrame:
    return WavefunctionFrame(grid, t, free_gaussian_values(grid.x, t, x0, sigma0, k0, units))


def free_gaussian_trajectory(x_init: np.ndarray, t: float, x0: float, sigma0: float,
                             k0: float, units: PhysicalUnits = PhysicalUnits()) -> np.ndarray:
    """Exact guiding-field worldline: the packet's flow is affine,

    x(t) = x_c(t) + (x(0) - x0) * sigma(t) / sigma0,  x_c = x0 + hbar k0 t / m.
    """
    xc = x0 + units.hbar * k0 * t / units.mass
    stretch = gaussian_sigma(t, sigma0, units) / sigma0
    return xc + (np.asarray(x_init) - x0) * stretch


def harmonic_energy(n: int, omega: float, units: PhysicalUnits = PhysicalUnits()) -> float:
    return units.hbar * omega * (n + 0.5)


def harmonic_eigenstate_frame(grid: Grid1D, t: float, n: int, omega: float,
                              units: PhysicalUnits = PhysicalUnits()) -> WavefunctionFrame:
    """Oscillator eigenstate with its stationary phase exp(-i E_n t / hbar)."""
    psi = hermite_eigenstate(n, grid.x, omega, units).astype(complex)
    psi *= np.exp(-1j * harmonic_energy(n, omega, units) * t / units.hbar)
    return WavefunctionFrame(grid, t, psi)
