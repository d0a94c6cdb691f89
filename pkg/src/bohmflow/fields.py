"""Guiding-field layer: polar split of psi and the nonlinear momentum rules.

The complex log-derivative of a field f splits into two real multiplier
fields,

    (hbar/i) f'/f  =  p_R - i * (-p_I)   ->   p_R = hbar Im(f'/f),
                                              p_I = -hbar Re(f'/f),

so that p_R + i p_I reproduces the usual momentum operator acting on f.
For psi = R exp(iS/hbar) these reduce to p_R = S' (local momentum) and
p_I = -hbar R'/R (amplitude log-slope). Points where the amplitude drops
below node_epsilon * max(R) are masked: the rules divide by the field there
and no extrapolation is attempted.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .core import Grid1D, PhysicalUnits, WavefunctionFrame
from .derivatives import gradient, second_derivative

DEFAULT_NODE_EPSILON = 1e-10


class MaskedField(NamedTuple):
    """Field values with a validity mask; entries outside the mask are zero-filled."""

    values: np.ndarray
    valid: np.ndarray


def node_mask(values: np.ndarray, node_epsilon: float = DEFAULT_NODE_EPSILON) -> np.ndarray:
    """True where |values| is safely above the node threshold."""
    mags = np.abs(values)
    return mags > node_epsilon * mags.max()


def erode_mask(valid: np.ndarray, width: int = 2) -> np.ndarray:
    """Shrink a validity mask by `width` cells around every invalid run.

    Derivative stencils reach `width` neighbors, so a point is stencil-safe
    only if its whole neighborhood is valid. The domain edges count as
    invalid neighbors: the outermost cells fall back to low-order one-sided
    stencils whose error the identity tolerances do not budget for.
    """
    out = valid.copy()
    for shift in range(1, width + 1):
        out[shift:] &= valid[:-shift]
        out[:-shift] &= valid[shift:]
    if width > 0:
        out[:width] = False
        out[-width:] = False
    return out


@dataclass(frozen=True)
class PolarFields:
    """Amplitude R = |psi| and unwrapped action phase S with S=0 at the max-R point."""

    R: np.ndarray
    S: np.ndarray
    valid: np.ndarray
    anchor_index: int


def polar_decompose(frame: WavefunctionFrame,
                    node_epsilon: float = DEFAULT_NODE_EPSILON,
                    units: PhysicalUnits = PhysicalUnits()) -> PolarFields:
    """Split psi into R * exp(iS/hbar).

    S is hbar times the phase unwrapped left to right over valid points only;
    masked nodes inherit the running 2*pi offset so the array stays finite.
    The gauge anchor puts S = 0 at the grid point of maximal R.
    """
    psi = frame.values
    R = np.abs(psi)
    valid = node_mask(psi, node_epsilon)
    wrapped = np.angle(psi)

    phase = wrapped.copy()
    idx = np.flatnonzero(valid)
    if idx.size:
        unwrapped = np.unwrap(wrapped[idx])
        offsets = unwrapped - wrapped[idx]
        phase[idx] = unwrapped
        # carry each valid point's offset across the masked gap to its right
        full_offsets = np.zeros_like(wrapped)
        full_offsets[idx] = offsets
        fill = np.zeros(psi.size, dtype=int)
        fill[idx] = idx
        fill = np.maximum.accumulate(fill)
        invalid = ~valid
        phase[invalid] = wrapped[invalid] + full_offsets[fill[invalid]]

    anchor = int(np.argmax(R))
    S = units.hbar * (phase - phase[anchor])
    return PolarFields(R=R, S=S, valid=valid, anchor_index=anchor)


def momentum_rule(values: np.ndarray, dx: float,
                  units: PhysicalUnits = PhysicalUnits(),
                  node_epsilon: float = DEFAULT_NODE_EPSILON) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Apply the log-derivative momentum rules to an arbitrary complex field.

    Returns (p_R, p_I, valid). The rules are well defined for any field, not
    just solutions of the wave equation; this generality is what the
    position-commutator check needs.
    """
    f = np.asarray(values, dtype=complex)
    valid = node_mask(f, node_epsilon)
    df = gradient(f, dx)
    z = np.divide(df, f, out=np.zeros_like(f), where=(np.abs(f) > 0.0))
    p_r = units.hbar * z.imag
    p_i = -units.hbar * z.real
    p_r[~valid] = 0.0
    p_i[~valid] = 0.0
    return p_r, p_i, valid


def compute_p_R(frame: WavefunctionFrame,
                node_epsilon: float = DEFAULT_NODE_EPSILON,
                units: PhysicalUnits = PhysicalUnits()) -> MaskedField:
    """Local-momentum field: real part of (hbar/i) psi'/psi, masked near nodes."""
    p_r, _, valid = momentum_rule(frame.values, frame.grid.dx, units, node_epsilon)
    return MaskedField(p_r, valid)


def compute_p_I(frame: WavefunctionFrame,
                node_epsilon: float = DEFAULT_NODE_EPSILON,
                units: PhysicalUnits = PhysicalUnits()) -> MaskedField:
    """Amplitude-slope field: imaginary part of (hbar/i) psi'/psi (= -hbar R'/R)."""
    _, p_i, valid = momentum_rule(frame.values, frame.grid.dx, units, node_epsilon)
    return MaskedField(p_i, valid)


def amplitude_momentum(frame: WavefunctionFrame,
                       node_epsilon: float = DEFAULT_NODE_EPSILON,
                       units: PhysicalUnits = PhysicalUnits()) -> MaskedField:
    """Second route to p_I, straight from the amplitude: -hbar R'/R.

    Must agree with compute_p_I up to stencil truncation; the diagnostics
    suite enforces that.
    """
    R = np.abs(frame.values)
    valid = node_mask(frame.values, node_epsilon)
    dR = gradient(R, frame.grid.dx)
    vals = np.divide(-units.hbar * dR, R, out=np.zeros_like(R), where=(R > 0.0))
    vals[~valid] = 0.0
    return MaskedField(vals, valid)


def compute_quantum_potential(frame: WavefunctionFrame,
                              node_epsilon: float = DEFAULT_NODE_EPSILON,
                              units: PhysicalUnits = PhysicalUnits()) -> MaskedField:
    """Curvature energy of the amplitude: -(hbar^2 / 2m) R''/R, masked near nodes."""
    R = np.abs(frame.values)
    valid = node_mask(frame.values, node_epsilon)
    d2R = second_derivative(R, frame.grid.dx)
    coef = -units.hbar**2 / (2.0 * units.mass)
    vals = np.divide(coef * d2R, R, out=np.zeros_like(R), where=(R > 0.0))
    vals[~valid] = 0.0
    return MaskedField(vals, valid)


def compute_velocity_and_current(frame: WavefunctionFrame,
                                 node_epsilon: float = DEFAULT_NODE_EPSILON,
                                 units: PhysicalUnits = PhysicalUnits()
                                 ) -> tuple[MaskedField, np.ndarray]:
    """Guiding velocity and probability current.

    J = (hbar/m) Im(psi* psi') needs no division and is returned unmasked;
    v_r = J / |psi|^2 is masked near nodes. Branch cuts never enter: the
    current form bypasses the unwrapped phase entirely.
    """
    psi = frame.values
    dpsi = gradient(psi, frame.grid.dx)
    current = (units.hbar / units.mass) * np.imag(np.conj(psi) * dpsi)
    density = np.abs(psi) ** 2
    valid = node_mask(psi, node_epsilon)
    v = np.divide(current, density, out=np.zeros_like(current), where=(density > 0.0))
    v[~valid] = 0.0
    return MaskedField(v, valid), current


@dataclass(frozen=True)
class BohmFieldSet:
    """All guiding fields derived from one frame.

    P = R^2, v_r = p_R / m and J = P v_r hold on valid points by construction.
    Arrays are zero-filled where valid_mask is False.
    """

    grid: Grid1D = field(repr=False)
    time: float
    P: np.ndarray = field(repr=False)
    p_R: np.ndarray = field(repr=False)
    p_I: np.ndarray = field(repr=False)
    v_r: np.ndarray = field(repr=False)
    V_qu: np.ndarray = field(repr=False)
    J: np.ndarray = field(repr=False)
    valid_mask: np.ndarray = field(repr=False)


def compute_bohm_fields(frame: WavefunctionFrame,
                        node_epsilon: float = DEFAULT_NODE_EPSILON,
                        units: PhysicalUnits = PhysicalUnits()) -> BohmFieldSet:
    psi = frame.values
    dx = frame.grid.dx
    valid = node_mask(psi, node_epsilon)
    density = np.abs(psi) ** 2

    dpsi = gradient(psi, dx)
    current = (units.hbar / units.mass) * np.imag(np.conj(psi) * dpsi)
    v = np.divide(current, density, out=np.zeros_like(current), where=(density > 0.0))
    p_r = units.mass * v
    p_i = np.divide(-units.hbar * np.real(np.conj(psi) * dpsi), density,
                    out=np.zeros_like(current), where=(density > 0.0))

    R = np.abs(psi)
    d2R = second_derivative(R, dx)
    v_qu = np.divide(-units.hbar**2 / (2.0 * units.mass) * d2R, R,
                     out=np.zeros_like(R), where=(R > 0.0))

    for arr in (v, p_r, p_i, v_qu):
        arr[~valid] = 0.0
    return BohmFieldSet(grid=frame.grid, time=frame.time, P=density, p_R=p_r,
                        p_I=p_i, v_r=v, V_qu=v_qu, J=current, valid_mask=valid)


def compute_quantum_potential_2particle(psi2: np.ndarray, dx: float,
                                        units: PhysicalUnits = PhysicalUnits(),
                                        node_epsilon: float = DEFAULT_NODE_EPSILON
                                        ) -> MaskedField:
    """Two-particle curvature energy on a product grid (equal masses):

        -(hbar^2 / 2m) (d^2R/dx1^2 + d^2R/dx2^2) / R,   R = |psi2|.

    A product amplitude makes this additive in the two coordinates; an
    entangled one does not, which is the nonlocality witness the tests probe.
    """
    psi2 = np.asarray(psi2, dtype=complex)
    if psi2.ndim != 2 or psi2.shape[0] != psi2.shape[1]:
        raise ValueError(f"expected an n x n field, got shape {psi2.shape}")
    R = np.abs(psi2)
    valid = R > node_epsilon * R.max()
    lap = second_derivative(R, dx) + second_derivative(R.T, dx).T
    coef = -units.hbar**2 / (2.0 * units.mass)
    vals = np.divide(coef * lap, R, out=np.zeros_like(R), where=(R > 0.0))
    vals[~valid] = 0.0
    return MaskedField(vals, valid)
