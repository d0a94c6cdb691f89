"""Grids, wavefunctions, potentials, units, and simulation configuration.

Everything here is immutable after construction and safe to share across
threads. Natural units (hbar = m = 1) are the default; all formulas carry the
symbols so other unit systems work unchanged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

try:
    import tomllib  # py >= 3.11
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib

from .derivatives import trapezoid

# |psi| at the domain edge above this fraction of max|psi| counts as a
# confinement violation (closed-box assumption broken).
BOUNDARY_TOLERANCE = 1e-6

MIN_GRID_POINTS = 16


class ConfigError(ValueError):
    """Invalid configuration file or parameter set."""


class NumericalError(RuntimeError):
    """A numerical procedure failed (solver breakdown, invalid state)."""


class ConfinementError(NumericalError):
    """A state touched the domain boundary where the closed-box model needs it to vanish."""


@dataclass(frozen=True)
class PhysicalUnits:
    hbar: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        if self.hbar <= 0 or self.mass <= 0:
            raise ConfigError("hbar and mass must be strictly positive")


@dataclass(frozen=True)
class Grid1D:
    """Uniform 1D spatial grid with n_points >= 16 and strictly increasing points."""

    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self):
        if not self.x_max > self.x_min:
            raise ConfigError(f"grid bounds must increase: x_min={self.x_min}, x_max={self.x_max}")
        if self.n_points < MIN_GRID_POINTS:
            raise ConfigError(f"n_points={self.n_points} below minimum of {MIN_GRID_POINTS}")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points - 1)

    @cached_property
    def x(self) -> np.ndarray:
        pts = np.linspace(self.x_min, self.x_max, self.n_points)
        pts.flags.writeable = False
        return pts

    @property
    def length(self) -> float:
        return self.x_max - self.x_min


def build_grid(x_min: float, x_max: float, n_points: int) -> Grid1D:
    return Grid1D(x_min, x_max, n_points)


@dataclass(frozen=True)
class PotentialSpec:
    """External potential. One of: free, harmonic, rectangular_barrier, tabulated."""

    variant: str
    omega: float | None = None
    v0: float | None = None
    a: float | None = None
    b: float | None = None
    values: tuple[float, ...] | None = None

    VARIANTS = ("free", "harmonic", "rectangular_barrier", "tabulated")

    def __post_init__(self):
        if self.variant not in self.VARIANTS:
            raise ConfigError(f"unknown potential variant {self.variant!r}")
        if self.variant == "harmonic" and (self.omega is None or self.omega <= 0):
            raise ConfigError("harmonic potential needs omega > 0")
        if self.variant == "rectangular_barrier":
            if self.v0 is None or self.a is None or self.b is None:
                raise ConfigError("rectangular_barrier needs v0, a, b")
            if not self.a < self.b:
                raise ConfigError(f"barrier needs a < b, got a={self.a}, b={self.b}")
        if self.variant == "tabulated" and self.values is None:
            raise ConfigError("tabulated potential needs values")

    @classmethod
    def free(cls) -> "PotentialSpec":
        return cls("free")

    @classmethod
    def harmonic(cls, omega: float) -> "PotentialSpec":
        return cls("harmonic", omega=omega)

    @classmethod
    def rectangular_barrier(cls, v0: float, a: float, b: float) -> "PotentialSpec":
        return cls("rectangular_barrier", v0=v0, a=a, b=b)

    @classmethod
    def tabulated(cls, values: Sequence[float]) -> "PotentialSpec":
        return cls("tabulated", values=tuple(float(v) for v in values))


def evaluate_potential(spec: PotentialSpec, grid: Grid1D,
                       units: PhysicalUnits = PhysicalUnits()) -> np.ndarray:
    """Evaluate the potential on the grid; pure function of position."""
    x = grid.x
    if spec.variant == "free":
        return np.zeros_like(x)
    if spec.variant == "harmonic":
        return 0.5 * units.mass * spec.omega**2 * x * x
    if spec.variant == "rectangular_barrier":
        if not (grid.x_min < spec.a and spec.b < grid.x_max):
            raise ConfigError(f"barrier [{spec.a}, {spec.b}] must sit strictly inside "
                              f"({grid.x_min}, {grid.x_max})")
        return np.where((x >= spec.a) & (x <= spec.b), spec.v0, 0.0)
    # tabulated
    vals = np.asarray(spec.values, dtype=float)
    if vals.shape != x.shape:
        raise ConfigError(f"tabulated potential has {vals.size} values for {x.size} grid points")
    return vals.copy()


@dataclass(frozen=True)
class InitialStateSpec:
    """Initial wavefunction. One of: gaussian, plane_wave, harmonic_eigenstate, tabulated."""

    variant: str
    x0: float | None = None
    sigma0: float | None = None
    k0: float | None = None
    n: int | None = None
    values: tuple[complex, ...] | None = None

    VARIANTS = ("gaussian", "plane_wave", "harmonic_eigenstate", "tabulated")

    def __post_init__(self):
        if self.variant not in self.VARIANTS:
            raise ConfigError(f"unknown initial state variant {self.variant!r}")
        if self.variant == "gaussian":
            if self.sigma0 is None or self.sigma0 <= 0:
                raise ConfigError("gaussian needs sigma0 > 0")
            if self.x0 is None or self.k0 is None:
                raise ConfigError("gaussian needs x0 and k0")
        if self.variant == "plane_wave" and self.k0 is None:
            raise ConfigError("plane_wave needs k0")
        if self.variant == "harmonic_eigenstate" and (self.n is None or self.n < 0):
            raise ConfigError("harmonic_eigenstate needs n >= 0")
        if self.variant == "tabulated" and self.values is None:
            raise ConfigError("tabulated state needs values")

    @classmethod
    def gaussian(cls, x0: float, sigma0: float, k0: float) -> "InitialStateSpec":
        return cls("gaussian", x0=x0, sigma0=sigma0, k0=k0)

    @classmethod
    def plane_wave(cls, k0: float) -> "InitialStateSpec":
        return cls("plane_wave", k0=k0)

    @classmethod
    def harmonic_eigenstate(cls, n: int) -> "InitialStateSpec":
        return cls("harmonic_eigenstate", n=n)

    @classmethod
    def tabulated(cls, values: Sequence[complex]) -> "InitialStateSpec":
        return cls("tabulated", values=tuple(complex(v) for v in values))


@dataclass(frozen=True)
class WavefunctionFrame:
    """Complex field psi(x) on a grid at one instant. Values are read-only."""

    grid: Grid1D
    time: float
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != (self.grid.n_points,):
            raise ConfigError(f"frame has {vals.shape} values for {self.grid.n_points} points")
        if not np.all(np.isfinite(vals)):
            raise NumericalError("frame contains non-finite values")
        vals = vals.copy()
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    def norm(self) -> float:
        """L2 norm via trapezoid quadrature."""
        return math.sqrt(trapezoid(np.abs(self.values) ** 2, self.grid.dx))

    def boundary_ratio(self) -> float:
        """max |psi| at the two domain edges relative to max |psi| overall."""
        mags = np.abs(self.values)
        peak = mags.max()
        if peak == 0.0:
            return 0.0
        return float(max(mags[0], mags[-1]) / peak)

    def is_confined(self) -> bool:
        return self.boundary_ratio() < BOUNDARY_TOLERANCE

    def density(self) -> np.ndarray:
        return np.abs(self.values) ** 2


def hermite_eigenstate(n: int, x: np.ndarray, omega: float,
                       units: PhysicalUnits) -> np.ndarray:
    """Normalized oscillator eigenstate via the Hermite recurrence (real valued)."""
    xi = x * math.sqrt(units.mass * omega / units.hbar)
    if n == 0:
        h = np.ones_like(xi)
    else:
        h_prev, h = np.ones_like(xi), 2.0 * xi
        for k in range(2, n + 1):
            h_prev, h = h, 2.0 * xi * h - 2.0 * (k - 1) * h_prev
    norm = (units.mass * omega / (math.pi * units.hbar)) ** 0.25
    norm /= math.sqrt(2.0**n * math.factorial(n))
    return norm * h * np.exp(-0.5 * xi * xi)


def init_wavefunction(spec: InitialStateSpec, grid: Grid1D,
                      units: PhysicalUnits = PhysicalUnits(),
                      potential: PotentialSpec | None = None) -> WavefunctionFrame:
    """Build the t=0 state, normalized to 1 (trapezoid) within 1e-12.

    Plane waves fill the whole box by construction and skip the confinement
    check; every other variant must vanish at the edges.
    """
    x = grid.x
    if spec.variant == "gaussian":
        if spec.sigma0 < 3.0 * grid.dx:
            raise ConfigError(f"gaussian sigma0={spec.sigma0} under-resolved: "
                              f"needs at least 3*dx = {3.0 * grid.dx:.3g}")
        u = x - spec.x0
        psi = np.exp(-u * u / (4.0 * spec.sigma0**2)) * np.exp(1j * spec.k0 * x)
    elif spec.variant == "plane_wave":
        psi = np.exp(1j * spec.k0 * x) / math.sqrt(grid.length)
    elif spec.variant == "harmonic_eigenstate":
        if potential is None or potential.variant != "harmonic":
            raise ConfigError("harmonic_eigenstate is only valid with a harmonic potential")
        psi = hermite_eigenstate(spec.n, x, potential.omega, units).astype(complex)
    else:  # tabulated
        psi = np.asarray(spec.values, dtype=complex)
        if psi.shape != x.shape:
            raise ConfigError(f"tabulated state has {psi.size} values for {x.size} points")
        psi = psi.copy()

    nrm = math.sqrt(trapezoid(np.abs(psi) ** 2, grid.dx))
    if not (np.isfinite(nrm) and nrm > 0):
        raise NumericalError("initial state has zero or non-finite norm")
    psi /= nrm

    frame = WavefunctionFrame(grid, 0.0, psi)
    if spec.variant != "plane_wave" and not frame.is_confined():
        raise ConfinementError(
            f"initial packet touches the boundary: edge/max ratio "
            f"{frame.boundary_ratio():.2e} >= {BOUNDARY_TOLERANCE:.0e}")
    return frame


@dataclass(frozen=True)
class SimulationConfig:
    grid: Grid1D
    units: PhysicalUnits
    potential: PotentialSpec
    initial_state: InitialStateSpec
    dt: float
    n_steps: int
    frame_stride: int = 1
    node_epsilon: float = 1e-10
    seed: int = 0

    def __post_init__(self):
        if self.dt <= 0:
            raise ConfigError("dt must be positive")
        if self.n_steps < 0:
            raise ConfigError("n_steps must be >= 0")
        if self.frame_stride < 1:
            raise ConfigError("frame_stride must be >= 1")
        if not (0.0 < self.node_epsilon < 1e-3):
            raise ConfigError("node_epsilon must lie in (0, 1e-3)")
        if (self.initial_state.variant == "harmonic_eigenstate"
                and self.potential.variant != "harmonic"):
            raise ConfigError("harmonic_eigenstate initial state needs a harmonic potential")
        if self.potential.variant == "rectangular_barrier":
            # validates barrier-inside-domain early
            evaluate_potential(self.potential, self.grid, self.units)


# ---------------------------------------------------------------------------
# TOML configuration file
# ---------------------------------------------------------------------------
#
# [grid]        x_min, x_max, n_points
# [units]       hbar, mass                       (optional, defaults 1, 1)
# [potential]   variant + variant fields          (omega | v0,a,b | values)
# [initial_state] variant + variant fields        (x0,sigma0,k0 | k0 | n | values)
# [time]        dt, n_steps, frame_stride
# [numerics]    node_epsilon, seed               (optional)
#
# Extra sections (e.g. [negf], [trajectories]) are preserved for the modules
# that consume them; see their parsers.


def read_config_file(path) -> dict:
    """Parse a TOML config file; parse errors carry the offending line."""
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        # TOMLDecodeError messages include "(at line N, column M)"
        raise ConfigError(f"{path}: {exc}") from exc


def _section(data: dict, name: str, path="<config>") -> dict:
    if name not in data:
        raise ConfigError(f"{path}: missing [{name}] section")
    return data[name]


def simulation_config_from_dict(data: dict, path="<config>") -> SimulationConfig:
    try:
        g = _section(data, "grid", path)
        grid = Grid1D(float(g["x_min"]), float(g["x_max"]), int(g["n_points"]))

        u = data.get("units", {})
        units = PhysicalUnits(float(u.get("hbar", 1.0)), float(u.get("mass", 1.0)))

        p = _section(data, "potential", path)
        potential = PotentialSpec(
            variant=p["variant"],
            omega=float(p["omega"]) if "omega" in p else None,
            v0=float(p["v0"]) if "v0" in p else None,
            a=float(p["a"]) if "a" in p else None,
            b=float(p["b"]) if "b" in p else None,
            values=tuple(p["values"]) if "values" in p else None,
        )

        s = _section(data, "initial_state", path)
        state = InitialStateSpec(
            variant=s["variant"],
            x0=float(s["x0"]) if "x0" in s else None,
            sigma0=float(s["sigma0"]) if "sigma0" in s else None,
            k0=float(s["k0"]) if "k0" in s else None,
            n=int(s["n"]) if "n" in s else None,
            values=tuple(complex(v) for v in s["values"]) if "values" in s else None,
        )

        t = _section(data, "time", path)
        num = data.get("numerics", {})
        return SimulationConfig(
            grid=grid, units=units, potential=potential, initial_state=state,
            dt=float(t["dt"]), n_steps=int(t["n_steps"]),
            frame_stride=int(t.get("frame_stride", 1)),
            node_epsilon=float(num.get("node_epsilon", 1e-10)),
            seed=int(num.get("seed", 0)),
        )
    except KeyError as exc:
        raise ConfigError(f"{path}: missing required key {exc.args[0]!r}") from exc
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"{path}: {exc}") from exc


def load_config(path) -> SimulationConfig:
    return simulation_config_from_dict(read_config_file(path), path=str(path))
