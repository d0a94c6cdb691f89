"""Desk-scale retarded Green's functions for a 1D tight-binding chain.

The device is an n-site nearest-neighbor chain (onsite energies epsilon_j,
uniform hopping magnitude t > 0, H_{j,j+1} = -t) terminated by semi-infinite
uniform leads folded into analytic self-energies. In the lead band
E = -2 t cos(k a) the retarded surface term is

    Sigma(E) = (E - i sqrt(4 t^2 - E^2)) / 2 = -t exp(i k a),

whose non-positive imaginary part encodes outgoing waves. The magnitude and
unwrapped phase of a Green's row give a transport velocity
hbar * dtheta/dx / m_eff with the discretization mass m_eff = hbar^2/(2 t a^2),
mirroring the wave-packet guiding velocity; the bond current built from
neighboring row entries is exactly conserved between the source and the leads.

The physical in-scattering rate is replaced by a caller-supplied uniform
injection rate, so currents are in arbitrary units and conservation is the
testable contract.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .core import ConfigError, NumericalError, PhysicalUnits

NODE_EPSILON = 1e-12


def max_threads() -> int:
    """Parallelism cap from BOHMFLOW_THREADS (defaults to the CPU count)."""
    raw = os.environ.get("BOHMFLOW_THREADS", "")
    if raw.strip():
        try:
            n = int(raw)
        except ValueError as exc:
            raise ConfigError(f"BOHMFLOW_THREADS={raw!r} is not an integer") from exc
        if n < 1:
            raise ConfigError("BOHMFLOW_THREADS must be >= 1")
        return n
    return os.cpu_count() or 1


@dataclass(frozen=True)
class NegfModel:
    n_sites: int
    site_energies: tuple[float, ...]
    hopping: float
    lattice_constant: float = 1.0
    energy_grid: tuple[float, ...] = ()

    def __post_init__(self):
        if self.n_sites < 3:
            raise ConfigError("chain needs at least 3 sites")
        if self.hopping == 0.0:
            raise ConfigError("hopping must be nonzero")
        if len(self.site_energies) != self.n_sites:
            raise ConfigError(f"{len(self.site_energies)} site energies for "
                              f"{self.n_sites} sites")
        if self.lattice_constant <= 0:
            raise ConfigError("lattice constant must be positive")

    @classmethod
    def uniform(cls, n_sites: int, hopping: float = 1.0,
                lattice_constant: float = 1.0,
                energy_grid=()) -> "NegfModel":
        return cls(n_sites, (0.0,) * n_sites, hopping, lattice_constant,
                   tuple(energy_grid))

    @classmethod
    def with_barrier(cls, n_sites: int, barrier_height: float,
                     first: int, last: int, hopping: float = 1.0,
                     lattice_constant: float = 1.0, energy_grid=()) -> "NegfModel":
        """Uniform chain with onsite energies raised on sites [first, last]."""
        if not (0 <= first <= last < n_sites):
            raise ConfigError("barrier sites out of range")
        eps = np.zeros(n_sites)
        eps[first:last + 1] = barrier_height
        return cls(n_sites, tuple(eps), hopping, lattice_constant, tuple(energy_grid))

    @property
    def band_edge(self) -> float:
        return 2.0 * abs(self.hopping)

    def lead_self_energy(self, energy: float) -> complex:
        """Retarded surface term of a semi-infinite uniform lead (onsite 0)."""
        t = abs(self.hopping)
        disc = energy * energy - 4.0 * t * t
        if disc < 0.0:
            return complex(0.5 * energy, -0.5 * math.sqrt(-disc))
        # evanescent side of the band edge: pick the decaying real root
        root = math.sqrt(disc)
        return complex(0.5 * (energy - math.copysign(root, energy)), 0.0)

    def wavenumber(self, energy: float) -> float:
        """k(E) from E = -2 t cos(k a), in (0, pi/a); raises outside the band."""
        t = abs(self.hopping)
        c = -energy / (2.0 * t)
        if not -1.0 <= c <= 1.0:
            raise NumericalError(f"energy {energy} outside the lead band "
                                 f"[-{2*t}, {2*t}]")
        return math.acos(c) / self.lattice_constant

    def effective_mass(self, units: PhysicalUnits = PhysicalUnits()) -> float:
        """Parabolic-band mass of the discretization, hbar^2 / (2 t a^2)."""
        return units.hbar**2 / (2.0 * abs(self.hopping) * self.lattice_constant**2)


@dataclass(frozen=True)
class GreensRow:
    """One column G(:, source) at one energy: magnitude and unwrapped phase."""

    source_site: int
    magnitude: np.ndarray = field(repr=False)
    theta: np.ndarray = field(repr=False)
    energy: float
    valid: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)


def _solve_chain(model: NegfModel, energy: float, rhs: np.ndarray) -> np.ndarray:
    n = model.n_sites
    sigma = model.lead_self_energy(energy)
    diag = np.asarray(model.site_energies, dtype=complex)
    diag = energy - diag
    diag[0] -= sigma
    diag[-1] -= sigma
    off = np.full(n - 1, abs(model.hopping), dtype=complex)  # E - H has +t off-diagonal
    ab = np.zeros((3, n), dtype=complex)
    ab[0, 1:] = off
    ab[1, :] = diag
    ab[2, :-1] = off
    try:
        g = scipy.linalg.solve_banded((1, 1), ab, rhs, check_finite=False)
    except (scipy.linalg.LinAlgError, ValueError) as exc:
        raise NumericalError(f"Green's solve singular at E={energy} "
                             "(band edge without broadening?)") from exc
    if not np.all(np.isfinite(g)):
        raise NumericalError(f"Green's solve singular at E={energy} "
                             "(band edge without broadening?)")
    return g


def compute_green_row(model: NegfModel, source_site: int, energy: float) -> GreensRow:
    """Solve (E - H - Sigma_L - Sigma_R) G = delta_source and split |G|, theta.

    theta is unwrapped along the chain over sites whose magnitude clears the
    mask, so adjacent valid sites differ by less than pi.
    """
    if not 0 <= source_site < model.n_sites:
        raise ConfigError(f"source site {source_site} out of range")
    rhs = np.zeros(model.n_sites, dtype=complex)
    rhs[source_site] = 1.0
    g = _solve_chain(model, energy, rhs)

    magnitude = np.abs(g)
    valid = magnitude > NODE_EPSILON * magnitude.max()
    wrapped = np.angle(g)
    theta = wrapped.copy()
    idx = np.flatnonzero(valid)
    if idx.size:
        theta[idx] = np.unwrap(wrapped[idx])
    return GreensRow(source_site=source_site, magnitude=magnitude, theta=theta,
                     energy=energy, valid=valid, values=g)


def phase_velocity(model: NegfModel, row: GreensRow,
                   units: PhysicalUnits = PhysicalUnits()) -> np.ndarray:
    """Transport velocity hbar * (discrete grad theta) / m_eff per site.

    Central differences in the interior, one-sided at the chain ends; sites
    under the magnitude mask (and their stencil neighbors) are zero-filled.
    """
    a = model.lattice_constant
    theta = row.theta
    grad = np.empty_like(theta)
    grad[1:-1] = (theta[2:] - theta[:-2]) / (2.0 * a)
    grad[0] = (theta[1] - theta[0]) / a
    grad[-1] = (theta[-1] - theta[-2]) / a
    v = units.hbar * grad / model.effective_mass(units)
    safe = row.valid.copy()
    safe[1:] &= row.valid[:-1]
    safe[:-1] &= row.valid[1:]
    v[~safe] = 0.0
    return v


def coherent_current_density(model: NegfModel, energy: float, injection_rate: float,
                             source_site: int | None = None,
                             units: PhysicalUnits = PhysicalUnits()) -> np.ndarray:
    """Bond current from a single source injecting at a constant rate.

    J[j] lives on the bond (j, j+1):

        J = rate * (2 t / hbar) * Im(conj(G_j) G_{j+1}),

    the discrete form of velocity times |G|^2. The chain equation makes it
    exactly constant on each segment between the source and a lead, which is
    the conservation law the tests pin down. Units are arbitrary.
    """
    if source_site is None:
        source_site = model.n_sites // 2
    row = compute_green_row(model, source_site, energy)
    g = row.values
    t = abs(model.hopping)
    return injection_rate * (2.0 * t / units.hbar) * np.imag(np.conj(g[:-1]) * g[1:])


def transmission(model: NegfModel, energy: float) -> float:
    """Lead-to-lead transmission: Gamma_L |G(0, n-1)|^2 Gamma_R."""
    row = compute_green_row(model, model.n_sites - 1, energy)
    gamma = -2.0 * model.lead_self_energy(energy).imag
    return float(gamma * gamma * abs(row.values[0]) ** 2)


@dataclass(frozen=True)
class EnergyPoint:
    energy: float
    row: GreensRow
    velocity: np.ndarray
    current: np.ndarray
    transmission: float


def sweep(model: NegfModel, energies=None, injection_rate: float = 1.0,
          source_site: int | None = None,
          units: PhysicalUnits = PhysicalUnits()) -> list[EnergyPoint]:
    """Evaluate the row, velocity, bond current, and transmission per energy.

    Energy points are independent; the sweep fans out over threads capped by
    BOHMFLOW_THREADS and collects in input order, so output is deterministic.
    """
    if energies is None:
        energies = model.energy_grid
    energies = [float(e) for e in energies]
    if not energies:
        raise ConfigError("no energies to sweep")
    if source_site is None:
        source_site = model.n_sites // 2

    def one(energy: float) -> EnergyPoint:
        row = compute_green_row(model, source_site, energy)
        vel = phase_velocity(model, row, units)
        cur = coherent_current_density(model, energy, injection_rate, source_site, units)
        return EnergyPoint(energy, row, vel, cur, transmission(model, energy))

    workers = min(max_threads(), len(energies))
    if workers == 1:
        return [one(e) for e in energies]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, energies))


def negf_model_from_dict(data: dict) -> tuple[NegfModel, dict]:
    """Build a model plus sweep settings from a [negf] config section.

    Returns (model, extras) where extras holds injection_rate and source_site.
    """
    try:
        n_sites = int(data["n_sites"])
        hopping = float(data.get("hopping", 1.0))
        a = float(data.get("lattice_constant", 1.0))
        if "site_energies" in data:
            eps = tuple(float(v) for v in data["site_energies"])
        elif "barrier_height" in data:
            first = int(data["barrier_first"])
            last = int(data["barrier_last"])
            model = NegfModel.with_barrier(n_sites, float(data["barrier_height"]),
                                           first, last, hopping, a)
            eps = model.site_energies
        else:
            eps = (0.0,) * n_sites
        e_min = float(data.get("e_min", -1.5 * abs(hopping)))
        e_max = float(data.get("e_max", 1.5 * abs(hopping)))
        n_energies = int(data.get("n_energies", 11))
        grid = tuple(np.linspace(e_min, e_max, n_energies))
        model = NegfModel(n_sites, eps, hopping, a, grid)
        extras = {
            "injection_rate": float(data.get("injection_rate", 1.0)),
            "source_site": int(data.get("source_site", n_sites // 2)),
        }
        return model, extras
    except KeyError as exc:
        raise ConfigError(f"[negf] section missing key {exc.args[0]!r}") from exc
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"[negf] section: {exc}") from exc
