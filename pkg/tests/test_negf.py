import math

import numpy as np
import pytest

from bohmflow import (ConfigError, InitialStateSpec, NegfModel, PhysicalUnits,
                      build_grid, coherent_current_density, compute_green_row,
                      init_wavefunction, phase_velocity, sweep, transmission)
from bohmflow.core import NumericalError
from bohmflow.fields import compute_velocity_and_current
from bohmflow.negf import max_threads, negf_model_from_dict
from oracles import transfer_matrix_transmission, uniform_chain_green

UNITS = PhysicalUnits()


def test_model_validation():
    with pytest.raises(ConfigError):
        NegfModel.uniform(2)
    with pytest.raises(ConfigError):
        NegfModel(5, (0.0,) * 5, 0.0)
    with pytest.raises(ConfigError):
        NegfModel(5, (0.0,) * 4, 1.0)


def test_self_energy_retarded_branch():
    model = NegfModel.uniform(11, hopping=1.0)
    for energy in (-1.9, -1.0, 0.0, 0.7, 1.9):
        sigma = model.lead_self_energy(energy)
        assert sigma.imag <= 0.0
        # in band: Sigma = -t exp(i k a)
        ka = model.wavenumber(energy)
        expected = -1.0 * complex(math.cos(ka), math.sin(ka))
        assert sigma == pytest.approx(expected, abs=1e-12)
    # evanescent outside the band, still non-positive imaginary part
    assert model.lead_self_energy(2.5).imag == 0.0
    assert abs(model.lead_self_energy(2.5)) < abs(2.5) / 2


def test_uniform_chain_matches_closed_form():
    model = NegfModel.uniform(41, hopping=1.0)
    energy = 0.37
    src = 20
    row = compute_green_row(model, src, energy)
    expected = np.array([uniform_chain_green(j, src, 1.0, energy) for j in range(41)])
    assert np.abs(row.values - expected).max() < 1e-10
    # ballistic: constant magnitude away from nothing to reflect off
    assert np.ptp(row.magnitude) < 1e-8


def test_uniform_chain_phase_gradient_is_ka():
    model = NegfModel.uniform(61, hopping=1.0)
    for energy in (-1.2, 0.0, 0.9):
        row = compute_green_row(model, 30, energy)
        ka = model.wavenumber(energy)
        dtheta = np.abs(np.diff(row.theta))
        keep = np.ones(dtheta.size, dtype=bool)
        keep[29:31] = False            # bonds touching the source kink
        assert np.abs(dtheta[keep] - ka).max() < 1e-6


def test_reciprocity():
    model = NegfModel.with_barrier(31, 0.8, 12, 18, hopping=1.0)
    energy = 0.4
    a = compute_green_row(model, 5, energy).values[25]
    b = compute_green_row(model, 25, energy).values[5]
    assert a == pytest.approx(b, abs=1e-10)


def test_band_edge_solve_fails_loudly():
    model = NegfModel.uniform(21, hopping=1.0)
    with pytest.raises(NumericalError):
        model.wavenumber(2.5)


def test_phase_velocity_small_k_parabolic():
    model = NegfModel.uniform(81, hopping=1.0)
    energy = -2.0 * math.cos(0.15)     # ka = 0.15, near the band bottom
    row = compute_green_row(model, 40, energy)
    v = phase_velocity(model, row, UNITS)
    ka = model.wavenumber(energy)
    expected = UNITS.hbar * ka / model.effective_mass(UNITS)
    keep = np.ones(81, dtype=bool)
    keep[38:43] = keep[:2] = keep[-2:] = False
    # outgoing on both sides: the speed matches, the sign flips at the source
    assert np.abs(np.abs(v[keep]) - expected).max() < 0.02 * expected


def test_phase_velocity_vanishes_at_band_edge():
    model = NegfModel.uniform(81, hopping=1.0)
    vs = []
    for ka in (0.5, 0.1, 0.02):
        row = compute_green_row(model, 40, -2.0 * math.cos(ka))
        vs.append(abs(phase_velocity(model, row, UNITS)[60]))
    assert vs[2] < vs[1] < vs[0]
    assert vs[2] < 0.05 * vs[0]


def test_barrier_region_evanescent():
    # under-barrier energy: magnitude decays, phase flattens, velocity ~ 0
    model = NegfModel.with_barrier(61, 1.5, 35, 44, hopping=1.0)
    energy = -1.0
    row = compute_green_row(model, 10, energy)
    mags = row.magnitude
    decay = mags[43] / mags[36]
    assert decay < 1e-2
    v = phase_velocity(model, row, UNITS)
    v_open = abs(v[20])
    # phase is flat in the barrier's interior; the last couple of sites feel
    # the transmitted wave resuming its rotation
    assert np.abs(v[slice(36, 43)]).max() < 0.05 * v_open


def test_bond_current_conserved_uniform():
    model = NegfModel.uniform(51, hopping=1.0)
    cur = coherent_current_density(model, 0.3, injection_rate=2.0, source_site=25)
    right = cur[25:]
    assert np.abs(right - right[0]).max() < 1e-8 * abs(right[0])
    left = cur[:25]
    assert np.abs(left - left[0]).max() < 1e-8 * abs(left[0])


def test_bond_current_conserved_through_barrier():
    model = NegfModel.with_barrier(61, 0.8, 35, 40, hopping=1.0)
    cur = coherent_current_density(model, 0.4, injection_rate=1.0, source_site=10)
    # one conserved value everywhere right of the source, barrier included
    right = cur[10:]
    assert np.abs(right - right[0]).max() < 1e-8 * abs(right[0])


def test_zero_injection_zero_current():
    model = NegfModel.uniform(31, hopping=1.0)
    cur = coherent_current_density(model, 0.2, injection_rate=0.0)
    assert np.all(cur == 0.0)


def test_transmission_against_transfer_matrix():
    energies = (-1.1, -0.3, 0.25, 0.8)
    # uniform chain is perfectly transparent
    uniform = NegfModel.uniform(25, hopping=1.0)
    for energy in energies:
        assert transmission(uniform, energy) == pytest.approx(1.0, abs=1e-10)

    barrier = NegfModel.with_barrier(25, 0.9, 10, 14, hopping=1.0)
    for energy in energies:
        expected = transfer_matrix_transmission(barrier.site_energies[1:-1], 1.0, energy)
        assert transmission(barrier, energy) == pytest.approx(expected, abs=1e-8)


def test_transfer_matrix_oracle_device_indexing():
    # the solver treats chain ends as lead-coupled sites; the oracle's device
    # list must exclude them (they are uniform here anyway)
    barrier = NegfModel.with_barrier(25, 1.3, 8, 16, hopping=1.0)
    for energy in (-0.7, 0.33):
        expected = transfer_matrix_transmission(barrier.site_energies[1:-1], 1.0, energy)
        assert transmission(barrier, energy) == pytest.approx(expected, abs=1e-8)


def test_phase_velocity_matches_wavepacket_velocity():
    # same particle, two pictures: chain phase gradient vs plane-wave guiding
    # velocity, with hopping chosen so m_eff equals the continuum mass
    a = 0.05
    t_hop = UNITS.hbar**2 / (2.0 * UNITS.mass * a**2)
    model = NegfModel.uniform(201, hopping=t_hop, lattice_constant=a)
    k0 = 2.0
    energy = -2.0 * t_hop * math.cos(k0 * a)
    row = compute_green_row(model, 100, energy)
    v_chain = phase_velocity(model, row, UNITS)[150]

    g = build_grid(-10, 10, 2048)
    f = init_wavefunction(InitialStateSpec.plane_wave(k0), g, UNITS)
    vel, _ = compute_velocity_and_current(f)
    v_wave = vel.values[1024]
    assert v_chain == pytest.approx(v_wave, rel=0.01)


def test_sweep_deterministic_and_thread_capped(monkeypatch):
    model = NegfModel.uniform(31, hopping=1.0,
                              energy_grid=tuple(np.linspace(-1.5, 1.5, 7)))
    pts = sweep(model, injection_rate=1.0)
    assert [p.energy for p in pts] == list(model.energy_grid)

    monkeypatch.setenv("BOHMFLOW_THREADS", "1")
    assert max_threads() == 1
    pts_seq = sweep(model, injection_rate=1.0)
    for a, b in zip(pts, pts_seq):
        assert np.array_equal(a.row.values, b.row.values)
        assert np.array_equal(a.current, b.current)

    monkeypatch.setenv("BOHMFLOW_THREADS", "zebra")
    with pytest.raises(ConfigError):
        max_threads()


def test_negf_config_section():
    model, extras = negf_model_from_dict({
        "n_sites": 41, "hopping": 1.0, "barrier_height": 0.8,
        "barrier_first": 18, "barrier_last": 22,
        "e_min": -1.0, "e_max": 1.0, "n_energies": 5,
        "injection_rate": 2.0, "source_site": 10,
    })
    assert model.n_sites == 41
    assert model.site_energies[18] == 0.8 and model.site_energies[17] == 0.0
    assert len(model.energy_grid) == 5
    assert extras["source_site"] == 10
    with pytest.raises(ConfigError):
        negf_model_from_dict({"hopping": 1.0})
