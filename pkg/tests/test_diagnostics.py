import numpy as np
import pytest
from scipy.integrate import quad

from bohmflow import (InitialStateSpec, PhysicalUnits, PotentialSpec,
                      SimulationConfig, build_grid, build_report,
                      check_commutator, continuity_residual, energy_partition,
                      evaluate_potential, expectation_momentum,
                      free_gaussian_frame, harmonic_eigenstate_frame,
                      identity_suite, init_wavefunction, propagate,
                      qhj_residual, run_verification)
from bohmflow.core import NumericalError
from bohmflow.diagnostics import DiagnosticsReport, operator_product_fields, rate_fields
from oracles import FieldOracle, gaussian_packet_expr

UNITS = PhysicalUnits()


def _gaussian_triple(grid, t, dt, x0=0.0, sigma0=1.0, k0=1.0):
    return (free_gaussian_frame(grid, t - dt, x0, sigma0, k0, UNITS),
            free_gaussian_frame(grid, t, x0, sigma0, k0, UNITS),
            free_gaussian_frame(grid, t + dt, x0, sigma0, k0, UNITS))


def _oscillator_triple(grid, t, dt, n=0):
    return (harmonic_eigenstate_frame(grid, t - dt, n, 1.0, UNITS),
            harmonic_eigenstate_frame(grid, t, n, 1.0, UNITS),
            harmonic_eigenstate_frame(grid, t + dt, n, 1.0, UNITS))


# ---------------------------------------------------------------------------
# expectation values
# ---------------------------------------------------------------------------

def test_plane_wave_expectations():
    g = build_grid(-10, 10, 4096)
    f = init_wavefunction(InitialStateSpec.plane_wave(2.0), g)
    mom = expectation_momentum(f)
    assert mom.exp_pQ == pytest.approx(2.0, abs=1e-6)
    assert mom.exp_pR == pytest.approx(2.0, abs=1e-6)
    assert abs(mom.exp_pI) < 1e-8


def test_oscillator_ground_state_momenta_vanish():
    g = build_grid(-10, 10, 2048)
    f = init_wavefunction(InitialStateSpec.harmonic_eigenstate(0), g,
                          potential=PotentialSpec.harmonic(1.0))
    mom = expectation_momentum(f)
    assert abs(mom.exp_pQ) < 1e-12
    assert abs(mom.exp_pR) < 1e-12
    assert abs(mom.exp_pI) < 1e-12


def test_gaussian_momentum_values_and_equivalence():
    # resolution puts the stencil symbol's k^5 correction below 1e-8
    g = build_grid(-10, 10, 4096)
    f = init_wavefunction(InitialStateSpec.gaussian(0.0, 1.0, 3.0), g)
    mom = expectation_momentum(f)
    assert mom.exp_pR == pytest.approx(3.0, abs=1e-8)
    assert abs(mom.exp_pR - mom.exp_pQ) < 1e-8
    assert abs(mom.exp_pI) < 1e-8
    assert abs(mom.exp_pQ_imag) < 1e-10


def test_equivalence_holds_on_confined_states():
    g = build_grid(-12, 12, 2048)
    states = [
        init_wavefunction(InitialStateSpec.gaussian(-1.0, 1.4, 2.0), g),
        free_gaussian_frame(g, 0.8, 0.0, 1.0, 1.0, UNITS),
        harmonic_eigenstate_frame(g, 0.25, 3, 1.0, UNITS),
    ]
    for f in states:
        mom = expectation_momentum(f)
        assert abs(mom.exp_pR - mom.exp_pQ) < 1e-8 * (1 + abs(mom.exp_pQ))
        assert abs(mom.exp_pI) < 1e-8


def test_masked_mass_guard():
    # a sub-threshold side lobe can only carry enough probability to trip the
    # guard near the top of the allowed node_epsilon range
    from bohmflow.core import WavefunctionFrame
    g = build_grid(-10, 10, 1024)
    x = g.x
    main = np.exp(-0.5 * (x - 5.0) ** 2)
    lobe = 8e-4 * np.exp(-((x + 5.0) / 3.0) ** 2)
    vals = (main + lobe).astype(complex)
    vals /= np.sqrt(np.trapezoid(np.abs(vals) ** 2, dx=g.dx))
    f = WavefunctionFrame(g, 0.0, vals)
    with pytest.raises(NumericalError, match="masked probability"):
        expectation_momentum(f, node_epsilon=9e-4)


# ---------------------------------------------------------------------------
# commutator
# ---------------------------------------------------------------------------

def test_commutator_gaussian():
    g = build_grid(-10, 10, 8192)
    f = init_wavefunction(InitialStateSpec.gaussian(1.5, 1.0, 2.0), g)
    assert check_commutator(f) < 1e-10


def test_commutator_plane_wave():
    g = build_grid(-10, 10, 8192)
    f = init_wavefunction(InitialStateSpec.plane_wave(1.0), g)
    assert check_commutator(f) < 1e-10


def test_commutator_state_with_node():
    g = build_grid(-10, 10, 8192)
    f = init_wavefunction(InitialStateSpec.harmonic_eigenstate(1), g,
                          potential=PotentialSpec.harmonic(1.0))
    assert check_commutator(f) < 1e-10


# ---------------------------------------------------------------------------
# operator products
# ---------------------------------------------------------------------------

def test_products_plane_wave():
    g = build_grid(-10, 10, 2048)
    f = init_wavefunction(InitialStateSpec.plane_wave(2.0), g)
    ops = operator_product_fields(f)
    el = ops.eligible
    assert np.abs(ops.defined["prod_RR"][el] - 2.0).max() < 1e-8
    for name in ("prod_II", "prod_RI", "prod_IR"):
        assert np.abs(ops.defined[name][el]).max() < 1e-7, name


def test_products_ground_state_reduce_to_curvature():
    g = build_grid(-10, 10, 2048)
    f = init_wavefunction(InitialStateSpec.harmonic_eigenstate(0), g,
                          potential=PotentialSpec.harmonic(1.0))
    ops = operator_product_fields(f)
    el = ops.eligible & (np.abs(g.x) < 5)
    vq = 0.5 - 0.5 * g.x**2
    assert np.abs(ops.defined["prod_II"] - vq)[el].max() < 1e-6
    for name in ("prod_RR", "prod_RI", "prod_IR"):
        assert np.abs(ops.defined[name][el]).max() < 1e-10, name


def test_products_match_symbolic_oracle():
    g = build_grid(-10, 10, 2048)
    t = 0.5
    f = free_gaussian_frame(g, t, 0.0, 1.0, 1.0, UNITS)
    oracle = FieldOracle(gaussian_packet_expr(0, 1, 1)).fields(g.x, t)
    ops = operator_product_fields(f)
    el = ops.eligible
    for name in ("prod_RR", "prod_II", "prod_RI", "prod_IR"):
        scale = np.abs(oracle[name][el]).max()
        for route in (ops.defined, ops.cross):
            assert np.abs(route[name] - oracle[name])[el].max() < 1e-4 * scale, name


def test_identity_suite_dual_routes():
    g = build_grid(-9, 9, 2048)
    triple = _gaussian_triple(g, 0.5, 1e-4)
    ids = identity_suite(*triple)
    for name, value in ids.items():
        assert value < 1e-6, (name, value)


# ---------------------------------------------------------------------------
# rates, continuity, energy balance
# ---------------------------------------------------------------------------

def test_rates_match_oracle():
    g = build_grid(-10, 10, 2048)
    t, dt = 0.5, 1e-4
    triple = _gaussian_triple(g, t, dt, k0=1.0)
    rates = rate_fields(*triple)
    oracle = FieldOracle(gaussian_packet_expr(0, 1, 1)).fields(g.x, t)
    keep = rates.valid
    scale_r = np.abs(oracle["e_R"][keep]).max()
    assert np.abs(rates.e_R - oracle["e_R"])[keep].max() < 1e-6 * scale_r
    scale_i = np.abs(oracle["e_I"][keep]).max()
    assert np.abs(rates.e_I - oracle["e_I"])[keep].max() < 1e-6 * scale_i


def test_rates_require_uniform_spacing():
    g = build_grid(-10, 10, 512)
    fm = free_gaussian_frame(g, 0.0, 0.0, 1.0, 0.0, UNITS)
    f0 = free_gaussian_frame(g, 0.1, 0.0, 1.0, 0.0, UNITS)
    fp = free_gaussian_frame(g, 0.3, 0.0, 1.0, 0.0, UNITS)
    with pytest.raises(NumericalError, match="uniform"):
        rate_fields(fm, f0, fp)


def test_continuity_stationary_and_plane_wave():
    g = build_grid(-10, 10, 2048)
    cont = continuity_residual(*_oscillator_triple(g, 0.4, 1e-4))
    assert cont.max_residual < 1e-10

    fpw = [init_wavefunction(InitialStateSpec.plane_wave(2.0), g)] * 3
    from bohmflow.core import WavefunctionFrame
    triple = [WavefunctionFrame(g, t, fpw[0].values * np.exp(-2j * t))
              for t in (0.1, 0.2, 0.3)]
    cont2 = continuity_residual(*triple)
    assert cont2.max_residual < 1e-10


def test_qhj_eigenstate_rate_equals_energy():
    g = build_grid(-10, 10, 4096)
    dt = 1e-4
    triple = _oscillator_triple(g, 1.0, dt)
    qhj = qhj_residual(*triple, evaluate_potential(PotentialSpec.harmonic(1.0), g, UNITS))
    keep = qhj.eligible
    assert np.abs(qhj.e_R[keep] - 0.5).max() < 1e-8
    # pointwise residual is discretization noise; kill the far-tail
    # amplification and require the 1e-8 scale in the bulk
    bulk = keep & (np.abs(g.x) < 3.0)
    assert np.abs(qhj.residual[bulk]).max() < 1e-8


def test_residuals_second_order_convergence():
    # halving dx and dt shrinks both pointwise maxima by 4 (+-20%)
    levels = [(2048, 2e-2), (4095, 1e-2), (8189, 5e-3)]
    cont, qhj = [], []
    for n, dt in levels:
        g = build_grid(-12, 12, n)
        triple = _gaussian_triple(g, 0.5, dt, k0=1.0)
        cont.append(continuity_residual(*triple).max_residual)
        V = np.zeros(n)
        qhj.append(qhj_residual(*triple, V).max_residual)
    for seq in (cont, qhj):
        assert seq[0] / seq[1] == pytest.approx(4.0, rel=0.2), seq
        assert seq[1] / seq[2] == pytest.approx(4.0, rel=0.2), seq


def test_energy_partition_ground_state():
    g = build_grid(-10, 10, 2048)
    dt = 1e-4
    triple = _oscillator_triple(g, 1.0, dt)
    V = evaluate_potential(PotentialSpec.harmonic(1.0), g, UNITS)
    part = energy_partition(*triple, V)

    # quadrature oracle for the closed-form density rho = exp(-x^2)/sqrt(pi)
    rho = lambda x: np.exp(-x * x) / np.sqrt(np.pi)
    pot_expected, _ = quad(lambda x: rho(x) * 0.5 * x * x, -10, 10)
    vqu_expected, _ = quad(lambda x: rho(x) * 0.5 * (1 - x * x), -10, 10)
    assert pot_expected == pytest.approx(0.25, abs=1e-12)
    assert vqu_expected == pytest.approx(0.25, abs=1e-12)

    assert part.exp_eR == pytest.approx(0.5, abs=1e-6)
    assert abs(part.kinetic_R) < 1e-6
    assert part.potential_V == pytest.approx(0.25, abs=1e-6)
    assert part.quantum_pot_term == pytest.approx(0.25, abs=1e-6)
    assert abs(part.gap) < 1e-6 * part.exp_eR


def test_energy_partition_plane_wave():
    g = build_grid(-10, 10, 4096)
    from bohmflow.core import WavefunctionFrame
    base = init_wavefunction(InitialStateSpec.plane_wave(2.0), g)
    energy = 2.0  # hbar^2 k^2 / 2m
    triple = [WavefunctionFrame(g, t, base.values * np.exp(-1j * energy * t))
              for t in (0.0, 1e-4, 2e-4)]
    part = energy_partition(*triple, np.zeros(g.n_points))
    assert part.exp_eR == pytest.approx(2.0, rel=1e-6)
    assert part.kinetic_R == pytest.approx(2.0, rel=1e-6)
    assert abs(part.potential_V) == 0.0
    assert abs(part.quantum_pot_term) < 1e-6


def test_energy_conserved_along_run():
    g = build_grid(-12, 12, 1024)
    cfg = SimulationConfig(g, UNITS, PotentialSpec.free(),
                           InitialStateSpec.gaussian(0.0, 1.0, 1.0),
                           dt=1e-3, n_steps=400, frame_stride=1)
    frames = propagate(cfg).frames
    V = np.zeros(g.n_points)
    early = energy_partition(frames[1 - 1], frames[1], frames[2], V)
    late = energy_partition(frames[-3], frames[-2], frames[-1], V)
    assert abs(late.exp_eR - early.exp_eR) < 1e-8 * abs(early.exp_eR)


# ---------------------------------------------------------------------------
# report and verification
# ---------------------------------------------------------------------------

def test_report_roundtrip():
    g = build_grid(-10, 10, 2048)
    triple = _gaussian_triple(g, 0.5, 1e-4)
    report = build_report(*triple, np.zeros(g.n_points))
    data = report.to_dict()
    assert data["schema_version"] == "bohmflow/diagnostics-v1"
    assert data["n_points"] == 2048
    back = DiagnosticsReport.from_dict(data)
    assert back == report


def test_full_verification_passes_on_oscillator():
    # n = 8192 keeps the propagator's 2nd-order Laplacian error (which the
    # 4th-order diagnostics stencils expose as a partition gap ~ dx^2/32)
    # well under the 1e-6 partition tolerance
    g = build_grid(-10, 10, 8192)
    cfg = SimulationConfig(g, UNITS, PotentialSpec.harmonic(1.0),
                           InitialStateSpec.harmonic_eigenstate(0),
                           dt=1e-4, n_steps=200, frame_stride=1)
    result = run_verification(cfg)
    failed = [c for c in result.checks if not c.passed]
    assert result.passed, failed
