"""bohmflow: 1D wave-packet propagation with a guiding-trajectory layer.

The package splits a complex wavefunction into amplitude and action phase,
derives the local momentum, velocity, and curvature-energy fields that steer
particle worldlines, and machine-verifies the operator identities tying
those fields back to standard quantum mechanics. A small tight-binding
module extends the same magnitude/phase picture to steady-state transport.
"""

from .analytic import (free_gaussian_frame, free_gaussian_trajectory,
                       free_gaussian_values, gaussian_sigma, harmonic_eigenstate_frame)
from .core import (BOUNDARY_TOLERANCE, ConfigError, ConfinementError, Grid1D,
                   InitialStateSpec, NumericalError, PhysicalUnits,
                   PotentialSpec, SimulationConfig, WavefunctionFrame,
                   build_grid, evaluate_potential, init_wavefunction, load_config)
from .diagnostics import (DiagnosticsReport, build_report, check_commutator,
                          continuity_residual, energy_partition,
                          expectation_momentum, identity_suite,
                          operator_product_fields, qhj_residual, rate_fields,
                          run_verification)
from .fields import (BohmFieldSet, PolarFields, compute_bohm_fields, compute_p_I,
                     compute_p_R, compute_quantum_potential,
                     compute_quantum_potential_2particle,
                     compute_velocity_and_current, momentum_rule, polar_decompose)
from .negf import (GreensRow, NegfModel, coherent_current_density,
                   compute_green_row, phase_velocity, sweep, transmission)
from .propagator import PropagationResult, propagate, step_crank_nicolson
from .trajectories import (TrajectoryEnsemble, TunnelReport,
                           integrate_trajectories, run_tunneling_experiment,
                           sample_initial_positions)

__version__ = "0.1.0"
