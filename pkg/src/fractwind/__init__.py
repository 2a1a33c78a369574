"""Fractional and integer winding numbers of dissipative two-band chains."""
from .dynamics import (EvolutionState, correlation_on_grid, integrate_ode, propagate, rebase,
                       steady_state, trajectory)
from .errors import (CoarseGridError, ConfigError, DegenerateError, FractwindError, GapClosedError,
                     OriginCrossingError, ReferenceOnPathError, SingularSystemError, SpectrumError,
                     StepSizeError, UnstableError)
from .model import (KWindow, ModelParams, bloch_hamiltonian, damping_matrix, gain_matrix,
                    initial_correlation, jump_operators, loss_matrix, m_from_jumps, scenario_params)
from .pauli import decompose, eig2, expm2, reconstruct, solve_lyapunov
from .symmetry import (inversion_defect, matrix_function_alignment, modular_hamiltonian,
                       modular_trajectory)
from .topology import (NORTH, SOUTH, Trajectory, TransitionEvent, WindingReport, berry_winding,
                       bloch_vector, decompose_windows, detect_dynamical_transition,
                       detect_steady_transitions, planar_winding, solid_angle, tune_gamma,
                       window_value, window_windings)

__version__ = "0.1.0"
