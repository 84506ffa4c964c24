"""Wavefronts, stationary-phase asymptotics and pseudo-norms of multi-particle Gamow states."""

from .errors import (
    BelowThresholdError,
    ConvergenceError,
    GamowError,
    InputError,
    MasslessParticleError,
    UnderResolvedError,
)
from .kinematics import (
    Dispersion,
    ParticleSystem,
    dispersion_energy,
    energy_on_front,
    mass_matrix,
    momentum_of_velocity,
    velocity_of_momentum,
)
from .tau_front import (
    ComplexEnergy,
    FrontSolution,
    front_surface_sample,
    grad_tau,
    lorentz_factors,
    solve_front,
    solve_tau,
    tau_implicit,
    tau_nonrel_closed,
)
from .stationary_phase import (
    action_energy_derivative,
    stationary_momenta,
    wavefront_factor,
    wavefront_factor_oracle,
)
from .pseudo_norm import (
    NormScan,
    ReducedState,
    StateKind,
    norm_convergence_scan,
    partition_state,
    partition_state_eval,
    pseudo_norm,
    separable_state,
    surface_integral,
    surface_weight,
    volume_integral,
    weight_nonrel_closed,
)
from . import delta_shell

__version__ = "0.1.0"
