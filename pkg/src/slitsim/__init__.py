"""Double-slit interference from real-valued diffusion fields.

The package computes Gaussian packet dispersion, two-slit intensity,
averaged probability currents and trajectories from closed-form classical
fields, evolves the same physics on a diffusion lattice with time-dependent
diffusivity, and certifies everything against an independent complex
wave-packet reference.
"""

from .core import (
    Grid,
    PhysicalParams,
    ScalarField,
    SlitConfig,
    ValidationError,
    make_grid,
    make_params,
)
from .dispersion import (
    GaussianPacket,
    ballistic_diffusivity,
    delta_u_variance,
    gaussian_density,
    mean_square_displacement,
    osmotic_velocity,
    packet_velocity_field,
    sigma_t,
    slit_packets,
)
from .interference import (
    FringeReport,
    dark_fringe_positions,
    find_extrema,
    modular_momentum,
    normalize,
    relative_phase,
    slit_densities,
    total_intensity,
)
from .dynamics import (
    NodeSingularityError,
    TrajectorySet,
    VelocityDecomposition,
    average_velocity,
    flux_between,
    integrate_trajectories,
    total_current,
    total_current_expanded,
    velocity_decomposition,
)
from .oracle import (
    compare_fields,
    packet_wavefunction,
    quantum_current,
    superposed_density,
)
from .cml import (
    LatticeState,
    StabilityError,
    WalkerEnsemble,
    cml_init,
    cml_interfere,
    cml_run,
    cml_step,
    walker_ensemble_msd,
)
from .config import ConfigError, ExperimentConfig, default_config, load_config
from .runner import run_pipeline

__version__ = "0.1.0"
