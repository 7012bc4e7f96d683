"""Angular geometry factors and resonant Rabi frequencies of laser-driven
atomic multipole transitions: exact Wigner algebra, transverse vector
harmonics, Jones-calculus polarization, plane-wave and structured-beam
couplings, and a scenario-driven CLI."""

__version__ = "0.1.0"

from .angular import (
    HalfInt,
    SphDirection,
    SqrtRational,
    sph_harm,
    wigner3j,
    wigner6j,
    wigner_d_pm1,
)
from .beams import (
    BeamSpec,
    ConvergenceError,
    GouyCorrection,
    HermiteGaussMode,
    LaguerreGaussMode,
    PlaneWaveMode,
    UnsupportedModeError,
    VectorMode,
    beam_coupling_integral,
    beam_field,
    fourier_profile,
    gouy_correction,
    radial_donut_mode,
)
from .coupling import (
    CouplingResult,
    OptimizationResult,
    PlaneWaveDrive,
    TransitionSpec,
    multi_beam_coupling,
    multipole_prefactors,
    optimize_geometry,
    plane_wave_coupling,
    rabi_frequency,
    rabi_frequency_hyperfine,
    reduced_matrix_element_from_A,
    selectivity,
    suppression_phase,
)
from .frames import (
    CVec3,
    HelicityFrame,
    bilinear_dot,
    helicity_frame,
    spherical_components,
)
from .polarization import (
    JonesVector,
    PolarizationError,
    WavePlate,
    apply_waveplate,
    beta_vector,
    cvec_to_jones,
    jones_to_cvec,
    named_polarization,
)
from .scenario import (
    InfeasibleError,
    ResultTable,
    Scenario,
    ScenarioError,
    emit,
    parse_scenario,
    run_scenario,
    scenario_to_toml,
)
from .tensors import (
    SphTensor,
    nested_stretched,
    tensor_product,
    verify_polarization_identity,
)
from .vsh import VshValue, vsh_grid, vsh_magnitude_W, vsh_plus1, vsh_zero
