"""Steady-state simulator for an optomechanically cooled rf LC circuit.

A membrane oscillator couples a driven optical cavity to a series RLC
circuit.  The package computes the classical working point, the linearized
Gaussian steady state and its occupancies, charge and voltage noise
spectra, and the sideband-cooling rate approximations, plus parameter
sweeps and a small CLI.
"""

from .constants import C_LIGHT, EPSILON_0, HBAR, KB
from .dynamics import (
    LinearModel,
    StabilityReport,
    diffusion_matrix,
    drift_matrix,
    linear_model,
    stability,
)
from .errors import (
    ConfigurationError,
    DomainError,
    InstabilityError,
    LcCooldownError,
    NumericalError,
    PullInError,
)
from .params import (
    BathParams,
    CircuitParams,
    DerivedConstants,
    DirectCoupling,
    DriveParams,
    MechanicsParams,
    OpticsParams,
    PHYSICAL,
    ParameterSet,
    bose_occupancy,
    capacitance,
    derive_constants,
    load_parameters,
    parameters_from_dict,
    parameters_to_dict,
    validate,
)
from .sideband import (
    Cooperativities,
    LcRates,
    OpticalRates,
    SidebandSummary,
    cooperativities,
    lc_occupancy_approx,
    lc_rates,
    mech_occupancy_approx,
    optical_rates,
    sideband_summary,
)
from .spectra import (
    Detectability,
    EffectiveLorentzian,
    ac_response,
    charge_noise_spectrum,
    detectability,
    effective_susceptibilities,
    indirect_occupancy,
    integrate_spectrum,
    lorentzian_params,
    natural_susceptibilities,
    radiation_pressure_noise,
    spectrum_peak,
    voltage_spectra,
)
from .steady import (
    SteadyState,
    cooling_efficiency,
    evolve_covariance,
    occupancy_lc,
    occupancy_mech,
    solve_lyapunov,
    steady_state,
)
from .sweep import (
    FIGURE_IDS,
    OUTPUT_NAMES,
    SweepAxis,
    SweepRecord,
    SweepResult,
    figure_spec,
    run_sweep,
)
from .workingpoint import (
    WorkingPoint,
    couplings,
    effective_mech_frequency,
    mim_frequency,
    mim_frequency_derivatives,
    mim_frequency_shift,
    pull_in_voltage,
    solve_equilibrium,
    voltage_for_coupling,
    working_point,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
