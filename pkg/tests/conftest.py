"""Shared fixtures: reference hardware stacks and random stable linear models.

The reference stack is written out literally here, on purpose: the presets in
``lc_cooldown.sweep`` must reproduce it, so the tests would catch an
accidental edit there.
"""

import math

import numpy as np
import pytest

from lc_cooldown import (
    BathParams,
    CircuitParams,
    DirectCoupling,
    DriveParams,
    LinearModel,
    MechanicsParams,
    OpticsParams,
    ParameterSet,
    drift_matrix,
    stability,
    validate,
)

TWO_PI = 2.0 * math.pi

# pi*c/(Lc*F) for the reference cavity below; frozen so tests can state
# couplings as fractions of kappa without recomputing it everywhere.
KAPPA_REF = 2354564.4591360665


def make_reference(
    T: float = 0.01,
    q_lc: float = 4e4,
    coupling=None,
    V_DC: float = 0.0,
    power=None,
) -> ParameterSet:
    """Reference stack: 8 mm cavity, 70 pg membrane, 1 MHz everything."""
    if coupling is None:
        coupling = DirectCoupling(
            G=0.8 * KAPPA_REF, g=0.12 * KAPPA_REF, consistent_spring_shift=True
        )
    return validate(
        ParameterSet(
            optics=OpticsParams(
                wavelength_lambda=1.064e-6,
                cavity_length_Lc=8e-3,
                finesse_F=5e4,
                kappa_in_fraction=0.5,
                membrane_reflectivity_Rm=0.4,
                overlap_Theta=1.0,
                membrane_axial_position_z0=1.064e-6 / 16.0,
                detuning_Delta=TWO_PI * 1e6,
                input_power_P=power,
            ),
            mechanics=MechanicsParams(
                mass_m=0.7e-10, omega0=TWO_PI * 1e6, quality_Qm=1e6
            ),
            circuit=CircuitParams(
                inductance_L=1e-3,
                omegaLC=TWO_PI * 1e6,
                quality_QLC=q_lc,
                effective_area_Aeff=1.1e-7,
                gap_h0=2e-6,
            ),
            drives=DriveParams(V_DC=V_DC),
            baths=BathParams(T_mech=T, T_LC=T),
            coupling_mode=coupling,
        )
    )


@pytest.fixture
def quantum_params() -> ParameterSet:
    """Direct-coupling stack at 10 mK with the bias-consistent spring shift."""
    return make_reference()


@pytest.fixture
def resonant_model() -> LinearModel:
    """Hand-built model with every oscillator pinned at 2*pi*1 MHz.

    Bypasses the working-point machinery so the mechanical frequency stays
    unshifted; occupancies are the 10 mK values of a 1 MHz mode.
    """
    w = TWO_PI * 1e6
    nbar = 207.86659129771473
    return LinearModel(
        omega0=w,
        omega_m=w,
        omega_lc=w,
        kappa=KAPPA_REF,
        Delta=w,
        gamma_m=w / 1e6,
        gamma_lc=w / 4e4,
        G=0.8 * KAPPA_REF,
        g=0.12 * KAPPA_REF,
        nbar_m=nbar,
        nbar_lc=nbar,
    )


def draw_stable_model(
    rng: np.random.Generator,
    gamma_lo: float = 1e-2,
    gamma_hi: float = 5e-2,
    nbar_max: float = 5.0,
) -> LinearModel:
    """One random stable model; damping rates bounded away from zero.

    The damping window keeps the slowest eigenvalue fast enough that
    time-domain relaxation tests finish quickly, and keeps spectral tails
    (which fall off as gamma/omega^2) well below integration tolerances.
    """
    while True:
        w0 = TWO_PI * rng.uniform(0.5e6, 2e6)
        wm = w0 * rng.uniform(0.7, 1.3)
        wlc = TWO_PI * rng.uniform(0.5e6, 2e6)
        kappa = wm * rng.uniform(0.2, 1.5)
        model = LinearModel(
            omega0=w0,
            omega_m=wm,
            omega_lc=wlc,
            kappa=kappa,
            Delta=wm * rng.uniform(0.3, 2.0),
            gamma_m=w0 * rng.uniform(gamma_lo, gamma_hi),
            gamma_lc=wlc * rng.uniform(gamma_lo, gamma_hi),
            G=kappa * rng.uniform(0.0, 0.5),
            g=min(wm, wlc) * rng.uniform(0.0, 0.3),
            nbar_m=rng.uniform(0.0, nbar_max),
            nbar_lc=rng.uniform(0.0, nbar_max),
        )
        if stability(drift_matrix(model)).stable:
            return model
