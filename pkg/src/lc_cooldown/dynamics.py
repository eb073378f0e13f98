"""Linearized fluctuation dynamics: drift and diffusion matrices, stability.

State ordering of the quadrature vector:

    u = (dx, dp, dq, dphi, dX, dY)

with the mechanical pair scaled by (x_zpf, p_zpf), the circuit pair by
(q_zpf, phi_zpf), and (dX, dY) the cavity quadratures.  All matrix entries
are rates in rad/s.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InstabilityError
from .params import (
    DerivedConstants,
    ParameterSet,
    bose_occupancy,
    derive_constants,
)
from .workingpoint import WorkingPoint, working_point

__all__ = ["LinearModel", "StabilityReport", "linear_model",
           "drift_matrix", "diffusion_matrix", "stability"]


@dataclass(frozen=True)
class LinearModel:
    """Everything the linearized dynamics depend on, in one flat bundle.

    The bath occupancy of the mechanical mode is evaluated at the effective
    frequency ``omega_m`` (the bath sees the softened oscillator), while
    :class:`DerivedConstants` reports it at the bare ``omega0``.
    """

    omega0: float    # bare mechanical frequency [rad/s]
    omega_m: float   # effective mechanical frequency [rad/s]
    omega_lc: float  # circuit resonance [rad/s]
    kappa: float     # cavity linewidth [rad/s]
    Delta: float     # detuning [rad/s]
    gamma_m: float   # mechanical damping [rad/s]
    gamma_lc: float  # circuit damping [rad/s]
    G: float         # optomechanical rate [rad/s]
    g: float         # electromechanical rate [rad/s]
    nbar_m: float    # mechanical bath occupancy at omega_m
    nbar_lc: float   # circuit bath occupancy at omega_lc
    # Voltage calibration of the charge spectra; optional extras.
    q_zpf: float = 0.0    # [C]
    phi_zpf: float = 0.0  # [V s]
    c_at_xs: float = 0.0  # [F]


def linear_model(p: ParameterSet,
                 dc: DerivedConstants | None = None,
                 wp: WorkingPoint | None = None) -> LinearModel:
    """Assemble the :class:`LinearModel` for a parameter set."""
    if dc is None:
        dc = derive_constants(p)
    if wp is None:
        wp = working_point(p, dc)
    return LinearModel(
        omega0=p.mechanics.omega0,
        omega_m=wp.omega_m,
        omega_lc=p.circuit.omegaLC,
        kappa=dc.kappa,
        Delta=wp.Delta,
        gamma_m=dc.gamma_m,
        gamma_lc=dc.gamma_LC,
        G=wp.G,
        g=wp.g,
        nbar_m=bose_occupancy(wp.omega_m, p.baths.T_mech),
        nbar_lc=dc.nbar_LC,
        q_zpf=dc.q_zpf,
        phi_zpf=dc.phi_zpf,
        c_at_xs=wp.C_at_xs,
    )


def drift_matrix(model: LinearModel) -> np.ndarray:
    """6x6 drift matrix A of du/dt = A u + noise."""
    a = np.zeros((6, 6))
    a[0, 1] = model.omega0
    a[1, 0] = -model.omega_m**2 / model.omega0
    a[1, 1] = -model.gamma_m
    a[1, 2] = -model.g
    a[1, 4] = model.G
    a[2, 3] = model.omega_lc
    a[3, 0] = -model.g
    a[3, 2] = -model.omega_lc
    a[3, 3] = -model.gamma_lc
    a[4, 4] = -model.kappa
    a[4, 5] = model.Delta
    a[5, 0] = model.G
    a[5, 4] = -model.Delta
    a[5, 5] = -model.kappa
    return a


def diffusion_matrix(model: LinearModel) -> np.ndarray:
    """Diagonal 6x6 diffusion matrix D of the quadrature covariances.

    Mechanical and circuit momenta carry thermal noise at their bath
    occupancies; both cavity quadratures carry vacuum noise at the full
    linewidth, independent of the input/loss split.
    """
    return np.diag([
        0.0,
        model.gamma_m * (2.0 * model.nbar_m + 1.0),
        0.0,
        model.gamma_lc * (2.0 * model.nbar_lc + 1.0),
        model.kappa,
        model.kappa,
    ])


@dataclass(frozen=True)
class StabilityReport:
    """Spectral stability summary of the drift matrix."""

    eigenvalues: np.ndarray  # complex, shape (6,)
    stable: bool             # all real parts strictly negative
    margin: float            # -max(Re lambda) [rad/s]; > 0 when stable


def stability(a: np.ndarray, raise_on_unstable: bool = False) -> StabilityReport:
    """Eigenvalue stability check of a drift matrix.

    The strictness tolerance scales with the largest rate in A, so a
    marginal zero mode is not misread as stable through rounding.
    """
    eig = np.linalg.eigvals(np.asarray(a, dtype=float))
    margin = float(-np.max(eig.real))
    tol = 1e-9 * max(1.0, float(np.max(np.abs(a))))
    stable = margin > tol
    if raise_on_unstable and not stable:
        raise InstabilityError(
            f"drift matrix is not asymptotically stable (margin {margin:.6g} rad/s)")
    return StabilityReport(eigenvalues=eig, stable=stable, margin=margin)


def thermal_covariance(model: LinearModel) -> np.ndarray:
    """Covariance of the uncoupled thermal state (diagnostic initial state)."""
    nm, nl = model.nbar_m, model.nbar_lc
    return np.diag([nm + 0.5, nm + 0.5, nl + 0.5, nl + 0.5, 0.5, 0.5])


def _decoupled(model: LinearModel) -> bool:
    return model.G == 0.0 and model.g == 0.0


def expected_decoupled_margin(model: LinearModel) -> float:
    """Closed-form stability margin when G = g = 0 (test helper).

    The three 2x2 blocks have eigenvalue real parts -gamma_m/2, -gamma_lc/2
    (underdamped), and -kappa.
    """
    if not _decoupled(model):
        raise ValueError("closed form only holds for the decoupled model")
    parts = [model.kappa]
    # Block characteristic polynomials: l^2 + gamma*l + om^2 with om the
    # geometric mean of the off-diagonal entries.
    for gam, om in ((model.gamma_m, model.omega_m),
                    (model.gamma_lc, model.omega_lc)):
        if gam**2 < 4.0 * om**2:
            parts.append(gam / 2.0)
        else:
            parts.append(gam / 2.0 - math.sqrt(gam**2 / 4.0 - om**2))
    return min(parts)
