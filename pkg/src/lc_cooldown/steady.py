"""Steady-state covariance: Lyapunov solve, occupancies, time evolution.

The stationary covariance V of the linearized system solves

    A V + V A^T + D = 0.

``solve_lyapunov`` does this directly through the 36x36 Kronecker form;
``evolve_covariance`` integrates the moment equations in time instead and
is kept as an independent cross-check of the algebraic route.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .dynamics import (
    LinearModel,
    StabilityReport,
    diffusion_matrix,
    drift_matrix,
    stability,
)
from .errors import DomainError, InstabilityError, NumericalError

__all__ = ["SteadyState", "solve_lyapunov", "occupancy_lc", "occupancy_mech",
           "cooling_efficiency", "steady_state", "evolve_covariance"]

# Residual acceptance for the algebraic solve, relative to the largest
# diffusion entry.
_RESIDUAL_RTOL = 1e-8

# Occupancies this far below zero are reported; smaller dips are rounding.
_NEGATIVE_OCC_WARN = -1e-9


def solve_lyapunov(a: np.ndarray, d: np.ndarray) -> np.ndarray:
    """Stationary covariance solving A V + V A^T + D = 0.

    Parameters
    ----------
    a : ndarray, shape (6, 6)
        Drift matrix; must be asymptotically stable.
    d : ndarray, shape (6, 6)
        Symmetric positive semidefinite diffusion matrix.

    Returns
    -------
    ndarray, shape (6, 6)
        Symmetric covariance matrix with residual below 1e-8 of the
        largest entry of D.
    """
    a = np.asarray(a, dtype=float)
    d = np.asarray(d, dtype=float)
    if a.shape != d.shape or a.shape[0] != a.shape[1]:
        raise DomainError("drift and diffusion must be square and same shape")
    stability(a, raise_on_unstable=True)
    n = a.shape[0]
    eye = np.eye(n)
    k = np.kron(a, eye) + np.kron(eye, a)
    try:
        v = np.linalg.solve(k, -d.reshape(-1)).reshape(n, n)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"Lyapunov system is singular: {exc}") from None
    v = 0.5 * (v + v.T)
    d_scale = float(np.max(np.abs(d)))
    residual = float(np.max(np.abs(a @ v + v @ a.T + d)))
    if residual > _RESIDUAL_RTOL * d_scale:
        raise NumericalError(
            f"Lyapunov residual {residual:.3e} exceeds "
            f"{_RESIDUAL_RTOL:.0e} * max|D| = {_RESIDUAL_RTOL * d_scale:.3e}")
    return v


def _occupancy(v: np.ndarray, i: int, j: int, label: str) -> float:
    n = 0.5 * (v[i, i] + v[j, j] - 1.0)
    if n < 0.0:
        if n < _NEGATIVE_OCC_WARN:
            warnings.warn(
                f"{label} occupancy {n:.3e} is negative beyond rounding; "
                "covariance may be inaccurate", RuntimeWarning, stacklevel=3)
        n = 0.0
    return n


def occupancy_lc(v: np.ndarray) -> float:
    """Effective circuit occupancy (V33 + V44 - 1)/2."""
    return _occupancy(v, 2, 3, "circuit")


def occupancy_mech(v: np.ndarray) -> float:
    """Effective mechanical occupancy (V11 + V22 - 1)/2."""
    return _occupancy(v, 0, 1, "mechanical")


def cooling_efficiency(model: LinearModel, v: np.ndarray | None = None) -> float:
    """Occupancy reduction factor of the circuit mode.

    Ratio of the circuit occupancy with the electromechanical coupling
    switched off to the actual effective occupancy, both through the same
    solver path, so the uncoupled model yields exactly 1.
    """
    if v is None:
        v = solve_lyapunov(drift_matrix(model), diffusion_matrix(model))
    base_model = replace(model, g=0.0)
    v_base = solve_lyapunov(drift_matrix(base_model), diffusion_matrix(base_model))
    n_eff = occupancy_lc(v)
    if n_eff == 0.0:
        return math.inf
    return occupancy_lc(v_base) / n_eff


@dataclass(frozen=True)
class SteadyState:
    """Stationary covariance with its derived scalars."""

    covariance: np.ndarray
    n_lc_eff: float
    n_m_eff: float
    eta_lc: float
    report: StabilityReport


def steady_state(model: LinearModel) -> SteadyState:
    """Solve the stationary problem and collect the derived quantities."""
    a = drift_matrix(model)
    report = stability(a, raise_on_unstable=True)
    v = solve_lyapunov(a, diffusion_matrix(model))
    return SteadyState(
        covariance=v,
        n_lc_eff=occupancy_lc(v),
        n_m_eff=occupancy_mech(v),
        eta_lc=cooling_efficiency(model, v),
        report=report,
    )


# ---------------------------------------------------------------------------
# Time-domain integration of dV/dt = A V + V A^T + D
# ---------------------------------------------------------------------------

# Dormand-Prince 5(4) tableau.
_DP_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_DP_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_DP_B4 = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200,
          187 / 2100, 1 / 40)


def _affine_step_maps(k: np.ndarray, d_vec: np.ndarray, dt: float):
    """One Runge-Kutta step of the affine ODE y' = K y + d as an affine map.

    Because the right-hand side is affine and autonomous, the whole step
    collapses to y_next = S y + w with an embedded error estimate
    e = E y + f; the four arrays depend only on dt and are reused while
    the controller holds the step size.
    """
    n = k.shape[0]
    eye = np.eye(n)
    p_stages: list[np.ndarray] = []
    r_stages: list[np.ndarray] = []
    for i in range(7):
        acc_p = eye.copy()
        acc_r = np.zeros(n)
        for j, coeff in enumerate(_DP_A[i]):
            if coeff != 0.0:
                acc_p += (dt * coeff) * p_stages[j]
                acc_r += (dt * coeff) * r_stages[j]
        p_stages.append(k @ acc_p)
        r_stages.append(k @ acc_r + d_vec)
    s = eye.copy()
    w = np.zeros(n)
    e = np.zeros((n, n))
    f = np.zeros(n)
    for i in range(7):
        s += (dt * _DP_B5[i]) * p_stages[i]
        w += (dt * _DP_B5[i]) * r_stages[i]
        diff = _DP_B5[i] - _DP_B4[i]
        if diff != 0.0:
            e += (dt * diff) * p_stages[i]
            f += (dt * diff) * r_stages[i]
    return s, w, e, f


def evolve_covariance(a: np.ndarray, d: np.ndarray, v0: np.ndarray,
                      t_final: float, dt_control: float | None = None,
                      rtol: float = 1e-10) -> np.ndarray:
    """Integrate the covariance moment equations to ``t_final``.

    Adaptive embedded Runge-Kutta 5(4) on the vectorized covariance with
    the step collapsed to a cached affine map, refreshed only when the
    controller actually changes the step size.  The covariance is
    symmetrized after every accepted step.

    Parameters
    ----------
    a, d : ndarray, shape (6, 6)
        Drift and diffusion matrices.
    v0 : ndarray, shape (6, 6)
        Initial covariance.
    t_final : float
        Integration time [s], >= 0.
    dt_control : float, optional
        Initial and maximum step size [s]; by default scaled from the
        largest rate in A.
    rtol : float
        Per-step relative error target.
    """
    a = np.asarray(a, dtype=float)
    d = np.asarray(d, dtype=float)
    v = np.array(v0, dtype=float)
    if t_final < 0.0:
        raise DomainError(f"t_final must be >= 0, got {t_final}")
    if t_final == 0.0:
        return v
    n = a.shape[0]
    rate = float(np.max(np.abs(a)))
    if rate == 0.0:
        return v + d * t_final
    dt_max = dt_control if dt_control is not None else 0.1 / rate
    if dt_max <= 0.0:
        raise DomainError(f"dt_control must be > 0, got {dt_control}")

    eye = np.eye(n)
    k = np.kron(a, eye) + np.kron(eye, a)
    d_vec = d.reshape(-1)
    y = v.reshape(-1).copy()

    dt = min(dt_max, t_final)
    dt_cached = dt
    s, w, e, f = _affine_step_maps(k, d_vec, dt)
    t = 0.0
    steps = 0
    max_steps = 50_000_000
    while t < t_final:
        if steps >= max_steps:
            raise NumericalError("evolve_covariance exceeded the step budget")
        steps += 1
        h = min(dt, t_final - t)
        if h != dt_cached:
            s, w, e, f = _affine_step_maps(k, d_vec, h)
            dt_cached = h
        y_new = s @ y + w
        err_vec = e @ y + f
        scale = rtol * max(float(np.max(np.abs(y))), float(np.max(np.abs(y_new))), 1e-300)
        err = float(np.max(np.abs(err_vec))) / scale
        if err <= 1.0:
            t += h
            vm = y_new.reshape(n, n)
            vm = 0.5 * (vm + vm.T)
            y = vm.reshape(-1)
            # Grow the step only on a clear margin, so the cached affine
            # map keeps being reused for long stretches.
            if err < 0.01 and dt < dt_max:
                dt = min(dt * 2.0, dt_max)
        else:
            dt = h * max(0.2, 0.9 * err ** -0.2)
    return y.reshape(n, n)
