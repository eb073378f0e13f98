"""Noise spectra of the circuit charge and the derived voltage observables.

Conventions: two-sided spectral densities of the dimensionless quadratures
against angular frequency, so variances are integrals over domega/(2*pi).
Susceptibilities carry units of seconds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .dynamics import LinearModel
from .errors import DomainError, NumericalError
from .sideband import lc_rates, optical_rates

__all__ = ["EffectiveLorentzian", "Detectability",
           "natural_susceptibilities", "effective_susceptibilities",
           "radiation_pressure_noise", "charge_noise_spectrum",
           "integrate_spectrum", "lorentzian_params", "spectrum_peak",
           "voltage_spectra", "detectability", "ac_response",
           "indirect_occupancy"]


@dataclass(frozen=True)
class EffectiveLorentzian:
    """Lorentzian parameters of the dressed circuit resonance [rad/s]."""

    omega_lc_eff: float
    gamma_lc_eff: float


@dataclass(frozen=True)
class Detectability:
    """Peak signal against measurement imprecision."""

    margin: float     # (q_zpf^2/C^2) S_peak / S_imp
    detectable: bool  # margin > 10


def natural_susceptibilities(model: LinearModel, omega):
    """Bare susceptibilities (chi_c, chi_m, chi_lc) [s] at ``omega`` [rad/s]."""
    w = np.asarray(omega, dtype=float)
    chi_c = model.Delta / (model.Delta**2 + (model.kappa - 1j * w) ** 2)
    chi_m = model.omega0 / (model.omega_m**2 - w**2 - 1j * model.gamma_m * w)
    chi_lc = model.omega_lc / (model.omega_lc**2 - w**2 - 1j * model.gamma_lc * w)
    return chi_c, chi_m, chi_lc


def effective_susceptibilities(model: LinearModel, omega):
    """Dressed susceptibilities (chi_mc, chi_lc_eff) [s].

    chi_mc^-1 = chi_m^-1 - G^2 chi_c folds the cavity into the mechanics;
    chi_lc_eff^-1 = chi_lc^-1 - g^2 chi_mc folds both into the circuit.
    """
    chi_c, chi_m, chi_lc = natural_susceptibilities(model, omega)
    chi_mc = 1.0 / (1.0 / chi_m - model.G**2 * chi_c)
    chi_lc_eff = 1.0 / (1.0 / chi_lc - model.g**2 * chi_mc)
    return chi_mc, chi_lc_eff


def radiation_pressure_noise(model: LinearModel, omega):
    """Radiation-pressure force noise S_rp(omega) [rad/s] on the membrane."""
    w = np.asarray(omega, dtype=float)
    d2k2 = model.Delta**2 + model.kappa**2
    return (model.G**2 * model.kappa * (d2k2 + w**2)
            / ((d2k2 - w**2) ** 2 + 4.0 * model.kappa**2 * w**2))


def charge_noise_spectrum(model: LinearModel, omega):
    """Two-sided charge quadrature noise spectrum S_dq(omega) [s].

    S_dq = |chi_lc_eff|^2 [ g^2 |chi_mc|^2 (S_rp + S_xi) + S_dV ] with the
    thermal drives S_xi = gamma_m (2 nbar_m + 1) and
    S_dV = gamma_lc (2 nbar_lc + 1).
    """
    chi_mc, chi_le = effective_susceptibilities(model, omega)
    s_th_m = model.gamma_m * (2.0 * model.nbar_m + 1.0)
    s_th_lc = model.gamma_lc * (2.0 * model.nbar_lc + 1.0)
    s_rp = radiation_pressure_noise(model, omega)
    return (np.abs(chi_le) ** 2
            * (model.g**2 * np.abs(chi_mc) ** 2 * (s_rp + s_th_m) + s_th_lc))


# Integration window in units of the largest system frequency.  The
# truncated omega^2-weighted tail contributes about
# gamma_lc (2 nbar_lc + 1)/(pi Omega), a few 1e-4 relative at 20x.
_WINDOW_FACTOR = 20.0


def integrate_spectrum(model: LinearModel) -> tuple[float, float]:
    """Variances (var_q, var_phi) from the spectrum.

    var_q  = int S_dq(omega) domega/2pi
    var_phi = int (omega^2/omega_lc^2) S_dq(omega) domega/2pi

    These equal the Lyapunov covariances V33 and V44; the quadrature is the
    independent route used to cross-check the algebraic solver.
    """
    try:
        lor = lorentzian_params(model)
        w_peak, w_width = lor.omega_lc_eff, lor.gamma_lc_eff
    except DomainError:
        w_peak, w_width = model.omega_lc, model.gamma_lc  # hint only
    big = max(model.omega_m, model.omega_lc, w_peak, model.kappa,
              abs(model.Delta), model.gamma_m, model.gamma_lc)
    window = _WINDOW_FACTOR * big
    # Bracket the dressed line inside a panel a few linewidths wide; a peak
    # sitting exactly on a panel boundary can otherwise starve the
    # subdivision (the line is ~1e-6 of the window for a bare high-Q
    # circuit) and silently lose the whole resonance.
    marks = {w_peak, model.omega_m}
    if w_width > 0.0:
        marks.update((w_peak - 5.0 * w_width, w_peak + 5.0 * w_width))
    hints = sorted({s * m for m in marks for s in (-1.0, 1.0)
                    if 0.0 < abs(m) < window})

    def run(weighted: bool) -> float:
        if weighted:
            fn = lambda w: (w**2 / model.omega_lc**2) * float(charge_noise_spectrum(model, w)) / (2.0 * math.pi)
        else:
            fn = lambda w: float(charge_noise_spectrum(model, w)) / (2.0 * math.pi)
        val, err = quad(fn, -window, window, points=hints, limit=500,
                        epsabs=0.0, epsrel=1e-10)
        if not math.isfinite(val):
            raise NumericalError("spectral integral did not converge")
        return val

    return run(False), run(True)


def lorentzian_params(model: LinearModel) -> EffectiveLorentzian:
    """Effective Lorentzian (omega_lc_eff, gamma_lc_eff) of the dressed
    circuit line.

    omega_lc_eff = sqrt(omega_lc^2 + g^2 kappa^2 / G^2);
    gamma_lc_eff = gamma_lc + Gamma_LC from the sideband chain.
    """
    if model.g == 0.0:
        return EffectiveLorentzian(omega_lc_eff=model.omega_lc,
                                   gamma_lc_eff=model.gamma_lc)
    if model.G == 0.0:
        raise DomainError(
            "effective Lorentzian parameters are undefined for G = 0 with g != 0")
    opt = optical_rates(model.G, model.kappa, model.Delta, model.omega_m)
    lcr = lc_rates(model.g, model.gamma_m + opt.gamma_opt, model.omega_m,
                   model.omega_lc, model.gamma_lc)
    w_eff = math.sqrt(model.omega_lc**2
                      + model.g**2 * model.kappa**2 / model.G**2)
    return EffectiveLorentzian(omega_lc_eff=w_eff, gamma_lc_eff=lcr.gamma_lc_eff)


def spectrum_peak(model: LinearModel) -> float:
    """Closed-form peak of S_dq [s], valid for Delta near omega_lc.

    S_peak = gamma_lc_eff^-2 [ S_dV + g^2 omega0^2
             / ((omega_m^2-omega_lc^2)^2 + (omega_lc gamma_m_eff)^2)
             * ( S_xi + G^2 (2 omega_lc^2+kappa^2)
                 / (kappa (4 omega_lc^2+kappa^2)) ) ]
    """
    s_th_lc = model.gamma_lc * (2.0 * model.nbar_lc + 1.0)
    if model.g == 0.0:
        return s_th_lc / model.gamma_lc**2
    lor = lorentzian_params(model)
    opt = optical_rates(model.G, model.kappa, model.Delta, model.omega_m)
    gamma_m_eff = model.gamma_m + opt.gamma_opt
    s_th_m = model.gamma_m * (2.0 * model.nbar_m + 1.0)
    wl2, k2 = model.omega_lc**2, model.kappa**2
    s_cav = model.G**2 * (2.0 * wl2 + k2) / (model.kappa * (4.0 * wl2 + k2))
    chi_mc_sq = model.omega0**2 / ((model.omega_m**2 - wl2) ** 2
                                   + wl2 * gamma_m_eff**2)
    return (s_th_lc + model.g**2 * chi_mc_sq * (s_th_m + s_cav)) / lor.gamma_lc_eff**2


def voltage_spectra(model: LinearModel, omega, s_imp_c: float = 0.0,
                    s_imp_l: float = 0.0):
    """Voltage noise read across the capacitor and the inductor [V^2 s].

    S_dVC = (q_zpf^2/C^2) S_dq + S_imp_C;
    S_dVL = (omega^4/omega_lc^4) (q_zpf^2/C^2) S_dq + S_imp_L.
    The two calibration factors coincide at omega = omega_lc.
    """
    if s_imp_c < 0.0 or s_imp_l < 0.0:
        raise DomainError("imprecision noise must be >= 0")
    cal = _charge_to_voltage(model)
    w = np.asarray(omega, dtype=float)
    s_dq = charge_noise_spectrum(model, w)
    s_vc = cal * s_dq + s_imp_c
    # ratio first, so the two readouts coincide exactly at omega = omega_lc
    s_vl = (w / model.omega_lc) ** 4 * cal * s_dq + s_imp_l
    return s_vc, s_vl


def _charge_to_voltage(model: LinearModel) -> float:
    if model.q_zpf <= 0.0 or model.c_at_xs <= 0.0:
        raise DomainError(
            "voltage calibration requires q_zpf and the working-point "
            "capacitance on the model")
    return model.q_zpf**2 / model.c_at_xs**2


def detectability(model: LinearModel, s_imp: float) -> Detectability:
    """Peak spectral signal against the measurement imprecision floor.

    margin = (q_zpf^2/C^2) S_peak / S_imp; above 10 the occupancy can be
    read directly off the calibrated spectrum.
    """
    if s_imp < 0.0:
        raise DomainError(f"S_imp must be >= 0, got {s_imp}")
    if s_imp == 0.0:
        return Detectability(margin=math.inf, detectable=True)
    margin = _charge_to_voltage(model) * spectrum_peak(model) / s_imp
    return Detectability(margin=margin, detectable=margin > 10.0)


def ac_response(model: LinearModel, omega, v_ac: float):
    """Charge quadrature response to a weak AC probe voltage.

    delta_q(omega) = chi_lc_eff(omega) * V_AC / phi_zpf; sweeping omega
    maps out the dressed circuit line directly.
    """
    if model.phi_zpf <= 0.0:
        raise DomainError("ac_response requires phi_zpf on the model")
    _, chi_le = effective_susceptibilities(model, omega)
    return chi_le * (v_ac / model.phi_zpf)


def indirect_occupancy(gamma_lc: float, gamma_lc_eff: float, nbar_lc: float) -> float:
    """Occupancy inferred from the linewidth ratio: (gamma/gamma_eff) nbar."""
    if not gamma_lc > 0.0:
        raise DomainError(f"gamma_lc must be > 0, got {gamma_lc}")
    if gamma_lc_eff < gamma_lc:
        raise DomainError("gamma_lc_eff must be >= gamma_lc")
    return gamma_lc / gamma_lc_eff * nbar_lc
