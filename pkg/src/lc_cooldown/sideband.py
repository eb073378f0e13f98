"""Sideband-cooling rate theory: the two-stage approximation chain.

The cavity cools the membrane at the scattering rates A+/-, and the cooled
membrane in turn cools the circuit at the analogous rates A+/-^LC built
from the broadened mechanical line.  These closed forms approximate the
exact Lyapunov occupancies away from strong coupling; the exact solver in
:mod:`lc_cooldown.steady` is the reference they are validated against.
"""

from __future__ import annotations

from dataclasses import dataclass

from .dynamics import LinearModel
from .errors import DomainError

__all__ = ["OpticalRates", "LcRates", "Cooperativities", "SidebandSummary",
           "optical_rates", "mech_occupancy_approx", "lc_rates",
           "lc_occupancy_approx", "cooperativities", "sideband_summary"]


@dataclass(frozen=True)
class OpticalRates:
    """Optical scattering rates acting on the mechanical mode [rad/s]."""

    a_plus: float    # heating (anti-Stokes into the lower sideband)
    a_minus: float   # cooling
    gamma_opt: float  # net optical damping A- - A+


@dataclass(frozen=True)
class LcRates:
    """Mechanically mediated scattering rates acting on the circuit [rad/s]."""

    a_plus: float
    a_minus: float
    gamma_em: float       # net electromechanical damping A-^LC - A+^LC
    gamma_lc_eff: float   # gamma_LC + gamma_em


@dataclass(frozen=True)
class Cooperativities:
    """Coupling figures of merit and the cascaded-cooling regime flag."""

    c_om: float      # optomechanical cooperativity G^2/(2 kappa gamma_m)
    c_em: float      # electromechanical cooperativity g^2/(gamma_LC gamma_m)
    regime_ok: bool  # C_em > 10 C_om and C_om > 10


def optical_rates(G: float, kappa: float, Delta: float, omega_m: float) -> OpticalRates:
    """Scattering rates A+- = G^2 kappa/2 / [kappa^2 + (Delta +- omega_m)^2]."""
    if kappa <= 0.0:
        raise DomainError(f"kappa must be > 0, got {kappa}")
    if omega_m <= 0.0:
        raise DomainError(f"omega_m must be > 0, got {omega_m}")
    half = G * G * kappa / 2.0
    a_plus = half / (kappa**2 + (Delta + omega_m) ** 2)
    a_minus = half / (kappa**2 + (Delta - omega_m) ** 2)
    return OpticalRates(a_plus=a_plus, a_minus=a_minus, gamma_opt=a_minus - a_plus)


def mech_occupancy_approx(rates: OpticalRates, nbar_m: float, gamma_m: float) -> float:
    """Optically cooled mechanical occupancy.

    n_m_eff = (gamma_m nbar_m + A+) / (gamma_m + Gamma_m), with the optical
    reservoir at zero temperature.
    """
    gamma_eff = gamma_m + rates.gamma_opt
    if gamma_eff <= 0.0:
        raise DomainError(
            f"effective mechanical damping {gamma_eff:.6g} rad/s is not positive")
    return (gamma_m * nbar_m + rates.a_plus) / gamma_eff


def lc_rates(g: float, gamma_m_eff: float, omega_m: float, omega_lc: float,
             gamma_lc: float) -> LcRates:
    """Circuit scattering rates off the broadened mechanical line.

    A+-^LC = g^2 gamma_m_eff / [gamma_m_eff^2 + 4 (omega_m +- omega_lc)^2].
    """
    if gamma_m_eff <= 0.0:
        raise DomainError(f"gamma_m_eff must be > 0, got {gamma_m_eff}")
    if gamma_lc < 0.0:
        raise DomainError(f"gamma_lc must be >= 0, got {gamma_lc}")
    num = g * g * gamma_m_eff
    a_plus = num / (gamma_m_eff**2 + 4.0 * (omega_m + omega_lc) ** 2)
    a_minus = num / (gamma_m_eff**2 + 4.0 * (omega_m - omega_lc) ** 2)
    gamma_em = a_minus - a_plus
    return LcRates(a_plus=a_plus, a_minus=a_minus, gamma_em=gamma_em,
                   gamma_lc_eff=gamma_lc + gamma_em)


def lc_occupancy_approx(rates: LcRates, nbar_lc: float, nbar_m_eff: float,
                        gamma_lc: float) -> float:
    """Cascaded-cooling prediction for the circuit occupancy.

    n_LC_eff = (gamma_LC nbar_LC + Gamma_LC n_m_eff + A+^LC)
               / (gamma_LC + Gamma_LC).
    """
    denom = gamma_lc + rates.gamma_em
    if denom <= 0.0:
        raise DomainError(
            f"effective circuit damping {denom:.6g} rad/s is not positive")
    return (gamma_lc * nbar_lc + rates.gamma_em * nbar_m_eff + rates.a_plus) / denom


def cooperativities(G: float, g: float, kappa: float, gamma_m: float,
                    gamma_lc: float) -> Cooperativities:
    """Cooperativities and the cascaded-regime criterion.

    The chain works when the circuit drains the membrane faster than the
    membrane rethermalizes relative to the optical loading: C_em well above
    C_om, and C_om itself well above 1.  "Well above" is implemented as a
    factor of 10.
    """
    if kappa <= 0.0 or gamma_m <= 0.0 or gamma_lc <= 0.0:
        raise DomainError("cooperativities require kappa, gamma_m, gamma_lc > 0")
    c_om = G * G / (2.0 * kappa * gamma_m)
    c_em = g * g / (gamma_lc * gamma_m)
    return Cooperativities(c_om=c_om, c_em=c_em,
                           regime_ok=(c_em > 10.0 * c_om) and (c_om > 10.0))


@dataclass(frozen=True)
class SidebandSummary:
    """Full approximation chain evaluated for one linear model."""

    optical: OpticalRates
    n_m_eff: float
    lc: LcRates
    n_lc_eff: float
    coop: Cooperativities


def sideband_summary(model: LinearModel) -> SidebandSummary:
    """Evaluate the cascaded chain for a :class:`LinearModel`."""
    opt = optical_rates(model.G, model.kappa, model.Delta, model.omega_m)
    n_m = mech_occupancy_approx(opt, model.nbar_m, model.gamma_m)
    lcr = lc_rates(model.g, model.gamma_m + opt.gamma_opt, model.omega_m,
                   model.omega_lc, model.gamma_lc)
    n_lc = lc_occupancy_approx(lcr, model.nbar_lc, n_m, model.gamma_lc)
    coop = cooperativities(model.G, model.g, model.kappa, model.gamma_m,
                           model.gamma_lc)
    return SidebandSummary(optical=opt, n_m_eff=n_m, lc=lcr, n_lc_eff=n_lc,
                           coop=coop)
