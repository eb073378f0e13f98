"""Classical working point: cavity dispersion, equilibrium, couplings.

The membrane sits in a driven Fabry-Perot cavity and forms one plate of the
capacitor of a series RLC circuit.  This module computes the dispersive
cavity frequency and its derivatives, the static displacement under the DC
bias (and optionally radiation pressure), the pull-in limit, the softened
mechanical frequency, and the two linearized coupling rates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .constants import C_LIGHT, EPSILON_0, HBAR
from .errors import DomainError, InstabilityError, NumericalError, PullInError
from .params import (
    DerivedConstants,
    DirectCoupling,
    OpticsParams,
    ParameterSet,
    capacitance,
    derive_constants,
)

__all__ = [
    "WorkingPoint",
    "mim_frequency",
    "mim_frequency_shift",
    "mim_frequency_derivatives",
    "pull_in_voltage",
    "solve_equilibrium",
    "effective_mech_frequency",
    "couplings",
    "voltage_for_coupling",
    "working_point",
]


@dataclass(frozen=True)
class WorkingPoint:
    """Classical steady state the fluctuations are linearized around."""

    x_s: float              # static membrane displacement [m]
    n_cav: float            # intracavity photon number
    alpha_s: complex        # cavity field amplitude
    q_s: float              # static capacitor charge [C]
    omega_m: float          # effective mechanical frequency [rad/s]
    G: float                # optomechanical coupling rate [rad/s]
    g: float                # electromechanical coupling rate [rad/s]
    Delta: float            # effective detuning [rad/s]
    C_at_xs: float          # capacitance at x_s [F]
    V_pull: float           # pull-in voltage [V]
    couplings_source: str   # "Physical" or "Direct"


# ---------------------------------------------------------------------------
# Membrane-in-the-middle dispersion
# ---------------------------------------------------------------------------

def mim_frequency_shift(x: float, optics: OpticsParams) -> float:
    """Cavity frequency shift from the membrane, relative to the bare
    resonance 2*pi*c/lambda [rad/s].

    Kept separate from :func:`mim_frequency` so finite differences of the
    shift are not limited by the ~1e15 rad/s offset of the full frequency.
    """
    k = 2.0 * math.pi / optics.wavelength_lambda
    r = math.sqrt(optics.membrane_reflectivity_Rm)
    return (optics.overlap_Theta * C_LIGHT / optics.cavity_length_Lc
            * math.asin(r * math.cos(2.0 * k * (optics.membrane_axial_position_z0 + x))))


def mim_frequency(x: float, optics: OpticsParams) -> float:
    """Dispersive cavity frequency omega(x) [rad/s] at membrane position x."""
    omega_c = 2.0 * math.pi * C_LIGHT / optics.wavelength_lambda
    return omega_c + mim_frequency_shift(x, optics)


def mim_frequency_derivatives(x: float, optics: OpticsParams) -> tuple[float, float]:
    """First and second derivatives of omega(x) [rad/s/m, rad/s/m^2]."""
    k = 2.0 * math.pi / optics.wavelength_lambda
    rm = optics.membrane_reflectivity_Rm
    r = math.sqrt(rm)
    pref = optics.overlap_Theta * C_LIGHT / optics.cavity_length_Lc
    theta = 2.0 * k * (optics.membrane_axial_position_z0 + x)
    s, c = math.sin(theta), math.cos(theta)
    root = math.sqrt(1.0 - rm * c * c)
    d1 = -pref * 2.0 * k * r * s / root
    d2 = -pref * (2.0 * k) ** 2 * r * c * (1.0 - rm) / root**3
    return d1, d2


# ---------------------------------------------------------------------------
# Electrostatics
# ---------------------------------------------------------------------------

def pull_in_voltage(p: ParameterSet) -> float:
    """Bias voltage above which no stable equilibrium exists [V]."""
    m, w0 = p.mechanics.mass_m, p.mechanics.omega0
    a, h0 = p.circuit.effective_area_Aeff, p.circuit.gap_h0
    return math.sqrt(8.0 * m * w0**2 * h0**3 / (27.0 * EPSILON_0 * a))


def _force_balance(p: ParameterSet, v_dc: float, n_cav: float):
    """Residual and derivative of the static force balance, as closures."""
    m, w0 = p.mechanics.mass_m, p.mechanics.omega0
    a, h0 = p.circuit.effective_area_Aeff, p.circuit.gap_h0
    b = EPSILON_0 * a * v_dc**2 / 2.0

    def f(x: float) -> float:
        val = m * w0**2 * x + b / (h0 + x) ** 2
        if n_cav > 0.0:
            val += HBAR * mim_frequency_derivatives(x, p.optics)[0] * n_cav
        return val

    def fprime(x: float) -> float:
        val = m * w0**2 - 2.0 * b / (h0 + x) ** 3
        if n_cav > 0.0:
            val += HBAR * mim_frequency_derivatives(x, p.optics)[1] * n_cav
        return val

    return f, fprime


def solve_equilibrium(p: ParameterSet, V_DC: float | None = None,
                      include_radiation: bool = False) -> float:
    """Static displacement x_s on the stable branch [m].

    Solves m*omega0^2*x + eps0*Aeff*V^2/(2*(h0+x)^2) = 0 (plus the radiation
    pressure force when requested) by a bracketed Newton iteration on
    x in (-h0/3, 0].  Raises :class:`PullInError` for V >= pull-in voltage,
    where the bracket holds no root.
    """
    if V_DC is None:
        V_DC = p.drives.V_DC
    if V_DC < 0.0:
        raise DomainError(f"V_DC must be >= 0, got {V_DC}")
    if V_DC >= pull_in_voltage(p):
        raise PullInError(
            f"V_DC = {V_DC:.6g} V reaches the pull-in voltage "
            f"{pull_in_voltage(p):.6g} V; no stable equilibrium")
    n_cav = 0.0
    if include_radiation and p.optics.input_power_P is not None:
        dc = derive_constants(p)
        n_cav = dc.E_drive**2 / (dc.kappa**2 + p.optics.detuning_Delta**2)
    if V_DC == 0.0 and n_cav == 0.0:
        return 0.0

    h0 = p.circuit.gap_h0
    f, fprime = _force_balance(p, V_DC, n_cav)
    lo, hi = -h0 / 3.0, 0.0
    flo = f(lo)
    fhi = f(hi)
    if flo > 0.0:
        # Radiation pressure is a ~1e-5 perturbation; if it breaks the
        # electrostatic bracket something is off with the inputs.
        raise NumericalError("force balance has no root on the stable branch")
    if fhi < 0.0:
        hi = h0 / 3.0
        fhi = f(hi)
        if fhi < 0.0:
            raise NumericalError("force balance has no root on the stable branch")

    x = 0.5 * (lo + hi)
    for _ in range(200):
        fx = f(x)
        if fx == 0.0:
            return x
        if fx > 0.0:
            hi = x
        else:
            lo = x
        dfx = fprime(x)
        if dfx > 0.0:
            step = fx / dfx
            x_new = x - step
        else:
            x_new = lo  # force bisection
        if not (lo < x_new < hi):
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) <= 1e-17 * h0 + abs(x_new) * 4e-16:
            return x_new
        x = x_new
    raise NumericalError("equilibrium Newton iteration did not converge")


def effective_mech_frequency(p: ParameterSet, x_s: float, n_cav: float,
                             V_DC: float | None = None) -> float:
    """Mechanical frequency softened by the optical and electrostatic
    spring at the working point [rad/s].

    omega_m^2 = omega0^2 + (hbar/m) omega''(x_s) n_cav
                - V^2 eps0 Aeff / (m (h0+x_s)^3)
    """
    if V_DC is None:
        V_DC = p.drives.V_DC
    m, w0 = p.mechanics.mass_m, p.mechanics.omega0
    a, h0 = p.circuit.effective_area_Aeff, p.circuit.gap_h0
    wm2 = w0**2 - V_DC**2 * EPSILON_0 * a / (m * (h0 + x_s) ** 3)
    if n_cav > 0.0:
        wm2 += HBAR / m * mim_frequency_derivatives(x_s, p.optics)[1] * n_cav
    if wm2 <= 0.0:
        raise InstabilityError(
            f"spring-softened omega_m^2 = {wm2:.6g} (rad/s)^2 is not positive")
    return math.sqrt(wm2)


# ---------------------------------------------------------------------------
# Couplings
# ---------------------------------------------------------------------------

def couplings(p: ParameterSet, dc: DerivedConstants, x_s: float, n_cav: float,
              V_DC: float | None = None) -> tuple[float, float]:
    """Linearized coupling rates (G, g) [rad/s] at the working point.

    G carries the sign of -omega'(x_s); only G^2 enters occupancies and
    spectra, so the sign is reported, not normalized away.
    """
    if V_DC is None:
        V_DC = p.drives.V_DC
    d1, _ = mim_frequency_derivatives(x_s, p.optics)
    g_opt = -dc.x_zpf * d1 * math.sqrt(2.0 * n_cav) if n_cav > 0.0 else 0.0
    c_xs = capacitance(p.circuit, x_s)
    h0 = p.circuit.gap_h0
    denom = math.sqrt(p.mechanics.mass_m * p.circuit.inductance_L
                      * p.circuit.omegaLC * p.mechanics.omega0)
    g_el = (EPSILON_0 * p.circuit.effective_area_Aeff * V_DC
            / (c_xs * (h0 + x_s) ** 2 * denom))
    return g_opt, g_el


# Margin below the pull-in voltage used as the search limit for the inverse
# coupling map; g(V) stays monotone on [0, V_pull) and this avoids the
# marginal point itself.
_V_PULL_MARGIN = 1.0 - 1e-12


def voltage_for_coupling(p: ParameterSet, g_target: float) -> float:
    """Bias voltage that realizes the electromechanical rate ``g_target``.

    Inverts the monotone map V -> g(V, x_s(V)) along the stable equilibrium
    branch by bisection.  Raises :class:`PullInError` when the target
    exceeds the largest rate reachable below pull-in.
    """
    if g_target < 0.0:
        raise DomainError(f"g_target must be >= 0, got {g_target}")
    if g_target == 0.0:
        return 0.0
    dc = derive_constants(p)

    def g_of(v: float) -> float:
        xs = solve_equilibrium(p, v)
        return couplings(p, dc, xs, 0.0, V_DC=v)[1]

    v_hi = pull_in_voltage(p) * _V_PULL_MARGIN
    g_hi = g_of(v_hi)
    if g_target >= g_hi:
        raise PullInError(
            f"electromechanical rate {g_target:.6g} rad/s exceeds the maximum "
            f"{g_hi:.6g} rad/s reachable below pull-in")
    lo, hi = 0.0, v_hi
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if g_of(mid) < g_target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-14 * v_hi:
            break
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# Working point assembly
# ---------------------------------------------------------------------------

def working_point(p: ParameterSet, dc: DerivedConstants | None = None) -> WorkingPoint:
    """Classical operating state for the configured coupling mode.

    Physical mode derives everything from power, bias, and geometry.  Direct
    mode takes (G, g) verbatim; the static quantities are still computed
    from the configured bias for diagnostics.  With
    ``consistent_spring_shift`` the bias is replaced by the one that
    produces the requested ``g``, so the mechanical frequency carries the
    matching electrostatic softening.
    """
    if dc is None:
        dc = derive_constants(p)
    delta = p.optics.detuning_Delta
    v_pull = pull_in_voltage(p)

    if isinstance(p.coupling_mode, DirectCoupling):
        cm = p.coupling_mode
        n_cav = 0.0
        alpha = 0j
        if p.optics.input_power_P is not None:
            alpha = dc.E_drive / (dc.kappa + 1j * delta)
            n_cav = abs(alpha) ** 2
        v_eff = p.drives.V_DC
        if cm.consistent_spring_shift and cm.g > 0.0:
            v_eff = voltage_for_coupling(p, cm.g)
        x_s = solve_equilibrium(p, v_eff)
        omega_m = effective_mech_frequency(p, x_s, n_cav, V_DC=v_eff)
        c_xs = capacitance(p.circuit, x_s)
        return WorkingPoint(
            x_s=x_s, n_cav=n_cav, alpha_s=alpha, q_s=c_xs * v_eff,
            omega_m=omega_m, G=cm.G, g=cm.g, Delta=delta, C_at_xs=c_xs,
            V_pull=v_pull, couplings_source="Direct")

    x_s = solve_equilibrium(p, include_radiation=True)
    alpha = dc.E_drive / (dc.kappa + 1j * delta)
    n_cav = abs(alpha) ** 2
    g_opt, g_el = couplings(p, dc, x_s, n_cav)
    omega_m = effective_mech_frequency(p, x_s, n_cav)
    c_xs = capacitance(p.circuit, x_s)
    return WorkingPoint(
        x_s=x_s, n_cav=n_cav, alpha_s=alpha, q_s=c_xs * p.drives.V_DC,
        omega_m=omega_m, G=g_opt, g=g_el, Delta=delta, C_at_xs=c_xs,
        V_pull=v_pull, couplings_source="Physical")
