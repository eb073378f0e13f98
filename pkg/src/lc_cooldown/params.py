"""Physical inputs, validation, and derived constants.

All quantities are SI with angular frequencies in rad/s.  JSON configs may
give any frequency-like field (``omega0``, ``omegaLC``, ``detuning_Delta``,
``G``, ``g``) through a ``_hz``-suffixed variant instead, which is converted
by 2*pi on load.  Unknown keys are rejected rather than ignored, so a typo
cannot silently fall back to a default.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Mapping, Union

from .constants import C_LIGHT, EPSILON_0, HBAR, KB
from .errors import ConfigurationError, DomainError

# Exponent beyond which 1/(exp(x)-1) underflows double precision anyway.
_BOSE_X_MAX = 700.0


def bose_occupancy(omega: float, temperature: float) -> float:
    """Bose-Einstein occupancy of a mode at frequency ``omega``.

    Parameters
    ----------
    omega : float
        Mode angular frequency [rad/s], > 0.
    temperature : float
        Bath temperature [K], >= 0.

    Returns
    -------
    float
        1/(exp(hbar*omega/kB*T) - 1); 0 for T = 0 or when the exponent
        is large enough that the result underflows.
    """
    if omega <= 0.0:
        raise DomainError(f"bose_occupancy requires omega > 0, got {omega}")
    if temperature < 0.0:
        raise DomainError(f"bose_occupancy requires T >= 0, got {temperature}")
    if temperature == 0.0:
        return 0.0
    x = HBAR * omega / (KB * temperature)
    if x > _BOSE_X_MAX:
        return 0.0
    return 1.0 / math.expm1(x)


@dataclass(frozen=True)
class OpticsParams:
    """Cavity, membrane and drive-laser geometry."""

    wavelength_lambda: float        # laser wavelength [m]
    cavity_length_Lc: float         # cavity length [m]
    finesse_F: float                # cavity finesse
    kappa_in_fraction: float        # input-coupler share of the total linewidth
    membrane_reflectivity_Rm: float  # membrane intensity reflectivity, in [0, 1)
    overlap_Theta: float            # transverse overlap factor, in [0, 1]
    membrane_axial_position_z0: float  # membrane rest position along the axis [m]
    detuning_Delta: float           # effective cavity detuning [rad/s], any sign
    input_power_P: float | None = None  # drive power [W]; required in Physical mode


@dataclass(frozen=True)
class MechanicsParams:
    """Membrane mechanical mode."""

    mass_m: float       # effective mass [kg]
    omega0: float       # bare mechanical frequency [rad/s]
    quality_Qm: float   # mechanical quality factor


@dataclass(frozen=True)
class CircuitParams:
    """Series RLC circuit with a displacement-dependent capacitor.

    If ``tunable_capacitance_C0`` is given it fixes the capacitance budget
    and ``omegaLC`` is recomputed from 1/sqrt(L*(C0 + eps0*Aeff/h0)),
    overriding any provided value.  Otherwise the tunable part is inferred
    from ``omegaLC``.
    """

    inductance_L: float                 # inductance [H]
    omegaLC: float                      # circuit resonance [rad/s]
    quality_QLC: float                  # circuit quality factor
    effective_area_Aeff: float          # capacitor plate area [m^2]
    gap_h0: float                       # rest plate separation [m]
    tunable_capacitance_C0: float | None = None  # fixed shunt capacitance [F]


@dataclass(frozen=True)
class DriveParams:
    """DC bias."""

    V_DC: float  # bias voltage [V], >= 0


@dataclass(frozen=True)
class BathParams:
    """Thermal environments."""

    T_mech: float  # mechanical bath temperature [K]
    T_LC: float    # circuit bath temperature [K]


@dataclass(frozen=True)
class DirectCoupling:
    """Coupling rates imposed directly instead of derived from the hardware.

    With ``consistent_spring_shift`` the electromechanical rate ``g`` is
    mapped back to the bias voltage that produces it and the mechanical
    frequency is softened accordingly, so scans over ``g`` stay on the
    physical equilibrium branch.  Otherwise the mechanical frequency is
    computed from the configured ``V_DC`` (omega0 when the bias is zero).
    """

    G: float   # optomechanical rate [rad/s], >= 0
    g: float   # electromechanical rate [rad/s], >= 0
    consistent_spring_shift: bool = False


#: Physical mode: G and g are derived from power, bias, and geometry.
PHYSICAL = "Physical"

CouplingMode = Union[str, DirectCoupling]


@dataclass(frozen=True)
class ParameterSet:
    """Complete physical description of the tripartite system."""

    optics: OpticsParams
    mechanics: MechanicsParams
    circuit: CircuitParams
    drives: DriveParams
    baths: BathParams
    coupling_mode: CouplingMode = PHYSICAL

    def replace_coupling(self, **kw: Any) -> "ParameterSet":
        """Copy with Direct-coupling fields updated."""
        if not isinstance(self.coupling_mode, DirectCoupling):
            raise ConfigurationError("replace_coupling requires Direct coupling mode")
        from dataclasses import replace
        return replace(self, coupling_mode=replace(self.coupling_mode, **kw))


@dataclass(frozen=True)
class DerivedConstants:
    """Rates and scales fixed by the inputs alone (no working point needed)."""

    kappa: float            # total cavity linewidth [rad/s]
    kappa_in: float         # input-coupler linewidth share [rad/s]
    kappa_ex: float         # remaining linewidth [rad/s]
    gamma_m: float          # mechanical damping omega0/Qm [rad/s]
    gamma_LC: float         # circuit damping omegaLC/QLC [rad/s]
    C_total_at_rest: float  # C(x=0) [F]
    resistance_R: float     # series resistance L*gamma_LC [ohm]
    x_zpf: float            # sqrt(hbar/(m*omega0)) [m]
    p_zpf: float            # sqrt(hbar*m*omega0) [kg m/s]
    q_zpf: float            # sqrt(hbar/(L*omegaLC)) [C]
    phi_zpf: float          # sqrt(hbar*L*omegaLC) [V s]
    nbar_m: float           # bath occupancy at omega0
    nbar_LC: float          # bath occupancy at omegaLC
    E_drive: float          # drive amplitude sqrt(2*kappa_in*P/(hbar*omega_laser)) [1/s]


def capacitance(circuit: CircuitParams, x: float) -> float:
    """Total capacitance C(x) = C0 + eps0*Aeff/(h0 + x) [F].

    ``x`` is the membrane displacement toward the fixed plate; the physical
    range is x > -h0.
    """
    if x <= -circuit.gap_h0:
        raise DomainError(f"displacement {x} closes the gap h0={circuit.gap_h0}")
    c_rest = _rest_capacitance(circuit)
    c_bare = c_rest - EPSILON_0 * circuit.effective_area_Aeff / circuit.gap_h0
    return c_bare + EPSILON_0 * circuit.effective_area_Aeff / (circuit.gap_h0 + x)


def _rest_capacitance(circuit: CircuitParams) -> float:
    """C at x = 0, from C0 when given, else from the circuit resonance."""
    if circuit.tunable_capacitance_C0 is not None:
        return (circuit.tunable_capacitance_C0
                + EPSILON_0 * circuit.effective_area_Aeff / circuit.gap_h0)
    return 1.0 / (circuit.inductance_L * circuit.omegaLC**2)


def derive_constants(p: ParameterSet) -> DerivedConstants:
    """Compute every scale that does not depend on the working point."""
    o, mech, c, b = p.optics, p.mechanics, p.circuit, p.baths
    kappa = math.pi * C_LIGHT / (o.cavity_length_Lc * o.finesse_F)
    kappa_in = o.kappa_in_fraction * kappa
    gamma_m = mech.omega0 / mech.quality_Qm
    gamma_lc = c.omegaLC / c.quality_QLC
    c_rest = _rest_capacitance(c)
    if p.optics.input_power_P is not None:
        omega_laser = 2.0 * math.pi * C_LIGHT / o.wavelength_lambda
        e_drive = math.sqrt(2.0 * kappa_in * o.input_power_P / (HBAR * omega_laser))
    else:
        e_drive = 0.0
    return DerivedConstants(
        kappa=kappa,
        kappa_in=kappa_in,
        kappa_ex=kappa - kappa_in,
        gamma_m=gamma_m,
        gamma_LC=gamma_lc,
        C_total_at_rest=c_rest,
        resistance_R=c.inductance_L * gamma_lc,
        x_zpf=math.sqrt(HBAR / (mech.mass_m * mech.omega0)),
        p_zpf=math.sqrt(HBAR * mech.mass_m * mech.omega0),
        q_zpf=math.sqrt(HBAR / (c.inductance_L * c.omegaLC)),
        phi_zpf=math.sqrt(HBAR * c.inductance_L * c.omegaLC),
        nbar_m=bose_occupancy(mech.omega0, b.T_mech),
        nbar_LC=bose_occupancy(c.omegaLC, b.T_LC),
        E_drive=e_drive,
    )


# ---------------------------------------------------------------------------
# JSON loading
# ---------------------------------------------------------------------------

_TWO_PI = 2.0 * math.pi

# Fields that may be given as "<name>_hz" in configs (converted by 2*pi).
_HZ_FIELDS = {"omega0", "omegaLC", "detuning_Delta", "G", "g"}
_OPTIONAL_FIELDS = {"input_power_P", "tunable_capacitance_C0"}

_SECTIONS: dict[str, type] = {
    "optics": OpticsParams,
    "mechanics": MechanicsParams,
    "circuit": CircuitParams,
    "drives": DriveParams,
    "baths": BathParams,
}


def _coerce_number(section: str, key: str, value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigurationError(f"{section}.{key} must be a number, got {value!r}")
    return float(value)


def _parse_section(name: str, cls: type, raw: Mapping[str, Any]) -> Any:
    if not isinstance(raw, Mapping):
        raise ConfigurationError(f"section '{name}' must be an object")
    fields = {f.name for f in cls.__dataclass_fields__.values()}  # type: ignore[attr-defined]
    out: dict[str, float] = {}
    for key, value in raw.items():
        base = key[:-3] if key.endswith("_hz") else key
        if base not in fields:
            raise ConfigurationError(f"unknown key '{name}.{key}'")
        if value is None and base in _OPTIONAL_FIELDS:
            # serialized sets write explicit nulls for unset optionals
            continue
        if key.endswith("_hz"):
            if base not in _HZ_FIELDS:
                raise ConfigurationError(f"'{name}.{key}': no _hz variant for this field")
            if base in raw:
                raise ConfigurationError(f"'{name}' gives both '{base}' and '{key}'")
            out[base] = _TWO_PI * _coerce_number(name, key, value)
        else:
            out[base] = _coerce_number(name, key, value)
    try:
        return cls(**out)
    except TypeError as exc:
        raise ConfigurationError(f"section '{name}': {exc}") from None


def _parse_coupling(raw: Any) -> CouplingMode:
    if raw is None or raw == PHYSICAL:
        return PHYSICAL
    if isinstance(raw, Mapping):
        allowed = {"mode", "G", "g", "G_hz", "g_hz", "consistent_spring_shift"}
        unknown = set(raw) - allowed
        if unknown:
            raise ConfigurationError(f"unknown key 'coupling_mode.{unknown.pop()}'")
        mode = raw.get("mode", "Direct")
        if mode == PHYSICAL:
            if len(raw) > 1:
                raise ConfigurationError("Physical coupling mode takes no extra keys")
            return PHYSICAL
        if mode != "Direct":
            raise ConfigurationError(f"coupling_mode.mode must be 'Physical' or 'Direct', got {mode!r}")
        vals: dict[str, Any] = {}
        for name in ("G", "g"):
            if name in raw and f"{name}_hz" in raw:
                raise ConfigurationError(f"coupling_mode gives both '{name}' and '{name}_hz'")
            if name in raw:
                vals[name] = _coerce_number("coupling_mode", name, raw[name])
            elif f"{name}_hz" in raw:
                vals[name] = _TWO_PI * _coerce_number("coupling_mode", f"{name}_hz", raw[f"{name}_hz"])
            else:
                raise ConfigurationError(f"Direct coupling mode requires '{name}'")
        shift = raw.get("consistent_spring_shift", False)
        if not isinstance(shift, bool):
            raise ConfigurationError("coupling_mode.consistent_spring_shift must be a boolean")
        return DirectCoupling(G=vals["G"], g=vals["g"], consistent_spring_shift=shift)
    raise ConfigurationError(f"coupling_mode must be 'Physical' or an object, got {raw!r}")


def parameters_from_dict(raw: Mapping[str, Any]) -> ParameterSet:
    """Build and validate a :class:`ParameterSet` from parsed JSON."""
    if not isinstance(raw, Mapping):
        raise ConfigurationError("config root must be a JSON object")
    unknown = set(raw) - set(_SECTIONS) - {"coupling_mode"}
    if unknown:
        raise ConfigurationError(f"unknown top-level key '{sorted(unknown)[0]}'")
    sections: dict[str, Any] = {}
    for name, cls in _SECTIONS.items():
        if name not in raw:
            raise ConfigurationError(f"missing section '{name}'")
        sections[name] = _parse_section(name, cls, raw[name])
    p = ParameterSet(coupling_mode=_parse_coupling(raw.get("coupling_mode")), **sections)
    return validate(p)


def load_parameters(path: str) -> ParameterSet:
    """Load a :class:`ParameterSet` from a JSON file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path!r}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config {path!r} is not valid JSON: {exc}") from None
    return parameters_from_dict(raw)


def _require_positive(label: str, value: float) -> None:
    if not (value > 0.0) or not math.isfinite(value):
        raise ConfigurationError(f"{label} must be finite and > 0, got {value}")


def validate(p: ParameterSet) -> ParameterSet:
    """Check ranges and cross-field requirements; returns the normalized set.

    When ``tunable_capacitance_C0`` is given, ``omegaLC`` is replaced by the
    resonance of the resulting total capacitance.
    """
    o, mech, c, d, b = p.optics, p.mechanics, p.circuit, p.drives, p.baths

    _require_positive("optics.wavelength_lambda", o.wavelength_lambda)
    _require_positive("optics.cavity_length_Lc", o.cavity_length_Lc)
    _require_positive("optics.finesse_F", o.finesse_F)
    if not 0.0 <= o.kappa_in_fraction <= 1.0:
        raise ConfigurationError(
            f"optics.kappa_in_fraction must lie in [0, 1], got {o.kappa_in_fraction}")
    if not 0.0 <= o.membrane_reflectivity_Rm < 1.0:
        raise ConfigurationError(
            f"optics.membrane_reflectivity_Rm must lie in [0, 1), got {o.membrane_reflectivity_Rm}")
    if not 0.0 <= o.overlap_Theta <= 1.0:
        raise ConfigurationError(
            f"optics.overlap_Theta must lie in [0, 1], got {o.overlap_Theta}")
    if not math.isfinite(o.detuning_Delta):
        raise ConfigurationError("optics.detuning_Delta must be finite")
    if not math.isfinite(o.membrane_axial_position_z0):
        raise ConfigurationError("optics.membrane_axial_position_z0 must be finite")
    if o.input_power_P is not None:
        _require_positive("optics.input_power_P", o.input_power_P)

    _require_positive("mechanics.mass_m", mech.mass_m)
    _require_positive("mechanics.omega0", mech.omega0)
    _require_positive("mechanics.quality_Qm", mech.quality_Qm)

    _require_positive("circuit.inductance_L", c.inductance_L)
    _require_positive("circuit.quality_QLC", c.quality_QLC)
    _require_positive("circuit.effective_area_Aeff", c.effective_area_Aeff)
    _require_positive("circuit.gap_h0", c.gap_h0)
    if c.tunable_capacitance_C0 is not None:
        _require_positive("circuit.tunable_capacitance_C0", c.tunable_capacitance_C0)
        c_rest = (c.tunable_capacitance_C0
                  + EPSILON_0 * c.effective_area_Aeff / c.gap_h0)
        omega_lc = 1.0 / math.sqrt(c.inductance_L * c_rest)
        from dataclasses import replace
        c = replace(c, omegaLC=omega_lc)
        p = replace(p, circuit=c)
    else:
        _require_positive("circuit.omegaLC", c.omegaLC)
        # The geometric part alone must not exhaust the total capacitance.
        c_rest = 1.0 / (c.inductance_L * c.omegaLC**2)
        c_gap = EPSILON_0 * c.effective_area_Aeff / c.gap_h0
        if c_rest <= c_gap:
            raise ConfigurationError(
                f"circuit.omegaLC implies total capacitance {c_rest:.4e} F not exceeding "
                f"the gap contribution {c_gap:.4e} F; no valid tunable capacitance")

    if not (d.V_DC >= 0.0) or not math.isfinite(d.V_DC):
        raise ConfigurationError(f"drives.V_DC must be finite and >= 0, got {d.V_DC}")
    if b.T_mech < 0.0 or b.T_LC < 0.0:
        raise ConfigurationError("bath temperatures must be >= 0")

    if p.coupling_mode == PHYSICAL:
        if o.input_power_P is None:
            raise ConfigurationError("Physical coupling mode requires optics.input_power_P")
    elif isinstance(p.coupling_mode, DirectCoupling):
        cm = p.coupling_mode
        if cm.G < 0.0 or cm.g < 0.0 or not math.isfinite(cm.G) or not math.isfinite(cm.g):
            raise ConfigurationError("Direct coupling rates must be finite and >= 0")
    else:
        raise ConfigurationError(f"unsupported coupling_mode {p.coupling_mode!r}")
    return p


def parameters_to_dict(p: ParameterSet) -> dict[str, Any]:
    """Serializable view of a parameter set (rad/s fields, no _hz variants)."""
    out: dict[str, Any] = {name: asdict(getattr(p, name)) for name in _SECTIONS}
    if isinstance(p.coupling_mode, DirectCoupling):
        out["coupling_mode"] = {"mode": "Direct", **asdict(p.coupling_mode)}
    else:
        out["coupling_mode"] = PHYSICAL
    return out
