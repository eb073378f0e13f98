"""Command-line interface.

    lc-cooldown <command> --config params.json [--out DIR] [options]

Commands: workpoint, stability, steady, spectrum, probe, sideband, sweep,
figure.  JSON results go to stdout (or ``<command>.json`` under ``--out``);
tabular results are CSV with one ``# generated:`` comment line that
``--no-header-timestamp`` suppresses, so repeated runs are byte-identical.

Exit codes: 0 success, 2 configuration or argument error, 3 physically
inadmissible operating point (pull-in, instability), 4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .constants import EPSILON_0, HBAR
from .dynamics import diffusion_matrix, drift_matrix, linear_model, stability
from .errors import (
    ConfigurationError,
    DomainError,
    InstabilityError,
    LcCooldownError,
    NumericalError,
    PullInError,
)
from .params import derive_constants, load_parameters, parameters_to_dict
from .sideband import sideband_summary
from .spectra import (
    ac_response,
    charge_noise_spectrum,
    effective_susceptibilities,
    lorentzian_params,
    voltage_spectra,
)
from .steady import steady_state
from .sweep import FIGURE_IDS, OUTPUT_NAMES, SweepAxis, figure_spec, run_sweep
from .workingpoint import mim_frequency_derivatives, working_point

_FLOAT_FMT = "{:.8e}"


def _fmt(x: float) -> str:
    if math.isnan(x):
        return "nan"
    return _FLOAT_FMT.format(x)


def _timestamp_line() -> str:
    return f"# generated: {datetime.now(timezone.utc).isoformat()}"


def _emit_text(text: str, out_dir: str | None, filename: str) -> None:
    if out_dir is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        path = Path(out_dir)
        path.mkdir(parents=True, exist_ok=True)
        (path / filename).write_text(text, encoding="utf-8")


def _emit_json(payload: dict, out_dir: str | None, filename: str) -> None:
    _emit_text(json.dumps(payload, indent=2), out_dir, filename)


def _emit_csv(header: list[str], rows: list[list[str]], args,
              filename: str, params_payload: dict | None = None) -> None:
    lines = []
    if not args.no_header_timestamp:
        lines.append(_timestamp_line())
    lines.append(",".join(header))
    lines.extend(",".join(row) for row in rows)
    _emit_text("\n".join(lines) + "\n", args.out, filename)
    if params_payload is not None and args.out is not None:
        sidecar = filename.rsplit(".", 1)[0] + ".params.json"
        _emit_json(params_payload, args.out, sidecar)


def _echo_payload(p, dc) -> dict:
    return {
        "parameters": parameters_to_dict(p),
        "derived_constants": asdict(dc),
    }


def _load(args):
    if args.config is None:
        raise ConfigurationError("--config is required for this command")
    p = load_parameters(args.config)
    dc = derive_constants(p)
    return p, dc


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def _cmd_workpoint(args) -> None:
    p, dc = _load(args)
    wp = working_point(p, dc)
    wp_dict = asdict(wp)
    alpha = wp_dict.pop("alpha_s")
    wp_dict["alpha_s"] = {"re": alpha.real, "im": alpha.imag}
    # both spring-shift contributions to omega_m^2, for inspection
    _, d2 = mim_frequency_derivatives(wp.x_s, p.optics)
    m = p.mechanics.mass_m
    v_eff = wp.q_s / wp.C_at_xs if wp.C_at_xs > 0.0 else 0.0
    gap = p.circuit.gap_h0 + wp.x_s
    wp_dict["spring_terms_rad2_s2"] = {
        "radiation": HBAR * d2 * wp.n_cav / m,
        "electrostatic": -(v_eff**2) * EPSILON_0
        * p.circuit.effective_area_Aeff / (m * gap**3),
    }
    payload = {**_echo_payload(p, dc), "working_point": wp_dict}
    _emit_json(payload, args.out, "workpoint.json")


def _cmd_stability(args) -> None:
    p, dc = _load(args)
    model = linear_model(p, dc)
    report = stability(drift_matrix(model))
    payload = {
        **_echo_payload(p, dc),
        "stability": {
            "stable": report.stable,
            "margin_rad_s": report.margin,
            "eigenvalues": [{"re": ev.real, "im": ev.imag}
                            for ev in report.eigenvalues],
        },
    }
    _emit_json(payload, args.out, "stability.json")


def _cmd_steady(args) -> None:
    p, dc = _load(args)
    model = linear_model(p, dc)
    st = steady_state(model)
    a = drift_matrix(model)
    d = diffusion_matrix(model)
    residual = a @ st.covariance + st.covariance @ a.T + d
    payload = {
        **_echo_payload(p, dc),
        "steady_state": {
            "covariance": st.covariance.tolist(),
            "n_lc_eff": st.n_lc_eff,
            "n_m_eff": st.n_m_eff,
            "eta_lc": st.eta_lc,
            "stability_margin_rad_s": st.report.margin,
            "lyapunov_residual_max": float(np.max(np.abs(residual))),
        },
    }
    _emit_json(payload, args.out, "steady.json")
    if args.out is not None:
        header = ["dx", "dp", "dq", "dphi", "dX", "dY"]
        rows = [[_fmt(v) for v in row] for row in st.covariance]
        _emit_csv(header, rows, args, "covariance.csv")


def _omega_grid(args, model) -> np.ndarray:
    if args.omega_min is not None and args.omega_max is not None:
        lo, hi = args.omega_min, args.omega_max
    elif args.omega_min is None and args.omega_max is None:
        lor = lorentzian_params(model)
        half = 25.0 * lor.gamma_lc_eff
        lo, hi = lor.omega_lc_eff - half, lor.omega_lc_eff + half
    else:
        raise ConfigurationError("give both --omega-min and --omega-max or neither")
    if not (hi > lo):
        raise ConfigurationError("--omega-max must exceed --omega-min")
    if args.points < 2:
        raise ConfigurationError("--points must be >= 2")
    return np.linspace(lo, hi, args.points)


def _cmd_spectrum(args) -> None:
    p, dc = _load(args)
    model = linear_model(p, dc)
    stability(drift_matrix(model), raise_on_unstable=True)
    omega = _omega_grid(args, model)
    s_dq = charge_noise_spectrum(model, omega)
    s_vc, s_vl = voltage_spectra(model, omega, args.s_imp_c, args.s_imp_l)
    chi_mc, chi_le = effective_susceptibilities(model, omega)
    header = ["omega_rad_s", "S_dq", "S_dVC", "S_dVL", "abs_chi_LC_eff",
              "abs_chi_mc"]
    rows = [[_fmt(w), _fmt(a), _fmt(b), _fmt(c), _fmt(d), _fmt(e)]
            for w, a, b, c, d, e in zip(omega, s_dq, s_vc, s_vl,
                                        np.abs(chi_le), np.abs(chi_mc))]
    _emit_csv(header, rows, args, "spectrum.csv", _echo_payload(p, dc))


def _cmd_probe(args) -> None:
    p, dc = _load(args)
    model = linear_model(p, dc)
    stability(drift_matrix(model), raise_on_unstable=True)
    omega = _omega_grid(args, model)
    dq = ac_response(model, omega, args.vac)
    header = ["omega_rad_s", "re_delta_q", "im_delta_q", "abs_delta_q"]
    rows = [[_fmt(w), _fmt(z.real), _fmt(z.imag), _fmt(abs(z))]
            for w, z in zip(omega, dq)]
    _emit_csv(header, rows, args, "probe.csv", _echo_payload(p, dc))


def _cmd_sideband(args) -> None:
    p, dc = _load(args)
    model = linear_model(p, dc)
    s = sideband_summary(model)
    payload = {
        **_echo_payload(p, dc),
        "sideband": {
            # rate formulas evaluate at the renormalized mechanical frequency
            "omega_m_rad_s": model.omega_m,
            "optical": asdict(s.optical),
            "n_m_eff_approx": s.n_m_eff,
            "circuit": asdict(s.lc),
            "n_lc_eff_approx": s.n_lc_eff,
            "cooperativities": asdict(s.coop),
        },
    }
    _emit_json(payload, args.out, "sideband.json")


def _parse_axis(spec: str) -> SweepAxis:
    parts = spec.split(":")
    if len(parts) == 2:
        path, csv_values = parts
        try:
            values = tuple(float(v) for v in csv_values.split(","))
        except ValueError:
            raise ConfigurationError(f"bad axis values in {spec!r}") from None
        return SweepAxis(path=path, values=values)
    if len(parts) == 5:
        path, kind, start, stop, num = parts
        try:
            start_f, stop_f, num_i = float(start), float(stop), int(num)
        except ValueError:
            raise ConfigurationError(f"bad axis numbers in {spec!r}") from None
        if num_i < 1:
            raise ConfigurationError(f"axis {spec!r} needs at least one point")
        if kind == "lin":
            values = tuple(np.linspace(start_f, stop_f, num_i))
        elif kind == "geom":
            if start_f <= 0.0 or stop_f <= 0.0:
                raise ConfigurationError(f"geom axis {spec!r} needs positive bounds")
            values = tuple(np.geomspace(start_f, stop_f, num_i))
        else:
            raise ConfigurationError(f"axis kind must be lin or geom, got {kind!r}")
        return SweepAxis(path=path, values=values)
    raise ConfigurationError(
        f"axis spec {spec!r}; use path:lin|geom:start:stop:num or path:v1,v2,...")


def _sweep_rows(result) -> tuple[list[str], list[list[str]]]:
    header = [axis.path for axis in result.axes]
    header += list(result.outputs) + ["status"]
    rows = []
    for rec in result.records:
        row = [_fmt(c) for c in rec.coords]
        row += [_fmt(rec.values[name]) for name in result.outputs]
        row.append(rec.status)
        rows.append(row)
    return header, rows


def _cmd_sweep(args) -> None:
    p, dc = _load(args)
    if not args.axis:
        raise ConfigurationError("sweep requires at least one --axis")
    axes = [_parse_axis(spec) for spec in args.axis]
    outputs = tuple(name.strip() for name in args.outputs.split(",") if name.strip())
    result = run_sweep(p, axes, outputs, threads=args.threads)
    header, rows = _sweep_rows(result)
    _emit_csv(header, rows, args, "sweep.csv", _echo_payload(p, dc))


def _cmd_figure(args) -> None:
    p, axes, outputs = figure_spec(args.figure_id)
    dc = derive_constants(p)
    result = run_sweep(p, axes, outputs, threads=args.threads)
    header, rows = _sweep_rows(result)
    _emit_csv(header, rows, args, f"{args.figure_id}.csv", _echo_payload(p, dc))


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lc-cooldown",
        description="Steady-state simulator for an optomechanically cooled "
                    "rf LC circuit.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, config_required=True):
        sp.add_argument("--config", required=config_required,
                        help="path to the parameter JSON file")
        sp.add_argument("--out", default=None,
                        help="directory for output files (default: stdout)")
        sp.add_argument("--threads", type=int, default=1,
                        help="worker threads for grid evaluation")
        sp.add_argument("--no-header-timestamp", action="store_true",
                        help="omit the generation-time comment from CSV output")

    def grid_opts(sp):
        sp.add_argument("--omega-min", type=float, default=None,
                        help="grid start [rad/s]; default centers on the "
                             "dressed circuit line")
        sp.add_argument("--omega-max", type=float, default=None,
                        help="grid end [rad/s]")
        sp.add_argument("--points", type=int, default=2001,
                        help="number of frequency samples")

    for name, fn in (("workpoint", _cmd_workpoint),
                     ("stability", _cmd_stability),
                     ("steady", _cmd_steady),
                     ("sideband", _cmd_sideband)):
        sp = sub.add_parser(name)
        common(sp)
        sp.set_defaults(fn=fn)

    sp = sub.add_parser("spectrum")
    common(sp)
    grid_opts(sp)
    sp.add_argument("--s-imp-c", type=float, default=0.0,
                    help="capacitive readout imprecision [V^2 s]")
    sp.add_argument("--s-imp-l", type=float, default=0.0,
                    help="inductive readout imprecision [V^2 s]")
    sp.set_defaults(fn=_cmd_spectrum)

    sp = sub.add_parser("probe")
    common(sp)
    grid_opts(sp)
    sp.add_argument("--vac", type=float, default=1e-6,
                    help="AC probe amplitude [V]")
    sp.set_defaults(fn=_cmd_probe)

    sp = sub.add_parser("sweep")
    common(sp)
    sp.add_argument("--axis", action="append", default=[],
                    help="axis spec path:lin|geom:start:stop:num or "
                         "path:v1,v2,... (repeat for a second axis)")
    sp.add_argument("--outputs", default="n_lc_eff,eta,stability_margin",
                    help="comma-separated outputs: " + ",".join(OUTPUT_NAMES))
    sp.set_defaults(fn=_cmd_sweep)

    sp = sub.add_parser("figure")
    sp.add_argument("figure_id", choices=FIGURE_IDS,
                    help="bundled dataset to generate")
    common(sp, config_required=False)
    sp.set_defaults(fn=_cmd_figure)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        args.fn(args)
        return 0
    except (ConfigurationError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (PullInError, InstabilityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (NumericalError, LcCooldownError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except BrokenPipeError:
        # Downstream consumer (head, less) closed the pipe; not an error.
        return 0


if __name__ == "__main__":
    sys.exit(main())
