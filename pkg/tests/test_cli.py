"""End-to-end command-line behavior: payloads, files, exit codes, determinism."""

import json
import math
from pathlib import Path

import pytest

from lc_cooldown.cli import main

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"
QUANTUM = str(CONFIG_DIR / "quantum_point.json")
PHYSICAL = str(CONFIG_DIR / "physical_bias.json")


def run_json(capsys, argv):
    rc = main(argv)
    out = capsys.readouterr().out
    assert rc == 0, out
    return json.loads(out)


def write_variant(tmp_path, name, mutate):
    cfg = json.loads(Path(QUANTUM).read_text())
    mutate(cfg)
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


class TestWorkpoint:
    def test_direct_mode_payload(self, capsys):
        d = run_json(capsys, ["workpoint", "--config", QUANTUM])
        wp = d["working_point"]
        assert wp["couplings_source"] == "Direct"
        assert math.isclose(wp["x_s"], -9.555774121935718e-08, rel_tol=1e-12)
        assert math.isclose(wp["omega_m"], 5959585.634230087, rel_tol=1e-12)
        assert math.isclose(wp["q_s"], 1.124431307356788e-09, rel_tol=1e-12)
        assert math.isclose(wp["V_pull"], 82.0099006463239, rel_tol=1e-12)
        # direct mode passes the configured rates straight through
        assert wp["G"] == d["parameters"]["coupling_mode"]["G"]
        assert wp["g"] == d["parameters"]["coupling_mode"]["g"]

    def test_spring_terms_compose_the_effective_frequency(self, capsys):
        d = run_json(capsys, ["workpoint", "--config", QUANTUM])
        wp = d["working_point"]
        w0 = d["parameters"]["mechanics"]["omega0"]
        terms = wp["spring_terms_rad2_s2"]
        total = w0**2 + terms["radiation"] + terms["electrostatic"]
        assert math.isclose(total, wp["omega_m"] ** 2, rel_tol=1e-12)
        # no optical drive in direct mode, so only the bias softens the mode
        assert terms["radiation"] == 0.0
        assert terms["electrostatic"] < 0.0

    def test_physical_mode_payload(self, capsys):
        d = run_json(capsys, ["workpoint", "--config", PHYSICAL])
        wp = d["working_point"]
        assert wp["couplings_source"] == "Physical"
        assert math.isclose(wp["x_s"], -1.1911055264603273e-07, rel_tol=1e-12)
        assert math.isclose(wp["n_cav"], 204963451.81456742, rel_tol=1e-12)
        assert math.isclose(wp["G"], -1883651.5675826548, rel_tol=1e-12)
        assert math.isclose(wp["g"], 319320.03195645055, rel_tol=1e-12)
        assert math.isclose(wp["omega_m"], 5871764.082054263, rel_tol=1e-12)
        assert math.isclose(wp["alpha_s"]["re"], 5023.825175677901, rel_tol=1e-12)
        assert math.isclose(wp["alpha_s"]["im"], -13406.141593269569, rel_tol=1e-12)
        terms = wp["spring_terms_rad2_s2"]
        assert terms["radiation"] != 0.0
        assert abs(terms["radiation"] / terms["electrostatic"]) < 1e-3

    def test_out_directory_receives_the_json(self, capsys, tmp_path):
        rc = main(["workpoint", "--config", QUANTUM, "--out", str(tmp_path)])
        assert rc == 0
        d = json.loads((tmp_path / "workpoint.json").read_text())
        assert "working_point" in d and "derived_constants" in d


class TestStability:
    def test_payload(self, capsys):
        d = run_json(capsys, ["stability", "--config", QUANTUM])
        s = d["stability"]
        assert s["stable"] is True
        assert math.isclose(s["margin_rad_s"], 24120.747654373525, rel_tol=1e-9)
        assert len(s["eigenvalues"]) == 6
        assert all(ev["re"] < 0.0 for ev in s["eigenvalues"])


class TestSteady:
    def test_payload(self, capsys):
        d = run_json(capsys, ["steady", "--config", QUANTUM])
        s = d["steady_state"]
        assert math.isclose(s["n_lc_eff"], 0.7008273271324614, rel_tol=1e-9)
        assert math.isclose(s["n_m_eff"], 0.10133063213574367, rel_tol=1e-9)
        assert math.isclose(s["eta_lc"], 296.6017209235142, rel_tol=1e-9)
        assert math.isclose(s["stability_margin_rad_s"], 24120.747654373525,
                            rel_tol=1e-9)
        assert s["lyapunov_residual_max"] < 1e-6
        cov = s["covariance"]
        assert len(cov) == 6 and all(len(row) == 6 for row in cov)
        assert math.isclose(cov[2][2], 1.1984772118887726, rel_tol=1e-9)

    def test_out_directory_receives_json_and_covariance_csv(self, tmp_path):
        rc = main(["steady", "--config", QUANTUM, "--out", str(tmp_path),
                   "--no-header-timestamp"])
        assert rc == 0
        assert (tmp_path / "steady.json").exists()
        lines = (tmp_path / "covariance.csv").read_text().splitlines()
        assert lines[0] == "dx,dp,dq,dphi,dX,dY"
        assert len(lines) == 7


class TestSideband:
    def test_payload(self, capsys):
        d = run_json(capsys, ["sideband", "--config", QUANTUM])
        s = d["sideband"]
        assert math.isclose(s["omega_m_rad_s"], 5959585.634230087, rel_tol=1e-12)
        assert math.isclose(s["optical"]["a_plus"], 26875.002990231522,
                            rel_tol=1e-9)
        assert math.isclose(s["optical"]["a_minus"], 739492.7973386379,
                            rel_tol=1e-9)
        assert math.isclose(s["circuit"]["gamma_lc_eff"], 61453.30426101917,
                            rel_tol=1e-9)
        assert math.isclose(s["n_lc_eff_approx"], 0.5724105913223804,
                            rel_tol=1e-9)
        c = s["cooperativities"]
        assert math.isclose(c["c_om"], 119916.98320000002, rel_tol=1e-9)
        assert math.isclose(c["c_em"], 80887966.08631356, rel_tol=1e-9)
        assert c["regime_ok"] is True


class TestSpectrumAndProbe:
    def test_spectrum_csv_shape(self, capsys):
        rc = main(["spectrum", "--config", QUANTUM, "--points", "64",
                   "--no-header-timestamp"])
        out = capsys.readouterr().out
        assert rc == 0
        lines = out.splitlines()
        assert lines[0] == "omega_rad_s,S_dq,S_dVC,S_dVL,abs_chi_LC_eff,abs_chi_mc"
        assert len(lines) == 65

    def test_spectrum_out_files_and_determinism(self, tmp_path):
        for sub in ("a", "b"):
            rc = main(["spectrum", "--config", QUANTUM, "--points", "256",
                       "--out", str(tmp_path / sub), "--no-header-timestamp"])
            assert rc == 0
        a = (tmp_path / "a" / "spectrum.csv").read_bytes()
        b = (tmp_path / "b" / "spectrum.csv").read_bytes()
        assert a == b
        sidecar = json.loads((tmp_path / "a" / "spectrum.params.json").read_text())
        assert "parameters" in sidecar and "derived_constants" in sidecar

    def test_timestamp_header_present_by_default(self, capsys):
        rc = main(["spectrum", "--config", QUANTUM, "--points", "8"])
        out = capsys.readouterr().out
        assert rc == 0
        assert out.splitlines()[0].startswith("# generated: ")

    def test_explicit_grid_bounds(self, capsys):
        rc = main(["spectrum", "--config", QUANTUM, "--points", "3",
                   "--omega-min", "6e6", "--omega-max", "7e6",
                   "--no-header-timestamp"])
        out = capsys.readouterr().out
        assert rc == 0
        first = out.splitlines()[1].split(",")[0]
        last = out.splitlines()[-1].split(",")[0]
        assert math.isclose(float(first), 6e6, rel_tol=1e-8)
        assert math.isclose(float(last), 7e6, rel_tol=1e-8)

    def test_imprecision_floor_raises_voltage_columns(self, capsys):
        rc = main(["spectrum", "--config", QUANTUM, "--points", "4",
                   "--omega-min", "6e6", "--omega-max", "7e6",
                   "--no-header-timestamp", "--s-imp-c", "1e-15"])
        noisy = capsys.readouterr().out
        assert rc == 0
        rc = main(["spectrum", "--config", QUANTUM, "--points", "4",
                   "--omega-min", "6e6", "--omega-max", "7e6",
                   "--no-header-timestamp"])
        clean = capsys.readouterr().out
        assert rc == 0
        for row_noisy, row_clean in zip(noisy.splitlines()[1:],
                                        clean.splitlines()[1:]):
            s_noisy = float(row_noisy.split(",")[2])
            s_clean = float(row_clean.split(",")[2])
            assert math.isclose(s_noisy - s_clean, 1e-15, rel_tol=1e-6)

    def test_probe_csv_and_linearity(self, capsys):
        args = ["probe", "--config", QUANTUM, "--points", "16",
                "--no-header-timestamp"]
        rc = main(args + ["--vac", "1e-6"])
        out1 = capsys.readouterr().out
        assert rc == 0
        assert out1.splitlines()[0] == "omega_rad_s,re_delta_q,im_delta_q,abs_delta_q"
        rc = main(args + ["--vac", "2e-6"])
        out2 = capsys.readouterr().out
        assert rc == 0
        for row1, row2 in zip(out1.splitlines()[1:], out2.splitlines()[1:]):
            a1 = float(row1.split(",")[3])
            a2 = float(row2.split(",")[3])
            assert math.isclose(a2, 2.0 * a1, rel_tol=1e-7)


class TestSweepCommand:
    AXIS = "coupling_mode.g:geom:2354.564:2354564.459:24"

    def test_csv_header_and_row_count(self, capsys):
        rc = main(["sweep", "--config", QUANTUM, "--axis", self.AXIS,
                   "--outputs", "n_lc_eff,stability_margin",
                   "--no-header-timestamp"])
        out = capsys.readouterr().out
        assert rc == 0
        lines = out.splitlines()
        assert lines[0] == "coupling_mode.g,n_lc_eff,stability_margin,status"
        assert len(lines) == 25
        statuses = {line.rsplit(",", 1)[1] for line in lines[1:]}
        # strong-coupling tail of the scan walks into the fold
        assert "stable" in statuses
        assert statuses <= {"stable", "unstable", "pull-in"}

    def test_serial_and_parallel_bytes_match(self, tmp_path):
        for sub, threads in (("serial", "1"), ("parallel", "4")):
            rc = main(["sweep", "--config", QUANTUM, "--axis", self.AXIS,
                       "--out", str(tmp_path / sub), "--threads", threads,
                       "--no-header-timestamp"])
            assert rc == 0
        assert (tmp_path / "serial" / "sweep.csv").read_bytes() == \
            (tmp_path / "parallel" / "sweep.csv").read_bytes()

    def test_explicit_value_axis(self, capsys):
        rc = main(["sweep", "--config", QUANTUM,
                   "--axis", "coupling_mode.g:100000,200000",
                   "--outputs", "n_lc_eff", "--no-header-timestamp"])
        out = capsys.readouterr().out
        assert rc == 0
        assert len(out.splitlines()) == 3

    def test_two_axis_grid(self, capsys):
        rc = main(["sweep", "--config", QUANTUM,
                   "--axis", "coupling_mode.G:lin:1000000:2000000:2",
                   "--axis", "coupling_mode.g:lin:100000:300000:3",
                   "--outputs", "stability_margin", "--no-header-timestamp"])
        out = capsys.readouterr().out
        assert rc == 0
        lines = out.splitlines()
        assert lines[0] == "coupling_mode.G,coupling_mode.g,stability_margin,status"
        assert len(lines) == 7


class TestFigureCommand:
    def test_dataset_and_sidecar(self, tmp_path):
        rc = main(["figure", "fig3d", "--out", str(tmp_path),
                   "--no-header-timestamp"])
        assert rc == 0
        lines = (tmp_path / "fig3d.csv").read_text().splitlines()
        assert lines[0] == "coupling_mode.g,n_lc_eff,eta,stability_margin,status"
        assert len(lines) == 101
        sidecar = json.loads((tmp_path / "fig3d.params.json").read_text())
        assert sidecar["parameters"]["circuit"]["quality_QLC"] == 4e4


class TestExitCodes:
    def test_missing_config_file(self, capsys):
        rc = main(["steady", "--config", "/nonexistent/params.json"])
        assert rc == 2
        assert "error:" in capsys.readouterr().err

    def test_unknown_config_key(self, capsys, tmp_path):
        bad = write_variant(tmp_path, "bad.json",
                            lambda c: c["circuit"].update(bogus_field=1.0))
        assert main(["steady", "--config", bad]) == 2

    def test_invalid_json(self, capsys, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        assert main(["steady", "--config", str(path)]) == 2

    def test_bad_axis_spec(self, capsys):
        assert main(["sweep", "--config", QUANTUM,
                     "--axis", "coupling_mode.g:cubic:1:2:3"]) == 2

    def test_unresolvable_axis_path(self, capsys):
        assert main(["sweep", "--config", QUANTUM,
                     "--axis", "circuit.gap_h9:lin:1e-6:2e-6:2"]) == 2

    def test_sweep_without_axis(self, capsys):
        assert main(["sweep", "--config", QUANTUM]) == 2

    def test_too_few_spectrum_points(self, capsys):
        assert main(["spectrum", "--config", QUANTUM, "--points", "1"]) == 2

    def test_half_open_grid_bounds(self, capsys):
        assert main(["spectrum", "--config", QUANTUM,
                     "--omega-min", "1e6"]) == 2

    def test_pull_in_bias_is_a_physics_error(self, capsys, tmp_path):
        cfg = json.loads(Path(PHYSICAL).read_text())
        cfg["drives"]["V_DC"] = 100.0
        path = tmp_path / "beyond.json"
        path.write_text(json.dumps(cfg))
        assert main(["workpoint", "--config", str(path)]) == 3
        assert "error:" in capsys.readouterr().err

    def test_unstable_point_is_a_physics_error(self, capsys, tmp_path):
        blue = write_variant(
            tmp_path, "blue.json",
            lambda c: c["optics"].update(
                detuning_Delta_hz=-c["optics"].pop("detuning_Delta_hz")))
        assert main(["steady", "--config", blue]) == 3

    def test_unstable_sweep_rows_are_not_fatal(self, capsys, tmp_path):
        blue = write_variant(
            tmp_path, "blue.json",
            lambda c: c["optics"].update(
                detuning_Delta_hz=-c["optics"].pop("detuning_Delta_hz")))
        rc = main(["sweep", "--config", blue,
                   "--axis", "coupling_mode.g:100000,200000",
                   "--outputs", "n_lc_eff,stability_margin",
                   "--no-header-timestamp"])
        out = capsys.readouterr().out
        assert rc == 0
        rows = out.splitlines()[1:]
        assert all(row.endswith(",unstable") for row in rows)
        assert all(row.split(",")[1] == "nan" for row in rows)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
