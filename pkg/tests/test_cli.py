import json
import math

import numpy as np
import pytest

from pstchain.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_design_analytic_json(capsys):
    code, out, _ = run(capsys, "design", "analytic", "--n", "4")
    assert code == 0
    doc = json.loads(out)
    assert doc["n"] == 4
    assert doc["couplings"] == pytest.approx([math.sqrt(3) / 2, 1.0, math.sqrt(3) / 2])
    assert doc["statistics"] == "fermionic"


def test_design_then_certify_pipeline(tmp_path, capsys):
    code, out, _ = run(capsys, "design", "analytic", "--n", "4")
    chain_file = tmp_path / "c.json"
    chain_file.write_text(out)
    code, out, _ = run(capsys, "certify", str(chain_file))
    assert code == 0
    doc = json.loads(out)
    assert doc["verdict"] == "perfect"
    assert doc["t0"] == pytest.approx(math.pi, abs=1e-9)


def test_design_from_spectrum(tmp_path, capsys):
    spec_file = tmp_path / "s.json"
    spec_file.write_text('{"eigenvalues": [-1.5, -0.5, 0.5, 1.5]}')
    code, out, _ = run(capsys, "design", "from-spectrum", str(spec_file))
    assert code == 0
    doc = json.loads(out)
    assert doc["couplings"] == pytest.approx([math.sqrt(3) / 2, 1.0, math.sqrt(3) / 2])


def test_design_storage_and_near_uniform(capsys):
    code, out, _ = run(capsys, "design", "storage", "--n", "3")
    assert code == 0
    doc = json.loads(out)
    assert doc["couplings"] == pytest.approx([math.sqrt(8 / 3), math.sqrt(4 / 3)])
    code, out, err = run(capsys, "design", "near-uniform", "--n", "5", "--slack", "0.5")
    assert code == 0
    assert "max coupling deviation" in err
    json.loads(out)


def test_simulate_csv(tmp_path, capsys):
    chain_file = tmp_path / "c.json"
    code, out, _ = run(capsys, "design", "analytic", "--n", "4")
    chain_file.write_text(out)
    out_csv = tmp_path / "curve.csv"
    code, out, _ = run(capsys, "simulate", "--chain", str(chain_file), "--source", "1",
                       "--target", "4", "--tmax", "6.3", "--steps", "1000",
                       "--out", str(out_csv))
    assert code == 0
    summary = json.loads(out)
    assert summary["peak_abs2"] == pytest.approx(1.0, abs=1e-4)
    assert abs(summary["peak_time"] - math.pi) < 0.01
    lines = out_csv.read_text().splitlines()
    assert lines[0] == "t,re,im,abs2"
    assert len(lines) == 1002
    manifest = json.loads((tmp_path / "curve.csv.manifest.json").read_text())
    assert str(out_csv) in manifest["outputs"]
    assert str(chain_file) in manifest["inputs"]


def test_unknown_subcommand_exit_64(capsys):
    code, _, err = run(capsys, "frobnicate")
    assert code == 64
    assert "unknown subcommand" in err


def test_malformed_chain_exit_65(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"n": 2}')
    code, _, err = run(capsys, "certify", str(bad))
    assert code == 65
    assert "bad-chain-file" in err


def test_validation_error_exit_2(capsys):
    code, _, err = run(capsys, "design", "analytic", "--n", "1")
    assert code == 2
    assert "error: validation" in err


def test_deterministic_output(capsys):
    _, out1, _ = run(capsys, "design", "near-uniform", "--n", "6", "--slack", "0.4")
    _, out2, _ = run(capsys, "design", "near-uniform", "--n", "6", "--slack", "0.4")
    assert out1 == out2


def test_noise_dephase_json(tmp_path, capsys):
    chain_file = tmp_path / "c.json"
    _, out, _ = run(capsys, "design", "analytic", "--n", "5")
    chain_file.write_text(out)
    code, out, _ = run(capsys, "noise", "dephase", "--chain", str(chain_file),
                       "--p", "0.1", "--t", str(math.pi / 2))
    assert code == 0
    doc = json.loads(out)
    from pstchain import analytic_chain, dephasing_avg_fidelity

    rep = dephasing_avg_fidelity(analytic_chain(5), 0.1, math.pi / 2)
    assert doc["avg_fidelity"] == pytest.approx(rep.avg_fidelity, abs=1e-15)


def test_noise_bath_csv(tmp_path, capsys):
    chain_file = tmp_path / "c.json"
    _, out, _ = run(capsys, "design", "analytic", "--n", "4")
    chain_file.write_text(out)
    out_csv = tmp_path / "bath.csv"
    code, out, _ = run(capsys, "noise", "bath", "--chain", str(chain_file),
                       "--G", "0.0", "--tmax", "6.3", "--steps", "100",
                       "--out", str(out_csv))
    assert code == 0
    doc = json.loads(out)
    assert doc["max_weak_deviation"] < 1e-12
    assert out_csv.exists()


def test_fermionic_demo(capsys):
    code, out, _ = run(capsys, "fermionic", "demo", "--protocol", "entgen", "--n", "4")
    assert code == 0
    doc = json.loads(out)
    assert doc["entropy_bits"] == pytest.approx(1.0, abs=1e-6)
    code, out, _ = run(capsys, "fermionic", "demo", "--protocol", "storage", "--n", "3")
    assert code == 0
    doc = json.loads(out)
    assert doc["fidelity_vs_prediction"] >= 1.0 - 1e-8


def test_network_commands(tmp_path, capsys):
    code, out, _ = run(capsys, "network", "hypercube", "--d", "2")
    assert code == 0
    doc = json.loads(out)
    assert doc["n_vertices"] == 4
    assert len(doc["edges"]) == 4
    chain_file = tmp_path / "c.json"
    _, out, _ = run(capsys, "design", "analytic", "--n", "2")
    chain_file.write_text(out)
    code, out, _ = run(capsys, "network", "star", "--chain", str(chain_file),
                       "--branches", "3")
    assert code == 0
    assert json.loads(out)["w_state_fidelity"] >= 1.0 - 1e-8
    code, out, _ = run(capsys, "network", "theta", "--chain", str(chain_file), "--theta", "0.3")
    assert code == 2  # even-length chain rejected


def test_gadget_amp_and_clock(tmp_path, capsys):
    out_csv = tmp_path / "amp.csv"
    code, out, _ = run(capsys, "gadget", "amp", "--n", "12", "--out", str(out_csv))
    assert code == 0
    doc = json.loads(out)
    assert doc["peak_probability"] >= 1.0 - 1e-8
    code, out, _ = run(capsys, "gadget", "clock", "--n", "3", "--dim", "2", "--seed", "7")
    assert code == 0
    assert json.loads(out)["fidelity"] >= 1.0 - 1e-8


def test_report_timing_two_site_closed_form(tmp_path, capsys):
    out_csv = tmp_path / "timing.csv"
    code, out, _ = run(capsys, "report", "--figure", "timing", "--n", "2",
                       "--steps", "200", "--out", str(out_csv))
    assert code == 0
    rows = out_csv.read_text().splitlines()[1:]
    data = np.array([[float(x) for x in row.split(",")] for row in rows])
    u, f_analytic = data[:, 0], data[:, 3]
    assert np.allclose(f_analytic, np.sin(u * math.pi / 2.0) ** 2, atol=1e-10)


def test_report_timing_31_uniform_peaks_below_one(tmp_path, capsys):
    out_csv = tmp_path / "timing31.csv"
    code, out, _ = run(capsys, "report", "--figure", "timing", "--n", "31",
                       "--steps", "400", "--out", str(out_csv))
    assert code == 0
    doc = json.loads(out)
    assert doc["uniform_peak_fidelity"] < 1.0 - 1e-2
    assert doc["analytic_peak_fidelity"] >= 1.0 - 1e-8
    rows = out_csv.read_text().splitlines()[1:]
    data = np.array([[float(x) for x in row.split(",")] for row in rows])
    # the near-uniform curve also reaches 1 at its own transfer time
    assert np.max(data[:, 2]) >= 1.0 - 1e-6


def test_report_amplifier_manifest_flag(tmp_path, capsys):
    out_csv = tmp_path / "amp100.csv"
    code, out, _ = run(capsys, "report", "--figure", "amplifier", "--n", "100",
                       "--steps", "300", "--out", str(out_csv))
    assert code == 0
    doc = json.loads(out)
    assert doc["peak_probability"] >= 1.0 - 1e-8
    manifest = json.loads((tmp_path / "amp100.csv.manifest.json").read_text())
    assert manifest["dense_check_skipped"] is True
