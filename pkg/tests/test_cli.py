import hashlib
import json
import math
import struct

import numpy as np
import pytest

from qharper.cli import main
from qharper.config import ConfigError, build_config, parse_config_text
from qharper.matio import MatrixFormatError, fmt, read_matrix, write_matrix


class TestConfigParsing:
    def test_minimal_config_fills_defaults(self):
        text = "a = 1.5\nepsilon = 0.5\nmu = 0.05\nmu_prime = 0.05\nn_dim = 100\n"
        cfg = build_config(parse_config_text(text), {})
        assert cfg.n_orbits == 500
        assert cfg.n_periods == 400
        assert cfg.steps_per_period == 512
        assert cfg.effective_trotter_steps() == 500
        assert cfg.threshold == 0.18

    def test_comments_and_blank_lines(self):
        text = "# model\n\na=1.0 # kinetic\nepsilon=1.0\nmu=0\nmu_prime=0\nn_dim=8\n"
        cfg = build_config(parse_config_text(text), {})
        assert cfg.a == 1.0 and cfg.n_dim == 8

    def test_zero_dimension_names_key(self):
        text = "a=1\nepsilon=1\nmu=0\nmu_prime=0\nn_dim=0\n"
        with pytest.raises(ConfigError, match="n_dim"):
            build_config(parse_config_text(text), {})

    def test_unknown_key_suggests_near_match(self):
        with pytest.raises(ConfigError, match="epsilon"):
            parse_config_text("epsilonn = 0.5\n")

    def test_error_carries_line_number(self):
        with pytest.raises(ConfigError, match="line 3"):
            parse_config_text("a=1\nepsilon=1\nmu=oops\n")

    def test_duplicate_key_rejected(self):
        with pytest.raises(ConfigError, match="duplicate"):
            parse_config_text("a=1\na=2\n")

    def test_missing_required_keys_listed(self):
        with pytest.raises(ConfigError, match="mu_prime"):
            build_config(parse_config_text("a=1\nepsilon=1\nmu=0\nn_dim=8\n"), {})

    def test_flags_override_file(self):
        text = "a=1\nepsilon=1\nmu=0\nmu_prime=0\nn_dim=8\nseed=3\n"
        cfg = build_config(parse_config_text(text), {"seed": 9, "n_dim": 16})
        assert cfg.seed == 9 and cfg.n_dim == 16

    def test_emit_validation(self):
        text = "a=1\nepsilon=1\nmu=0\nmu_prime=0\nn_dim=8\nemit=csv,svg\n"
        with pytest.raises(ConfigError, match="emit"):
            build_config(parse_config_text(text), {})

    def test_tau_s_range(self):
        text = "a=1\nepsilon=1\nmu=0\nmu_prime=0\nn_dim=8\ntau_s=6.5\n"
        with pytest.raises(ConfigError, match="tau_s"):
            build_config(parse_config_text(text), {})


class TestMatrixFormat:
    def test_round_trip_random_unitary(self, rng, tmp_path):
        m = rng.normal(size=(64, 64)) + 1j * rng.normal(size=(64, 64))
        q, _ = np.linalg.qr(m)
        path = tmp_path / "u.qhrp"
        write_matrix(path, q, flags=0x2)
        back, flags = read_matrix(path)
        assert flags == 0x2
        assert (back == q).all()

    def test_identity_golden_bytes(self, tmp_path):
        path = tmp_path / "eye.qhrp"
        write_matrix(path, np.eye(2, dtype=complex))
        expected = struct.pack("<4sIII", b"QHRP", 2, 0, 0)
        expected += struct.pack("<8d", 1, 0, 0, 0, 0, 0, 1, 0)
        assert path.read_bytes() == expected

    def test_truncated_file_rejected(self, tmp_path):
        path = tmp_path / "u.qhrp"
        write_matrix(path, np.eye(4, dtype=complex))
        path.write_bytes(path.read_bytes()[:-8])
        with pytest.raises(MatrixFormatError, match="expected"):
            read_matrix(path)

    def test_bad_magic_rejected(self, tmp_path):
        path = tmp_path / "u.qhrp"
        write_matrix(path, np.eye(2, dtype=complex))
        raw = bytearray(path.read_bytes())
        raw[:4] = b"NOPE"
        path.write_bytes(bytes(raw))
        with pytest.raises(MatrixFormatError, match="magic"):
            read_matrix(path)

    def test_dimension_overflow_rejected(self, tmp_path):
        path = tmp_path / "u.qhrp"
        path.write_bytes(struct.pack("<4sIII", b"QHRP", 1 << 24, 0, 0))
        with pytest.raises(MatrixFormatError, match="limit"):
            read_matrix(path)

    def test_float_formatting_round_trips(self):
        for x in (math.pi, 1e-17, -2.0 / 3.0, 1234567.89):
            assert float(fmt(x)) == x


def run_cli(args):
    return main(args)


def base_flags(tmp_path, **kw):
    flags = ["--a", "1.5", "--epsilon", "0.5", "--mu", "0.05", "--mu-prime", "0.05",
             "--n-dim", "21", "--seed", "7", "--out", str(tmp_path)]
    for key, val in kw.items():
        flags += [f"--{key.replace('_', '-')}", str(val)]
    return flags


def manifest_of(path):
    return json.loads((path / "manifest.json").read_text())


class TestCliCommands:
    def test_classical_sos_outputs_and_determinism(self, tmp_path):
        out1, out2 = tmp_path / "r1", tmp_path / "r2"
        for out in (out1, out2):
            code = run_cli(["classical-sos"] + base_flags(out, n_orbits=6, n_points=15,
                                                          steps_per_period=64))
            assert code == 0
        assert (out1 / "sections.csv").read_bytes() == (out2 / "sections.csv").read_bytes()
        header = (out1 / "sections.csv").read_text().splitlines()[0]
        assert header == "orbit_id,period_index,phi,p,H0"

    def test_manifest_lists_outputs_with_valid_hashes(self, tmp_path):
        code = run_cli(["classical-sos"] + base_flags(tmp_path, n_orbits=3, n_points=5,
                                                      steps_per_period=64))
        assert code == 0
        man = manifest_of(tmp_path)
        assert man["command"] == "classical-sos"
        assert man["seed"] == 7
        names = {o["path"] for o in man["outputs"]}
        assert names == {"sections.csv", "orbit_stats.csv"}
        for entry in man["outputs"]:
            digest = hashlib.sha256((tmp_path / entry["path"]).read_bytes()).hexdigest()
            assert digest == entry["sha256"]

    def test_quantum_floquet_unperturbed_contract(self, tmp_path):
        code = run_cli(["quantum-floquet", "--a", "1.5", "--epsilon", "0.5",
                        "--mu", "0", "--mu-prime", "0", "--n-dim", "101",
                        "--seed", "1", "--out", str(tmp_path), "--emit", "csv,bin"])
        assert code == 0
        rows = (tmp_path / "floquet.csv").read_text().splitlines()
        assert rows[0] == "j,quasi_energy,mu_h0,sigma_h0"
        sigmas = np.array([float(r.split(",")[3]) for r in rows[1:]])
        assert len(sigmas) == 101
        assert sigmas.max() < 1e-8
        vectors, _ = read_matrix(tmp_path / "eigenvectors.qhrp")
        assert np.abs(vectors.conj().T @ vectors - np.eye(101)).max() < 1e-8

    def test_quantum_floquet_degeneracy_warning(self, tmp_path):
        code = run_cli(["quantum-floquet"] + base_flags(tmp_path, n_dim=16))
        assert code == 0
        assert any("multiple of 4" in w for w in manifest_of(tmp_path)["warnings"])

    def test_husimi_gallery_one_image_per_state(self, tmp_path):
        code = run_cli(["husimi-gallery"] + base_flags(tmp_path))
        assert code == 0
        pngs = sorted(tmp_path.glob("husimi_*.png"))
        assert len(pngs) == 21
        from PIL import Image

        img = Image.open(pngs[0])
        assert img.size == (21, 21)
        assert img.mode == "L"

    def test_vjk_analysis_profile(self, tmp_path):
        code = run_cli(["vjk-analysis", "--a", "2", "--epsilon", "2", "--mu", "0.05",
                        "--mu-prime", "0.05", "--n-dim", "50", "--seed", "1",
                        "--out", str(tmp_path), "--emit", "csv,png"])
        assert code == 0
        rows = (tmp_path / "sigma_profile.csv").read_text().splitlines()
        assert rows[0] == "j,j_over_n,E_j,sigma_over_mu"
        sig = np.array([float(r.split(",")[3]) for r in rows[1:]])
        assert 0.2 <= sig.max() <= 0.8
        for name in ("vjk_abs.png", "u_quarter.png", "u_full.png"):
            assert (tmp_path / name).exists()

    def test_spectrum_stats_outputs(self, tmp_path):
        code = run_cli(["spectrum-stats"] + base_flags(tmp_path, n_dim=41))
        assert code == 0
        ks_rows = (tmp_path / "ks.csv").read_text().splitlines()
        assert ks_rows[0] == "source,n_spacings,ks_poisson,ks_goe"
        hist = (tmp_path / "histogram_full_spectrum.csv").read_text().splitlines()
        assert hist[0].startswith("s_bin_center,empirical_density,poisson,wigner_dyson")
        assert len(hist) == 31
        assert (tmp_path / "spacings.png").exists()

    def test_width_compare_table(self, tmp_path):
        code = run_cli(["width-compare", "--a", "1", "--epsilon", "1", "--mu", "0.05",
                        "--mu-prime", "0.05", "--n-dim", "32", "--seed", "5",
                        "--out", str(tmp_path), "--n-orbits", "8", "--n-periods", "40",
                        "--steps-per-period", "64", "--emit", "csv"])
        assert code == 0
        rows = dict(line.split(",") for line in
                    (tmp_path / "widths.csv").read_text().splitlines()[1:])
        for key in ("classical_estimate", "classical_measured",
                    "quantum_estimate", "quantum_measured"):
            assert key in rows
            assert float(rows[key]) > 0

    def test_sweep_n_emits_per_dimension_images(self, tmp_path, monkeypatch):
        monkeypatch.setenv("QHARPER_THREADS", "2")
        code = run_cli(["sweep-n", "--a", "1", "--epsilon", "1", "--mu", "0.15",
                        "--mu-prime", "0.05", "--n-dim", "16", "--seed", "3",
                        "--out", str(tmp_path), "--n-list", "8,16"])
        assert code == 0
        assert (tmp_path / "n0008" / "husimi_separatrix_n0008.png").exists()
        assert (tmp_path / "n0016" / "husimi_separatrix_n0016.png").exists()
        rows = (tmp_path / "sweep.csv").read_text().splitlines()
        assert rows[0] == "n_dim,separatrix_state,mu_h0,sigma_h0,participation"
        assert len(rows) == 3
        man = manifest_of(tmp_path)
        names = {o["path"] for o in man["outputs"]}
        assert "n0008/husimi_separatrix_n0008.png" in names
        for entry in man["outputs"]:
            digest = hashlib.sha256((tmp_path / entry["path"]).read_bytes()).hexdigest()
            assert digest == entry["sha256"]

    def test_quantum_floquet_byte_determinism(self, tmp_path):
        outs = []
        for name in ("q1", "q2"):
            out = tmp_path / name
            assert run_cli(["quantum-floquet"] + base_flags(out, emit="csv")) == 0
            outs.append((out / "floquet.csv").read_bytes())
        assert outs[0] == outs[1]

    def test_config_file_plus_flag_override(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("a = 1.5\nepsilon = 0.5\nmu = 0\nmu_prime = 0\nn_dim = 9\n")
        out = tmp_path / "out"
        code = run_cli(["quantum-floquet", "--config", str(cfg), "--n-dim", "11",
                        "--out", str(out), "--emit", "csv"])
        assert code == 0
        assert manifest_of(out)["config"]["n_dim"] == 11

    def test_bad_flag_value_is_a_clean_error(self, tmp_path, capsys):
        code = run_cli(["quantum-floquet", "--a", "1", "--epsilon", "1", "--mu", "0",
                        "--mu-prime", "0", "--n-dim", "0", "--out", str(tmp_path)])
        assert code == 2
        assert "n_dim" in capsys.readouterr().err
