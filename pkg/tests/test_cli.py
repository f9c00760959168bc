"""Command-line interface: subcommands, artifacts, exit codes, determinism."""

import json
import os

import numpy as np
import pytest

import scatlab as sl
from scatlab.cli import main


@pytest.fixture()
def bank_config(tmp_path):
    path = tmp_path / "bank.json"
    path.write_text(json.dumps({
        "constructor": "shannon_1d",
        "grid": {"d": 1, "n": 1024, "L": 1.0},
        "J_low": 1, "J_high": 9,
    }))
    return str(path)


class TestBankCommand:
    def test_build_and_export(self, tmp_path, bank_config, capsys):
        out = str(tmp_path / "bankdir")
        assert main(["bank", "build", "--bank", bank_config, "--out", out]) == 0
        captured = capsys.readouterr().out
        assert "lp_deviation" in captured
        assert "config_hash" in captured
        assert os.path.exists(os.path.join(out, "manifest.json"))
        assert os.path.exists(os.path.join(out, "chi.sig"))
        assert os.path.exists(os.path.join(out, "run.json"))

    def test_verify_exported_bank(self, tmp_path, bank_config):
        out = str(tmp_path / "bankdir")
        main(["bank", "build", "--bank", bank_config, "--out", out])
        assert main(["bank", "verify", "--bank", out]) == 0

    def test_verify_corrupted_bank_exits_2(self, tmp_path, bank_config):
        out = str(tmp_path / "bankdir")
        main(["bank", "build", "--bank", bank_config, "--out", out])
        # tamper with one band: scale its spectrum, breaking the partition
        victim = os.path.join(out, "psi_j5.g0.sig")
        flt = sl.load_signal(victim)
        sl.save_signal(victim, sl.SpectralSignal(
            flt.grid, 0.5 * flt.coefficients))
        assert main(["bank", "verify", "--bank", out]) == 2

    def test_missing_config_exits_2(self, tmp_path):
        missing = str(tmp_path / "nope.json")
        assert main(["bank", "verify", "--bank", missing]) == 2


class TestScatterCommand:
    def test_profile_csv(self, tmp_path, bank_config):
        out = str(tmp_path / "run")
        code = main(["scatter", "--bank", bank_config, "--generator",
                     "random-phase-band", "--seed", "7", "--depth", "2",
                     "--out", out])
        assert code == 0
        lines = open(os.path.join(out, "profile.csv")).read().splitlines()
        assert lines[0] == "# scatlab-csv v1 energy-profile"
        assert lines[1].startswith("# config_hash=")
        assert lines[2] == "# seed=7"
        assert lines[3] == "layer,W_n,W_n_error,cumulative_output,mixed_partial"
        assert len(lines) == 4 + 3  # layers 0..2

    def test_profile_json_and_top_k(self, tmp_path, bank_config):
        out = str(tmp_path / "run")
        code = main(["scatter", "--bank", bank_config, "--generator",
                     "band-indicator", "--seed", "3", "--depth", "2",
                     "--format", "json", "--top-k", "5", "--out", out])
        assert code == 0
        payload = json.load(open(os.path.join(out, "profile.json")))
        assert "config_hash" in payload and len(payload["rows"]) == 3
        paths = open(os.path.join(out, "paths.csv")).read().splitlines()
        assert paths[3] == "path,energy"
        assert len(paths) == 4 + 5
        energies = [float(line.rsplit(",", 1)[1]) for line in paths[4:]]
        assert energies == sorted(energies, reverse=True)

    def test_byte_identical_reruns(self, tmp_path, bank_config):
        outs = []
        for tag in ("a", "b"):
            out = str(tmp_path / tag)
            main(["scatter", "--bank", bank_config, "--generator",
                  "random-phase-band", "--seed", "11", "--depth", "2",
                  "--top-k", "4", "--out", out])
            outs.append(out)
        for name in ("profile.csv", "paths.csv"):
            a = open(os.path.join(outs[0], name), "rb").read()
            b = open(os.path.join(outs[1], name), "rb").read()
            assert a == b

    def test_budget_exhaustion_exits_4(self, tmp_path, bank_config,
                                       monkeypatch):
        monkeypatch.setenv("SCATTER_BUDGET", "5")
        code = main(["scatter", "--bank", bank_config, "--generator",
                     "random-phase-band", "--depth", "3"])
        assert code == 4

    def test_uncaptured_energy_exits_3(self, tmp_path):
        # a partially covering bank plus a signal with mass beyond the
        # covered band leaks energy: the identity check must fail
        cfg = tmp_path / "meyer.json"
        cfg.write_text(json.dumps({
            "constructor": "meyer_1d",
            "grid": {"d": 1, "n": 1024, "L": 1.0},
            "J_low": 1, "J_high": 7,
        }))
        grid = sl.Grid(d=1, n=1024, L=1.0)
        kk = grid.freq_indices()
        coeffs = np.zeros(grid.shape, dtype=np.complex128)
        coeffs[(kk >= 200) & (kk < 400)] = 1.0  # beyond coverage |xi| < 128
        coeffs /= np.linalg.norm(coeffs)
        sig_path = str(tmp_path / "high.sig")
        sl.save_signal(sig_path, sl.inverse_fourier(
            sl.SpectralSignal(grid, coeffs)))
        code = main(["scatter", "--bank", str(cfg), "--signal", sig_path,
                     "--depth", "2"])
        assert code == 3


class TestAdversarialCommand:
    @pytest.fixture()
    def forge_config(self, tmp_path):
        path = tmp_path / "bank.json"
        path.write_text(json.dumps({
            "constructor": "shannon_1d",
            "grid": {"d": 1, "n": 4096, "L": 1.0},
            "J_low": 1, "J_high": 11,
        }))
        return str(path)

    def test_forge_writes_signal_and_certificate(self, tmp_path, forge_config,
                                                 tmp_path_factory):
        # a seed file holding a full dyadic shell keeps W_2 large
        grid = sl.Grid(d=1, n=4096, L=1.0)
        kk = grid.freq_indices()
        coeffs = np.zeros(grid.shape, dtype=np.complex128)
        coeffs[(kk >= 32) & (kk < 64)] = 1.0
        coeffs /= np.linalg.norm(coeffs)
        seed_path = str(tmp_path / "seed.sig")
        sl.save_signal(seed_path, sl.inverse_fourier(
            sl.SpectralSignal(grid, coeffs)))
        out = str(tmp_path / "forge")
        code = main(["adversarial", "--bank", forge_config, "--signal",
                     seed_path, "--decay", "geometric:0.5", "--depth", "2",
                     "--out", out])
        assert code == 0
        assert os.path.exists(os.path.join(out, "f_E.sig"))
        cert = json.load(open(os.path.join(out, "certificate.json")))
        assert cert["K"] == 2
        assert "config_hash" in cert
        for w, lb in zip(cert["w_fE"], cert["lower_bounds"]):
            assert w >= lb - 1e-9

    def test_unreachable_target_exits_5(self, tmp_path, forge_config):
        code = main(["adversarial", "--bank", forge_config, "--generator",
                     "gaussian-bump", "--seed", "0", "--decay",
                     "geometric:0.5", "--depth", "3", "--delta", "0.2499"])
        assert code == 5

    def test_bad_decay_spec_exits_2(self, forge_config):
        code = main(["adversarial", "--bank", forge_config, "--decay",
                     "geometric:1.5", "--depth", "2"])
        assert code == 2


class TestCertifyCommand:
    def test_kernel_certificate(self, tmp_path, bank_config):
        out = str(tmp_path / "cert")
        code = main(["certify", "--bank", bank_config, "--generator",
                     "band-indicator", "--seed", "5", "--certificate",
                     "kernel", "--depth", "3", "--out", out])
        assert code == 0
        lines = open(os.path.join(out, "comparison.csv")).read().splitlines()
        assert lines[0] == "# scatlab-csv v1 certify"
        assert lines[3] == "N,measured_W_N,bound,slack"
        for line in lines[4:]:
            _, _, _, slack = line.split(",")
            assert float(slack) >= -1e-8

    def test_weighted_certificate(self, tmp_path, bank_config, capsys):
        code = main(["certify", "--bank", bank_config, "--generator",
                     "band-indicator", "--seed", "6", "--certificate",
                     "weighted", "--weight", "sobolev:0.5", "--depth", "3"])
        assert code == 0
        captured = capsys.readouterr().out
        assert "strong" in captured

    def test_ufc_certificate(self, tmp_path):
        cfg = tmp_path / "ufc.json"
        cfg.write_text(json.dumps({
            "constructor": "ufc_1d",
            "grid": {"d": 1, "n": 1024, "L": 1.0},
            "window_width": 16, "D_target": 8.0,
        }))
        code = main(["certify", "--bank", str(cfg), "--generator",
                     "random-phase-band", "--seed", "2", "--certificate",
                     "ufc", "--depth", "3"])
        assert code == 0
