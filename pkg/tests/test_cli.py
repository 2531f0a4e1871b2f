import filecmp
import json
from pathlib import Path

import numpy as np
import pytest

from lkspide.cli import ConfigError, main, parse_config, read_paths_csv


class TestParseConfig:
    def test_minimal_lks_defaults(self):
        cfg = parse_config('{"family": "lks", "dim": 2}')
        assert cfg.params.family == "lks"
        assert cfg.params.epsilon == 1.0
        assert cfg.seeds == [2026]
        assert cfg.tol("c7_exponent") == 0.02

    def test_tf_beta_out_of_range_rejected(self):
        with pytest.raises(ConfigError):
            parse_config('{"family": "tf", "beta": 0.7}')

    def test_duplicate_key_rejected(self):
        with pytest.raises(ConfigError, match="duplicate"):
            parse_config('{"family": "lks", "family": "tf"}')

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError, match="unknown"):
            parse_config('{"familly": "lks"}')

    def test_unknown_tolerance_rejected(self):
        with pytest.raises(ConfigError, match="tolerance"):
            parse_config('{"tolerances": {"nope": 1.0}}')

    def test_malformed_document(self):
        with pytest.raises(ConfigError, match="malformed"):
            parse_config("{family: lks}")

    def test_seeds_validated(self):
        with pytest.raises(ConfigError):
            parse_config('{"seeds": []}')


class TestCliRuns:
    def test_simulate_deterministic(self, tmp_path):
        args = ["simulate", "--target", "lks-time", "--eps", "8", "--theta", "0",
                "--dim", "1", "--grid", "128,1.0", "--replicas", "4", "--seed", "9",
                "--method", "cholesky"]
        assert main(["--out", str(tmp_path / "a")] + args) == 0
        assert main(["--out", str(tmp_path / "b")] + args) == 0
        assert filecmp.cmp(tmp_path / "a" / "paths.csv", tmp_path / "b" / "paths.csv",
                           shallow=False)

    def test_paths_roundtrip(self, tmp_path):
        args = ["--out", str(tmp_path / "sim"), "simulate", "--target", "tf-time",
                "--beta", "0.5", "--dim", "1", "--grid", "64,1.0", "--replicas", "3",
                "--seed", "4", "--method", "spectral"]
        assert main(args) == 0
        ps = read_paths_csv(tmp_path / "sim" / "paths.csv")
        assert ps.values.shape == (3, 65)
        assert np.all(ps.values[:, 0] == 0.0)

    def test_manifest_written(self, tmp_path):
        main(["--out", str(tmp_path / "m"), "specfun", "eval", "--fn", "gamma", "--x", "5"])
        man = json.loads((tmp_path / "m" / "manifest.json").read_text())
        assert man["command"] == "specfun"
        assert "version" in man

    def test_csv_17_digits(self, tmp_path):
        main(["--out", str(tmp_path / "g"), "specfun", "eval", "--fn", "gamma", "--x", "0.5"])
        text = (tmp_path / "g" / "specfun.csv").read_text().splitlines()
        val = text[1].split(",")[1]
        assert float(val) == np.sqrt(np.pi)
        assert len(val.replace(".", "").replace("-", "").lstrip("0")) >= 16

    def test_kernel_eval_value(self, tmp_path):
        main(["--out", str(tmp_path / "k"), "kernel", "eval", "--family", "lks",
              "--eps", "8", "--theta", "0", "--dim", "1", "--t", "1.0", "--r", "0.0"])
        row = (tmp_path / "k" / "kernel.csv").read_text().splitlines()[1]
        from lkspide.specfun import gamma_fn
        assert float(row.split(",")[2]) == pytest.approx(gamma_fn(1.25) / np.pi, rel=1e-8)

    def test_cov_matrix_header_is_grid(self, tmp_path):
        pts = "0.25,0.5,0.75,1"
        main(["--out", str(tmp_path / "cm"), "cov", "matrix", "--family", "lks",
              "--eps", "8", "--theta", "0", "--dim", "1", "--grid-points", pts])
        lines = (tmp_path / "cm" / "cov_matrix.csv").read_text().splitlines()
        assert [float(x) for x in lines[0].split(",")] == [0.25, 0.5, 0.75, 1.0]
        assert len(lines) == 5

    def test_verify_subset_and_report(self, tmp_path):
        rc = main(["--out", str(tmp_path / "v"), "verify", "--only", "c1"])
        assert rc == 0
        lines = (tmp_path / "v" / "verify.csv").read_text().splitlines()
        assert lines[0] == "id,target,measured,tolerance,pass"
        assert all(line.split(",")[0] == "c1" for line in lines[1:])

    def test_verify_forced_failure_nonzero_exit(self, tmp_path):
        cfgfile = tmp_path / "cfg.json"
        cfgfile.write_text(json.dumps({
            "command": "verify",
            "only": ["c1"],
            "tolerances": {"c1_asymptotic_rel": 1e-30},
        }))
        rc = main(["--config", str(cfgfile), "--out", str(tmp_path / "vf"), "verify"])
        assert rc != 0

    def test_moduli_report_columns(self, tmp_path):
        main(["--out", str(tmp_path / "sim"), "simulate", "--target", "tf-time",
              "--beta", "0.5", "--dim", "1", "--grid", "512,1.0", "--replicas", "4",
              "--seed", "7", "--method", "spectral"])
        rc = main(["--out", str(tmp_path / "mod"), "moduli",
                   "--paths", str(tmp_path / "sim" / "paths.csv"),
                   "--mode", "uniform", "--H", "0.375", "--logpow", "0.5"])
        assert rc == 0
        header = (tmp_path / "mod" / "report.csv").read_text().splitlines()[0]
        assert header == "delta,statistic,plateau,cv,H_hat,stderr"

    def test_env_threads_honored(self, tmp_path, monkeypatch):
        monkeypatch.setenv("LKSPIDE_THREADS", "3")
        cfg = parse_config("{}")
        assert cfg.threads == 3
        monkeypatch.setenv("LKSPIDE_THREADS", "junk")
        assert parse_config("{}").threads == 1
