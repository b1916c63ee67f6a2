import json
import subprocess
import sys

import numpy as np
import pytest

from unishift.cli import (
    ConfigError,
    RunConfig,
    build_parser,
    config_from_args,
    main,
    parse_complex,
    parse_ranks,
    run,
)


def read_json(path):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


class TestConfig:
    def test_defaults_and_validation(self):
        cfg = RunConfig(command="verify")
        cfg.validate()
        with pytest.raises(ConfigError):
            RunConfig(command="nope").validate()
        with pytest.raises(ConfigError):
            RunConfig(command="verify", scale=4.0).validate()
        with pytest.raises(ConfigError):
            RunConfig(command="verify", tol=2.0).validate()
        with pytest.raises(ConfigError):
            RunConfig(command="eta", grid=1).validate()

    def test_parse_complex(self):
        assert parse_complex("0.5") == 0.5
        assert parse_complex("-0.3+0.4i") == -0.3 + 0.4j
        assert parse_complex("-0.3+0.4j") == -0.3 + 0.4j

    def test_parse_ranks(self):
        assert parse_ranks("8,16,32") == (8, 16, 32)

    def test_config_file_flags_win(self, tmp_path):
        cfg_file = tmp_path / "run.json"
        cfg_file.write_text(json.dumps({"dim": 9, "trials": 4, "scale": 0.7}))
        parser = build_parser()
        args = parser.parse_args(["verify", "--config", str(cfg_file), "--dim", "3"])
        cfg = config_from_args(args)
        assert cfg.dim == 3  # flag beats the file
        assert cfg.trials == 4  # file beats the default
        assert cfg.scale == 0.7

    def test_unknown_config_key_rejected(self, tmp_path):
        cfg_file = tmp_path / "run.json"
        cfg_file.write_text(json.dumps({"frobnicate": 1}))
        parser = build_parser()
        args = parser.parse_args(["verify", "--config", str(cfg_file)])
        with pytest.raises(ConfigError):
            config_from_args(args)

    def test_outdir_env_default(self, tmp_path, monkeypatch):
        monkeypatch.setenv("UNISHIFT_OUTDIR", str(tmp_path))
        cfg = RunConfig(command="verify")
        assert cfg.out_path() == str(tmp_path / "verify.json")


class TestVerifyCommand:
    def test_near_zero_perturbation_passes(self, tmp_path):
        out = tmp_path / "v.json"
        code = main(
            ["verify", "--dim", "1", "--scale", "1e-9", "--trials", "1", "--seed", "0",
             "--out", str(out)]
        )
        assert code == 0
        records = read_json(out)
        assert all(r["pass"] for r in records)
        assert max(abs(complex(r["lhs_re"], r["lhs_im"])) for r in records) <= 1e-9

    def test_batch_report_schema(self, tmp_path):
        out = tmp_path / "v.json"
        code = main(
            ["verify", "--dim", "4", "--trials", "2", "--rmax", "3", "--seed", "1",
             "--out", str(out)]
        )
        assert code == 0
        records = read_json(out)
        # 2 trials x (7 monomials + 3 random polynomials)
        assert len(records) == 20
        keys = {
            "label", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "abs_err", "rel_err",
            "s_nodes_used", "tolerance", "pass", "trial",
        }
        assert set(records[0]) == keys

    def test_byte_identical_reruns(self, tmp_path):
        args = ["verify", "--dim", "3", "--trials", "2", "--rmax", "3", "--seed", "9"]
        out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
        assert main(args + ["--out", str(out1)]) == 0
        assert main(args + ["--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_jobs_flag_keeps_output_stable(self, tmp_path):
        args = ["verify", "--dim", "3", "--trials", "4", "--rmax", "2", "--seed", "5"]
        seq, par = tmp_path / "seq.json", tmp_path / "par.json"
        assert main(args + ["--out", str(seq)]) == 0
        assert main(args + ["--out", str(par), "--jobs", "3"]) == 0
        assert seq.read_bytes() == par.read_bytes()


class TestEtaCommand:
    def test_csv_schema_and_sidecar(self, tmp_path):
        out = tmp_path / "eta.csv"
        code = main(["eta", "--dim", "4", "--seed", "7", "--grid", "64", "--out", str(out)])
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "t,eta,eta0"
        assert len(lines) == 65
        first = lines[1].split(",")
        assert float(first[0]) == 0.0
        assert float(lines[-1].split(",")[0]) == pytest.approx(2 * np.pi, rel=1e-15)
        sidecar = read_json(tmp_path / "eta.json")
        assert sidecar["pass"] is True
        assert sidecar["l1_eta0"] <= sidecar["l1_bound"] + 1e-8

    def test_scalar_tent_matches_closed_form(self, tmp_path):
        # need a positive direction entry and a ramp that stays inside [0, 2pi]
        from unishift import random_pair

        def is_tent(s):
            pair = random_pair(s, 1, 1.0)
            beta = np.angle(pair.u0[0, 0]) % (2 * np.pi)
            return pair.a[0, 0].real > 0 and beta + 1.0 < 2 * np.pi - 0.05

        seed = next(s for s in range(50) if is_tent(s))
        pair = random_pair(seed, 1, 1.0)
        alpha = pair.a[0, 0].real
        beta = float(np.angle(pair.u0[0, 0]) % (2 * np.pi))
        out = tmp_path / "eta.csv"
        code = main(
            ["eta", "--dim", "1", "--seed", str(seed), "--scale", "1.0",
             "--grid", "257", "--s-nodes", "1024", "--out", str(out)]
        )
        assert code == 0
        rows = np.loadtxt(out, delimiter=",", skiprows=1)
        grid, eta = rows[:, 0], rows[:, 1]
        tent = np.maximum(0.0, alpha - (grid - beta))
        tent[grid < beta] = 0.0
        assert np.max(np.abs(eta - tent)) <= 2 * alpha / 1024

    def test_json_format(self, tmp_path):
        out = tmp_path / "eta.json"
        code = main(["eta", "--dim", "3", "--seed", "2", "--grid", "16",
                     "--format", "json", "--out", str(out)])
        assert code == 0
        payload = read_json(out)
        assert set(payload) == {"t", "eta", "eta0"}
        assert len(payload["t"]) == 16


class TestConvergeCommand:
    def test_csv_schema_and_trend(self, tmp_path):
        out = tmp_path / "c.csv"
        code = main(["converge", "--ambient", "128", "--ranks", "4,8,16", "--seed", "3",
                     "--scale", "0.4", "--out", str(out)])
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "rank,compressed_trace_re,compressed_trace_im,abs_diff"
        diffs = [float(line.split(",")[3]) for line in lines[1:]]
        assert diffs[-1] <= diffs[0]


class TestResolventCommand:
    def test_report(self, tmp_path):
        out = tmp_path / "r.json"
        code = main(["resolvent", "--dim", "4", "--seed", "2", "--z=-0.3+0.4i",
                     "--out", str(out)])
        assert code == 0
        payload = read_json(out)
        assert payload["pass"] is True
        assert payload["series_vs_direct"] <= 1e-7 * (1 + abs(payload["direct_lhs_re"]))


class TestBoundsCommand:
    def test_audit_passes(self, tmp_path):
        out = tmp_path / "b.json"
        code = main(["bounds", "--ambient", "96", "--ranks", "8,16", "--seed", "4",
                     "--scale", "0.5", "--out", str(out)])
        assert code == 0
        payload = read_json(out)
        assert payload["pass"] is True
        assert [p["cells"] for p in payload["partitions"]] == [8, 16]
        assert len(payload["partitions"][0]["audits"]) == 3


class TestExitCodes:
    def test_invalid_config_exits_2(self, capsys):
        assert main(["verify", "--dim", "0"]) == 2
        assert "error:" in capsys.readouterr().err

    def test_subprocess_entry_point(self, tmp_path):
        out = tmp_path / "v.json"
        proc = subprocess.run(
            [sys.executable, "-m", "unishift", "verify", "--dim", "2", "--trials", "1",
             "--rmax", "2", "--seed", "0", "--out", str(out)],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0, proc.stderr
        assert out.exists()

    def test_run_config_api(self, tmp_path):
        cfg = RunConfig(command="verify", dim=2, trials=1, rmax=2, out=str(tmp_path / "v.json"))
        assert run(cfg) == 0
