import json
import os
import subprocess
import sys
from fractions import Fraction

import numpy as np
import pytest
import scipy.sparse as sp

from scforge.cli import (
    EXIT_CONFIG,
    EXIT_GUARD,
    EXIT_IO,
    EXIT_OK,
    ConfigError,
    RunConfig,
    main,
    run,
    threads_from_env,
    verify_report,
)
from scforge.export import (
    DesignReport,
    alist_text,
    load_report,
    parse_alist,
    read_alist,
    write_alist,
    write_report,
)
from scforge.lifting import CirculantPowers, assemble_parity_matrix, scb_powers
from scforge.protograph import REFERENCE_PARTITION_G3K7, CodeParams, PartitionMatrix

SMALL_CODE = ["--gamma", "3", "--kappa", "5", "--z", "11", "--m", "1", "--L", "4"]
SMALL_PART = "[[0,0,1,1,0],[1,0,0,1,1],[0,1,1,0,0]]"


def config(**kw):
    base = {"schema_version": 1, "code": dict(gamma=3, kappa=5, z=11, m=1, L=4), "mode": "census"}
    base.update(kw)
    return base


class TestAlist:
    def test_two_by_two(self):
        text = alist_text(np.ones((2, 2), dtype=int))
        assert text == "2 2\n2 2\n2 2\n2 2\n1 2\n1 2\n1 2\n1 2\n"

    def test_padding(self):
        H = np.array([[1, 1, 0], [0, 1, 1], [0, 0, 1]])
        lines = alist_text(H).splitlines()
        assert lines[:4] == ["3 3", "2 2", "1 2 2", "2 2 1"]
        assert lines[4:7] == ["1 0", "1 2", "2 3"]
        assert lines[7:] == ["1 2", "2 3", "3 0"]

    def test_g3k7_header_and_round_trip(self, tmp_path, g3k7_params):
        code = assemble_parity_matrix(REFERENCE_PARTITION_G3K7, scb_powers(g3k7_params), g3k7_params)
        path = write_alist(code.H, tmp_path / "code.alist")
        assert path.read_text().splitlines()[0] == "910 429"
        back = read_alist(path)
        assert (back != code.H).nnz == 0
        assert alist_text(back) == path.read_text()

    @pytest.mark.parametrize("text", ["", "2 2\n2 2\n2 2\n2 2\n1 2\n",
                                      "2 2\n2 2\n2 2\n2 2\n1 2\n1 2\n1 2\n1 0\n",
                                      "2 2\n1 1\n1 1\n1 1\n1\n2\n2\n1\n"])
    def test_malformed(self, text):
        with pytest.raises(ValueError):
            parse_alist(text)

    def test_random_round_trip(self, rng):
        for _ in range(5):
            H = sp.random(12, 20, density=0.3, random_state=rng, format="csr")
            H.data[:] = 1
            assert (parse_alist(alist_text(H)) != H).nnz == 0


class TestReport:
    def test_round_trip(self, tmp_path):
        rep = DesignReport(mode="census", params=dict(gamma=3, kappa=7, z=13, m=1, L=10), seed=3,
                           partition=REFERENCE_PARTITION_G3K7.to_list(), f_sum=Fraction(10339, 2),
                           per_pattern={1: 175, 2: 66}, f_sc_initial=Fraction(7, 2))
        path = write_report(rep, tmp_path / "r.json")
        back = load_report(path)
        assert back == rep
        assert json.loads(path.read_text())["f_sum_rounded"] == 5170

    def test_unknown_schema(self, tmp_path):
        p = tmp_path / "r.json"
        p.write_text(json.dumps({"schema_version": 99}))
        with pytest.raises(ValueError):
            load_report(p)

    def test_table_lists_patterns(self):
        cfg = RunConfig.from_dict(config(partition=json.loads(SMALL_PART)))
        report, _ = run(cfg)
        table = report.to_table()
        for ell in report.per_pattern:
            assert f"P{ell}" in table

    def test_self_consistent(self):
        cfg = RunConfig.from_dict(config(mode="cpo", partition=json.loads(SMALL_PART),
                                         cpo={"budget": 20}))
        report, code = run(cfg)
        assert verify_report(report) == []
        assert report.f_sc_final <= report.f_sc_initial
        report.f_sc_final += 1
        assert verify_report(report)

    def test_uncoupled_mode(self):
        cfg = RunConfig.from_dict({"schema_version": 1, "mode": "uncoupled",
                                   "code": dict(gamma=3, kappa=11, z=23, m=1, L=10)})
        report, _ = run(cfg)
        assert report.f_sc_initial == 254610


class TestConfig:
    @pytest.mark.parametrize("data", [
        {"code": dict(gamma=3, kappa=5, z=11, m=1, L=4)},
        config(mode="nope"),
        config(extra=1),
        config(code=dict(gamma=2, kappa=5, z=11, m=1, L=4)),
        config(code=dict(gamma=3)),
        config(mode="cpo"),
        config(partition=[[0]], cutting_vector=[1, 2, 3]),
        config(output={"formats": ["pdf"]}),
        config(cpo={"subset_size": 0}),
        config(seed=-1),
    ])
    def test_rejected(self, data):
        with pytest.raises(ConfigError):
            RunConfig.from_dict(data)

    def test_threads(self, monkeypatch):
        monkeypatch.setenv("SCFORGE_THREADS", "3")
        assert threads_from_env() == 3
        monkeypatch.setenv("SCFORGE_THREADS", "zero")
        with pytest.raises(ConfigError):
            threads_from_env()


class TestCli:
    def test_census_stdout(self, capsys):
        assert main(["census", *SMALL_CODE, "--partition", SMALL_PART]) == EXIT_OK
        assert "weighted pattern count" in capsys.readouterr().out

    def test_writes_all_formats(self, tmp_path):
        out = tmp_path / "run"
        rc = main(["cpo", *SMALL_CODE, "--partition", SMALL_PART, "--budget", "10",
                   "--out-dir", str(out), "--format", "alist", "--format", "report-json"])
        assert rc == EXIT_OK
        report = load_report(out / "report.json")
        assert verify_report(report) == []
        H = read_alist(out / "code.alist")
        assert H.shape == (3 * 11 * 5, 5 * 11 * 4)

    def test_config_error(self, capsys):
        assert main(["cpo", *SMALL_CODE]) == EXIT_CONFIG
        assert "partition" in capsys.readouterr().err

    def test_missing_params(self):
        assert main(["census", "--gamma", "3"]) == EXIT_CONFIG

    def test_guard_error(self, tmp_path, capsys):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps(config(oo={"strategy": "exhaustive", "guard": 5})))
        assert main(["oo", "--config", str(cfg)]) == EXIT_GUARD
        assert "guard" in capsys.readouterr().err

    def test_cv_guard(self, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps(config(cv_guard=3)))
        assert main(["cv-baseline", "--config", str(cfg)]) == EXIT_GUARD

    def test_io_error(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("")
        rc = main(["census", *SMALL_CODE, "--partition", SMALL_PART,
                   "--out-dir", str(blocker / "sub"), "--format", "report-json"])
        assert rc == EXIT_IO
        assert main(["census", "--config", str(tmp_path / "missing.json")]) == EXIT_IO

    def test_bad_threads_env(self, monkeypatch):
        monkeypatch.setenv("SCFORGE_THREADS", "-2")
        assert main(["census", *SMALL_CODE]) == EXIT_CONFIG

    def test_parallel_cv_scan_matches_serial(self, tmp_path, monkeypatch, capsys):
        args = ["cv-baseline", "--gamma", "3", "--kappa", "6", "--z", "7", "--m", "1", "--L", "3",
                "--format", "report-json"]
        assert main(args) == EXIT_OK
        serial = capsys.readouterr().out
        monkeypatch.setenv("SCFORGE_THREADS", "2")
        assert main(args) == EXIT_OK
        assert capsys.readouterr().out == serial

    def test_byte_identical_reports(self, tmp_path):
        paths = []
        for name in ("a", "b"):
            out = tmp_path / name
            assert main(["full", *SMALL_CODE, "--seed", "7", "--budget", "15",
                         "--out-dir", str(out)]) == EXIT_OK
            paths.append(out)
        for f in ("report.json", "report.txt", "code.alist"):
            assert (paths[0] / f).read_bytes() == (paths[1] / f).read_bytes()

    def test_export(self, tmp_path, capsys):
        out = tmp_path / "run"
        main(["census", *SMALL_CODE, "--partition", SMALL_PART, "--out-dir", str(out),
              "--format", "report-json"])
        capsys.readouterr()
        assert main(["export", "--report", str(out / "report.json")]) == EXIT_OK
        text = capsys.readouterr().out
        report = load_report(out / "report.json")
        assert text.splitlines()[0] == "220 165"
        params = CodeParams(**report.params)
        part = PartitionMatrix(np.array(report.partition), params.m)
        code = assemble_parity_matrix(part, CirculantPowers(np.array(report.powers), params.z), params)
        assert (parse_alist(text) != code.H).nnz == 0

    def test_module_entry_point(self):
        res = subprocess.run([sys.executable, "-m", "scforge", "--version"],
                             capture_output=True, text=True)
        assert res.returncode == 0 and res.stdout.startswith("scforge ")


@pytest.mark.slow
@pytest.mark.skipif(not os.environ.get("SCFORGE_LONG_TESTS"), reason="full 969-vector scan, ~16 min")
def test_cv_baseline_best_vector(capsys):
    assert main(["cv-baseline", "--gamma", "3", "--kappa", "19", "--z", "46", "--m", "1",
                 "--L", "5", "--format", "report-json"]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["cutting_vector"] == [4, 9, 15] and report["f_sc_initial"] == 845434
