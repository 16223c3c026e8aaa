"""CLI contract: parsing, sections per subcommand, exit codes, determinism."""

import json
import os
import subprocess
import sys

import pytest

from oneill_lab.cli import RunConfig, cli_parse, main, resolve_model, run
from oneill_lab.errors import ModelLoadError
from oneill_lab.report import Tolerances

MODELS_DIR = os.path.join(os.path.dirname(__file__), os.pardir, "models")
REEB = os.path.join(MODELS_DIR, "reeb_fiber.json")


class TestParse:
    def test_report_flags_roundtrip(self):
        cfg = cli_parse(
            [
                "report",
                "--model",
                "vertical-xi",
                "--points",
                "200",
                "--seed",
                "7",
                "--out",
                "r.json",
            ]
        )
        assert cfg == RunConfig(
            command="report",
            model="vertical-xi",
            points=200,
            seed=7,
            out="r.json",
        )

    def test_theorem_list_parsed(self):
        cfg = cli_parse(["theorems", "--model", "vertical-xi", "--theorems", "V1,CRH1"])
        assert cfg.theorems == ("V1", "CRH1")

    def test_defaults(self):
        cfg = cli_parse(["verify"])
        assert cfg.points == 100
        assert cfg.seed == 42
        assert cfg.box == (-2.0, 2.0)
        assert cfg.theorems is None
        assert cfg.probe == "first"
        assert cfg.tolerances == Tolerances()

    def test_box_and_tolerance_overrides(self):
        cfg = cli_parse(["verify", "--box=-1.5,1.5", "--tol-curv", "1e-6"])
        assert cfg.box == (-1.5, 1.5)
        assert cfg.tolerances.curv == 1e-6

    @pytest.mark.parametrize(
        "argv",
        [
            ["theorems", "--model", "vertical-xi", "--theorems", "V9"],
            ["report", "--frobnicate"],
            ["report", "--points", "0"],
            ["report", "--box", "2,-2"],
            ["report", "--probe", "middle"],
            ["report", "--probe", "random:0"],
            ["frobnicate"],
        ],
    )
    def test_usage_errors_exit_2(self, argv, capsys):
        assert main(argv) == 2
        capsys.readouterr()


class TestResolveModel:
    def test_builtins(self):
        assert resolve_model("vertical-xi").name == "vertical-xi"
        assert resolve_model("horizontal-xi").name == "horizontal-xi"
        assert resolve_model("r2m1:2").model.dim == 5

    def test_custom_file(self):
        assert resolve_model(REEB).name == "reeb-fiber"

    def test_failures(self):
        with pytest.raises(ModelLoadError):
            resolve_model("bogus-name")
        with pytest.raises(ModelLoadError):
            resolve_model("r2m1:0")
        with pytest.raises(ModelLoadError):
            resolve_model("missing-file.json")


class TestRunSections:
    def test_verify_has_no_theorem_section(self):
        rep = run(cli_parse(["verify", "--points", "3"]))
        assert rep.structure is not None
        assert rep.identities is not None
        assert rep.theorems is None
        assert rep.verdict == "pass"

    def test_theorems_has_only_theorem_section(self):
        rep = run(cli_parse(["theorems", "--points", "3"]))
        assert rep.structure is None
        assert rep.identities is None
        assert set(rep.theorems) == {"V1", "V2", "H1", "CRV1", "CRH1", "CMB1"}

    def test_report_has_all_sections(self):
        rep = run(cli_parse(["report", "--points", "3"]))
        assert rep.structure is not None
        assert rep.identities is not None
        assert rep.theorems is not None

    def test_r2m1_structure_only(self):
        rep = run(cli_parse(["report", "--model", "r2m1:2", "--points", "5"]))
        assert rep.identities is None
        assert rep.theorems is None
        assert rep.verdict == "pass"
        assert rep.structure["curvature"]["curv1"] <= 1e-7

    def test_crh1_variant_tallies_present(self):
        rep = run(cli_parse(["theorems", "--points", "2", "--theorems", "CRH1"]))
        entry = rep.theorems["CRH1"]
        assert set(entry["variants"]) == {"kappa=3/4", "kappa=3/8"}
        assert entry["surviving_variants"] == ["kappa=3/4", "kappa=3/8"]


class TestExitCodes:
    def test_pass_is_0(self, tmp_path, capsys):
        out = str(tmp_path / "r.json")
        assert main(["verify", "--points", "2", "--no-timestamp", "--out", out]) == 0
        capsys.readouterr()

    def test_flagged_model_is_3(self, tmp_path, capsys):
        out = str(tmp_path / "r.json")
        code = main(
            ["report", "--model", "horizontal-xi", "--points", "3", "--out", out]
        )
        assert code == 3
        data = json.loads(open(out).read())
        assert data["verdict"] == "pass-with-flags"
        assert "theorems.H2" in data["failed"]
        assert data["structure"]["submersion"]["length"] > 1.0
        assert data["structure"]["submersion"]["base_pd_all"] is False
        capsys.readouterr()

    def test_unattainable_tolerance_is_1(self, tmp_path, capsys):
        out = str(tmp_path / "r.json")
        code = main(
            ["verify", "--points", "2", "--tol-d1", "1e-30", "--out", out]
        )
        assert code == 1
        assert json.loads(open(out).read())["verdict"] == "fail"
        capsys.readouterr()

    def test_model_load_failure_is_4(self, capsys):
        assert main(["report", "--model", "bogus"]) == 4
        capsys.readouterr()

    def test_empty_sample_is_5(self, capsys):
        code = main(
            ["report", "--model", "horizontal-xi", "--box=-0.1,0.1", "--points", "5"]
        )
        assert code == 5
        capsys.readouterr()

    def test_write_failure_is_6(self, tmp_path, capsys):
        out = str(tmp_path / "no-such-dir" / "r.json")
        assert main(["verify", "--points", "2", "--out", out]) == 6
        capsys.readouterr()

    def test_xi_mismatch_is_2(self, capsys):
        code = main(
            ["theorems", "--model", "horizontal-xi", "--theorems", "V1", "--points", "2"]
        )
        assert code == 2
        capsys.readouterr()

    def test_theorems_on_plain_total_space_is_2(self, capsys):
        assert main(["theorems", "--model", "r2m1:1", "--points", "2"]) == 2
        capsys.readouterr()


class TestDeterminism:
    def test_no_timestamp_reruns_byte_identical(self, tmp_path, capsys):
        a = str(tmp_path / "a.json")
        b = str(tmp_path / "b.json")
        argv = ["report", "--points", "4", "--probe", "random:2", "--no-timestamp"]
        assert main(argv + ["--out", a]) == 0
        assert main(argv + ["--out", b]) == 0
        assert open(a, "rb").read() == open(b, "rb").read()
        capsys.readouterr()

    def test_seed_changes_sample(self, tmp_path, capsys):
        a = str(tmp_path / "a.json")
        b = str(tmp_path / "b.json")
        assert main(["report", "--points", "4", "--no-timestamp", "--out", a]) == 0
        assert (
            main(["report", "--points", "4", "--seed", "7", "--no-timestamp", "--out", b])
            == 0
        )
        assert open(a, "rb").read() != open(b, "rb").read()
        capsys.readouterr()

    def test_timestamp_present_unless_suppressed(self, tmp_path, capsys):
        a = str(tmp_path / "a.json")
        b = str(tmp_path / "b.json")
        main(["verify", "--points", "2", "--out", a])
        main(["verify", "--points", "2", "--no-timestamp", "--out", b])
        assert "generated_at" in json.loads(open(a).read())
        assert "generated_at" not in json.loads(open(b).read())
        capsys.readouterr()

    def test_stdout_json_when_no_out(self, capsys):
        code = main(["verify", "--points", "2", "--no-timestamp"])
        captured = capsys.readouterr()
        assert code == 0
        data = json.loads(captured.out)
        assert data["schema"] == "oneill-lab-report/1"
        assert data["verdict"] == "pass"


class TestConsoleEntry:
    def test_module_invocation(self, tmp_path):
        out = str(tmp_path / "r.json")
        proc = subprocess.run(
            [
                sys.executable,
                "-m",
                "oneill_lab",
                "verify",
                "--points",
                "2",
                "--no-timestamp",
                "--out",
                out,
            ],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert "verdict: pass" in proc.stderr
        assert json.loads(open(out).read())["schema"] == "oneill-lab-report/1"
