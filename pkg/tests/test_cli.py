import json
import math

import numpy as np
import pytest

from boundent.cli import main
from boundent.upb import ANALYTIC


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestMeasuresCommand:
    def test_shifts_geometric(self, capsys):
        code, out, _ = run_cli(
            capsys, "measures", "--family", "shifts", "--measure", "eg",
            "--restarts", "16",
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["family"] == "shifts"
        assert doc["measure"] == "geometric"
        assert abs(doc["value"] - ANALYTIC.geometric_min) < 1e-9
        assert doc["certification"]["certified"] is True

    def test_shifts_concurrence(self, capsys):
        code, out, _ = run_cli(
            capsys, "measures", "--family", "shifts", "--measure", "ec",
            "--restarts", "16",
        )
        assert code == 0
        doc = json.loads(out)
        assert abs(doc["value"] - ANALYTIC.concurrence_min) < 1e-6

    def test_degenerate_genshifts_reports_zero(self, capsys):
        code, out, _ = run_cli(
            capsys, "measures", "--family", "genshifts", "--overlap", "1.0",
            "--measure", "both", "--restarts", "16",
        )
        assert code == 0
        docs = json.loads(out)
        assert len(docs) == 2
        for doc in docs:
            assert doc["value"] == 0.0
            assert doc["certification"]["degenerate"] is True

    def test_csv_format(self, capsys):
        code, out, _ = run_cli(
            capsys, "measures", "--family", "shifts", "--measure", "eg",
            "--format", "csv", "--restarts", "16",
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "measure,value,degenerate,certified"
        cells = lines[1].split(",")
        assert cells[0] == "geometric"
        assert abs(float(cells[1]) - ANALYTIC.geometric_min) < 1e-9

    def test_usage_error_exits_one(self):
        with pytest.raises(SystemExit) as err:
            main(["measures", "--family", "smolin"])
        assert err.value.code == 1

    def test_missing_subcommand_exits_one(self):
        with pytest.raises(SystemExit) as err:
            main([])
        assert err.value.code == 1


class TestBasisCommand:
    def test_geometric_basis(self, capsys):
        code, out, _ = run_cli(capsys, "basis", "--measure", "eg")
        assert code == 0
        doc = json.loads(out)
        members = [np.array([complex(re, im) for re, im in m]) for m in doc["members"]]
        assert len(members) == 4
        gram = np.array([[np.vdot(a, b) for b in members] for a in members])
        assert np.abs(gram - np.eye(4)).max() < 1e-12
        assert doc["reconstruction_check"] is True

    def test_concurrence_basis_coordinates(self, capsys):
        code, out, _ = run_cli(capsys, "basis", "--measure", "ec")
        assert code == 0
        doc = json.loads(out)
        coords = np.array(doc["q_coordinates"])
        expected = np.array(
            [[5, 3, 3, 3], [3, -5, 3, -3], [3, -3, -5, 3], [3, 3, -3, -5]]
        ) / (2 * math.sqrt(13))
        assert np.abs(coords - expected).max() < 1e-15
        assert doc["reconstruction_check"] is True


class TestCertifyCommand:
    def test_shifts_passes(self, capsys):
        code, out, _ = run_cli(
            capsys, "certify", "--family", "shifts", "--restarts", "16",
            "--bisep-resolution", "181x361",
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["failures"] == []
        assert abs(doc["unextendibility"] - ANALYTIC.geometric_min) < 1e-8
        assert min(doc["ppt_min_eigs"].values()) >= -1e-10
        assert doc["cyclic_deviation"] < 1e-12
        assert doc["transposition_deviation"] > 0.01
        assert doc["biseparable"]["found"] is True

    def test_extendible_family_exits_two(self, capsys):
        code, out, _ = run_cli(
            capsys, "certify", "--family", "genshifts", "--overlap", "1.0",
            "--restarts", "16", "--bisep-resolution", "181x361",
        )
        assert code == 2
        doc = json.loads(out)
        assert doc["unextendibility"] < 1e-10
        assert "unextendibility" in doc["failures"]

    def test_bad_resolution_exits_one(self, capsys):
        code, _, err = run_cli(
            capsys, "certify", "--family", "shifts", "--bisep-resolution", "wide",
        )
        assert code == 1
        assert "resolution" in err


class TestSweepCommand:
    def test_small_sweep_structure(self, capsys, tmp_path):
        out_path = tmp_path / "sweep.csv"
        code, _, _ = run_cli(
            capsys, "sweep", "--points", "5", "--restarts", "16",
            "--out", str(out_path),
        )
        assert code == 0
        lines = out_path.read_text().strip().splitlines()
        assert lines[0] == "overlap,e_geometric,e_concurrence,degenerate"
        assert len(lines) == 6
        first = lines[1].split(",")
        last = lines[-1].split(",")
        assert first[0] == "0" and last[0] == "1"
        assert first[3] == "true" and last[3] == "true"
        assert float(first[1]) < 1e-8 and float(last[1]) < 1e-8
        mid = lines[3].split(",")
        assert abs(float(mid[0]) - 0.5) < 1e-12
        assert abs(float(mid[1]) - ANALYTIC.geometric_min) < 1e-6
        assert abs(float(mid[2]) - ANALYTIC.concurrence_min) < 1e-6

    def test_byte_identical_reruns(self, capsys, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for path in (a, b):
            code, _, _ = run_cli(
                capsys, "sweep", "--points", "4", "--restarts", "12",
                "--out", str(path),
            )
            assert code == 0
        assert a.read_bytes() == b.read_bytes()

    def test_seed_env_override(self, capsys, tmp_path, monkeypatch):
        flagged, enved = tmp_path / "flag.csv", tmp_path / "env.csv"
        run_cli(
            capsys, "sweep", "--points", "3", "--restarts", "8", "--seed", "99",
            "--out", str(flagged),
        )
        monkeypatch.setenv("QENT_SEED", "99")
        run_cli(
            capsys, "sweep", "--points", "3", "--restarts", "8", "--seed", "1",
            "--out", str(enved),
        )
        assert flagged.read_bytes() == enved.read_bytes()

    def test_unknown_measures_rejected(self, capsys):
        code, _, err = run_cli(capsys, "sweep", "--measures", "negativity")
        assert code == 1
        assert "unknown measures" in err

    def test_stdout_output(self, capsys):
        code, out, _ = run_cli(
            capsys, "sweep", "--points", "3", "--restarts", "8", "--measures", "eg",
        )
        assert code == 0
        lines = out.strip().splitlines()
        # concurrence column left empty when not requested
        assert lines[1].split(",")[2] == ""

    def test_unwritable_path_exits_one(self, capsys, tmp_path):
        target = tmp_path / "missing_dir" / "sweep.csv"
        code, _, err = run_cli(
            capsys, "sweep", "--points", "3", "--restarts", "8", "--out", str(target),
        )
        assert code == 1
        assert "cannot write" in err
