import json

import pytest

from mixedplate.cli import main, parse_levels
from mixedplate.io import read_patch


def test_parse_levels():
    assert parse_levels("4..7") == [4, 5, 6, 7]
    assert parse_levels("3") == [3]
    with pytest.raises(Exception):
        parse_levels("7..4")


def test_run_writes_csv(tmp_path, capsys):
    out = tmp_path / "r.csv"
    assert main(["run", "--benchmark", "square", "--degree", "1", "--levels", "2..3", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "L,e0,order0,e1,order1,eM,orderM"
    assert len(lines) == 3
    assert "square plate, p=1" in capsys.readouterr().out


def test_run_from_config(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text(f"benchmark = disk\ndegree = 2\nlevels = 1..2\nout = {tmp_path / 'd.csv'}\n")
    assert main(["run", "--config", str(cfg), "--levels", "2"]) == 0
    assert len((tmp_path / "d.csv").read_text().splitlines()) == 2


def test_dump_matrices(tmp_path):
    d = tmp_path / "dump"
    assert main(["run", "--benchmark", "square", "--degree", "1", "--levels", "1", "--dump-matrices", str(d)]) == 0
    assert (d / "square_p1_L1_K_pp.txt").exists()


def test_structured_error(capsys):
    assert main(["run", "--benchmark", "square", "--degree", "0", "--levels", "2"]) != 0
    err = json.loads(capsys.readouterr().err.strip())
    assert err["stage"] == "setup" and err["level"] == 2 and "degree" in err["error"]


def test_missing_arguments(capsys):
    assert main(["run", "--benchmark", "square"]) != 0
    assert "missing" in json.loads(capsys.readouterr().err)["error"]


def test_bad_benchmark_rejected():
    with pytest.raises(SystemExit) as e:
        main(["run", "--benchmark", "hexagon", "--degree", "1", "--levels", "2"])
    assert e.value.code != 0


def test_geometry_export(tmp_path):
    assert main(["geometry", "disk", str(tmp_path / "disk.patch")]) == 0
    assert read_patch(tmp_path / "disk.patch").name == "disk"
