import json
import math
from decimal import Decimal

import numpy as np
import pytest

from geopack.cli import main
from geopack.models import CircleConfig, HexConfig, PointConfig
from geopack.solution import SchemaError, SolutionFile, fmt
from geopack.validator import validate


def _solve(tmp_path, *flags, name="sol.json"):
    out = tmp_path / name
    code = main(["solve", *flags, "--out", str(out)])
    return code, out


def test_solve_triangle(tmp_path, capsys):
    code, out = _solve(tmp_path, "--family", "minmax", "--n", "3", "--d", "2",
                       "--restarts", "16", "--seed", "1")
    assert code == 0
    data = json.loads(out.read_text())
    assert data["reported_value"] == "1.00000"
    assert data["family"] == "minmax"
    assert data["params"] == {"n": 3, "d": 2}
    assert data["solver"]["seed"] == 1 and data["solver"]["restarts"] == 16


def test_solve_single_circle_then_validate(tmp_path, capsys):
    code, out = _solve(tmp_path, "--family", "circles", "--variant", "square", "--n", "1",
                       "--restarts", "4")
    assert code == 0
    capsys.readouterr()
    assert main(["validate", str(out)]) == 0
    text = capsys.readouterr().out
    assert "0.50000" in text and "status: feasible" in text


def test_solve_single_hexagon(tmp_path):
    code, out = _solve(tmp_path, "--family", "hexagons", "--n", "1", "--restarts", "4")
    assert code == 0
    assert json.loads(out.read_text())["reported_value"] == "1.00000"


def test_solve_to_stdout(capsys):
    assert main(["solve", "--family", "circles", "--n", "1", "--restarts", "2"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["reported_value"] == "0.50000"


@pytest.mark.parametrize("argv", [
    ["solve", "--family", "circles", "--n", "2", "--d", "3"],
    ["solve", "--family", "minmax", "--n", "3", "--variant", "square"],
    ["solve", "--family", "hexagons", "--n", "3", "--formulation", "dual"],
    ["solve", "--family", "minmax", "--n", "1"],
])
def test_flag_misuse_exit_2(argv):
    assert main(argv) == 2


@pytest.mark.parametrize("argv", [
    ["solve", "--family", "spheres", "--n", "2"],
    ["solve", "--family", "circles", "--n", "0"],
    ["solve", "--family", "circles", "--n", "2", "--tol", "-1"],
    ["solve", "--n", "2"],
    ["explode"],
])
def test_argparse_errors_exit_2(argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def _write_solution(tmp_path, config, name="in.json"):
    v = validate(config)
    sol = SolutionFile.from_verdict(v, {"seed": 0})
    path = tmp_path / name
    sol.dump(path)
    return path


def test_validate_warns_on_inflated_radii(tmp_path, capsys):
    path = _write_solution(tmp_path, CircleConfig([[0.5, 0.5]], [0.5]))
    data = json.loads(path.read_text())
    data["variables"]["radii"] = [fmt(0.501)]
    path.write_text(json.dumps(data))
    assert main(["validate", str(path)]) == 0
    cap = capsys.readouterr()
    assert "warning" in cap.err
    certified = float(cap.out.split("certified_objective: ")[1].split()[0])
    assert certified < 0.501


def test_validate_overlapping_hexagons(tmp_path, capsys):
    path = _write_solution(tmp_path, HexConfig(3.0, [[-1.0, 0.0], [1.0, 0.0]], [0.0, 0.0]))
    data = json.loads(path.read_text())
    data["variables"]["centers"] = [[fmt(0.0), fmt(0.0)], [fmt(1.0), fmt(0.0)]]
    path.write_text(json.dumps(data))
    assert main(["validate", str(path)]) == 1
    assert "overlap[0,1]" in capsys.readouterr().out


@pytest.mark.parametrize("mutate", [
    lambda d: d.update(schema_version=99),
    lambda d: d.update(family="spheres"),
    lambda d: d["params"].update(n=4),
    lambda d: d.update(reported_value="0.40000"),
    lambda d: d["variables"].pop("radii"),
    lambda d: d["variables"].update(alpha="wide"),
    lambda d: d.update(sense="min"),
])
def test_schema_errors_exit_2(tmp_path, mutate):
    path = _write_solution(tmp_path, CircleConfig([[0.5, 0.5]], [0.5]))
    data = json.loads(path.read_text())
    mutate(data)
    path.write_text(json.dumps(data))
    assert main(["validate", str(path)]) == 2
    assert main(["render", str(path)]) == 2
    assert main(["compare", str(path)]) == 2


def test_unreadable_file_exit_2(tmp_path):
    assert main(["validate", str(tmp_path / "missing.json")]) == 2
    (tmp_path / "bad.json").write_text("{not json")
    assert main(["validate", str(tmp_path / "bad.json")]) == 2


def test_solution_round_trip_exact():
    rng = np.random.default_rng(0)
    pts = rng.normal(size=(5, 3))
    for cfg in [PointConfig(pts), CircleConfig([[0.25, 0.25], [0.75, 0.75]], [0.25, 0.25]),
                HexConfig(3.0, [[-1.0, 0.0], [1.0, 0.0]], [0.0, 0.0])]:
        sol = SolutionFile.from_verdict(validate(cfg))
        back = SolutionFile.loads(sol.dumps())
        assert back.dumps() == sol.dumps()
        assert back.certified_objective == sol.certified_objective
        again = validate(back.config)
        # rescaled min-max points may move the ratio by an ulp, never the string
        assert again.certified_objective == pytest.approx(sol.certified_objective, rel=1e-15)
        assert again.reported_value == sol.reported_value


def test_solution_rejects_infeasible():
    with pytest.raises(SchemaError):
        SolutionFile.from_verdict(validate(PointConfig([[0, 0], [0, 0]])))


def test_fmt_round_trips():
    for v in [0.1, 1 / 3, math.pi, 1e-300, 2.0**-1074, 12.889241234567891]:
        assert float(fmt(v)) == v
        assert len(Decimal(fmt(v)).as_tuple().digits) <= 17


def test_render_and_compare(tmp_path, capsys):
    path = _write_solution(tmp_path, CircleConfig([[0.5, 0.5]], [0.5]))
    svg = tmp_path / "out.svg"
    assert main(["render", str(path), "--out", str(svg)]) == 0
    assert svg.read_text().startswith("<?xml")
    capsys.readouterr()
    assert main(["compare", str(path)]) == 0
    row = json.loads(capsys.readouterr().out)
    assert row["status"] == "new" and row["relative_gap"] is None


def test_compare_against_custom_registry(tmp_path, capsys):
    reg = tmp_path / "reg.json"
    assert main(["compare", "--export-registry", str(reg)]) == 0
    entries = json.loads(reg.read_text())
    entries.append({"family": "circles", "variant": "square", "n": 1, "d": None,
                    "best_value": "0.50000", "previous_best": "0.5", "source": "trivial",
                    "sense": "max"})
    reg.write_text(json.dumps(entries))
    path = _write_solution(tmp_path, CircleConfig([[0.5, 0.5]], [0.5]))
    capsys.readouterr()
    assert main(["compare", str(path), "--registry", str(reg)]) == 0
    assert json.loads(capsys.readouterr().out)["status"] == "matched"


def test_compare_without_input_exit_2():
    assert main(["compare"]) == 2
