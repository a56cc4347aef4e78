import json
import os

import numpy as np
import pytest

from combo_fft.materials import NeoHookeanParams, NeoHookeanLaw
from combo_fft.imaging import load_grid
from combo_fft.postprocess import TRACTION_COLUMNS, load_table
from combo_fft.cli import (
    ArgValueError,
    ConfigInvalid,
    RunConfig,
    parse_override,
    apply_overrides,
    load_run_config,
    main,
)

SMALL_RUN = {
    "geometry": {"shape": "sphere", "radius": 0.3},
    "dims": [16, 16, 16],
    "factors": [4, 4, 4],
    "loading": {
        "F_bar": [[1.0, 0.1, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
    },
    "solver": {"tol_equilibrium": 1e-8},
}
STAGES = ("generate", "coarsen", "normals", "solve", "post")


def _read_json(filepath):
    with open(filepath, "r") as stream:
        return json.load(stream)


@pytest.fixture
def run_dir(tmp_path):
    config_path = tmp_path / "run.json"
    with open(config_path, "w") as stream:
        json.dump(SMALL_RUN, stream)
    out_dir = tmp_path / "out"
    yield str(config_path), str(out_dir)


def _run(command, run_dir, *extra):
    config_path, out_dir = run_dir
    return main([command, "--config", config_path, "--out", out_dir, *extra])


def test_parse_override():
    assert parse_override("solver.scheme=basic") == (
        ["solver", "scheme"], "basic"
    )
    assert parse_override("dims=[8, 8, 8]") == (["dims"], [8, 8, 8])
    assert parse_override("store_field=false") == (["store_field"], False)
    with pytest.raises(ArgValueError):
        parse_override("dims")
    with pytest.raises(ArgValueError):
        parse_override("=3")


def test_apply_overrides_creates_sections():
    data = {"solver": {"scheme": "basic"}}
    patched = apply_overrides(data, ["solver.max_outer=5", "post.slices=[]"])
    assert patched["solver"] == {"scheme": "basic", "max_outer": 5}
    assert patched["post"] == {"slices": []}
    assert data == {"solver": {"scheme": "basic"}}, "input was mutated"

    with pytest.raises(ConfigInvalid) as exc_info:
        apply_overrides({"seed": 3}, ["seed.value=1"])
    assert exc_info.value.key == "seed"


def test_unknown_keys_are_rejected():
    with pytest.raises(ConfigInvalid) as exc_info:
        load_run_config(overrides=["bogus=1"])
    assert exc_info.value.key == "bogus"

    with pytest.raises(ConfigInvalid) as exc_info:
        load_run_config(overrides=["post.bogus=1"])
    assert exc_info.value.key == "post.bogus"


def test_invalid_values_are_rejected():
    with pytest.raises(ConfigInvalid) as exc_info:
        load_run_config(overrides=[
            "loading.F_bar=[[-1, 0, 0], [0, 1, 0], [0, 0, 1]]"
        ])
    assert exc_info.value.key == "loading.F_bar"

    with pytest.raises(ConfigInvalid):
        load_run_config(overrides=["normals.method=centroid"])
    with pytest.raises(ConfigInvalid):
        load_run_config(overrides=["dims=[16, 0, 16]"])
    with pytest.raises(ConfigInvalid):
        load_run_config(overrides=["bench.variants=[\"nearest\"]"])


def test_bench_factors():
    config = load_run_config(overrides=["bench.factors=[8, [16, 8, 4]]"])
    assert config.bench.factors == ((8, 8, 8), (16, 8, 4))
    with pytest.raises(ConfigInvalid):
        load_run_config(overrides=["bench.factors=[[4, 0, 4]]"])


def test_command_line_options_win(tmp_path):
    config_path = tmp_path / "run.json"
    with open(config_path, "w") as stream:
        json.dump({"seed": 3, "threads": 2, "out": "elsewhere"}, stream)
    config = load_run_config(
        str(config_path), ["seed=5"], out=str(tmp_path), threads=4
    )
    assert config.seed == 5
    assert config.threads == 4
    assert config.out == str(tmp_path)
    assert config.solver_config().workers == 4


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigInvalid) as exc_info:
        load_run_config(str(tmp_path / "missing.json"))
    assert exc_info.value.key == "--config"


def test_config_echo_round_trip(run_dir):
    assert _run("generate", run_dir) == 0
    _, out_dir = run_dir
    echoed = _read_json(os.path.join(out_dir, "config.json"))
    config = RunConfig.from_dict(echoed)
    assert config.to_dict() == echoed
    assert config.dims == (16, 16, 16)
    assert config.geometry == SMALL_RUN["geometry"]


def test_coarsen_prints_composite_count(run_dir, capsys):
    assert _run("generate", run_dir) == 0
    assert _run("coarsen", run_dir) == 0
    _, out_dir = run_dir
    grid = load_grid(os.path.join(out_dir, "grid.json"))
    output = capsys.readouterr().out
    assert f">>> composite boxels: {grid.composite_count}" in output
    assert grid.composite_count > 0

    report = _read_json(os.path.join(out_dir, "volume_fractions.json"))
    assert report["composite_share"] > 0.0


def test_missing_upstream_writes_error(run_dir, capsys):
    assert _run("solve", run_dir) == 1
    _, out_dir = run_dir
    error = _read_json(os.path.join(out_dir, "error.json"))
    assert error["error"] == "UpstreamArtifactMissing"
    assert error["command"] == "solve"
    assert "coarsen" in error["message"]
    assert "Usage: combo solve [OPTIONS]" in capsys.readouterr().out


def test_invalid_override_uses_usage_format(run_dir, capsys):
    assert _run("generate", run_dir, "--override", "dims") == 1
    output = capsys.readouterr().out
    assert "Error: Invalid value for '--override'" in output
    assert "Try 'combo generate --help' for help." in output


def test_homogeneous_solve(run_dir):
    material = {"model": "neo_hookean", "E": 10.0, "nu": 0.3}
    materials = json.dumps({"plus": material, "minus": material})
    overrides = ("--override", f"materials={materials}")
    for command in ("generate", "coarsen", "normals", "solve"):
        assert _run(command, run_dir, *overrides) == 0, command

    _, out_dir = run_dir
    bundle = _read_json(os.path.join(out_dir, "result.json"))
    F_bar = np.array(SMALL_RUN["loading"]["F_bar"])
    expected = NeoHookeanLaw(NeoHookeanParams(E=10.0, nu=0.3)).stress(F_bar)
    P_bar = np.array(bundle["result"]["P_bar"])
    assert np.allclose(P_bar, expected, atol=1e-10), (
        f"homogeneous stress {P_bar} differs from {expected}"
    )
    assert bundle["convergence"]["outer_iterations"] == 1
    assert bundle["metadata"]["composite_boxels"] > 0


def test_pipeline(run_dir):
    oracle = "normals.oracle={\"type\": \"sphere\"}"
    for command in STAGES:
        assert _run(command, run_dir, "--override", oracle) == 0, command

    _, out_dir = run_dir
    normals_report = _read_json(os.path.join(out_dir, "normals_report.json"))
    assert normals_report["colinearity"]["mean"] > 0.8

    bundle = _read_json(os.path.join(out_dir, "result.json"))
    assert "wall_time" not in json.dumps(bundle["convergence"])
    assert bundle["timings"]["total"] >= 0.0

    tractions = load_table(
        os.path.join(out_dir, "post", "tractions.csv"), TRACTION_COLUMNS
    )
    assert len(tractions) > 0

    averages = _read_json(os.path.join(out_dir, "post", "averages.json"))
    assert averages["max_recovery_iterations"] <= 1
    assert np.allclose(averages["P_bar"], bundle["result"]["P_bar"])
    recombined = (
        averages["c_plus"] * np.array(averages["P_plus"])
        + averages["c_minus"] * np.array(averages["P_minus"])
    )
    assert np.allclose(recombined, averages["P_bar"], atol=1e-10)


def test_solve_reports_are_reproducible(run_dir):
    for command in ("generate", "coarsen", "normals", "solve"):
        assert _run(command, run_dir) == 0, command
    _, out_dir = run_dir
    result_path = os.path.join(out_dir, "result.json")
    first = _read_json(result_path)
    assert _run("solve", run_dir) == 0
    second = _read_json(result_path)
    first.pop("timings")
    second.pop("timings")
    assert first == second


def test_bench(printer, run_dir):
    overrides = (
        "--override", "bench.fine=16",
        "--override", "bench.factors=[4]",
        "--override", "bench.variants=[\"second_moment\", \"majority\"]",
    )
    assert _run("bench", run_dir, "--suite", "sphere-desk", *overrides) == 0

    _, out_dir = run_dir
    table = load_table(os.path.join(out_dir, "bench.csv"))
    printer(table.to_string())
    assert list(table["variant"]) == [
        "reference", "second_moment", "majority"
    ]
    errors = table["error"].tolist()
    assert np.isnan(errors[0]), "reference has no error"
    assert all(0.0 <= value < 0.5 for value in errors[1:])


def test_bench_unknown_suite(run_dir):
    assert _run("bench", run_dir, "--suite", "cube-desk") == 1
    _, out_dir = run_dir
    error = _read_json(os.path.join(out_dir, "error.json"))
    assert error["error"] == "ConfigInvalid"
    assert "bench.suite" in error["message"]
