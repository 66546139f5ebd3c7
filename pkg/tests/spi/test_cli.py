import json

import pandas as pd
import pytest

from spi import presets
from spi.main import create_parser, main
from spi.schemas import BlockModelParams, PipelineOptions, SolverConfig
from spi.schemas.sweep import CSV_COLUMNS
from spi.services import InstanceService, PipelineService, SolverService
from tests.shared.utils.checks import assert_exit_ok


def _run(*argv):
    return main([str(arg) for arg in argv])


@pytest.fixture
def sbm_file(tmp_path):
    path = tmp_path / "graph.jsonl"
    assert_exit_ok(_run("gen-sbm", "--n1", 200, "--n2", 200, "--delta", 1.8, "--p", 0.4,
                        "--seed", 4, "--output", path, "--quiet"))
    return path


@pytest.fixture
def xor_file(tmp_path):
    """无噪 2-XOR, n = 100, m = 60000"""
    path = tmp_path / "xor.jsonl"
    assert_exit_ok(_run("gen-csp", "--n", 100, "--m", 60_000, "--preset", "noisy-xor", "--k", 2,
                        "--eta", 1.0, "--seed", 2, "--output", path, "--quiet"))
    return path


def test_gen_sbm_is_reproducible(tmp_path, sbm_file):
    again = tmp_path / "again.jsonl"
    assert_exit_ok(_run("gen-sbm", "--n1", 200, "--n2", 200, "--delta", 1.8, "--p", 0.4,
                        "--seed", 4, "--output", again, "--quiet"))
    assert sbm_file.read_bytes() == again.read_bytes()


@pytest.fixture
def small_inputs(tmp_path):
    """每种实例文件各一个小样本, 供确定性测试使用"""
    paths = {"sbm": tmp_path / "in-sbm.jsonl", "csp": tmp_path / "in-csp.jsonl", "prg": tmp_path / "in-prg.jsonl"}
    assert_exit_ok(_run("gen-sbm", "--n1", 80, "--n2", 80, "--delta", 1.8, "--p", 0.4,
                        "--seed", 6, "--output", paths["sbm"], "--quiet"))
    assert_exit_ok(_run("gen-csp", "--n", 40, "--m", 8000, "--preset", "noisy-xor", "--k", 2,
                        "--eta", 1.0, "--seed", 6, "--output", paths["csp"], "--quiet"))
    assert_exit_ok(_run("gen-goldreich", "--n", 40, "--m", 2000, "--predicate", "majority",
                        "--predicate-k", 3, "--seed", 6, "--output", paths["prg"], "--quiet"))
    sweep = tmp_path / "in-sweep.toml"
    sweep.write_text('family = "sbm"\nn1 = 60\nn2 = 60\ndelta = 1.9\nmultipliers = [2.0]\ntrials = 2\n')
    paths["sweep"] = sweep
    return paths


DETERMINISM_CASES = [
    ["gen-sbm", "--n1", 50, "--n2", 70, "--delta", 1.6, "--multiplier", 3, "--seed", 8],
    ["gen-csp", "--n", 30, "--m", 500, "--preset", "sat", "--k", 3, "--seed", 8],
    ["gen-csp", "--n", 30, "--m", 500, "--preset", "noisy-xor", "--k", 3, "--eta", 0.6, "--seed", 8],
    ["gen-goldreich", "--n", 30, "--m", 400, "--predicate", "random", "--predicate-k", 4, "--seed", 8],
    ["analyze-q", "--preset", "sat", "--k", 3],
    ["analyze-q", "--predicate", "majority", "--predicate-k", 5],
    ["reduce", "{csp}", "--thinning", "poisson", "--seed", 8],
    ["reduce", "{csp}", "--restriction", "random", "--seed", 8],
    ["solve", "{sbm}", "--T", 10, "--seed", 8],
    ["solve", "{sbm}", "--T", 10, "--mode", "dense_reference", "--seed", 8],
    ["solve", "{sbm}", "--baseline", "--iterations", 10, "--seed", 8],
    ["solve-csp", "{csp}", "--T-factor", 2, "--seed", 8],
    ["solve-goldreich", "{prg}", "--seed", 8],
    ["sweep", "{sweep}", "--no-timing", "--seed", 8],
]


@pytest.mark.parametrize("argv", DETERMINISM_CASES)
def test_every_command_is_byte_deterministic(tmp_path, small_inputs, argv):
    """同样的参数与种子运行两次, 输出字节相同"""
    argv = [str(arg).format(**small_inputs) for arg in argv]
    outputs, codes = [], []
    for name in ("first", "second"):
        out = tmp_path / f"{name}.out"
        codes.append(_run(*argv, "--output", out, "--quiet"))
        outputs.append(out.read_bytes())
    assert codes[0] == codes[1]
    assert codes[0] in (0, 2)
    assert outputs[0] == outputs[1]


def test_solve_from_file_matches_in_memory(tmp_path, sbm_file):
    out = tmp_path / "result.json"
    assert_exit_ok(_run("solve", sbm_file, "--T", 10, "--seed", 1, "--output", out, "--quiet"))
    from_file = json.loads(out.read_text())

    graph, truth = InstanceService.sample_bipartite_block(BlockModelParams(n1=200, n2=200, delta=1.8, p=0.4, seed=4))
    in_memory = SolverService.spi_solve(graph, SolverConfig(T=10, seed=1, p_override=0.4), truth)
    assert from_file == json.loads(json.dumps(in_memory.to_json()))


def test_solve_csp_from_file_matches_in_memory(tmp_path, xor_file):
    out = tmp_path / "solution.json"
    assert_exit_ok(_run("solve-csp", xor_file, "--T-factor", 2, "--seed", 1, "--output", out, "--quiet"))
    from_file = json.loads(out.read_text())

    Q = presets.noisy_xor(2, 1.0)
    instance = InstanceService.sample_planted_csp(Q, n=100, m=60_000, seed=2)
    options = PipelineOptions(solver=SolverConfig(T_factor=2.0, seed=1), seed=1)
    assignment, report = PipelineService.solve_csp_end_to_end(instance, Q, options)
    assert from_file["assignment"] == [int(v) for v in assignment]
    assert {key: from_file[key] for key in report.to_json()} == json.loads(json.dumps(report.to_json()))


def test_gen_sbm_from_multiplier(tmp_path):
    path = tmp_path / "graph.jsonl"
    assert_exit_ok(_run("gen-sbm", "--n1", 100, "--n2", 100, "--delta", 1.5, "--multiplier", 2,
                        "--no-truth", "--output", path, "--quiet"))
    header = json.loads(path.read_text().splitlines()[0])
    assert header["p"] == pytest.approx(2 * 4.605170185988092 / (0.25 * 100))
    assert "truth_u" not in path.read_text().splitlines()[1]


def test_solve_sbm(tmp_path, sbm_file):
    out = tmp_path / "result.json"
    assert_exit_ok(_run("solve", sbm_file, "--T", 10, "--seed", 1, "--output", out, "--quiet"))
    result = json.loads(out.read_text())
    assert result["status"] == "ok"
    assert result["T"] == 10
    assert len(result["signs"]) == 200
    assert len(result["U_trace"]) == 5
    assert result["overlap"] > 0.9


def test_solve_baseline(tmp_path, sbm_file):
    out = tmp_path / "result.json"
    assert_exit_ok(_run("solve", sbm_file, "--baseline", "--iterations", 20, "--output", out, "--quiet"))
    assert json.loads(out.read_text())["iterations"] == 20


def test_solve_csv_output(tmp_path, sbm_file):
    out = tmp_path / "result.csv"
    assert_exit_ok(_run("solve", sbm_file, "--T", 10, "--format", "csv", "--output", out, "--quiet"))
    frame = pd.read_csv(out)
    assert frame.loc[0, "status"] == "ok"
    assert len(json.loads(frame.loc[0, "signs"])) == 200


def test_analyze_uniform(tmp_path):
    out = tmp_path / "q.json"
    assert_exit_ok(_run("analyze-q", "--preset", "uniform", "--k", 3, "--output", out, "--quiet"))
    assert json.loads(out.read_text()) == {"r": "inf", "S": [], "coefficient": 0.0, "delta": 1.0}


def test_analyze_weights(capsys):
    assert_exit_ok(_run("analyze-q", "--weights", "0,1,1,1,1,1,1,1", "--quiet"))
    payload = json.loads(capsys.readouterr().out)
    assert payload["r"] == 1
    assert payload["S"] == [0]
    assert payload["delta"] == pytest.approx(8 / 7)


def test_analyze_predicate(capsys):
    assert_exit_ok(_run("analyze-q", "--predicate", "parity", "--predicate-k", 3, "--quiet"))
    payload = json.loads(capsys.readouterr().out)
    assert payload["r"] == 3
    assert payload["correlation_sign"] == 1


def test_solve_csp_end_to_end(tmp_path, xor_file):
    out = tmp_path / "solution.json"
    assert_exit_ok(_run("solve-csp", xor_file, "--T-factor", 2, "--seed", 1, "--output", out, "--quiet"))
    payload = json.loads(out.read_text())
    assert payload["status"] == "ok"
    assert payload["path"] == "spi"
    assert payload["overlap"] == 1.0
    assert len(payload["assignment"]) == 100


def test_reduce_then_solve(tmp_path, xor_file):
    reduced = tmp_path / "reduced.jsonl"
    out = tmp_path / "result.json"
    assert_exit_ok(_run("reduce", xor_file, "--output", reduced, "--quiet"))
    sidecar = json.loads(reduced.read_text().splitlines()[1])
    assert sidecar["type"] == "reduction"
    assert sidecar["r"] == 2
    assert_exit_ok(_run("solve", reduced, "--T-factor", 2, "--output", out, "--quiet"))
    assert json.loads(out.read_text())["overlap"] > 0.9


def test_uniform_csp_exits_unidentifiable(tmp_path):
    path = tmp_path / "uniform.jsonl"
    out = tmp_path / "solution.json"
    assert_exit_ok(_run("gen-csp", "--n", 20, "--m", 100, "--preset", "uniform", "--k", 3,
                        "--output", path, "--quiet"))
    assert _run("solve-csp", path, "--output", out, "--quiet") == 2
    assert json.loads(out.read_text())["r"] == "inf"


def test_goldreich_commands(tmp_path):
    path = tmp_path / "prg.jsonl"
    out = tmp_path / "solution.json"
    assert_exit_ok(_run("gen-goldreich", "--n", 100, "--m", 10_000, "--predicate", "majority",
                        "--predicate-k", 3, "--seed", 3, "--output", path, "--quiet"))
    assert_exit_ok(_run("solve-goldreich", path, "--output", out, "--quiet"))
    payload = json.loads(out.read_text())
    assert payload["path"] == "majority"
    assert payload["overlap"] == 1.0


def test_sweep_command(tmp_path):
    spec = tmp_path / "sweep.toml"
    spec.write_text('family = "sbm"\nn1 = 100\nn2 = 100\ndelta = 1.9\n'
                    'multipliers = [1.0, 4.0]\ntrials = 2\nT_factor = 2.0\n')
    first, second = tmp_path / "first.csv", tmp_path / "second.csv"
    assert_exit_ok(_run("sweep", spec, "--no-timing", "--output", first, "--quiet"))
    assert_exit_ok(_run("sweep", spec, "--no-timing", "--output", second, "--quiet"))
    assert first.read_bytes() == second.read_bytes()
    assert list(pd.read_csv(first).columns) == CSV_COLUMNS


def test_sweep_json_format(tmp_path):
    spec = tmp_path / "sweep.json"
    spec.write_text(json.dumps({"family": "sbm", "n1": 100, "n2": 100, "delta": 1.9,
                                "multipliers": [2.0], "trials": 1}))
    out = tmp_path / "rows.json"
    assert_exit_ok(_run("sweep", spec, "--format", "json", "--output", out, "--quiet"))
    assert len(json.loads(out.read_text())["rows"]) == 1


USAGE_ERRORS = [
    ["solve"],
    ["gen-sbm", "--n1", "10"],
    ["gen-sbm", "--n1", "10", "--n2", "10", "--delta", "1.5", "--output", "x.jsonl", "--bogus"],
    ["analyze-q", "--preset", "nope"],
    ["frobnicate"],
]


@pytest.mark.parametrize("argv", USAGE_ERRORS)
def test_usage_errors(argv):
    assert main(argv) == 1


def test_gen_sbm_needs_density(tmp_path):
    assert _run("gen-sbm", "--n1", 10, "--n2", 10, "--delta", 1.5, "--output", tmp_path / "g.jsonl") == 1


def test_invalid_parameters_exit_1(tmp_path):
    assert _run("gen-sbm", "--n1", 10, "--n2", 10, "--delta", 1.5, "--p", 0.9,
                "--output", tmp_path / "g.jsonl", "--quiet") == 1


def test_missing_input_exits_3(tmp_path):
    assert _run("solve", tmp_path / "missing.jsonl", "--quiet") == 3


def test_print_config(capsys):
    assert_exit_ok(_run("analyze-q", "--preset", "sat", "--k", 3, "--print-config"))
    config = json.loads(capsys.readouterr().out)
    assert config["settings"]["T_FACTOR"] == 10.0
    assert config["command"]["preset"] == "sat"
    assert config["command"]["command"] == "analyze-q"


def test_version(capsys):
    assert main(["--version"]) == 0
    assert "spi" in capsys.readouterr().out


def test_every_command_is_registered():
    parser = create_parser()
    choices = parser._subparsers._group_actions[0].choices
    assert set(choices) == {
        "gen-sbm", "gen-csp", "gen-goldreich", "analyze-q", "reduce",
        "solve", "solve-csp", "solve-goldreich", "sweep",
    }
