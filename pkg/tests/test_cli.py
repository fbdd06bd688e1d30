import csv
import io
import json
import math

import numpy as np
import pytest

from switched_limits.cli import EXIT_HYPOTHESES, EXIT_INVALID, EXIT_NOT_CONVERGED, EXIT_OK, main, parse_vector
from switched_limits.exceptions import InvalidArgumentError

ROTATION = [[0.0, -1.0], [1.0, 0.0]]
DAMPED = [[-1.0, 0.0], [0.0, -1.0]]
UNSTABLE = {"dimension": 2, "matrices": [DAMPED, [[1.0, 0.0], [0.0, 1.0]]]}


def run(*argv):
    stdout, stderr = io.StringIO(), io.StringIO()
    code = main(list(argv), stdout=stdout, stderr=stderr)
    return code, stdout.getvalue(), stderr.getvalue()


@pytest.fixture
def unstable_file(write_json):
    return write_json("unstable.json", UNSTABLE)


class TestAnalyze:
    def test_json(self, worked_system_file):
        code, out, _ = run("analyze", worked_system_file)
        assert code == EXIT_OK
        report = json.loads(out)
        assert report["lyapunov"]["passed"] is True
        assert report["condition_c"]["component"] == [0, 1, 2]
        assert report["conclusion"]["scope"] == "none"

    def test_text(self, worked_system_file):
        code, out, _ = run("analyze", worked_system_file, "--format", "text")
        assert code == EXIT_OK
        assert out.startswith("Common Lyapunov condition: pass\n")
        assert out.endswith("Conclusion: no certificate applies; the criteria are sufficient only\n")

    def test_hurwitz_pair(self, hurwitz_pair_file):
        code, out, _ = run("analyze", hurwitz_pair_file)
        assert code == EXIT_OK
        assert json.loads(out)["conclusion"]["theorem"] == "Theorem 7"

    def test_hypotheses_not_met(self, unstable_file):
        code, out, _ = run("analyze", unstable_file)
        assert code == EXIT_HYPOTHESES
        report = json.loads(out)
        assert report["lyapunov"]["index"] == 1
        assert report["conclusion"]["scope"] == "hypotheses-not-met"

    def test_malformed_file(self, write_json):
        path = write_json("bad.json", {"dimension": 3, "matrices": [[[1.0, 0.0], [0.0, 1.0]]]})
        code, out, err = run("analyze", path)
        assert code == EXIT_INVALID
        assert out == ""
        assert err.startswith(f"error: {path}: invalid file")
        assert "Matrix 0 has shape 2x2, expected 3x3." in err

    def test_missing_file(self, tmp_path):
        code, _, err = run("analyze", str(tmp_path / "nowhere.json"))
        assert code == EXIT_INVALID
        assert "Cannot read file" in err

    def test_bad_flag_value(self, worked_system_file):
        code, _, err = run("analyze", worked_system_file, "--tol-rank", "2")
        assert code == EXIT_INVALID
        assert "command line" in err
        assert "tol_rank" in err

    def test_unknown_format_is_a_usage_error(self, worked_system_file):
        with pytest.raises(SystemExit):
            run("analyze", worked_system_file, "--format", "xml")


class TestSimulate:
    def test_worked_example(self, worked_system_file, worked_signal_file):
        horizon = 8 * math.pi
        code, out, err = run("simulate", worked_system_file, worked_signal_file, "--x0", "1,1,1",
                             "--horizon", repr(horizon))
        assert code == EXIT_OK
        rows = list(csv.reader(io.StringIO(out)))
        assert rows[0] == ["t", "norm_x", "gram_eig_1", "gram_eig_2", "gram_eig_3", "active_index"]
        assert len(rows) == 1 + round(horizon * 10) + 1
        assert float(rows[-1][0]) == pytest.approx(horizon)
        assert [float(value) for value in rows[-1][2:5]] == pytest.approx([1.0, 0.0, 0.0], abs=1e-6)
        norms = [float(row[1]) for row in rows[1:]]
        assert all(second <= first + 1e-12 for first, second in zip(norms, norms[1:]))
        assert "monotone: yes" in err
        assert "final Gram eigenvalues: 1" in err

    def test_zero_horizon(self, worked_system_file, worked_signal_file):
        code, out, err = run("simulate", worked_system_file, worked_signal_file, "--x0", "1,1,1", "--horizon", "0")
        assert code == EXIT_OK
        rows = list(csv.reader(io.StringIO(out)))
        assert len(rows) == 2
        assert rows[1][:2] == ["0.0", "1.7320508075688772"]
        assert "final norm: 1.7320508075688772" in err

    def test_zero_initial_condition(self, worked_system_file, worked_signal_file):
        code, out, _ = run("simulate", worked_system_file, worked_signal_file, "--x0", "0,0,0", "--horizon", "2")
        assert code == EXIT_OK
        assert {row[1] for row in list(csv.reader(io.StringIO(out)))[1:]} == {"0.0"}

    def test_grid_density(self, worked_system_file, worked_signal_file):
        _, out, _ = run("simulate", worked_system_file, worked_signal_file, "--x0", "1,0,0", "--horizon", "2",
                        "--grid-density", "2")
        assert [row[0] for row in list(csv.reader(io.StringIO(out)))[1:]] == ["0.0", "0.5", "1.0", "1.5", "2.0"]

    def test_original_coordinates(self, write_json, worked_signal_file):
        # P = diag(4, 1, 1): the matrices are P^{-1/2} B P^{1/2} for B of the worked example
        matrices = [
            [[-1.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]],
            [[-1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 0.0]],
            [[-1.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, -1.0]],
        ]
        lyapunov = [[4.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
        path = write_json("scaled.json", {"dimension": 3, "matrices": matrices, "lyapunov": lyapunov})
        code, out, _ = run("simulate", path, worked_signal_file, "--x0", "1,0,0", "--horizon", "0")
        assert code == EXIT_OK
        # norms are measured in normalized coordinates, |P^{1/2} x0| = 2
        assert float(list(csv.reader(io.StringIO(out)))[1][1]) == pytest.approx(2.0)

    @pytest.mark.parametrize("x0", ["1,1", "1,a,1", "1,inf,1"])
    def test_bad_initial_condition(self, worked_system_file, worked_signal_file, x0):
        code, out, err = run("simulate", worked_system_file, worked_signal_file, "--x0", x0)
        assert code == EXIT_INVALID
        assert out == ""
        assert "x0" in err

    def test_lyapunov_failure(self, unstable_file, write_json):
        signal = write_json("constant.json", {"type": "explicit", "times": [0.0], "values": [0]})
        code, out, err = run("simulate", unstable_file, signal, "--x0", "1,1")
        assert code == EXIT_HYPOTHESES
        assert out == ""
        assert "Matrix 1 violates the common Lyapunov condition" in err

    def test_signal_index_out_of_alphabet(self, worked_system_file, write_json):
        signal = write_json("wide.json", {"type": "explicit", "times": [0.0, 1.0], "values": [0, 3]})
        code, _, err = run("simulate", worked_system_file, signal, "--x0", "1,1,1", "--horizon", "2")
        assert code == EXIT_INVALID
        assert "index 3" in err

    def test_signal_declaring_more_indices(self, worked_system_file, write_json):
        signal = write_json("chaotic.json", {"type": "chaotic", "tau": 1.0, "p": 4})
        code, _, err = run("simulate", worked_system_file, signal, "--x0", "1,1,1")
        assert code == EXIT_INVALID
        assert "p = 4" in err

    def test_explicit_signal_shorter_than_horizon(self, worked_system_file, write_json):
        signal = write_json("short.json", {"type": "explicit", "times": [0.0], "values": [0], "horizon": 1.0})
        code, _, err = run("simulate", worked_system_file, signal, "--x0", "1,1,1", "--horizon", "2")
        assert code == EXIT_INVALID
        assert "beyond the signal horizon" in err

    def test_seeded_runs_are_reproducible(self, worked_system_file, write_json):
        signal = write_json(
            "random.json", {"type": "dwell_random", "min_dwell": 0.2, "max_dwell": 1.0, "weights": [1, 1, 1]}
        )
        argv = ("simulate", worked_system_file, signal, "--x0", "1,2,3", "--horizon", "10", "--seed", "9")
        first, second = run(*argv), run(*argv)
        assert first == second
        assert run(*argv[:-1], "10")[1] != first[1]


class TestEstimateSu:
    def test_worked_example(self, worked_system_file, worked_signal_file):
        code, out, _ = run("estimate-su", worked_system_file, worked_signal_file)
        assert code == EXIT_OK
        estimate = json.loads(out)
        assert estimate["converged"] is True
        assert estimate["rank"] == 1
        assert estimate["horizon_used"] == pytest.approx(64.0)
        assert estimate["matrix"] == pytest.approx([[0.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 0.0]], abs=1e-6)

    def test_not_converged(self, worked_system_file, worked_signal_file):
        code, out, _ = run("estimate-su", worked_system_file, worked_signal_file, "--horizon", "1")
        assert code == EXIT_NOT_CONVERGED
        assert json.loads(out)["converged"] is False

    def test_zero_horizon_is_rejected(self, worked_system_file, worked_signal_file):
        code, out, err = run("estimate-su", worked_system_file, worked_signal_file, "--horizon", "0")
        assert code == EXIT_INVALID
        assert out == ""
        assert "error: horizon must be positive" in err

    def test_norm_preserving_start_does_not_stall(self, write_json):
        system = write_json("rotation.json", {"dimension": 2, "matrices": [ROTATION, DAMPED]})
        signal = write_json(
            "slow.json",
            {"type": "periodic", "pattern": [{"index": 0, "duration": 10.0}, {"index": 1, "duration": 10.0}]},
        )
        code, out, _ = run("estimate-su", system, signal, "--horizon", "400")
        assert code == EXIT_OK
        estimate = json.loads(out)
        assert estimate["rank"] == 0
        assert estimate["horizon_used"] == pytest.approx(64.0)

    def test_out_file(self, worked_system_file, worked_signal_file, tmp_path):
        target = tmp_path / "su.json"
        code, out, _ = run("estimate-su", worked_system_file, worked_signal_file, "--out", str(target))
        assert code == EXIT_OK
        assert out == ""
        assert json.loads(target.read_text())["rank"] == 1


class TestCheckSignal:
    def test_periodic(self, worked_signal_file):
        code, out, _ = run("check-signal", worked_signal_file)
        assert code == EXIT_OK
        result = json.loads(out)
        assert result["horizon"] == 100.0
        assert result["chaotic_verdict"] == "non-chaotic"
        assert result["regular_verdict"] == "regular"
        assert result["J_u_estimate"] == [0, 1, 2]

    def test_with_system(self, worked_signal_file, worked_system_file):
        code, out, _ = run("check-signal", worked_signal_file, "--system", worked_system_file, "--horizon", "20")
        assert code == EXIT_OK
        assert json.loads(out)["p"] == 3
        assert json.loads(out)["horizon"] == 20.0

    def test_finite_prefix_uses_its_horizon(self, write_json):
        signal = write_json(
            "prefix.json",
            {"type": "explicit", "times": list(range(10)), "values": [i % 2 for i in range(10)], "horizon": 10.0},
        )
        code, out, _ = run("check-signal", signal)
        assert code == EXIT_OK
        result = json.loads(out)
        assert result["horizon"] == 10.0
        assert result["regular_verdict"] == "undecidable-from-prefix"
        assert result["chaos_scan"] == [0.5] * 20

    def test_average_dwell_needs_p(self, write_json, worked_system_file):
        signal = write_json("average.json", {"type": "average_dwell", "n0": 2, "tau_a": 0.5})
        code, _, err = run("check-signal", signal)
        assert code == EXIT_INVALID
        assert "p:" in err
        assert run("check-signal", signal, "--system", worked_system_file, "--horizon", "20")[0] == EXIT_OK

    def test_index_beyond_system(self, write_json, hurwitz_pair_file):
        signal = write_json("wide.json", {"type": "explicit", "times": [0.0, 1.0], "values": [0, 2]})
        code, _, _ = run("check-signal", signal, "--system", hurwitz_pair_file, "--horizon", "5")
        assert code == EXIT_INVALID


class TestReport:
    def test_worked_example(self, worked_system_file, worked_signal_file):
        code, out, _ = run("report", worked_system_file, worked_signal_file)
        assert code == EXIT_OK
        result = json.loads(out)
        assert result["analysis"]["conclusion"]["scope"] == "none"
        assert result["su_estimate"]["rank"] == 1

    def test_hypotheses_not_met(self, unstable_file, write_json):
        signal = write_json("constant.json", {"type": "explicit", "times": [0.0], "values": [1]})
        code, out, _ = run("report", unstable_file, signal)
        assert code == EXIT_HYPOTHESES
        result = json.loads(out)
        assert result["su_estimate"] is None
        assert result["analysis"]["lyapunov"]["passed"] is False

    def test_not_converged(self, worked_system_file, worked_signal_file):
        code, out, _ = run("report", worked_system_file, worked_signal_file, "--horizon", "1")
        assert code == EXIT_NOT_CONVERGED
        assert json.loads(out)["su_estimate"]["converged"] is False

    def test_output_is_deterministic(self, worked_system_file, worked_signal_file):
        assert run("report", worked_system_file, worked_signal_file) == run(
            "report", worked_system_file, worked_signal_file
        )


def test_parse_vector():
    assert parse_vector("1, 2.5,-3").tolist() == [1.0, 2.5, -3.0]
    with pytest.raises(InvalidArgumentError):
        parse_vector("1,,2")


def test_linear_algebra_failure_exits_with_hypotheses_code(monkeypatch, worked_system_file, caplog):
    def fail(*args, **kwargs):
        raise np.linalg.LinAlgError("SVD did not converge")

    monkeypatch.setattr("switched_limits.cli.build_report", fail)
    code, out, err = run("analyze", worked_system_file)
    assert code == EXIT_HYPOTHESES
    assert out == ""
    assert err.endswith("error: linear algebra routine failed: SVD did not converge\n")
    assert "SVD did not converge" in caplog.text
