import csv
import io
import json
import math

import pytest

from lrtrace import asymptotics
from lrtrace.cli import main, parse_complex, parse_levels
from lrtrace.presets import hyperbolic_lift, lr_example_lift
from lrtrace.skein_trace import trace_lr


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def csv_rows(text):
    return list(csv.DictReader(io.StringIO(text)))


class TestParsing:
    @pytest.mark.parametrize("text,value", [("1,2", 1 + 2j), ("1-2j", 1 - 2j), ("-0.5+3i", -0.5 + 3j), ("2", 2)])
    def test_complex(self, text, value):
        assert parse_complex(text) == value

    def test_levels(self):
        class A:
            n = None
            range = "401:1201:400"
            congruence = None

        assert parse_levels(A) == [401, 801, 1201]


class TestWeights:
    def test_hyperbolic(self, capsys):
        code, out, _ = run(capsys, "weights", "--preset", "hyperbolic")
        assert code == 0
        doc = json.loads(out)
        assert doc["lift"]["l_hat"] == 0
        assert doc["residuals"]["exp"] < 1e-12
        assert doc["residuals"]["periodic"] < 1e-12

    def test_lr_example(self, capsys):
        code, out, _ = run(capsys, "weights", "--preset", "lr-example")
        doc = json.loads(out)
        assert code == 0
        assert (doc["lift"]["l_hat"], doc["lift"]["m_hat"], doc["lift"]["n_hat"]) == (5, -5, 0)

    def test_logs_option(self, capsys):
        code, out, _ = run(capsys, "weights", "--logs=-0.0223073+3.93489j;0.790951+2.38093j;-0.42207+0.752766j",
                           "--word", "LLR")
        assert code == 0
        assert json.loads(out)["lift"]["word"] == "LLR"

    def test_excluded_b0(self, capsys):
        code, _, err = run(capsys, "weights", "--b0=-1,0")
        assert code == 2
        assert "b0" in err

    def test_bad_complex(self, capsys):
        code, _, _ = run(capsys, "weights", "--b0", "abc")
        assert code == 2

    def test_theta_mismatch(self, capsys):
        code, _, _ = run(capsys, "weights", "--preset", "hyperbolic", "--theta", "0.5j")
        assert code == 2


class TestTrace:
    def test_single_level(self, capsys):
        code, out, _ = run(capsys, "trace", "--preset", "hyperbolic", "--n", "101")
        assert code == 0
        (row,) = csv_rows(out)
        expected = trace_lr(hyperbolic_lift(), 101)
        assert float(row["modulus"]) == expected.modulus
        assert abs(float(row["ratio"]) - 1) < 0.02

    def test_range_with_class(self, capsys):
        code, out, _ = run(capsys, "trace", "--preset", "hyperbolic", "--range", "101:901:200", "--class", "1",
                           "--format", "json")
        assert code == 0
        rows = json.loads(out)
        assert [r["n"] for r in rows] == [101, 301, 501, 701, 901]
        assert {r["congruence"] for r in rows} == {1}

    def test_class_filter_rejects_other_class(self, capsys):
        code, _, err = run(capsys, "trace", "--preset", "hyperbolic", "--range", "103:903:200", "--class", "1")
        assert code == 2

    def test_class_needs_step_multiple_of_four(self, capsys):
        code, _, err = run(capsys, "trace", "--preset", "hyperbolic", "--range", "101:901:2", "--class", "1")
        assert code == 2

    def test_empty_range(self, capsys):
        code, _, err = run(capsys, "trace", "--preset", "hyperbolic", "--range", "901:101")
        assert code == 2
        assert "empty" in err

    def test_even_level(self, capsys):
        code, _, _ = run(capsys, "trace", "--preset", "hyperbolic", "--n", "100")
        assert code == 2

    def test_size_cap(self, capsys):
        code, _, err = run(capsys, "trace", "--preset", "hyperbolic", "--n", "9001")
        assert code == 3
        assert "resource guard" in err

    def test_overflow_is_guarded(self, capsys):
        code, _, _ = run(capsys, "trace", "--preset", "hyperbolic", "--n", "5001")
        assert code == 3

    def test_missing_levels(self, capsys):
        code, _, _ = run(capsys, "trace", "--preset", "hyperbolic")
        assert code == 2

    def test_unknown_option_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["trace", "--bogus"])
        assert exc.value.code == 2

    def test_weights_file_round_trip(self, capsys, tmp_path):
        path = tmp_path / "lift.json"
        assert main(["weights", "--preset", "lr-example", "-o", str(path)]) == 0
        code, out, _ = run(capsys, "trace", "--lift", str(path), "--n", "201", "--format", "json")
        assert code == 0
        got = json.loads(out)[0]["log_modulus_over_n"]
        want = trace_lr(lr_example_lift(), 201).log_modulus_over_n
        assert abs(got - want) < 1e-14

    def test_output_is_deterministic(self, capsys):
        argv = ("trace", "--preset", "lr-example", "--range", "101:301:100")
        first = run(capsys, *argv)[1]
        second = run(capsys, *argv)[1]
        assert first == second


class TestConverge:
    def test_json_summary(self, capsys):
        code, out, _ = run(capsys, "converge", "--preset", "hyperbolic", "--range", "401:803:2", "--format", "json")
        assert code == 0
        doc = json.loads(out)
        assert abs(doc["volume_rate"] - asymptotics.volume_rate()) < 1e-15
        assert set(doc["K"]) == {"K1", "K3"}
        assert len(doc["rows"]) == 202
        assert abs(doc["K_predicted"]["K1"] - 0.29885849072268433) < 1e-13
        assert abs(doc["K"]["K1"] / doc["K_predicted"]["K1"] - 1) < 0.01

    def test_csv(self, capsys):
        code, out, _ = run(capsys, "converge", "--preset", "hyperbolic", "--range", "401:1201:400")
        rows = csv_rows(out)
        devs = [abs(float(r["deviation"])) for r in rows]
        assert code == 0
        assert devs[0] > devs[1] > devs[2]


class TestCloud:
    def test_petal_defaults(self, capsys, tmp_path):
        path = tmp_path / "petal.csv"
        code, _, _ = run(capsys, "cloud", "--preset", "petal", "-o", str(path))
        assert code == 0
        rows = csv_rows(path.read_text())
        assert len(rows) == 4001
        assert set(rows[0]) == {"index1", "re", "im"}

    def test_small_sigma_cloud_stdout(self, capsys):
        code, out, _ = run(capsys, "cloud", "--U", "0.3,0.2", "--k-hat", "3", "--n", "5", "--comment")
        assert code == 0
        lines = out.splitlines()
        assert lines[0].startswith("# n=5")
        assert len(lines) == 7

    def test_normalized(self, capsys):
        code, out, _ = run(capsys, "cloud", "--preset", "petal", "--n", "1001", "--normalize")
        mods = [math.hypot(float(r["re"]), float(r["im"])) for r in csv_rows(out)]
        assert code == 0
        assert abs(max(mods) - 1) < 1e-15

    def test_llr_rows(self, capsys):
        code, out, _ = run(capsys, "cloud", "--preset", "llr-example")
        assert code == 0
        assert len(out.splitlines()) == 111 ** 2 + 1

    def test_triple_sum_guard(self, capsys):
        code, _, _ = run(capsys, "cloud", "--preset", "llr-example", "--full", "--n", "303")
        assert code == 3


class TestVerify:
    def test_selected_checks_pass(self, capsys):
        code, out, err = run(capsys, "verify", "--only", "1,dq", "--only", "laplace")
        report = json.loads(out)
        assert code == 0
        assert report["passed"] is True
        assert [c["number"] for c in report["checks"]] == [1, 5, 6, 7, 11]
        assert err.count("[PASS]") == 5

    def test_failure_exits_1(self, capsys, monkeypatch):
        monkeypatch.setattr(asymptotics, "volume_figure_eight", lambda: 2.0)
        code, out, err = run(capsys, "verify", "--only", "volume")
        assert code == 1
        assert json.loads(out)["passed"] is False
        assert "[FAIL]" in err

    def test_nothing_selected(self, capsys):
        code, _, _ = run(capsys, "verify", "--only", "nonexistent")
        assert code == 2
