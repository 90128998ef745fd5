import csv
import io
import subprocess
import sys

import pytest

from holder_im.cli import main


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


@pytest.fixture
def write(tmp_path):
    def _write(text, name="in.csv"):
        p = tmp_path / name
        p.write_text(text)
        return str(p)
    return _write


class TestFit:
    def test_single_row(self, write, capsys):
        code, out, _ = run(["fit", write("t,y\n0.5,1.0\n")], capsys)
        assert code == 0
        assert out.splitlines()[0] == "t,y,lower,upper"
        (r,) = rows(out)
        assert float(r["lower"]) == pytest.approx(1 - 1.959963984540054, abs=1e-11)
        assert float(r["upper"]) == pytest.approx(1 + 1.959963984540054, abs=1e-11)
        assert r["lower"] == "-0.95996398454"

    def test_duplicate_t(self, write, capsys):
        code, _, err = run(["fit", write("t,y\n0.2,1\n0.3,2\n0.2,3\n")], capsys)
        assert code == 3
        assert "row 4" in err

    def test_no_observed(self, write, capsys):
        code, _, _ = run(["fit", write("t,y\n0.2,\n")], capsys)
        assert code == 3

    @pytest.mark.parametrize("text", ["x,y\n0.1,1\n", "t,y\n0.1,abc\n", "t,y\n0.1,1,2\n", ""])
    def test_malformed(self, write, capsys, text):
        code, _, _ = run(["fit", write(text)], capsys)
        assert code == 2

    def test_missing_file(self, capsys):
        assert run(["fit", "/nonexistent/x.csv"], capsys)[0] == 2

    def test_unobserved_neighbor(self, write, capsys):
        eps = 1e-4
        code, out, _ = run(["fit", write(f"t,y\n0.25,0.0\n{0.25 + eps!r},\n")], capsys)
        assert code == 0
        obs, mis = rows(out)
        assert mis["y"] == ""
        assert float(mis["lower"]) == pytest.approx(float(obs["lower"]) - eps ** 0.5, abs=1e-10)
        assert float(mis["upper"]) == pytest.approx(float(obs["upper"]) + eps ** 0.5, abs=1e-10)

    def test_sorted_output(self, write, capsys):
        _, out, _ = run(["fit", write("t,y\n0.9,1\n0.1,0.5\n0.5,\n")], capsys)
        assert [float(r["t"]) for r in rows(out)] == [0.1, 0.5, 0.9]

    def test_refit_idempotent(self, write, capsys, tmp_path):
        src = "t,y\n0.13,0.37\n0.31,0.2837465128374\n0.55,\n0.72,1.1\n0.93,0.9\n"
        _, first, _ = run(["fit", write(src)], capsys)
        tys = "t,y\n" + "".join(f"{r['t']},{r['y']}\n" for r in rows(first))
        _, second, _ = run(["fit", write(tys, "again.csv")], capsys)
        assert first == second

    def test_output_file(self, write, capsys, tmp_path):
        dest = tmp_path / "out.csv"
        assert run(["fit", write("t,y\n0.5,1\n"), "-o", str(dest)], capsys)[0] == 0
        assert dest.read_text().startswith("t,y,lower,upper\n")

    def test_bad_config(self, write, capsys):
        assert run(["fit", write("t,y\n0.5,1\n"), "--gamma", "2"], capsys)[0] == 3


class TestExperiment:
    def test_two_point(self, capsys):
        code, out, _ = run(["experiment", "two-point", "--trials", "100", "--seed", "1234"], capsys)
        assert code == 0
        data = rows(out)
        assert list(data[0]) == ["trial", "B", "marginal", "mixture", "conservative"]
        assert len(data) == 100
        assert {r["marginal"] for r in data} == {"3.91992796908"}
        assert all(float(r["mixture"]) <= float(r["conservative"]) for r in data)

    def test_n_point(self, capsys):
        code, out, _ = run(["experiment", "n-point", "--n", "3", "--trials", "50"], capsys)
        assert code == 0
        data = rows(out)
        assert list(data[0]) == ["trial", "point", "B_sum", "marginal", "mixture", "cond_1pt",
                                 "cond_all", "covered_mixture"]
        assert len(data) == 150
        for r in data:
            assert float(r["mixture"]) <= min(float(r[k]) for k in ("marginal", "cond_1pt", "cond_all")) + 1e-9
            assert r["covered_mixture"] in ("0", "1")

    def test_alpha_half(self, capsys):
        _, out, _ = run(["experiment", "two-point", "--trials", "5", "--alpha", "0.5"], capsys)
        for r in rows(out):
            assert float(r["marginal"]) == pytest.approx(1.348980, abs=1e-6)

    def test_deterministic(self, capsys):
        a = run(["experiment", "n-point", "--n", "4", "--trials", "10", "--seed", "7"], capsys)[1]
        b = run(["experiment", "n-point", "--n", "4", "--trials", "10", "--seed", "7"], capsys)[1]
        assert a == b

    def test_usage_errors(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["experiment", "three-point"])
        assert exc.value.code == 2
        assert run(["experiment", "two-point", "--n", "3"], capsys)[0] == 3
        assert run(["experiment", "n-point", "--trials", "0"], capsys)[0] == 3


class TestCoverage:
    def test_single_trial(self, capsys):
        code, out, _ = run(["coverage", "--method", "one-point", "--trials", "1"], capsys)
        assert code == 0
        (r,) = rows(out)
        assert r["method"] == "one_point"
        assert float(r["rate"]) in (0.0, 1.0) and float(r["se"]) == 0.0
        assert r["trials"] == "1" and r["alpha"] == "0.05"

    def test_all_methods(self, capsys):
        _, out, _ = run(["coverage", "--trials", "20", "--n", "3"], capsys)
        assert [r["method"] for r in rows(out)] == ["one_point", "marginal", "partial",
                                                   "cond_1pt", "cond_all"]


def test_module_entry_point_byte_identical(tmp_path):
    cmd = [sys.executable, "-m", "holder_im", "experiment", "two-point", "--trials", "20"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True, env={"HOLDER_IM_THREADS": "2",
                                                                    "PATH": ""}).stdout
    assert a == b and a.count(b"\n") == 21
