import csv
import io
import subprocess
import sys
from fractions import Fraction

import pytest

from fgc.cli import REPORT_COLUMNS, main
from fgc.fixtures import bridged_triangles, star_triangle as star_triangle_instance
from fgc.model import FgcInstance, generate_instance, write_instance


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


@pytest.fixture
def star_triangle(tmp_path):
    path = tmp_path / "star_triangle.fgc"
    write_instance(star_triangle_instance(), path)
    return str(path)


@pytest.fixture
def bridged(tmp_path):
    path = tmp_path / "bridged.fgc"
    write_instance(bridged_triangles(), path)
    return str(path)


def test_exact_star_triangle(star_triangle):
    assert run("exact", "-i", star_triangle) == (0, "2\n")


def test_exact_with_edges(bridged):
    code, text = run("exact", "-i", bridged, "--edges")
    assert code == 0
    assert text.splitlines() == ["17", "edges 0 1 2 3 6 7 8"]


@pytest.mark.parametrize("algo", ["a", "b", "c", "hybrid"])
def test_solve_reports_feasible_edges(bridged, algo, tmp_path):
    code, text = run("solve", "-i", bridged, "--algo", algo, "--two-ecss", "exact", "--wtap", "exact")
    assert code == 0
    edges = [l for l in text.splitlines() if l.startswith("edges ")][0]
    sol = tmp_path / "out.sol"
    sol.write_text(edges[len("edges "):] + "\n")
    weight = [l for l in text.splitlines() if l.startswith("weight ")][0].split()[1]
    assert run("check", "-i", bridged, "-s", str(sol)) == (0, f"feasible weight {weight}\n")


def test_solve_with_alpha(bridged):
    code, text = run("solve", "-i", bridged, "--algo", "b", "--alpha", "1/2")
    assert code == 0 and "weight" in text


def test_check_names_the_unsafe_bridge(tmp_path):
    path = tmp_path / "k2.fgc"
    path.write_text("fgc 2 3 2\n0 1 1 U\n0 1 1 U\n0 1 1 S\n")
    sol = tmp_path / "unsafe_only.sol"
    sol.write_text("0\n")
    code, text = run("check", "-i", str(path), "-s", str(sol))
    assert code == 1
    lines = text.splitlines()
    assert lines[0] == "infeasible"
    assert "[0(0-1,U)]" in lines[1]


def test_check_unknown_edge_is_usage_error(star_triangle, tmp_path):
    sol = tmp_path / "bad.sol"
    sol.write_text("0 99\n")
    assert run("check", "-i", star_triangle, "-s", str(sol))[0] == 2


def test_thresholds(star_triangle):
    code, text = run("thresholds", "-i", star_triangle)
    assert code == 0
    lines = text.splitlines()
    assert lines[0] == "0  0" and lines[-1] == "# pruned "


def test_bijection(star_triangle):
    code, text = run("bijection", "-i", star_triangle, "--alpha", "0", "--target", "3,4,5")
    assert code == 0
    assert text.splitlines()[-1] == "# valid yes monotone yes"


def test_bijection_bad_target(star_triangle):
    code, text = run("bijection", "-i", star_triangle, "--alpha", "0", "--target", "0 1")
    assert code == 1 and text.startswith("target is not a spanning tree")
    assert run("bijection", "-i", star_triangle, "--alpha", "0", "--target", "0 1 2")[0] == 1


def test_bounds_analytic():
    code, text = run("bounds", "--analytic", "--lambda", "2")
    assert code == 0 and text.startswith("analytic 2.5224")


def test_bounds_csv_and_certificate(tmp_path):
    cert = tmp_path / "cert.txt"
    code, text = run("bounds", "--analytic", "--two-algo", "--bounded-lp", "--lambda", "2",
                     "--tau", "2", "--format", "csv", "--certificate", str(cert))
    assert code == 0
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["bound", "lambda", "tau", "value"]
    assert rows[1] == ["analytic", "2", "", "2.52241"]
    assert rows[2] == ["two-algo", "2", "2", "2.8"]
    lines = cert.read_text().splitlines()
    assert lines[-1].startswith("z ") and len(lines) == 2 * 60 + 1


def test_bounds_alpha_file(tmp_path):
    path = tmp_path / "alphas.txt"
    path.write_text("# scaling factors\n0 0.5\n1\n")
    code, text = run("bounds", "--bounded-lp", "--alphas", str(path), "--lambda", "2", "--tau", "3/2")
    assert code == 0 and text.startswith("bounded-lp ")


def test_bounds_regular_list():
    code, text = run("bounds", "--bounded-lp")
    assert code == 0 and text.startswith("bounded-lp 2.4035")


def test_bounds_needs_a_choice():
    assert run("bounds")[0] == 2


def test_generate_roundtrip(tmp_path):
    path = tmp_path / "g.fgc"
    code, _ = run("generate", "--kind", "random", "--n", "6", "--m", "9", "--weight-bound", "5",
                  "--seed", "4", "-o", str(path))
    assert code == 0
    text = path.read_text()
    assert FgcInstance.from_text(text).to_text() == text
    assert text == generate_instance("random", 6, 9, 5, Fraction(1, 2), 4).to_text()
    code, stdout = run("generate", "--n", "6", "--m", "9", "--weight-bound", "5", "--seed", "4")
    assert stdout == text


def test_lp_export(star_triangle, tmp_path):
    out = tmp_path / "star_triangle.lp"
    assert run("lp-export", "-i", star_triangle, "-o", str(out))[0] == 0
    body = out.read_text()
    assert "Minimize" in body and body.rstrip().endswith("End")


def test_report(tmp_path):
    for seed in range(3):
        write_instance(generate_instance("random", 5, 8, 5, Fraction(1, 2), seed), tmp_path / f"i{seed}.fgc")
    code, text = run("report", "-i", str(tmp_path))
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(text)))
    assert list(rows[0]) == REPORT_COLUMNS and len(rows) == 3
    for r in rows:
        opt, best = Fraction(r["opt"]), Fraction(r["hybrid"])
        assert opt <= best <= min(Fraction(r["A"]), Fraction(r["bestB"]), Fraction(r["bestC"]))
        assert float(r["ratio"]) == pytest.approx(float(best / opt), rel=1e-5)


@pytest.mark.parametrize("argv", [[], ["frobnicate"], ["exact"], ["exact", "-i", "x", "--bogus"],
                                  ["solve", "-i", "x", "--alpha", "abc"]])
def test_usage_errors(argv):
    assert run(*argv)[0] == 2


def test_missing_file_and_malformed(tmp_path):
    assert run("exact", "-i", str(tmp_path / "nope.fgc"))[0] == 2
    bad = tmp_path / "bad.fgc"
    bad.write_text("fgc 2 1 1\n0 1 1 Q\n")
    assert run("exact", "-i", str(bad))[0] == 2


def test_infeasible_instance_exits_one(tmp_path):
    path = tmp_path / "u.fgc"
    path.write_text("fgc 2 1 1\n0 1 1 U\n")
    assert run("solve", "-i", str(path))[0] == 1


def test_module_entry_point(star_triangle):
    res = subprocess.run([sys.executable, "-m", "fgc", "exact", "-i", star_triangle], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout == "2\n"
