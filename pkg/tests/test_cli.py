import json
import subprocess
import sys
from fractions import Fraction

import pytest

from bunkbed.cli import run

P2 = "3 2\n0 1\n1 2\nT: 1\nnames: u x v\n"
P1 = "2 1\n0 1\nT:\nnames: u v\n"


@pytest.fixture
def p2(tmp_instance):
    return tmp_instance(P2, "p2.g")


@pytest.fixture
def p1(tmp_instance):
    return tmp_instance(P1, "p1.g")


def call(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestCompute:
    def test_prints_fraction(self, capsys, p2):
        code, out, _ = call(capsys, "compute", "--model", "e3", "--graph", p2, "--from", "u", "--to", "v", "--layer", "0")
        assert code == 0 and out.strip() == "1/4"

    def test_decimal_tagged_with_fraction(self, capsys, p2):
        code, out, _ = call(capsys, "compute", "--model", "e3", "--graph", p2, "--from", "u", "--to", "v", "--decimal")
        assert out.strip() == "1/4 (0.25)"

    def test_json(self, capsys, p2):
        code, out, _ = call(capsys, "compute", "--model", "e3", "--graph", p2, "--from", "u", "--to", "v",
                            "--layer", "1", "--format", "json")
        rec = json.loads(out)
        assert rec["schema"] == 1 and rec["value"] == "1/4"
        assert "timing_seconds" not in rec

    def test_timing_is_opt_in(self, capsys, p2):
        _, out, _ = call(capsys, "compute", "--model", "e3", "--graph", p2, "--from", "u", "--to", "v",
                         "--format", "json", "--timing")
        assert "timing_seconds" in json.loads(out)

    def test_joint_targets(self, capsys, p2):
        _, out, _ = call(capsys, "compute", "--model", "e3", "--graph", p2, "--from", "u", "--to", "x",
                         "--joint", "x:1")
        assert out.strip() == "1/2"

    def test_e2_vector_and_e1_on_g(self, capsys, p2, p1):
        _, out, _ = call(capsys, "compute", "--model", "e2", "--pvec", "1/2,1/3", "--graph", p2,
                         "--from", "u", "--to", "v", "--layer", "1")
        assert out.strip() == "1/6"
        _, out, _ = call(capsys, "compute", "--model", "e1", "--p", "1/2", "--on-g", "--graph", p1,
                         "--from", "u", "--to", "v")
        assert out.strip() == "1/2"

    def test_deterministic_output(self, capsys, p2):
        argv = ["compute", "--model", "d3", "--graph", p2, "--from", "u", "--to", "v", "--format", "json"]
        assert call(capsys, *argv)[1] == call(capsys, *argv)[1]


class TestErrors:
    def test_missing_file(self, capsys, tmp_path):
        code, _, err = call(capsys, "compute", "--model", "e3", "--graph", str(tmp_path / "nope.g"),
                            "--from", "0", "--to", "1")
        assert code == 2 and err.startswith("error: cannot read")

    def test_malformed_instance(self, capsys, tmp_instance):
        path = tmp_instance("2 1\n0 0\nT:\n")
        code, _, err = call(capsys, "compute", "--model", "e3", "--graph", path, "--from", "0", "--to", "1")
        assert code == 2 and "line 2:" in err

    def test_unknown_label(self, capsys, p2):
        code, _, err = call(capsys, "compute", "--model", "e3", "--graph", p2, "--from", "w", "--to", "v")
        assert code == 2 and err.count("\n") == 1

    def test_guard_named(self, capsys, tmp_instance):
        n = 10
        text = f"{n} {n - 1}\n" + "".join(f"{i} {i + 1}\n" for i in range(n - 1)) + "T:\n"
        code, _, err = call(capsys, "compute", "--model", "e1", "--p", "1/2", "--graph", tmp_instance(text),
                            "--from", "0", "--to", "9")
        assert code == 2 and "guard" in err

    def test_missing_p(self, capsys, p2):
        code, _, err = call(capsys, "compute", "--model", "e5", "--graph", p2, "--from", "u", "--to", "v")
        assert code == 2 and "--p" in err

    def test_bad_flag_value(self, capsys, p2):
        with pytest.raises(SystemExit) as exc:
            run(["compute", "--model", "e5", "--p", "3/2", "--graph", p2, "--from", "u", "--to", "v"])
        assert exc.value.code == 2

    def test_bad_joint(self, capsys, p2):
        code, _, err = call(capsys, "compute", "--model", "e3", "--graph", p2, "--from", "u", "--to", "v",
                            "--joint", "x")
        assert code == 2 and "VERTEX:LAYER" in err


class TestPolyAverageCritical:
    def test_poly(self, capsys, p1):
        _, out, _ = call(capsys, "poly", "--model", "e5", "--graph", p1, "--from", "u", "--to", "v")
        assert out.strip() == "1*p"

    def test_average(self, capsys, p1):
        _, out, _ = call(capsys, "average", "--graph", p1, "--from", "u", "--to", "v", "--format", "json")
        assert json.loads(out)["polynomial"] == ["1/4", "3/4"]
        _, out, _ = call(capsys, "average", "--graph", p1, "--from", "u", "--to", "v", "--layer", "1", "--p", "1/3")
        assert out.strip() == "1/2"

    def test_critical_interval(self, capsys, p1):
        code, out, _ = call(capsys, "critical", "--graph", p1, "--from", "u", "--to", "v", "--tol", "1e-9",
                            "--format", "json")
        [root] = json.loads(out)["roots"]
        lo, hi = Fraction(root["lo"]), Fraction(root["hi"])
        assert code == 0 and (root["exact"] or lo < Fraction(1, 3) < hi)
        assert hi - lo <= Fraction(1, 10 ** 9)
        assert (root["sign_left"], root["sign_right"]) == ("-", "+")

    def test_critical_text(self, capsys, p2):
        _, out, _ = call(capsys, "critical", "--graph", p2, "--from", "u", "--to", "v")
        assert "~ 0.4574271" in out and "unique -/+ crossing: yes" in out

    def test_critical_bad_tol(self, capsys, p1):
        code, _, _ = call(capsys, "critical", "--graph", p1, "--from", "u", "--to", "v", "--tol", "0")
        assert code == 2


class TestEstimate:
    def test_byte_identical_and_jobs(self, capsys, p2):
        argv = ["estimate", "--model", "e3", "--graph", p2, "--from", "u", "--to", "v",
                "--samples", "20000", "--seed", "3", "--format", "json"]
        a = call(capsys, *argv)[1]
        assert a == call(capsys, *argv)[1] == call(capsys, *argv, "--jobs", "2")[1]
        rec = json.loads(a)
        assert abs(rec["estimate"] - 0.25) <= 5 * rec["stderr"]

    def test_bad_samples(self, capsys, p2):
        code, _, _ = call(capsys, "estimate", "--model", "e3", "--graph", p2, "--from", "u", "--to", "v",
                          "--samples", "0")
        assert code == 2


class TestReduce:
    def test_all_sites(self, capsys, p2, tmp_instance):
        # the middle vertex is transversal, so nothing applies on the path
        code, out, _ = call(capsys, "reduce", "--graph", p2, "--op", "all", "--from", "u", "--to", "v")
        assert code == 0 and out.strip() == "no applicable site"
        tri = tmp_instance("3 3\n0 1\n1 2\n0 2\nT:\n")
        code, out, _ = call(capsys, "reduce", "--graph", tri, "--op", "all", "--from", "0", "--to", "1")
        assert code == 0 and "delta_reduce" in out and "VIOLATION" not in out

    def test_v2(self, capsys, tmp_instance):
        path = tmp_instance("3 2\n0 1\n1 2\nT:\nnames: u x v\n")
        code, out, _ = call(capsys, "reduce", "--graph", path, "--op", "v2", "--site", "1", "--from", "u", "--to", "v",
                            "--format", "json")
        rec = json.loads(out)
        assert code == 0 and rec["ok"] and rec["steps"][0]["op"] == "v2_reduce"

    def test_e2_condition(self, capsys, p2):
        code, out, _ = call(capsys, "reduce", "--graph", p2, "--op", "e2_condition", "--site", "0",
                            "--pvec", "1/3,1/2", "--from", "u", "--to", "v")
        assert code == 0 and "weights 1/9, 4/9, 4/9: verified" in out

    def test_precondition_error(self, capsys, p2):
        code, _, err = call(capsys, "reduce", "--graph", p2, "--op", "v2", "--site", "1", "--from", "u", "--to", "v")
        assert code == 2 and "transversal" in err

    def test_wrong_arity(self, capsys, p2):
        code, _, err = call(capsys, "reduce", "--graph", p2, "--op", "delta", "--site", "0", "--from", "u", "--to", "v")
        assert code == 2 and "3 site" in err


class TestScanAndSearch:
    def test_scan_clean(self, capsys):
        code, out, _ = call(capsys, "scan", "--model", "e3", "--max-vertices", "3", "--format", "json")
        rec = json.loads(out)
        assert code == 0 and rec["min_margin"] == "0/1" and rec["schema"] == 1

    def test_scan_finding_exits_one(self, capsys):
        code, out, _ = call(capsys, "scan", "--model", "e3", "--max-vertices", "3", "--anticorrelated")
        assert code == 1 and "min margin -1/2" in out and "VIOLATIONS" in out

    def test_disagreement_search_json(self, capsys):
        code, out, _ = call(capsys, "find-figure2", "--format", "json")
        rec = json.loads(out)
        assert code == 0 and rec["schema"] == 1
        assert any(r["d3"] == "13/16" and r["e3"] == "7/8" for r in rec["instances"])


class TestVerifyLemmas:
    def test_tiny_corpus(self, capsys, p1, p2):
        code, out, _ = call(capsys, "verify-lemmas", "--graph", p1, "--graph", p2, "--format", "json")
        rec = json.loads(out)
        assert code == 0 and rec["ok"]
        rows = {r["check"]: r for r in rec["rows"]}
        control = [r for r in rec["rows"] if r["expected"] == "fail"]
        assert len(control) == 1 and control[0]["status"] == "fail"
        assert all(r["status"] == "pass" for r in rows.values() if r["expected"] == "pass")

    def test_with_disagreement_instance(self, capsys, p2):
        code, out, _ = call(capsys, "verify-lemmas", "--graph", p2, "--figure2")
        assert code == 0 and "13/16" in out and "7/8" in out


def test_module_entry_point(tmp_instance):
    path = tmp_instance(P2)
    res = subprocess.run([sys.executable, "-m", "bunkbed", "compute", "--model", "e3", "--graph", path,
                          "--from", "u", "--to", "v"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.strip() == "1/4"
