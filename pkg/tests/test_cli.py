import json
import subprocess
import sys
from pathlib import Path

import pytest

from tangentcert.cli import main
from tangentcert.pipeline import Report, run_problem
from tangentcert.problem import ProblemFileError, load_problem, parse_problem, print_problem

CORPUS = Path(__file__).resolve().parents[1] / "corpus"
EX01 = (CORPUS / "ex01.ineq").read_text()
FILES = sorted(CORPUS.rglob("*.ineq"))


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


# problem files --------------------------------------------------------------


@pytest.mark.parametrize("path", FILES, ids=[p.stem for p in FILES])
def test_problem_print_parse_round_trip(path):
    pf = load_problem(path)
    text = print_problem(pf)
    assert parse_problem(text) == pf
    assert print_problem(parse_problem(text)) == text


@pytest.mark.parametrize("old,new,line,col", [
    ("domain: (0, 1)", "domain: (0, 1", 3, 9),
    ("f: (1-x)/x", "f: (1-x)/x*/", 5, 12),
    ("vars: 3", "vars:   three", 2, 9),
    ("family: line", "family: cubic", 6, 9),
    ("direction: ge", "colour: red", 8, 1),
    ("name: ex01", "name: ex01\nname: again", 2, 1),
])
def test_problem_errors_carry_line_and_column(old, new, line, col):
    with pytest.raises(ProblemFileError) as err:
        parse_problem(EX01.replace(old, new))
    assert (err.value.line, err.value.col) == (line, col)
    assert str(err.value).startswith(f"line {line}, col {col}:")


def test_problem_missing_key_and_counts():
    with pytest.raises(ProblemFileError, match="missing key 'family'"):
        parse_problem(EX01.replace("family: line\n", ""))
    with pytest.raises(ProblemFileError, match="witness needs 3"):
        parse_problem(EX01.replace("witness: 1/3, 1/3, 1/3", "witness: 1/3, 1/3"))
    with pytest.raises(ProblemFileError, match="f lines"):
        parse_problem(EX01.replace("f: ", "f: x\nf: "))


def test_comments_and_blank_lines_ignored():
    text = "# header\n\n" + EX01.replace("vars: 3", "vars: 3\n# a comment")
    assert parse_problem(text) == parse_problem(EX01)


# check ----------------------------------------------------------------------


def test_check_exit_codes(capsys, tmp_path):
    assert run(capsys, "check", CORPUS / "ex01.ineq")[0] == 0
    assert run(capsys, "check", CORPUS / "negative" / "ex01_bound.ineq")[0] == 1
    code, _, err = run(capsys, "check", tmp_path / "missing.ineq")
    assert code == 3 and "input error" in err
    bad = tmp_path / "bad.ineq"
    bad.write_text(EX01.replace("domain: (0, 1)", "domain: (0, 1"))
    code, _, err = run(capsys, "check", bad)
    assert code == 3 and "line 3, col 9" in err
    assert run(capsys, "check")[0] == 3
    assert run(capsys, "frobnicate")[0] == 3


def test_check_unknown_exit_code(capsys, tmp_path):
    # the interval backend cannot cover the unbounded domain of ex05
    p = tmp_path / "u.ineq"
    p.write_text((CORPUS / "ex05.ineq").read_text() + "strategy: interval\n")
    code, out, _ = run(capsys, "check", p, "--json")
    assert code == 2 and json.loads(out)["verdict"] == "unknown"
    assert Report.from_dict(json.loads(out)).exit_code == 2


def test_check_json_is_deterministic(capsys):
    a = run(capsys, "check", CORPUS / "ex05.ineq", "--json")[1]
    b = run(capsys, "check", CORPUS / "ex05.ineq", "--json")[1]
    assert a == b
    d = json.loads(a)
    assert d["verdict"] == "proved" and "timing" not in d


def test_check_text_report(capsys):
    code, out, _ = run(capsys, "check", CORPUS / "ex03.ineq")
    assert code == 0
    assert "ex03: proved" in out and "strict: True" in out


# certificates and replay ----------------------------------------------------


def test_cert_and_replay_flow(capsys, tmp_path):
    cert = tmp_path / "ex02.json"
    assert run(capsys, "check", CORPUS / "ex02.ineq", "--cert", cert)[0] == 0
    bundle = json.loads(cert.read_text())
    assert bundle["format"] == "tangentcert-bundle/1"
    code, out, _ = run(capsys, "replay", cert, CORPUS / "ex02.ineq")
    assert code == 0 and out.startswith("accepted")
    code, out, _ = run(capsys, "replay", cert, CORPUS / "ex03.ineq")
    assert code == 1 and out.startswith("rejected")


def test_replay_input_errors(capsys, tmp_path):
    junk = tmp_path / "junk.json"
    junk.write_text("{not json")
    assert run(capsys, "replay", junk, CORPUS / "ex01.ineq")[0] == 3
    assert run(capsys, "replay", tmp_path / "none.json", CORPUS / "ex01.ineq")[0] == 3
    other = tmp_path / "other.json"
    other.write_text(json.dumps({"format": "something-else"}))
    assert run(capsys, "replay", other, CORPUS / "ex01.ineq")[0] == 1


def test_no_cert_written_for_disproved(capsys, tmp_path):
    cert = tmp_path / "n.json"
    code, _, err = run(capsys, "check", CORPUS / "negative" / "ex02_k.ineq", "--cert", cert)
    assert code == 1 and not cert.exists() and "no certificate" in err


def test_bundles_are_byte_identical_across_runs():
    pf = load_problem(CORPUS / "ex08.ineq")
    _, a = run_problem(pf)
    _, b = run_problem(pf)
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


# corpus and plot ------------------------------------------------------------


def test_corpus_command(capsys):
    code, out, _ = run(capsys, "corpus", CORPUS, "--json")
    d = json.loads(out)
    assert code == 0 and d["all_as_expected"]
    assert len(d["results"]) == len(FILES)
    assert run(capsys, "corpus", CORPUS / "nowhere")[0] == 3


def test_plot_rows(capsys):
    code, out, _ = run(capsys, "plot", CORPUS / "ex01.ineq", "--samples", "5")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "x,f,g"
    assert "0.33333333333333333333,-2.0,-2.0" in lines
    assert run(capsys, "plot", CORPUS / "ex01.ineq", "--samples", "1")[0] == 3


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "tangentcert", "check", str(CORPUS / "ex05.ineq")],
                       capture_output=True, text=True, timeout=120)
    assert r.returncode == 0 and "proved" in r.stdout
