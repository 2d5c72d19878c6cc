import json
import subprocess
import sys
from pathlib import Path

import pytest

from motint.cli import EXIT_CHECK, EXIT_INTEGRABILITY, EXIT_OK, EXIT_PARSE, main, run_text
from motint.dsl.syntax import ParseError, parse, pretty_print, strip_spans

SCRIPTS = Path(__file__).parents[1] / "scripts"
CORPUS = sorted(SCRIPTS.glob("*.mot"))


def run(text):
    out = []
    code, ev = run_text(text, out=out.append)
    return code, out, ev


def test_let():
    code, out, _ = run("let a = (L-1) + 1;")
    assert code == EXIT_OK and out == ["a = L"]


def test_empty_script():
    assert not parse("").stmts
    assert run("")[0] == EXIT_OK


def test_parse_error_position():
    with pytest.raises(ParseError) as info:
        parse("let a = (L-1 +;")
    assert (info.value.line, info.value.col) == (1, 15)
    assert "';'" in info.value.found
    assert run("let a = (L-1 +;")[0] == EXIT_PARSE


def test_semantic_errors():
    assert run("let a = 1;\nlet a = 2;")[0] == EXIT_PARSE
    code, out, _ = run("let b = zz + 1;")
    assert code == EXIT_PARSE and "unknown name zz" in out[-1]


def test_quantifiers():
    code, out, _ = run("presburger A(x) = exists y: x = 2*y;\n"
                       "presburger B(x) = forall y: y >= x or y < x;")
    assert code == EXIT_OK
    assert out == ["A = x = 0 mod 2", "B = true"]


def test_series_check():
    ok = "mellin M = L^(-i)*[i>=0] over i;\nmellin N = L^(-i)*[i>=0] over i;\ncheck M = N;"
    bad = "mellin M = L^(-i)*[i>=0] over i;\nmellin N = L^(-2*i)*[i>=0] over i;\ncheck M = N;"
    assert run(ok)[0] == EXIT_OK
    assert run(bad)[0] == EXIT_CHECK


@pytest.mark.parametrize("path", CORPUS, ids=lambda p: p.stem)
def test_round_trip(path):
    script = parse(path.read_text())
    again = parse(pretty_print(script))
    assert strip_spans(again) == strip_spans(script)
    assert pretty_print(again) == pretty_print(script)


@pytest.mark.parametrize("name,code", [
    ("ball", EXIT_OK), ("elliptic", EXIT_OK), ("poincare", EXIT_OK),
    ("sums", EXIT_OK), ("nonintegrable", EXIT_INTEGRABILITY),
])
def test_exit_codes(name, code):
    assert main(["run", str(SCRIPTS / f"{name}.mot")]) == code


def test_outputs(capsys):
    main(["run", str(SCRIPTS / "elliptic.mot")])
    out = capsys.readouterr().out
    assert "total = [E] * L^-1" in out
    assert "A = ([E] - 3) * L^-1" in out
    main(["run", str(SCRIPTS / "ball.mot")])
    assert "ball = L^-1" in capsys.readouterr().out


def test_nonintegrable_diagnostic(capsys):
    main(["run", str(SCRIPTS / "nonintegrable.mot")])
    out = capsys.readouterr().out
    assert "direction: i=1, j=0" in out
    assert "term: L^(i - j)" in out


def test_failed_check(tmp_path):
    p = tmp_path / "bad.mot"
    p.write_text("let a = L;\ncheck a = L^2;\n")
    assert main(["run", str(p)]) == EXIT_CHECK


def test_oracle_checks():
    for name in ("ball", "elliptic", "poincare", "sums"):
        assert main(["run", str(SCRIPTS / f"{name}.mot"), "--oracle", "q=2,3", "p=5,7"]) == EXIT_OK


def test_json_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for out in (a, b):
        main(["run", str(SCRIPTS / "elliptic.mot"), "--oracle", "p=5,7", "--out", str(out)])
    assert a.read_bytes() == b.read_bytes()
    blob = json.loads(a.read_text())
    assert blob["exit"] == 0
    rows = [r for c in blob["checks"] for r in c["reports"]]
    assert rows and all(r["verdict"] == "match" for r in rows)


def test_console_script():
    res = subprocess.run([sys.executable, "-m", "motint.cli", "run", str(SCRIPTS / "ball.mot")],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "ball4 = L^-1" in res.stdout
