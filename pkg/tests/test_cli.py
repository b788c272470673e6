import csv
import io

import pytest

from varheight.cli import run
from varheight.formats import FormatError, family_to_text, parse_family_text, parse_point_qt

BAD = """\
N: 1
d: 2
forms:
  - - [[1, 1], ["1"]]
  - - [[0, 2], ["1"]]
"""

MALFORMED = """\
N: 1
d: 2
forms:
  - - [[2, 1], ["1"]]
  - - [[0, 2], ["1"]]
"""

# x^2 + t y^2 : x^2 + y^2 has bad reduction at t = 1
BADRED = """\
N: 1
d: 2
forms:
  - - [[2, 0], ["1"]]
    - [[0, 2], ["0", "1"]]
  - - {exponents: [2, 0], coeff: ["1"]}
    - {exponents: [0, 2], coeff: ["1"]}
"""


@pytest.fixture
def write(tmp_path):
    def _write(name, text):
        p = tmp_path / name
        p.write_text(text)
        return str(p)

    return _write


def test_parse_family_round_trip(family_file):
    from varheight.formats import parse_family_file

    f = parse_family_file(family_file)
    assert (f.N, f.d, str(f.resultant)) == (1, 2, "1")
    assert parse_family_text(family_to_text(f)).forms == f.forms


def test_parse_family_errors_carry_position():
    with pytest.raises(FormatError, match=r"<family>:4:\d+: exponent vector \[2, 1\] has degree 3"):
        parse_family_text(MALFORMED)
    with pytest.raises(FormatError, match="missing key 'forms'"):
        parse_family_text("N: 1\nd: 2\n")


def test_parse_point_qt():
    P = parse_point_qt("t/(t+1)")
    assert [str(c) for c in P.coords] == ["t", "t + 1"]
    with pytest.raises(FormatError):
        parse_point_qt("x + 1")


def test_canonical_fiber(family_file, capsys):
    assert run(["canonical", "--fiber", "--family", family_file, "--point", "0", "--t", "1", "--tol", "1e-6"]) == 0
    out = capsys.readouterr().out
    assert "h_hat  [0.2036" in out


def test_canonical_generic(family_file, capsys):
    assert run(["canonical", "--generic", "--family", family_file, "--point", "0", "--tol", "1e-9"]) == 0
    assert "h_hat  [0.4999" in capsys.readouterr().out


def test_preper_search(family_file, capsys):
    assert run(["preper-search", "--family", family_file, "--point", "0", "--cap", "20", "--threads", "1"]) == 0
    out = capsys.readouterr().out
    listed = out.split("<= 20:")[1].split("undecided")[0].split()
    assert listed == ["-2", "-1", "0"]
    assert "height bound" in out


def test_bad_reduction_exit_1(write, capsys):
    path = write("badred.yaml", BADRED)
    assert run(["canonical", "--fiber", "--family", path, "--point", "0", "--t", "1"]) == 1
    assert "bad reduction at t = 1" in capsys.readouterr().err


def test_not_a_morphism_exit_1(write, capsys):
    assert run(["constants", "--family", write("bad.yaml", BAD)]) == 1
    assert "not a morphism family" in capsys.readouterr().err


def test_usage_and_parse_errors_exit_2(write, family_file, capsys):
    assert run(["nonsense"]) == 2
    assert run(["canonical", "--family", family_file, "--point", "0"]) == 2
    assert run(["constants", "--family", write("m.yaml", MALFORMED)]) == 2
    assert ":4:" in capsys.readouterr().err
    assert run(["constants", "--family", "/nonexistent/fam.yaml"]) == 2


def test_point_and_ffpoint(capsys):
    assert run(["point", "--point", "2:4:6"]) == 0
    out = capsys.readouterr().out
    assert "[1 : 2 : 3]" in out and "[1.0986" in out
    assert run(["ffpoint", "--point", "t^2+1 : t", "--t", "1/2"]) == 0
    out = capsys.readouterr().out
    assert "h_geom  2" in out and "[5 : 2]" in out


def test_constants(family_file, capsys):
    assert run(["constants", "--family", family_file, "--point", "0"]) == 0
    out = capsys.readouterr().out
    assert "C3" in out and "C6" in out and "goodred_threshold" in out


def test_preper(family_file, capsys):
    assert run(["preper", "--family", family_file, "--point", "0", "--t", "-2"]) == 0
    assert "preperiodic: yes" in capsys.readouterr().out
    assert run(["preper", "--family", family_file, "--point", "0", "--t", "1", "--per-map"]) == 0
    assert "preperiodic: no" in capsys.readouterr().out


def test_spectral(capsys):
    assert run(["spectral", "--matrix", "15,-4;4,-1"]) == 0
    out = capsys.readouterr().out
    assert "rho    [13.92820323" in out and "hypotheses assumed" in out


def test_sweep_deterministic_across_threads(family_file, tmp_path, capsys):
    a, b = str(tmp_path / "a.csv"), str(tmp_path / "b.csv")
    assert run(["sweep", "--family", family_file, "--point", "0", "--cap", "12", "--threads", "1", "--out", a]) == 0
    assert run(["sweep", "--family", family_file, "--point", "0", "--cap", "12", "--threads", "2", "--out", b]) == 0
    text = open(a).read()
    assert text == open(b).read()
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["t_num", "t_den", "h_t_lo", "h_t_hi", "hhat_lo", "hhat_hi", "pred_lo", "pred_hi", "err_lo", "err_hi"]
    assert all(len(r) == 10 for r in rows)


def test_product_sweep_has_weight_column(family_file, write, capsys):
    cube = write("cube.yaml", "N: 1\nd: 3\nforms:\n  - - [[3, 0], [\"1\"]]\n  - - [[0, 3], [\"1\"]]\n")
    assert run(["sweep", "--family", family_file, "--family", cube, "--point", "0", "--point", "2",
                "--weights", "1,1", "--cap", "3", "--threads", "1"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0].startswith("x,t_num") and out[1].startswith("1;1,")


def test_exponent_fit_from_csv(family_file, tmp_path, capsys):
    path = str(tmp_path / "s.csv")
    assert run(["sweep", "--family", family_file, "--point", "0", "--cap", "30", "--min-height", "1",
                "--threads", "1", "--out", path]) == 0
    assert run(["exponent-fit", "--csv", path]) == 0
    assert capsys.readouterr().out.startswith("slope ")
