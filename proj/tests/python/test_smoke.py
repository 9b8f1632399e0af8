from fractions import Fraction
from pathlib import Path

import pytest

import singcount as sc

DATA = Path(__file__).resolve().parents[2] / "data"


def cone():
    return sc.make_scheme("cone", ["x", "y", "z"], ["x*y - z^2"], 2)


def test_count_engines_agree():
    x = cone()
    assert sc.count(x, "mixed:3^1:2") == 99
    assert sc.count(x, "mixed:3^1:2", engine="brute") == 99
    assert sc.count(x, "equal:3^1:2", threads=2) == 99


def test_h_values():
    cusp = sc.load_scheme_file(str(DATA / "cusp.json"))
    assert sc.h(cusp, "mixed:3^1:2") == Fraction(5, 3)
    assert sc.h(cone(), "mixed:5^1:2") == 1 + Fraction(1, 5) - Fraction(1, 25)


def test_large_counts_are_python_ints():
    n = sc.count(sc.affine_space(3), "mixed:7^1:6")
    assert n == 7 ** 18 and isinstance(n, int)


def test_errors():
    with pytest.raises(sc.ParseError):
        sc.make_scheme("bad", ["x"], ["x +"], 0)
    with pytest.raises(sc.DomainError):
        sc.count(cone(), "mixed:4^1:1")
    with pytest.raises(sc.BudgetError):
        sc.count(cone(), "mixed:7^1:4", engine="brute", budget=10)
    assert issubclass(sc.BudgetError, sc.Error)


def test_diagnose():
    rep = sc.diagnose(sc.load_scheme_file(str(DATA / "cusp.json")), [3, 5], 2)
    assert rep["verdict"] == "not-RS"
    assert any(c["h"] == Fraction(5, 3) for c in rep["cells"])


def test_zeta_and_fit():
    x0 = sc.make_scheme("x=0", ["x"], ["x"], 0)
    z = sc.igusa_z_series(x0, 3, 9)
    assert z == [Fraction(2, 3)] * 10
    fit = sc.pade_fit([str(c) for c in z], 3)
    assert fit["stable"] and fit["den"] == [1, -1]
    assert abs(sc.euler_product(sc.affine_space(1), 3.0, 50) - 1.6449) < 0.01


def test_groups():
    assert sc.def_count("S3", 2) == 486
    assert sc.def_count("mixed:3^1:1", 2) == 53376
    assert sc.character_degrees("mixed:5^1:1") == [1, 2, 2, 3, 3, 4, 4, 5, 6]
    probs = sc.word_prob("S3", 2)
    assert sorted(probs, reverse=True) == [Fraction(3, 8), Fraction(5, 16), Fraction(5, 16), 0, 0, 0]
    row = sc.zeta_table(3, [1], 2)[0]
    assert row["frobenius"] == row["character"] == Fraction(139, 36)
    assert sc.rs_threshold("C") == 21


def test_cli():
    code, out, _ = sc.cli(["rs-threshold", "--type", "A"])
    assert (code, out) == (0, "12\n")
    assert sc.cli(["frobnicate"])[0] == 2
