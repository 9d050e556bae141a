from fractions import Fraction

import numpy as np
import pytest

from conftest import rel_close
from pinchtrace.cha import (
    cha_exact_values,
    cha_ordering_check,
    cha_pair,
    cha_pinched_matrix,
    cha_ratio_scan,
    crossover,
    pinched_in_eigenbasis,
)
from pinchtrace.numeric import ContractViolation, psd_check, spectral_decompose
from pinchtrace.pinching import pinched_average
from pinchtrace.words import clustered_trace, word_average_from_polynomial

XS = [Fraction(1, 10), Fraction(1, 100), Fraction(1, 1000), Fraction(1), Fraction(2)]


@pytest.mark.parametrize("x", XS + [Fraction(3, 7)])
def test_pair_structure(x):
    inst = cha_pair(x)
    assert inst.spectral.eigenvalues == tuple(sorted({Fraction(1), 2 * x, Fraction(0)}, reverse=True))
    assert np.all(inst.spectral.reconstruct() == inst.A)
    assert spectral_decompose(inst.B).eigenvalues == tuple(sorted({Fraction(0), 2 * x, Fraction(1)}, reverse=True))
    assert psd_check(inst.A) and psd_check(inst.B)


def test_pair_rejects_nonpositive():
    for bad in (0, -1, "-1/2", -0.5):
        with pytest.raises(ContractViolation):
            cha_pair(bad)


def test_mode_inference():
    assert cha_pair("1/1000").exact and cha_pair(3).exact
    assert not cha_pair(1e-3).exact


def test_closed_form_numbers():
    p, c, a = cha_exact_values(1e-3)
    assert rel_close(p, 2.0050100100e-15, 1e-9)
    assert rel_close(c, 3.2000000000e-14, 1e-9)
    assert rel_close(a, 5.0981572499e-14, 1e-9)
    assert cha_exact_values(1)[0] == 33


@pytest.mark.parametrize("x", XS)
def test_closed_forms_match_generic_engines(x):
    inst = cha_pair(x)
    p, c, a = cha_exact_values(x)
    assert pinched_average(inst.spectral, inst.B, 5, 5) == p
    assert clustered_trace(inst.A, inst.B, 5, 5) == c
    assert word_average_from_polynomial(inst.A, inst.B, 5, 5) == a


def test_float_matches_exact():
    f, e = cha_pair(1e-3), cha_pair(Fraction(1, 1000))
    for fv, ev in [
        (word_average_from_polynomial(f.A, f.B, 5, 5), word_average_from_polynomial(e.A, e.B, 5, 5)),
        (clustered_trace(f.A, f.B, 5, 5), clustered_trace(e.A, e.B, 5, 5)),
        (pinched_average(f.spectral, f.B, 5, 5), pinched_average(e.spectral, e.B, 5, 5)),
    ]:
        assert rel_close(fv, float(ev), 1e-9)


def test_pinched_matrix():
    x = Fraction(1, 7)
    M = cha_pinched_matrix(x)
    assert np.all(M == pinched_in_eigenbasis(cha_pair(x)))
    assert sum(M[i, i] for i in range(3)) == 1 + 2 * x
    e = cha_pair(Fraction(1, 1000))
    D = cha_pinched_matrix(Fraction(1, 1000))
    assert rel_close(float(sum(lam**5 * D[i, i] ** 5 for i, lam in enumerate(e.spectral.eigenvalues))),
                     2.0050100100e-15, 1e-9)


def test_ordering():
    for x in ("1/1000", "1/10000"):
        assert all(cha_ordering_check(x).checks.values())
    rep = cha_ordering_check(1)
    assert rep.checks["clustered<average"] is False
    assert rep.clustered_violated is False


def test_ratio_scan():
    rows = cha_ratio_scan([1e-2, 1e-3, 1e-4, 1e-5, 1e-6])
    ratios = [r[1] for r in rows]
    assert all(b > a for a, b in zip(ratios, ratios[1:]))
    assert abs(rows[-1][2] - 1) < 0.01
    assert ratios[1] == pytest.approx(5.0981572499 / 3.2000000000, rel=1e-9)
    assert ratios[1] > 1
    with pytest.raises(ContractViolation):
        cha_ratio_scan([])


def test_crossover_brackets_violation_regime():
    xc = crossover()
    assert 1e-3 < xc < 1e-2
    assert cha_ordering_check(Fraction(xc) * Fraction(99, 100)).checks["clustered<average"]
    assert not cha_ordering_check(Fraction(xc) * Fraction(101, 100)).checks["clustered<average"]
