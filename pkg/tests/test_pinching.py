from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import rel_close
from pinchtrace.cha import cha_pair, cha_pinched_matrix, pinched_in_eigenbasis
from pinchtrace.numeric import (
    ContractViolation,
    commuting_pair,
    norm,
    psd_check,
    random_psd,
    spectral_decompose,
)
from pinchtrace.pinching import (
    commutator_norm,
    decompose,
    h_poly,
    noncommutative_gap,
    pinch,
    pinched_average,
    sandwich_check,
    two_b_closed_form,
)
from pinchtrace.words import word_average_enumeration, word_average_from_polynomial


def test_pinch_identity_and_diagonal():
    B = random_psd(3, "isotropic", 1)
    assert np.allclose(pinch(B, spectral_decompose(np.eye(3))), B)
    A = np.diag([3.0, 2.0, 1.0])
    assert np.allclose(pinch(B, spectral_decompose(A)), np.diag(np.diag(B)))


def test_pinch_cha_matches_closed_form():
    inst = cha_pair(Fraction(1, 7))
    assert np.all(pinched_in_eigenbasis(inst) == cha_pinched_matrix(Fraction(1, 7)))
    f = cha_pair(1e-3)
    assert np.allclose(pinched_in_eigenbasis(f), cha_pinched_matrix(1e-3), atol=1e-15)


def test_decompose_parts(float_pair):
    A, B = commuting_pair(3, seed=3)
    dec = decompose(B, spectral_decompose(A))
    assert np.max(np.abs(dec.complement)) < 1e-12
    inst = cha_pair(Fraction(1, 1000))
    dec = decompose(inst.B, inst.spectral)
    assert np.all(dec.pinched + dec.complement == inst.B)
    assert sum(dec.complement[i, i] for i in range(3)) == 0
    assert any(v != 0 for v in dec.complement.flat)
    for P in inst.spectral.projectors:
        assert np.all(P @ dec.complement @ P == 0)


def test_pinched_average_cha():
    f = cha_pair(1e-3)
    assert rel_close(pinched_average(f.spectral, f.B, 5, 5), 2.0050100100e-15, 1e-9)
    x = Fraction(1, 1000)
    e = cha_pair(x)
    assert pinched_average(e.spectral, e.B, 5, 5) == x**5 * (1 + (1 + x) ** 5)


def test_pinched_average_identity_and_m0():
    B = random_psd(3, "isotropic", 2)
    S = spectral_decompose(np.eye(3))
    assert rel_close(pinched_average(S, B, 4, 3), np.trace(B @ B @ B).real, 1e-12)
    A = random_psd(3, "isotropic", 3)
    assert rel_close(pinched_average(spectral_decompose(A), B, 3, 0),
                     np.trace(A @ A @ A).real, 1e-12)


def test_gap_examples():
    A, B = commuting_pair(4, seed=1)
    scale = word_average_from_polynomial(A, B, 3, 3)
    assert abs(noncommutative_gap(A, B, 3, 3)) <= 1e-12 * scale
    f = cha_pair(1e-3)
    gap = noncommutative_gap(f.A, f.B, 5, 5, spectral=f.spectral)
    assert rel_close(gap, 5.0981572499e-14 - 2.0050100100e-15, 1e-9) and gap > 0


def test_h_poly():
    assert h_poly(0, 5.0, 7.0) == 1
    assert h_poly(2, 1, 1) == 3
    assert h_poly(3, 2, 1) == 1 + 2 + 4 + 8
    assert h_poly(4, Fraction(1, 2), Fraction(1, 3)) == sum(
        Fraction(1, 2) ** r * Fraction(1, 3) ** (4 - r) for r in range(5))
    assert h_poly(5, 0, 0) == 0
    with pytest.raises(ContractViolation):
        h_poly(-1, 1, 1)


@pytest.mark.parametrize("seed", range(10))
def test_two_b_closed_form_matches_enumeration(seed, float_pair):
    A, B = float_pair(4, seed, "log-anisotropic" if seed % 2 else "isotropic")
    S = spectral_decompose(A)
    for n in (0, 1, 4, 7):
        avg, gap = two_b_closed_form(S, B, n)
        assert rel_close(avg, word_average_enumeration(A, B, n, 2), 1e-10)
        assert rel_close(gap, noncommutative_gap(A, B, n, 2, spectral=S), 1e-9) or abs(gap) < 1e-14
        assert gap >= -1e-12 * avg


def test_two_b_closed_form_repeated_eigenvalues():
    rng = np.random.default_rng(4)
    Q = np.linalg.qr(rng.standard_normal((4, 4)))[0]
    A = Q @ np.diag([2.0, 2.0, 0.5, 0.5]) @ Q.T
    B = random_psd(4, "isotropic", 11)
    S = spectral_decompose(A)
    assert len(S) == 2
    avg, gap = two_b_closed_form(S, B, 3)
    assert rel_close(avg, word_average_enumeration(A, B, 3, 2), 1e-10)
    assert rel_close(gap, noncommutative_gap(A, B, 3, 2, spectral=S), 1e-9)


def test_two_b_closed_form_edge_cases():
    A = np.diag([3.0, 2.0, 1.0])
    B = np.diag([0.3, 0.5, 0.9])
    avg, gap = two_b_closed_form(spectral_decompose(A), B, 3)
    assert gap == 0
    B = random_psd(3, "isotropic", 5)
    avg, _ = two_b_closed_form(spectral_decompose(A), B, 0)
    assert rel_close(avg, np.trace(B @ B).real, 1e-12)


def test_two_b_closed_form_exact(exact_pair):
    A, B = exact_pair(3, 7)
    S = spectral_decompose(A)
    for n in (0, 2, 5):
        avg, gap = two_b_closed_form(S, B, n)
        assert avg == word_average_enumeration(A, B, n, 2)
        assert gap == noncommutative_gap(A, B, n, 2, spectral=S)


def test_sandwich_commuting_margins_zero():
    A, B = commuting_pair(3, seed=8)
    rep = sandwich_check(A, B, 4)
    assert all(rep.checks.values())
    assert abs(rep.gap) <= 1e-12 * rep.scale and abs(rep.clustered_margin) <= 1e-12 * rep.scale


def test_sandwich_rejects_non_psd():
    with pytest.raises(ContractViolation):
        sandwich_check(np.diag([1.0, -1.0]), np.eye(2), 2)


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 10), st.floats(0, 10), st.integers(0, 12))
def test_scalar_am_gm_core(a, b, n):
    assert 2 / (n + 1) * h_poly(n, a, b) <= (a**n + b**n) * (1 + 1e-12) + 1e-300


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**31), st.sampled_from(["isotropic", "log-anisotropic"]))
def test_pinching_properties_float(dim, seed, profile):
    A, B = random_psd(dim, profile, seed), random_psd(dim, "isotropic", seed + 1)
    S = spectral_decompose(A)
    D = pinch(B, S)
    scale = norm(A) * norm(B) + norm(B)
    assert np.max(np.abs(pinch(D, S) - D)) <= 1e-10 * scale
    assert abs(np.trace(D) - np.trace(B)) <= 1e-10 * scale
    assert psd_check(D, 1e-10)
    assert commutator_norm(A, D) <= 1e-10 * norm(A) * norm(B)
    for m in (1, 2, 3):
        assert rel_close(pinched_average(S, B, 2, m), word_average_from_polynomial(A, D, 2, m), 1e-10)


def test_pinching_properties_exact(exact_pair):
    for seed in range(5):
        A, B = exact_pair(3, seed)
        S = spectral_decompose(A)
        D = pinch(B, S)
        assert np.all(pinch(D, S) == D)
        assert sum(D[i, i] for i in range(3)) == sum(B[i, i] for i in range(3))
        assert psd_check(D)
        assert commutator_norm(A, D) == 0
        assert pinched_average(S, B, 3, 3) == word_average_from_polynomial(A, D, 3, 3)
