import math

import numpy as np
import pytest

import cvmw


def test_version():
    assert cvmw.__version__ == "0.1.0"


def test_special_functions():
    assert cvmw.bessel_zero(1.0, 1) == pytest.approx(3.831705970207512, rel=1e-14)
    assert cvmw.bessel_j(0.5, 2.0) == pytest.approx(math.sqrt(2 / (math.pi * 2.0)) * math.sin(2.0), rel=1e-12)
    assert cvmw.laguerre(2, 1.0) == pytest.approx(-0.5)
    with pytest.raises(cvmw.ValidationError):
        cvmw.bessel_j(0.3, 1.0)


def test_coherent_eigenfunction():
    r = np.linspace(0.0, 6.0, 121)
    w = cvmw.model_weights("coherent", r)
    expected = 2 * np.pi * r * np.exp(-r**2 / 2)
    assert np.max(np.abs(w["A"] - expected)) < 1e-12
    out = cvmw.macwilliams_transform(r, w["A"], r, N=1.0, hint="gaussian", hint_param=1.0)
    assert np.max(np.abs(out - expected)) < 1e-6


def test_square_lattice():
    assert cvmw.code_size("square") == pytest.approx(2.0)
    assert cvmw.gkp_distance("square") == pytest.approx(math.sqrt(math.pi), abs=1e-10)
    spectrum = cvmw.length_spectrum("square", 6.0)
    assert spectrum[:3] == [(0.0, 1), pytest.approx((2 * math.sqrt(math.pi), 4)), pytest.approx((math.sqrt(8 * math.pi), 4))]
    assert cvmw.gkp_distance(cvmw.lattice_generator("hexagonal")) > 0
    assert cvmw.poisson_macwilliams_residual("square") <= 1e-8


def test_bounds():
    assert cvmw.levenshtein_bound(1, 1.0) == pytest.approx(7.3409853211, rel=1e-10)
    with pytest.raises(cvmw.ValidityError) as info:
        cvmw.levenshtein_bound(1, 2.0)
    assert info.value.bound == pytest.approx(cvmw.d_plus(1))
    assert isinstance(info.value, cvmw.CvmwError)
    assert cvmw.lemma2_supremum_check(1, cvmw.d_plus(1))["at_origin"]


def test_finite_energy_gkp():
    res = cvmw.approx_qedc_epsilon("square", 0.3, 0.2 * math.sqrt(math.pi))
    assert 0 < res["eps"] < 1
    r = np.linspace(0.0, 1.5, 7)
    w = cvmw.approx_weights("square", 0.3, r)
    assert np.all(w["A"] <= 2 * w["B"] * (1 + 1e-9) + 1e-300)
    with pytest.raises(cvmw.ValidationError):
        cvmw.approx_qedc_epsilon("square", 1e-9, 0.3)
