import math

import pytest

import infoflow


def test_version():
    assert infoflow.__version__


def test_bond_price_at_start_is_discounted_mean():
    b = infoflow.bond_price([0.3, 1.0], [0.2, 0.8], 0.5, 2.0, 0.04, 0.0, 0.0)
    assert b["price"] == pytest.approx(math.exp(-0.08) * 0.86, rel=1e-14)


def test_posterior_matches_bayes():
    sigma, T, t, xi = 0.7, 2.0, 0.5, 0.3
    w = [p * math.exp(T / (T - t) * (sigma * h * xi - 0.5 * sigma**2 * h**2 * t)) for h, p in ((0.0, 0.4), (1.0, 0.6))]
    post = infoflow.conditional_probs([0.0, 1.0], [0.4, 0.6], sigma, T, t, xi)
    assert post[1] == pytest.approx(w[1] / sum(w), rel=1e-13)


def test_reduction_text():
    assert infoflow.reduction(2)[1] == "Z2 = X1 (z2 X2 + ~z2 ~X2) + ~X1 (z2 X3 + ~z2 ~X3)"


def test_bad_input_raises_value_error():
    with pytest.raises(ValueError):
        infoflow.bond_price([0.0, 1.0], [0.5, 0.6], 1.0, 1.0, 0.0, 0.0, 0.0)
