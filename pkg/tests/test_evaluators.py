"""Closed-form terms: rational-times-exponential algebra and limits."""

import numpy as np
import pytest

from whfactor.evaluators import ClosedForm, Term


def test_term_evaluates_rational_times_phase():
    t = Term((1.0, 2.0), (1.0, 1.0), 0.5)
    z = np.array([0.0, 1.0, -3.0 + 0.2j])
    direct = (1.0 + 2.0 * z) / (1.0 + z) * np.exp(0.5j * z)
    assert np.allclose(t(z), direct)


def test_term_defaults():
    t = Term((3.0,))
    assert np.allclose(t(np.array([7.0, -1.0])), 3.0)


def _random_cf(rng, shape=(2, 2)):
    entries = []
    for _ in range(shape[0]):
        row = []
        for _ in range(shape[1]):
            num = tuple(rng.standard_normal(2) + 1j * rng.standard_normal(2))
            row.append((Term(num, (2j, 1.0)), Term((rng.standard_normal(),), (1.0, 0.0, 1.0))))
        entries.append(row)
    return ClosedForm(entries)


def test_closed_form_pointwise_algebra():
    rng = np.random.default_rng(3)
    a = _random_cf(rng)
    b = _random_cf(rng)
    z = rng.standard_normal(5) * 3
    assert np.allclose((a + b)(z), a(z) + b(z))
    assert np.allclose((a - b)(z), a(z) - b(z))
    assert np.allclose((a @ b)(z), a(z) @ b(z))
    assert np.allclose((a * (1 - 2j))(z), (1 - 2j) * a(z))


def test_call_shapes():
    cf = ClosedForm.identity(3)
    assert cf(0.5).shape == (3, 3)
    assert cf(np.zeros((4, 2))).shape == (4, 2, 3, 3)


def test_constant_identity_zeros():
    c = np.array([[1.0, 2.0], [3.0, 4.0]])
    z = np.array([0.0, 5.0])
    assert np.allclose(ClosedForm.constant(c)(z), c)
    assert np.allclose(ClosedForm.identity(2)(z), np.eye(2))
    assert np.allclose(ClosedForm.zeros(2)(z), 0.0)


def test_mobius_power_diag():
    cf = ClosedForm.mobius_power_diag((1, 0))
    x = np.array([0.0, 1.0, -4.0])
    w = (x - 1j) / (x + 1j)
    vals = cf(x)
    assert np.allclose(vals[:, 0, 0], w)
    assert np.allclose(vals[:, 1, 1], 1.0)
    assert np.allclose(vals[:, 0, 1], 0.0)
    neg = ClosedForm.mobius_power_diag((-2,))
    assert np.allclose(neg(x)[:, 0, 0], w**-2)


def test_mobius_scale():
    rng = np.random.default_rng(5)
    a = _random_cf(rng)
    x = np.array([0.3, 2.0, -1.7])
    w = (x - 1j) / (x + 1j)
    scaled = a.mobius_scale(3)
    assert np.allclose(scaled(x), w[:, None, None] ** 3 * a(x))


def test_limit_at_infinity_cases():
    decaying = ClosedForm([[(Term((1.0,), (1j, 1.0)),)]])
    assert np.allclose(decaying.limit_at_infinity(), 0.0)
    ratio = ClosedForm([[(Term((1.0, 2.0), (3.0, 4.0)),)]])
    assert np.allclose(ratio.limit_at_infinity(), 0.5)
    # equal degree with an oscillating phase has no limit
    osc = ClosedForm([[(Term((1.0, 2.0), (3.0, 4.0), 1.0),)]])
    with pytest.raises(ValueError, match=r"\(0,0\)"):
        osc.limit_at_infinity()
    growing = ClosedForm([[(Term((0.0, 1.0)),)]])
    with pytest.raises(ValueError, match="no limit"):
        growing.limit_at_infinity()


def test_limit_sums_terms():
    cf = ClosedForm([[(Term((2.0, 1.0), (1.0, 1.0)), Term((5.0,), (1j, 1.0)))]])
    # 1 from the first term, 0 from the decaying one
    assert np.allclose(cf.limit_at_infinity(), 1.0)


def test_cancelling_terms_merge_to_zero():
    t = Term((1.0, -2.0), (1j, 1.0), 0.25)
    cf = ClosedForm([[(t,)]]) + ClosedForm([[(t.scaled(-1.0),)]])
    z = np.array([0.0, 1.5, -2.0])
    assert np.allclose(cf(z), 0.0)
    assert np.allclose(cf.limit_at_infinity(), 0.0)


def test_has_real_pole():
    assert not ClosedForm([[(Term((1.0,), (1.0, 0.0, 1.0)),)]]).has_real_pole()
    assert ClosedForm([[(Term((1.0,), (-2.0, 1.0)),)]]).has_real_pole()


def test_dict_round_trip():
    rng = np.random.default_rng(9)
    cf = _random_cf(rng)
    back = ClosedForm.from_dict(cf.to_dict())
    z = rng.standard_normal(6) * 2
    assert np.allclose(back(z), cf(z), atol=1e-14)


def test_from_dict_defaults():
    d = {"shape": [1, 1], "entries": [[[{"num": [[2.0, 0.0]]}]]]}
    cf = ClosedForm.from_dict(d)
    assert np.allclose(cf(np.array([0.0, 3.0])), 2.0)


def test_from_dict_rejects_malformed():
    with pytest.raises((ValueError, KeyError, TypeError)):
        ClosedForm.from_dict({"shape": [1, 1], "entries": [[[{"den": [[1.0, 0.0]]}]]]})
    with pytest.raises((ValueError, KeyError, TypeError)):
        ClosedForm.from_dict({"entries": []})
