import math

import numpy as np
import pytest

import qhist


@pytest.fixture(scope="module")
def model():
    return qhist.SpinModelConfig(
        v=[0.6, 0.48, 0.64],
        u=[[0.8, 0.36, 0.48], [0.28, 0.96, 0.0], [0.6, 0.0, -0.8]],
    )


def test_config_basics(model):
    assert model.n == 3
    assert model.dim == 16
    assert abs(model.c(1) - 0.96) < 1e-15
    assert abs(model.c(3) - 0.168) < 1e-15
    with pytest.raises(qhist.ConfigError):
        qhist.SpinModelConfig(v=[1.0, 0.0, 0.0], u=[[2.0, 0.0, 0.0]])


def test_schmidt_axis_and_state(model):
    w, N = qhist.schmidt_axis(model, 1.7)
    assert abs(N - 0.65370375093628896) < 1e-14
    assert abs(np.linalg.norm(w) - 1.0) < 1e-12

    psi = qhist.evolve(model, 1.7)
    assert psi.shape == (16,)
    assert abs(np.vdot(psi, psi).real - 1.0) < 1e-12
    assert abs(psi[0] - (0.71323225922296751 - 0.066059975027051743j)) < 1e-14

    weights = qhist.schmidt_weights(model, 1.7)
    assert abs(weights[0] - 0.5 * (1 + N)) < 1e-12
    assert abs(weights.sum() - 1.0) < 1e-12


def test_probabilities_match_decoherence(model):
    probs = qhist.probabilities(model, between=[1, 2], interior=2.37, final_k=3)
    assert len(probs) == 16
    assert abs(sum(probs) - 1.0) < 1e-12
    assert abs(probs[0] - 0.4246745601383588) < 1e-14

    d = qhist.decoherence(model, [1.0, 2.0, 2.37, 3.0])
    assert d.shape == (16, 16)
    assert np.allclose(np.diag(d).real, probs, atol=1e-12)
    assert abs(np.trace(d).real - 1.0) < 1e-12


def test_offdiag_routes_agree(model):
    general = qhist.offdiag(model, 0.45, 1.62)
    cases = qhist.offdiag_cases(model, 0.45, 1.62)
    assert abs(general - cases) < 1e-13
    assert abs(general - (-0.0053775304999435034 + 0.013770390130810949j)) < 1e-14
    assert qhist.offdiag(model, 1.0, 1.8) == 0.0  # between-time first


def test_classify_pairs(model):
    recs = qhist.classify_pairs(model, grid=8, tol=1e-9)
    assert len(recs) == 325
    assert sum(1 for r in recs if r.consistent) == 94
    tags = {r.case_tag for r in recs}
    assert "adjacent" in tags and "separated" in tags


def test_selection(model):
    res = qhist.select(model)
    assert res.chosen_k == 3
    assert abs(res.information - 1.8320468287410978) < 1e-9
    assert abs(res.information - qhist.closed_form_information(model, 3)) < 1e-9
    closed = qhist.select(model, closed_form=True)
    assert closed.chosen_k == 3

    rep = qhist.check_nonextendable(model, res.chosen_k, res.optimal_t, grid=10)
    assert rep.nonextendable


def test_min_entropy_select(model):
    res = qhist.min_entropy_select(model)
    assert res.minimizer.m == 4
    assert res.minimizer.k == 3
    assert res.minimizer.has_final
    assert abs(res.minimizer.s_prime - (-4.2429944171049812)) < 1e-12
    assert all(t < 0 for t in res.terms)
    assert res.s_second > res.minimizer.s_prime


def test_montecarlo_threads_agree():
    a = qhist.montecarlo(3, 4000, seed=99, threads=1)
    b = qhist.montecarlo(3, 4000, seed=99, threads=2)
    assert a.counts == b.counts
    assert sum(a.counts) == 4000
    assert 0.8 < a.fraction_Sn < 0.9
    assert abs(sum(a.fraction_by_k) - 1.0) < 1e-12


def test_random_config_reproducible():
    a = qhist.random_config(3, seed=17)
    b = qhist.random_config(3, seed=17)
    assert np.allclose(a.v, b.v, atol=0)
    assert a.n == 3
    assert abs(np.linalg.norm(a.v) - 1.0) < 1e-12


def test_f_info():
    assert abs(qhist.f_info(0.0) - math.log(2.0)) < 1e-15
    assert qhist.f_info(1.0) == 0.0
    assert qhist.f_info(-0.3) == qhist.f_info(0.3)
