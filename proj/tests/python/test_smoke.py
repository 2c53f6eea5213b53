import numpy as np
import pytest

import sdenet


def test_kernel_matrix_is_symmetric_psd():
    k = sdenet.kernel_matrix("tc", 0.7, lags=6, dt=0.5)
    assert k.shape == (6, 6)
    np.testing.assert_allclose(k, k.T)
    assert np.linalg.eigvalsh(k).min() > -1e-12
    # TC: k(t, s) = beta^max(t, s)
    assert k[0, 3] == pytest.approx(0.7 ** 2.0)


def test_bridge_covariance_matches_closed_form():
    c = sdenet.bridge_covariance(4)
    i = np.arange(1, 4)
    expected = np.minimum.outer(i, i) * (4 - np.maximum.outer(i, i)) / 4.0
    np.testing.assert_allclose(c, expected, atol=1e-14)


def test_build_grid():
    g = sdenet.build_grid([0.0, 1.0, 2.0], 4)
    assert g["dt"] == pytest.approx(0.25)
    assert g["measurement_index"] == [0, 4, 8]
    assert len(g["times"]) == 9


def test_metrics():
    truth = np.array([[0, 1, 0], [0, 0, 1], [1, 0, 0]])
    m = sdenet.binary_metrics(truth, truth)
    assert (m["tp"], m["fp"], m["fn"]) == (3, 0, 0)
    assert m["tpr"] == 1.0 and m["prec"] == 1.0
    empty = sdenet.binary_metrics(np.zeros((3, 3), dtype=int), truth)
    assert empty["prec"] is None
    r = sdenet.ranked_metrics(truth.astype(float), truth)
    assert r["auroc"] == pytest.approx(1.0)
    assert r["auprec"] == pytest.approx(1.0)


def test_errors_map_to_python_exceptions():
    with pytest.raises(sdenet.ArgumentError):
        sdenet.kernel_matrix("xx", 0.5, lags=3, dt=1.0)
    with pytest.raises(sdenet.Error):
        sdenet.ranked_metrics(np.zeros((2, 2)), np.zeros((2, 2), dtype=int))


def test_simulate_and_infer():
    d = sdenet.simulate(kind="ring", p=3, hidden=1, measurements=20, seed=3)
    assert d["Z"].shape == (20, 3)
    assert d["truth"].shape == (3, 3)
    s = sdenet.infer(d["times"], d["Z"], refinement=2, k_max=30, seed=5, lags=4)
    assert s["link_prob"].shape == (3, 3)
    assert np.all((s["link_prob"] >= 0) & (s["link_prob"] <= 1))
    assert s["y_mean"].shape == (39, 3)
    again = sdenet.infer(d["times"], d["Z"], refinement=2, k_max=30, seed=5, lags=4)
    np.testing.assert_array_equal(s["link_prob"], again["link_prob"])


def test_run_cli_help():
    assert sdenet.run_cli(["--help"]) == 0
    assert sdenet.run_cli(["infer", "--no-such-flag"]) == 2
