import math

import numpy as np
import pytest

import entropic_spectra as es


def random_hermitian(rng, n):
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (g + g.conj().T) / 2


def test_eig_matches_numpy():
    rng = np.random.default_rng(0)
    a = random_hermitian(rng, 6)
    w, v = es.eig(a)
    assert np.allclose(w, np.linalg.eigvalsh(a), atol=1e-10)
    assert np.allclose(v @ np.diag(w) @ v.conj().T, a, atol=1e-10)


def test_gibbs_and_coupling():
    y = np.diag([0.0, math.log(3.0)]).astype(complex)
    assert np.allclose(es.gibbs(y), np.diag([0.25, 0.75]))
    assert np.isclose(np.trace(es.gibbs(y, 2.5)).real, 2.5)
    assert abs(es.fenchel_coupling(es.gibbs(y), y)) < 1e-10
    assert np.isclose(es.conjugate(np.zeros((3, 3), complex)), 1 + math.log(3))
    assert np.isclose(es.entropy(np.eye(4) / 4), -math.log(4) - 1)
    assert es.divergence(np.eye(2) / 2, np.eye(2) / 2) == pytest.approx(0.0, abs=1e-12)


def test_non_hermitian_input_rejected():
    with pytest.raises(ValueError):
        es.gibbs(np.array([[0, 1], [0, 0]], dtype=complex))


def test_gap_closed_form():
    f = np.diag([0.0, 1.0]).astype(complex)
    assert es.gap([np.eye(2) / 2], [f], [1.0]) == pytest.approx(0.5)


def test_mdis_linear_reaches_minimum_eigenvalue():
    rng = np.random.default_rng(1)
    mats = []
    for _ in range(3):
        g = rng.normal(size=(3, 3))
        mats.append((g @ g.T / np.trace(g @ g.T)).astype(complex))
    out = es.mdis_linear(mats, 3000)
    f_star = np.linalg.eigvalsh(sum(mats))[0]
    assert out["best_value"] - f_star < 5e-2
    assert len(out["values"]) == 3000
    assert all(b2 <= b1 for b1, b2 in zip(out["best_values"], out["best_values"][1:]))


def test_mimo_network_and_solver():
    net = es.MimoNetwork.hex(2, 4, 1.0, 42)
    assert net.players == 7
    assert net.channel(1, 3).shape == (4, 2)
    assert es.hex_cell_distances()[4][0] == 2.5635
    x = [np.eye(2) * p / 2 for p in net.power]
    assert len(net.payoffs(x)) == 7
    assert net.gap(x) >= 0.0
    res = es.solve_vi(net, 200, "amsmd", seed=3, gap_stride=50)
    assert res["t"] == [50, 100, 150, 200]
    assert res["gap"][-1] < net.gap(x)


def test_run_experiment_csv():
    csv = es.run_experiment("T=20\npaths=2\ngap_stride=10\n", {"sigma": "0.5"})
    lines = csv.splitlines()
    assert lines[0] == "#schema=1"
    assert "#config sigma=0.5" in lines
    rows = [line for line in lines if not line.startswith("#")][1:]
    assert len(rows) == 6
    assert csv == es.run_experiment("T=20\npaths=2\ngap_stride=10\n", {"sigma": "0.5"})
    with pytest.raises(ValueError):
        es.run_experiment("T=abc\n")
