import json
import math

import numpy as np
import pytest
import scipy.linalg

import tmep


def hermitian_power(m, a):
    vals, vecs = np.linalg.eigh(m)
    return (vecs * np.power(vals.astype(complex), a)) @ vecs.conj().T


def test_two_level_closed_form():
    m = tmep.fixture_a()
    s, w = tmep.ep_measure(m, math.pi / 2)
    log3 = math.log(3.0)
    np.testing.assert_allclose(s, [-log3, log3], atol=1e-12)
    np.testing.assert_allclose(w, [0.25, 0.75], atol=1e-12)
    assert np.dot(s, w) == pytest.approx(0.5 * log3, abs=1e-12)


def test_routes_agree_against_numpy_oracle():
    m = tmep.random_model(seed=7, dim=6)
    t = 0.8
    alphas = [0.5j * k for k in range(-4, 5)]
    direct = np.array(tmep.char_function(m, t, alphas, route="direct"))
    for route in ("trace", "spectral", "cocycle-product"):
        np.testing.assert_allclose(tmep.char_function(m, t, alphas, route=route), direct, atol=1e-10)
    # Independent evaluation of tr(omega_{-t}^a omega^{1-a}) with scipy.
    h, omega = m.hamiltonian, m.omega
    u = scipy.linalg.expm(-1j * t * h)
    back = u.conj().T @ omega @ u
    for a, f in zip(alphas, direct):
        ref = np.trace(hermitian_power(back, a) @ hermitian_power(omega, 1 - a))
        assert abs(ref - f) < 1e-9


def test_spectral_measure_matches_protocol():
    m = tmep.fixture_d()
    nu = m.product_state(np.diag([0.9, 0.1]))
    s1, w1 = tmep.ep_measure(m, 1.0, nu)
    s2, w2 = tmep.ep_measure_spectral(m, 1.0, nu)
    assert tmep.distance_w1((s1, w1), (s2, w2)) < 1e-10
    assert tmep.distance_tv((s1, w1), (s2, w2)) < 1e-10


def test_mean_entropy_identity():
    m = tmep.fixture_d()
    t = 0.5
    s, w = tmep.ep_measure(m, t)
    u = scipy.linalg.expm(-1j * t * m.hamiltonian)
    evolved = u @ m.omega @ u.conj().T
    assert np.dot(s, w) == pytest.approx(-tmep.relative_entropy(evolved, m.omega), abs=1e-10)
    assert np.dot(s, w) >= -1e-12


def test_verify_battery_passes():
    reports = tmep.verify(tmep.fixture_d(), 1.0, jobs=2)
    assert len(reports) == 8
    assert all(r["verdict"] == "pass" for r in reports), json.dumps(reports, indent=1)


def test_errors_are_typed():
    with pytest.raises(tmep.FaithfulnessError):
        tmep.explicit_model(np.eye(2), np.diag([1.0, 0.0]))
    with pytest.raises(tmep.ResourceError):
        tmep.open_system(2, [(6, 1.0), (6, 2.0)])
    with pytest.raises(tmep.TmepError):
        tmep.char_function(tmep.fixture_a(), 1.0, [0.5], route="nope")


def test_cli_in_process(tmp_path):
    code, _, _ = tmep.run_cli(["emit-fixtures", "--out", str(tmp_path)])
    assert code == 0
    assert (tmp_path / "fix-a.json").exists()
    code, _, _ = tmep.run_cli(["verify", "--config", str(tmp_path / "fix-a.json"),
                               "--out", str(tmp_path / "v")])
    assert code == 0
    assert tmep.run_cli(["verify", "--config", str(tmp_path / "absent.json")])[0] == 2
