import math

import numpy as np
import pytest

import critwave


def test_round_trip_and_parseval():
    rng = np.random.default_rng(3)
    for bc in ("dirichlet", "neumann"):
        u = rng.standard_normal((32, 32))
        c = critwave.forward_transform(u, bc)
        np.testing.assert_allclose(critwave.inverse_transform(c, bc), u, atol=1e-12)
        h = critwave.nodes(32, bc)[1] - critwave.nodes(32, bc)[0]
        assert math.isclose((c**2).sum(), h * h * (u**2).sum(), rel_tol=1e-12)


def test_single_mode_energy():
    x = np.array(critwave.nodes(64))
    u = 2 * np.outer(np.sin(np.pi * x), np.sin(np.pi * x))
    e = critwave.energy(u, np.zeros_like(u), exponent=0.0)
    assert math.isclose(e["dirichlet"], 2 * math.pi**2, rel_tol=1e-12)


def test_concentrator_reference():
    ref = critwave.analytic_reference(8, 0.2)
    assert ref["dirichlet_sq"] == 1.0
    assert math.isclose(ref["mt_functional"], 0.321693093350362478, rel_tol=1e-9)
    f = critwave.build_fk(129, 8, 0.2)  # the centre is node 64
    assert f.shape == (129, 129)
    assert f.max() == pytest.approx(math.sqrt(8 / (4 * math.pi)))


def test_ode_and_errors():
    assert critwave.period(0.5) > 0
    assert math.isclose(critwave.detect_return_time(0.5, 1e-5), critwave.period(0.5), rel_tol=1e-6)
    with pytest.raises(critwave.PreconditionError):
        critwave.decoherence(1)
    with pytest.raises(critwave.ConfigError):
        critwave.nodes(2)


def test_solver_conserves_energy():
    x = np.array(critwave.nodes(32))
    u = 0.1 * np.outer(np.sin(np.pi * x), np.sin(2 * np.pi * x))
    r = critwave.solve(u, np.zeros_like(u), T=0.1, dt=1e-3, snapshot_every=10)
    assert r["max_drift"] < 1e-5
    assert not r["truncated"]
    assert len(r["times"]) == 11


def test_experiment_summary_is_deterministic():
    params = dict(y0=0.5, lemma_k=4, a=1, A=2, k=100)
    a = critwave.experiment("ode", **params)
    b = critwave.experiment("ode", **params)
    assert a == b
    assert a["experiment"] == "ode"
    assert {c["name"] for c in a["checks"]} >= {"period_vs_integration", "lemma_I"}
    with pytest.raises(critwave.ConfigError):
        critwave.experiment("ode", bogus=1)
