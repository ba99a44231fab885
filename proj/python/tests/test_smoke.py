import math

import pytest

import lcsmech

FLAT1 = {"cotangent": {"base_dim": 1}}


def test_examples_validate():
    assert lcsmech.example_ids() == ["g41-rep1", "g41-rep2", "g41-rep4"]
    for rep in lcsmech.example_ids():
        r = lcsmech.validate(rep)
        assert r["valid"] and r["ldr_omega_zero"]


def test_expressions():
    assert lcsmech.simplify("q1*(q1 + 1) - q1", ["q1"]) == lcsmech.simplify("q1^2", ["q1"])
    assert lcsmech.differentiate("t*q1^3", ["q1"], "q1") == lcsmech.simplify("3*t*q1^2", ["q1"])
    with pytest.raises(ValueError):
        lcsmech.simplify("q1 +", ["q1"])


def test_free_particle():
    tr = lcsmech.integrate_hamiltonian(FLAT1, "p1^2/2", [0.0, 1.0], t1=1.0, dt=0.01, diagnostics=True)
    assert tr["coordinates"] == ["q1", "p1"]
    assert math.isclose(tr["x"][-1][0], 1.0, abs_tol=1e-10)
    assert max(tr["residual"]) < 1e-12


def test_lie_system_endpoint():
    tr = lcsmech.integrate_lie_system("g41-rep1", [1, 1, 1, 1], [0, 0, 0, 0], dt=1e-3)
    for got, want in zip(tr["x"][-1], (5 / 3, 1.5, 1.0, 1.0)):
        assert math.isclose(got, want, abs_tol=1e-8)


def test_degenerate_crossing_returns_partial_trajectory():
    s = {
        "coordinates": ["x", "y"],
        "omega": {"degree": 2, "terms": [{"indices": [0, 1], "coeff": "x"}]},
        "theta": {"degree": 1, "terms": []},
    }
    tr = lcsmech.integrate_hamiltonian(s, "-y", [1.0, 0.0], t1=3.0, dt=0.01)
    assert "aborted" in tr
    assert tr["t"][-1] <= 0.5


def test_hamilton_jacobi():
    r = lcsmech.hamilton_jacobi(FLAT1, "p1^2/2 - q1^2/2", ["q1"])
    assert r["hj_residual"] == ["0"]
    assert r["related"] and r["indicators_agree"]
    r = lcsmech.hamilton_jacobi(FLAT1, "p1^2/2", ["q1"])
    assert not r["related"] and r["indicators_agree"]


def test_canonical_fiber_translation():
    cand = {"structure": FLAT1, "map": ["q1", "p1 + 2*t", "t"], "hamiltonian": "p1^2/2", "potentials": "liouville"}
    r = lcsmech.check_canonical(cand)
    assert r["K_F"] == "2*q1"
    assert r["canonical"] and r["all_conditions"]
    cand["K_F"] = "-2*q1"
    assert not lcsmech.check_canonical(cand)["canonical"]
    with pytest.raises(ValueError):
        lcsmech.check_canonical({"map": []})
