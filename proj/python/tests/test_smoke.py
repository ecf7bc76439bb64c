import math

import pytest

import fiberot


def test_two_dirac_transport():
    r = fiberot.solve_ot([(0, 1.0)], [(1, 1.0)], [[0, 2], [2, 0]], p=2)
    assert r["value_p"] == 4.0
    assert r["distance"] == 2.0
    assert r["coupling"] == [[0, 1, 1.0]]


def test_solver_matches_brute_force():
    cost = [[0, 1, 2, 3], [1, 0, 1, 2], [2, 1, 0, 1], [3, 2, 1, 0]]
    mu = [(0, 0.2), (1, 0.3), (3, 0.5)]
    nu = [(0, 0.6), (2, 0.4)]
    exact = fiberot.solve_ot(mu, nu, cost, p=2)["value_p"]
    assert abs(exact - fiberot.brute_force_ot(mu, nu, cost, p=2)) <= 1e-9
    assert fiberot.mk_distance(mu, nu, cost, 2) == pytest.approx(math.sqrt(exact))


def test_distance_on_generated_instance():
    inst = fiberot.generate(seed=3, fibers=3, atoms=4)
    assert fiberot.distance(inst, "a", "a", p=2, q=4)["distance"] == 0.0
    d2 = fiberot.distance(inst, "a", "b", p=2)["distance"]
    dinf = fiberot.distance(inst, "a", "b", p=2, q=math.inf)
    assert d2 <= dinf["distance"] + 1e-12
    assert set(dinf["fiber_profile"]) == {"w1", "w2", "w3"}


def test_barycenter_and_certificate():
    inst = fiberot.generate(seed=5, measures=3)
    exact = fiberot.barycenter(inst, p=2)
    assert exact["method"] == "lp-per-fiber"
    assert exact["certified"]
    cert = fiberot.certify(inst, p=2)
    assert cert["certified"]
    assert cert["gap"] <= 1e-7
    assert cert["primal"] == pytest.approx(exact["value"])

    sub = fiberot.barycenter(inst, p=2, q=4, tol=1e-3)
    assert sub["method"] == "subgradient"
    assert sub["dual_bound"] <= sub["value"] + 1e-9


def test_examples():
    two = fiberot.two_interval_example(20)
    assert abs(two["value"] - 1.5) <= 0.02
    assert abs(two["tent_dual"] - 1.5) <= 0.02
    assert two["shift_distance"] == pytest.approx(3.0, abs=1e-9)
    split = fiberot.split_base_example()
    assert split["objective_a"] == pytest.approx(split["objective_b"], abs=1e-6)
    assert split["distance"] > 0.1


def test_errors_surface_as_value_errors():
    with pytest.raises(fiberot.FiberotError):
        fiberot.solve_ot([(0, -1.0)], [(1, 1.0)], [[0, 1], [1, 0]])
    with pytest.raises(ValueError):
        fiberot.generate(atoms=5, oracle_checkable=True)
    with pytest.raises(ValueError):
        fiberot.distance({"measures": {}}, "a", "b")


def test_generate_is_deterministic():
    assert fiberot.generate(seed=0) == fiberot.generate(seed=0)
    assert fiberot.generate(seed=0) != fiberot.generate(seed=1)
