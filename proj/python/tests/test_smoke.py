import os
import subprocess

import numpy as np
import pytest

import imdp


def test_scenarios_listed():
    assert imdp.scenario_names() == ["lqr1d", "cluttered2d", "corridor2d", "manipulator6d"]
    assert imdp.exact_cost("lqr1d", np.array([0.0])) == pytest.approx(40.51)
    assert imdp.exact_cost("cluttered2d", np.array([1.0, 1.0])) is None


def test_planner_runs_and_is_reproducible():
    a = imdp.Planner("lqr1d", seed=4)
    b = imdp.Planner("lqr1d", seed=4)
    ta = a.run(50)
    tb = b.run(50)
    assert len(ta) == 50
    assert ta[-1]["n"] == 50
    assert [t["probes"] for t in ta] == [t["probes"] for t in tb]
    assert a.iteration == 50
    X = a.states()
    assert X.shape == (a.size, 1)
    assert np.all(np.abs(X) <= 6.0)
    J = a.values()
    mask = np.asarray(a.boundary())
    assert np.allclose(J[mask], 414.55)
    assert len(a.snapshot()["states"]) == a.size


def test_policy_lookup_and_rollouts():
    p = imdp.Planner("cluttered2d", seed=1)
    p.run(100)
    policy = p.policy()
    u, dt = policy.lookup(np.array([5.0, 8.0]))
    assert u.shape == (2,)
    assert np.all(np.abs(u) <= 1.0)
    assert dt > 0.0
    report = imdp.evaluate(policy, trials=20, seed=3)
    assert report["trials"] == 20
    assert sum(report["exits"].values()) == 20
    assert report == imdp.evaluate(policy, trials=20, seed=3)


def test_bad_input_raises():
    with pytest.raises(ValueError):
        imdp.Planner("nowhere")
    with pytest.raises(ValueError):
        imdp.Planner("lqr1d", config={"sigma": 1.0})


@pytest.mark.skipif("IMDP_CLI" not in os.environ, reason="command-line tool not located")
def test_cli_lists_scenarios():
    out = subprocess.run([os.environ["IMDP_CLI"], "list-scenarios"], capture_output=True, text=True, check=True)
    assert "lqr1d" in out.stdout
