"""Incremental Markov decision process planner for continuous-time stochastic control."""

import json

import numpy as np

from ._core import Policy, _Planner, exact_cost, scenario_names

__all__ = ["Planner", "Policy", "exact_cost", "scenario_names", "evaluate"]


class Planner(_Planner):
    """Grows a discrete model of one of the built-in scenarios.

    config overrides scenario keys; params overrides algorithm parameters.
    """

    def __init__(self, scenario="lqr1d", seed=0, config=None, params=None):
        super().__init__(
            scenario,
            int(seed),
            json.dumps(config) if config else "",
            json.dumps(params) if params else "",
        )

    def run(self, iterations):
        """Runs more iterations and returns their traces as dicts."""
        return json.loads(self._run(int(iterations)))

    def snapshot(self):
        return json.loads(self._snapshot())

    def values(self):
        return np.asarray(self.costs())


def evaluate(policy, start=None, trials=200, seed=0, dt_sim=None, t_max=None):
    """Monte-Carlo rollouts of a frozen policy; returns the report dict."""
    if start is not None:
        start = np.asarray(start, dtype=float)
    return json.loads(policy._evaluate(start, int(trials), int(seed), dt_sim, t_max))
