"""
A small experiment
==================

A scaled-down version of the batch runs: ten shared paths in Experiment 2,
all four controllers, median resets per controller. The command line does the
same thing at full scale::

    rdw-lab run --experiment 2 --trials 100 --seed 42 --out results/
"""

from statistics import median

from rdwlab.env import builtin_pair
from rdwlab.sim import make_trials, run_experiment

pair = builtin_pair(2)
trials = make_trials(pair, n_trials=10, seed=42, path_length=150.0)
results = run_experiment(pair, ["vis-poly", "arc", "apf", "s2c"], trials=trials)

by_controller = {}
for r in results:
    by_controller.setdefault(r.controller, []).append(r.resets)
for controller, resets in by_controller.items():
    print(f"{controller:>9}: median {median(resets):5.1f} resets  (per trial: {resets})")
