"""
One path, four controllers
==========================

Every controller walks the same virtual path from the same physical start,
which is how the experiments compare them. This demo runs one Experiment 1
trial with each controller, prints the reset counts and writes an SVG of the
physical and virtual traces next to this file.
"""

from pathlib import Path

from rdwlab.env import builtin_pair
from rdwlab.sim import SimConfig, make_trial, run_trial, trace_svg

pair = builtin_pair(1)
trial = make_trial(pair, index=0, seed=11, path_length=120.0)
print(f"virtual path: {len(trial.path.waypoints)} waypoints, {trial.path.length:.1f} m")

out = Path(__file__).with_name("out")
out.mkdir(exist_ok=True)
cfg = SimConfig(record_trace=True)
for controller in ["vis-poly", "arc", "apf", "s2c", "none"]:
    r = run_trial(pair, controller, trial.path, trial.start, cfg)
    print(f"{controller:>9}: {r.resets:3d} resets, {r.resets_per_meter:.3f} per metre, "
          f"closest edge gap {r.min_clearance:.3f} m")
    (out / f"trial_{controller}.svg").write_text(trace_svg(pair, r.trace))

print(f"traces written to {out}")
