"""
A dynamic scene
===============

In Experiment 4 the virtual room holds four moving discs. The user and the
discs are stepped together by reciprocal collision avoidance, so the virtual
path is collision free by construction; the discs still change what the user
can see, and so what the visibility controller steers toward.
"""

from rdwlab.env import builtin_pair
from rdwlab.locomotion import generate_dynamic_scenario, min_pairwise_distance
from rdwlab.redirect import DualState, UserPose
from rdwlab.sim import make_trial, run_trial

pair = builtin_pair(4)
scene = generate_dynamic_scenario(pair.virt, rng_seed=5, duration=60.0)
print(f"{scene.duration:.0f} s scene, user walks {scene.user_length:.1f} m")
print(f"closest approach between any two agents: {min_pairwise_distance(scene):.3f} m "
      "(radii sum to 1 m)")

# a physical start drawn the way the batch harness draws it
phys_start = make_trial(pair, 0, 5, duration=1.0).start.phys
start = DualState(phys_start, UserPose(*scene.user[0]))
for controller in ["vis-poly", "arc"]:
    r = run_trial(pair, controller, scene, start)
    print(f"{controller:>9}: {r.resets} resets over {r.virt_distance:.1f} m")
