"""Mixing variation operators with a sliding-window UCB1 bandit.

Each action is a (crossover, line, isometric) probability mix; the reward
of a generation is the fraction of its children that earned an archive
cell. The bandit tries everything once, then follows the mean reward plus
an exploration bonus, forgetting records older than its window.
"""

import numpy as np

from dde_elites import BanditState, ExperimentConfig, run_variant

# synthetic illustration first: two actions with drifting payoffs
state = BanditState(actions=[(0, 0, 1), (0, 1, 0)], window_length=50)
rng = np.random.default_rng(0)
picks = []
for step in range(300):
    action = state.select()
    picks.append(action)
    # action 1 pays early, action 0 pays late: the window lets the bandit switch
    p = (0.6 if step < 150 else 0.1) if action == 1 else (0.1 if step < 150 else 0.6)
    state.update(action, int(rng.binomial(100, p)), 100)
first, second = picks[:150], picks[150:]
print("synthetic drift: action 1 share "
      f"{np.mean(np.array(first) == 1):.2f} early -> {np.mean(np.array(second) == 1):.2f} late\n")

# now inside a real run: which mixes does the bandit favor?
cfg = ExperimentConfig.default(20, budget=10_000, seed=2)
cfg.archive.bins = 300
res = run_variant(cfg, "dde-elites")

counts = np.zeros(9, dtype=int)
rewards = np.zeros(9)
for rec in res.history[1:]:
    counts[rec.action] += 1
    rewards[rec.action] += rec.reward
labels = ["xover", "line", "iso"]
print("action usage over one run (mix = crossover:line:isometric):")
actions = ExperimentConfig.default(20).bandit.actions
for a, (n, r) in enumerate(zip(counts, rewards)):
    mix = ":".join(f"{v:.2f}" for v in actions[a])
    mean_r = r / n if n else 0.0
    print(f"  action {a} [{mix}]  picked {n:3d}x  mean reward {mean_r:.3f}")
print(f"\nfinal archive: coverage {res.archive.metrics().coverage:.3f}, "
      f"mean fitness {res.archive.metrics().mean_fitness:.4f}")
