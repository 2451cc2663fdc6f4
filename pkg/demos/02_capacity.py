# %% [markdown]
# # Recall accuracy against storage load
#
# 10% of the target's bits are flipped; a trial succeeds when the network
# settles exactly on the target. Training dominates the cost (a P x P Gram
# matrix for every trial), so this demo uses 10 trials on a coarse grid.
# The CLI runs the full grid:
#
#     klr-hopfield experiment capacity --sizes 50,100 --loads 5,10,15,20,25,30 --trials 50 --out fig2.csv

# %%
from klr_hopfield.experiments import ExperimentConfig, run_capacity_experiment

cfg = ExperimentConfig(gamma=0.1, noise_fraction=0.1, trials=10, master_seed=7)
results = run_capacity_experiment(cfg, loads=[1, 5, 10, 20], sizes=[50])

print(" N  P/N scheme accuracy")
for agg in results:
    print(f"{agg.n:>3} {agg.load:>4g} {agg.scheme.value:>6} {agg.accuracy:.2f} ± {agg.accuracy_std:.2f}")

# %% [markdown]
# Both schemes are evaluated from the same corrupted start on the same
# trained network, so their accuracies are directly comparable trial by
# trial.
