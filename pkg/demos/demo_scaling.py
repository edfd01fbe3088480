"""How fast do measured shift norms grow with complexity?

For each complexity k we draw random symmetrized extremal shifts, bound
their L^4 operator norm from below, and divide the best bound by the
theoretical envelope k * 2^(k/2) * 3.  A flat quotient would mean the
envelope is tight; the measured quotients fall with k instead, i.e. random
shifts use up ever less of the allowed growth.
"""

from dyadlab.normlab import shift_scaling_study

K_VALUES = (1, 2, 3, 4)
DEPTH = 6
TRIALS = 10

study = shift_scaling_study(k_values=K_VALUES, depth=DEPTH, trials=TRIALS,
                            seed=0)

print(f"depth {DEPTH}, {TRIALS} random shifts per complexity, p = 4")
print(f"\n{'k':>3s} {'(m,n)':>7s} {'max lower':>12s} {'envelope':>12s} "
      f"{'implied c':>12s}")
for row in study.rows:
    envelope = row["k"] * 2.0 ** (row["k"] / 2.0) * 3.0
    print(f"{row['k']:3d} ({row['m']},{row['n']})"
          f" {row['max_lower']:12.6f} {envelope:12.3f}"
          f" {row['implied_c']:12.6f}")

print(f"\nfitted c (largest implied): {study.fitted_c:.6f}")
print(f"spread of implied constants: {study.homogeneity_ratio:.1f}x "
      f"(within 10x: {study.within_factor_10})")
print("\nCSV for plotting:\n")
print(study.to_csv())
