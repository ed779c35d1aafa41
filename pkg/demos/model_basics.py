"""
The accuracy model in a few lines
=================================

Accuracy after ``B`` labeled samples is modeled as the chance that a test
point is covered by at least one of ``(B / b + alpha) ** beta`` effective
samples, scaled by the achievable ceiling ``a_max``.
"""

import numpy as np

from palm import PalmParams, coverage_probability, palm_accuracy, palm_slope

# Coverage first: each sample covers a point with probability p.
for s in (1, 5, 10, 50):
    print(f"p=0.1, {s:3d} samples -> covered with probability {coverage_probability(0.1, s):.4f}")

# A strategy on CIFAR-10-like scales: 20 labels per round.
params = PalmParams(a_max=87.1, delta=0.536, alpha=0.392, beta=0.381, b=20)
budgets = np.array([0, 20, 100, 200, 1000, 5000, 20000])
print()
print("budget  accuracy  slope per label")
for budget, acc in zip(budgets, palm_accuracy(params, budgets)):
    print(f"{budget:6d}  {acc:8.3f}  {palm_slope(params, float(budget)):.5f}")

# Each parameter moves the curve in its own way.
print()
base = PalmParams(85.0, 0.3, 1.0, 0.8, 20)
variants = {
    "base": base,
    "higher delta": PalmParams(85.0, 0.5, 1.0, 0.8, 20),
    "larger alpha": PalmParams(85.0, 0.3, 4.0, 0.8, 20),
    "steeper beta": PalmParams(85.0, 0.3, 1.0, 1.2, 20),
}
grid = np.array([20.0, 100.0, 400.0])
for name, p in variants.items():
    row = "  ".join(f"{a:6.2f}" for a in palm_accuracy(p, grid))
    print(f"{name:>13}: {row}")
