"""
Fitting a short curve and forecasting the rest
==============================================

Run a simulated active-learning loop for 100 rounds, pretend only the first
20 have happened, fit the model and see how well it forecasts rounds 21-100.
"""

import numpy as np

from palm import PalmParams, SynthSpec, fit, generate, predict_from_prefix

truth = PalmParams(a_max=84.0, delta=0.3, alpha=1.5, beta=0.7, b=20)
curve = generate(SynthSpec(truth, n_iterations=100, noise_sigma=0.5, seed=3))
print(f"{len(curve)} observations, b = {curve.b}")

# Fit on everything we have.
full = fit(curve)
print("full-curve fit:", full.params)
print(f"  rmse {full.rmse:.3f} points, start {full.start_index}, flags {sorted(full.boundary_flags)}")

# Forecast from growing prefixes.
print()
print("prefix  holdout MAE  max error")
for size in (6, 10, 20, 50):
    report = predict_from_prefix(curve, size)
    print(f"{size:6d}  {report.mae:11.3f}  {report.max_abs_err:9.3f}")

# A closer look at the 20-point forecast.
report = predict_from_prefix(curve, 20)
held = np.array(report.predictions)
print()
print("budget  predicted  observed")
for (budget, pred), err in list(zip(held, report.holdout_errors))[::20]:
    print(f"{budget:6.0f}  {pred:9.2f}  {pred - err:8.2f}")
