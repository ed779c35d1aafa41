"""
How many labels to reach a target?
==================================

Invert a fitted curve to size the next labeling campaign, and see what
happens when the target lies above the fitted ceiling.  Planning is only
as good as the fit: a curve observed far from saturation pins down the
ceiling poorly, so check ``boundary_flags`` and the residuals first.
"""

from palm import PalmParams, SynthSpec, TargetUnreachable, fit, generate, required_budget

truth = PalmParams(a_max=85.5, delta=0.409, alpha=0.819, beta=0.605, b=20)
observed = generate(SynthSpec(truth, n_iterations=100, noise_sigma=0.3, seed=8))
result = fit(observed)
print("fitted:", result.params)
print(f"rmse {result.rmse:.3f}, flags {sorted(result.boundary_flags)}")

for target in (70.0, 80.0, 84.0, 90.0):
    try:
        estimate = required_budget(result, target)
    except TargetUnreachable as exc:
        print(f"target {target:.0f}%: unreachable, {exc.gap:.2f} points above the ceiling")
        continue
    print(
        f"target {target:.0f}%: about {estimate.samples:,.0f} labels "
        f"({estimate.iterations:.1f} rounds of {result.params.b:.0f})"
    )
