"""
Which strategy wins, and when?
==============================

Two fitted strategies can trade places: one covers the space quickly but
tops out lower, the other starts slowly and keeps climbing.
"""

import numpy as np

from palm import PalmParams, compare, growth_criterion

typical = PalmParams(a_max=78.1, delta=0.859, alpha=0.536, beta=0.347, b=20)
margin = PalmParams(a_max=87.9, delta=0.535, alpha=0.241, beta=0.389, b=20)

budgets = np.arange(20.0, 20001.0, 20.0)
report = compare(typical, margin, budgets)

print("crossovers at budgets:", [round(c, 2) for c in report.crossovers])
print("asymptotic winner:", report.asymptotic_winner)
print("parameter breakdown:", report.parameter_breakdown)

for budget in (20.0, 100.0, 1000.0, 20000.0):
    lead = report.winner_at[budget]
    faster = growth_criterion(typical, margin, budget)
    print(f"B={budget:7.0f}: ahead -> {lead:6s}  growing faster -> {faster}")
