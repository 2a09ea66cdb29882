#!/usr/bin/env python3
"""Dilation sweep: the norm ratio scales only when the exponents balance.

Runs the x-dilation ladder twice, once with balanced exponents (flat
log-log line) and once with alpha pushed off balance (slope near the
change-of-variables prediction m(1/p - 1/q) - alpha).
"""

import numpy as np

from prodhls.harness import ExperimentConfig, run_necessity_sweep

ladder = [float(s) for s in np.round(np.logspace(-0.5, 0.5, 11), 10)]
dilations = [[s, 1.0] for s in ladder] + [[1.0, t] for t in ladder if t != 1.0]

base = {
    "grid": {"m": 1, "n": 1, "half_width": 1.0, "points_per_axis": 256},
    "families": ["gaussian"],
    "family_params": {"gaussian": {"sigma": 0.055}},
    "dilations": dilations,
    "seed": 1,
}

for label, exponents in (
        ("balanced   (alpha = 1/2)", {"alpha": 0.5, "beta": 0.5, "p": 4 / 3}),
        ("unbalanced (alpha = 0.7)", {"alpha": 0.7, "beta": 0.5, "p": 4 / 3, "q": 4.0})):
    cfg = ExperimentConfig.from_dict({**base, "exponents": exponents})
    rep = run_necessity_sweep(cfg)
    print(f"{label}:")
    print(f"  fitted slope in s  {rep.slope_s:+.4f}   "
          f"(prediction {rep.theoretical_slope_s:+.4f})")
    print(f"  fitted slope in t  {rep.slope_t:+.4f}   "
          f"(prediction {rep.theoretical_slope_t:+.4f})")
    rows = [r for r in rep.rows if r.t == 1.0]
    print("  s ladder:", "  ".join(f"{r.s:.2f}->{r.ratio:.3f}" for r in rows[::2]))
    print()
