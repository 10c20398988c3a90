"""Regenerates monthly.csv. Requires numpy."""

import calendar

import numpy as np

SEED = 20061031
MONTHS = 240
START_YEAR = 2006

rng = np.random.default_rng(SEED)
mkt = rng.normal(0.006, 0.045, MONTHS)
smb = rng.normal(0.002, 0.030, MONTHS)
fund_a = 0.004 + 0.8 * mkt + 0.3 * smb + rng.normal(0.0, 0.030, MONTHS)
fund_b = 0.001 + 1.0 * mkt + rng.normal(0.0, 0.020, MONTHS)

with open("monthly.csv", "w") as f:
    f.write("date,fund_a,fund_b,mkt,smb\n")
    for i in range(MONTHS):
        year, month = START_YEAR + i // 12, i % 12 + 1
        day = calendar.monthrange(year, month)[1]
        row = [fund_a[i], fund_b[i], mkt[i], smb[i]]
        f.write(f"{year}-{month:02d}-{day:02d}," + ",".join(f"{v:.6f}" for v in row) + "\n")
