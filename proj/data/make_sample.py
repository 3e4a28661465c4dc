#!/usr/bin/env python3
"""Regenerate sample_prices.csv.

The bundled series is synthetic: a geometric random walk with iid Gaussian
log-returns (mean 4e-4, sd 8e-3 per day) over weekday dates, quantized to
cents. It is shaped like a broad equity index so the CLI examples look
familiar, but it is not market data.
"""
import datetime as dt

import numpy as np

N_CLOSES = 1201
START = dt.date(2017, 3, 22)

rng = np.random.default_rng(20170322)
shocks = rng.normal(4e-4, 8e-3, N_CLOSES - 1)

rows = []
day = START
close = 2345.67
for i in range(N_CLOSES):
    rows.append(f"{day.isoformat()},{close:.2f}")
    if i + 1 < N_CLOSES:
        close *= np.exp(shocks[i])
    day += dt.timedelta(days=1)
    while day.weekday() >= 5:
        day += dt.timedelta(days=1)

with open("sample_prices.csv", "w", newline="") as f:
    f.write("date,close\n")
    f.write("\n".join(rows) + "\n")
