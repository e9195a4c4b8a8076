#!/usr/bin/env python3
"""Least-squares quartic fit of thruster electrical power against normalised command.

Reads data/t200_power_16v.csv (columns: pwm_us, power_w) and fits, separately
for the forward (pwm >= 1500) and reverse (pwm <= 1500) branches,

    P(u) = c1 |u| + c2 |u|^2 + c3 |u|^3 + c4 |u|^4,    u = (pwm - 1500) / 400

with no constant term so that P(0) = 0. Prints the [power] section of the
vehicle config file.
"""
import csv
import pathlib
import sys

import numpy as np


def fit(u, p):
    x = np.abs(u)
    a = np.stack([x, x**2, x**3, x**4], axis=1)
    coeffs, *_ = np.linalg.lstsq(a, p, rcond=None)
    return coeffs


def main(path):
    with open(path) as fh:
        rows = [r for r in csv.DictReader(line for line in fh if not line.startswith("#"))]
    pwm = np.array([float(r["pwm_us"]) for r in rows])
    power = np.array([float(r["power_w"]) for r in rows])
    u = (pwm - 1500.0) / 400.0
    fwd = fit(u[u >= 0], power[u >= 0])
    rev = fit(u[u <= 0], power[u <= 0])
    fmt = lambda c: ", ".join(repr(float(v)) for v in c)
    print("[power]")
    print(f"forward = [{fmt(fwd)}]")
    print(f"reverse = [{fmt(rev)}]")


if __name__ == "__main__":
    root = pathlib.Path(__file__).resolve().parent.parent
    main(sys.argv[1] if len(sys.argv) > 1 else root / "data" / "t200_power_16v.csv")
