#!/usr/bin/env python3
"""Regenerates data/ocv/nmc_graphite.csv.

Representative NMC/graphite-like open-circuit voltage: a steep rise over the
first few percent of SOC, a shallow mid-SOC plateau, and a steeper rise above
z ~ 0.9. Endpoints are pinned to U(0) = 3.0 V and U(1) = 4.2 V.
"""
import math
import sys

LOW_RISE = 0.40    # V gained over the low-SOC knee
LOW_WIDTH = 0.06   # SOC width of the low-SOC knee
TOP_RISE = 0.06    # V amplitude of the top-of-charge exponential
TOP_WIDTH = 0.08   # SOC width of the top-of-charge exponential
POINTS = 101


def shape(z):
    return (LOW_RISE * (1.0 - math.exp(-z / LOW_WIDTH))
            + TOP_RISE * (math.exp((z - 1.0) / TOP_WIDTH) - math.exp(-1.0 / TOP_WIDTH)))


def ocv(z):
    slope = 1.2 - shape(1.0)
    return 3.0 + shape(z) + slope * z


def main(out):
    out.write("z,u\n")
    for k in range(POINTS):
        z = k / (POINTS - 1)
        out.write(f"{z:.2f},{ocv(z):.6f}\n")


if __name__ == "__main__":
    main(sys.stdout)
