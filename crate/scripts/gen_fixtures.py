#!/usr/bin/env python3
"""Regenerates the bundled q-expansion fixtures under crates/cli/fixtures.

E4, E6 and Delta are computed from divisor sums and the product formula,
with plain integer arithmetic, to trace bound 30.
"""

import json
import pathlib

BOUND = 30
OUT = pathlib.Path(__file__).resolve().parent.parent / "crates" / "cli" / "fixtures"


def sigma(k, m):
    return sum(d**k for d in range(1, m + 1) if m % d == 0)


def eisenstein(k, c):
    return [1] + [c * sigma(k - 1, m) for m in range(1, BOUND + 1)]


def delta():
    # q * prod (1 - q^m)^24
    series = [0] * (BOUND + 1)
    series[0] = 1
    for m in range(1, BOUND + 1):
        for _ in range(24):
            for i in range(BOUND, m - 1, -1):
                series[i] -= series[i - m]
    return [0] + series[:BOUND]


def elem(x, y=0):
    return [str(x), str(y)]


def scalar_series(coeffs, d=1):
    return {
        "n": 1,
        "d": d,
        "trace_bound": BOUND,
        "degree": [0, 0],
        "coefficients": [
            {"h": [[elem(m)]], "c": [{"wm": [], "wp": [], "c": elem(c)}]}
            for m, c in enumerate(coeffs)
            if c != 0
        ],
    }


def diag(a, b):
    return [[elem(a), elem(0)], [elem(0), elem(b)]]


def n2_examples():
    scalar = [{"wm": [], "wp": [], "c": elem(1)}]
    return {
        "n2_diag12.json": {
            "n": 2, "d": 1, "trace_bound": 6, "degree": [0, 0],
            "coefficients": [{"h": diag(1, 2), "c": scalar}],
        },
        "n2_diag21.json": {
            "n": 2, "d": 1, "trace_bound": 6, "degree": [0, 0],
            "coefficients": [{"h": diag(2, 1), "c": scalar}],
        },
        "n2_mixed.json": {
            "n": 2, "d": 1, "trace_bound": 4, "degree": [1, 1],
            "coefficients": [
                {"h": diag(1, 0), "c": [{"wm": [1], "wp": [2], "c": elem(3)}]},
                {
                    "h": [[elem(1), ["1/2", "1/2"]], [["1/2", "-1/2"], elem(1)]],
                    "c": [
                        {"wm": [1], "wp": [1], "c": elem(1)},
                        {"wm": [2], "wp": [1], "c": ["-1/3", "2"]},
                    ],
                },
            ],
        },
    }


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    files = {
        "e4.json": scalar_series(eisenstein(4, 240)),
        "e6.json": scalar_series(eisenstein(6, -504)),
        "delta.json": scalar_series(delta()),
        "one_plus_q.json": {**scalar_series([1, 1]), "trace_bound": 10},
    }
    files.update(n2_examples())
    for name, data in files.items():
        (OUT / name).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
