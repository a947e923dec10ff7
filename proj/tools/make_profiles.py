#!/usr/bin/env python3
"""Regenerate the synthetic wind profiles shipped in fixtures/.

wind_week.csv   one week plus a two-hour look-ahead at 5 min resolution;
                forecast equals nowcast (forecast noise is applied from the
                config seed at run time).
reserve_day.csv one day plus look-ahead with low-wind periods placed well
                apart, used by the reserve threshold checks.

Values are per-unit availability of the installed wind capacity.
"""

import argparse
import math
import random
from pathlib import Path

STEPS_PER_HOUR = 12


def power_curve(speed):
    cut_in, rated, cut_out = 3.0, 12.0, 25.0
    if speed < cut_in or speed >= cut_out:
        return 0.0
    if speed >= rated:
        return 1.0
    return (speed**3 - cut_in**3) / (rated**3 - cut_in**3)


def week_profile(steps, seed):
    rng = random.Random(seed)
    mean, sd, rho = 10.0, 3.5, 0.995
    innovation = sd * math.sqrt(1.0 - rho * rho)
    speed = mean
    values = []
    for t in range(steps):
        # slow synoptic swing so that calm spells occur within the week
        target = mean + 3.0 * math.sin(2.0 * math.pi * t / (3.1 * 24 * STEPS_PER_HOUR))
        speed = target + rho * (speed - target) + rng.gauss(0.0, innovation)
        speed = max(0.0, speed)
        values.append(round(power_curve(speed), 4))
    return values


def reserve_day_profile(steps):
    values = []
    for t in range(steps):
        base = 0.45 + 0.3 * math.sin(2.0 * math.pi * t / 140.0)
        values.append(round(base, 4))
    # calm spells, each well separated from the next
    for start, pattern in (
        (60, [0.101, 0.099, 0.06, 0.02, 0.0, 0.0, 0.03, 0.08, 0.0995, 0.101]),
        (150, [0.102, 0.09, 0.05, 0.05, 0.04, 0.07, 0.099, 0.1005]),
        (230, [0.11, 0.0999, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.05, 0.0999, 0.102]),
    ):
        for i, v in enumerate(pattern):
            values[start + i] = v
    return values


def write(path, columns, steps):
    with open(path, "w", newline="\n") as f:
        f.write("step," + ",".join(name for name, _ in columns) + "\n")
        for t in range(steps):
            f.write(f"{t}," + ",".join(repr(float(v[t])) for _, v in columns) + "\n")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", type=Path, default=Path(__file__).resolve().parent.parent / "fixtures")
    parser.add_argument("--seed", type=int, default=2020)
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    week_steps = 7 * 24 * STEPS_PER_HOUR + 2 * STEPS_PER_HOUR
    wind = week_profile(week_steps, args.seed)
    write(args.out / "wind_week.csv", [("wind.forecast", wind), ("wind.nowcast", wind)], week_steps)

    day_steps = 24 * STEPS_PER_HOUR + 2 * STEPS_PER_HOUR
    day = reserve_day_profile(day_steps)
    write(args.out / "reserve_day.csv", [("wind.forecast", day)], day_steps)


if __name__ == "__main__":
    main()
