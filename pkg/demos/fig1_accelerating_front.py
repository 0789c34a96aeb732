"""Accelerating front for the kernel (1/4) exp(-sqrt|x|).

Runs the Fig-1 configuration, tracks the level set u = 0.2 and compares
it with the envelopes (t - ln 4)^2 and (3t/2 - ln 4)^2. The position grows
roughly like t^2, so no constant speed describes it.

Usage: python demos/fig1_accelerating_front.py [--out DIR]
"""

from __future__ import annotations

import argparse
import logging
import math
from pathlib import Path

from _common import pyplot, run_config
from fatfront import analysis


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    p.add_argument("--out", type=Path, default=Path("demo_output"))
    args = p.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(name)s: %(message)s")

    res, sim = run_config("fig1", args.out)
    tr = analysis.trace_level_set(sim.snapshots, 0.2)
    rep = analysis.envelopes(res.kernel, res.reaction, 0.2, 0.0, 1.5, tr.t, tr)

    print(f"{'t':>5} {'lower':>10} {'x_0.2':>10} {'upper':>10}")
    for t, lo, x, up in zip(rep.times, rep.lower, rep.x_right, rep.upper):
        if t % 5 == 0:
            print(f"{t:5.0f} {lo:10.2f} {x:10.2f} {up:10.2f}")
    speeds = [e.slope for e in analysis.windowed_speeds(tr)]
    print("windowed speeds:", ", ".join(f"{s:.1f}" for s in speeds))
    print(f"contained on the final third: {rep.contained_after(20.0)}")

    plt = pyplot()
    if plt is not None:
        ln4 = math.log(4.0)
        plt.plot(tr.t, tr.x_right, label="x_0.2(t)")
        plt.plot(tr.t, [max(t - ln4, 0) ** 2 for t in tr.t], "k--", label="(t - ln 4)^2")
        plt.plot(tr.t, [max(1.5 * t - ln4, 0) ** 2 for t in tr.t], "k:", label="(3t/2 - ln 4)^2")
        plt.xlabel("t")
        plt.ylabel("x")
        plt.legend()
        path = args.out / "fig1.png"
        plt.savefig(path, dpi=150)
        print(f"figure written to {path}")


if __name__ == "__main__":
    main()
