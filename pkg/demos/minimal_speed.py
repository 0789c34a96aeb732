"""Minimal speeds of truncated kernels.

Cutting the tail of a fat-tailed kernel restores a finite minimal speed
c*_eps. As the removed mass eps shrinks, c*_eps grows without bound, which
is the mechanism behind acceleration. The Laplace kernel is included as a
closed-form check: c* = 3 sqrt(3)/2 at eta = 1/sqrt(3).

Usage: python demos/minimal_speed.py
"""

from __future__ import annotations

import math

from fatfront import analysis
from fatfront.errors import DivergenceError
from fatfront.kernels import catalog
from fatfront.reaction import Logistic


def main() -> None:
    kernels, f = catalog(), Logistic()
    c, eta = analysis.minimal_speed(kernels["fig2b"], f)
    print(f"laplace: c* = {c:.8f} (closed form {1.5 * math.sqrt(3):.8f}), eta* = {eta:.6f}")

    for name in ("fig2a", "fig1"):
        print(f"\n{name} kernel, truncated")
        print(f"{'eps':>8} {'A_eps':>12} {'c*_eps':>10} {'eta*':>8}")
        for eps in (0.5, 0.25, 0.1, 0.05, 0.01):
            tk = kernels[name].truncate(eps)
            c, eta = analysis.minimal_speed(tk, f)
            print(f"{eps:8.2f} {tk.A_eps:12.4g} {c:10.4f} {eta:8.4f}")
        try:
            analysis.minimal_speed(kernels[name], f)
        except DivergenceError as exc:
            print(f"untruncated: {exc}")


if __name__ == "__main__":
    main()
