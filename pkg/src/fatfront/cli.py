"""Command-line front end.

Usage::

    fatfront simulate  <config> [--out DIR] [--threads N]
    fatfront envelopes <config|run-dir> [--lambda L] [--epsilon E] [--rho R]
    fatfront certify   <config> [--constructions step1,step2,hyp1,hyp2]
    fatfront speed     <config> [--run DIR]
    fatfront compare   <config> [--out DIR] [--threads N]

Exit status is 0 on success, 2 when a simulation stops on boundary egress
and 1 on any error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence


from . import analysis, certificates
from .config import Resolved, load_config, parse_config, resolve
from .discretization import read_field_csv, snapshot_name, write_field_csv
from .errors import DivergenceError, FatFrontError
from .integrator import SimulationRun, run, write_diagnostics_csv

logger = logging.getLogger("fatfront")

EXIT_OK, EXIT_ERROR, EXIT_EGRESS = 0, 1, 2
CONSTRUCTIONS = ("step1", "step2", "hyp1", "hyp2")

_PLOT_LEVELSETS = '''"""Front positions x_lambda(t) from levelsets.csv."""
import csv
import matplotlib.pyplot as plt

rows = list(csv.DictReader(open("levelsets.csv")))
for lam in sorted({r["lambda"] for r in rows}, key=float):
    pts = [(float(r["t"]), float(r["x_right"])) for r in rows
           if r["lambda"] == lam and r["x_right"]]
    if pts:
        plt.plot(*zip(*pts), label=f"lambda = {float(lam):g}")
plt.xlabel("t")
plt.ylabel("x_lambda(t)")
plt.legend()
plt.savefig("levelsets.png", dpi=150)
'''

_PLOT_PROFILES = '''"""Solution profiles u(t, x) at a few snapshot times."""
import csv
import matplotlib.pyplot as plt

index = list(csv.DictReader(open("snapshots/index.csv")))
picks = index[:: max(1, len(index) // 6)]
for row in picks:
    data = list(csv.DictReader(open("snapshots/" + row["file"])))
    xs = [float(d["x"]) for d in data]
    us = [float(d["u"]) for d in data]
    plt.plot(xs, us, label=f"t = {float(row['t']):g}")
plt.xlim(left=0)
plt.xlabel("x")
plt.ylabel("u(t, x)")
plt.legend()
plt.savefig("profiles.png", dpi=150)
'''

_PLOT_ENVELOPES = '''"""Front position with lower and upper envelopes (dashed)."""
import csv
import matplotlib.pyplot as plt

rows = list(csv.DictReader(open("envelopes.csv")))
for lam in sorted({r["lambda"] for r in rows}, key=float):
    sel = [r for r in rows if r["lambda"] == lam]
    t = [float(r["t"]) for r in sel]
    plt.plot(t, [float(r["lower"]) for r in sel], "k--")
    plt.plot(t, [float(r["upper"]) for r in sel], "k--")
    pts = [(float(r["t"]), float(r["x_right"])) for r in sel if r["x_right"]]
    if pts:
        plt.plot(*zip(*pts), label=f"x_{float(lam):g}(t)")
plt.xlabel("t")
plt.ylabel("x")
plt.legend()
plt.savefig("envelopes.png", dpi=150)
'''

_PLOT_COMPARE = '''"""Windowed speeds and level-set spacing."""
import csv
import matplotlib.pyplot as plt

fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
speeds = list(csv.DictReader(open("speeds.csv")))
for lam in sorted({r["lambda"] for r in speeds}, key=float):
    sel = [r for r in speeds if r["lambda"] == lam]
    mid = [0.5 * (float(r["t0"]) + float(r["t1"])) for r in sel]
    ax1.plot(mid, [float(r["slope"]) for r in sel], "o-", label=f"lambda = {float(lam):g}")
ax1.set_xlabel("window centre")
ax1.set_ylabel("speed")
ax1.legend()
flat = list(csv.DictReader(open("flatness.csv")))
ax2.plot([float(r["t"]) for r in flat], [float(r["width"]) for r in flat])
ax2.set_xlabel("t")
ax2.set_ylabel("x_lo - x_hi")
fig.savefig("compare.png", dpi=150)
'''


def _write(path: Path, text: str) -> None:
    path.write_text(text, encoding="utf-8", newline="\n")


def _resolve(config: str, out: Optional[str]) -> Resolved:
    return resolve(load_config(config), out_dir=out)


def simulate(res: Resolved, threads: Optional[int] = None) -> tuple[SimulationRun, int]:
    """Run a resolved configuration and write its outputs."""
    out = res.output_dir
    (out / "snapshots").mkdir(parents=True, exist_ok=True)
    _write(out / "resolved_config.json", res.to_json())
    sim = SimulationRun(res.kernel, res.reaction, res.grid, res.stepper, res.initial,
                        deficit_max=res.deficit_max, workers=threads)
    run(sim)
    lines = ["index,t,file\n"]
    for i, snap in enumerate(sim.snapshots):
        write_field_csv(snap, out / "snapshots" / snapshot_name(i))
        lines.append(f"{i},{snap.time:.17g},{snapshot_name(i)}\n")
    _write(out / "snapshots" / "index.csv", "".join(lines))
    write_diagnostics_csv(sim, out / "diagnostics.csv")
    traces = [analysis.trace_level_set(sim.snapshots, lam) for lam in res.levels]
    analysis.write_levelsets_csv(traces, out / "levelsets.csv")
    if res.data["output"]["plot"]:
        _write(out / "plot_levelsets.py", _PLOT_LEVELSETS)
        _write(out / "plot_profiles.py", _PLOT_PROFILES)
    if sim.status == "egress_abort":
        print(f"egress {sim.diagnostics.egress[-1]:.3g} exceeded "
              f"{res.stepper.egress_max:.3g} at t = {sim.diagnostics.t[-1]:.6g}; "
              f"enlarge grid.L (currently {res.grid.half_width:.6g})")
        return sim, EXIT_EGRESS
    print(f"completed t = {res.stepper.t_max:g}: {len(sim.snapshots)} snapshots in {out}")
    return sim, EXIT_OK


def _run_dir_and_config(target: str) -> tuple[Path, Resolved]:
    p = Path(target)
    if p.is_dir():
        res = resolve(parse_config((p / "resolved_config.json").read_text(encoding="utf-8")))
        return p, res
    res = _resolve(target, None)
    return res.output_dir, res


def _load_traces(run_dir: Path, levels: Sequence[float]) -> list[analysis.LevelSetTrace]:
    path = run_dir / "levelsets.csv"
    if not path.exists():
        raise FatFrontError(f"no levelsets.csv in {run_dir}; run `fatfront simulate` first")
    have = {round(tr.lam, 12): tr for tr in analysis.read_levelsets_csv(path)}
    missing = [lam for lam in levels if round(lam, 12) not in have]
    if missing:
        index = run_dir / "snapshots" / "index.csv"
        if not index.exists():
            raise FatFrontError(f"missing trace for levels {missing} and no snapshots")
        rows = [line.split(",") for line in index.read_text().splitlines()[1:]]
        snaps = [read_field_csv(run_dir / "snapshots" / f.strip(), float(t)) for _, t, f in rows]
        for lam in missing:
            have[round(lam, 12)] = analysis.trace_level_set(snaps, lam)
    return [have[round(lam, 12)] for lam in levels]


def cmd_simulate(args) -> int:
    res = _resolve(args.config, args.out)
    return simulate(res, args.threads)[1]


def cmd_envelopes(args) -> int:
    run_dir, res = _run_dir_and_config(args.config)
    if args.out:
        run_dir = Path(args.out)
    levels = [args.lam] if args.lam is not None else res.levels
    eps = res.epsilon if args.epsilon is None else args.epsilon
    rho = res.rho if args.rho is None else args.rho
    if rho is None:
        raise FatFrontError("no rho available: pass --rho for this kernel")
    traces = _load_traces(run_dir, levels)
    reports = [analysis.envelopes(res.kernel, res.reaction, tr.lam, eps, rho, tr.t, tr)
               for tr in traces]
    analysis.write_envelopes_csv(reports, run_dir / "envelopes.csv")
    _write(run_dir / "plot_envelopes.py", _PLOT_ENVELOPES)
    t_end = float(traces[0].t.max())
    for rep in reports:
        absent = sum(c is None for c in rep.containment)
        ok = rep.contained_after(2.0 * t_end / 3.0)
        print(f"lambda = {rep.lam:g}: contained on final third: {ok}; absent rows: {absent}")
    return EXIT_OK


def cmd_certify(args) -> int:
    res = _resolve(args.config, args.out)
    block = res.data.get("certify", {})
    names = args.constructions.split(",") if args.constructions else \
        block.get("constructions", list(CONSTRUCTIONS))
    quad_tol = float(block.get("quad_tol", certificates.DEFAULT_QUAD_TOL))
    tol = float(block.get("tol", certificates.DEFAULT_TOL))
    k, f = res.kernel, res.reaction
    reports = []
    for name in names:
        if name == "step1":
            rep = certificates.check_linear_subsolution(k, res.initial, quad_tol=quad_tol, tol=tol)
        elif name == "step2":
            sub = certificates.build_step2_subsolution(
                k, f, float(block.get("epsilon", 0.5 * f.fprime0)), res.initial)
            rep = certificates.check_step2_subsolution(sub, k, f, quad_tol=quad_tol, tol=tol)
        elif name == "hyp1":
            sup = certificates.build_hyp1_supersolution(
                k, f, block.get("epsilon0"), res.initial.support_radius)
            rep = certificates.check_hyp1_supersolution(sup, k, f, quad_tol=quad_tol, tol=tol)
        elif name == "hyp2":
            sup2 = certificates.build_hyp2_supersolution(k, f, res.initial.support_radius)
            rep = certificates.check_hyp2_supersolution(sup2, k, f, quad_tol=quad_tol, tol=tol)
        else:
            raise FatFrontError(f"unknown construction {name!r}; expected {CONSTRUCTIONS}")
        reports.append(rep)
    out = res.output_dir
    out.mkdir(parents=True, exist_ok=True)
    certificates.write_certificate_csv(reports, out / "certificates.csv")
    lines = []
    for rep in reports:
        (t, x), r = rep.worst
        lines.append(f"{rep.construction}: {'pass' if rep.verdict else 'fail'} "
                     f"({len(rep.points)} points, worst residual {r:.3g} at t={t:.6g}, x={x:.6g})")
    _write(out / "certificates_summary.txt", "\n".join(lines) + "\n")
    print("\n".join(lines))
    return EXIT_OK if all(rep.verdict for rep in reports) else EXIT_ERROR


def _speed_kernel(res: Resolved):
    eps = res.data.get("speed", {}).get("truncate")
    return res.kernel if eps is None else res.kernel.truncate(float(eps))


def cmd_speed(args) -> int:
    res = _resolve(args.config, None)
    try:
        c_star, eta = analysis.minimal_speed(_speed_kernel(res), res.reaction)
    except DivergenceError as exc:
        print(f"infinite speed expected: {exc}")
        return EXIT_ERROR
    print(f"c* = {c_star:.10g} at eta* = {eta:.10g}")
    if args.run:
        block = res.data.get("speed", {})
        lam = float(block.get("level", res.levels[0]))
        tr = _load_traces(Path(args.run), [lam])[0]
        t_end = float(tr.t.max())
        window = tuple(block.get("window", (0.5 * t_end, t_end)))
        est = analysis.empirical_speed(tr, window)
        gap = (est.slope - c_star) / c_star
        print(f"empirical slope of x_{lam:g} on [{window[0]:g}, {window[1]:g}] = "
              f"{est.slope:.10g} (relative gap {gap:+.3%})")
    return EXIT_OK


def cmd_compare(args) -> int:
    res = _resolve(args.config, args.out)
    out = res.output_dir
    if not (out / "levelsets.csv").exists():
        code = simulate(res, args.threads)[1]
        if code != EXIT_OK:
            return code
    traces = _load_traces(out, res.levels)
    lines = ["lambda,t0,t1,slope,intercept,residual\n"]
    for tr in traces:
        t0 = tr.first_time or 0.0
        t_end = float(tr.t.max())
        for est in analysis.windowed_speeds(tr, 3, (max(t0, t_end / 3.0), t_end)):
            lines.append(f"{tr.lam:.17g},{est.window[0]:.17g},{est.window[1]:.17g},"
                         f"{est.slope:.17g},{est.intercept:.17g},{est.residual:.17g}\n")
            print(f"lambda = {tr.lam:g}, window [{est.window[0]:.4g}, {est.window[1]:.4g}]: "
                  f"speed {est.slope:.6g}")
    _write(out / "speeds.csv", "".join(lines))
    hi, lo = max(traces, key=lambda tr: tr.lam), min(traces, key=lambda tr: tr.lam)
    both = hi.present & lo.present
    rows = ["t,lambda_lo,lambda_hi,width\n"]
    for t, w in zip(hi.t[both], lo.x_right[both] - hi.x_right[both]):
        rows.append(f"{t:.17g},{lo.lam:.17g},{hi.lam:.17g},{w:.17g}\n")
    _write(out / "flatness.csv", "".join(rows))
    _write(out / "plot_compare.py", _PLOT_COMPARE)
    try:
        c_star, _ = analysis.minimal_speed(_speed_kernel(res), res.reaction)
        print(f"c* = {c_star:.10g}")
    except DivergenceError:
        print("c* is infinite for this kernel: infinite speed expected")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fatfront", description=__doc__.split("\n\n")[0])
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("config")
        sp.add_argument("--out", default=None, help="output directory (overrides the config)")
        sp.add_argument("--threads", type=int, default=None, help="FFT worker threads")

    common(s := sub.add_parser("simulate", help="run a configuration"))
    s.set_defaults(func=cmd_simulate)
    common(s := sub.add_parser("envelopes", help="envelope containment for a run"))
    s.add_argument("--lambda", dest="lam", type=float, default=None)
    s.add_argument("--epsilon", type=float, default=None)
    s.add_argument("--rho", type=float, default=None)
    s.set_defaults(func=cmd_envelopes)
    common(s := sub.add_parser("certify", help="sign checks of sub/supersolutions"))
    s.add_argument("--constructions", default=None, help="comma list of " + ",".join(CONSTRUCTIONS))
    s.set_defaults(func=cmd_certify)
    common(s := sub.add_parser("speed", help="minimal speed and empirical slope"))
    s.add_argument("--run", default=None, help="completed run directory")
    s.set_defaults(func=cmd_speed)
    common(s := sub.add_parser("compare", help="windowed speeds and flatness of a run"))
    s.set_defaults(func=cmd_compare)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (FatFrontError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
