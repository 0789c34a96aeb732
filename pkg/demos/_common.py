"""Helpers shared by the demo scripts."""

from __future__ import annotations

import logging
from pathlib import Path

from fatfront.config import load_config, resolve
from fatfront.integrator import SimulationRun, run

CONFIGS = Path(__file__).resolve().parent / "configs"


def run_config(name: str, out: Path):
    """Resolve ``configs/<name>.json`` and integrate it in memory."""
    out.mkdir(parents=True, exist_ok=True)
    res = resolve(load_config(CONFIGS / f"{name}.json"), out_dir=out / name)
    sim = SimulationRun(res.kernel, res.reaction, res.grid, res.stepper, res.initial,
                        deficit_max=res.deficit_max)
    logging.getLogger(__name__).info("running %s on L = %.6g", name, res.grid.half_width)
    return res, run(sim)


def pyplot():
    """``matplotlib.pyplot`` with a file backend, or ``None`` when unavailable."""
    try:
        import matplotlib
    except ImportError:
        return None
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt
