#!/usr/bin/env python3
"""Regenerate the four figure scenarios shipped in configs/.

    python scripts/reproduce_figures.py [--out out] [--jobs 4] [--only fig2 fig5]

Each scenario lands in its own directory under --out. The full set with the
default PSO budget takes a while on one core; --quick cuts PSO to 60
iterations for a fast look.
"""
import argparse
import sys
import time
from pathlib import Path

from uavopt.cli import main as uavopt

ROOT = Path(__file__).resolve().parent.parent
SCENARIOS = {
    "fig2": ("sweep", "uniform 1D, delta 0.5, h in {80, 300}"),
    "fig3": ("sweep", "uniform 1D, delta 0.9, h in {80, 300}"),
    "fig4": ("sweep", "Gaussian 2D, sigma^2 = 100"),
    "fig5": ("trajectory", "time-varying power-law density, 5 UAVs"),
}


def run(name, out_root, jobs, quick):
    command, blurb = SCENARIOS[name]
    args = [command, "--config", str(ROOT / "configs" / f"{name}.ini"), "--out", str(out_root / name),
            "--jobs", str(jobs)]
    if quick:
        # overriding through a temporary config keeps the hash honest about the change
        text = (ROOT / "configs" / f"{name}.ini").read_text()
        lines = [ln for ln in text.splitlines() if not ln.startswith("pso.iters")]
        tmp = out_root / f"{name}.quick.ini"
        tmp.parent.mkdir(parents=True, exist_ok=True)
        tmp.write_text("\n".join(lines + ["pso.iters = 60"]) + "\n")
        args[2] = str(tmp)
    print(f"[{name}] {blurb}", flush=True)
    t0 = time.perf_counter()
    code = uavopt(args)
    print(f"[{name}] exit {code} after {time.perf_counter() - t0:.0f} s", flush=True)
    return code


def cli():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out", default="out", type=Path)
    ap.add_argument("--jobs", default=1, type=int)
    ap.add_argument("--only", nargs="*", choices=sorted(SCENARIOS))
    ap.add_argument("--quick", action="store_true")
    args = ap.parse_args()
    codes = [run(name, args.out, args.jobs, args.quick) for name in (args.only or sorted(SCENARIOS))]
    return max(codes)


if __name__ == "__main__":
    sys.exit(cli())
