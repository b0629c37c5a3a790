"""Batch statistics: a CSV row per random instance and a kernel-size plot."""

from __future__ import annotations

import csv
import random
from pathlib import Path

from .graph import Graph
from .kernelize import KERNEL, kernelize
from .packing import greedy_maximal_packing

FIELDS = ("index", "n", "m", "k", "kind", "kernel_n", "kernel_k", "bound", "ok", "reductions", "loops", "rounds")


def instance_stats(g: Graph, k: int) -> dict:
    from .cli import output_instance

    r = kernelize(g, k)
    out, kk = output_instance(r)
    n = len(out)
    stats = {
        "n": len(g),
        "m": g.num_edges(),
        "components": len(g.components()),
        "max_degree": g.max_degree(),
        "greedy_packing": len(greedy_maximal_packing(g)),
        "k": k,
        "kind": r.kind,
        "kernel_n": n,
        "kernel_k": kk,
        "bound": 5 * kk,
        "ok": str(n <= 5 * kk).lower(),
        "loops": r.stats.loops,
        "rounds": r.stats.rounds,
    }
    for rule, count in sorted(r.stats.firings.items()):
        stats[f"fired_{rule}"] = count
    return stats


def run_batch(count: int, seed: int, k: int | None = None) -> list[dict]:
    """Kernelize ``count`` random graphs drawn over a density sweep."""
    from .cli import output_instance, random_graph

    rng = random.Random(seed)
    rows = []
    for i in range(count):
        n = rng.randint(10, 60)
        p = rng.choice((0.02, 0.04, 0.06, 0.1, 0.2, 0.4))
        kk = k if k is not None else rng.randint(1, 8)
        g = random_graph(n, rng.randrange(2**31), p=p)
        r = kernelize(g, kk)
        out, kout = output_instance(r)
        kn = len(out)
        rows.append(
            {
                "index": i,
                "n": n,
                "m": g.num_edges(),
                "k": kk,
                "kind": r.kind,
                "kernel_n": kn,
                "kernel_k": kout,
                "bound": 5 * kout,
                "ok": kn <= 5 * kout,
                "reductions": r.stats.reductions,
                "loops": r.stats.loops,
                "rounds": r.stats.rounds,
            }
        )
    return rows


def write_report(rows: list[dict], outdir: Path) -> tuple[Path, Path]:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    outdir.mkdir(parents=True, exist_ok=True)
    csv_path = outdir / "kernel_stats.csv"
    with csv_path.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=FIELDS)
        w.writeheader()
        for row in rows:
            w.writerow({**row, "ok": str(row["ok"]).lower()})

    kernels = [r for r in rows if r["kind"] == KERNEL]
    fig, ax = plt.subplots(figsize=(5, 4))
    xs = [r["bound"] for r in kernels]
    ys = [r["kernel_n"] for r in kernels]
    ax.scatter(xs, ys, s=12, alpha=0.6, label="kernels")
    top = max(xs + ys + [5])
    ax.plot([0, top], [0, top], color="black", linewidth=1, label="n' = 5k'")
    ax.set_xlabel("5k'")
    ax.set_ylabel("kernel vertices n'")
    ax.set_title(f"{len(kernels)} kernels out of {len(rows)} instances")
    ax.legend(loc="upper left")
    fig.tight_layout()
    png_path = outdir / "kernel_sizes.png"
    fig.savefig(png_path, dpi=100)
    plt.close(fig)
    return csv_path, png_path
