"""Figure rendering for experiment reports.

Each function takes already-computed result rows (the same ones the CLI
writes as CSV/JSON) and saves a figure next to them.  Rendering never
feeds back into the numbers.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)


def _new_axes(xlabel: str, ylabel: str, title: str):
    fig, ax = plt.subplots(figsize=(6.0, 3.8))
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    return fig, ax


def _save(fig, path) -> None:
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_bound_curves(rows, path, title="Isometry probability lower bounds") -> None:
    """rows: dicts with delta, exact, stirling, theorem1."""
    fig, ax = _new_axes("distortion level", "probability lower bound", title)
    deltas = [r["delta"] for r in rows]
    ax.plot(deltas, [r["exact"] for r in rows], marker="o", label="exact")
    ax.plot(deltas, [r["stirling"] for r in rows], marker="s", label="stirling")
    ax.plot(deltas, [r["theorem1"] for r in rows], marker="^", label="iid concentration")
    ax.set_ylim(-0.05, 1.05)
    ax.legend()
    _save(fig, path)


def save_rip_histogram(rows, path, title="Distortion histogram") -> None:
    """rows: (lo, hi, count) bins."""
    fig, ax = _new_axes("distortion", "trials", title)
    lows = [r[0] for r in rows]
    widths = [r[1] - r[0] for r in rows]
    ax.bar(lows, [r[2] for r in rows], width=widths, align="edge", edgecolor="black")
    _save(fig, path)


def save_angle_curves(rows, path, title="Hamming distance vs angle") -> None:
    """rows: dicts with theta, mean_h, var_h, predicted_mean, predicted_var."""
    fig, ax = _new_axes("angle (radians)", "normalized Hamming distance", title)
    thetas = [r["theta"] for r in rows]
    ax.errorbar(thetas, [r["mean_h"] for r in rows],
                yerr=[r["var_h"] ** 0.5 for r in rows], fmt="o", label="measured")
    ax.plot(thetas, [r["predicted_mean"] for r in rows], "--", label="theta/pi")
    ax.legend()
    _save(fig, path)


def save_bench_sweep(rows, path, title="Embedding time") -> None:
    """rows: dicts with method, m, median_s (one line per method)."""
    fig, ax = _new_axes("output bits m", "median seconds", title)
    methods = sorted({r["method"] for r in rows})
    for method in methods:
        pts = sorted((r["m"], r["median_s"]) for r in rows if r["method"] == method)
        ax.loglog([p[0] for p in pts], [p[1] for p in pts], marker="o", label=method)
    ax.legend()
    _save(fig, path)


def save_retrieval_bars(rows, path, title="Retrieval quality") -> None:
    """rows: dicts with method, m, map_at_k."""
    fig, ax = _new_axes("output bits m", "mAP", title)
    methods = sorted({r["method"] for r in rows})
    ms = sorted({r["m"] for r in rows})
    width = 0.8 / max(len(methods), 1)
    for j, method in enumerate(methods):
        vals = [next((r["map_at_k"] for r in rows if r["method"] == method and r["m"] == m), 0.0)
                for m in ms]
        ax.bar([i + j * width for i in range(len(ms))], vals, width=width, label=method)
    ax.set_xticks([i + 0.4 - width / 2 for i in range(len(ms))], [str(m) for m in ms])
    ax.set_ylim(0, 1.05)
    ax.legend()
    _save(fig, path)


def save_storage_bars(rows, path, title="Projection storage") -> None:
    """rows: dicts with method, n, m, megabytes."""
    fig, ax = _new_axes("configuration", "megabytes (MB = 2^20 bytes)", title)
    labels = [f"{r['method']}\nn={r['n']},m={r['m']}" for r in rows]
    ax.bar(range(len(rows)), [r["megabytes"] for r in rows])
    ax.set_xticks(range(len(rows)), labels, fontsize=7)
    ax.set_yscale("log")
    _save(fig, path)
