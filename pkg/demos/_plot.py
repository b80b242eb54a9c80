"""Tiny helper shared by the demos: save a heatmap if matplotlib is available."""

from pathlib import Path

import numpy as np

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:          # demos still run and print numbers
    plt = None

OUT = Path(__file__).with_name("figures")


def heatmap(name, times, sites, values, title=""):
    if plt is None:
        print(f"(matplotlib not installed; skipping {name}.png)")
        return
    OUT.mkdir(exist_ok=True)
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.pcolormesh(sites, times, values, shading="auto", cmap="magma")
    ax.set_xlabel("site i")
    ax.set_ylabel("t  [1/J]")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(OUT / f"{name}.png", dpi=120)
    plt.close(fig)
    print(f"saved {OUT / (name + '.png')}")


def curves(name, x, ys: dict, xlabel="t  [1/J]", ylabel="", logx=False):
    if plt is None:
        print(f"(matplotlib not installed; skipping {name}.png)")
        return
    OUT.mkdir(exist_ok=True)
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for label, y in ys.items():
        ax.plot(x, np.asarray(y), label=label)
    if logx:
        ax.set_xscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.legend()
    fig.tight_layout()
    fig.savefig(OUT / f"{name}.png", dpi=120)
    plt.close(fig)
    print(f"saved {OUT / (name + '.png')}")
