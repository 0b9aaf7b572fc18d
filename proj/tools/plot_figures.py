#!/usr/bin/env python3
"""Render figure data written by `krylov-spread figure` using each manifest.json."""

import argparse
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def load(path):
    data = np.genfromtxt(path, delimiter=",", names=True)
    return data


def draw_panel(ax, root, panel):
    ys = panel["y"] if isinstance(panel["y"], list) else [panel["y"]]
    labels = panel.get("labels", ys)
    for f in panel["files"]:
        d = load(root / f)
        for y, label in zip(ys, labels):
            name = y if len(panel["files"]) == 1 else Path(f).stem
            kw = {"label": name if len(ys) == 1 else label}
            if panel.get("kind") == "step":
                ax.step(d[panel["x"]], d[y], where="mid", **kw)
            else:
                ax.plot(d[panel["x"]], d[y], **kw)
    if panel.get("logx"):
        ax.set_xscale("log")
    if "xlim" in panel:
        ax.set_xlim(*panel["xlim"])
    ax.set_xlabel(panel["x"])
    ax.set_ylabel(", ".join(ys))
    ax.legend(fontsize="small")


def render(fig_dir):
    manifest = json.loads((fig_dir / "manifest.json").read_text())
    panels = manifest.get("panels", [])
    fig, axes = plt.subplots(1, len(panels), figsize=(5 * len(panels), 4), squeeze=False)
    for ax, panel in zip(axes[0], panels):
        draw_panel(ax, fig_dir, panel)
        ax.set_title(f'{manifest["figure"]} ({panel["panel"]})')
    fig.tight_layout()
    out = fig_dir / f'{manifest["figure"]}.png'
    fig.savefig(out, dpi=120)
    plt.close(fig)
    return out


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("root", type=Path, help="figure output directory (contains fig1/, fig2/, ...)")
    p.add_argument("names", nargs="*", help="figures to render (default: all found)")
    args = p.parse_args()
    dirs = [args.root / n for n in args.names] if args.names else sorted(
        d for d in args.root.iterdir() if (d / "manifest.json").exists())
    for d in dirs:
        print(render(d))


if __name__ == "__main__":
    main()
