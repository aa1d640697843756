"""Data and SVG renderings for the three landscape figures.

* fig1: SU(2) class-angle curves for j = 3 and j = 7/2.
* fig2: reduced Euler-angle scans for j = 7/2 with the identity target and
  with ``diag(-1, 1, ..., 1)``.
* fig3: three equal-dimension (N = 15) landscapes: spin 7 on its Euler-angle
  torus and the SU(3) irreps (6,1) and (5,2) on their eigen-angle torus,
  together with the ruggedness comparison.
"""
from __future__ import annotations

from pathlib import Path

from .characters import TWO_PI, SU3Label, format_label, scan_landscape
from .kinematics import reduced_scan, spin_target
from .report import heatmap_svg, line_chart_svg, write_csv, write_json, write_text
from .representations import SpinLabel, build_spin_operators
from .topology import critical_level_summary, critical_points_su2, ruggedness_compare

__all__ = ["FIGURES", "figure1", "figure2", "figure3"]


def _slug(label) -> str:
    return format_label(label).replace(":", "_").replace("=", "").replace("/", "_").replace(",", "_")


def figure1(outdir: Path, resolution: int = 1024) -> dict:
    outdir = Path(outdir)
    series, panels, files = [], [], []
    for label in (SpinLabel(6), SpinLabel(7)):
        grid = scan_landscape(label, resolution)
        rep = critical_points_su2(label)
        path = outdir / f"fig1_{_slug(label)}.csv"
        files.append(write_csv(path, grid.to_csv(), {"figure": "fig1", **grid.metadata}))
        series.append((f"j={label}", grid.axes[0], grid.values))
        panels.append({"label": format_label(label), "csv": path.name,
                       "local_max_count": len(rep.maxima), "suboptima_count": rep.suboptima_count,
                       "saddle_count": len(rep.saddles),
                       "max_local_min_value": max((p.value for p in rep.minima), default=0.0)})
    svg = line_chart_svg(series, "class angle beta", "J", "class-angle landscapes, j = 3 and j = 7/2",
                         y_range=(0.0, 1.0))
    files.append(write_text(outdir / "fig1.svg", svg))
    summary = {"figure": "fig1", "resolution": resolution, "panels": panels}
    files.append(write_json(outdir / "fig1_summary.json", summary))
    return {"summary": summary, "files": [str(f) for f in files]}


def figure2(outdir: Path, resolution: int = 512) -> dict:
    outdir = Path(outdir)
    label = SpinLabel(7)
    ops = build_spin_operators(label)
    panels, files = [], []
    for tag, target in (("a", "identity"), ("b", "flip")):
        grid = reduced_scan(ops, spin_target(label, target), resolution)
        path = outdir / f"fig2{tag}.csv"
        files.append(write_csv(path, grid.to_csv(), {"figure": "fig2", "panel": tag, "target": target,
                                                     **grid.metadata}))
        files.append(write_text(outdir / f"fig2{tag}.svg", heatmap_svg(
            grid.values, (0.0, TWO_PI), (0.0, TWO_PI), "theta", "phi",
            f"j = 7/2, target {target}")))
        panel = {"panel": tag, "target": target, "csv": path.name, "max_J": grid.max(),
                 "argmax": list(grid.argmax())}
        if target == "identity":
            panel["critical_structure"] = critical_level_summary(grid, critical_points_su2(label))
        panels.append(panel)
    summary = {"figure": "fig2", "j": str(label), "resolution": resolution, "panels": panels}
    files.append(write_json(outdir / "fig2_summary.json", summary))
    return {"summary": summary, "files": [str(f) for f in files]}


def figure3(outdir: Path, resolution: int = 512, starts: int = 1000, seed: int = 0) -> dict:
    outdir = Path(outdir)
    spin = SpinLabel(14)
    labels = [spin, SU3Label(6, 1), SU3Label(5, 2)]
    files = []
    grids = [("D7", reduced_scan(build_spin_operators(spin), spin_target(spin, "identity"), resolution),
              ("theta", "phi"))]
    for lab in labels[1:]:
        grids.append((f"su3_{lab.r1}_{lab.r2}", scan_landscape(lab, resolution), ("theta1", "theta2")))
    for (name, grid, (xl, yl)), lab in zip(grids, labels):
        files.append(write_csv(outdir / f"fig3_{name}.csv", grid.to_csv(),
                               {"figure": "fig3", "label": format_label(lab), **grid.metadata}))
        files.append(write_text(outdir / f"fig3_{name}.svg", heatmap_svg(
            grid.values, (0.0, TWO_PI), (0.0, TWO_PI), xl, yl, f"{format_label(lab)} (N = {lab.dim})")))
    cmp = ruggedness_compare(labels, starts=starts, seed=seed, resolution=resolution)
    summary = {"figure": "fig3", "resolution": resolution, "comparison": cmp.to_json_dict(),
               "decreasing_ruggedness": all(a["local_max_count"] > b["local_max_count"]
                                            for a, b in zip(cmp.entries, cmp.entries[1:]))}
    files.append(write_json(outdir / "fig3_summary.json", summary))
    return {"summary": summary, "files": [str(f) for f in files]}


FIGURES = {"fig1": figure1, "fig2": figure2, "fig3": figure3}
