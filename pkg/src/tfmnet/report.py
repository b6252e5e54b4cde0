"""Report bundle: result tables as CSV plus rendered figures.

Four performance tables (combined / network-only / emotion-only /
permuted), the exploratory feature-target correlation table, the
dependency-distance CDF, and PNG figures (beeswarm, mean-|SHAP| bars,
SHAP heatmap for the combined models; distance CDF curve). Feature lists
are reported as short codes with a legend column mapping codes to names.
"""

from __future__ import annotations

import csv
import importlib.resources
import json
import logging
from pathlib import Path

import matplotlib
import numpy as np

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)

from . import pipeline
from .config import PipelineConfig
from .network import distance_cdf

log = logging.getLogger(__name__)


def _load_data_json(name: str) -> dict:
    ref = importlib.resources.files("tfmnet") / "data" / name
    return json.loads(ref.read_text())


def feature_codes() -> dict[str, str]:
    return _load_data_json("feature_codes.json")


def display_labels() -> dict[str, str]:
    schema = _load_data_json("metric_schema.json")
    out = {}
    for section in schema.values():
        for entry in section:
            out[entry["key"]] = entry["label"]
    return out


def _code_list(names: list[str]) -> str:
    """Short codes for a feature list: digits first, then letters, then
    uncoded full names."""
    codes = feature_codes()
    coded = [codes[n] for n in names if n in codes]
    digits = sorted((c for c in coded if c.isdigit()), key=int)
    letters = sorted(c for c in coded if not c.isdigit())
    rest = sorted(n for n in names if n not in codes)
    return ", ".join(digits + letters + rest)


_SUBSET_TABLE = {
    "combined": "table2_combined.csv",
    "network": "table3_network.csv",
    "emotion": "table4_emotion.csv",
}


def stage_report(cfg: PipelineConfig) -> None:
    out_dir = Path(cfg.out_dir)
    pipeline._require_stage(out_dir, "train")
    pipeline._require_stage(out_dir, "explain")
    report_dir = out_dir / "report"
    labels = display_labels()

    # Table 1: feature-target correlations with sub-threshold cells blank
    with open(out_dir / "train" / "table1.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    header = ["Feature"] + [labels.get(t, t) for t in rows[0][1:]]
    body = [[labels.get(r[0], r[0])] + r[1:] for r in rows[1:]]
    pipeline._write_text(
        report_dir / "table1_correlations.csv", pipeline._csv_text(header, body)
    )

    # Tables 2-4: one per feature subset; Table 5: permutation baselines
    perm_rows = []
    for subset in cfg.subsets:
        perf_rows = []
        for target in cfg.targets:
            for kind in cfg.models:
                d = pipeline._combo_dir(out_dir, "explain", subset, target, kind)
                elim = pipeline._read_json(d / "elimination.json")
                final = elim["final"]
                perf_rows.append(
                    [
                        labels.get(target, target),
                        kind.upper(),
                        pipeline._fmt(round(final["pearson_r"], 4)),
                        pipeline._fmt(round(final["p_value"], 6)),
                        pipeline._fmt(round(final["mae"], 4)),
                        _code_list(elim["selected"]),
                        final["selection_rule"],
                    ]
                )
                perm_path = d / "permuted.json"
                if perm_path.is_file():
                    perm = pipeline._read_json(perm_path)
                    perm_rows.append(
                        [
                            subset,
                            labels.get(target, target),
                            kind.upper(),
                            pipeline._fmt(round(perm["mean_r"], 4)),
                            pipeline._fmt(round(perm["mean_mae"], 4)),
                            pipeline._fmt(round(perm["share_significant"], 4)),
                            perm["n_perm"],
                        ]
                    )
        pipeline._write_text(
            report_dir / _SUBSET_TABLE.get(subset, f"table_{subset}.csv"),
            pipeline._csv_text(
                ["Target", "Model", "Correlation (r)", "p-value", "MAE", "Features", "Selection"],
                perf_rows,
            ),
        )
    pipeline._write_text(
        report_dir / "table5_permuted.csv",
        pipeline._csv_text(
            ["Subset", "Target", "Model", "Mean r", "Mean MAE", "Share significant", "Repetitions"],
            perm_rows,
        ),
    )

    # feature code legend
    codes = feature_codes()
    pipeline._write_text(
        report_dir / "feature_codes.csv",
        pipeline._csv_text(
            ["code", "feature", "label"],
            [[codes[k], k, labels.get(k, k)] for k in sorted(codes, key=lambda k: (codes[k].isdigit() is False, codes[k]))],
        ),
    )

    # distance CDF (table + curve)
    transcripts = pipeline.load_transcripts(out_dir)
    cdf = distance_cdf([transcripts[t] for t in sorted(transcripts)])
    cdf_rows = [[k, pipeline._fmt(v)] for k, v in sorted(cdf.items())]
    pipeline._write_text(
        report_dir / "cdf.csv", pipeline._csv_text(["k", "cumulative_fraction"], cdf_rows)
    )
    _plot_cdf(cdf, report_dir / "fig_cdf.png", cfg.k)

    # figures for the combined-subset models
    if "combined" in cfg.subsets:
        for target in cfg.targets:
            for kind in cfg.models:
                d = pipeline._combo_dir(out_dir, "explain", "combined", target, kind)
                plots = pipeline._read_json(d / "plots.json")
                stem = f"{kind}_{target}"
                _plot_beeswarm(plots, labels, report_dir / f"fig_beeswarm_{stem}.png")
                _plot_bar(plots, labels, report_dir / f"fig_bar_{stem}.png")
                _plot_heatmap(plots, labels, report_dir / f"fig_heatmap_{stem}.png")

    pipeline._write_manifest(out_dir, "report")
    log.info("report: bundle written to %s", report_dir)


# ---------------------------------------------------------------------------
# figure rendering
# ---------------------------------------------------------------------------


def _save(fig, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)


def _plot_cdf(cdf: dict[int, float], path: Path, chosen_k: int) -> None:
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ks = sorted(cdf)
    ax.plot(ks, [cdf[k] for k in ks], marker="o", color="#2b6cb0")
    if chosen_k in cdf:
        ax.axvline(chosen_k, color="#c53030", linestyle="--", linewidth=1)
        ax.annotate(
            f"k={chosen_k}: {cdf[chosen_k]:.0%}",
            xy=(chosen_k, cdf[chosen_k]),
            xytext=(chosen_k + 0.3, min(cdf[chosen_k], 0.85)),
            fontsize=9,
        )
    ax.set_xlabel("syntactic distance k")
    ax.set_ylabel("cumulative share of token pairs")
    ax.set_ylim(0, 1.02)
    ax.grid(alpha=0.3)
    _save(fig, path)


def _plot_bar(plots: dict, labels: dict[str, str], path: Path) -> None:
    bar = plots["bar"]
    names = [labels.get(b["feature"], b["feature"]) for b in bar][::-1]
    vals = [b["mean_abs_shap"] for b in bar][::-1]
    fig, ax = plt.subplots(figsize=(6, 0.35 * len(names) + 1.2))
    ax.barh(range(len(names)), vals, color="#2b6cb0")
    ax.set_yticks(range(len(names)))
    ax.set_yticklabels(names, fontsize=8)
    ax.set_xlabel("mean |SHAP value|")
    _save(fig, path)


def _plot_beeswarm(plots: dict, labels: dict[str, str], path: Path) -> None:
    points = plots["beeswarm"]
    order: list[str] = []
    for p in points:
        if p["feature"] not in order:
            order.append(p["feature"])
    fig, ax = plt.subplots(figsize=(6.5, 0.4 * len(order) + 1.2))
    cmap = plt.get_cmap("coolwarm")
    lane = {f: i for i, f in enumerate(order)}
    rng = np.random.default_rng(0)  # presentation jitter only
    for p in points:
        y = lane[p["feature"]] + rng.uniform(-0.18, 0.18)
        color = cmap((p["value"] + 5.0) / 10.0)
        ax.scatter(p["shap"], y, color=color, s=14, alpha=0.85, linewidths=0)
    ax.axvline(0.0, color="#999999", linewidth=0.8)
    ax.set_yticks(range(len(order)))
    ax.set_yticklabels([labels.get(f, f) for f in order], fontsize=8)
    ax.invert_yaxis()
    ax.set_xlabel("SHAP value (impact on model output)")
    sm = plt.cm.ScalarMappable(cmap=cmap, norm=plt.Normalize(-5, 5))
    fig.colorbar(sm, ax=ax, label="feature value (scaled)")
    _save(fig, path)


def _plot_heatmap(plots: dict, labels: dict[str, str], path: Path) -> None:
    hm = plots["heatmap"]
    grid = np.asarray(hm["grid"], dtype=float)  # samples x features
    fig, ax = plt.subplots(figsize=(7, 0.35 * len(hm["features"]) + 1.8))
    vmax = max(abs(grid).max(), 1e-12)
    im = ax.imshow(
        grid.T, aspect="auto", cmap="coolwarm", vmin=-vmax, vmax=vmax,
        interpolation="nearest",
    )
    ax.set_yticks(range(len(hm["features"])))
    ax.set_yticklabels([labels.get(f, f) for f in hm["features"]], fontsize=8)
    ax.set_xlabel("samples (ordered by model output)")
    ax2 = ax.secondary_xaxis("top")
    ax2.set_xticks([])
    ax2.set_xlabel("model output high → low", fontsize=8)
    fig.colorbar(im, ax=ax, label="SHAP value")
    _save(fig, path)
