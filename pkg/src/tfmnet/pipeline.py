"""Staged pipeline: ingest -> build -> metrics -> emotions -> train ->
explain -> report.

Each stage reads the previous stage's artifacts from the output
directory, writes its own as plain CSV/JSON, and finishes with a
manifest listing every file it produced with a sha256 content hash.
Reruns with the same inputs, config, and seed are byte-identical.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import conllu, emotions, features, network
from .config import PipelineConfig
from .ensemble import (
    TrainedEnsemble,
    cross_validate,
    expand_grid,
    fit_ensemble,
    permutation_baseline,
)
from .errors import (
    EmptyNetwork,
    MissingUpstreamArtifact,
    StageFailure,
    TfmnetError,
)
from .explain import export_plots, shap_feature_elimination, tree_shap
from .features import FeatureTable, TARGET_COLUMNS
from .lexicons import (
    EMOTIONS,
    EmotionLexicon,
    SynonymLexicon,
    ValenceLexicon,
    default_stopwords,
    load_stopwords,
)
from .metrics import MetricVector, compute_metrics
from .seeding import derive_seed

log = logging.getLogger(__name__)

STAGES = ("ingest", "build", "metrics", "emotions", "train", "explain", "report")


# ---------------------------------------------------------------------------
# artifact plumbing
# ---------------------------------------------------------------------------


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)


def _write_json(path: Path, doc: object) -> None:
    _write_text(path, json.dumps(doc, sort_keys=True, indent=1) + "\n")


def _read_json(path: Path) -> object:
    with open(path) as fh:
        return json.load(fh)


def _write_manifest(out_dir: Path, stage: str) -> None:
    stage_dir = out_dir / stage
    files = {}
    for p in sorted(stage_dir.rglob("*")):
        if p.is_file() and p.name != "manifest.json":
            files[str(p.relative_to(stage_dir))] = _sha256(p)
    _write_json(stage_dir / "manifest.json", {"stage": stage, "files": files})


def _require_stage(out_dir: Path, stage: str) -> None:
    if not (out_dir / stage / "manifest.json").is_file():
        raise MissingUpstreamArtifact(stage, str(out_dir / stage / "manifest.json"))


def _csv_text(header: Sequence[str], rows: Sequence[Sequence[object]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(row)
    return buf.getvalue()


def _fmt(v: object) -> object:
    """Floats through repr for stable round-trip text; everything else as-is."""
    if isinstance(v, bool):
        return int(v)
    if isinstance(v, float):
        return repr(v)
    return v


# ---------------------------------------------------------------------------
# stage: ingest
# ---------------------------------------------------------------------------


def stage_ingest(cfg: PipelineConfig) -> None:
    out_dir = Path(cfg.out_dir)
    corpus_dir = Path(cfg.corpus_dir)
    stop = load_stopwords(cfg.stopwords) if cfg.stopwords else default_stopwords()
    paths = sorted(corpus_dir.glob("*.conllu"))
    if not paths:
        raise TfmnetError(f"no .conllu files in {corpus_dir}")
    transcripts: dict[str, conllu.Transcript] = {}
    for p in paths:
        for t in conllu.parse_conllu_file(str(p), stop):
            if t.transcript_id in transcripts:
                raise TfmnetError(f"duplicate transcript id {t.transcript_id!r} in {p.name}")
            transcripts[t.transcript_id] = t
    if cfg.demographics_csv:
        with open(cfg.demographics_csv, newline="") as fh:
            for row in csv.DictReader(fh):
                tid = row["transcript_id"]
                if tid in transcripts:
                    transcripts[tid].demographics["age"] = float(row["age"])
                    transcripts[tid].demographics["sex"] = row["sex"].strip().lower()

    doc = {}
    summary_rows = []
    for tid in sorted(transcripts):
        t = transcripts[tid]
        doc[tid] = {
            "age": t.demographics.get("age"),
            "sex": t.demographics.get("sex"),
            "sentences": [
                {
                    "sentence_id": s.sentence_id,
                    "tokens": [
                        {
                            "id": tok.id,
                            "surface": tok.surface,
                            "lemma": tok.lemma,
                            "upos": tok.upos,
                            "head": tok.head,
                            "deprel": tok.deprel,
                            "is_stopword": tok.is_stopword,
                            "is_alpha": tok.is_alpha,
                        }
                        for tok in s.tokens
                    ],
                }
                for s in t.sentences
            ],
        }
        n_tokens = sum(len(s.tokens) for s in t.sentences)
        summary_rows.append(
            [tid, len(t.sentences), n_tokens,
             _fmt(t.demographics.get("age", "")), t.demographics.get("sex", "")]
        )
    _write_json(out_dir / "ingest" / "transcripts.json", doc)
    _write_text(
        out_dir / "ingest" / "summary.csv",
        _csv_text(["transcript_id", "n_sentences", "n_tokens", "age", "sex"], summary_rows),
    )
    _write_manifest(out_dir, "ingest")
    log.info("ingest: %d transcript(s) from %d file(s)", len(transcripts), len(paths))


def load_transcripts(out_dir: Path) -> dict[str, conllu.Transcript]:
    _require_stage(out_dir, "ingest")
    doc = _read_json(out_dir / "ingest" / "transcripts.json")
    out: dict[str, conllu.Transcript] = {}
    for tid, td in doc.items():
        sentences = []
        for sd in td["sentences"]:
            tokens = [conllu.Token(**tok) for tok in sd["tokens"]]
            sentences.append(conllu.SentenceTree(sd["sentence_id"], tokens))
        demo: dict[str, object] = {}
        if td.get("age") is not None:
            demo["age"] = td["age"]
        if td.get("sex") is not None:
            demo["sex"] = td["sex"]
        out[tid] = conllu.Transcript(tid, sentences, demo)
    return out


# ---------------------------------------------------------------------------
# stage: build
# ---------------------------------------------------------------------------


def _load_lexicons(cfg: PipelineConfig) -> tuple[EmotionLexicon, ValenceLexicon, SynonymLexicon | None]:
    emo = EmotionLexicon.from_file(cfg.emotion_lexicon)
    val = ValenceLexicon.from_file(cfg.valence_lexicon or cfg.emotion_lexicon)
    syn = SynonymLexicon.from_file(cfg.synonym_lexicon) if cfg.synonym_lexicon else None
    return emo, val, syn


def stage_build(cfg: PipelineConfig) -> None:
    out_dir = Path(cfg.out_dir)
    transcripts = load_transcripts(out_dir)
    emo, val, syn = _load_lexicons(cfg)
    nets = {}
    dropped = {}
    for tid in sorted(transcripts):
        try:
            net = network.build_syntactic(transcripts[tid], cfg.k)
        except EmptyNetwork as exc:
            dropped[tid] = str(exc)
            log.warning("build: dropped %s (%s)", tid, exc)
            continue
        if syn is not None:
            net = network.enrich_synonyms(net, syn, scope=cfg.synonym_scope)
        net = network.tag_nodes(net, emo, val)
        nets[tid] = net
    if not nets:
        raise TfmnetError("every transcript produced an empty network")
    _write_json(
        out_dir / "build" / "networks.json",
        {tid: network.network_to_dict(n) for tid, n in nets.items()},
    )
    _write_json(out_dir / "build" / "dropped.json", dropped)
    for tid, net in nets.items():
        _write_text(out_dir / "build" / "edges" / f"{tid}.tsv", network.export_edge_list(net))
        _write_text(out_dir / "build" / "nodes" / f"{tid}.tsv", network.export_node_tags(net))
    _write_manifest(out_dir, "build")
    log.info("build: %d network(s), %d dropped", len(nets), len(dropped))


def load_networks(out_dir: Path) -> dict[str, network.Tfmn]:
    _require_stage(out_dir, "build")
    doc = _read_json(out_dir / "build" / "networks.json")
    return {tid: network.network_from_dict(d) for tid, d in doc.items()}


# ---------------------------------------------------------------------------
# stage: metrics
# ---------------------------------------------------------------------------

_METRIC_INT_FIELDS = {
    "n_nodes", "n_edges", "n_components", "largest_component_size",
    "max_degree", "diameter", "core_number", "core_size", "max_clique_size",
}


def stage_metrics(cfg: PipelineConfig) -> None:
    out_dir = Path(cfg.out_dir)
    nets = load_networks(out_dir)
    keys = MetricVector.feature_keys()
    rows = []
    for tid in sorted(nets):
        g = nets[tid].to_graph()
        mv = compute_metrics(
            g,
            seed=derive_seed(cfg.seed, f"communities:{tid}"),
            community_method=cfg.community_method,
        )
        rows.append(
            [tid]
            + [_fmt(getattr(mv, k)) for k in keys]
            + [int(mv.degree_assortativity_defined)]
        )
    _write_text(
        out_dir / "metrics" / "metrics.csv",
        _csv_text(["transcript_id", *keys, "degree_assortativity_defined"], rows),
    )
    _write_manifest(out_dir, "metrics")
    log.info("metrics: %d row(s)", len(rows))


def load_metrics(out_dir: Path) -> dict[str, MetricVector]:
    _require_stage(out_dir, "metrics")
    out = {}
    with open(out_dir / "metrics" / "metrics.csv", newline="") as fh:
        for row in csv.DictReader(fh):
            kwargs = {}
            for k in MetricVector.feature_keys():
                kwargs[k] = int(row[k]) if k in _METRIC_INT_FIELDS else float(row[k])
            kwargs["degree_assortativity_defined"] = bool(int(row["degree_assortativity_defined"]))
            out[row["transcript_id"]] = MetricVector(**kwargs)
    return out


# ---------------------------------------------------------------------------
# stage: emotions
# ---------------------------------------------------------------------------


def stage_emotions(cfg: PipelineConfig) -> None:
    out_dir = Path(cfg.out_dir)
    transcripts = load_transcripts(out_dir)
    emo, _, _ = _load_lexicons(cfg)
    header = (
        ["transcript_id", "m_emotional"]
        + [f"z_{e}" for e in EMOTIONS]
        + [f"n_{e}" for e in EMOTIONS]
        + [f"sig_{e}" for e in EMOTIONS]
    )
    rows = []
    for tid in sorted(transcripts):
        words = [tok.lemma for s in transcripts[tid].sentences for tok in s.tokens]
        prof = emotions.profile_words(
            words,
            emo,
            n_samples=cfg.n_samples,
            seed=derive_seed(cfg.seed, f"null:{tid}"),
            with_replacement=cfg.with_replacement,
        )
        rows.append(
            [tid, prof.m_emotional]
            + [_fmt(prof.z_scores[e]) for e in EMOTIONS]
            + [prof.counts[e] for e in EMOTIONS]
            + [int(prof.significant[e]) for e in EMOTIONS]
        )
    _write_text(out_dir / "emotions" / "profiles.csv", _csv_text(header, rows))
    _write_manifest(out_dir, "emotions")
    log.info("emotions: %d profile(s)", len(rows))


def load_profiles(out_dir: Path) -> dict[str, emotions.EmotionProfile]:
    _require_stage(out_dir, "emotions")
    out = {}
    with open(out_dir / "emotions" / "profiles.csv", newline="") as fh:
        for row in csv.DictReader(fh):
            out[row["transcript_id"]] = emotions.EmotionProfile(
                counts={e: int(row[f"n_{e}"]) for e in EMOTIONS},
                m_emotional=int(row["m_emotional"]),
                z_scores={e: float(row[f"z_{e}"]) for e in EMOTIONS},
                significant={e: bool(int(row[f"sig_{e}"])) for e in EMOTIONS},
            )
    return out


# ---------------------------------------------------------------------------
# stage: train
# ---------------------------------------------------------------------------


def _load_targets(path: str) -> dict[str, dict[str, float]]:
    out: dict[str, dict[str, float]] = {}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            tid = row["transcript_id"]
            out[tid] = {
                t: float(row[t]) for t in TARGET_COLUMNS if row.get(t) not in (None, "")
            }
    return out


def _grid_for(cfg: PipelineConfig, kind: str):
    custom = cfg.gbm_grid if kind == "gbm" else cfg.rfr_grid
    return expand_grid(kind, {k: list(v) for k, v in custom.items()} or None)


def _combo_seed(cfg: PipelineConfig, subset: str, target: str, kind: str) -> int:
    return derive_seed(cfg.seed, f"cv:{subset}:{target}:{kind}")


def _combo_dir(out_dir: Path, stage: str, subset: str, target: str, kind: str) -> Path:
    return out_dir / stage / subset / target / kind


def assemble_features(cfg: PipelineConfig) -> FeatureTable:
    out_dir = Path(cfg.out_dir)
    mets = load_metrics(out_dir)
    profs = load_profiles(out_dir)
    transcripts = load_transcripts(out_dir)
    demo = {
        tid: (t.demographics["age"], t.demographics["sex"])
        for tid, t in transcripts.items()
        if "age" in t.demographics and "sex" in t.demographics
    }
    for tid in sorted(set(transcripts) - set(demo)):
        log.warning("transcript %s has no demographics; it will be dropped", tid)
    targets = _load_targets(cfg.targets_csv)
    return features.assemble(mets, profs, demo, targets)


def stage_train(cfg: PipelineConfig) -> None:
    out_dir = Path(cfg.out_dir)
    _require_stage(out_dir, "metrics")
    _require_stage(out_dir, "emotions")
    table = assemble_features(cfg)
    if table.n_rows < 2 * cfg.cv_k:
        raise TfmnetError(
            f"only {table.n_rows} complete row(s); {2 * cfg.cv_k} needed for {cfg.cv_k}-fold CV"
        )
    (out_dir / "train").mkdir(parents=True, exist_ok=True)
    features.write_csv(table, str(out_dir / "train" / "features.csv"))
    scaled = features.minmax_scale(table, features.TRAIN_RANGE)
    features.write_csv(scaled, str(out_dir / "train" / "features_scaled.csv"))
    _write_json(
        out_dir / "train" / "scaling.json",
        {
            name: {
                "min": rec.col_min, "max": rec.col_max,
                "lo": rec.lo, "hi": rec.hi, "constant": rec.constant,
            }
            for name, rec in (scaled.scaling or {}).items()
        },
    )

    # exploratory correlation artifacts over the full predictor set
    screen_all = features.correlation_screen(table, cfg.correlation_threshold)
    _write_text(
        out_dir / "train" / "correlations.csv",
        _csv_text(
            ["feature", *screen_all.predictors],
            [
                [screen_all.predictors[i]] + [_fmt(float(v)) for v in screen_all.matrix[i]]
                for i in range(len(screen_all.predictors))
            ],
        ),
    )
    _write_text(
        out_dir / "train" / "table1.csv",
        _csv_text(
            ["feature", *table.targets],
            [
                [row["feature"]] + [("" if row[t] is None else _fmt(row[t])) for t in table.targets]
                for row in features.feature_target_table(table, cfg.blank_at)
            ],
        ),
    )

    for subset in cfg.subsets:
        sub = scaled.subset(subset)
        for target in cfg.targets:
            screen = features.correlation_screen(sub, cfg.correlation_threshold, target)
            _write_json(
                out_dir / "train" / subset / target / "screen.json",
                {
                    "threshold": cfg.correlation_threshold,
                    "groups": [list(g) for g in screen.groups],
                    "selected": list(screen.selected),
                    "target_r": {t: dict(screen.target_r[t]) for t in screen.target_r},
                },
            )
            chosen = sub.select(screen.selected)
            y = sub.column(target)
            for kind in cfg.models:
                seed = _combo_seed(cfg, subset, target, kind)
                grid = _grid_for(cfg, kind)
                report = cross_validate(chosen.X, y, grid, k=cfg.cv_k, seed=seed, subset=subset)
                model = fit_ensemble(
                    chosen.X, y, report.chosen.config, seed=derive_seed(seed, "refit")
                )
                d = _combo_dir(out_dir, "train", subset, target, kind)
                doc = report.to_dict()
                doc["features"] = list(screen.selected)
                doc["target"] = target
                doc["model_kind"] = kind
                _write_json(d / "report.json", doc)
                model_doc = model.to_dict()
                model_doc["features"] = list(screen.selected)
                model_doc["target"] = target
                _write_json(d / "model.json", model_doc)
                _write_text(
                    d / "predictions.csv",
                    _csv_text(
                        ["transcript_id", "observed", "oof_prediction", "fold"],
                        [
                            [
                                scaled.transcript_ids[i],
                                _fmt(float(y[i])),
                                _fmt(float(report.predictions[i])),
                                int(report.folds[i]),
                            ]
                            for i in range(len(y))
                        ],
                    ),
                )
    _write_manifest(out_dir, "train")
    log.info("train: %d row(s), subsets=%s", table.n_rows, ",".join(cfg.subsets))


# ---------------------------------------------------------------------------
# stage: explain
# ---------------------------------------------------------------------------


def stage_explain(cfg: PipelineConfig) -> None:
    out_dir = Path(cfg.out_dir)
    _require_stage(out_dir, "train")
    scaled = features.read_csv(str(out_dir / "train" / "features_scaled.csv"))
    for subset in cfg.subsets:
        for target in cfg.targets:
            for kind in cfg.models:
                train_dir = _combo_dir(out_dir, "train", subset, target, kind)
                if not (train_dir / "model.json").is_file():
                    raise MissingUpstreamArtifact("train", str(train_dir / "model.json"))
                model_doc = _read_json(train_dir / "model.json")
                names = list(model_doc["features"])
                model = TrainedEnsemble.from_dict(model_doc)
                chosen = scaled.select(names)
                y = scaled.column(target)
                seed = _combo_seed(cfg, subset, target, kind)
                grid = _grid_for(cfg, kind)

                shap = tree_shap(model, chosen.X, names)
                d = _combo_dir(out_dir, "explain", subset, target, kind)
                ordered_names = shap.ordered_names()
                ordered_vals = shap.ordered_values()
                preds = shap.predictions()
                _write_text(
                    d / "shap.csv",
                    _csv_text(
                        ["transcript_id", "base_value", "prediction", *ordered_names],
                        [
                            [
                                scaled.transcript_ids[i],
                                _fmt(shap.base_value),
                                _fmt(float(preds[i])),
                                *[_fmt(float(v)) for v in ordered_vals[i]],
                            ]
                            for i in range(len(preds))
                        ],
                    ),
                )
                lo, hi = features.SHAP_RANGE
                X_disp = lo + (hi - lo) * chosen.X
                plots = export_plots(shap, X_disp)
                _write_json(d / "plots.json", plots)

                elim = shap_feature_elimination(
                    chosen.X,
                    y,
                    names,
                    grid,
                    k=cfg.cv_k,
                    seed=seed,
                    delta=cfg.delta,
                    n_shuffles=cfg.n_shuffles,
                )
                elim_doc = elim.to_dict()
                elim_doc["final"] = {
                    "pearson_r": elim.final_report.chosen.pearson_r,
                    "p_value": elim.final_report.chosen.p_value,
                    "mae": elim.final_report.chosen.mae,
                    "config": elim.final_report.chosen.config.to_dict(),
                    "selection_rule": elim.final_report.selection_rule,
                }
                _write_json(d / "elimination.json", elim_doc)

                if cfg.n_perm > 0 and elim.selected:
                    final_cols = [names.index(c) for c in elim.selected]
                    perm_reports = permutation_baseline(
                        chosen.X[:, final_cols],
                        y,
                        grid,
                        k=cfg.cv_k,
                        seed=derive_seed(cfg.seed, f"perm:{subset}:{target}:{kind}"),
                        n_perm=cfg.n_perm,
                    )
                    rs = [r.chosen.pearson_r for r in perm_reports]
                    ps = [r.chosen.p_value for r in perm_reports]
                    maes = [r.chosen.mae for r in perm_reports]
                    _write_json(
                        d / "permuted.json",
                        {
                            "n_perm": cfg.n_perm,
                            "features": list(elim.selected),
                            "pearson_r": rs,
                            "p_values": ps,
                            "mae": maes,
                            "mean_r": float(np.mean(rs)),
                            "mean_mae": float(np.mean(maes)),
                            "share_significant": float(np.mean([p < 0.05 for p in ps])),
                        },
                    )
    _write_manifest(out_dir, "explain")
    log.info("explain: done")


# ---------------------------------------------------------------------------
# stage: report  (delegated to report.py, kept behind the same interface)
# ---------------------------------------------------------------------------


def stage_report(cfg: PipelineConfig) -> None:
    from . import report as report_mod

    report_mod.stage_report(cfg)


# ---------------------------------------------------------------------------
# runner
# ---------------------------------------------------------------------------

_STAGE_FUNCS: dict[str, Callable[[PipelineConfig], None]] = {
    "ingest": stage_ingest,
    "build": stage_build,
    "metrics": stage_metrics,
    "emotions": stage_emotions,
    "train": stage_train,
    "explain": stage_explain,
    "report": stage_report,
}


def run(cfg: PipelineConfig, upto: str | None = None) -> None:
    """Execute the stages in order, stopping after ``upto`` when given.

    A failing stage aborts the run with its name; artifacts written so far
    are left in place for inspection.
    """
    if upto is not None and upto not in STAGES:
        raise TfmnetError(f"unknown stage {upto!r}")
    for stage in STAGES:
        fn = _STAGE_FUNCS[stage]
        try:
            fn(cfg)
        except TfmnetError:
            raise
        except Exception as exc:  # noqa: BLE001 - annotate with the stage name
            raise StageFailure(stage, exc) from exc
        if stage == upto:
            break
