"""End-to-end pipeline runs on the bundled fixture corpus, stage wiring,
config loading, and the command-line entry point."""

import hashlib
import json
from pathlib import Path

import pytest

from tfmnet import pipeline
from tfmnet.cli import main
from tfmnet.config import load_config
from tfmnet.emotions import EMOTIONS
from tfmnet.errors import (
    ConfigError,
    MissingUpstreamArtifact,
    StageFailure,
    TfmnetError,
)

from conftest import FIXTURES_DIR


@pytest.fixture(scope="module")
def full_run(tmp_path_factory):
    if not (FIXTURES_DIR / "config.toml").is_file():
        pytest.skip("fixture bundle missing; run tools/make_fixtures.py")
    out = tmp_path_factory.mktemp("run_a")
    cfg = load_config(FIXTURES_DIR / "config.toml", env={"TFMNET_OUT_DIR": str(out)})
    pipeline.run(cfg)
    return cfg, out


TINY_DOC = """\
# newdoc id = {tid}
# age = 8.0
# sex = f
# sent_id = {tid}-s1
1\tDogs\tdog\tNOUN\t_\t_\t2\tnsubj\t_\t_
2\trun\trun\tVERB\t_\t_\t0\troot\t_\t_
"""


def write_tiny_corpus(root: Path, ids=("t1", "t2")) -> Path:
    corpus = root / "corpus"
    corpus.mkdir()
    for tid in ids:
        (corpus / f"{tid}.conllu").write_text(TINY_DOC.format(tid=tid))
    return corpus


def tiny_config(root: Path, **extra) -> Path:
    """A config whose required paths exist; lexicons borrowed from fixtures."""
    lines = [
        f'corpus_dir = "{root / "corpus"}"',
        f'targets_csv = "{FIXTURES_DIR / "targets.csv"}"',
        f'emotion_lexicon = "{FIXTURES_DIR / "emotions.tsv"}"',
        f'out_dir = "{root / "out"}"',
    ]
    lines += [f"{k} = {v}" for k, v in extra.items()]
    path = root / "config.toml"
    path.write_text("\n".join(lines) + "\n")
    return path


# ---------------------------------------------------------------- config


def test_config_env_overrides(tmp_path):
    path = tiny_config(tmp_path)
    write_tiny_corpus(tmp_path)
    cfg = load_config(path, env={"TFMNET_K": "6", "TFMNET_WITH_REPLACEMENT": "true"})
    assert cfg.k == 6
    assert cfg.with_replacement is True
    with pytest.raises(ConfigError, match="TFMNET_K"):
        load_config(path, env={"TFMNET_K": "four"})


def test_config_rejects_unknown_keys(tmp_path):
    write_tiny_corpus(tmp_path)
    path = tiny_config(tmp_path, window=3)
    with pytest.raises(ConfigError, match="window"):
        load_config(path, env={})


def test_config_requires_core_paths(tmp_path):
    path = tmp_path / "config.toml"
    path.write_text('k = 4\n')
    with pytest.raises(ConfigError, match="required"):
        load_config(path, env={})
    with pytest.raises(ConfigError, match="not found"):
        load_config(tmp_path / "absent.toml", env={})


def test_config_validates_values(tmp_path):
    write_tiny_corpus(tmp_path)
    path = tiny_config(tmp_path)
    with pytest.raises(ConfigError, match="synonym_scope"):
        load_config(path, env={"TFMNET_SYNONYM_SCOPE": "global"})
    with pytest.raises(ConfigError, match="n_samples"):
        load_config(path, env={"TFMNET_N_SAMPLES": "50"})


def test_config_grid_none_and_relative_paths():
    if not (FIXTURES_DIR / "config.toml").is_file():
        pytest.skip("fixture bundle missing")
    cfg = load_config(FIXTURES_DIR / "config.toml", env={})
    # "none" grid entries become real Nones, lists become tuples
    assert None in cfg.rfr_grid["max_depth"]
    assert None in cfg.rfr_grid["max_leaf_nodes"]
    assert isinstance(cfg.gbm_grid["n_estimators"], tuple)
    # relative paths were resolved against the config file's directory
    assert Path(cfg.corpus_dir).is_absolute()
    assert Path(cfg.corpus_dir).is_dir()


# ---------------------------------------------------------------- full run layout


def test_all_stage_manifests_written(full_run):
    _, out = full_run
    for stage in pipeline.STAGES:
        manifest = out / stage / "manifest.json"
        assert manifest.is_file(), stage
        doc = json.loads(manifest.read_text())
        assert doc["stage"] == stage
        assert doc["files"]


def test_manifest_hashes_match_file_contents(full_run):
    _, out = full_run
    doc = json.loads((out / "ingest" / "manifest.json").read_text())
    digest = hashlib.sha256((out / "ingest" / "summary.csv").read_bytes()).hexdigest()
    assert doc["files"]["summary.csv"] == digest


def test_loaders_round_trip(full_run):
    _, out = full_run
    transcripts = pipeline.load_transcripts(out)
    networks = pipeline.load_networks(out)
    metrics = pipeline.load_metrics(out)
    profiles = pipeline.load_profiles(out)
    ids = sorted(transcripts)
    assert len(ids) == 10
    assert sorted(networks) == ids
    assert sorted(metrics) == ids
    assert sorted(profiles) == ids
    for tid in ids:
        assert transcripts[tid].sentences
        net = networks[tid]
        assert net.nodes == sorted(net.nodes)
        assert metrics[tid].n_nodes == len(net.nodes)
        assert len(profiles[tid].z_vector()) == len(EMOTIONS)


def test_flagship_self_reference_link_survives_the_pipeline(full_run):
    _, out = full_run
    networks = pipeline.load_networks(out)
    tid = next(t for t in networks if "05" in t)
    net = networks[tid]
    assert "i" in net.nodes and "sick" in net.nodes
    assert net.has_edge("i", "sick")


def test_train_and_explain_artifacts(full_run):
    cfg, out = full_run
    assert (out / "train" / "features.csv").is_file()
    assert (out / "train" / "features_scaled.csv").is_file()
    assert (out / "train" / "scaling.json").is_file()
    n_rows = len((out / "train" / "features.csv").read_text().splitlines()) - 1
    combos = 0
    for subset in cfg.subsets:
        for target in cfg.targets:
            for kind in cfg.models:
                d = out / "train" / subset / target / kind
                report = json.loads((d / "report.json").read_text())
                assert report["model_kind"] == kind
                assert report["target"] == target
                assert len(report["predictions"]) == n_rows
                preds_rows = (d / "predictions.csv").read_text().splitlines()
                assert len(preds_rows) == n_rows + 1
                e = out / "explain" / subset / target / kind
                assert (e / "shap.csv").is_file()
                assert (e / "plots.json").is_file()
                assert (e / "elimination.json").is_file()
                combos += 1
    assert combos == len(cfg.subsets) * len(cfg.targets) * len(cfg.models)
    # at least one combo keeps features after elimination and runs the baseline
    assert list(out.glob("explain/*/*/*/permuted.json"))


def test_report_artifacts(full_run):
    _, out = full_run
    report = out / "report"
    for name in (
        "table1_correlations.csv",
        "table2_combined.csv",
        "table3_network.csv",
        "table4_emotion.csv",
        "table5_permuted.csv",
        "feature_codes.csv",
        "cdf.csv",
    ):
        assert (report / name).is_file(), name
    assert (report / "fig_cdf.png").stat().st_size > 0
    assert list(report.glob("fig_beeswarm_*.png"))
    assert list(report.glob("fig_bar_*.png"))
    assert list(report.glob("fig_heatmap_*.png"))
    cdf_rows = (report / "cdf.csv").read_text().splitlines()
    assert cdf_rows[0] == "k,cumulative_fraction"
    fractions = [float(r.split(",")[1]) for r in cdf_rows[1:]]
    assert fractions == sorted(fractions)
    assert fractions[-1] == pytest.approx(1.0)


def test_rerun_of_early_stages_is_byte_identical(full_run, tmp_path):
    _, out_a = full_run
    cfg_b = load_config(
        FIXTURES_DIR / "config.toml", env={"TFMNET_OUT_DIR": str(tmp_path / "run_b")}
    )
    pipeline.run(cfg_b, upto="metrics")
    for stage in ("ingest", "build", "metrics"):
        a = (out_a / stage / "manifest.json").read_bytes()
        b = (tmp_path / "run_b" / stage / "manifest.json").read_bytes()
        assert a == b, stage


# ---------------------------------------------------------------- stage wiring


def test_stages_refuse_to_run_out_of_order(tmp_path):
    write_tiny_corpus(tmp_path)
    cfg = load_config(tiny_config(tmp_path), env={})
    with pytest.raises(MissingUpstreamArtifact, match="ingest"):
        pipeline.stage_build(cfg)
    with pytest.raises(MissingUpstreamArtifact, match="build"):
        pipeline.stage_metrics(cfg)
    with pytest.raises(MissingUpstreamArtifact, match="metrics"):
        pipeline.stage_train(cfg)
    with pytest.raises(MissingUpstreamArtifact, match="train"):
        pipeline.stage_explain(cfg)


def test_run_rejects_unknown_stage(tmp_path):
    write_tiny_corpus(tmp_path)
    cfg = load_config(tiny_config(tmp_path), env={})
    with pytest.raises(TfmnetError, match="unknown stage"):
        pipeline.run(cfg, upto="summarise")


def test_run_wraps_unexpected_errors_with_the_stage_name(tmp_path):
    write_tiny_corpus(tmp_path)
    bad = tmp_path / "demo.csv"
    bad.write_text("transcript_id,years\nt1,9\n")  # no age/sex columns
    path = tiny_config(tmp_path, demographics_csv=f'"{bad}"')
    cfg = load_config(path, env={})
    with pytest.raises(StageFailure, match="ingest") as err:
        pipeline.run(cfg)
    assert err.value.stage == "ingest"


def test_ingest_rejects_duplicate_transcript_ids(tmp_path):
    write_tiny_corpus(tmp_path, ids=("t1",))
    (tmp_path / "corpus" / "copy.conllu").write_text(TINY_DOC.format(tid="t1"))
    cfg = load_config(tiny_config(tmp_path), env={})
    with pytest.raises(TfmnetError, match="duplicate transcript id"):
        pipeline.stage_ingest(cfg)


def test_demographics_csv_overrides_corpus_comments(tmp_path):
    write_tiny_corpus(tmp_path)
    demo = tmp_path / "demo.csv"
    demo.write_text("transcript_id,age,sex\nt1,12.5,M\n")
    path = tiny_config(tmp_path, demographics_csv=f'"{demo}"')
    cfg = load_config(path, env={})
    pipeline.stage_ingest(cfg)
    transcripts = pipeline.load_transcripts(Path(cfg.out_dir))
    assert transcripts["t1"].demographics["age"] == 12.5
    assert transcripts["t1"].demographics["sex"] == "m"  # normalised
    assert transcripts["t2"].demographics["age"] == 8.0  # untouched


# ---------------------------------------------------------------- CLI


def test_cli_exit_code_for_bad_config(tmp_path):
    assert main(["run", "--config", str(tmp_path / "absent.toml")]) == 2


def test_cli_exit_code_for_stage_error(tmp_path):
    (tmp_path / "corpus").mkdir()  # no .conllu files inside
    path = tiny_config(tmp_path)
    assert main(["run", "--config", str(path)]) == 3


def test_cli_ingest_and_cdf(tmp_path, capsys, monkeypatch):
    monkeypatch.delenv("TFMNET_OUT_DIR", raising=False)
    write_tiny_corpus(tmp_path)
    path = tiny_config(tmp_path)
    assert main(["ingest", "--config", str(path), "-v"]) == 0
    assert main(["cdf", "--config", str(path)]) == 0
    out = capsys.readouterr().out
    lines = out.strip().splitlines()
    assert lines[0] == "k\tcumulative_fraction"
    assert lines[1].startswith("1\t1.0000")  # dog-run is the only pair


def test_cli_seed_and_permute_overrides(tmp_path):
    write_tiny_corpus(tmp_path)
    path = tiny_config(tmp_path)
    from tfmnet.cli import _apply_overrides, _build_parser

    args = _build_parser().parse_args(
        ["run", "--config", str(path), "--seed", "99", "--permute", "0", "--subset", "network"]
    )
    cfg = _apply_overrides(load_config(path, env={}), args)
    assert cfg.seed == 99
    assert cfg.n_perm == 0
    assert cfg.subsets == ("network",)
    bad = _build_parser().parse_args(["run", "--config", str(path), "--permute", "-1"])
    with pytest.raises(ConfigError, match="permute"):
        _apply_overrides(load_config(path, env={}), bad)
