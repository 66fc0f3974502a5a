"""Command-line surface tying the pipeline together.

Every command resolves a flat key-value configuration (defaults, then an
optional JSON config file, then --set overrides), logs it, and writes its
artifacts plus a JSON run manifest.  Identical inputs, config and seeds
produce byte-identical artifacts; manifests differ only inside their
"timing" field.

Exit codes: 0 success, 1 validation failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .choicemodel import WeightVector, estimate_weights, observations_from_dataset
from .classifier import LinearModel, TrainConfig, evaluate_accuracy, predict, score, train_ova
from .core import Dataset, DisplayType, SessionRecord, validate
from .errors import AttrankError, ConfigError, IncompleteInputError
from .evaluation import MetricReport, ndcg_report, random_baseline
from .features import GrayImage, build_vocabulary, dense_descriptors, quantize, Vocabulary
from .formats import (
    FormatError,
    load_bundle,
    read_features_jsonl,
    read_items_csv,
    read_observations_jsonl,
    read_sessions_jsonl,
    read_weights_json,
    save_bundle,
    write_features_jsonl,
    write_json,
    write_weights_json,
)
from .kernel import KernelMapConfig, approx_map
from .rerank import (
    RankedList,
    RerankConfig,
    RerankMethod,
    SigmoidMode,
    pooled_preference_pairs,
    ranksvm_features,
    ranksvm_rerank,
    ranksvm_train,
    rerank,
)
from .sim import FixedClicks, SimConfig, TruncatedPoissonClicks, simulate_sessions, well_separated_spec, uniform_spec

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2

# Every known configuration key with its default.  Unknown keys are
# rejected, so typos fail loudly instead of silently using defaults.
CONFIG_DEFAULTS: dict[str, object] = {
    "kernel.order": 3,
    "kernel.period": 0.65,
    "kernel.gamma": 1.0,
    "svm.lambda": None,
    "svm.seed": 0,
    "svm.tolerance": 1e-8,
    "svm.max_epochs": 2000,
    "svm.positives_per_class": 450,
    "rerank.method": "PMFL",
    "rerank.rho": 3,
    "rerank.sigmoid_mode": "increasing",
    "rerank.C": 1.0,
    "rerank.pair_scope": "session",
    "rerank.seed": 0,
    "sim.n_sessions": 484,
    "sim.per_type_counts": [3, 3, 3],
    "sim.clicks": "fixed:2",
    "sim.true_omega": [1.0, 1.0, 1.0],
    "sim.seed": 0,
    "sim.feature_mode": "none",
    "sim.feature_dim": 30,
    "split.train_fraction": 0.75,
    "split.seed": 0,
    "eval.trials": 10,
    "eval.seed": 0,
    "eval.kmax": None,
    "vocab.k": 1000,
    "vocab.seed": 0,
    "vocab.per_class": 30,
    "features.bin_sizes": [4, 6, 8],
    "features.step": 4,
    "choice.method": "mle",
}


def resolve_config(config_file: str | None, overrides: Sequence[str]) -> dict[str, object]:
    cfg = dict(CONFIG_DEFAULTS)

    def apply(key: str, value: object) -> None:
        if key not in cfg:
            raise ConfigError(f"unknown configuration key: {key!r}")
        cfg[key] = value

    if config_file:
        payload = json.loads(Path(config_file).read_text())
        if not isinstance(payload, dict):
            raise ConfigError(f"{config_file}: config must be a JSON object")
        for key, value in payload.items():
            apply(key, value)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, _, raw = item.partition("=")
        try:
            value: object = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        apply(key.strip(), value)
    return cfg


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_manifest(
    out_base: Path,
    command: str,
    cfg: dict[str, object],
    inputs: Sequence[Path],
    outputs: Sequence[Path],
    started: float,
    info: dict | None = None,
) -> None:
    manifest = {
        "command": command,
        "package_version": __version__,
        "config": cfg,
        "inputs": {str(p): _sha256(p) for p in inputs if p.is_file()},
        "outputs": {p.name: _sha256(p) for p in outputs if p.is_file()},
        "info": info or {},
        "timing": {"started_unix": started, "wall_seconds": time.time() - started},
    }
    if out_base.is_dir():
        path = out_base / "manifest.json"
    else:
        path = out_base.with_name(out_base.name + ".manifest.json")
    write_json(path, manifest)


def _log_config(command: str, cfg: dict[str, object]) -> None:
    print(f"[{command}] resolved config: {json.dumps(cfg, sort_keys=True)}", file=sys.stderr)


def _require(path: Path, what: str) -> Path:
    if not path.exists():
        raise ConfigError(f"missing {what}: {path} (run the producing command first)")
    return path


def _kernel_config(cfg: dict[str, object]) -> KernelMapConfig:
    return KernelMapConfig(
        order=int(cfg["kernel.order"]),
        period=float(cfg["kernel.period"]),
        gamma=float(cfg["kernel.gamma"]),
    )


def _train_config(cfg: dict[str, object]) -> TrainConfig:
    lam = cfg["svm.lambda"]
    return TrainConfig(
        regularization=None if lam is None else float(lam),
        tolerance=float(cfg["svm.tolerance"]),
        max_epochs=int(cfg["svm.max_epochs"]),
        seed=int(cfg["svm.seed"]),
        positives_per_class=int(cfg["svm.positives_per_class"]),
    )


def _rerank_config(cfg: dict[str, object], method: str | None = None, rho: int | None = None) -> RerankConfig:
    return RerankConfig(
        method=RerankMethod(method or str(cfg["rerank.method"])),
        rho=int(rho if rho is not None else cfg["rerank.rho"]),
        sigmoid_mode=SigmoidMode(str(cfg["rerank.sigmoid_mode"])),
    )


def _sim_config(cfg: dict[str, object]) -> SimConfig:
    law_spec = str(cfg["sim.clicks"])
    kind, _, arg = law_spec.partition(":")
    if kind == "fixed":
        law = FixedClicks(int(arg or 2))
    elif kind == "poisson":
        law = TruncatedPoissonClicks(float(arg or 1.0))
    else:
        raise ConfigError(f"unknown click law {law_spec!r} (use fixed:K or poisson:LAM)")
    mode = str(cfg["sim.feature_mode"])
    dim = int(cfg["sim.feature_dim"])
    if mode == "none":
        spec = None
    elif mode == "separated":
        spec = well_separated_spec(dim)
    elif mode == "uniform":
        spec = uniform_spec(dim)
    else:
        raise ConfigError(f"unknown feature mode {mode!r}")
    return SimConfig(
        n_sessions=int(cfg["sim.n_sessions"]),
        per_type_counts=tuple(int(v) for v in cfg["sim.per_type_counts"]),  # type: ignore[arg-type]
        clicks=law,
        true_omega=WeightVector([float(v) for v in cfg["sim.true_omega"]]),
        seed=int(cfg["sim.seed"]),
        feature_spec=spec,
    )


def split_sessions(
    sessions: Sequence[SessionRecord], train_fraction: float, seed: int
) -> tuple[list[SessionRecord], list[SessionRecord]]:
    """Deterministic shuffled split; the first fraction trains."""
    if not 0.0 < train_fraction < 1.0:
        raise ConfigError("split.train_fraction must lie in (0, 1)")
    order = np.random.default_rng(seed).permutation(len(sessions))
    n_train = int(len(sessions) * train_fraction)
    train = [sessions[i] for i in order[:n_train]]
    test = [sessions[i] for i in order[n_train:]]
    return train, test


def _mapped_scores(
    dataset: Dataset, model: LinearModel, kcfg: KernelMapConfig
) -> tuple[dict[str, object], dict[str, DisplayType]]:
    """Classifier scores and predicted types for every featured item."""
    scores_by_item: dict[str, object] = {}
    labels_by_item: dict[str, DisplayType] = {}
    for item_id, hist in dataset.features.items():
        mapped = approx_map(hist, kcfg)
        scores_by_item[item_id] = score(model, mapped)
        labels_by_item[item_id] = predict(model, mapped)
    return scores_by_item, labels_by_item


# ---------------------------------------------------------------- commands


def cmd_ingest(args: argparse.Namespace, cfg: dict[str, object]) -> int:
    started = time.time()
    items = read_items_csv(_require(Path(args.items), "items file"))
    sessions = read_sessions_jsonl(_require(Path(args.sessions), "sessions file"))
    features = read_features_jsonl(Path(args.features)) if args.features else {}
    dataset = Dataset(items, sessions, features)
    report = validate(dataset)
    for v in report:
        print(f"violation [{v.code}] {v.subject}: {v.message}")
    if not report.is_valid:
        print(f"{len(report)} violation(s); bundle not written")
        return EXIT_VALIDATION
    out = Path(args.out)
    save_bundle(out, dataset)
    inputs = [Path(args.items), Path(args.sessions)] + ([Path(args.features)] if args.features else [])
    _write_manifest(out, "ingest", cfg, inputs, sorted(out.iterdir()), started)
    print(f"ingested {len(items)} items, {len(sessions)} sessions -> {out}")
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace, cfg: dict[str, object]) -> int:
    started = time.time()
    dataset = simulate_sessions(_sim_config(cfg))
    out = Path(args.out)
    save_bundle(out, dataset)
    _write_manifest(out, "simulate", cfg, [], sorted(out.iterdir()), started)
    print(f"simulated {len(dataset.sessions)} sessions -> {out}")
    return EXIT_OK


def cmd_build_vocab(args: argparse.Namespace, cfg: dict[str, object]) -> int:
    started = time.time()
    items = read_items_csv(_require(Path(args.items), "items file"))
    image_dir = _require(Path(args.images), "image directory")
    by_class: dict[DisplayType, list[str]] = {t: [] for t in DisplayType}
    for item_id, item in sorted(items.items()):
        if item.display_type is not None and (image_dir / f"{item_id}.pgm").exists():
            by_class[item.display_type].append(item_id)
    rng = np.random.default_rng(int(cfg["vocab.seed"]))
    chosen: list[str] = []
    per_class = int(cfg["vocab.per_class"])
    for t in DisplayType:
        ids = by_class[t]
        take = min(per_class, len(ids))
        if take:
            chosen.extend(ids[i] for i in sorted(rng.choice(len(ids), size=take, replace=False)))
    sets = [
        dense_descriptors(
            GrayImage.from_pgm(image_dir / f"{item_id}.pgm"),
            bin_sizes=[int(b) for b in cfg["features.bin_sizes"]],  # type: ignore[union-attr]
            step=int(cfg["features.step"]),
        )
        for item_id in chosen
    ]
    vocab = build_vocabulary(sets, k=int(cfg["vocab.k"]), seed=int(cfg["vocab.seed"]))
    out = Path(args.out)
    write_json(
        out,
        {
            "format": "attrank-vocab",
            "version": 1,
            "k": vocab.k,
            "seed": vocab.training_seed,
            "centers": [[float(v) for v in row] for row in vocab.centers],
        },
    )
    _write_manifest(out, "build-vocab", cfg, [Path(args.items)], [out], started,
                    info={"source_images": len(chosen)})
    print(f"built {vocab.k}-word vocabulary from {len(chosen)} images -> {out}")
    return EXIT_OK


def _load_vocab(path: Path) -> Vocabulary:
    payload = json.loads(path.read_text())
    if payload.get("format") != "attrank-vocab":
        raise ConfigError(f"{path}: not a vocabulary document")
    return Vocabulary(np.asarray(payload["centers"], dtype=np.float64), int(payload["seed"]))


def cmd_extract_features(args: argparse.Namespace, cfg: dict[str, object]) -> int:
    started = time.time()
    vocab = _load_vocab(_require(Path(args.vocab), "vocabulary"))
    image_dir = _require(Path(args.images), "image directory")
    feats = {}
    for pgm in sorted(image_dir.glob("*.pgm")):
        dset = dense_descriptors(
            GrayImage.from_pgm(pgm),
            bin_sizes=[int(b) for b in cfg["features.bin_sizes"]],  # type: ignore[union-attr]
            step=int(cfg["features.step"]),
        )
        feats[pgm.stem] = quantize(dset, vocab)
    out = Path(args.out)
    write_features_jsonl(out, feats)
    _write_manifest(out, "extract-features", cfg, [Path(args.vocab)], [out], started,
                    info={"images": len(feats)})
    print(f"extracted features for {len(feats)} images -> {out}")
    return EXIT_OK


def cmd_train_classifier(args: argparse.Namespace, cfg: dict[str, object]) -> int:
    started = time.time()
    items = read_items_csv(_require(Path(args.items), "items file"))
    feats = read_features_jsonl(_require(Path(args.features), "features file"))
    kcfg = _kernel_config(cfg)
    ids = [i for i in sorted(feats) if i in items and items[i].display_type is not None]
    if not ids:
        raise ConfigError("no labeled items with features to train on")
    X = np.stack([approx_map(feats[i], kcfg) for i in ids])
    labels = [items[i].display_type for i in ids]
    model = train_ova(X, labels, _train_config(cfg))
    # Everything not drawn into the training pool is the held-out set.
    used = {int(j) for idxs in model.metadata["train_indices"].values() for j in idxs}
    rest = [j for j in range(len(ids)) if j not in used]
    holdout = evaluate_accuracy(model, X[rest], [labels[j] for j in rest]) if rest else None
    out = Path(args.out)
    write_json(out, model.to_json())
    _write_manifest(
        out, "train-classifier", cfg, [Path(args.items), Path(args.features)], [out], started,
        info={"train_size": len(used), "holdout_size": len(rest), "holdout_accuracy": holdout},
    )
    msg = f"trained on {len(used)} examples -> {out}"
    if holdout is not None:
        msg += f" (held-out accuracy {holdout:.4f} on {len(rest)})"
    print(msg)
    return EXIT_OK


def _load_model(path: Path) -> LinearModel:
    return LinearModel.from_json(json.loads(path.read_text()))


def cmd_classify(args: argparse.Namespace, cfg: dict[str, object]) -> int:
    started = time.time()
    model = _load_model(_require(Path(args.model), "classifier model"))
    feats = read_features_jsonl(_require(Path(args.features), "features file"))
    kcfg = _kernel_config(cfg)
    lines = ["item_id,predicted,s_p,s_m,s_f"]
    for item_id in sorted(feats):
        mapped = approx_map(feats[item_id], kcfg)
        s = score(model, mapped)
        label = predict(model, mapped)
        lines.append(f"{item_id},{label.code},{s.s_p!r},{s.s_m!r},{s.s_f!r}")
    out = Path(args.out)
    out.write_text("\n".join(lines) + "\n")
    _write_manifest(out, "classify", cfg, [Path(args.model), Path(args.features)], [out], started)
    print(f"classified {len(feats)} items -> {out}")
    return EXIT_OK


def cmd_estimate_weights(args: argparse.Namespace, cfg: dict[str, object]) -> int:
    started = time.time()
    if args.observations:
        obs = read_observations_jsonl(_require(Path(args.observations), "observations file"))
        inputs = [Path(args.observations)]
    elif args.bundle:
        dataset = load_bundle(_require(Path(args.bundle), "dataset bundle"))
        obs = observations_from_dataset(dataset)
        inputs = [Path(args.bundle) / name for name in ("items.csv", "sessions.jsonl")]
    else:
        raise ConfigError("estimate-weights needs --bundle or --observations")
    method = str(cfg["choice.method"])
    omega = estimate_weights(obs, method)  # type: ignore[arg-type]
    out = Path(args.out)
    write_weights_json(out, omega, method)
    _write_manifest(out, "estimate-weights", cfg, inputs, [out], started,
                    info={"observations": len(obs)})
    names = [t.name.lower() for t in DisplayType]
    print("estimated weights (" + method + "): "
          + ", ".join(f"{n}={omega.for_type(t)!r}" for n, t in zip(names, DisplayType)))
    return EXIT_OK


def _ranked_rel(ranked: RankedList, session: SessionRecord) -> list[int]:
    return [1 if item_id in session.clicked else 0 for item_id in ranked.item_ids]


def cmd_rerank(args: argparse.Namespace, cfg: dict[str, object]) -> int:
    started = time.time()
    dataset = load_bundle(_require(Path(args.bundle), "dataset bundle"))
    model = _load_model(_require(Path(args.model), "classifier model"))
    omega = read_weights_json(_require(Path(args.weights), "weights file"))
    rcfg = _rerank_config(cfg)
    scores_by_item, _ = _mapped_scores(dataset, model, _kernel_config(cfg))
    out = Path(args.out)
    with open(out, "w") as fh:
        for sess in sorted(dataset.sessions, key=lambda s: s.session_id):
            ranked = rerank(sess, scores_by_item, omega, rcfg)  # type: ignore[arg-type]
            fh.write(
                json.dumps(
                    {
                        "session_id": sess.session_id,
                        "ranked": list(ranked.item_ids),
                        "scores": [float(s) for s in ranked.scores],
                    },
                    sort_keys=True,
                    separators=(",", ":"),
                )
                + "\n"
            )
    _write_manifest(out, "rerank", cfg,
                    [Path(args.model), Path(args.weights)], [out], started)
    print(f"re-ranked {len(dataset.sessions)} sessions ({rcfg.method.value}) -> {out}")
    return EXIT_OK


def _report_rows(reports: Sequence[MetricReport]) -> list[str]:
    rows = ["method,k,ndcg"]
    for rep in reports:
        for k in sorted(rep.ndcg):
            rows.append(f"{rep.method},{k},{rep.ndcg[k]!r}")
    return rows


def cmd_evaluate(args: argparse.Namespace, cfg: dict[str, object]) -> int:
    started = time.time()
    dataset = load_bundle(_require(Path(args.bundle), "dataset bundle"))
    model = _load_model(_require(Path(args.model), "classifier model"))
    omega = read_weights_json(_require(Path(args.weights), "weights file"))
    kcfg = _kernel_config(cfg)
    scores_by_item, labels_by_item = _mapped_scores(dataset, model, kcfg)
    missing = [
        item_id
        for sess in dataset.sessions
        for item_id in sess.displayed
        if item_id not in scores_by_item
    ]
    if missing:
        raise IncompleteInputError(f"no features for displayed item {missing[0]!r}")

    train, test = split_sessions(
        dataset.sessions, float(cfg["split.train_fraction"]), int(cfg["split.seed"])
    )
    svm_feats = {
        item_id: ranksvm_features(scores_by_item[item_id], labels_by_item[item_id])  # type: ignore[arg-type]
        for item_id in scores_by_item
    }
    rank_model = ranksvm_train(
        pooled_preference_pairs(train, scope=str(cfg["rerank.pair_scope"])),
        svm_feats,
        C=float(cfg["rerank.C"]),
        seed=int(cfg["rerank.seed"]),
    )

    rho = int(cfg["rerank.rho"])
    kmax = cfg["eval.kmax"]
    kmax = int(kmax) if kmax is not None else None
    reports: list[MetricReport] = []
    for tag, rcfg in (
        (f"PMFP^{rho}", _rerank_config(cfg, method="PMFP", rho=rho)),
        (f"PMFS^{rho}", _rerank_config(cfg, method="PMFS", rho=rho)),
        ("PMFL", _rerank_config(cfg, method="PMFL", rho=3)),
    ):
        rel = [
            _ranked_rel(rerank(s, scores_by_item, omega, rcfg), s)  # type: ignore[arg-type]
            for s in test
        ]
        reports.append(ndcg_report(rel, tag, kmax))
    svm_rel = [_ranked_rel(ranksvm_rerank(s, rank_model, svm_feats), s) for s in test]
    svm_rep = ndcg_report(svm_rel, "ranksvm", kmax)
    reports.append(svm_rep)
    display_rel = [[1 if i in s.clicked else 0 for i in s.displayed] for s in test]
    reports.append(
        random_baseline(display_rel, trials=int(cfg["eval.trials"]), seed=int(cfg["eval.seed"]), k_max=kmax)
    )

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "report.csv"
    csv_path.write_text("\n".join(_report_rows(reports)) + "\n")
    json_path = out_dir / "report.json"
    write_json(
        json_path,
        {
            "methods": {r.method: {str(k): v for k, v in r.ndcg.items()} for r in reports},
            "sessions": {"total": len(dataset.sessions), "train": len(train), "test": len(test)},
            "excluded": {r.method: r.excluded_sessions for r in reports},
            "config": cfg,
        },
    )
    _write_manifest(out_dir, "evaluate", cfg,
                    [Path(args.model), Path(args.weights)], [csv_path, json_path], started)
    for rep in reports:
        first = rep.ndcg.get(1)
        print(f"{rep.method}: nDCG@1 = {first if first is not None else 'n/a'}")
    print(f"report -> {csv_path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="attrank",
        description="Visual-attractiveness scoring and search re-ranking toolkit",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file of configuration overrides")
    common.add_argument(
        "--set",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override one configuration key (repeatable)",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=argparse.ArgumentParser)

    def add_parser(name: str, help_text: str) -> argparse.ArgumentParser:
        return sub.add_parser(name, help=help_text, parents=[common])

    p = add_parser("ingest", "validate raw files and persist a dataset bundle")
    p.add_argument("--items", required=True)
    p.add_argument("--sessions", required=True)
    p.add_argument("--features")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ingest)

    p = add_parser("simulate", "generate a synthetic dataset bundle")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = add_parser("build-vocab", "cluster descriptors into a visual vocabulary")
    p.add_argument("--images", required=True)
    p.add_argument("--items", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_build_vocab)

    p = add_parser("extract-features", "quantize images against a vocabulary")
    p.add_argument("--images", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_extract_features)

    p = add_parser("train-classifier", "train the one-vs-all display-type classifier")
    p.add_argument("--features", required=True)
    p.add_argument("--items", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train_classifier)

    p = add_parser("classify", "score and label items with a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_classify)

    p = add_parser("estimate-weights", "fit preference odds from click observations")
    p.add_argument("--bundle")
    p.add_argument("--observations")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_estimate_weights)

    p = add_parser("rerank", "re-rank every session by attractiveness")
    p.add_argument("--bundle", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--weights", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_rerank)

    p = add_parser("evaluate", "compare re-rankers against baselines with nDCG")
    p.add_argument("--bundle", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--weights", required=True)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_evaluate)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args.config, args.set)
        _log_config(args.command, cfg)
        return args.func(args, cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except FileNotFoundError as exc:
        print(f"error: missing file: {exc.filename}", file=sys.stderr)
        return EXIT_USAGE
    except AttrankError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
