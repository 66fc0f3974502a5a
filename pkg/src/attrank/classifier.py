"""One-vs-all linear classifiers over mapped features.

Each display type gets its own hyperplane trained against the other types'
training positives; the predicted type is the argmax of the three decision
values, with exact ties broken by the canonical type order (Person,
Mannequin, Flat).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .core import DISPLAY_TYPES, DisplayType
from .errors import DomainError, InsufficientDataError, ShapeError
from .hinge import solve_l1_hinge


@dataclass(frozen=True)
class TrainConfig:
    """Training protocol knobs.

    ``regularization`` is the L2 coefficient on the mean-hinge objective
    lambda/2 ||w||^2 + mean hinge; ``None`` resolves to 1/N at train time.
    ``positives_per_class`` caps how many examples of each class enter the
    training pool; the remainder is the natural held-out set.
    """

    regularization: float | None = None
    tolerance: float = 1e-8
    max_epochs: int = 2000
    seed: int = 0
    positives_per_class: int = 450

    def __post_init__(self) -> None:
        if self.regularization is not None and self.regularization <= 0:
            raise DomainError("regularization must be positive")
        if self.tolerance <= 0:
            raise DomainError("tolerance must be positive")
        if self.max_epochs < 1 or self.positives_per_class < 1:
            raise DomainError("max_epochs and positives_per_class must be positive")

    def hash(self) -> str:
        payload = json.dumps(
            {
                "regularization": self.regularization,
                "tolerance": self.tolerance,
                "max_epochs": self.max_epochs,
                "seed": self.seed,
                "positives_per_class": self.positives_per_class,
            },
            sort_keys=True,
        )
        return hashlib.sha256(payload.encode()).hexdigest()[:16]


@dataclass(frozen=True)
class ClassScores:
    """Per-type decision values; larger means more confidently that type."""

    s_p: float
    s_m: float
    s_f: float

    def __post_init__(self) -> None:
        for v in (self.s_p, self.s_m, self.s_f):
            if not np.isfinite(v):
                raise DomainError("class scores must be finite")

    def as_array(self) -> np.ndarray:
        return np.array([self.s_p, self.s_m, self.s_f])

    def for_type(self, t: DisplayType) -> float:
        return (self.s_p, self.s_m, self.s_f)[t.value]


@dataclass(frozen=True)
class LinearModel:
    """Per-class hyperplanes in mapped-feature space.

    ``classes`` is normally the full (Person, Mannequin, Flat) triple; a
    reduced tuple is allowed for harnesses that train on fewer classes.
    """

    classes: tuple[DisplayType, ...]
    weights: np.ndarray  # (n_classes, dim)
    biases: np.ndarray  # (n_classes,)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=np.float64)
        b = np.asarray(self.biases, dtype=np.float64)
        if w.ndim != 2 or w.shape[0] != len(self.classes) or b.shape != (len(self.classes),):
            raise ShapeError("weights must be (n_classes, dim) with matching biases")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "biases", b)

    @property
    def dim(self) -> int:
        return self.weights.shape[1]

    def to_json(self) -> dict:
        return {
            "format": "attrank-linear-model",
            "version": 1,
            "dim": self.dim,
            "classes": [c.code for c in self.classes],
            "weights": [list(map(float, row)) for row in self.weights],
            "biases": [float(b) for b in self.biases],
            "config_hash": self.metadata.get("config_hash"),
            "seed": self.metadata.get("seed"),
        }

    @classmethod
    def from_json(cls, payload: Mapping) -> "LinearModel":
        if payload.get("format") != "attrank-linear-model":
            raise DomainError("not a linear-model document")
        classes = tuple(DisplayType.from_code(c) for c in payload["classes"])
        if any(c is None for c in classes):
            raise DomainError("model classes must be resolved display types")
        return cls(
            classes,  # type: ignore[arg-type]
            np.asarray(payload["weights"], dtype=np.float64),
            np.asarray(payload["biases"], dtype=np.float64),
            {"config_hash": payload.get("config_hash"), "seed": payload.get("seed")},
        )


def _as_matrix(features: Sequence[np.ndarray] | np.ndarray) -> np.ndarray:
    m = np.asarray(features, dtype=np.float64)
    if m.ndim != 2:
        raise ShapeError("features must form an (n, dim) matrix")
    return m


def train_ova(
    features: Sequence[np.ndarray] | np.ndarray,
    labels: Sequence[DisplayType],
    cfg: TrainConfig = TrainConfig(),
) -> LinearModel:
    """Train one-vs-all hyperplanes on mapped features.

    For each class present in ``labels``, up to ``positives_per_class``
    examples are drawn (seeded, without replacement) as positives; the other
    classes' drawn positives form the negatives, keeping the leftover
    examples untouched for evaluation.  Each hyperplane minimizes
    lambda/2 ||w||^2 + mean hinge loss to the configured tolerance.

    The returned metadata records the selected training indices per class,
    the resolved lambda, and the per-class (dual) objective curves, which
    are non-increasing across epochs.
    """
    X = _as_matrix(features)
    if len(labels) != X.shape[0]:
        raise ShapeError("features and labels must have equal length")
    present = sorted(set(labels))
    if len(present) < 2:
        raise InsufficientDataError("degenerate training: need at least 2 distinct classes")

    rng = np.random.default_rng(cfg.seed)
    selected: dict[DisplayType, np.ndarray] = {}
    for c in present:
        idx = np.flatnonzero(np.array([lab == c for lab in labels]))
        take = min(cfg.positives_per_class, idx.size)
        selected[c] = np.sort(rng.choice(idx, size=take, replace=False))

    dim = X.shape[1]
    weights = np.zeros((len(present), dim))
    biases = np.zeros(len(present))
    curves: dict[str, tuple[float, ...]] = {}
    train_idx = {c.code: selected[c].tolist() for c in present}
    lam_used: dict[str, float] = {}

    for ci, c in enumerate(present):
        pos = selected[c]
        neg = np.concatenate([selected[o] for o in present if o != c])
        rows = np.concatenate([pos, neg])
        y = np.concatenate([np.ones(pos.size), -np.ones(neg.size)])
        lam = cfg.regularization if cfg.regularization is not None else 1.0 / rows.size
        # Rescale lambda/2||w||^2 + mean hinge to the solver's C-form.
        C = 1.0 / (lam * rows.size)
        Xa = np.concatenate([X[rows], np.ones((rows.size, 1))], axis=1)
        sol = solve_l1_hinge(
            Xa, y, C, tol=cfg.tolerance, max_epochs=cfg.max_epochs, seed=cfg.seed + ci
        )
        weights[ci] = sol.w[:-1]
        biases[ci] = sol.w[-1]
        curves[c.code] = sol.objective_curve
        lam_used[c.code] = lam

    return LinearModel(
        tuple(present),
        weights,
        biases,
        {
            "config_hash": cfg.hash(),
            "seed": cfg.seed,
            "objective_curves": curves,
            "train_indices": train_idx,
            "lambda": lam_used,
        },
    )


def decision_values(model: LinearModel, feature: np.ndarray) -> np.ndarray:
    """Raw per-class decision values in ``model.classes`` order."""
    f = np.asarray(feature, dtype=np.float64)
    if f.shape != (model.dim,):
        raise ShapeError(f"feature dim {f.shape} does not match model dim {model.dim}")
    return model.weights @ f + model.biases


def score(model: LinearModel, feature: np.ndarray) -> ClassScores:
    """Per-type scores s_c = <w_c, feature> + b_c for the full type triple."""
    if model.classes != DISPLAY_TYPES:
        raise DomainError("score requires a model trained on all three display types")
    vals = decision_values(model, feature)
    return ClassScores(*map(float, vals))


def predict(model: LinearModel, feature: np.ndarray) -> DisplayType:
    """Argmax of the decision values; ties break by canonical type order."""
    vals = decision_values(model, feature)
    return model.classes[int(np.argmax(vals))]


def predict_batch(model: LinearModel, features: Sequence[np.ndarray] | np.ndarray) -> list[DisplayType]:
    X = _as_matrix(features)
    if X.shape[1] != model.dim:
        raise ShapeError(f"feature dim {X.shape[1]} does not match model dim {model.dim}")
    vals = X @ model.weights.T + model.biases
    return [model.classes[i] for i in np.argmax(vals, axis=1)]


def evaluate_accuracy(
    model: LinearModel,
    features: Sequence[np.ndarray] | np.ndarray,
    labels: Sequence[DisplayType],
) -> float:
    """Fraction of predictions matching the labels."""
    if len(labels) == 0:
        raise InsufficientDataError("cannot evaluate on an empty set")
    X = _as_matrix(features)
    if X.shape[0] != len(labels):
        raise ShapeError("features and labels must have equal length")
    preds = predict_batch(model, X)
    return float(np.mean([p == t for p, t in zip(preds, labels)]))
