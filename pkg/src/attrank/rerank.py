"""Attractiveness-based re-rankers and the pairwise rankSVM baseline.

The unsupervised re-rankers score an item from its per-type classifier
scores S and the learned preference odds omega, summing over the rho most
preferred types:

    PMFS:  sum omega_i * S_i
    PMFP:  sum omega_i * sigmoid(S_i)
    PMFL:  omega of the predicted type, if it ranks within the top rho
           preferred types, else 0

The supervised baseline learns a linear function over 9-dimensional
feature vectors (one-hot type, raw scores, squashed scores) from pairwise
click preferences.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .classifier import ClassScores
from .choicemodel import WeightVector
from .core import DISPLAY_TYPES, DisplayType, SessionRecord
from .errors import DomainError, IncompleteInputError, InsufficientDataError, ShapeError
from .hinge import solve_l1_hinge

RANKSVM_FEATURE_LAYOUT = "onehot3+scores3+gscores3:v1"
RANKSVM_DIM = 9


class RerankMethod(Enum):
    PMFP = "PMFP"
    PMFS = "PMFS"
    PMFL = "PMFL"


class SigmoidMode(Enum):
    """Squashing direction for PMFP.

    ``INCREASING`` uses 1/(1+e^-s) so that higher type confidence raises
    the score.  ``DECREASING`` applies 1/(1+e^s) verbatim, which inverts
    that relationship; it is kept selectable for replication studies.
    """

    INCREASING = "increasing"
    DECREASING = "decreasing"


@dataclass(frozen=True)
class RerankConfig:
    method: RerankMethod
    rho: int = 3
    sigmoid_mode: SigmoidMode = SigmoidMode.INCREASING

    def __post_init__(self) -> None:
        if not 1 <= self.rho <= len(DISPLAY_TYPES):
            raise DomainError(f"rho must lie in [1, {len(DISPLAY_TYPES)}]")


@dataclass(frozen=True)
class RankedList:
    """Re-ranked item ids with their scores; the input order is retained.

    Scores are non-increasing, and equal-scored items keep their original
    relative order (the sort is stable).
    """

    item_ids: tuple[str, ...]
    scores: tuple[float, ...]
    original_order: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.item_ids) != len(self.scores):
            raise ShapeError("one score per item required")


@dataclass(frozen=True)
class PreferencePairs:
    """Ordered (preferred, less-preferred) pairs plus same-level pairs."""

    ordered: tuple[tuple[str, str], ...]
    unordered: tuple[tuple[str, str], ...]
    levels: Mapping[str, int] = field(default_factory=dict)


@dataclass(frozen=True)
class RankModel:
    """Linear ranking function over the 9-dim rankSVM feature space."""

    weights: np.ndarray
    C: float
    feature_layout: str = RANKSVM_FEATURE_LAYOUT
    metadata: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim != 1 or not np.all(np.isfinite(w)):
            raise ShapeError("weights must be a finite vector")
        object.__setattr__(self, "weights", w)

    def to_json(self) -> dict:
        return {
            "format": "attrank-rank-model",
            "version": 1,
            "weights": [float(v) for v in self.weights],
            "C": float(self.C),
            "feature_layout": self.feature_layout,
        }

    @classmethod
    def from_json(cls, payload: Mapping) -> "RankModel":
        if payload.get("format") != "attrank-rank-model":
            raise DomainError("not a rank-model document")
        return cls(
            np.asarray(payload["weights"], dtype=np.float64),
            float(payload["C"]),
            str(payload["feature_layout"]),
        )


def _preference_order(omega: WeightVector) -> list[DisplayType]:
    """Types sorted by descending odds; ties break by canonical type order."""
    return sorted(DISPLAY_TYPES, key=lambda t: (-omega.for_type(t), t.value))


def _sigmoid(s: float, mode: SigmoidMode) -> float:
    z = -s if mode is SigmoidMode.INCREASING else s
    # Stable logistic for large |z|.
    if z >= 0:
        e = np.exp(-z)
        return float(e / (1.0 + e))
    return float(1.0 / (1.0 + np.exp(z)))


def attractiveness_score(
    scores: ClassScores, omega: WeightVector, cfg: RerankConfig
) -> float:
    """Scalar re-ranking score of one item under the configured method."""
    if len(omega) != len(DISPLAY_TYPES):
        raise DomainError("omega must carry one weight per display type")
    if not omega.is_canonical:
        raise DomainError("omega must be canonical (Person weight fixed to 1)")
    top = _preference_order(omega)[: cfg.rho]
    if cfg.method is RerankMethod.PMFS:
        return float(sum(omega.for_type(t) * scores.for_type(t) for t in top))
    if cfg.method is RerankMethod.PMFP:
        return float(
            sum(omega.for_type(t) * _sigmoid(scores.for_type(t), cfg.sigmoid_mode) for t in top)
        )
    winner = DISPLAY_TYPES[int(np.argmax(scores.as_array()))]
    return float(omega.for_type(winner)) if winner in top else 0.0


def _stable_desc(
    session: SessionRecord, score_of: Callable[[str], float]
) -> RankedList:
    scored = [(item_id, score_of(item_id)) for item_id in session.displayed]
    ordered = sorted(scored, key=lambda pair: -pair[1])  # stable: ties keep input order
    return RankedList(
        tuple(i for i, _ in ordered),
        tuple(s for _, s in ordered),
        tuple(session.displayed),
    )


def rerank(
    session: SessionRecord,
    scores_by_item: Mapping[str, ClassScores],
    omega: WeightVector,
    cfg: RerankConfig,
) -> RankedList:
    """Stable descending sort of the session's items by attractiveness score."""
    for item_id in session.displayed:
        if item_id not in scores_by_item:
            raise IncompleteInputError(f"no class scores for item {item_id!r}")
    return _stable_desc(
        session, lambda i: attractiveness_score(scores_by_item[i], omega, cfg)
    )


def default_levels(session: SessionRecord) -> dict[str, int]:
    """Three-level preference labels from session behavior.

    purchased -> 1, clicked-but-not-purchased -> 0, unclicked -> -1.
    Sessions without purchase data degrade to clicked -> 1, unclicked -> -1.
    """
    out = {}
    for item_id in session.displayed:
        if item_id in session.purchased:
            out[item_id] = 1
        elif item_id in session.clicked:
            out[item_id] = 0 if session.purchased else 1
        else:
            out[item_id] = -1
    return out


def make_preference_pairs(
    session: SessionRecord,
    levels: Callable[[SessionRecord], Mapping[str, int]] = default_levels,
) -> PreferencePairs:
    """All ordered pairs (d_i > d_j) and same-level pairs within a session."""
    d = levels(session)
    items = list(session.displayed)
    ordered = [
        (a, b) for a in items for b in items if a != b and d[a] > d[b]
    ]
    unordered = [
        (items[i], items[j])
        for i in range(len(items))
        for j in range(i + 1, len(items))
        if d[items[i]] == d[items[j]]
    ]
    return PreferencePairs(tuple(ordered), tuple(unordered), dict(d))


def pooled_preference_pairs(
    sessions: Iterable[SessionRecord],
    levels: Callable[[SessionRecord], Mapping[str, int]] = default_levels,
    scope: str = "session",
) -> PreferencePairs:
    """Pairs from many sessions: per-session by default, or one global pool.

    The global pool compares every item against every other across session
    boundaries using the same level labels (an item keeps the highest level
    it reaches in any session).
    """
    if scope == "session":
        ordered: list[tuple[str, str]] = []
        unordered: list[tuple[str, str]] = []
        merged: dict[str, int] = {}
        for sess in sessions:
            pairs = make_preference_pairs(sess, levels)
            ordered.extend(pairs.ordered)
            unordered.extend(pairs.unordered)
            for k, v in pairs.levels.items():
                merged[k] = max(v, merged.get(k, v))
        return PreferencePairs(tuple(ordered), tuple(unordered), merged)
    if scope != "global":
        raise DomainError(f"unknown pair scope: {scope!r}")
    merged = {}
    for sess in sessions:
        for k, v in levels(sess).items():
            merged[k] = max(v, merged.get(k, v))
    items = list(merged)
    ordered = [(a, b) for a in items for b in items if a != b and merged[a] > merged[b]]
    unordered = [
        (items[i], items[j])
        for i in range(len(items))
        for j in range(i + 1, len(items))
        if merged[items[i]] == merged[items[j]]
    ]
    return PreferencePairs(tuple(ordered), tuple(unordered), merged)


def ranksvm_features(scores: ClassScores, label: DisplayType) -> np.ndarray:
    """9-dim vector: one-hot predicted type, raw scores, and 1/(1+e^s) per score."""
    onehot = np.zeros(len(DISPLAY_TYPES))
    onehot[label.value] = 1.0
    raw = scores.as_array()
    squashed = np.array([_sigmoid(s, SigmoidMode.DECREASING) for s in raw])
    return np.concatenate([onehot, raw, squashed])


def ranksvm_train(
    pairs: PreferencePairs,
    features_by_item: Mapping[str, np.ndarray],
    C: float = 1.0,
    *,
    tol: float = 1e-8,
    max_epochs: int = 2000,
    seed: int = 0,
) -> RankModel:
    """Max-margin fit of the linear ranking function on pair differences.

    Minimizes 0.5 ||w||^2 + C sum max(0, 1 - <w, f_hi - f_lo>) over the
    ordered pairs; deterministic given ``seed``.
    """
    if C <= 0:
        raise DomainError("C must be positive")
    if not pairs.ordered:
        raise InsufficientDataError("no ordered preference pairs to train on")
    diffs = []
    for hi, lo in pairs.ordered:
        for item_id in (hi, lo):
            if item_id not in features_by_item:
                raise IncompleteInputError(f"no features for item {item_id!r}")
        diffs.append(
            np.asarray(features_by_item[hi], dtype=np.float64)
            - np.asarray(features_by_item[lo], dtype=np.float64)
        )
    X = np.vstack(diffs)
    sol = solve_l1_hinge(X, np.ones(X.shape[0]), C, tol=tol, max_epochs=max_epochs, seed=seed)
    return RankModel(
        sol.w,
        C,
        metadata={
            "objective_curve": sol.objective_curve,
            "primal_objective": sol.primal_objective,
            "pair_count": X.shape[0],
            "seed": seed,
        },
    )


def ranksvm_rerank(
    session: SessionRecord,
    model: RankModel,
    features_by_item: Mapping[str, np.ndarray],
) -> RankedList:
    """Stable descending sort by the learned linear ranking function."""
    for item_id in session.displayed:
        if item_id not in features_by_item:
            raise IncompleteInputError(f"no features for item {item_id!r}")
    w = model.weights
    return _stable_desc(session, lambda i: float(w @ np.asarray(features_by_item[i])))
