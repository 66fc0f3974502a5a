"""Ranking metrics and behavioral analytics aggregations.

nDCG uses the exponential gain form DCG@K = sum_{i<=K} (2^rel_i - 1) /
log2(1 + i) normalized by the ideal (descending-sorted) DCG.  Sessions with
no relevant item have an undefined nDCG and are excluded from averages but
counted in the report.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Mapping, Sequence

import numpy as np

from .core import DISPLAY_TYPES, Dataset, DisplayType, SellerClass
from .errors import DomainError, UndefinedMetricError

RelevanceVector = Sequence[int]


def _check_rel(rel: RelevanceVector) -> np.ndarray:
    arr = np.asarray(rel)
    if arr.ndim != 1 or arr.size == 0:
        raise DomainError("relevance vector must be a nonempty 1-d sequence")
    if np.any(arr < 0):
        raise DomainError("relevance levels must be nonnegative")
    return arr.astype(np.float64)


def dcg_at_k(rel: RelevanceVector, k: int) -> float:
    """Discounted cumulative gain over the first k positions."""
    arr = _check_rel(rel)
    if not 1 <= k <= arr.size:
        raise DomainError(f"k must lie in [1, {arr.size}], got {k}")
    ranks = np.arange(1, k + 1)
    return float(np.sum((2.0 ** arr[:k] - 1.0) / np.log2(1.0 + ranks)))


def ndcg_at_k(rel: RelevanceVector, k: int) -> float:
    """DCG@k divided by the DCG@k of the descending-sorted relevance vector."""
    arr = _check_rel(rel)
    if not np.any(arr > 0):
        raise UndefinedMetricError("nDCG is undefined when no item is relevant")
    ideal = np.sort(arr)[::-1]
    return dcg_at_k(arr, k) / dcg_at_k(ideal, k)


@dataclass(frozen=True)
class MetricReport:
    """Per-cutoff nDCG means for one method."""

    method: str
    ndcg: Mapping[int, float]
    session_count: int
    excluded_sessions: int
    seed: int | None = None
    trials: int | None = None


def ndcg_report(
    rel_lists: Sequence[RelevanceVector],
    method: str,
    k_max: int | None = None,
) -> MetricReport:
    """Mean nDCG@K over sessions for K = 1..k_max.

    Sessions whose relevance is all zero are excluded and counted; a session
    contributes to cutoff K only when it has at least K positions.
    """
    if k_max is None:
        k_max = max((len(r) for r in rel_lists), default=0)
    sums = np.zeros(k_max)
    counts = np.zeros(k_max, dtype=np.int64)
    excluded = 0
    for rel in rel_lists:
        arr = _check_rel(rel)
        if not np.any(arr > 0):
            excluded += 1
            continue
        for k in range(1, min(k_max, arr.size) + 1):
            sums[k - 1] += ndcg_at_k(arr, k)
            counts[k - 1] += 1
    ndcg = {k: float(sums[k - 1] / counts[k - 1]) for k in range(1, k_max + 1) if counts[k - 1]}
    return MetricReport(method, ndcg, len(rel_lists), excluded)


def random_baseline(
    rel_lists: Sequence[RelevanceVector],
    trials: int = 10,
    seed: int = 0,
    k_max: int | None = None,
) -> MetricReport:
    """Mean nDCG of uniformly random orderings, averaged over seeded trials."""
    if trials < 10:
        raise DomainError("need at least 10 trials")
    rng = np.random.default_rng(seed)
    if k_max is None:
        k_max = max((len(r) for r in rel_lists), default=0)
    sums = np.zeros(k_max)
    counts = np.zeros(k_max, dtype=np.int64)
    excluded = 0
    for rel in rel_lists:
        arr = _check_rel(rel)
        if not np.any(arr > 0):
            excluded += 1
            continue
        for _ in range(trials):
            perm = rng.permutation(arr)
            for k in range(1, min(k_max, arr.size) + 1):
                sums[k - 1] += ndcg_at_k(perm, k)
                counts[k - 1] += 1
    ndcg = {k: float(sums[k - 1] / counts[k - 1]) for k in range(1, k_max + 1) if counts[k - 1]}
    return MetricReport("random", ndcg, len(rel_lists), excluded, seed=seed, trials=trials)


def overlap_score(set_a: Iterable[Hashable], set_b: Iterable[Hashable]) -> float:
    """|A intersect B| / min(|A|, |B|) for nonempty sets."""
    a, b = set(set_a), set(set_b)
    if not a or not b:
        raise UndefinedMetricError("overlap is undefined for empty sets")
    return len(a & b) / min(len(a), len(b))


def _resolved_type(dataset: Dataset, item_id: str) -> DisplayType:
    item = dataset.items[item_id]
    if item.display_type is None:
        raise DomainError(f"item {item_id!r} has no resolved display type")
    return item.display_type


def _proportions(counts: Mapping[DisplayType, int]) -> dict[DisplayType, float] | None:
    total = sum(counts.values())
    if total == 0:
        return None
    return {t: counts[t] / total for t in DISPLAY_TYPES}


@dataclass(frozen=True)
class DistributionShift:
    """Per-type proportions of displayed, clicked and unclicked occurrences.

    A vector is ``None`` when its group is empty (for example no clicks
    anywhere in the dataset).
    """

    displayed: dict[DisplayType, float] | None
    clicked: dict[DisplayType, float] | None
    unclicked: dict[DisplayType, float] | None


def distribution_shift(dataset: Dataset) -> DistributionShift:
    """Occurrence-level type distributions across all sessions.

    An item displayed in several sessions counts once per display.
    """
    displayed = {t: 0 for t in DISPLAY_TYPES}
    clicked = {t: 0 for t in DISPLAY_TYPES}
    unclicked = {t: 0 for t in DISPLAY_TYPES}
    for sess in dataset.sessions:
        for item_id in sess.displayed:
            t = _resolved_type(dataset, item_id)
            displayed[t] += 1
            if item_id in sess.clicked:
                clicked[t] += 1
            else:
                unclicked[t] += 1
    return DistributionShift(
        _proportions(displayed), _proportions(clicked), _proportions(unclicked)
    )


def conversion_rates(dataset: Dataset) -> dict[DisplayType, dict[str, float | None]]:
    """Sell-through fraction per type for clicked vs never-clicked items.

    Item-level: an item counts as clicked when any session clicked it; items
    appearing in no session are left out.  Cells without items are ``None``.
    """
    ever_displayed: set[str] = set()
    ever_clicked: set[str] = set()
    for sess in dataset.sessions:
        ever_displayed.update(sess.displayed)
        ever_clicked.update(sess.clicked)
    sold = {t: {"clicked": 0, "unclicked": 0} for t in DISPLAY_TYPES}
    totals = {t: {"clicked": 0, "unclicked": 0} for t in DISPLAY_TYPES}
    for item_id in ever_displayed:
        t = _resolved_type(dataset, item_id)
        group = "clicked" if item_id in ever_clicked else "unclicked"
        totals[t][group] += 1
        if dataset.items[item_id].sold:
            sold[t][group] += 1
    return {
        t: {
            g: (sold[t][g] / totals[t][g] if totals[t][g] else None)
            for g in ("clicked", "unclicked")
        }
        for t in DISPLAY_TYPES
    }


def avg_watch(dataset: Dataset) -> dict[DisplayType, dict[SellerClass, float | None]]:
    """Mean watch count per (display type, seller class) over all items."""
    sums = {t: {s: 0.0 for s in SellerClass} for t in DISPLAY_TYPES}
    counts = {t: {s: 0 for s in SellerClass} for t in DISPLAY_TYPES}
    for item in dataset.items.values():
        if item.display_type is None:
            raise DomainError(f"item {item.item_id!r} has no resolved display type")
        sums[item.display_type][item.seller_class] += item.watch_count
        counts[item.display_type][item.seller_class] += 1
    return {
        t: {
            s: (sums[t][s] / counts[t][s] if counts[t][s] else None)
            for s in SellerClass
        }
        for t in DISPLAY_TYPES
    }


def grouped_distribution(
    dataset: Dataset,
    bucketing: Callable[[object], Hashable],
    buckets: Sequence[Hashable] | None = None,
) -> dict[Hashable, dict[DisplayType, float] | None]:
    """Item-level type proportions per bucket of a total bucketing function.

    Pass ``buckets`` to force specific labels into the output; labels with
    no items map to ``None``.
    """
    tallies: dict[Hashable, dict[DisplayType, int]] = {}
    if buckets is not None:
        for b in buckets:
            tallies[b] = {t: 0 for t in DISPLAY_TYPES}
    for item in dataset.items.values():
        if item.display_type is None:
            raise DomainError(f"item {item.item_id!r} has no resolved display type")
        label = bucketing(item)
        tallies.setdefault(label, {t: 0 for t in DISPLAY_TYPES})
        tallies[label][item.display_type] += 1
    return {label: _proportions(counts) for label, counts in tallies.items()}
