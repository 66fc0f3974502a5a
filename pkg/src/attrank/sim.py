"""Synthetic session and feature generation with known ground truth.

Sessions display a fixed number of items per type in a uniformly shuffled
order; the number of clicks comes from a configurable law, per-type click
counts from the Fisher noncentral hypergeometric model under the true
preference odds, and clicks land uniformly within each type block.

Every session draws from its own generator seeded by (seed, session index),
so generation order or parallelism can never change the output.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from . import choicemodel
from .choicemodel import UrnConfig, WeightVector
from .core import DISPLAY_TYPES, Dataset, DisplayType, ItemRecord, SessionRecord
from .errors import ConfigError
from .features import BowHistogram


@dataclass(frozen=True)
class FixedClicks:
    """Every session takes exactly k items."""

    k: int


@dataclass(frozen=True)
class TruncatedPoissonClicks:
    """Poisson(lam) conditioned on 1 <= n_hat <= session size."""

    lam: float


ClickLaw = FixedClicks | TruncatedPoissonClicks


@dataclass(frozen=True)
class SimConfig:
    n_sessions: int
    per_type_counts: tuple[int, int, int] = (3, 3, 3)
    clicks: ClickLaw = FixedClicks(2)
    true_omega: WeightVector = field(default_factory=lambda: WeightVector((1.0, 1.0, 1.0)))
    seed: int = 0
    feature_spec: Mapping[DisplayType, np.ndarray] | None = None

    def __post_init__(self) -> None:
        if self.n_sessions < 1:
            raise ConfigError("n_sessions must be positive")
        counts = tuple(int(v) for v in self.per_type_counts)
        if len(counts) != 3 or any(v < 0 for v in counts) or sum(counts) < 1:
            raise ConfigError("per_type_counts needs 3 nonnegative entries, positive total")
        object.__setattr__(self, "per_type_counts", counts)
        n = sum(counts)
        if isinstance(self.clicks, FixedClicks):
            if not 0 <= self.clicks.k <= n:
                raise ConfigError(f"fixed click count must lie in [0, {n}]")
        elif isinstance(self.clicks, TruncatedPoissonClicks):
            if self.clicks.lam <= 0:
                raise ConfigError("Poisson rate must be positive")
        else:
            raise ConfigError(f"unknown click law: {self.clicks!r}")
        if len(self.true_omega) != 3:
            raise ConfigError("true_omega needs one weight per display type")
        if self.feature_spec is not None:
            for t, alpha in self.feature_spec.items():
                if np.any(np.asarray(alpha, dtype=np.float64) <= 0):
                    raise ConfigError(f"Dirichlet concentrations for {t.name} must be positive")

    @property
    def session_size(self) -> int:
        return sum(self.per_type_counts)


def _session_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=(seed, index)))


def _draw_clicks(law: ClickLaw, n: int, rng: np.random.Generator) -> int:
    if isinstance(law, FixedClicks):
        return law.k
    # Inverse-CDF over Poisson(lam) restricted to 1..n.
    ks = np.arange(1, n + 1)
    logp = ks * np.log(law.lam) - law.lam - np.cumsum(np.log(ks))
    p = np.exp(logp)
    p /= p.sum()
    return int(ks[min(int(np.searchsorted(np.cumsum(p), rng.random(), side="right")), n - 1)])


def simulate_sessions(cfg: SimConfig) -> Dataset:
    """Generate a full dataset of sessions (and features when configured)."""
    items: dict[str, ItemRecord] = {}
    sessions: list[SessionRecord] = []
    features: dict[str, BowHistogram] = {}
    gamma = cfg.per_type_counts
    has_features = cfg.feature_spec is not None

    for j in range(cfg.n_sessions):
        rng = _session_rng(cfg.seed, j)
        ids_by_type: dict[DisplayType, list[str]] = {}
        session_items: list[str] = []
        for t in DISPLAY_TYPES:
            ids = [f"s{j:05d}-{t.code.lower()}{k}" for k in range(gamma[t.value])]
            ids_by_type[t] = ids
            session_items.extend(ids)
            for item_id in ids:
                items[item_id] = ItemRecord(
                    item_id,
                    display_type=t,
                    feature_ref=item_id if has_features else None,
                )
                if has_features:
                    alpha = np.asarray(cfg.feature_spec[t], dtype=np.float64)
                    features[item_id] = BowHistogram(rng.dirichlet(alpha), 1)

        displayed = [session_items[i] for i in rng.permutation(len(session_items))]
        n_hat = _draw_clicks(cfg.clicks, cfg.session_size, rng)
        eta = choicemodel.sample(UrnConfig(gamma, n_hat), cfg.true_omega, rng)
        clicked: list[str] = []
        for t in DISPLAY_TYPES:
            take = eta[t.value]
            if take:
                picks = rng.choice(len(ids_by_type[t]), size=take, replace=False)
                clicked.extend(ids_by_type[t][i] for i in sorted(picks))
        sessions.append(SessionRecord(f"sess{j:05d}", displayed, clicked))

    return Dataset(items, sessions, features)


def simulate_features(
    cfg: SimConfig, per_type: int
) -> tuple[list[BowHistogram], list[DisplayType]]:
    """Draw ``per_type`` histograms per display type from its Dirichlet.

    The stand-in for an annotated image corpus when training classifiers.
    """
    if cfg.feature_spec is None:
        raise ConfigError("feature_spec is required to simulate features")
    if per_type < 1:
        raise ConfigError("per_type must be positive")
    # Distinct stream tag so feature draws never alias a session's stream.
    rng = np.random.default_rng(np.random.SeedSequence(entropy=(cfg.seed, 1 << 63)))
    hists: list[BowHistogram] = []
    labels: list[DisplayType] = []
    for t in DISPLAY_TYPES:
        alpha = np.asarray(cfg.feature_spec[t], dtype=np.float64)
        for _ in range(per_type):
            hists.append(BowHistogram(rng.dirichlet(alpha), 1))
            labels.append(t)
    return hists, labels


def well_separated_spec(dim: int = 30, lo: float = 0.2, hi: float = 8.0) -> dict[DisplayType, np.ndarray]:
    """Per-type Dirichlet concentrations with disjoint dominant bins."""
    if dim < 3:
        raise ConfigError("need at least 3 dimensions")
    spec = {}
    third = dim // 3
    for t in DISPLAY_TYPES:
        alpha = np.full(dim, lo)
        start = t.value * third
        end = start + third if t.value < 2 else dim
        alpha[start:end] = hi
        spec[t] = alpha
    return spec


def uniform_spec(dim: int = 30, alpha: float = 1.0) -> dict[DisplayType, np.ndarray]:
    """Identical concentrations for every type (indistinguishable classes)."""
    return {t: np.full(dim, alpha) for t in DISPLAY_TYPES}
