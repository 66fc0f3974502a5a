"""Multivariate Fisher noncentral hypergeometric choice model.

Models the per-type click counts of a session as draws from an urn where
each kind (display type) carries a positive preference odds omega_i: the
probability of the count vector eta given gamma items of each kind on
display and n_hat total clicks is

    P(eta) = prod_i C(gamma_i, eta_i) omega_i^eta_i  /  Z(n_hat)

with Z the same sum over the whole domain.  Odds are projective (only
ratios matter); the canonical form fixes omega[Person] = 1.

All arithmetic happens in log space.  Partition functions are evaluated by
convolving the per-kind binomial polynomials, i.e. Z(n_hat) is the z^n_hat
coefficient of prod_i (1 + omega_i z)^gamma_i, which matches the domain sum
exactly and also works far beyond the enumeration guard.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Literal, Sequence

import numpy as np
from scipy.optimize import root
from scipy.special import gammaln, logsumexp

from .core import DISPLAY_TYPES, Dataset, DisplayType
from .errors import (
    DomainError,
    DomainTooLargeError,
    EstimationError,
)

# Exact enumeration is used only when prod(gamma_i + 1) stays below this.
ENUMERATION_GUARD = 10_000_000


@dataclass(frozen=True)
class UrnConfig:
    """Per-kind display counts and the total number taken."""

    gamma: tuple[int, ...]
    n_hat: int

    def __init__(self, gamma: Sequence[int], n_hat: int) -> None:
        g = tuple(int(v) for v in gamma)
        if len(g) < 1:
            raise DomainError("need at least one kind")
        if any(v < 0 for v in g):
            raise DomainError("gamma entries must be nonnegative")
        if not 0 <= n_hat <= sum(g):
            raise DomainError(f"n_hat {n_hat} must lie in [0, {sum(g)}]")
        object.__setattr__(self, "gamma", g)
        object.__setattr__(self, "n_hat", int(n_hat))

    @property
    def c(self) -> int:
        return len(self.gamma)

    @property
    def n(self) -> int:
        return sum(self.gamma)

    def domain_size_bound(self) -> int:
        bound = 1
        for g in self.gamma:
            bound *= g + 1
        return bound


@dataclass(frozen=True)
class WeightVector:
    """Positive per-kind preference odds; canonical form has omega[0] = 1."""

    omega: tuple[float, ...]

    def __init__(self, omega: Sequence[float]) -> None:
        w = tuple(float(v) for v in omega)
        if len(w) < 1 or any(not np.isfinite(v) or v <= 0 for v in w):
            raise DomainError("weights must be finite and strictly positive")
        object.__setattr__(self, "omega", w)

    def __len__(self) -> int:
        return len(self.omega)

    def __getitem__(self, i: int) -> float:
        return self.omega[i]

    @property
    def is_canonical(self) -> bool:
        return abs(self.omega[0] - 1.0) <= 1e-9

    def canonical(self) -> "WeightVector":
        ref = self.omega[0]
        return WeightVector(tuple(v / ref for v in self.omega))

    def as_array(self) -> np.ndarray:
        return np.asarray(self.omega)

    def for_type(self, t: DisplayType) -> float:
        return self.omega[t.value]


@dataclass(frozen=True)
class Observation:
    """One (urn config, taken counts) pair."""

    config: UrnConfig
    eta: tuple[int, ...]

    def __init__(self, config: UrnConfig, eta: Sequence[int]) -> None:
        e = tuple(int(v) for v in eta)
        if len(e) != config.c:
            raise DomainError("eta length must match the number of kinds")
        if any(v < 0 or v > g for v, g in zip(e, config.gamma)):
            raise DomainError("eta must satisfy 0 <= eta_i <= gamma_i")
        if sum(e) != config.n_hat:
            raise DomainError(f"eta sums to {sum(e)}, expected n_hat {config.n_hat}")
        object.__setattr__(self, "config", config)
        object.__setattr__(self, "eta", e)


def _check_weights(cfg: UrnConfig, omega: WeightVector) -> np.ndarray:
    if len(omega) != cfg.c:
        raise DomainError("weight vector length must match the number of kinds")
    return omega.as_array()


def _log_binom(n: np.ndarray | int, k: np.ndarray | int) -> np.ndarray:
    return gammaln(np.asarray(n) + 1) - gammaln(np.asarray(k) + 1) - gammaln(np.asarray(n) - np.asarray(k) + 1)


def _kind_logpoly(gamma_i: int, log_w: float) -> np.ndarray:
    t = np.arange(gamma_i + 1)
    return _log_binom(gamma_i, t) + t * log_w


def _log_convolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.full(a.size + b.size - 1, -np.inf)
    for s in range(out.size):
        lo = max(0, s - b.size + 1)
        hi = min(a.size - 1, s)
        out[s] = logsumexp(a[lo : hi + 1] + b[s - hi : s - lo + 1][::-1])
    return out


def _log_partition_poly(cfg: UrnConfig, omega: np.ndarray) -> np.ndarray:
    """Log coefficients of prod_i (1 + omega_i z)^gamma_i, length n + 1."""
    acc = np.zeros(1)
    for g, w in zip(cfg.gamma, omega):
        acc = _log_convolve(acc, _kind_logpoly(g, float(np.log(w))))
    return acc


def enumerate_domain(cfg: UrnConfig, guard: int = ENUMERATION_GUARD) -> list[tuple[int, ...]]:
    """All count vectors with sum n_hat and 0 <= eta_i <= gamma_i, lexicographic."""
    if cfg.domain_size_bound() > guard:
        raise DomainTooLargeError(
            f"domain bound {cfg.domain_size_bound()} exceeds guard {guard}; "
            "use the approximate sampling/mean paths instead"
        )
    out: list[tuple[int, ...]] = []
    eta = [0] * cfg.c

    def fill(i: int, remaining: int) -> None:
        if i == cfg.c - 1:
            if remaining <= cfg.gamma[i]:
                eta[i] = remaining
                out.append(tuple(eta))
            return
        tail_cap = sum(cfg.gamma[i + 1 :])
        lo = max(0, remaining - tail_cap)
        hi = min(cfg.gamma[i], remaining)
        for v in range(lo, hi + 1):
            eta[i] = v
            fill(i + 1, remaining - v)

    fill(0, cfg.n_hat)
    return out


def pmf(eta: Sequence[int], cfg: UrnConfig, omega: WeightVector) -> float:
    """Probability of the count vector ``eta``; 0 outside the domain."""
    w = _check_weights(cfg, omega)
    e = np.asarray(eta)
    if e.shape != (cfg.c,):
        raise DomainError("eta length must match the number of kinds")
    if np.any(e < 0) or np.any(e > np.asarray(cfg.gamma)) or int(e.sum()) != cfg.n_hat:
        return 0.0
    log_num = float(np.sum(_log_binom(np.asarray(cfg.gamma), e) + e * np.log(w)))
    log_z = float(_log_partition_poly(cfg, w)[cfg.n_hat])
    return float(np.exp(log_num - log_z))


@lru_cache(maxsize=512)
def _cached_table(
    cfg: UrnConfig, omega: WeightVector, guard: int
) -> tuple[tuple[tuple[int, ...], ...], np.ndarray, np.ndarray]:
    """(domain, probabilities, cdf); cached since hot loops redraw configs."""
    w = omega.as_array()
    etas = tuple(enumerate_domain(cfg, guard))
    mat = np.asarray(etas, dtype=np.float64).reshape(len(etas), cfg.c)
    logg = np.sum(_log_binom(np.asarray(cfg.gamma)[None, :], mat) + mat * np.log(w)[None, :], axis=1)
    probs = np.exp(logg - logsumexp(logg))
    return etas, probs, np.cumsum(probs)


def pmf_table(
    cfg: UrnConfig, omega: WeightVector, guard: int = ENUMERATION_GUARD
) -> tuple[list[tuple[int, ...]], np.ndarray]:
    """The whole domain (lexicographic) with its probabilities at once."""
    _check_weights(cfg, omega)
    etas, probs, _ = _cached_table(cfg, omega, guard)
    return list(etas), probs.copy()


def _enumerated_moments(
    cfg: UrnConfig, omega: WeightVector, guard: int = ENUMERATION_GUARD
) -> tuple[np.ndarray, np.ndarray]:
    etas, probs, _ = _cached_table(cfg, omega, guard)
    mat = np.asarray(etas, dtype=np.float64)
    mu = probs @ mat
    second = mat.T @ (mat * probs[:, None])
    return mu, second - np.outer(mu, mu)


def _fixed_point_mean(cfg: UrnConfig, omega: np.ndarray) -> np.ndarray:
    """Solve sum_i gamma_i w_i t / (1 + w_i t) = n_hat for t by bisection."""
    g = np.asarray(cfg.gamma, dtype=np.float64)

    def taken(theta: float) -> float:
        return float(np.sum(g * omega * theta / (1.0 + omega * theta)))

    lo, hi = 0.0, 1.0
    while taken(hi) < cfg.n_hat:
        hi *= 2.0
        if hi > 1e300:
            raise EstimationError("fixed-point mean failed to bracket theta")
    while hi - lo > 1e-12 * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if taken(mid) < cfg.n_hat:
            lo = mid
        else:
            hi = mid
    theta = 0.5 * (lo + hi)
    return g * omega * theta / (1.0 + omega * theta)


def mean(cfg: UrnConfig, omega: WeightVector, guard: int = ENUMERATION_GUARD) -> np.ndarray:
    """Expected per-kind counts: exact within the guard, fixed-point beyond."""
    w = _check_weights(cfg, omega)
    if cfg.n_hat == 0:
        return np.zeros(cfg.c)
    if cfg.n_hat == cfg.n:
        return np.asarray(cfg.gamma, dtype=np.float64)
    if cfg.domain_size_bound() <= guard:
        return _enumerated_moments(cfg, omega, guard)[0]
    return _fixed_point_mean(cfg, w)


def sample(
    cfg: UrnConfig,
    omega: WeightVector,
    seed: int | np.random.Generator,
    guard: int = ENUMERATION_GUARD,
) -> tuple[int, ...]:
    """Draw one count vector from the exact distribution.

    Within the guard this inverts the CDF over the enumerated domain;
    beyond it, kinds are sampled one at a time from their exact marginals
    (leave-rest partition polynomials), which follows the same law.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    w = _check_weights(cfg, omega)
    if cfg.n_hat == cfg.n:
        return cfg.gamma
    if cfg.domain_size_bound() <= guard:
        etas, _, cdf = _cached_table(cfg, omega, guard)
        idx = min(int(np.searchsorted(cdf, rng.random(), side="right")), len(etas) - 1)
        return etas[idx]

    polys = [_kind_logpoly(g, float(np.log(v))) for g, v in zip(cfg.gamma, w)]
    suffix: list[np.ndarray] = [np.zeros(1)] * (cfg.c + 1)
    for i in range(cfg.c - 1, -1, -1):
        suffix[i] = _log_convolve(polys[i], suffix[i + 1])
    out = []
    remaining = cfg.n_hat
    for i in range(cfg.c - 1):
        tail_cap = sum(cfg.gamma[i + 1 :])
        lo = max(0, remaining - tail_cap)
        hi = min(cfg.gamma[i], remaining)
        vals = np.arange(lo, hi + 1)
        logp = polys[i][vals] + suffix[i + 1][remaining - vals]
        probs = np.exp(logp - logsumexp(logp))
        cdf = np.cumsum(probs)
        a = vals[min(int(np.searchsorted(cdf, rng.random(), side="right")), vals.size - 1)]
        out.append(int(a))
        remaining -= int(a)
    out.append(remaining)
    return tuple(out)


def observations_from_dataset(dataset: Dataset) -> list[Observation]:
    """Turn each session into (per-type displayed counts, per-type clicked counts).

    Every displayed item must carry a resolved display type.
    """
    obs = []
    for sess in dataset.sessions:
        gamma = [0, 0, 0]
        eta = [0, 0, 0]
        for item_id in sess.displayed:
            item = dataset.items.get(item_id)
            if item is None or item.display_type is None:
                raise DomainError(
                    f"item {item_id!r} in session {sess.session_id!r} has no resolved display type"
                )
            gamma[item.display_type.value] += 1
            if item_id in sess.clicked:
                eta[item.display_type.value] += 1
        obs.append(Observation(UrnConfig(gamma, sum(eta)), eta))
    return obs


def _grouped(observations: Sequence[Observation]) -> list[tuple[UrnConfig, int, np.ndarray]]:
    groups: dict[tuple[tuple[int, ...], int], tuple[int, np.ndarray]] = {}
    for ob in observations:
        key = (ob.config.gamma, ob.config.n_hat)
        count, total = groups.get(key, (0, np.zeros(ob.config.c)))
        groups[key] = (count + 1, total + np.asarray(ob.eta, dtype=np.float64))
    return [(UrnConfig(k[0], k[1]), cnt, tot) for k, (cnt, tot) in sorted(groups.items())]


def _check_identifiable(observations: Sequence[Observation]) -> tuple[np.ndarray, np.ndarray]:
    if not observations:
        raise EstimationError("no observations")
    c = observations[0].config.c
    if any(ob.config.c != c for ob in observations):
        raise EstimationError("observations must share the same number of kinds")
    total_eta = np.zeros(c)
    total_gamma = np.zeros(c)
    for ob in observations:
        total_eta += np.asarray(ob.eta)
        total_gamma += np.asarray(ob.config.gamma)
    for i in range(c):
        name = DISPLAY_TYPES[i].name if c == 3 else f"kind {i}"
        if total_eta[i] < 1:
            raise EstimationError(f"{name} is never taken; its odds are unidentifiable (0)")
        if total_eta[i] >= total_gamma[i]:
            raise EstimationError(f"{name} is always taken; its odds are unidentifiable (inf)")
    return total_eta, total_gamma


def _initial_omega(total_eta: np.ndarray, total_gamma: np.ndarray) -> np.ndarray:
    p = total_eta / total_gamma
    odds = p / (1.0 - p)
    return odds / odds[0]


def _mle(
    observations: Sequence[Observation],
    tol: float,
    max_iter: int,
    guard: int,
) -> np.ndarray:
    """Newton ascent on the mean log-likelihood in log-odds coordinates.

    The gradient for kind i is (sum_s eta_si - sum_s mu_i) / N and the
    Hessian is the negated mean of the per-config count covariances, both
    exact via enumeration, so convergence is quadratic.  Tolerance is on
    the Euclidean norm of the mean-log-likelihood gradient.
    """
    total_eta, total_gamma = _check_identifiable(observations)
    groups = _grouped(observations)
    n_obs = len(observations)
    c = len(total_eta)
    free = np.arange(1, c)

    def moments(omega_arr: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        mu_sum = np.zeros(c)
        cov_sum = np.zeros((c, c))
        for cfg, count, _ in groups:
            mu, cov = _enumerated_moments(cfg, WeightVector(omega_arr), guard)
            mu_sum += count * mu
            cov_sum += count * cov
        return mu_sum, cov_sum

    def neg_mean_ll(phi: np.ndarray) -> float:
        omega_arr = np.ones(c)
        omega_arr[free] = np.exp(phi)
        total = 0.0
        for cfg, count, eta_sum in groups:
            log_z = float(_log_partition_poly(cfg, omega_arr)[cfg.n_hat])
            total += count * log_z - float(eta_sum @ np.log(omega_arr))
        return total / n_obs

    phi = np.log(_initial_omega(total_eta, total_gamma)[free])
    f = neg_mean_ll(phi)
    for _ in range(max_iter):
        omega_arr = np.ones(c)
        omega_arr[free] = np.exp(phi)
        mu_sum, cov_sum = moments(omega_arr)
        grad = (mu_sum[free] - total_eta[free]) / n_obs
        if float(np.linalg.norm(grad)) <= tol:
            return omega_arr
        hess = cov_sum[np.ix_(free, free)] / n_obs
        try:
            step = -np.linalg.solve(hess + 1e-12 * np.eye(free.size), grad)
        except np.linalg.LinAlgError:
            step = -grad
        t = 1.0
        while t >= 2.0**-60:
            cand = phi + t * step
            fc = neg_mean_ll(cand)
            if fc <= f + 1e-4 * t * float(grad @ step):
                phi, f = cand, fc
                break
            t *= 0.5
        else:
            raise EstimationError("line search failed; likelihood may be degenerate")
    raise EstimationError(f"MLE did not reach gradient norm {tol} in {max_iter} iterations")


def _moment(
    observations: Sequence[Observation],
    tol: float,
    guard: int,
) -> np.ndarray:
    """Match summed model means to summed observed counts (reference kind fixed)."""
    total_eta, total_gamma = _check_identifiable(observations)
    groups = _grouped(observations)
    c = len(total_eta)
    free = np.arange(1, c)

    def residual(phi: np.ndarray) -> np.ndarray:
        omega_arr = np.ones(c)
        omega_arr[free] = np.exp(phi)
        w = WeightVector(omega_arr)
        mu_sum = np.zeros(c)
        for cfg, count, _ in groups:
            mu_sum += count * mean(cfg, w, guard)
        return mu_sum[free] - total_eta[free]

    x0 = np.log(_initial_omega(total_eta, total_gamma)[free])
    sol = root(residual, x0, method="hybr", tol=tol)
    if not sol.success and float(np.max(np.abs(residual(sol.x)))) > 1e-6 * max(1.0, len(observations)):
        raise EstimationError(f"moment matching did not converge: {sol.message}")
    omega_arr = np.ones(c)
    omega_arr[free] = np.exp(sol.x)
    return omega_arr


def estimate_weights(
    observations: Sequence[Observation],
    method: Literal["mle", "moment"] = "mle",
    *,
    tol: float = 1e-8,
    max_iter: int = 100,
    guard: int = ENUMERATION_GUARD,
) -> WeightVector:
    """Estimate preference odds from observations, normalized to the first kind.

    ``mle`` maximizes the exact log-likelihood (Newton, gradient-norm
    tolerance ``tol`` on the mean log-likelihood); ``moment`` solves
    sum-of-means = sum-of-counts using :func:`mean`.  Both are deterministic
    and require every kind to be taken at least once but not exhaustively
    in aggregate.
    """
    if method == "mle":
        omega_arr = _mle(observations, tol, max_iter, guard)
    elif method == "moment":
        omega_arr = _moment(observations, 1e-12, guard)
    else:
        raise DomainError(f"unknown estimation method: {method!r}")
    return WeightVector(omega_arr).canonical()
