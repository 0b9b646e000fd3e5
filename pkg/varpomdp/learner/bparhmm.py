# The MIT License (MIT)
# Copyright © 2024 varpomdp developers

# Permission is hereby granted, free of charge, to any person obtaining a copy of this software and associated
# documentation files (the “Software”), to deal in the Software without restriction, including without limitation
# the rights to use, copy, modify, merge, publish, distribute, sublicense, and/or sell copies of the Software,
# and to permit persons to whom the Software is furnished to do so, subject to the following conditions:

# The above copyright notice and this permission notice shall be included in all copies or substantial portions of
# the Software.

# THE SOFTWARE IS PROVIDED “AS IS”, WITHOUT WARRANTY OF ANY KIND, EXPRESS OR IMPLIED, INCLUDING BUT NOT LIMITED TO
# THE WARRANTIES OF MERCHANTABILITY, FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL
# THE AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER LIABILITY, WHETHER IN AN ACTION
# OF CONTRACT, TORT OR OTHERWISE, ARISING FROM, OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER
# DEALINGS IN THE SOFTWARE.

from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
import bittensor as bt
from scipy import stats
from scipy.cluster.vq import kmeans2
from scipy.optimize import linear_sum_assignment
from scipy.special import xlog1py, xlogy

from varpomdp.kernels import (
    MNIWPrior,
    RngStream,
    as_stream,
    cholesky,
    logpdf_from_residuals,
    mniw_logpdf,
    mniw_posterior,
    mniw_sample,
)
from varpomdp.model.emission import lagged_design, series_loglik
from varpomdp.schemas import LearnerConfig, LearnerState, Theta, Trajectory
from varpomdp.utils.exceptions import ConfigError, DimensionMismatchError, LearnerError
from varpomdp.utils.logging import log_event
from varpomdp.utils.misc import ordered_map

# Substream sites within one sweep.
SITE_MODES = 0
SITE_FEATURES = 1
SITE_THETAS = 2
SITE_TRANS = 3

INIT_MAX_FEATURES = 6
INIT_BLOCK = 50
RIDGE = 1e-6
TINY = 1e-300


def _series(corpus, var_order: int) -> List[np.ndarray]:
    """Observation arrays of the corpus, checked for a shared dimension and length >= r+2."""
    if corpus is None or len(corpus) == 0:
        raise LearnerError("Corpus is empty")
    arrays = [
        item.array if isinstance(item, Trajectory) else np.atleast_2d(np.asarray(item, dtype=float))
        for item in corpus
    ]
    dims = {a.shape[1] for a in arrays}
    if len(dims) != 1:
        raise DimensionMismatchError(f"Series have different dimensions: {sorted(dims)}")
    for i, a in enumerate(arrays):
        if a.shape[0] < var_order + 2:
            raise LearnerError(
                f"Series {i} has {a.shape[0]} steps, at least r+2={var_order + 2} are needed"
            )
    return arrays


def _feature_logliks(thetas: Sequence[Theta], obs: np.ndarray, features) -> np.ndarray:
    return np.stack([series_loglik(thetas[k].lags, thetas[k].sigma, obs) for k in features])


def _normalize_weights(gammas: np.ndarray, row: np.ndarray) -> np.ndarray:
    """π_j = η_j restricted to the series' features and renormalized; rows outside are zero."""
    mask = np.asarray(row, dtype=bool)
    pi = np.where(mask[None, :], gammas, 0.0)
    pi[~mask] = 0.0
    sums = pi.sum(axis=1, keepdims=True)
    np.divide(pi, sums, out=pi, where=sums > 0)
    return pi


def _scaled(logliks: np.ndarray):
    """Likelihoods shifted by the per-step maximum, laid out (n, K)."""
    offsets = logliks.max(axis=0)
    finite = np.isfinite(offsets)
    safe = np.where(finite, offsets, 0.0)
    lik = np.exp(logliks - safe[None, :]).T
    lik[~finite] = 1.0
    return np.ascontiguousarray(lik), safe, bool(finite.all())


def forward_loglik(logliks: np.ndarray, trans: np.ndarray) -> float:
    """log p(y | θ, π) with the mode sequence summed out; uniform initial mode."""
    lik, offsets, finite = _scaled(logliks)
    if not finite:
        return float("-inf")
    n, K = lik.shape
    scales = np.empty(n)
    alpha = lik[0] / K
    scales[0] = alpha.sum()
    alpha = alpha / scales[0]
    for t in range(1, n):
        alpha = (alpha @ trans) * lik[t]
        scales[t] = alpha.sum()
        if scales[t] <= 0.0:
            return float("-inf")
        alpha = alpha / scales[t]
    return float(np.log(scales).sum() + offsets.sum())


def _draw(weights: np.ndarray, u: float) -> int:
    cumulative = np.cumsum(weights)
    index = int(np.searchsorted(cumulative, u * cumulative[-1], side="right"))
    return min(index, weights.shape[0] - 1)


def sample_path(logliks: np.ndarray, trans: np.ndarray, gen: np.random.Generator) -> np.ndarray:
    """Backward messages, then forward sampling of local mode indices."""
    lik, _, _ = _scaled(logliks)
    n, K = lik.shape
    if K == 1:
        return np.zeros(n, dtype=int)
    messages = np.empty((n, K))
    messages[-1] = 1.0
    for t in range(n - 2, -1, -1):
        b = trans @ (lik[t + 1] * messages[t + 1])
        messages[t] = b / b.sum()
    u = gen.random(n)
    z = np.empty(n, dtype=int)
    z[0] = _draw(lik[0] * messages[0], u[0])
    for t in range(1, n):
        z[t] = _draw(trans[z[t - 1]] * lik[t] * messages[t], u[t])
    return z


def sample_mode_sequences(state: LearnerState, corpus, rng, threads: int = 1) -> LearnerState:
    series = _series(corpus, state.var_order)
    stream = as_stream(rng)

    def sample_one(i: int) -> np.ndarray:
        active = np.flatnonzero(state.features[i])
        logliks = _feature_logliks(state.thetas, series[i], active)
        trans = state.trans_weights[i][np.ix_(active, active)]
        return active[sample_path(logliks, trans, stream.substream(i).generator())]

    return state.copy(mode_seqs=ordered_map(sample_one, range(len(series)), threads))


def sample_feature_weights(state: LearnerState, rng) -> np.ndarray:
    """ω_k ~ Beta(c/K + m_k, 1 + N − m_k) under the K-truncated beta process."""
    N, K = state.features.shape
    m = state.features.sum(axis=0)
    a = state.hypers.bp_mass / K
    return as_stream(rng).generator().beta(a + m, 1.0 + N - m)


def sample_features(state: LearnerState, corpus, rng, threads: int = 1) -> LearnerState:
    """Toggles F[i, k] by the forward-algorithm marginal likelihood times ω_k.

    Features that z^i uses stay on, so every row keeps at least one feature.
    """
    series = _series(corpus, state.var_order)
    if state.trans_gammas is None:
        raise LearnerError("Feature sampling needs the Gamma transition variables")
    stream = as_stream(rng)
    K = state.num_features
    omega = sample_feature_weights(state, stream.substream(0))
    with np.errstate(divide="ignore"):
        log_on, log_off = np.log(omega), np.log1p(-omega)

    def sample_row(i: int) -> np.ndarray:
        gen = stream.substream(1, i).generator()
        gammas = state.trans_gammas[i]
        logliks = _feature_logliks(state.thetas, series[i], range(K))
        used = np.zeros(K, dtype=bool)
        used[np.unique(state.mode_seqs[i])] = True
        row = state.features[i].astype(bool) | used

        def marginal(mask):
            active = np.flatnonzero(mask)
            trans = _normalize_weights(gammas, mask)[np.ix_(active, active)]
            return forward_loglik(logliks[active], trans)

        current = marginal(row)
        for k in range(K):
            if used[k]:
                continue
            alt = row.copy()
            alt[k] = not row[k]
            if not alt.any():
                continue
            alt_ll = marginal(alt)
            on_ll, off_ll = (alt_ll, current) if alt[k] else (current, alt_ll)
            with np.errstate(invalid="ignore"):
                lon, loff = log_on[k] + on_ll, log_off[k] + off_ll
                p_on = np.exp(lon - np.logaddexp(lon, loff))
            if not np.isfinite(p_on):
                continue
            if (gen.random() < p_on) != row[k]:
                row, current = alt, alt_ll
        return row.astype(int)

    features = np.asarray(ordered_map(sample_row, range(state.num_series), threads))
    weights = [_normalize_weights(g, f) for g, f in zip(state.trans_gammas, features)]
    return state.copy(features=features, feature_weights=omega, trans_weights=weights)


def sample_thetas(state: LearnerState, corpus, rng, prior: Optional[MNIWPrior] = None) -> LearnerState:
    """θ_k from the MNIW posterior of the steps assigned to k; unassigned features get prior draws."""
    series = _series(corpus, state.var_order)
    r = state.var_order
    d = series[0].shape[1]
    prior = prior or MNIWPrior.default(d, r)
    stream = as_stream(rng)
    designs = [lagged_design(obs, r) for obs in series]
    thetas = []
    for k in range(state.num_features):
        X = np.concatenate([X[z == k] for (X, _), z in zip(designs, state.mode_seqs)])
        Y = np.concatenate([Y[z == k] for (_, Y), z in zip(designs, state.mode_seqs)])
        W, sigma = mniw_sample(mniw_posterior(prior, X, Y), stream.substream(k))
        thetas.append(Theta(weights=W, sigma=sigma))
    return state.copy(thetas=thetas)


def sample_trans_weights(state: LearnerState, corpus, rng) -> LearnerState:
    """Sticky Dirichlet posterior Dir(γ + n_j + κ·e_j) over each series' features.

    Drawn as normalized Gamma(γ + κ·δ_jk + n_jk) variables, which are kept for every
    feature pair so that switching a feature on in `sample_features` has weights ready.
    """
    stream = as_stream(rng)
    hypers = state.hypers
    K = state.num_features
    gammas, weights = [], []
    for i, z in enumerate(state.mode_seqs):
        counts = np.zeros((K, K))
        np.add.at(counts, (z[:-1], z[1:]), 1.0)
        shape = hypers.dir_conc + hypers.sticky * np.eye(K) + counts
        eta = np.maximum(stream.substream(i).generator().gamma(shape), TINY)
        gammas.append(eta)
        weights.append(_normalize_weights(eta, state.features[i]))
    return state.copy(trans_gammas=gammas, trans_weights=weights)


def joint_log_prob(state: LearnerState, corpus, prior: Optional[MNIWPrior] = None) -> float:
    """log p(y, z, π, θ, F, ω) up to constants shared by every sample of a run."""
    series = _series(corpus, state.var_order)
    d = series[0].shape[1]
    prior = prior or MNIWPrior.default(d, state.var_order)
    hypers = state.hypers
    total = 0.0
    for i, obs in enumerate(series):
        z = state.mode_seqs[i]
        active = np.flatnonzero(state.features[i])
        for k in np.unique(z):
            total += float(series_loglik(state.thetas[k].lags, state.thetas[k].sigma, obs)[z == k].sum())
        pi = state.trans_weights[i]
        total -= np.log(len(active))
        if z.size > 1:
            total += float(np.log(np.maximum(pi[z[:-1], z[1:]], TINY)).sum())
        if len(active) > 1:
            for j in active:
                x = np.maximum(pi[j, active], TINY)
                concentration = hypers.dir_conc + hypers.sticky * (active == j)
                total += float(stats.dirichlet.logpdf(x / x.sum(), concentration))
    for k in state.used_features():
        total += mniw_logpdf(state.thetas[k].weights, state.thetas[k].sigma, prior)
    if state.feature_weights is not None:
        omega = np.clip(state.feature_weights, TINY, 1.0 - 1e-16)
        F = state.features
        total += float((xlogy(F, omega) + xlog1py(1 - F, -omega)).sum())
        total += float(stats.beta.logpdf(omega, hypers.bp_mass / state.num_features, 1.0).sum())
    return total


def hamming_error(true_labels, estimated_labels) -> float:
    """Fraction of mislabeled steps after the best one-to-one matching of label sets."""
    truth = np.asarray(true_labels).ravel()
    estimate = np.asarray(estimated_labels).ravel()
    if truth.shape != estimate.shape:
        raise ValueError(f"Label sequences differ in length: {truth.size} vs {estimate.size}")
    if truth.size == 0:
        return 0.0
    _, t = np.unique(truth, return_inverse=True)
    _, e = np.unique(estimate, return_inverse=True)
    overlap = np.zeros((t.max() + 1, e.max() + 1))
    np.add.at(overlap, (t, e), 1.0)
    rows, cols = linear_sum_assignment(-overlap)
    return 1.0 - overlap[rows, cols].sum() / truth.size


def prune(state: LearnerState) -> LearnerState:
    """Drops features no series assigns a step to and renumbers the rest in order."""
    used = state.used_features()
    if len(used) == state.num_features:
        return state
    remap = np.full(state.num_features, -1, dtype=int)
    remap[used] = np.arange(len(used))
    features = state.features[:, used]
    gammas = [g[np.ix_(used, used)] for g in state.trans_gammas]
    return state.copy(
        features=features,
        mode_seqs=[remap[z] for z in state.mode_seqs],
        thetas=[state.thetas[k] for k in used],
        trans_gammas=gammas,
        trans_weights=[_normalize_weights(g, f) for g, f in zip(gammas, features)],
        feature_weights=None if state.feature_weights is None else state.feature_weights[used],
    )


def _block_fit(X: np.ndarray, Y: np.ndarray):
    m = X.shape[1]
    if m:
        W = np.linalg.solve(X.T @ X + RIDGE * np.eye(m), X.T @ Y).T
        residuals = Y - X @ W.T
    else:
        W = np.zeros((Y.shape[1], 0))
        residuals = Y
    cov = residuals.T @ residuals / max(Y.shape[0], 1) + RIDGE * np.eye(Y.shape[1])
    return W, cov, residuals


def _clustered_loglik(designs, blocks, labels) -> float:
    total = 0.0
    for c in np.unique(labels):
        members = [blocks[b] for b in np.flatnonzero(labels == c)]
        X = np.concatenate([designs[i][0][a:b] for i, a, b in members])
        Y = np.concatenate([designs[i][1][a:b] for i, a, b in members])
        _, cov, residuals = _block_fit(X, Y)
        total += float(logpdf_from_residuals(residuals, cholesky(cov)).sum())
    return total


def initial_modes(series: List[np.ndarray], var_order: int, max_features: int, gen) -> List[np.ndarray]:
    """Seeds z by clustering per-block least-squares fits.

    The number of clusters (at most INIT_MAX_FEATURES) is the one with the best BIC of the
    pooled per-cluster fits.
    """
    designs = [lagged_design(obs, var_order) for obs in series]
    blocks, summaries = [], []
    for i, (X, Y) in enumerate(designs):
        n = Y.shape[0]
        edges = np.linspace(0, n, max(1, n // INIT_BLOCK) + 1).astype(int)
        for a, b in zip(edges[:-1], edges[1:]):
            W, cov, _ = _block_fit(X[a:b], Y[a:b])
            blocks.append((i, a, b))
            summaries.append(np.concatenate([W.ravel(), np.log(np.diag(cov))]))
    summaries = np.asarray(summaries)
    scale = summaries.std(axis=0)
    summaries = summaries / np.where(scale > 0, scale, 1.0)

    d = series[0].shape[1]
    params = d * d * var_order + d * (d + 1) / 2
    num_steps = sum(Y.shape[0] for _, Y in designs)
    best_score, best_labels = -np.inf, np.zeros(len(blocks), dtype=int)
    for k in range(1, min(max_features, INIT_MAX_FEATURES, len(blocks)) + 1):
        if k == 1:
            labels = np.zeros(len(blocks), dtype=int)
        else:
            _, labels = kmeans2(summaries, k, minit="++", seed=gen)
            labels = np.unique(labels, return_inverse=True)[1]
        num_clusters = labels.max() + 1
        score = _clustered_loglik(designs, blocks, labels) - 0.5 * num_clusters * params * np.log(num_steps)
        if score > best_score:
            best_score, best_labels = score, labels

    modes = [np.zeros(Y.shape[0], dtype=int) for _, Y in designs]
    for (i, a, b), label in zip(blocks, best_labels):
        modes[i][a:b] = label
    return modes


def initial_state(corpus, config: LearnerConfig, prior: MNIWPrior, rng: RngStream) -> LearnerState:
    series = _series(corpus, config.var_order)
    K = config.max_features
    modes = initial_modes(series, config.var_order, K, rng.substream(0).generator())
    features = np.zeros((len(series), K), dtype=int)
    for i, z in enumerate(modes):
        features[i, np.unique(z)] = 1
    state = LearnerState(
        features=features,
        mode_seqs=modes,
        trans_weights=[],
        thetas=[],
        hypers=config.hypers,
        var_order=config.var_order,
    )
    state = sample_thetas(state, series, rng.substream(1), prior)
    state = sample_trans_weights(state, series, rng.substream(2))
    state = state.copy(feature_weights=sample_feature_weights(state, rng.substream(3)))
    return state.copy(log_prob=joint_log_prob(state, series, prior))


@dataclass
class FitResult:
    """Post-burn-in samples (pruned), the highest-probability one and the per-sweep trace.

    Unpacks as `samples, best = fit_bp_arhmm(...)`.
    """

    samples: List[LearnerState]
    best: LearnerState
    trace: List[dict] = field(default_factory=list)
    initial_log_probs: List[float] = field(default_factory=list)

    def __iter__(self):
        return iter((self.samples, self.best))


def _run_chain(series, config: LearnerConfig, prior, stream: RngStream, chain: int, threads: int, events_logger):
    state = initial_state(series, config, prior, stream.substream(0)).copy(chain=chain)
    initial = state.log_prob
    trace = [{"chain": chain, "sweep": 0, "log_prob": initial, "num_active": state.num_active}]
    samples = []
    for sweep in range(1, config.sweeps + 1):
        sites = stream.substream(sweep)
        state = sample_mode_sequences(state, series, sites.substream(SITE_MODES), threads)
        state = sample_features(state, series, sites.substream(SITE_FEATURES), threads)
        state = sample_thetas(state, series, sites.substream(SITE_THETAS), prior)
        state = sample_trans_weights(state, series, sites.substream(SITE_TRANS))
        state = state.copy(log_prob=joint_log_prob(state, series, prior), sweep=sweep)
        if config.debug:
            state.check_invariants()

        record = {"chain": chain, "sweep": sweep, "log_prob": state.log_prob, "num_active": state.num_active}
        trace.append(record)
        log_event(events_logger, {"event": "sweep", **record})
        bt.logging.trace(f"chain {chain} sweep {sweep}: log p={state.log_prob:.3f}, {state.num_active} features")
        if sweep % 50 == 0:
            bt.logging.debug(f"chain {chain} sweep {sweep}/{config.sweeps}: log p={state.log_prob:.3f}")

        if sweep > config.burn_in and (sweep - config.burn_in) % config.thin == 0:
            samples.append(prune(state))
    return samples, trace, initial


def fit_bp_arhmm(corpus, config: LearnerConfig, events_logger=None) -> FitResult:
    """Weak-limit Gibbs sampler for the beta-process AR-HMM.

    Chains run on independent substreams of `config.seed`; one chain is sequential, and the
    per-series steps inside a sweep may run on `config.threads` workers.
    """
    series = _series(corpus, config.var_order)
    if config.seed is None:
        raise ConfigError("Learning needs an explicit seed")
    d = series[0].shape[1]
    prior = MNIWPrior.default(
        d, config.var_order, config.k0_scale, config.s0_scale, config.nu0_offset
    ).validate()
    root = RngStream(config.seed)
    bt.logging.info(
        f"Fitting BP-AR-HMM: {len(series)} series, d={d}, r={config.var_order}, "
        f"K_max={config.max_features}, {config.sweeps} sweeps x {config.chains} chain(s)"
    )

    inner = config.threads if config.chains == 1 else 1
    runs = ordered_map(
        lambda c: _run_chain(series, config, prior, root.substream(c), c, inner, events_logger),
        range(config.chains),
        config.threads,
    )
    samples = [s for run, _, _ in runs for s in run]
    if not samples:
        raise LearnerError("No sample survived burn-in and thinning")
    trace = [row for _, rows, _ in runs for row in rows]
    best = max(samples, key=lambda s: s.log_prob)
    dropped = config.max_features - best.num_features
    if dropped:
        bt.logging.warning(f"Pruned {dropped} unused features from the best sample")
    bt.logging.info(
        f"Best sample: chain {best.chain} sweep {best.sweep}, log p={best.log_prob:.3f}, "
        f"{best.num_features} features"
    )
    return FitResult(samples=samples, best=best, trace=trace, initial_log_probs=[r[2] for r in runs])
