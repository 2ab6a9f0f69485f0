"""Block coordinate projected gradient ascent.

Each sweep visits nodes in time order and takes one projected gradient step
on each affiliation row, then one projected step on the interaction matrix.
Step sizes come from backtracking line search, so every update is an ascent
step and the likelihood trace never decreases.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field, replace

import numpy as np

from ..exceptions import NotNatural
from ..graph import TemporalTextNetwork, classify_temporality
from .init import init_affiliations, init_interactions
from .likelihood import (
    EPS_FLOOR,
    Mode,
    PairIndex,
    _clamped_log1mexp,
    _log_likelihood_internal,
    _odds,
    _allowed_pair_mass,
    group_sums,
    pair_index,
)
from .membership import community_thresholds, extract_cover

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class FitConfig:
    K: int
    mode: Mode = Mode.NET
    max_sweeps: int = 500
    tol: float = 1e-4
    step_init: float = 1.0
    shrink: float = 0.5
    armijo: float = 1e-4
    max_backtracks: int = 10
    eta_max_backtracks: int = 40
    zero_row_fill: float = 0.1
    eps: float = EPS_FLOOR
    seed: int = 0
    strict: bool = False

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        if self.K < 1:
            raise ValueError("K must be >= 1")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if not 0 < self.shrink < 1:
            raise ValueError("shrink must lie in (0, 1)")
        if not 0 < self.eps <= 1e-6:
            raise ValueError("eps must lie in (0, 1e-6]")
        if self.max_backtracks < 0 or self.max_sweeps < 0:
            raise ValueError("iteration limits must be nonnegative")

    def with_(self, **changes) -> "FitConfig":
        return replace(self, **changes)


@dataclass
class FittedModel:
    F: np.ndarray
    eta: np.ndarray
    log_likelihood: float
    n_sweeps: int
    trace: list[float]
    mode: Mode = Mode.NET
    node_ids: list[str] | None = None
    word_mask: np.ndarray | None = None
    converged: bool = False
    sweep_seconds: list[float] = field(default_factory=list)

    @property
    def K(self) -> int:
        return self.F.shape[1]

    @property
    def N(self) -> int:
        return self.F.shape[0]

    def thresholds(self) -> np.ndarray:
        return community_thresholds(self.eta, self.N)

    def cover(self):
        return extract_cover(self.F, self.thresholds(), self.node_ids, self.word_mask)


def _backtrack(objective, x, g, f0, step_init, shrink, armijo, max_backtracks):
    """Projected Armijo backtracking; returns (step, new point, new value)."""
    step = step_init
    for _ in range(max_backtracks + 1):
        y = np.maximum(0.0, x + step * g)
        moved = y - x
        if not moved.any():
            return 0.0, x, f0
        fy = objective(y)
        if np.isfinite(fy) and fy - f0 >= armijo * float(g @ moved):
            return step, y, fy
        step *= shrink
    return 0.0, x, f0


def line_search_step(objective, point, direction, cfg: FitConfig | None = None, **kw) -> float:
    """Largest step init * shrink**m whose projected point passes the Armijo test.

    The test is ``f(P(x + a g)) - f(x) >= c * g . (P(x + a g) - x)`` where P
    clips at zero; without clipping the right side is ``c a |g|^2``.  Returns 0
    when no trial step qualifies or the projected point does not move.
    """
    params = dict(step_init=1.0, shrink=0.5, armijo=1e-4, max_backtracks=10)
    if cfg is not None:
        params.update(step_init=cfg.step_init, shrink=cfg.shrink, armijo=cfg.armijo,
                      max_backtracks=cfg.max_backtracks)
    params.update(kw)
    x = np.atleast_1d(np.asarray(point, dtype=float))
    g = np.atleast_1d(np.asarray(direction, dtype=float))
    f = (lambda y: float(objective(y if np.ndim(point) else y[0])))
    step, _, _ = _backtrack(f, x, g, f(x), **params)
    return step


def _sweep_affiliations(idx: PairIndex, Fi, eta, cfg: FitConfig):
    """One pass of per-node projected gradient steps in time order (in place)."""
    eps = cfg.eps
    etaT = eta.T
    gsum, _ = group_sums(idx, Fi)
    total = gsum.sum(axis=0)
    before = np.zeros(Fi.shape[1])
    in_ptr, in_nbr, out_ptr, out_nbr = idx.in_ptr, idx.in_nbr, idx.out_ptr, idx.out_nbr
    bounds = idx.bounds
    ls = (cfg.step_init, cfg.shrink, cfg.armijo, cfg.max_backtracks)
    for g in range(idx.n_groups):
        for p in range(bounds[g], bounds[g + 1]):
            future = total - before - gsum[g]
            lin = before @ eta + eta @ future
            nbr_in = in_nbr[in_ptr[p]:in_ptr[p + 1]]
            nbr_out = out_nbr[out_ptr[p]:out_ptr[p + 1]]
            C = np.vstack([Fi[nbr_in] @ eta, Fi[nbr_out] @ etaT])
            penalty = lin - C.sum(axis=0)
            f = Fi[p]

            def objective(y, C=C, penalty=penalty):
                return float(_clamped_log1mexp(C @ y, eps).sum() - penalty @ y)

            grad = (_odds(C @ f, eps) + 1.0) @ C - lin
            step, new, _ = _backtrack(objective, f, grad, objective(f), *ls)
            if step:
                diff = new - f
                Fi[p] = new
                gsum[g] += diff
                total += diff
        before += gsum[g]


def _step_interactions(idx: PairIndex, Fi, eta, cfg: FitConfig):
    eps = cfg.eps
    Fs, Fd = Fi[idx.src], Fi[idx.dst]
    mass = _allowed_pair_mass(idx, Fi)

    def objective(flat):
        e = flat.reshape(eta.shape)
        x = np.einsum("ek,ek->e", Fs @ e, Fd)
        return float(_clamped_log1mexp(x, eps).sum() - np.sum(e * mass) + x.sum())

    x = np.einsum("ek,ek->e", Fs @ eta, Fd)
    w = _odds(x, eps) + 1.0
    grad = (Fs * w[:, None]).T @ Fd - mass
    if not idx.mode.timed:
        grad = 0.5 * (grad + grad.T)
    flat = eta.ravel()
    step, new, _ = _backtrack(objective, flat, grad.ravel(), objective(flat),
                              cfg.step_init, cfg.shrink, cfg.armijo, cfg.eta_max_backtracks)
    new = new.reshape(eta.shape)
    if not idx.mode.timed:
        new = 0.5 * (new + new.T)
    return new


def fit(net: TemporalTextNetwork, cfg: FitConfig, F0=None, eta0=None,
        index: PairIndex | None = None) -> FittedModel:
    """Maximize the log-likelihood of ``net`` by block coordinate ascent.

    Starts from the conductance-seeded affiliations and the default
    interaction matrix unless ``F0`` / ``eta0`` are given.  Stops once a full
    sweep improves the likelihood by less than ``cfg.tol`` relative, or after
    ``cfg.max_sweeps`` sweeps.
    """
    mode = cfg.mode
    if mode.timed and cfg.strict and net.directed:
        report = classify_temporality(net)
        if not report.is_natural:
            raise NotNatural(report.violations)
    idx = index if index is not None else pair_index(net, mode)
    if F0 is None:
        F0 = init_affiliations(net, cfg.K, seed=cfg.seed, mode=mode)
    eta = np.array(init_interactions(cfg.K) if eta0 is None else eta0, dtype=float)
    Fi = idx.to_internal(F0).copy()
    Fi[~Fi.any(axis=1)] = cfg.zero_row_fill

    current = _log_likelihood_internal(idx, Fi, eta, cfg.eps)
    trace = [current]
    seconds = []
    converged = False
    for sweep in range(cfg.max_sweeps):
        t0 = time.perf_counter()
        _sweep_affiliations(idx, Fi, eta, cfg)
        eta = _step_interactions(idx, Fi, eta, cfg)
        seconds.append(time.perf_counter() - t0)
        value = _log_likelihood_internal(idx, Fi, eta, cfg.eps)
        trace.append(value)
        gain = value - current
        current = value
        log.debug("sweep %d: loglik %.6f (gain %.3g)", sweep + 1, value, gain)
        if gain < cfg.tol * abs(value):
            converged = True
            break

    return FittedModel(
        F=idx.to_network(Fi), eta=eta, log_likelihood=current, n_sweeps=len(trace) - 1,
        trace=trace, mode=mode, node_ids=net.ids,
        word_mask=net.word_mask if mode is Mode.ALL else None,
        converged=converged, sweep_seconds=seconds,
    )
