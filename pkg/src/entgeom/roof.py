"""Convex-roof extension of pure-state functionals by local search.

Every n-member decomposition of a rank-r density matrix is obtained by
applying an n x r left isometry V to the square-root-weighted eigenvectors:
phi_j = sum_k V_jk sqrt(lambda_k) |e_k>.  The search moves through isometry
space with two-member Givens rotations (each a unitary mixing of rows j and
k), which keeps V isometric exactly and changes only two members per trial.
The result is an upper bound on the true roof; nothing certifies a global
minimum.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DimensionError, IsometryError
from .qstate import (
    DensityMatrix,
    Ensemble,
    PureState,
    eigen_ensemble,
    haar_random_unitary,
)

log = logging.getLogger(__name__)

WEIGHT_CUTOFF = 1e-12
_MAX_STEP = np.pi / 2


@dataclass(frozen=True)
class RoofConfig:
    ensemble_size: int | None = None  # None means rank**2
    restarts: int = 20
    max_iterations: int = 500
    tolerance: float = 1e-7
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.ensemble_size is not None and self.ensemble_size < 1:
            raise ValueError("ensemble_size must be positive")

    @classmethod
    def from_dict(cls, data: dict) -> "RoofConfig":
        known = {"ensemble_size", "restarts", "max_iterations", "tolerance", "seed"}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown roof settings: {sorted(unknown)}")
        return cls(**data)

    def to_dict(self) -> dict:
        return {
            "ensemble_size": self.ensemble_size,
            "restarts": self.restarts,
            "max_iterations": self.max_iterations,
            "tolerance": self.tolerance,
            "seed": self.seed,
        }


@dataclass
class RoofResult:
    value: float
    ensemble: Ensemble
    eigen_value: float
    restarts: int
    iterations: int
    evaluations: int
    upper_bound: bool = True
    restart_values: list = field(default_factory=list)

    def __iter__(self):
        yield self.value
        yield self.ensemble

    def metadata(self) -> dict:
        return {
            "upper_bound": self.upper_bound,
            "restarts": self.restarts,
            "iterations": self.iterations,
            "evaluations": self.evaluations,
            "eigen_ensemble_value": self.eigen_value,
            "ensemble_members": len(self.ensemble),
        }


def _rows_to_ensemble(rows: np.ndarray, dims, labels) -> Ensemble:
    weights = np.einsum("ij,ij->i", rows.conj(), rows).real
    keep = weights >= WEIGHT_CUTOFF
    rows, weights = rows[keep], weights[keep]
    members = tuple(
        PureState(rows[i] / np.sqrt(weights[i]), dims, labels) for i in range(len(weights))
    )
    return Ensemble(weights / weights.sum(), members)


def ensemble_from_isometry(eigens: Ensemble, V) -> Ensemble:
    """Decomposition generated by left isometry ``V`` (n x r) from an eigen-ensemble."""
    V = np.asarray(V, dtype=complex)
    r = len(eigens)
    if V.ndim != 2 or V.shape[1] != r or V.shape[0] < r:
        raise IsometryError(f"need an n x {r} isometry with n >= {r}, got shape {V.shape}")
    if np.max(np.abs(V.conj().T @ V - np.eye(r))) > 1e-10:
        raise IsometryError("V is not a left isometry (V^dagger V != I within 1e-10)")
    first = eigens.members[0]
    base = np.sqrt(eigens.weights)[:, None] * np.array([m.amplitudes for m in eigens.members])
    return _rows_to_ensemble(V @ base, first.dims, first.party_labels)


def batch_evaluator(functional, dims, labels):
    """Map normalized amplitude rows (N x D) to functional values.

    Uses ``functional.batch`` when the functional provides one and falls back
    to one call per row otherwise.
    """
    batch = getattr(functional, "batch", None)
    if batch is not None:
        return lambda amps: np.asarray(batch(amps, dims, labels), dtype=float)

    def loop(amps):
        return np.array(
            [float(functional(PureState._trusted(a, dims, labels))) for a in amps], dtype=float
        )

    return loop


class _Search:
    """One local search: member rows and their weighted contributions."""

    def __init__(self, rows, evaluate):
        self.rows = rows
        self.evaluate = evaluate
        self.evaluations = 0
        self.contrib = self.contributions(rows)

    def contributions(self, rows) -> np.ndarray:
        w = np.einsum("ij,ij->i", rows.conj(), rows).real
        live = w >= WEIGHT_CUTOFF
        if live.all():
            self.evaluations += len(rows)
            return w * self.evaluate(rows / np.sqrt(w)[:, None])
        out = np.zeros(len(rows))
        if live.any():
            self.evaluations += int(live.sum())
            out[live] = w[live] * self.evaluate(rows[live] / np.sqrt(w[live])[:, None])
        return out

    @property
    def value(self) -> float:
        return float(self.contrib.sum())


def _round_robin(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Perfect matchings covering every pair of n members exactly once."""
    players = list(range(n)) + ([-1] if n % 2 else [])
    m = len(players)
    rounds = []
    for _ in range(m - 1):
        js, ks = [], []
        for i in range(m // 2):
            a, b = players[i], players[m - 1 - i]
            if a >= 0 and b >= 0:
                js.append(min(a, b))
                ks.append(max(a, b))
        rounds.append((np.array(js), np.array(ks)))
        players = [players[0]] + [players[-1]] + players[1:-1]
    return rounds


def _local_search(search: _Search, cfg: RoofConfig) -> int:
    """Adaptive-step coordinate descent over Givens angles.

    Each pair of members has two real coordinates (rotation with phase 0 and
    with phase pi/2).  Pairs in one matching are disjoint, so the +step and
    -step probes of one coordinate are evaluated for all of them in a single
    batch, and each pair keeps the better improving probe.  A coordinate's
    step doubles after a success and halves when both probes fail.  Stops
    once every step is below the tolerance or two consecutive sweeps improve
    the value by less than the tolerance.
    """
    n = len(search.rows)
    rounds = _round_robin(n)
    steps = {ph: np.full((n, n), 0.5) for ph in (0.0, np.pi / 2)}
    sweeps = 0
    stalled = 0
    while sweeps < cfg.max_iterations:
        sweeps += 1
        start = search.value
        for js, ks in rounds:
            for ph, step_table in steps.items():
                st = step_table[js, ks]
                active = st >= cfg.tolerance
                if not active.any():
                    continue
                j, k, st = js[active], ks[active], st[active]
                m = len(j)
                e = np.exp(1j * ph)
                theta = np.concatenate([st, -st])
                c, s = np.cos(theta)[:, None], np.sin(theta)[:, None]
                rj, rk = np.tile(search.rows[j], (2, 1)), np.tile(search.rows[k], (2, 1))
                nj = c * rj - s * np.conj(e) * rk
                nk = s * e * rj + c * rk
                cand = search.contributions(np.concatenate([nj, nk]))
                trial = (cand[: 2 * m] + cand[2 * m:]).reshape(2, m)
                pick = np.argmin(trial, axis=0)
                best = trial[pick, np.arange(m)]
                moved = best < search.contrib[j] + search.contrib[k] - 1e-15
                if moved.any():
                    rows = pick[moved] * m + np.flatnonzero(moved)
                    search.rows[j[moved]] = nj[rows]
                    search.rows[k[moved]] = nk[rows]
                    search.contrib[j[moved]] = cand[rows]
                    search.contrib[k[moved]] = cand[2 * m + rows]
                step_table[j, k] = np.where(moved, np.minimum(2.0 * st, _MAX_STEP), 0.5 * st)
        if all(np.all(t[np.triu_indices(n, 1)] < cfg.tolerance) for t in steps.values()):
            break
        stalled = stalled + 1 if start - search.value < cfg.tolerance else 0
        if stalled >= 2:
            break
    return sweeps


def roof_minimize(rho: DensityMatrix, functional: Callable[[PureState], float], cfg: RoofConfig | None = None) -> RoofResult:
    """Minimize sum_j p_j functional(phi_j) over decompositions of ``rho``.

    Restart 0 starts from the eigen-ensemble (padded with empty members), so
    the returned value never exceeds the eigen-ensemble average.  Further
    restarts start from Haar-random isometries drawn from ``cfg.seed``.
    """
    cfg = cfg or RoofConfig()
    eig = eigen_ensemble(rho)
    r = len(eig)
    eigen_value = eig.average(functional)
    if r == 1:
        return RoofResult(eigen_value, eig, eigen_value, 0, 0, 1, upper_bound=False, restart_values=[eigen_value])

    n = cfg.ensemble_size if cfg.ensemble_size is not None else r * r
    if n < r:
        raise DimensionError(f"ensemble_size {n} is below the rank {r}")
    dims, labels = rho.dims, rho.party_labels
    base = np.sqrt(eig.weights)[:, None] * np.array([m.amplitudes for m in eig.members])
    rng = np.random.default_rng(cfg.seed)
    evaluate = batch_evaluator(functional, dims, labels)

    best_rows, best_value = None, np.inf
    total_sweeps = total_evals = 0
    values = []
    for restart in range(cfg.restarts):
        if restart == 0:
            V = np.zeros((n, r), dtype=complex)
            V[:r, :r] = np.eye(r)
        else:
            V = haar_random_unitary(n, rng)[:, :r]
        search = _Search(V @ base, evaluate)
        total_sweeps += _local_search(search, cfg)
        total_evals += search.evaluations
        # re-sum from scratch to shed accumulated rounding in the bookkeeping
        value = float(search.contributions(search.rows).sum())
        values.append(value)
        log.debug("roof restart %d: %.12g", restart, value)
        if value < best_value:
            best_value, best_rows = value, search.rows.copy()

    ensemble = _rows_to_ensemble(best_rows, dims, labels)
    return RoofResult(
        value=min(best_value, eigen_value),
        ensemble=ensemble,
        eigen_value=eigen_value,
        restarts=cfg.restarts,
        iterations=total_sweeps,
        evaluations=total_evals,
        restart_values=values,
    )
