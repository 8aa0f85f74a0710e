"""Cross-validated choice among candidate estimators via one data split.

Curves are split in half at random; every candidate (basis family, rule,
level multiplier, alpha) is fit on the first half and scored by the
held-out empirical risk on the second half.  The winner is the argmin,
ties broken by candidate order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .estimator import hard_threshold, least_squares, per_curve_coeffs, pooled_stats, soft_threshold
from .grid_basis import fourier_basis, haar_basis
from .process_sim import CurvePanel

__all__ = ["CandidateSpec", "SelectionResult", "split_panel", "empirical_risk", "select"]


@dataclass(frozen=True)
class CandidateSpec:
    basis_family: str
    rule: str  # "hard" | "soft" | "least_squares"
    multiplier: float = 1
    alpha: float = 0.05

    def __post_init__(self):
        if self.basis_family not in ("fourier", "haar"):
            raise ValueError(f"unknown basis family {self.basis_family!r}")
        if self.rule not in ("hard", "soft", "least_squares"):
            raise ValueError(f"unknown rule {self.rule!r}")
        if self.rule != "least_squares" and self.multiplier not in (1, 2):
            raise ValueError("multiplier must be 1 or 2 for thresholding rules")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must be in (0,1), got {self.alpha}")

    def label(self) -> str:
        if self.rule == "least_squares":
            return f"{self.basis_family}-ls"
        tag = "ht" if self.rule == "hard" else "st"
        return f"{self.basis_family}-{tag}{int(self.multiplier)}r-a{self.alpha:g}"


@dataclass(frozen=True, eq=False)
class SelectionResult:
    winner: CandidateSpec
    winner_index: int
    risks: np.ndarray
    fitted_values: np.ndarray
    split_seed: int
    i1_indices: np.ndarray
    i2_indices: np.ndarray
    warnings: tuple


def split_panel(panel: CurvePanel, seed: int):
    """Random half split; with odd n the fitting half gets the extra curve."""
    n = panel.n
    if n < 4:
        raise ValueError(f"split needs n >= 4 so both halves can hold >= 2 curves, got {n}")
    perm = np.random.default_rng(seed).permutation(n)
    n1 = (n + 1) // 2
    return np.sort(perm[:n1]), np.sort(perm[n1:])


def empirical_risk(panel: CurvePanel, indices: np.ndarray, g: np.ndarray) -> float:
    """Held-out risk (1/|I|) sum_i (1/m) sum_j (Y_ij - g(t_j))^2."""
    idx = np.asarray(indices, dtype=int)
    if idx.size == 0:
        raise ValueError("empirical risk needs a nonempty index set")
    g = np.asarray(g, dtype=float)
    if g.shape != (panel.grid.m,):
        raise ValueError(f"fitted values must have length {panel.grid.m}")
    return float(np.mean((panel.Y[idx] - g) ** 2))


def _fit(panel: CurvePanel, rows: np.ndarray, cand: CandidateSpec, basis) -> np.ndarray:
    sub = panel.Y[rows]
    stats = pooled_stats(sub @ basis.values / basis.m, cand.alpha)
    if cand.rule == "hard":
        return hard_threshold(stats, basis, cand.multiplier).values
    if cand.rule == "soft":
        return soft_threshold(stats, basis, cand.multiplier).values
    return least_squares(stats, basis).values


def select(panel: CurvePanel, candidates, seed: int, refit_full: bool = False) -> SelectionResult:
    """Fit every candidate on one half, pick the held-out risk minimizer.

    Haar candidates are skipped (with a recorded warning) when m is not a
    power of two; their risk slot is set to +inf so indices stay aligned.
    refit_full additionally refits the winner on all n curves, which is a
    convenience outside the single-split analysis.
    """
    candidates = list(candidates)
    if not candidates:
        raise ValueError("candidate list is empty")
    i1, i2 = split_panel(panel, seed)
    bases = {}
    warnings = []
    risks = np.full(len(candidates), np.inf)
    fits = [None] * len(candidates)
    for ell, cand in enumerate(candidates):
        if cand.basis_family not in bases:
            try:
                builder = fourier_basis if cand.basis_family == "fourier" else haar_basis
                bases[cand.basis_family] = builder(panel.grid)
            except ValueError as exc:
                bases[cand.basis_family] = None
                warnings.append(f"skipped {cand.basis_family} candidates: {exc}")
        basis = bases[cand.basis_family]
        if basis is None:
            continue
        fits[ell] = _fit(panel, i1, cand, basis)
        risks[ell] = empirical_risk(panel, i2, fits[ell])
    if not np.any(np.isfinite(risks)):
        raise ValueError("no candidate could be fit on this panel")
    winner_index = int(np.argmin(risks))
    fitted = fits[winner_index]
    if refit_full:
        fitted = _fit(panel, np.arange(panel.n), candidates[winner_index], bases[candidates[winner_index].basis_family])
    return SelectionResult(
        winner=candidates[winner_index],
        winner_index=winner_index,
        risks=risks,
        fitted_values=fitted,
        split_seed=int(seed),
        i1_indices=i1,
        i2_indices=i2,
        warnings=tuple(warnings),
    )
