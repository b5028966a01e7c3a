"""Bayesian conditioning of the synthesized distribution on observations.

Likelihoods are Gaussian around each trial's predicted series and all
products run in the log domain (hundreds of point-wise densities underflow
otherwise); normalization subtracts the maximum before exponentiating, so
hopeless trials collapse gracefully to a posterior of zero instead of NaN.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConditioningError, ValidationError

_LOG_2PI = math.log(2.0 * math.pi)


def normal_likelihood(y: float, mu: float, sigma: float) -> float:
    """Gaussian density of observing y around predicted mean mu."""
    if sigma <= 0:
        raise ValidationError(f"sigma must be positive, got {sigma}")
    d = (y - mu) / sigma
    return math.exp(-0.5 * d * d) / (sigma * math.sqrt(2.0 * math.pi))


def log_normal_likelihood(y: float, mu: float, sigma: float) -> float:
    if sigma <= 0:
        raise ValidationError(f"sigma must be positive, got {sigma}")
    d = (y - mu) / sigma
    return -0.5 * d * d - math.log(sigma) - 0.5 * _LOG_2PI


def posterior(priors, log_likelihoods) -> np.ndarray:
    """Bayes' rule over alternatives: p_k proportional to L_k * prior_k.

    Likelihoods come in log form; normalization is max-subtracted.
    """
    priors = np.asarray(priors, np.float64)
    logl = np.asarray(log_likelihoods, np.float64)
    if priors.shape != logl.shape:
        raise ValidationError("priors and likelihoods differ in length")
    if np.any(priors <= 0):
        raise ValidationError("priors must be positive")
    with np.errstate(divide="ignore"):
        logpost = logl + np.log(priors)
    if np.all(np.isneginf(logpost)):
        raise ConditioningError("all-zero evidence: every alternative has zero likelihood")
    m = logpost.max()
    w = np.exp(logpost - m)
    return w / w.sum()


def sample_log_likelihood(obs_coords: np.ndarray, obs_values: np.ndarray,
                          pred_coords: np.ndarray, pred_values: np.ndarray,
                          sigma: float, intersect: bool = False) -> float:
    """Sum of point-wise log densities of an observation series given one
    trial's predicted series, matched on exact coordinates.

    Coordinates present in the observations but missing from the prediction
    are an error unless ``intersect`` permits partial overlap.
    """
    if sigma <= 0:
        raise ValidationError(f"sigma must be positive, got {sigma}")
    pred_map: dict[float, float] = {}
    for c, v in zip(pred_coords, pred_values):
        pred_map.setdefault(float(c), float(v))
    total = 0.0
    matched = 0
    for c, y in zip(obs_coords, obs_values):
        mu = pred_map.get(float(c))
        if mu is None:
            if intersect:
                continue
            raise ConditioningError(
                f"prediction has no value at observed coordinate {float(c)}; "
                "pass intersect mode to allow partial overlap"
            )
        total += log_normal_likelihood(float(y), mu, sigma)
        matched += 1
    if matched == 0:
        raise ConditioningError("empty coordinate intersection between "
                                "observations and predictions")
    return total


@dataclass(frozen=True)
class PosteriorRow:
    phi: int
    upsilon: int
    tid: int
    prior: float
    posterior: float


@dataclass
class PosteriorTable:
    phi: int
    sigma: float
    symbol: str
    rows: list[PosteriorRow]

    def by_trial(self) -> dict[tuple[int, int], PosteriorRow]:
        return {(r.upsilon, r.tid): r for r in self.rows}

    def to_obj(self) -> dict:
        return {
            "phi": self.phi,
            "sigma": self.sigma,
            "symbol": self.symbol,
            "rows": [
                {"phi": r.phi, "upsilon": r.upsilon, "tid": r.tid,
                 "prior": r.prior, "posterior": r.posterior}
                for r in self.rows
            ],
        }

    @classmethod
    def from_obj(cls, obj: dict) -> "PosteriorTable":
        return cls(
            phi=int(obj["phi"]),
            sigma=float(obj["sigma"]),
            symbol=str(obj["symbol"]),
            rows=[
                PosteriorRow(int(r["phi"]), int(r["upsilon"]), int(r["tid"]),
                             float(r["prior"]), float(r["posterior"]))
                for r in obj["rows"]
            ],
        )


@dataclass(frozen=True)
class TrialPrediction:
    phi: int
    upsilon: int
    tid: int
    prior: float
    coords: np.ndarray
    values: np.ndarray


def condition_predictions(predictions: list[TrialPrediction],
                          obs_coords: np.ndarray, obs_values: np.ndarray,
                          sigma: float, intersect: bool = False) -> PosteriorTable:
    """Compute the per-trial posterior over a set of competing predictions."""
    if not predictions:
        raise ConditioningError("no trial predictions to condition")
    logls = [
        sample_log_likelihood(obs_coords, obs_values, p.coords, p.values,
                              sigma, intersect)
        for p in predictions
    ]
    priors = [p.prior for p in predictions]
    post = posterior(priors, logls)
    rows = [
        PosteriorRow(p.phi, p.upsilon, p.tid, p.prior, float(q))
        for p, q in zip(predictions, post)
    ]
    rows.sort(key=lambda r: (-r.posterior, -r.prior, r.upsilon, r.tid))
    return PosteriorTable(predictions[0].phi, sigma, "", rows)
