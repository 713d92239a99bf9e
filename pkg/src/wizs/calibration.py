"""Score -> accuracy calibration by beta regression.

Per-class accuracy A in (0, 1) is modeled as Beta(alpha, beta) with both shape
parameters log-linear in the feature vector X = (1, score):

    log alpha = X . theta1        log beta = X . theta2

The predicted accuracy is the fitted mean alpha / (alpha + beta), which reduces
to sigmoid(X . (theta1 - theta2)). Fitting is deterministic full-batch gradient
ascent on the exact log-likelihood with a backtracking (halving) line search;
no stochasticity, so identical inputs give bit-identical models.

The digamma function needed by the gradient lives here too (recurrence to push
the argument above 10, then the asymptotic series), checked against frozen
high-precision references in the tests.
"""
from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.special import gammaln

from .errors import (
    InsufficientDataError,
    InsufficientGroupsError,
    NonFiniteError,
    SingularFitError,
    UnconvergedModelError,
    ValidationError,
)

FEATURE_MAP_INTERCEPT_SCORE = "intercept_score"

ACCURACY_CLAMP_EPS = 1e-4
MIN_FIT_POINTS = 10
GRAD_TOL = 1e-8
MAX_ITERATIONS = 10_000
ARMIJO_C = 1e-4
MAX_HALVINGS = 64
# trial steps keeping every linear predictor inside +-300 stay exp/gammaln-safe
LINEAR_PREDICTOR_CAP = 300.0

MODEL_FORMAT = "wizs-calibration"
MODEL_FORMAT_VERSION = 1


# ------------------------------------------------------------------------------
# digamma kernel
# ------------------------------------------------------------------------------

# psi(x) ~ ln x - 1/(2x) - sum_k B_2k / (2k x^2k); coefficients of x^-2k
_SERIES = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
)
_SERIES_CUTOFF = 10.0


def digamma(x):
    """Digamma for positive arguments, elementwise; absolute error < 1e-10.

    Arguments below 10 are raised with psi(x) = psi(x + 1) - 1/x, then the
    asymptotic series is applied.
    """
    arr = np.asarray(x, dtype=np.float64)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    if not np.all(np.isfinite(arr)):
        raise NonFiniteError("digamma argument contains NaN or infinity")
    if np.any(arr <= 0.0):
        raise ValidationError("digamma is only defined here for arguments > 0")
    work = arr.copy()
    acc = np.zeros_like(work)
    small = work < _SERIES_CUTOFF
    while small.any():
        acc[small] -= 1.0 / work[small]
        work[small] += 1.0
        small = work < _SERIES_CUTOFF
    inv2 = 1.0 / (work * work)
    series = np.zeros_like(work)
    for coef in reversed(_SERIES):
        series = inv2 * (coef + series)
    out = acc + np.log(work) - 0.5 / work - series
    return float(out[0]) if scalar else out


# ------------------------------------------------------------------------------
# model containers
# ------------------------------------------------------------------------------


@dataclass(frozen=True)
class FitMeta:
    iterations: int
    final_log_likelihood: float
    converged: bool
    termination: str  # "gradient" | "stalled" | "iteration_cap"


@dataclass(frozen=True)
class CalibrationModel:
    theta1: np.ndarray
    theta2: np.ndarray
    feature_map: str
    fit_meta: FitMeta
    model_id: str = ""
    statistic: str = "mean"


@dataclass(frozen=True)
class CalibrationGroup:
    dataset_id: str
    scores: np.ndarray
    accuracies: np.ndarray


@dataclass(frozen=True)
class FoldResult:
    dataset_id: str
    held_out_mae: float
    n_points: int
    model: CalibrationModel


def featurize(score: float, feature_map: str = FEATURE_MAP_INTERCEPT_SCORE) -> np.ndarray:
    """Map a scalar score to its regression feature vector."""
    if feature_map != FEATURE_MAP_INTERCEPT_SCORE:
        raise ValidationError(f"unknown feature map {feature_map!r}")
    s = float(score)
    if not np.isfinite(s):
        raise NonFiniteError("score must be finite")
    return np.array([1.0, s])


def _design(scores: np.ndarray, feature_map: str) -> np.ndarray:
    if feature_map != FEATURE_MAP_INTERCEPT_SCORE:
        raise ValidationError(f"unknown feature map {feature_map!r}")
    return np.column_stack([np.ones_like(scores), scores])


# ------------------------------------------------------------------------------
# likelihood
# ------------------------------------------------------------------------------


def log_likelihood(theta1, theta2, X: np.ndarray, A: np.ndarray) -> float:
    """Exact beta log-likelihood of clamped accuracies A under (theta1, theta2)."""
    alpha = np.exp(X @ np.asarray(theta1, dtype=np.float64))
    beta = np.exp(X @ np.asarray(theta2, dtype=np.float64))
    ll = (
        gammaln(alpha + beta)
        - gammaln(alpha)
        - gammaln(beta)
        + (alpha - 1.0) * np.log(A)
        + (beta - 1.0) * np.log1p(-A)
    )
    return float(ll.sum())


def gradient(theta1, theta2, X: np.ndarray, A: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Analytic gradient of log_likelihood w.r.t. (theta1, theta2)."""
    alpha = np.exp(X @ np.asarray(theta1, dtype=np.float64))
    beta = np.exp(X @ np.asarray(theta2, dtype=np.float64))
    psi_ab = digamma(alpha + beta)
    g1 = X.T @ (alpha * (psi_ab - digamma(alpha) + np.log(A)))
    g2 = X.T @ (beta * (psi_ab - digamma(beta) + np.log1p(-A)))
    return g1, g2


# ------------------------------------------------------------------------------
# fitting
# ------------------------------------------------------------------------------


def fit(
    scores,
    accuracies,
    *,
    feature_map: str = FEATURE_MAP_INTERCEPT_SCORE,
    grad_tol: float = GRAD_TOL,
    max_iterations: int = MAX_ITERATIONS,
    model_id: str = "",
) -> CalibrationModel:
    """Fit the beta regression by deterministic gradient ascent.

    Termination: gradient infinity-norm <= grad_tol ("gradient"), no line
    search step yielding a strict likelihood improvement ("stalled", a
    numerical optimum), or the iteration cap ("iteration_cap"). All three are
    normal convergence; fit_meta.termination records which fired. Near-constant
    data rides the unbounded-concentration ridge of the likelihood until the
    cap, which is fine: the mean curve settles long before. converged=False
    never comes out of fit itself; the flag exists so deserialized or
    hand-built models can be refused by predict_accuracy. Accuracies are
    clamped to [1e-4, 1 - 1e-4] before fitting so exact 0/1 observations stay
    inside the support.
    """
    s = np.asarray(scores, dtype=np.float64).ravel()
    a = np.asarray(accuracies, dtype=np.float64).ravel()
    if s.shape[0] != a.shape[0]:
        raise ValidationError(
            f"scores ({s.shape[0]}) and accuracies ({a.shape[0]}) differ in length"
        )
    if s.shape[0] < MIN_FIT_POINTS:
        raise InsufficientDataError(
            f"calibration fit needs >= {MIN_FIT_POINTS} points, got {s.shape[0]}"
        )
    if not (np.all(np.isfinite(s)) and np.all(np.isfinite(a))):
        raise NonFiniteError("calibration inputs contain NaN or infinity")
    if np.any(a < 0.0) or np.any(a > 1.0):
        raise ValidationError("accuracies must lie in [0, 1]")

    X = _design(s, feature_map)
    if np.linalg.matrix_rank(X) < X.shape[1]:
        raise SingularFitError(
            "design matrix is rank-deficient (constant scores); "
            f"accuracy clamp eps={ACCURACY_CLAMP_EPS} was in effect"
        )
    A = np.clip(a, ACCURACY_CLAMP_EPS, 1.0 - ACCURACY_CLAMP_EPS)
    p = X.shape[1]

    def loglik(theta: np.ndarray) -> float:
        return log_likelihood(theta[:p], theta[p:], X, A)

    def grad(theta: np.ndarray) -> np.ndarray:
        g1, g2 = gradient(theta[:p], theta[p:], X, A)
        return np.concatenate([g1, g2])

    def within_cap(theta: np.ndarray) -> bool:
        lin = np.concatenate([X @ theta[:p], X @ theta[p:]])
        return bool(np.max(np.abs(lin)) <= LINEAR_PREDICTOR_CAP)

    theta = np.zeros(2 * p)
    ll = loglik(theta)
    if not np.isfinite(ll):
        raise SingularFitError(
            "log-likelihood is non-finite at the starting point; "
            f"accuracy clamp eps={ACCURACY_CLAMP_EPS} was in effect"
        )
    t_prev = 1.0
    termination = "iteration_cap"
    iterations = max_iterations
    for it in range(max_iterations):
        g = grad(theta)
        if not np.all(np.isfinite(g)):
            raise SingularFitError(
                f"gradient became non-finite at iteration {it} (diverging fit); "
                f"accuracy clamp eps={ACCURACY_CLAMP_EPS} was in effect"
            )
        if float(np.max(np.abs(g))) <= grad_tol:
            termination, iterations = "gradient", it
            break
        gsq = float(g @ g)
        t = min(1.0, 2.0 * t_prev)
        accepted = False
        for _ in range(MAX_HALVINGS):
            cand = theta + t * g
            if within_cap(cand):
                ll_new = loglik(cand)
                if np.isfinite(ll_new) and ll_new >= ll + ARMIJO_C * t * gsq and ll_new > ll:
                    accepted = True
                    break
            t *= 0.5
        if not accepted:
            termination, iterations = "stalled", it
            break
        theta, ll, t_prev = cand, ll_new, t
    converged = True

    theta1, theta2 = theta[:p].copy(), theta[p:].copy()
    if not model_id:
        digest = hashlib.sha256(
            json.dumps([theta1.tolist(), theta2.tolist()]).encode()
        ).hexdigest()
        model_id = f"cal-{digest[:12]}"
    return CalibrationModel(
        theta1=theta1,
        theta2=theta2,
        feature_map=feature_map,
        fit_meta=FitMeta(
            iterations=iterations,
            final_log_likelihood=ll,
            converged=converged,
            termination=termination,
        ),
        model_id=model_id,
    )


def predict_accuracy(model: CalibrationModel, score: float) -> float:
    """Mean of the fitted beta at this score: sigmoid(X . (theta1 - theta2)).

    Strictly inside (0, 1). Extrapolation beyond the fitted score range is
    allowed. Raises UnconvergedModelError for models carrying converged=False
    (possible in hand-built or externally loaded model files; fit() itself
    marks every normal termination as converged).
    """
    if not model.fit_meta.converged:
        raise UnconvergedModelError(
            f"model {model.model_id or '<unnamed>'} did not converge "
            f"({model.fit_meta.termination}); refusing to predict"
        )
    x = featurize(score, model.feature_map)
    m = float(x @ (model.theta1 - model.theta2))
    # numerically stable logistic
    if m >= 0:
        prob = 1.0 / (1.0 + np.exp(-m))
    else:
        e = np.exp(m)
        prob = e / (1.0 + e)
    tiny_hi = np.nextafter(1.0, 0.0)
    tiny_lo = np.nextafter(0.0, 1.0)
    return float(min(max(prob, tiny_lo), tiny_hi))


def loo_cv(groups: Sequence[CalibrationGroup]) -> list[FoldResult]:
    """Leave-one-dataset-out cross-validation.

    Each fold fits on the other groups and reports mean absolute error on the
    held-out group. Fit failures propagate with the fold named.
    """
    groups = list(groups)
    if len(groups) < 3:
        raise InsufficientGroupsError(
            f"leave-one-out needs >= 3 dataset groups, got {len(groups)}"
        )
    ids = [g.dataset_id for g in groups]
    if len(set(ids)) != len(ids):
        raise ValidationError(f"duplicate dataset_id among groups: {sorted(ids)}")
    results = []
    for held in groups:
        rest = [g for g in groups if g.dataset_id != held.dataset_id]
        train_s = np.concatenate([np.asarray(g.scores, dtype=np.float64) for g in rest])
        train_a = np.concatenate(
            [np.asarray(g.accuracies, dtype=np.float64) for g in rest]
        )
        try:
            model = fit(train_s, train_a)
        except Exception as exc:
            raise type(exc)(f"fold '{held.dataset_id}': {exc}") from exc
        preds = np.array(
            [predict_accuracy(model, float(s)) for s in np.asarray(held.scores).ravel()]
        )
        truth = np.asarray(held.accuracies, dtype=np.float64).ravel()
        if preds.shape[0] != truth.shape[0]:
            raise ValidationError(
                f"fold '{held.dataset_id}': scores and accuracies differ in length"
            )
        results.append(
            FoldResult(
                dataset_id=held.dataset_id,
                held_out_mae=float(np.mean(np.abs(preds - truth))),
                n_points=int(truth.shape[0]),
                model=model,
            )
        )
    return results


# ------------------------------------------------------------------------------
# persistence
# ------------------------------------------------------------------------------


def model_to_dict(model: CalibrationModel) -> dict:
    return {
        "format": MODEL_FORMAT,
        "version": MODEL_FORMAT_VERSION,
        "model_id": model.model_id,
        "feature_map": model.feature_map,
        "statistic": model.statistic,
        "theta1": model.theta1.tolist(),
        "theta2": model.theta2.tolist(),
        "fit_meta": {
            "iterations": model.fit_meta.iterations,
            "final_log_likelihood": model.fit_meta.final_log_likelihood,
            "converged": model.fit_meta.converged,
            "termination": model.fit_meta.termination,
        },
    }


def model_from_dict(doc: dict) -> CalibrationModel:
    if not isinstance(doc, dict) or doc.get("format") != MODEL_FORMAT:
        raise ValidationError(f"not a calibration model document: {MODEL_FORMAT!r} expected")
    if doc.get("version") != MODEL_FORMAT_VERSION:
        raise ValidationError(f"unsupported calibration model version {doc.get('version')!r}")
    try:
        meta = doc["fit_meta"]
        model = CalibrationModel(
            theta1=np.asarray(doc["theta1"], dtype=np.float64),
            theta2=np.asarray(doc["theta2"], dtype=np.float64),
            feature_map=str(doc["feature_map"]),
            fit_meta=FitMeta(
                iterations=int(meta["iterations"]),
                final_log_likelihood=float(meta["final_log_likelihood"]),
                converged=bool(meta["converged"]),
                termination=str(meta["termination"]),
            ),
            model_id=str(doc.get("model_id", "")),
            statistic=str(doc.get("statistic", "mean")),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed calibration model document: {exc}") from exc
    if model.theta1.shape != model.theta2.shape or model.theta1.ndim != 1:
        raise ValidationError("theta1 and theta2 must be 1-D and of equal length")
    return model


def save_model(model: CalibrationModel, path) -> None:
    """Write the model as JSON (atomic rename); floats survive round-trip exactly."""
    doc = model_to_dict(model)
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, path)


def load_model(path) -> CalibrationModel:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise ValidationError(f"calibration model file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"calibration model is not valid JSON: {exc}") from exc
    return model_from_dict(doc)


DEFAULT_MODEL_FILENAME = "default_calibration.json"


def default_model_path() -> Path:
    """The calibration model shipped with the package.

    Fitted on synthetic data (see tools/fit_default_calibration.py); useful
    as a demo fallback, not as a substitute for fitting on real datasets.
    """
    return Path(__file__).resolve().parent / "assets" / DEFAULT_MODEL_FILENAME


def load_default_model() -> CalibrationModel:
    return load_model(default_model_path())
