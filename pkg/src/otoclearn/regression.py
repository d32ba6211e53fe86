"""Kernel ridge regression over the RKHS: closed-form training, metrics,
k-fold cross-validation grid search, and learning curves.

Training solves the regularised least-squares normal equations
(K^2 + lambda*K) alpha = K y through the Moore-Penrose pseudoinverse, which
picks the minimum-norm coefficient vector and stays well defined at
lambda = 0 and for singular Gram matrices.
"""

from __future__ import annotations

import itertools
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .errors import NumericalFailure
from .kernels import (
    KernelSpec,
    gram_matrix,
    kernel_matrix,
    kernel_uses,
    l1_distances,
    squared_distances,
)

# Relative singular-value cutoff for the pseudoinverse: values below
# PINV_RCOND * sigma_max are treated as zero.
PINV_RCOND = 1e-12


class KernelRidge(RegressorMixin, BaseEstimator):
    """Kernel ridge regressor with a pseudoinverse (minimum-norm) solver.

    Parameters
    ----------
    kernel : str or KernelSpec
        Kernel kind ("linear", "polynomial", "rbf", "laplacian", "sigmoid",
        "cosine") or a full KernelSpec.  When a string is given the gamma,
        c0 and degree parameters below apply.
    lam : float
        Regularisation strength; lam = 0 is allowed and falls back to the
        minimum-norm interpolant.
    gamma, c0, degree : float, float, int
        Kernel hyperparameters; ignored by kinds that do not use them.

    Attributes
    ----------
    alpha_ : ndarray of shape (M,)
        Representer coefficients; predictions are sums of kernel evaluations
        against the stored training inputs weighted by alpha_.
    X_train_ : ndarray of shape (M, d)
        Stored training inputs.
    spec_ : KernelSpec
        The resolved kernel specification.
    provenance_ : dict
        Free-form record of where the training data came from.
    """

    def __init__(self, kernel="rbf", lam=0.0, gamma=1.0, c0=0.0, degree=1):
        self.kernel = kernel
        self.lam = lam
        self.gamma = gamma
        self.c0 = c0
        self.degree = degree

    def _resolve_spec(self) -> KernelSpec:
        if isinstance(self.kernel, KernelSpec):
            return self.kernel
        return KernelSpec(
            kind=self.kernel, gamma=self.gamma, c0=self.c0, degree=self.degree
        )

    def fit(self, X, y, provenance=None):
        X, y = check_X_y(X, y, y_numeric=True)
        if self.lam < 0:
            raise ValueError("lam must be non-negative")
        spec = self._resolve_spec()
        k = gram_matrix(spec, X)
        a = k @ k + self.lam * k
        try:
            a_pinv = np.linalg.pinv(a, rcond=PINV_RCOND)
        except np.linalg.LinAlgError as exc:
            raise NumericalFailure(f"pseudoinverse failed: {exc}") from exc
        self.alpha_ = a_pinv @ (k @ y)
        self.X_train_ = X.copy()
        self.spec_ = spec
        self.lam_ = float(self.lam)
        self.provenance_ = dict(provenance or {})
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "alpha_")
        X = check_array(X)
        return kernel_matrix(self.spec_, X, self.X_train_) @ self.alpha_


def fit_model(X, y, spec: KernelSpec, lam: float, provenance=None) -> KernelRidge:
    """Train a model from an explicit KernelSpec and return the estimator."""
    return KernelRidge(kernel=spec, lam=lam).fit(X, y, provenance=provenance)


@dataclass(frozen=True)
class Metrics:
    """Evaluation metrics; r2 is None when the labels are constant, in which
    case the coefficient of determination is undefined but the error metrics
    are still meaningful."""

    r2: float | None
    rmse: float
    mae: float


def metrics_from_predictions(y_true, y_pred) -> Metrics:
    y_true = np.asarray(y_true, dtype=float)
    y_pred = np.asarray(y_pred, dtype=float)
    if y_true.shape != y_pred.shape or y_true.ndim != 1 or len(y_true) == 0:
        raise ValueError("predictions and labels must be equal-length vectors")
    residual = y_pred - y_true
    rmse = float(np.sqrt(np.mean(residual**2)))
    mae = float(np.mean(np.abs(residual)))
    sst = float(np.sum((y_true - y_true.mean()) ** 2))
    if sst == 0.0:
        return Metrics(r2=None, rmse=rmse, mae=mae)
    r2 = 1.0 - float(np.sum(residual**2)) / sst
    return Metrics(r2=r2, rmse=rmse, mae=mae)


def evaluate(model: KernelRidge, X_test, y_test) -> Metrics:
    """R^2 (baseline: the evaluated set's own mean), RMSE and MAE."""
    return metrics_from_predictions(y_test, model.predict(X_test))


@dataclass(frozen=True)
class HyperGrid:
    """Hyperparameter values trialled during cross-validation.

    The defaults are the full grid: lambda spans 0 and the 14 decades from
    1e-8 to 1e5; gamma and c0 span the 7 decades from 1e-3 to 1e3; degree
    runs 1..10.
    """

    lambdas: tuple = tuple([0.0] + [10.0**e for e in range(-8, 6)])
    gammas: tuple = tuple(10.0**e for e in range(-3, 4))
    c0s: tuple = tuple(10.0**e for e in range(-3, 4))
    degrees: tuple = tuple(range(1, 11))

    def param_product(self, kind: str):
        """(gamma, c0, degree) combinations relevant to `kind`, in grid order."""
        uses = kernel_uses(kind)
        gs = self.gammas if "gamma" in uses else (1.0,)
        cs = self.c0s if "c0" in uses else (0.0,)
        ds = self.degrees if "degree" in uses else (1,)
        return list(itertools.product(gs, cs, ds))

    def combos(self, kind: str) -> list[tuple[KernelSpec, float]]:
        """Full (spec, lambda) list in canonical enumeration order: lambda
        outermost, then gamma, c0, degree."""
        params = self.param_product(kind)
        return [
            (KernelSpec(kind, gamma=g, c0=c, degree=d), lam)
            for lam in self.lambdas
            for (g, c, d) in params
        ]


@dataclass(frozen=True)
class CVEntry:
    spec: KernelSpec
    lam: float
    mean_r2: float


@dataclass(frozen=True)
class CVResult:
    best_spec: KernelSpec
    best_lambda: float
    table: list[CVEntry]
    skipped_folds: int


def _fold_slices(m: int, folds: int) -> list[slice]:
    # near-equal contiguous folds; the remainder goes one-per-fold from the front
    base, rem = divmod(m, folds)
    sizes = [base + 1] * rem + [base] * (folds - rem)
    slices, start = [], 0
    for size in sizes:
        slices.append(slice(start, start + size))
        start += size
    return slices


def _base_matrices(kind, x_tr, x_val):
    """Kernel-independent pairwise quantities shared across the grid."""
    if kind == "rbf":
        return squared_distances(x_tr, x_tr), squared_distances(x_val, x_tr)
    if kind == "laplacian":
        return l1_distances(x_tr, x_tr), l1_distances(x_val, x_tr)
    if kind == "cosine":
        for block in (x_tr, x_val):
            if np.any(np.linalg.norm(block, axis=1) == 0):
                raise ValueError("the cosine kernel is undefined for zero vectors")
        tr = x_tr / np.linalg.norm(x_tr, axis=1, keepdims=True)
        val = x_val / np.linalg.norm(x_val, axis=1, keepdims=True)
        return tr @ tr.T, val @ tr.T
    return x_tr @ x_tr.T, x_val @ x_tr.T


def _kernel_from_base(kind, base, gamma, c0, degree):
    if kind in ("linear", "cosine"):
        return base
    if kind == "rbf" or kind == "laplacian":
        return np.exp(-gamma * base)
    if kind == "polynomial":
        return (gamma * base + c0) ** degree
    return np.tanh(gamma * base + c0)


def _fold_grid_scores(x, y, tr_idx, val_idx, kind, grid: HyperGrid) -> np.ndarray:
    """Validation R^2 for every grid combination on one fold.

    One symmetric eigendecomposition per (gamma, c0, degree) serves the whole
    lambda sweep: with K = Q diag(w) Q^T the solve reduces to scaling the
    label vector in the eigenbasis by w / (w^2 + lambda*w) with the same
    relative cutoff as the pseudoinverse solver.
    """
    x_tr, y_tr = x[tr_idx], y[tr_idx]
    x_val, y_val = x[val_idx], y[val_idx]
    base_tr, base_val = _base_matrices(kind, x_tr, x_val)
    params = grid.param_product(kind)
    n_lams = len(grid.lambdas)
    scores = np.empty(n_lams * len(params))
    sst = float(np.sum((y_val - y_val.mean()) ** 2))
    for p_i, (gamma, c0, degree) in enumerate(params):
        k_tr = _kernel_from_base(kind, base_tr, gamma, c0, degree)
        k_tr = 0.5 * (k_tr + k_tr.T)
        k_val = _kernel_from_base(kind, base_val, gamma, c0, degree)
        try:
            w, q = np.linalg.eigh(k_tr)
        except np.linalg.LinAlgError as exc:
            raise NumericalFailure(f"eigendecomposition failed: {exc}") from exc
        qty = (w * (q.T @ y_tr))  # eigenbasis image of K y
        k_val_q = k_val @ q
        for l_i, lam in enumerate(grid.lambdas):
            dvals = w * w + lam * w
            cutoff = PINV_RCOND * np.abs(dvals).max()
            coef = np.where(np.abs(dvals) > cutoff, qty / np.where(dvals == 0, 1.0, dvals), 0.0)
            preds = k_val_q @ coef
            sse = float(np.sum((preds - y_val) ** 2))
            scores[l_i * len(params) + p_i] = 1.0 - sse / sst
    return scores


def _fold_worker(args):
    x, y, tr_idx, val_idx, kind, grid = args
    return _fold_grid_scores(x, y, tr_idx, val_idx, kind, grid)


def cross_validate(
    X,
    y,
    kind: str,
    grid: HyperGrid | None = None,
    folds: int = 10,
    seed: int = 0,
    workers: int = 1,
) -> CVResult:
    """Grid-search hyperparameters by k-fold cross-validated mean R^2.

    Indices are shuffled once with `seed` and cut into near-equal contiguous
    folds.  Every grid combination is scored by its mean validation-fold R^2;
    the argmax is returned, with ties broken by grid enumeration order.
    Folds whose validation labels are constant are skipped and counted.
    """
    X, y = check_X_y(X, y, y_numeric=True)
    m = len(y)
    if m < folds:
        raise ValueError(f"need at least {folds} samples for {folds}-fold CV")
    grid = grid or HyperGrid()
    order = np.random.default_rng(seed).permutation(m)
    combos = grid.combos(kind)

    jobs = []
    skipped = 0
    for sl in _fold_slices(m, folds):
        val_idx = order[sl]
        if np.ptp(y[val_idx]) == 0.0:
            skipped += 1
            continue
        tr_idx = np.concatenate([order[: sl.start], order[sl.stop :]])
        jobs.append((X, y, tr_idx, val_idx, kind, grid))
    if not jobs:
        raise ValueError("every fold had constant validation labels")

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            per_fold = list(pool.map(_fold_worker, jobs))
    else:
        per_fold = [_fold_worker(job) for job in jobs]
    mean_scores = np.mean(per_fold, axis=0)

    best = int(np.argmax(mean_scores))
    table = [
        CVEntry(spec=spec, lam=lam, mean_r2=float(score))
        for (spec, lam), score in zip(combos, mean_scores)
    ]
    best_spec, best_lam = combos[best]
    return CVResult(
        best_spec=best_spec,
        best_lambda=best_lam,
        table=table,
        skipped_folds=skipped,
    )


@dataclass(frozen=True)
class LearningCurveRow:
    size: int
    mean_r2: float
    std_r2: float


def learning_curve(
    X_train,
    y_train,
    X_test,
    y_test,
    spec: KernelSpec,
    lam: float,
    sizes=None,
    repeats: int = 20,
    seed: int = 0,
) -> list[LearningCurveRow]:
    """Mean/std test R^2 over `repeats` models per training-subset size.

    Each model is trained on a random subset (drawn without replacement) of
    the training data and evaluated on the full test set.
    """
    X_train = np.asarray(X_train, dtype=float)
    y_train = np.asarray(y_train, dtype=float)
    sizes = tuple(sizes) if sizes is not None else tuple(range(50, 1001, 50))
    if not sizes:
        raise ValueError("sizes must be non-empty")
    if max(sizes) > len(y_train):
        raise ValueError("the largest size exceeds the training set")
    rows = []
    for size in sizes:
        scores = []
        for rep in range(repeats):
            rng = np.random.default_rng(
                np.random.SeedSequence(entropy=seed, spawn_key=(size, rep))
            )
            idx = rng.choice(len(y_train), size=size, replace=False)
            model = fit_model(X_train[idx], y_train[idx], spec, lam)
            result = evaluate(model, X_test, y_test)
            if result.r2 is None:
                raise ValueError("test labels are constant; R^2 is undefined")
            scores.append(result.r2)
        rows.append(
            LearningCurveRow(
                size=int(size),
                mean_r2=float(np.mean(scores)),
                std_r2=float(np.std(scores)),
            )
        )
    return rows


def model_to_dict(model: KernelRidge) -> dict:
    check_is_fitted(model, "alpha_")
    return {
        "kernel": model.spec_.to_dict(),
        "lambda": model.lam_,
        "alphas": [float(a) for a in model.alpha_],
        "train_inputs": [[float(v) for v in row] for row in model.X_train_],
        "provenance": model.provenance_,
    }


def model_from_dict(data: dict) -> KernelRidge:
    spec = KernelSpec.from_dict(data["kernel"])
    model = KernelRidge(kernel=spec, lam=data["lambda"])
    model.spec_ = spec
    model.lam_ = float(data["lambda"])
    model.alpha_ = np.asarray(data["alphas"], dtype=float)
    model.X_train_ = np.asarray(data["train_inputs"], dtype=float)
    if len(model.alpha_) != len(model.X_train_):
        raise ValueError("alphas and train_inputs disagree on length")
    model.provenance_ = dict(data.get("provenance", {}))
    model.n_features_in_ = model.X_train_.shape[1] if len(model.X_train_) else 0
    return model


def save_model(model: KernelRidge, path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model), indent=2, sort_keys=True))


def load_model(path) -> KernelRidge:
    return model_from_dict(json.loads(Path(path).read_text()))
