"""Kernel SVM classification with repeated, nested cross-validation.

Binary problems are solved by libsvm (through scikit-learn) on the
precomputed, possibly indefinite, Gram matrix. Multiclass prediction is
one-vs-one voting with ties going to the lowest class. Hyperparameters
(``C`` and any Gram-matrix key such as ``lambda``) are selected per outer
training fold by an inner stratified K-fold.
"""
from __future__ import annotations

import json
import time
import warnings
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from itertools import combinations
from typing import Hashable, Mapping, Sequence

import numpy as np
from sklearn.exceptions import ConvergenceWarning
from sklearn.model_selection import KFold, StratifiedKFold
from sklearn.svm import SVC

from .errors import SingleClass, TooFewPerClassWarning

__all__ = [
    "C_GRID",
    "LAMBDA_GRID",
    "SvmModel",
    "svm_train",
    "OneVsOneSVM",
    "CvReport",
    "make_folds",
    "cross_validate",
]

C_GRID = (0.001, 0.01, 0.1, 1.0, 10.0, 100.0, 1000.0)
LAMBDA_GRID = (0.0001, 0.001, 0.01, 0.1, 1.0, 10.0)
SVM_MAX_ITER = 1_000_000


@dataclass
class SvmModel:
    """Binary SVM in dual form: ``f(x) = sum_i alpha_i y_i k(x_i, x) + bias``."""

    alpha: np.ndarray
    y: np.ndarray
    bias: float

    def decision(self, K_test: np.ndarray) -> np.ndarray:
        """Decision values for rows of ``K_test`` (test x train kernel values)."""
        return np.asarray(K_test) @ (self.alpha * self.y) + self.bias

    def predict(self, K_test: np.ndarray) -> np.ndarray:
        return np.where(self.decision(K_test) >= 0, 1, -1)


def svm_train(K: np.ndarray, y: Sequence[int], C: float, tol: float = 1e-3,
              max_iter: int = SVM_MAX_ITER) -> SvmModel:
    """Train a binary soft-margin SVM on a precomputed kernel matrix.

    Parameters
    ----------
    K : (n, n) array
        Symmetric training Gram matrix.
    y : sequence of {+1, -1}
    C : float
        Box constraint, ``0 <= alpha_i <= C``.
    """
    y = np.asarray(y)
    if set(np.unique(y).tolist()) - {-1, 1}:
        raise ValueError("binary labels must be +1 / -1")
    if len(np.unique(y)) < 2:
        raise SingleClass("training data contains a single class")
    if not C > 0:
        raise ValueError("C must be > 0")
    svc = SVC(kernel="precomputed", C=C, tol=tol, max_iter=max_iter)
    svc.fit(np.asarray(K, dtype=np.float64), y)
    alpha = np.zeros(len(y))
    # dual_coef_ stores alpha_i * y_i, oriented so that f > 0 means +1
    alpha[svc.support_] = np.abs(svc.dual_coef_[0])
    return SvmModel(alpha, y.astype(np.float64), float(svc.intercept_[0]))


class OneVsOneSVM:
    """Multiclass SVM by pairwise voting over a precomputed kernel."""

    def __init__(self, C: float = 1.0):
        self.C = C

    def fit(self, K: np.ndarray, labels: Sequence[int]) -> "OneVsOneSVM":
        labels = np.asarray(labels)
        self.classes_ = np.unique(labels)
        self.models_ = []
        for a, b in combinations(range(len(self.classes_)), 2):
            idx = np.flatnonzero((labels == self.classes_[a]) | (labels == self.classes_[b]))
            y = np.where(labels[idx] == self.classes_[a], 1, -1)
            model = svm_train(K[np.ix_(idx, idx)], y, self.C)
            self.models_.append((a, b, idx, model))
        return self

    def predict(self, K_test: np.ndarray) -> np.ndarray:
        K_test = np.atleast_2d(K_test)
        votes = np.zeros((K_test.shape[0], len(self.classes_)), dtype=np.int64)
        for a, b, idx, model in self.models_:
            f = model.decision(K_test[:, idx])
            votes[:, a] += f >= 0
            votes[:, b] += f < 0
        # argmax returns the first maximum: ties go to the lowest class
        return self.classes_[np.argmax(votes, axis=1)]


@dataclass
class CvReport:
    mean_accuracy: float
    std_accuracy: float
    per_fold: list[float]
    best_params: tuple
    timing: dict[str, float] = field(default_factory=dict)
    train_accuracy: list[float] = field(default_factory=list)
    selected: list[tuple] = field(default_factory=list)
    dataset: str = ""
    variant: str = ""

    def to_dict(self, timing: bool = True) -> dict:
        d = asdict(self)
        if not timing:
            del d["timing"]
        return d

    def to_json(self, timing: bool = True) -> str:
        """JSON text; ``timing=False`` drops wall-clock fields for byte comparisons."""
        return json.dumps(self.to_dict(timing), sort_keys=True, default=_jsonable)

    def summary(self) -> str:
        C, key = self.best_params
        secs = sum(self.timing.values())
        return (
            f"{self.dataset}, {self.variant}, {100 * self.mean_accuracy:.2f}±{100 * self.std_accuracy:.2f}, "
            f"best(C={C:g}, {_fmt_key(key)}), {secs:.2f}s"
        )


def _jsonable(x):
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"not JSON serializable: {type(x)}")


def _fmt_key(key) -> str:
    if isinstance(key, tuple):
        return ", ".join(f"{v:g}" if isinstance(v, float) else str(v) for v in key)
    return f"lambda={key:g}" if isinstance(key, float) else str(key)


def make_folds(labels: Sequence[int], folds: int, seed: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Seeded stratified K-fold splits; plain shuffled K-fold if a class is too small."""
    labels = np.asarray(labels)
    counts = Counter(labels.tolist())
    if min(counts.values()) < folds:
        warnings.warn(
            f"smallest class has {min(counts.values())} members for {folds} folds; "
            "using non-stratified folds",
            TooFewPerClassWarning,
            stacklevel=2,
        )
        splitter = KFold(folds, shuffle=True, random_state=seed)
    else:
        splitter = StratifiedKFold(folds, shuffle=True, random_state=seed)
    return list(splitter.split(np.zeros(len(labels)), labels))


def _fit_predict(K: np.ndarray, labels: np.ndarray, train: np.ndarray, test: np.ndarray, C: float):
    classes = np.unique(labels[train])
    if len(classes) == 1:
        return np.full(len(test), classes[0]), np.full(len(train), classes[0])
    clf = OneVsOneSVM(C).fit(K[np.ix_(train, train)], labels[train])
    return clf.predict(K[np.ix_(test, train)]), clf.predict(K[np.ix_(train, train)])


def _select(grams: list[np.ndarray], labels: np.ndarray, train: np.ndarray, C_grid, inner_folds: int,
            seed: int) -> tuple[int, float]:
    """Index of the best Gram matrix and C by inner cross-validation on ``train``."""
    y = labels[train]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TooFewPerClassWarning)
        inner = make_folds(y, inner_folds, seed)
    best, best_acc = (0, C_grid[0]), -1.0
    seen: dict[bytes, dict[float, float]] = {}
    for g, K in enumerate(grams):
        Kt = K[np.ix_(train, train)]
        fp = Kt.tobytes()
        cached = seen.setdefault(fp, {})
        for C in C_grid:
            if C not in cached:
                correct = 0
                for tr, te in inner:
                    pred, _ = _fit_predict(Kt, y, tr, te, C)
                    correct += int(np.sum(pred == y[te]))
                cached[C] = correct / len(y)
            if cached[C] > best_acc:
                best_acc, best = cached[C], (g, C)
    return best


def _run_fold(args):
    grams, labels, train, test, C_grid, inner_folds, seed = args
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConvergenceWarning)
        if len(grams) == 1 and len(C_grid) == 1:
            g, C = 0, C_grid[0]
        else:
            g, C = _select(grams, labels, train, C_grid, inner_folds, seed)
        pred, pred_train = _fit_predict(grams[g], labels, train, test, C)
    acc = float(np.mean(pred == labels[test]))
    train_acc = float(np.mean(pred_train == labels[train]))
    return acc, train_acc, g, C


def cross_validate(
    grams: Mapping[Hashable, np.ndarray],
    labels: Sequence[int],
    C_grid: Sequence[float] = C_GRID,
    folds: int = 10,
    repeats: int = 10,
    seed: int = 0,
    inner_folds: int = 5,
    workers: int = 1,
) -> CvReport:
    """Repeated K-fold accuracy of a one-vs-one SVM with nested model selection.

    ``grams`` maps a hyperparameter key (``lambda``, or a tuple such as
    ``(rho, s, lambda)``) to a Gram matrix over the same graph ordering;
    ``GramMatrix`` objects are accepted too. Repeat ``r`` splits with random
    state ``seed + r``. Results do not depend on ``workers``.
    """
    t0 = time.perf_counter()
    keys = list(grams)
    mats = [np.asarray(getattr(grams[k], "values", grams[k]), dtype=np.float64) for k in keys]
    labels = np.asarray(labels)
    n = len(labels)
    for K in mats:
        if K.shape != (n, n):
            raise ValueError(f"Gram matrix of shape {K.shape} for {n} labels")
    C_grid = tuple(float(c) for c in C_grid)

    tasks = []
    for r in range(repeats):
        for train, test in make_folds(labels, folds, seed + r):
            tasks.append((mats, labels, train, test, C_grid, inner_folds, seed + r))
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            results = list(ex.map(_run_fold, tasks))
    else:
        results = [_run_fold(t) for t in tasks]

    per_fold = [r[0] for r in results]
    selected = [(r[3], keys[r[2]]) for r in results]
    best = Counter(selected).most_common(1)[0][0]
    return CvReport(
        mean_accuracy=float(np.mean(per_fold)),
        std_accuracy=float(np.std(per_fold)),
        per_fold=per_fold,
        best_params=best,
        timing={"cross_validation": time.perf_counter() - t0},
        train_accuracy=[r[1] for r in results],
        selected=selected,
    )
