"""Classifiers over binary n-gram feature vectors, built from scratch.

Five algorithm families cover the comparison grid: ExtraTrees and
RandomForest ensembles (100 trees, gini impurity, sqrt-F feature
subsampling per node), Bernoulli naive Bayes with add-one smoothing, a
linear SVM trained by Pegasos-style stochastic subgradient descent, and
k-nearest-neighbours under Jaccard distance on feature index sets.

Every random choice (bootstrap draws, feature subsets, SGD order) is
made after the training rows have been put into a canonical order keyed
to a content hash of each row, so permuting the input row order cannot
change a fitted model or its predictions.

On 0/1 features the ExtraTrees "uniformly random threshold between
observed feature values" degenerates to the midpoint 0.5, which makes
the two forests differ only in bootstrapping.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .errors import ConfigError, TrainingError
from .ngrams import FeatureVector, NGramVocabulary, format_vocabulary


class Label(Enum):
    ON_HOLD = "OnHold"
    CROSS_REFERENCE = "CrossReference"

    @classmethod
    def parse(cls, text: str) -> "Label":
        cleaned = text.strip().lower().replace("-", "").replace("_", "")
        if cleaned in ("onhold", "on hold", "1", "positive"):
            return cls.ON_HOLD
        if cleaned in ("crossreference", "cross reference", "0", "negative"):
            return cls.CROSS_REFERENCE
        raise ValueError(f"unknown label {text!r}")


ALGORITHMS = ("ExtraTrees", "RandomForest", "NaiveBayes", "LinearSVM", "KNN")

DEFAULT_HYPERPARAMETERS: dict[str, dict[str, Any]] = {
    "ExtraTrees": {"n_trees": 100, "max_depth": None},
    "RandomForest": {"n_trees": 100, "max_depth": None},
    "NaiveBayes": {"alpha": 1.0},
    "LinearSVM": {"lam": 1e-2, "epochs": 30},
    "KNN": {"k": 5},
}

# Candidate grid for select_model: one entry per algorithm/setting the
# comparison tables report, searched by inner cross-validation.
DEFAULT_GRID: tuple[tuple[str, dict[str, Any]], ...] = (
    ("ExtraTrees", {"n_trees": 100, "max_depth": None}),
    ("ExtraTrees", {"n_trees": 100, "max_depth": 10}),
    ("RandomForest", {"n_trees": 100, "max_depth": None}),
    ("RandomForest", {"n_trees": 100, "max_depth": 10}),
    ("NaiveBayes", {"alpha": 1.0}),
    ("LinearSVM", {"lam": 1e-2, "epochs": 30}),
    ("LinearSVM", {"lam": 1e-4, "epochs": 30}),
    ("KNN", {"k": 1}),
    ("KNN", {"k": 5}),
)


@dataclass(frozen=True)
class Dataset:
    """Feature vectors with labels in a fixed feature space."""

    rows: tuple[tuple[FeatureVector, Label], ...]
    n_features: int
    provenance: str = ""

    def __post_init__(self) -> None:
        for vector, _ in self.rows:
            if vector.indices and vector.indices[-1] >= self.n_features:
                raise ValueError(
                    f"feature index {vector.indices[-1]} outside 0..{self.n_features - 1}"
                )

    def __len__(self) -> int:
        return len(self.rows)

    def class_counts(self) -> dict[Label, int]:
        counts = {Label.ON_HOLD: 0, Label.CROSS_REFERENCE: 0}
        for _, label in self.rows:
            counts[label] += 1
        return counts

    def to_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Dense 0/1 matrix and label vector (1 = OnHold), in row order."""
        x = np.zeros((len(self.rows), self.n_features), dtype=np.uint8)
        y = np.zeros(len(self.rows), dtype=np.uint8)
        for i, (vector, label) in enumerate(self.rows):
            if vector.indices:
                x[i, list(vector.indices)] = 1
            y[i] = 1 if label is Label.ON_HOLD else 0
        return x, y


def make_dataset(
    vectors: Sequence[FeatureVector],
    labels: Sequence[Label],
    n_features: int,
    provenance: str = "",
) -> Dataset:
    if len(vectors) != len(labels):
        raise ValueError("vectors and labels differ in length")
    return Dataset(tuple(zip(vectors, labels)), n_features, provenance)


def _row_digest(vector: FeatureVector, label: Label) -> bytes:
    h = hashlib.blake2b(digest_size=16)
    h.update(",".join(map(str, vector.indices)).encode("ascii"))
    h.update(b"|1" if label is Label.ON_HOLD else b"|0")
    return h.digest()


def _canonical_order(rows: Sequence[tuple[FeatureVector, Label]]) -> list[int]:
    return sorted(range(len(rows)), key=lambda i: _row_digest(*rows[i]))


def vocabulary_digest(vocab: NGramVocabulary) -> str:
    return hashlib.blake2b(
        format_vocabulary(vocab).encode("utf-8"), digest_size=16
    ).hexdigest()


# --------------------------------------------------------------------------
# decision trees

_LEAF = -1


@dataclass
class _Tree:
    feature: list[int]
    left: list[int]
    right: list[int]
    value: list[float]

    def votes(self, x: np.ndarray) -> np.ndarray:
        out = np.empty(x.shape[0], dtype=np.uint8)
        stack = [(0, np.arange(x.shape[0]))]
        while stack:
            node, idx = stack.pop()
            if idx.size == 0:
                continue
            f = self.feature[node]
            if f == _LEAF:
                # Leaf ties (value exactly 0.5) vote positive.
                out[idx] = 1 if self.value[node] >= 0.5 else 0
            else:
                on = x[idx, f] == 1
                stack.append((self.right[node], idx[on]))
                stack.append((self.left[node], idx[~on]))
        return out


def _best_split(x: np.ndarray, y: np.ndarray, rows: np.ndarray, feats: np.ndarray) -> int | None:
    """Feature among feats with the lowest weighted child gini, or None."""
    sub = x[np.ix_(rows, feats)]
    n = rows.size
    ones = sub.sum(axis=0, dtype=np.int64)
    valid = (ones > 0) & (ones < n)
    if not valid.any():
        return None
    pos_rows = y[rows] == 1
    ones_pos = sub[pos_rows].sum(axis=0, dtype=np.int64)
    npos = int(pos_rows.sum())

    n1 = ones
    n0 = n - ones
    p1 = ones_pos
    p0 = npos - ones_pos
    safe1 = np.maximum(n1, 1)
    safe0 = np.maximum(n0, 1)
    gini1 = 1.0 - (p1 / safe1) ** 2 - ((n1 - p1) / safe1) ** 2
    gini0 = 1.0 - (p0 / safe0) ** 2 - ((n0 - p0) / safe0) ** 2
    score = (n0 * gini0 + n1 * gini1) / n
    score[~valid] = np.inf
    return int(feats[int(np.argmin(score))])


def _grow_tree(
    x: np.ndarray,
    y: np.ndarray,
    root_rows: np.ndarray,
    rng: np.random.Generator,
    max_depth: int | None,
) -> _Tree:
    n_features = x.shape[1]
    n_sample = max(1, math.isqrt(n_features))
    tree = _Tree([], [], [], [])

    def new_node(frac: float) -> int:
        tree.feature.append(_LEAF)
        tree.left.append(_LEAF)
        tree.right.append(_LEAF)
        tree.value.append(frac)
        return len(tree.feature) - 1

    # (rows, depth, parent, is_right); parent -1 marks the root.
    stack: list[tuple[np.ndarray, int, int, bool]] = [(root_rows, 0, -1, False)]
    while stack:
        rows, depth, parent, is_right = stack.pop()
        npos = int(y[rows].sum())
        node = new_node(npos / rows.size)
        if parent >= 0:
            if is_right:
                tree.right[parent] = node
            else:
                tree.left[parent] = node
        if npos == 0 or npos == rows.size or (max_depth is not None and depth >= max_depth):
            continue
        feats = np.sort(rng.choice(n_features, size=n_sample, replace=False))
        split = _best_split(x, y, rows, feats)
        if split is None and n_sample < n_features:
            # Sampled features were all constant here; fall back to a
            # full scan so a pure-yet-splittable node is not wasted.
            split = _best_split(x, y, rows, np.arange(n_features))
        if split is None:
            continue
        tree.feature[node] = split
        on = x[rows, split] == 1
        stack.append((rows[on], depth + 1, node, True))
        stack.append((rows[~on], depth + 1, node, False))
    return tree


@dataclass
class _FittedForest:
    trees: list[_Tree]

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        votes = np.zeros(x.shape[0], dtype=np.float64)
        for tree in self.trees:
            votes += tree.votes(x)
        return votes / len(self.trees)

    def state(self) -> dict[str, Any]:
        return {
            "trees": [
                {"feature": t.feature, "left": t.left, "right": t.right, "value": t.value}
                for t in self.trees
            ]
        }

    @classmethod
    def from_state(cls, state: dict[str, Any]) -> "_FittedForest":
        return cls(
            [
                _Tree(t["feature"], t["left"], t["right"], [float(v) for v in t["value"]])
                for t in state["trees"]
            ]
        )


def _fit_forest(
    x: np.ndarray, y: np.ndarray, hp: dict[str, Any], seed: int, bootstrap: bool
) -> _FittedForest:
    n_rows = x.shape[0]
    streams = np.random.SeedSequence(seed).spawn(hp["n_trees"])
    trees = []
    for stream in streams:
        rng = np.random.default_rng(stream)
        if bootstrap:
            rows = rng.integers(0, n_rows, size=n_rows)
        else:
            rows = np.arange(n_rows)
        trees.append(_grow_tree(x, y, rows, rng, hp["max_depth"]))
    return _FittedForest(trees)


# --------------------------------------------------------------------------
# Bernoulli naive Bayes

@dataclass
class _FittedNaiveBayes:
    log_prior: np.ndarray  # shape (2,), order [negative, positive]
    log_p1: np.ndarray     # shape (2, F)
    log_p0: np.ndarray

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        xf = x.astype(np.float64)
        joint = np.stack(
            [
                self.log_prior[c] + xf @ self.log_p1[c] + (1.0 - xf) @ self.log_p0[c]
                for c in (0, 1)
            ],
            axis=1,
        )
        peak = joint.max(axis=1, keepdims=True)
        expd = np.exp(joint - peak)
        return expd[:, 1] / expd.sum(axis=1)

    def state(self) -> dict[str, Any]:
        return {
            "log_prior": self.log_prior.tolist(),
            "log_p1": self.log_p1.tolist(),
            "log_p0": self.log_p0.tolist(),
        }

    @classmethod
    def from_state(cls, state: dict[str, Any]) -> "_FittedNaiveBayes":
        return cls(
            np.array(state["log_prior"]),
            np.array(state["log_p1"]),
            np.array(state["log_p0"]),
        )


def _fit_naive_bayes(x: np.ndarray, y: np.ndarray, hp: dict[str, Any]) -> _FittedNaiveBayes:
    alpha = float(hp["alpha"])
    n_features = x.shape[1]
    log_prior = np.zeros(2)
    log_p1 = np.zeros((2, n_features))
    log_p0 = np.zeros((2, n_features))
    for c in (0, 1):
        members = x[y == c]
        theta = (members.sum(axis=0) + alpha) / (len(members) + 2.0 * alpha)
        log_prior[c] = math.log(len(members) / len(x))
        log_p1[c] = np.log(theta)
        log_p0[c] = np.log(1.0 - theta)
    return _FittedNaiveBayes(log_prior, log_p1, log_p0)


# --------------------------------------------------------------------------
# linear SVM (Pegasos)

@dataclass
class _FittedLinearSVM:
    weights: np.ndarray  # length F + 1; last entry is the bias weight

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        margin = x.astype(np.float64) @ self.weights[:-1] + self.weights[-1]
        return 1.0 / (1.0 + np.exp(-np.clip(margin, -500.0, 500.0)))

    def state(self) -> dict[str, Any]:
        return {"weights": self.weights.tolist()}

    @classmethod
    def from_state(cls, state: dict[str, Any]) -> "_FittedLinearSVM":
        return cls(np.array(state["weights"]))


def _fit_linear_svm(
    x: np.ndarray, y: np.ndarray, hp: dict[str, Any], seed: int
) -> _FittedLinearSVM:
    lam = float(hp["lam"])
    epochs = int(hp["epochs"])
    n_rows = x.shape[0]
    xa = np.hstack([x.astype(np.float64), np.ones((n_rows, 1))])
    yv = np.where(y == 1, 1.0, -1.0)
    w = np.zeros(xa.shape[1])
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    t = 0
    for _ in range(epochs):
        for i in rng.permutation(n_rows):
            t += 1
            eta = 1.0 / (lam * t)
            margin = yv[i] * (w @ xa[i])
            w *= 1.0 - eta * lam
            if margin < 1.0:
                w += eta * yv[i] * xa[i]
    return _FittedLinearSVM(w)


# --------------------------------------------------------------------------
# k nearest neighbours

@dataclass
class _FittedKNN:
    x: np.ndarray
    y: np.ndarray
    k: int

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        inter = x.astype(np.int64) @ self.x.astype(np.int64).T
        sizes_q = x.sum(axis=1, dtype=np.int64)[:, None]
        sizes_t = self.x.sum(axis=1, dtype=np.int64)[None, :]
        union = sizes_q + sizes_t - inter
        similarity = np.where(union > 0, inter / np.maximum(union, 1), 1.0)
        distance = 1.0 - similarity
        k = min(self.k, self.x.shape[0])
        # Stable sort breaks distance ties by canonical training order.
        neighbours = np.argsort(distance, axis=1, kind="stable")[:, :k]
        return self.y[neighbours].mean(axis=1)

    def state(self) -> dict[str, Any]:
        return {
            "rows": [np.flatnonzero(row).tolist() for row in self.x],
            "labels": self.y.tolist(),
            "k": self.k,
            "n_features": int(self.x.shape[1]),
        }

    @classmethod
    def from_state(cls, state: dict[str, Any]) -> "_FittedKNN":
        x = np.zeros((len(state["rows"]), state["n_features"]), dtype=np.uint8)
        for i, indices in enumerate(state["rows"]):
            if indices:
                x[i, indices] = 1
        return cls(x, np.array(state["labels"], dtype=np.uint8), int(state["k"]))


# --------------------------------------------------------------------------
# public API

@dataclass(eq=False)
class TrainedModel:
    algorithm: str
    hyperparameters: dict[str, Any]
    n_features: int
    decision_threshold: float
    seed: int
    vocabulary_hash: str | None
    _impl: Any = field(repr=False)


def _validate_hyperparameters(algorithm: str, hp: dict[str, Any]) -> None:
    try:
        if algorithm in ("ExtraTrees", "RandomForest"):
            if int(hp["n_trees"]) < 1:
                raise ConfigError("n_trees must be >= 1")
            if hp["max_depth"] is not None and int(hp["max_depth"]) < 1:
                raise ConfigError("max_depth must be None or >= 1")
        elif algorithm == "NaiveBayes":
            if float(hp["alpha"]) <= 0:
                raise ConfigError("alpha must be > 0")
        elif algorithm == "LinearSVM":
            if float(hp["lam"]) <= 0 or int(hp["epochs"]) < 1:
                raise ConfigError("lam must be > 0 and epochs >= 1")
        elif algorithm == "KNN":
            if int(hp["k"]) < 1:
                raise ConfigError("k must be >= 1")
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad hyperparameters for {algorithm}: {exc}") from exc


def train(
    dataset: Dataset,
    algorithm: str,
    hyperparameters: dict[str, Any] | None = None,
    seed: int = 0,
    vocabulary: NGramVocabulary | str | None = None,
) -> TrainedModel:
    """Fit one classifier on the dataset.

    Raises TrainingError when a class is absent and ConfigError for an
    unknown algorithm or out-of-range hyperparameters.
    """
    if algorithm not in ALGORITHMS:
        raise ConfigError(f"unknown algorithm {algorithm!r}; choose from {ALGORITHMS}")
    counts = dataset.class_counts()
    if min(counts.values()) == 0:
        raise TrainingError(
            "training needs both classes; got "
            f"{counts[Label.ON_HOLD]} OnHold / {counts[Label.CROSS_REFERENCE]} CrossReference"
        )
    hp = dict(DEFAULT_HYPERPARAMETERS[algorithm])
    hp.update(hyperparameters or {})
    _validate_hyperparameters(algorithm, hp)

    order = _canonical_order(dataset.rows)
    x_raw, y_raw = dataset.to_arrays()
    x, y = x_raw[order], y_raw[order]

    if algorithm == "ExtraTrees":
        impl: Any = _fit_forest(x, y, hp, seed, bootstrap=False)
    elif algorithm == "RandomForest":
        impl = _fit_forest(x, y, hp, seed, bootstrap=True)
    elif algorithm == "NaiveBayes":
        impl = _fit_naive_bayes(x, y, hp)
    elif algorithm == "LinearSVM":
        impl = _fit_linear_svm(x, y, hp, seed)
    else:
        impl = _FittedKNN(x, y, int(hp["k"]))

    if isinstance(vocabulary, NGramVocabulary):
        vocab_hash: str | None = vocabulary_digest(vocabulary)
    else:
        vocab_hash = vocabulary
    return TrainedModel(
        algorithm=algorithm,
        hyperparameters=hp,
        n_features=dataset.n_features,
        decision_threshold=0.5,
        seed=seed,
        vocabulary_hash=vocab_hash,
        _impl=impl,
    )


def _to_dense(model: TrainedModel, vectors: Sequence[FeatureVector]) -> np.ndarray:
    x = np.zeros((len(vectors), model.n_features), dtype=np.uint8)
    for i, vector in enumerate(vectors):
        if vector.indices:
            if vector.indices[-1] >= model.n_features:
                raise ValueError(
                    f"feature index {vector.indices[-1]} outside the model's "
                    f"{model.n_features}-feature space"
                )
            x[i, list(vector.indices)] = 1
    return x


def predict_proba_batch(model: TrainedModel, vectors: Sequence[FeatureVector]) -> np.ndarray:
    if not vectors:
        return np.zeros(0)
    return model._impl.predict_proba(_to_dense(model, vectors))


def predict_proba(model: TrainedModel, vector: FeatureVector) -> float:
    """Score in [0, 1]; for ensembles, the fraction of trees voting OnHold."""
    return float(predict_proba_batch(model, [vector])[0])


def classify(model: TrainedModel, vector: FeatureVector) -> Label:
    """OnHold iff the score reaches the threshold; ties classify positive."""
    score = predict_proba(model, vector)
    return Label.ON_HOLD if score >= model.decision_threshold else Label.CROSS_REFERENCE


def smote_oversample(dataset: Dataset, k: int = 5, seed: int = 0) -> Dataset:
    """Synthesize minority rows until the classes balance exactly.

    Each synthetic row lies on the segment between a minority row and
    one of its k nearest minority neighbours (Euclidean on the dense
    0/1 coordinates), re-binarized at 0.5.
    """
    counts = dataset.class_counts()
    minority = min(counts, key=lambda label: (counts[label], label.value))
    majority = Label.CROSS_REFERENCE if minority is Label.ON_HOLD else Label.ON_HOLD
    if counts[minority] < 2:
        raise TrainingError(
            f"SMOTE needs at least 2 minority rows, got {counts[minority]}"
        )
    need = counts[majority] - counts[minority]
    if need == 0:
        return dataset

    minority_rows = [row for row in dataset.rows if row[1] is minority]
    order = _canonical_order(minority_rows)
    dense = np.zeros((len(minority_rows), dataset.n_features), dtype=np.float64)
    for i, position in enumerate(order):
        vector = minority_rows[position][0]
        if vector.indices:
            dense[i, list(vector.indices)] = 1.0

    m = len(minority_rows)
    diff = dense[:, None, :] != dense[None, :, :]
    hamming = diff.sum(axis=2)
    np.fill_diagonal(hamming, np.iinfo(np.int64).max)
    k_eff = min(k, m - 1)
    neighbour_table = np.argsort(hamming, axis=1, kind="stable")[:, :k_eff]

    rng = np.random.default_rng(np.random.SeedSequence(seed))
    synthetic: list[tuple[FeatureVector, Label]] = []
    for _ in range(need):
        parent = int(rng.integers(m))
        neighbour = int(neighbour_table[parent][int(rng.integers(k_eff))])
        gap = rng.random()
        point = dense[parent] + gap * (dense[neighbour] - dense[parent])
        indices = tuple(int(i) for i in np.flatnonzero(point >= 0.5))
        synthetic.append((FeatureVector(indices), minority))

    provenance = f"{dataset.provenance}+smote" if dataset.provenance else "smote"
    return Dataset(dataset.rows + tuple(synthetic), dataset.n_features, provenance)


def select_model(
    train_fold: Dataset,
    candidate_grid: Sequence[tuple[str, dict[str, Any]]] | None = None,
    inner_k: int = 3,
    seed: int = 0,
    vocabulary: NGramVocabulary | str | None = None,
) -> TrainedModel:
    """Pick the grid candidate with the best inner-CV mean F1.

    Inner cross-validation runs on the training fold only.  Ties go to
    the higher mean AUC, then to the earlier grid position.  The winner
    is refitted on the whole training fold.  Inner test folds that end
    up single-class contribute a neutral AUC of 0.5.
    """
    from . import evalstats  # runtime import; evalstats imports this module

    grid = tuple(candidate_grid) if candidate_grid is not None else DEFAULT_GRID
    if not grid:
        raise ConfigError("empty candidate grid")

    indices = list(range(len(train_fold.rows)))
    folds = evalstats.kfold_split(indices, k=min(inner_k, len(indices)), seed=seed)
    splits = []
    for fold in folds:
        held = set(fold)
        train_rows = tuple(train_fold.rows[i] for i in indices if i not in held)
        test_rows = tuple(train_fold.rows[i] for i in fold)
        if not test_rows:
            continue
        inner = Dataset(train_rows, train_fold.n_features, "inner-train")
        inner_counts = inner.class_counts()
        if min(inner_counts.values()) == 0:
            continue
        splits.append((inner, test_rows))

    best: tuple[float, float] | None = None
    best_candidate = grid[0]
    if splits:
        for candidate in grid:
            algorithm, hp = candidate
            f1_scores, auc_scores = [], []
            for inner, test_rows in splits:
                model = train(inner, algorithm, hp, seed=seed)
                vectors = [vector for vector, _ in test_rows]
                truth = [label for _, label in test_rows]
                scores = predict_proba_batch(model, vectors)
                predicted = [
                    Label.ON_HOLD if s >= model.decision_threshold else Label.CROSS_REFERENCE
                    for s in scores
                ]
                _, _, f1 = evalstats.compute_metrics(predicted, truth)
                f1_scores.append(f1)
                if len(set(truth)) == 2:
                    auc_scores.append(evalstats.compute_auc(list(scores), truth))
                else:
                    auc_scores.append(0.5)
            key = (sum(f1_scores) / len(f1_scores), sum(auc_scores) / len(auc_scores))
            if best is None or key > best:
                best = key
                best_candidate = candidate
    return train(train_fold, best_candidate[0], best_candidate[1], seed=seed,
                 vocabulary=vocabulary)


# --------------------------------------------------------------------------
# model persistence

_MODEL_FORMAT = "onhold-model"


def save_model(model: TrainedModel, path: str | Path) -> None:
    payload = {
        "format": _MODEL_FORMAT,
        "version": 1,
        "algorithm": model.algorithm,
        "hyperparameters": model.hyperparameters,
        "n_features": model.n_features,
        "decision_threshold": model.decision_threshold,
        "seed": model.seed,
        "vocabulary_hash": model.vocabulary_hash,
        "state": model._impl.state(),
    }
    Path(path).write_text(json.dumps(payload, sort_keys=True), encoding="utf-8")


def load_model(path: str | Path) -> TrainedModel:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    if payload.get("format") != _MODEL_FORMAT:
        raise ConfigError(f"{path}: not a model file")
    algorithm = payload["algorithm"]
    if algorithm in ("ExtraTrees", "RandomForest"):
        impl: Any = _FittedForest.from_state(payload["state"])
    elif algorithm == "NaiveBayes":
        impl = _FittedNaiveBayes.from_state(payload["state"])
    elif algorithm == "LinearSVM":
        impl = _FittedLinearSVM.from_state(payload["state"])
    elif algorithm == "KNN":
        impl = _FittedKNN.from_state(payload["state"])
    else:
        raise ConfigError(f"{path}: unknown algorithm {algorithm!r}")
    return TrainedModel(
        algorithm=algorithm,
        hyperparameters=payload["hyperparameters"],
        n_features=int(payload["n_features"]),
        decision_threshold=float(payload["decision_threshold"]),
        seed=int(payload["seed"]),
        vocabulary_hash=payload.get("vocabulary_hash"),
        _impl=impl,
    )
