"""Evaluation protocol: k-fold CV, metrics, and nonparametric statistics.

The statistics are implemented from first principles because the exact
behaviours matter for reproducibility: the Mann-Whitney p-value is
computed by exact enumeration (a dynamic program over tie blocks) for
small samples, exactly where 10-fold-per-variant comparisons live, and
AUC is the rank-based estimator tied to the same U statistic.
"""

from __future__ import annotations

import math
import statistics
import warnings
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Any, Iterable, Mapping, Sequence, TypeVar

import numpy as np

from . import learn
from .learn import Dataset, Label
from . import ngrams
from .errors import DataFormatError

T = TypeVar("T")

PERCENTILES = (0, 10, 25, 50, 75, 90, 100)


class DegenerateMetricWarning(UserWarning):
    """A metric denominator was zero and the value was reported as 0."""


@dataclass(frozen=True)
class StatsConfig:
    alpha: float = 0.05
    k: int = 10
    delta_thresholds: tuple[float, float, float] = (0.10, 0.33, 0.474)


@dataclass(frozen=True)
class FoldScores:
    variant: str
    precision: tuple[float, ...]
    recall: tuple[float, ...]
    f1: tuple[float, ...]
    auc: tuple[float, ...]

    def __post_init__(self) -> None:
        lengths = {len(self.precision), len(self.recall), len(self.f1), len(self.auc)}
        if len(lengths) != 1:
            raise ValueError("per-fold metric lists differ in length")
        for series in (self.precision, self.recall, self.f1, self.auc):
            if any(not 0.0 <= v <= 1.0 for v in series):
                raise ValueError("metric outside [0, 1]")

    @property
    def k(self) -> int:
        return len(self.precision)

    def series(self, metric: str) -> tuple[float, ...]:
        try:
            return getattr(self, metric)
        except AttributeError:
            raise ValueError(f"unknown metric {metric!r}") from None

    def mean(self, metric: str) -> float:
        values = self.series(metric)
        return sum(values) / len(values)


@dataclass(frozen=True)
class ComparisonResult:
    pair: str
    metric: str
    p_value: float
    adjusted_p: float
    cliffs_delta: float
    magnitude: str

    def __post_init__(self) -> None:
        if self.adjusted_p + 1e-12 < self.p_value:
            raise ValueError("adjusted p below raw p")
        if not -1.0 <= self.cliffs_delta <= 1.0:
            raise ValueError("cliffs delta outside [-1, 1]")


def kfold_split(rows: Sequence[T], k: int = 10, seed: int = 0) -> list[list[T]]:
    """Shuffle with the seed and partition into k folds differing by <= 1."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > len(rows):
        raise ValueError(f"k={k} exceeds dataset size {len(rows)}")
    order = np.random.default_rng(np.random.SeedSequence(seed)).permutation(len(rows))
    base, extra = divmod(len(rows), k)
    folds: list[list[T]] = []
    start = 0
    for i in range(k):
        size = base + (1 if i < extra else 0)
        folds.append([rows[j] for j in order[start:start + size]])
        start += size
    return folds


def compute_metrics(
    predicted: Sequence[Label], truth: Sequence[Label]
) -> tuple[float, float, float]:
    """(precision, recall, f1) with OnHold as the positive class."""
    if len(predicted) != len(truth):
        raise DataFormatError(
            f"predicted {len(predicted)} labels for {len(truth)} rows"
        )
    tp = sum(1 for p, t in zip(predicted, truth)
             if p is Label.ON_HOLD and t is Label.ON_HOLD)
    fp = sum(1 for p, t in zip(predicted, truth)
             if p is Label.ON_HOLD and t is not Label.ON_HOLD)
    fn = sum(1 for p, t in zip(predicted, truth)
             if p is not Label.ON_HOLD and t is Label.ON_HOLD)
    if tp + fp == 0:
        warnings.warn("no positive predictions; precision reported as 0",
                      DegenerateMetricWarning, stacklevel=2)
        precision = 0.0
    else:
        precision = tp / (tp + fp)
    if tp + fn == 0:
        warnings.warn("no positive rows; recall reported as 0",
                      DegenerateMetricWarning, stacklevel=2)
        recall = 0.0
    else:
        recall = tp / (tp + fn)
    f1 = 0.0 if precision * recall == 0 else 2 * precision * recall / (precision + recall)
    return precision, recall, f1


def _midranks(values: Sequence[float]) -> list[float]:
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        rank = (i + j) / 2 + 1
        for pos in range(i, j + 1):
            ranks[order[pos]] = rank
        i = j + 1
    return ranks


def compute_auc(scores: Sequence[float], truth: Sequence[Label]) -> float:
    """Rank-based AUC: P(score of a positive > score of a negative)."""
    if len(scores) != len(truth):
        raise DataFormatError("scores and labels differ in length")
    n_pos = sum(1 for t in truth if t is Label.ON_HOLD)
    n_neg = len(truth) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUC needs both classes present")
    ranks = _midranks(scores)
    rank_sum = sum(r for r, t in zip(ranks, truth) if t is Label.ON_HOLD)
    u = rank_sum - n_pos * (n_pos + 1) / 2
    return u / (n_pos * n_neg)


def _double_u(xs: Sequence[float], ys: Sequence[float]) -> int:
    """2U of xs over ys, exact in integers (ties contribute 1 per pair)."""
    total = 0
    for x in xs:
        for y in ys:
            if x > y:
                total += 2
            elif x == y:
                total += 1
    return total


def _exact_two_sided_p(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Exact two-sided p for Mann-Whitney under the permutation null.

    Dynamic program over the tie structure: pooled values are grouped
    into blocks of equal magnitude, and each way of assigning x slots
    within a block contributes a known increment to 2U.
    """
    n, m = len(xs), len(ys)
    pooled = sorted(list(xs) + list(ys))
    blocks: list[int] = []
    i = 0
    while i < len(pooled):
        j = i
        while j + 1 < len(pooled) and pooled[j + 1] == pooled[i]:
            j += 1
        blocks.append(j - i + 1)
        i = j + 1

    # state: (x slots used so far, accumulated 2U) -> assignment count.
    # Elements processed so far total a known amount, so the number of
    # earlier y elements is (processed - used) and 2U updates exactly.
    table: dict[tuple[int, int], int] = {(0, 0): 1}
    processed = 0
    for count in blocks:
        nxt: dict[tuple[int, int], int] = {}
        for (used, du), ways in table.items():
            earlier_y = processed - used
            for take in range(0, min(count, n - used) + 1):
                y_here = count - take
                step = take * (2 * earlier_y + y_here)
                key = (used + take, du + step)
                nxt[key] = nxt.get(key, 0) + ways * math.comb(count, take)
        table = nxt
        processed += count

    observed = _double_u(xs, ys)
    center = n * m  # mean of 2U
    threshold = abs(observed - center)
    favourable = sum(
        ways for (used, du), ways in table.items()
        if used == n and abs(du - center) >= threshold
    )
    return favourable / math.comb(n + m, n)


def mann_whitney(xs: Sequence[float], ys: Sequence[float]) -> tuple[float, float]:
    """U statistic of xs and the two-sided p-value.

    Exact enumeration (tie-aware) when n + m <= 20, else the normal
    approximation with tie correction and continuity correction.
    """
    if not xs or not ys:
        raise ValueError("mann_whitney needs two non-empty samples")
    n, m = len(xs), len(ys)
    u = _double_u(xs, ys) / 2.0
    if n + m <= 20:
        return u, _exact_two_sided_p(xs, ys)

    pooled = list(xs) + list(ys)
    big_n = n + m
    tie_counts: dict[float, int] = {}
    for value in pooled:
        tie_counts[value] = tie_counts.get(value, 0) + 1
    tie_term = sum(t ** 3 - t for t in tie_counts.values())
    variance = n * m / 12.0 * ((big_n + 1) - tie_term / (big_n * (big_n - 1)))
    if variance <= 0.0:
        return u, 1.0
    mean = n * m / 2.0
    diff = u - mean
    # continuity correction shrinks the difference toward zero
    adjusted = max(abs(diff) - 0.5, 0.0)
    z = adjusted / math.sqrt(variance)
    p = math.erfc(z / math.sqrt(2.0))
    return u, min(p, 1.0)


def holm_correct(pvalues: Sequence[float]) -> list[float]:
    """Holm step-down adjustment, returned in the original order."""
    if any(not 0.0 <= p <= 1.0 for p in pvalues):
        raise ValueError("p-values must lie in [0, 1]")
    m = len(pvalues)
    order = sorted(range(m), key=lambda i: pvalues[i])
    adjusted = [0.0] * m
    running = 0.0
    for rank, idx in enumerate(order):
        value = min(1.0, pvalues[idx] * (m - rank))
        running = max(running, value)
        adjusted[idx] = running
    return adjusted


def cliffs_delta(
    xs: Sequence[float], ys: Sequence[float],
    config: StatsConfig = StatsConfig(),
) -> tuple[float, str]:
    """Cliff's d over all pairs and its conventional magnitude bucket."""
    if not xs or not ys:
        raise ValueError("cliffs_delta needs two non-empty samples")
    greater = sum(1 for x in xs for y in ys if x > y)
    lesser = sum(1 for x in xs for y in ys if x < y)
    d = (greater - lesser) / (len(xs) * len(ys))
    small, medium, large = config.delta_thresholds
    size = abs(d)
    if size < small:
        magnitude = "negligible"
    elif size < medium:
        magnitude = "small"
    elif size < large:
        magnitude = "medium"
    else:
        magnitude = "large"
    return d, magnitude


def cohens_kappa(labels_a: Sequence[Any], labels_b: Sequence[Any]) -> float:
    """Agreement beyond chance between two labelings of the same items."""
    if len(labels_a) != len(labels_b):
        raise DataFormatError("labelings differ in length")
    if not labels_a:
        raise ValueError("empty labelings")
    n = len(labels_a)
    observed = sum(1 for a, b in zip(labels_a, labels_b) if a == b) / n
    categories = sorted(set(labels_a) | set(labels_b), key=repr)
    expected = 0.0
    for category in categories:
        pa = sum(1 for a in labels_a if a == category) / n
        pb = sum(1 for b in labels_b if b == category) / n
        expected += pa * pb
    if math.isclose(expected, 1.0):
        if observed == 1.0:
            return 1.0
        raise ValueError("kappa undefined: expected agreement is 1 with disagreements")
    return (observed - expected) / (1.0 - expected)


# --------------------------------------------------------------------------
# lifecycle analytics

def _utc_date(moment: datetime):
    if moment.tzinfo is None:
        moment = moment.replace(tzinfo=timezone.utc)
    return moment.astimezone(timezone.utc).date()


def lifespan_days(introduced: datetime, removed: datetime) -> int:
    """Whole days between the UTC calendar dates of the two moments."""
    return (_utc_date(removed) - _utc_date(introduced)).days


@dataclass(frozen=True)
class LifespanSummary:
    count: int
    median: float
    mean: float
    percentiles: tuple[tuple[int, float], ...]


def _summarize(spans: Sequence[float]) -> LifespanSummary:
    qs = tuple(
        (p, float(np.percentile(spans, p, method="linear"))) for p in PERCENTILES
    )
    return LifespanSummary(
        count=len(spans),
        median=float(statistics.median(spans)),
        mean=float(statistics.fmean(spans)),
        percentiles=qs,
    )


def lifespan_stats(
    records: Iterable[tuple[Label, datetime, datetime]]
) -> dict[Label, LifespanSummary]:
    """Per-class life spans of removed comments (removal - introduction).

    Each record is (label, introduced timestamp, removed timestamp).
    """
    spans: dict[Label, list[int]] = {}
    for label, introduced, removed in records:
        spans.setdefault(label, []).append(lifespan_days(introduced, removed))
    return {label: _summarize(values) for label, values in spans.items()}


@dataclass(frozen=True)
class ResolutionDelaySummary:
    removed_after: int
    removed_before: int
    open_or_wontfix: int
    delays_days: tuple[int, ...]
    same_day_fraction: float
    over_one_year_fraction: float
    median_delay: float | None

    @property
    def total(self) -> int:
        return self.removed_after + self.removed_before + self.open_or_wontfix


def resolution_delay_stats(
    removals: Iterable[tuple[datetime, datetime | None]]
) -> ResolutionDelaySummary:
    """How removal of an on-hold comment relates to its issue's resolution.

    Each item is (comment removal timestamp, issue resolution timestamp
    or None when the issue never reached a fixed resolution).  A removal
    on the resolution's calendar day counts as removed-after, same-day.
    """
    after_delays: list[int] = []
    removed_before = 0
    open_or_wontfix = 0
    for removed_at, resolved_at in removals:
        if resolved_at is None:
            open_or_wontfix += 1
            continue
        delay = (_utc_date(removed_at) - _utc_date(resolved_at)).days
        if delay >= 0:
            after_delays.append(delay)
        else:
            removed_before += 1
    count_after = len(after_delays)
    same_day = sum(1 for d in after_delays if d == 0)
    over_year = sum(1 for d in after_delays if d > 365)
    return ResolutionDelaySummary(
        removed_after=count_after,
        removed_before=removed_before,
        open_or_wontfix=open_or_wontfix,
        delays_days=tuple(sorted(after_delays)),
        same_day_fraction=same_day / count_after if count_after else 0.0,
        over_one_year_fraction=over_year / count_after if count_after else 0.0,
        median_delay=float(statistics.median(after_delays)) if after_delays else None,
    )


# --------------------------------------------------------------------------
# variant evaluation

VARIANTS = (
    "ngram-auto",
    "bow-auto",
    "ngram-smote-auto",
    "ngram-nb",
    "ngram-svm",
    "ngram-knn",
)


def _vectorize_all(
    comments: Sequence[Sequence[str]], vocab: ngrams.NGramVocabulary
) -> list[ngrams.FeatureVector]:
    return [ngrams.vectorize(c, vocab) for c in comments]


def _fit_variant(variant: str, dataset: Dataset, seed: int) -> learn.TrainedModel:
    if variant in ("ngram-auto", "bow-auto"):
        return learn.select_model(dataset, seed=seed)
    if variant == "ngram-smote-auto":
        return learn.select_model(learn.smote_oversample(dataset, seed=seed), seed=seed)
    if variant == "ngram-nb":
        return learn.train(dataset, "NaiveBayes", seed=seed)
    if variant == "ngram-svm":
        return learn.train(dataset, "LinearSVM", seed=seed)
    if variant == "ngram-knn":
        return learn.train(dataset, "KNN", seed=seed)
    raise ValueError(f"unknown variant {variant!r}; choose from {VARIANTS}")


def evaluate_variants(
    comments: Sequence[Sequence[str]],
    labels: Sequence[Label],
    variants: Sequence[str] = ("ngram-auto",),
    k: int = 10,
    seed: int = 0,
    max_n: int = ngrams.MAX_NGRAM_LEN,
    global_vocab: bool = False,
) -> dict[str, FoldScores]:
    """k-fold evaluation of classification variants on tokenized comments.

    The n-gram vocabulary is mined from the positive comments of each
    training fold (or, with global_vocab, once from all positives, to
    probe how much that leaks); the BOW vocabulary comes from all
    training-fold comments.  A test fold with one class contributes a
    neutral AUC of 0.5.
    """
    if len(comments) != len(labels):
        raise DataFormatError("comments and labels differ in length")
    for variant in variants:
        if variant not in VARIANTS:
            raise ValueError(f"unknown variant {variant!r}; choose from {VARIANTS}")

    indices = list(range(len(comments)))
    folds = kfold_split(indices, k=k, seed=seed)
    whole_vocab = None
    if global_vocab:
        all_positive = [comments[i] for i in indices if labels[i] is Label.ON_HOLD]
        whole_vocab = ngrams.extract_terms(all_positive, max_n=max_n, source="global")

    collected: dict[str, dict[str, list[float]]] = {
        v: {"precision": [], "recall": [], "f1": [], "auc": []} for v in variants
    }
    for fold_no, fold in enumerate(folds):
        held = set(fold)
        train_idx = [i for i in indices if i not in held]
        test_idx = list(fold)
        train_comments = [comments[i] for i in train_idx]
        train_labels = [labels[i] for i in train_idx]
        test_comments = [comments[i] for i in test_idx]
        test_labels = [labels[i] for i in test_idx]

        positives = [c for c, lab in zip(train_comments, train_labels)
                     if lab is Label.ON_HOLD]
        if whole_vocab is not None:
            vocab = whole_vocab
        else:
            vocab = ngrams.extract_terms(positives, max_n=max_n,
                                         source=f"fold-{fold_no}")
        bow_vocab = None
        if "bow-auto" in variants:
            bow_vocab = ngrams.build_bow_vocabulary(train_comments,
                                                    source=f"fold-{fold_no}-bow")

        for variant in variants:
            current = bow_vocab if variant == "bow-auto" else vocab
            if len(current) == 0:
                raise ValueError(
                    f"fold {fold_no}: empty vocabulary; corpus too small for {variant}"
                )
            train_ds = learn.make_dataset(
                _vectorize_all(train_comments, current), train_labels,
                len(current), provenance=f"fold-{fold_no}-train",
            )
            model = _fit_variant(variant, train_ds, seed)
            test_vectors = _vectorize_all(test_comments, current)
            scores = learn.predict_proba_batch(model, test_vectors)
            predicted = [
                Label.ON_HOLD if s >= model.decision_threshold
                else Label.CROSS_REFERENCE
                for s in scores
            ]
            precision, recall, f1 = compute_metrics(predicted, test_labels)
            if len(set(test_labels)) == 2:
                auc = compute_auc(list(scores), test_labels)
            else:
                auc = 0.5
            bucket = collected[variant]
            bucket["precision"].append(precision)
            bucket["recall"].append(recall)
            bucket["f1"].append(f1)
            bucket["auc"].append(auc)

    return {
        variant: FoldScores(
            variant=variant,
            precision=tuple(values["precision"]),
            recall=tuple(values["recall"]),
            f1=tuple(values["f1"]),
            auc=tuple(values["auc"]),
        )
        for variant, values in collected.items()
    }


def compare_folds(
    a: FoldScores,
    b: FoldScores,
    metrics: Sequence[str] = ("precision", "recall", "f1", "auc"),
    config: StatsConfig = StatsConfig(),
) -> list[ComparisonResult]:
    """Unpaired Mann-Whitney per metric with Holm correction across them."""
    raw = []
    deltas = []
    for metric in metrics:
        xs, ys = a.series(metric), b.series(metric)
        _, p = mann_whitney(xs, ys)
        d, magnitude = cliffs_delta(xs, ys, config)
        raw.append(p)
        deltas.append((d, magnitude))
    adjusted = holm_correct(raw)
    pair = f"{a.variant} vs {b.variant}"
    return [
        ComparisonResult(pair, metric, raw[i], adjusted[i], deltas[i][0], deltas[i][1])
        for i, metric in enumerate(metrics)
    ]


def results_tsv(results: Mapping[str, FoldScores]) -> str:
    lines = ["variant\tfold\tprecision\trecall\tf1\tauc"]
    for variant in results:
        scores = results[variant]
        for fold in range(scores.k):
            lines.append(
                f"{variant}\t{fold}\t{scores.precision[fold]!r}"
                f"\t{scores.recall[fold]!r}\t{scores.f1[fold]!r}\t{scores.auc[fold]!r}"
            )
    return "\n".join(lines) + "\n"


def comparisons_tsv(comparisons: Sequence[ComparisonResult]) -> str:
    lines = ["pair\tmetric\tp\tadjusted_p\tcliffs_delta\tmagnitude"]
    for c in comparisons:
        lines.append(
            f"{c.pair}\t{c.metric}\t{c.p_value!r}\t{c.adjusted_p!r}"
            f"\t{c.cliffs_delta!r}\t{c.magnitude}"
        )
    return "\n".join(lines) + "\n"
