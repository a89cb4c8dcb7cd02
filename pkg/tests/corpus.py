"""Deterministic synthetic corpus of issue-referencing comments.

On-hold entries embed a waiting phrase around the issue reference
("once X is fixed remove this workaround", "remove after X"); the
cross-reference entries cite an issue with no waiting condition ("see X
for background").  Filler words add per-comment noise without touching
the phrases, so the corpus is separable by construction and a sound
end-to-end check for the feature extraction and classifiers.
"""

from __future__ import annotations

import random
from typing import NamedTuple

from onhold.learn import Label

ON_HOLD_TEMPLATES = (
    "once {issue} is fixed remove this workaround",
    "remove after {issue}",
    "TODO remove this when {issue} is resolved",
    "waiting for {issue} before enabling this path",
    "disable until {issue} lands upstream",
    "temporary hack until {issue} is fixed",
    "once {issue} is resolved drop this special case",
    "remove this check after {issue} ships",
)

CROSS_TEMPLATES = (
    "see {issue} for background",
    "this implements the format described in {issue}",
    "test case for {issue}",
    "added in {issue}",
    "for details refer to {issue}",
    "ported from the patch in {issue}",
    "the default changed in {issue}",
    "see discussion in {issue}",
)

FILLER_WORDS = (
    "buffer", "cache", "parser", "thread", "config", "stream", "index",
    "timeout", "client", "server", "handler", "retry", "path", "token",
    "legacy", "codec", "socket", "batch", "queue", "pool",
)


class CorpusEntry(NamedTuple):
    text: str
    label: Label
    issue_key: str


def generate_corpus(
    size: int = 1500, on_hold_fraction: float = 0.13, seed: int = 7
) -> list[CorpusEntry]:
    """Generate ``size`` labeled comments, reproducibly for a given seed."""
    rng = random.Random(seed)
    n_on_hold = round(size * on_hold_fraction)
    entries: list[CorpusEntry] = []
    for i in range(size):
        on_hold = i < n_on_hold
        issue = f"HADOOP-{rng.randint(1000, 99999)}"
        template = rng.choice(ON_HOLD_TEMPLATES if on_hold else CROSS_TEMPLATES)
        words = [template.format(issue=issue)]
        if rng.random() < 0.5:
            words.insert(0, " ".join(rng.sample(FILLER_WORDS, rng.randint(1, 2))))
        if rng.random() < 0.5:
            words.append(" ".join(rng.sample(FILLER_WORDS, rng.randint(1, 2))))
        label = Label.ON_HOLD if on_hold else Label.CROSS_REFERENCE
        entries.append(CorpusEntry(" ".join(words), label, issue))
    rng.shuffle(entries)
    return entries
