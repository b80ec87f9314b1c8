"""Deterministic synthetic fixtures.

Real hate-speech corpora cannot be redistributed, so tests and demos run
on generated posts instead: the positive class is built from generically
hostile templates aimed at an unnamed group, the negative class from
everyday chatter, with shared filler phrases and a few deliberately
ambiguous overlaps ("i hate when the bus is late") so the classes are
separable but not trivially so.
"""

from __future__ import annotations

import random
from pathlib import Path
from typing import Sequence

from .corpus import LabeledCorpus, Post, normalize

__all__ = ["make_synthetic_corpus", "make_toy_token_set", "write_embedding_fixture"]

_FILLER = (
    "just got home from work",
    "the weather here is cold today",
    "anyone watching the match tonight",
    "coffee first then everything else",
    "new phone battery already dying",
    "long week honestly",
    "this commute takes forever",
    "weekend plans anyone",
    "lunch spot near the office was packed",
)

_BENIGN = (
    "the new bakery downtown is amazing",
    "loved the concert last night",
    "my garden finally has tomatoes",
    "great book recommendation thanks @{handle}",
    "recipe turned out perfect see {url}",
    "congrats to the local team on the win",
    "i hate when the bus is late",
    "study group meets thursday at the library",
    "movie night with friends was fun",
    "puppy learned a new trick today",
    "sunset photos from the hike {url}",
    "happy birthday @{handle} have a great one",
    "finally finished painting the fence",
    "new episode tonight do not spoil it",
)

_HOSTILE = (
    "i hate that group so much they ruin everything",
    "those people are a menace and everyone knows it",
    "that group should just disappear from this city",
    "sick of those people they wreck everything here",
    "nobody wants that group around get them out",
    "those people are rotten to the core trust me",
    "that group destroys every neighborhood they touch",
    "keep that group away from our schools",
    "those people lie and cheat it is what they do",
    "why is that group even allowed here anymore",
    "that group is not welcome here and never will be",
)

_MILD_HOSTILE = (
    "honestly that group is the problem here",
    "not surprised it was those people again",
    "that group always pulls this stuff",
    "everything went downhill when that group showed up",
)

# Hostile lexicon aimed at things, not people: hard negatives that force
# models past single-keyword shortcuts.
_BENIGN_EDGY = (
    "i hate that my phone died again today",
    "this traffic is a menace every single morning",
    "sick of this rain it wrecks every weekend plan",
    "that old stadium should just disappear already",
    "the printer is rotten to the core i swear",
    "construction noise ruins everything around here",
    "these prices destroy every budget i make",
    "why is this pollen even allowed to exist",
    "my internet lies and cheats about its speed",
)


def _fill(template: str, rng: random.Random) -> str:
    if "{handle}" in template:
        template = template.replace("{handle}", f"user{rng.randrange(100)}")
    if "{url}" in template:
        template = template.replace("{url}", f"https://pics.example/{rng.randrange(1000)}")
    return template


def _compose(rng: random.Random, positive: bool) -> str:
    if positive:
        bank = _MILD_HOSTILE if rng.random() < 0.25 else _HOSTILE
    else:
        bank = _BENIGN_EDGY if rng.random() < 0.3 else _BENIGN
    parts = [_fill(rng.choice(bank), rng)]
    if rng.random() < 0.5:
        parts.append(_fill(rng.choice(_FILLER), rng))
    if rng.random() < 0.2:
        parts.append(_fill(rng.choice(bank), rng))
    return " ".join(parts)


def make_synthetic_corpus(
    n_posts: int = 2000,
    positive_fraction: float = 0.2,
    seed: int = 42,
) -> LabeledCorpus:
    """Generated labeled corpus with an exact positive count of
    round(n_posts * positive_fraction), shuffled deterministically."""
    if n_posts < 1:
        raise ValueError("n_posts must be >= 1")
    if not 0.0 <= positive_fraction <= 1.0:
        raise ValueError("positive_fraction must lie in [0,1]")
    rng = random.Random(seed)
    n_positive = round(n_posts * positive_fraction)
    flags = [True] * n_positive + [False] * (n_posts - n_positive)
    rng.shuffle(flags)

    posts = []
    labels = []
    for i, positive in enumerate(flags):
        text = _compose(rng, positive)
        # Small annotator-noise rate: the recorded label occasionally
        # contradicts the template, as real dual-annotated data does.
        label = positive if rng.random() >= 0.02 else not positive
        posts.append(Post(id=f"p{i:05d}", text=text, tokens=normalize(text)))
        labels.append(label)
    return LabeledCorpus(posts=posts, labels=labels)


def make_toy_token_set(
    n_examples: int = 64,
    seq_len: int = 16,
    vocab_size: int = 8194,
    seed: int = 7,
) -> tuple[list[list[int]], list[bool]]:
    """Small separable token-id dataset for transformer fine-tuning runs.

    Each class owns eight marker ids; every sequence mixes class markers
    with ids from a shared noise pool, so the classes are linearly
    separable after pooling but no single position decides the label.
    The default vocab matches the tokenizer's full capacity (8192 terms
    plus padding and unknown), giving the embedding table its real shape.
    """
    if vocab_size < 64:
        raise ValueError("vocab_size too small for the marker/noise pools")
    rng = random.Random(seed)
    ids = list(range(2, vocab_size))
    rng.shuffle(ids)
    neg_markers, pos_markers = ids[:8], ids[8:16]
    noise = ids[16 : 16 + 48]

    sequences: list[list[int]] = []
    labels: list[bool] = []
    for i in range(n_examples):
        positive = i % 2 == 1
        markers = pos_markers if positive else neg_markers
        n_markers = max(1, seq_len * 3 // 5)
        seq = [rng.choice(markers) for _ in range(n_markers)]
        seq += [rng.choice(noise) for _ in range(seq_len - n_markers)]
        rng.shuffle(seq)
        sequences.append(seq)
        labels.append(positive)
    return sequences, labels


def write_embedding_fixture(
    path: str | Path,
    terms: Sequence[str],
    dim: int = 8,
    seed: int = 0,
    scale: float = 0.5,
) -> None:
    """GloVe-style text file of per-term vectors drawn from a centered
    gaussian, so negative components are guaranteed to appear."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    rng = random.Random(seed)
    with open(path, "w", encoding="utf-8") as handle:
        for term in terms:
            values = " ".join(f"{rng.gauss(0.0, scale):.6f}" for _ in range(dim))
            handle.write(f"{term} {values}\n")
