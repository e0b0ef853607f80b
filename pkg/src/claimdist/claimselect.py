"""Locating proposal/novelty sentences in documents without sections.

Two selectors are provided. The topic selector fits a small
collapsed-Gibbs topic model over sentences-as-documents, anchors the
"claim" topic on cue words (propose, novel, ...) and ranks sentences by
that topic's share of their tokens. The moving-average selector scores
each sentence by how far its token centroid sits from the document
centroid and smooths the signal with a centered window so contiguous
claim passages are preferred over isolated spikes.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np

from .embeddings import EmbeddingTable
from .errors import DataError
from .textprep import normalize_and_tokenize, remove_stopwords

DEFAULT_CUE_WORDS = frozenset(
    {"propose", "proposes", "proposed", "introduce", "introduces", "new", "novel", "index"}
)

# Trailing abbreviations that must not end a sentence even when followed
# by whitespace and a capital/digit.
_ABBREVIATIONS = (
    "et al.",
    "fig.",
    "figs.",
    "eq.",
    "eqs.",
    "e.g.",
    "i.e.",
    "cf.",
    "vs.",
    "ref.",
    "refs.",
    "sec.",
    "tab.",
    "no.",
    "vol.",
)

_SENTENCE_END = re.compile(r"[.?!]")


@dataclass(frozen=True)
class SentenceRecord:
    """One sentence with its position, raw text, tokens, and selector score."""

    index: int
    text: str
    tokens: tuple[str, ...]
    score: float = 0.0


@dataclass(frozen=True)
class LdaModel:
    """Final state of a collapsed Gibbs chain over sentences-as-documents."""

    n_topics: int
    alpha: float
    beta: float
    iterations: int
    seed: int
    vocabulary: tuple[str, ...]
    word_topic: np.ndarray      # (K, V) counts
    sentence_topic: np.ndarray  # (S, K) counts
    topic_totals: np.ndarray    # (K,) counts

    def top_words(self, topic: int, n: int = 5) -> list[str]:
        order = np.argsort(-self.word_topic[topic], kind="stable")[:n]
        return [self.vocabulary[i] for i in order]


def _guarded(prefix_lower: str) -> bool:
    for abbr in _ABBREVIATIONS:
        if prefix_lower.endswith(abbr):
            before = prefix_lower[: -len(abbr)]
            if not before or not before[-1].isalnum():
                return True
    return False


def split_sentences(
    raw: str,
    stopwords: Iterable[str] | None = None,
) -> list[SentenceRecord]:
    """Rule-based sentence split.

    Breaks at '.', '?' or '!' followed by whitespace and an uppercase
    letter or digit, unless the text ends in a guarded abbreviation
    ("et al.", "Fig." and friends). Empty sentences are discarded and
    the survivors are indexed contiguously from 0.
    """
    text = raw.strip()
    if not text:
        return []
    breaks: list[int] = []
    for match in _SENTENCE_END.finditer(text):
        end = match.end()
        rest = text[end:]
        lstripped = rest.lstrip()
        if not lstripped or len(lstripped) == len(rest):
            continue  # end of text, or no whitespace after the punctuation
        nxt = lstripped[0]
        if not (nxt.isupper() or nxt.isdigit()):
            continue
        if _guarded(text[:end].lower()):
            continue
        breaks.append(end)

    pieces = []
    start = 0
    for end in breaks:
        pieces.append(text[start:end])
        start = end
    pieces.append(text[start:])

    sw = frozenset(stopwords) if stopwords is not None else None
    records: list[SentenceRecord] = []
    for piece in pieces:
        sentence = piece.strip()
        if not sentence:
            continue
        tokens = normalize_and_tokenize(sentence)
        if sw is not None:
            tokens = remove_stopwords(tokens, sw)
        records.append(
            SentenceRecord(index=len(records), text=sentence, tokens=tuple(tokens))
        )
    return records


def fit_lda(
    sentences: Sequence[SentenceRecord],
    n_topics: int = 5,
    alpha: float = 0.1,
    beta: float = 0.01,
    iterations: int = 500,
    seed: int = 0,
) -> LdaModel:
    """Collapsed Gibbs sampling with each sentence as one document.

    The chain is run single-threaded and seeded, so identical inputs and
    parameters reproduce bit-identical count tables.
    """
    if n_topics < 1:
        raise ValueError("n_topics must be >= 1")
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    vocab: dict[str, int] = {}
    docs: list[np.ndarray] = []
    for s in sentences:
        docs.append(np.array([vocab.setdefault(t, len(vocab)) for t in s.tokens], dtype=np.intp))
    if not vocab:
        raise DataError("all sentences are empty after preprocessing; nothing to model")

    n_words = len(vocab)
    rng = np.random.default_rng(seed)
    word_topic = np.zeros((n_topics, n_words), dtype=np.int64)
    sentence_topic = np.zeros((len(docs), n_topics), dtype=np.int64)
    topic_totals = np.zeros(n_topics, dtype=np.int64)
    assignments = [rng.integers(0, n_topics, size=len(doc)) for doc in docs]
    for s, doc in enumerate(docs):
        for pos, w in enumerate(doc):
            k = assignments[s][pos]
            word_topic[k, w] += 1
            sentence_topic[s, k] += 1
            topic_totals[k] += 1

    beta_total = beta * n_words
    for _ in range(iterations):
        for s, doc in enumerate(docs):
            z = assignments[s]
            for pos, w in enumerate(doc):
                k = z[pos]
                word_topic[k, w] -= 1
                sentence_topic[s, k] -= 1
                topic_totals[k] -= 1
                p = (word_topic[:, w] + beta) / (topic_totals + beta_total)
                p *= sentence_topic[s] + alpha
                cum = np.cumsum(p)
                k = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
                k = min(k, n_topics - 1)
                word_topic[k, w] += 1
                sentence_topic[s, k] += 1
                topic_totals[k] += 1
                z[pos] = k

    return LdaModel(
        n_topics=n_topics,
        alpha=alpha,
        beta=beta,
        iterations=iterations,
        seed=seed,
        vocabulary=tuple(vocab),
        word_topic=word_topic,
        sentence_topic=sentence_topic,
        topic_totals=topic_totals,
    )


def lda_select(
    model: LdaModel,
    sentences: Sequence[SentenceRecord],
    cue_words: Iterable[str] = DEFAULT_CUE_WORDS,
    top_k: int = 5,
) -> list[SentenceRecord]:
    """Sentences ranked by their share of the cue-anchored claim topic.

    The claim topic is the one with the highest aggregate assignment
    among sentences containing at least one cue word; every sentence is
    then scored by that topic's share of its tokens. Ties break by
    ascending sentence index.
    """
    if top_k < 1:
        raise ValueError("top_k must be >= 1")
    if model.sentence_topic.shape[0] != len(sentences):
        raise ValueError("model was not fitted over this sentence list")
    cues = frozenset(cue_words)
    cue_rows = [i for i, s in enumerate(sentences) if any(t in cues for t in s.tokens)]
    if not cue_rows:
        raise DataError(
            "no sentence contains a cue word; supply --cues or use the "
            "moving-average selector"
        )
    claim_topic = int(np.argmax(model.sentence_topic[cue_rows].sum(axis=0)))
    lengths = model.sentence_topic.sum(axis=1)
    scores = np.where(
        lengths > 0,
        model.sentence_topic[:, claim_topic] / np.maximum(lengths, 1),
        0.0,
    )
    order = sorted(range(len(sentences)), key=lambda i: (-scores[i], i))
    return [replace(sentences[i], score=float(scores[i])) for i in order[:top_k]]


def moving_average(values: Sequence[float], window: int) -> np.ndarray:
    """Centered moving average with truncated (not padded) edge windows."""
    if window < 1 or window % 2 == 0:
        raise ValueError("window must be an odd integer >= 1")
    v = np.asarray(values, dtype=np.float64)
    half = window // 2
    out = np.empty_like(v)
    for i in range(v.size):
        lo = max(0, i - half)
        hi = min(v.size, i + half + 1)
        out[i] = v[lo:hi].mean()
    return out


def ma_select(
    sentences: Sequence[SentenceRecord],
    table: EmbeddingTable,
    window: int = 3,
    top_k: int = 5,
) -> list[SentenceRecord]:
    """Sentences ranked by smoothed centroid divergence.

    Raw score per sentence is ``1 - cos(sentence centroid, document
    centroid)`` over in-vocabulary token occurrences; sentences with no
    in-vocabulary token score 0. The signal is smoothed by a centered
    moving average before ranking; ties break by ascending index.
    """
    if top_k < 1:
        raise ValueError("top_k must be >= 1")
    if window < 1 or window % 2 == 0:
        raise ValueError("window must be an odd integer >= 1")
    if not sentences:
        raise DataError("no sentences to select from")

    vectors: list[np.ndarray | None] = []
    any_tokens = False
    doc_sum = np.zeros(table.dimension)
    doc_count = 0
    for s in sentences:
        idx = [table.vocabulary[t] for t in s.tokens if t in table]
        if not idx:
            vectors.append(None)
            continue
        any_tokens = True
        rows = table.matrix[np.array(idx, dtype=np.intp)]
        vectors.append(rows.mean(axis=0))
        doc_sum += rows.sum(axis=0)
        doc_count += len(idx)
    if not any_tokens:
        raise DataError("no sentence has any in-vocabulary token")
    centroid = doc_sum / doc_count
    centroid_norm = float(np.linalg.norm(centroid))

    raw = np.zeros(len(sentences))
    for i, vec in enumerate(vectors):
        if vec is None or centroid_norm == 0.0:
            continue
        norm = float(np.linalg.norm(vec))
        if norm == 0.0:
            continue
        cos = float(vec @ centroid) / (norm * centroid_norm)
        raw[i] = 1.0 - max(-1.0, min(1.0, cos))

    smoothed = moving_average(raw, window)
    order = sorted(range(len(sentences)), key=lambda i: (-smoothed[i], i))
    return [replace(sentences[i], score=float(smoothed[i])) for i in order[:top_k]]
