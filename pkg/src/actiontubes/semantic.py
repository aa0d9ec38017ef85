"""Action/object semantic matching.

Word-embedding lookup and cosine matching, the multi-lingual average, the
two discrimination functions, the depth-based naming weight, the combined
per-object weight, and top-k object selection. All tables are immutable
after load and every function is pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import Vocabulary


class EmbeddingError(ValueError):
    """Term cannot be embedded (out of vocabulary or zero vector)."""


class TranslationError(KeyError):
    """A language is missing a required translation."""


@dataclass(frozen=True, eq=False)
class EmbeddingTable:
    """Token -> dense vector map for one language."""

    language: str
    dim: int
    vectors: dict  # token -> np.ndarray of shape (dim,)

    def __post_init__(self):
        if self.dim < 1:
            raise EmbeddingError(f"non-positive embedding dim: {self.dim}")
        for term, vec in self.vectors.items():
            if vec.shape != (self.dim,):
                raise EmbeddingError(
                    f"vector for {term!r} has length {vec.shape[0]}, expected {self.dim}"
                )
            if not np.all(np.isfinite(vec)):
                raise EmbeddingError(f"non-finite vector for {term!r}")
            if not np.any(vec):
                raise EmbeddingError(f"all-zero vector for {term!r}")


@dataclass(frozen=True)
class MultilingualLexicon:
    """language tag -> (canonical term -> translated phrase)."""

    translations: dict

    def languages(self) -> tuple[str, ...]:
        return tuple(self.translations.keys())

    def translate(self, language: str, term: str) -> str:
        per_lang = self.translations.get(language)
        if per_lang is None:
            raise TranslationError(f"no lexicon column for language {language!r}")
        phrase = per_lang.get(term)
        if phrase is None:
            raise TranslationError(
                f"no {language} translation for term {term!r}"
            )
        return phrase


@dataclass(frozen=True)
class ObjectDepthTable:
    """Global-object id -> WordNet depth, clipped into [2, 18] at construction."""

    depths: dict

    def __post_init__(self):
        clipped = {int(k): min(18, max(2, int(v))) for k, v in self.depths.items()}
        object.__setattr__(self, "depths", clipped)

    def depth_of(self, object_id: int) -> int:
        try:
            return self.depths[object_id]
        except KeyError:
            raise EmbeddingError(f"no depth entry for object id {object_id}") from None


@dataclass(frozen=True)
class NamingPriorConfig:
    """Beta density parameters for the depth weighting."""

    alpha: float = 2.0
    beta: float = 2.0

    def __post_init__(self):
        if self.alpha <= 0 or self.beta <= 0:
            raise EmbeddingError(
                f"Beta parameters must be positive, got ({self.alpha}, {self.beta})"
            )


@dataclass(frozen=True)
class ActionObjectWeights:
    """Per-action ranked object list: action id -> [(object id, weight), ...]."""

    per_action: dict
    k: int


def _tokens(term: str) -> list[str]:
    return term.replace("_", " ").split()


def embed(term: str, table: EmbeddingTable) -> np.ndarray:
    """Embed a term; multi-word phrases average their in-vocabulary tokens.

    Lookup tries each token as written, then lowercased. Raises when every
    token is out of vocabulary.
    """
    found = []
    for tok in _tokens(term):
        vec = table.vectors.get(tok)
        if vec is None:
            vec = table.vectors.get(tok.lower())
        if vec is not None:
            found.append(vec)
    if not found:
        raise EmbeddingError(
            f"term {term!r} has no in-vocabulary token in {table.language} embeddings"
        )
    if len(found) == 1:
        return found[0]
    return np.mean(found, axis=0)


def cosine_sim(u: np.ndarray, v: np.ndarray) -> float:
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise EmbeddingError("cosine similarity of a zero vector is undefined")
    return float(np.dot(u, v) / (nu * nv))


def pair_similarity(object_term: str, action_term: str, table: EmbeddingTable) -> float:
    """Cosine similarity of the embedded terms."""
    return cosine_sim(embed(object_term, table), embed(action_term, table))


def multilingual_similarity(
    object_term: str,
    action_term: str,
    lexicon: MultilingualLexicon,
    tables: dict,
    languages,
) -> float:
    """Mean over languages of the translated terms' cosine similarity."""
    if not languages:
        raise EmbeddingError("empty language list")
    values = []
    for lang in languages:
        table = tables.get(lang)
        if table is None:
            raise EmbeddingError(f"no embedding table for language {lang!r}")
        try:
            values.append(
                pair_similarity(
                    lexicon.translate(lang, object_term),
                    lexicon.translate(lang, action_term),
                    table,
                )
            )
        except EmbeddingError as exc:
            raise EmbeddingError(f"language {lang}: {exc}") from exc
    return float(sum(values) / len(values))


class SimilarityProvider:
    """Configured similarity: plain single-language or multi-lingual mean.

    Results are memoized per (a, b) pair since weight construction revisits
    the same pairs many times.
    """

    def __init__(self, tables, languages, lexicon=None, multilingual=False):
        if not languages:
            raise EmbeddingError("at least one language required")
        self.tables = dict(tables)
        self.languages = tuple(languages)
        self.lexicon = lexicon
        self.multilingual = bool(multilingual)
        if self.multilingual and lexicon is None:
            raise EmbeddingError("multi-lingual similarity requires a lexicon")
        self._cache: dict = {}

    def __call__(self, term_a: str, term_b: str) -> float:
        key = (term_a, term_b)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        if self.multilingual:
            value = multilingual_similarity(
                term_a, term_b, self.lexicon, self.tables, self.languages
            )
        else:
            lang = self.languages[0]
            table = self.tables.get(lang)
            if table is None:
                raise EmbeddingError(f"no embedding table for language {lang!r}")
            a, b = term_a, term_b
            if self.lexicon is not None:
                a = self.lexicon.translate(lang, a)
                b = self.lexicon.translate(lang, b)
            value = pair_similarity(a, b, table)
        self._cache[key] = value
        return value


def action_discrimination(object_term, action_term, all_actions, psi) -> float:
    """Similarity to the action minus the best similarity to any other action."""
    others = [a for a in all_actions if a != action_term]
    if not others:
        raise EmbeddingError("action discrimination needs at least two actions")
    return psi(object_term, action_term) - max(psi(object_term, c) for c in others)


def object_discrimination(object_term, action_term, all_objects, psi) -> float:
    """Similarity to the action minus the mean rooted similarity to other objects.

    The mean divides by the full object-set size; negative inter-object
    cosines are clamped to 0 before the square root.
    """
    others = [g for g in all_objects if g != object_term]
    if not others:
        raise EmbeddingError("object discrimination needs at least two objects")
    penalty = sum(
        math.sqrt(min(1.0, max(0.0, psi(object_term, g)))) for g in others
    ) / len(all_objects)
    return psi(object_term, action_term) - penalty


_DEPTH_EPS = 1e-3


def naming_weight(depth: int, config: NamingPriorConfig) -> float:
    """Beta density at the normalized WordNet depth.

    Depth is clipped into [2, 18] and mapped to d = (depth - 2) / 16, then d
    is kept inside [eps, 1 - eps] so boundary depths retain a small nonzero
    weight for every positive parameter choice.
    """
    if config.alpha <= 0 or config.beta <= 0:
        raise EmbeddingError("Beta parameters must be positive")
    depth = min(18, max(2, int(depth)))
    d = (depth - 2) / 16.0
    d = min(1.0 - _DEPTH_EPS, max(_DEPTH_EPS, d))
    norm = math.gamma(config.alpha) * math.gamma(config.beta) / math.gamma(
        config.alpha + config.beta
    )
    return d ** (config.alpha - 1.0) * (1.0 - d) ** (config.beta - 1.0) / norm


@dataclass(frozen=True, eq=False)
class WeightContext:
    """Everything combined_object_weight needs, with each prior toggleable.

    ``psi`` is the configured similarity provider (already single- or
    multi-lingual). ``discrimination`` is "off", "action", or "object";
    ``naming`` is None when the depth prior is disabled, otherwise the Beta
    parameters plus a per-term depth lookup.
    """

    psi: object
    all_actions: tuple
    all_objects: tuple
    discrimination: str = "off"
    naming: NamingPriorConfig | None = None
    depth_of: object | None = None  # callable term -> int
    _penalties: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.discrimination not in ("off", "action", "object"):
            raise EmbeddingError(
                f"unknown discrimination mode {self.discrimination!r}"
            )
        if self.naming is not None and self.depth_of is None:
            raise EmbeddingError("naming prior enabled but no depth lookup given")


def combined_object_weight(object_term, action_term, ctx: WeightContext) -> float:
    """(similarity + discrimination) * naming weight, honoring the toggles."""
    value = ctx.psi(object_term, action_term)
    if ctx.discrimination == "action":
        value += action_discrimination(object_term, action_term, ctx.all_actions, ctx.psi)
    elif ctx.discrimination == "object":
        penalty = ctx._penalties.get(object_term)
        if penalty is None:
            others = [g for g in ctx.all_objects if g != object_term]
            if not others:
                raise EmbeddingError("object discrimination needs at least two objects")
            penalty = sum(
                math.sqrt(min(1.0, max(0.0, ctx.psi(object_term, g)))) for g in others
            ) / len(ctx.all_objects)
            ctx._penalties[object_term] = penalty
        value += ctx.psi(object_term, action_term) - penalty
    if ctx.naming is not None:
        value *= naming_weight(ctx.depth_of(object_term), ctx.naming)
    return value


def select_top_k(action_term, vocabulary: Vocabulary, weight_provider, k: int):
    """The k highest-weight objects for an action, ties broken by object id.

    Returns [(object id, weight), ...] sorted by weight descending.
    """
    if k < 1 or k > len(vocabulary):
        raise ValueError(
            f"k={k} outside [1, {len(vocabulary)}] for {vocabulary.kind} vocabulary"
        )
    scored = [
        (weight_provider(name, action_term), obj_id)
        for obj_id, name in enumerate(vocabulary.names)
    ]
    scored.sort(key=lambda t: (-t[0], t[1]))
    return [(obj_id, w) for w, obj_id in scored[:k]]


def build_action_object_weights(
    action_vocab: Vocabulary,
    object_vocab: Vocabulary,
    ctx: WeightContext,
    k: int,
) -> ActionObjectWeights:
    """Ranked combined weights for every action over an object vocabulary."""
    per_action = {}
    for action_id, action_term in enumerate(action_vocab.names):
        per_action[action_id] = select_top_k(
            action_term,
            object_vocab,
            lambda obj, act: combined_object_weight(obj, act, ctx),
            k,
        )
    return ActionObjectWeights(per_action=per_action, k=k)
