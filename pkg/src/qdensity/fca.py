"""Formal concept analysis of a binary relation, compared with eigenvectors.

A relation between objects and attributes induces a Galois pair of
order-reversing maps between the power sets; formal concepts are the pairs
fixed by both maps, equivalently the maximal complete bipartite subgraphs.
The same table, read as a uniform probability distribution on its edges,
yields reduced densities whose eigenvectors can be compared against the
concepts; the two notions coincide exactly when the graph is a disjoint
union of complete bipartite clusters.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import qprob
from .qprob import Alphabet, JointDistribution

__all__ = [
    "Relation",
    "FormalConcept",
    "EigenConceptPair",
    "EigenConceptReport",
    "galois_f",
    "galois_g",
    "formal_concepts",
    "compare_eigen_concepts",
]

MAX_ENUM_SIDE = 24
EIGEN_CUTOFF = 1e-10
SUPPORT_CUTOFF = 1e-10


@dataclass(frozen=True)
class Relation:
    """Boolean incidence table between an object and an attribute alphabet."""

    x_alphabet: Alphabet
    y_alphabet: Alphabet
    incidence: np.ndarray

    def __post_init__(self):
        table = np.asarray(self.incidence, dtype=bool)
        if table.shape != (len(self.x_alphabet), len(self.y_alphabet)):
            raise ValueError(
                f"incidence shape {table.shape} does not match alphabets "
                f"({len(self.x_alphabet)}, {len(self.y_alphabet)})"
            )
        table = table.copy()
        table.flags.writeable = False
        object.__setattr__(self, "incidence", table)

    @classmethod
    def from_pairs(
        cls,
        pairs: Iterable[tuple[str, str]],
        x_alphabet: Alphabet | None = None,
        y_alphabet: Alphabet | None = None,
    ) -> "Relation":
        """Build from related pairs, inferring alphabets in first-appearance order."""
        pairs = list(pairs)
        if x_alphabet is None:
            seen: dict[str, None] = {}
            for x, _ in pairs:
                seen.setdefault(x, None)
            x_alphabet = Alphabet(tuple(seen))
        if y_alphabet is None:
            seen = {}
            for _, y in pairs:
                seen.setdefault(y, None)
            y_alphabet = Alphabet(tuple(seen))
        table = np.zeros((len(x_alphabet), len(y_alphabet)), dtype=bool)
        for x, y in pairs:
            table[x_alphabet.index(x), y_alphabet.index(y)] = True
        return cls(x_alphabet, y_alphabet, table)

    @property
    def n_edges(self) -> int:
        return int(self.incidence.sum())


@dataclass(frozen=True)
class FormalConcept:
    """Extent/intent pair closed under the relation's Galois maps."""

    extent: frozenset[str]
    intent: frozenset[str]


def _subset_indices(alphabet: Alphabet, subset: Iterable[str]) -> list[int]:
    return [alphabet.index(s) for s in subset]


def galois_f(r: Relation, a: Iterable[str]) -> frozenset[str]:
    """Attributes shared by every object in a; all attributes for the empty set."""
    rows = _subset_indices(r.x_alphabet, a)
    mask = np.ones(len(r.y_alphabet), dtype=bool)
    for i in rows:
        mask &= r.incidence[i]
    return frozenset(np.array(r.y_alphabet.symbols)[mask])


def galois_g(r: Relation, b: Iterable[str]) -> frozenset[str]:
    """Objects related to every attribute in b; all objects for the empty set."""
    cols = _subset_indices(r.y_alphabet, b)
    mask = np.ones(len(r.x_alphabet), dtype=bool)
    for j in cols:
        mask &= r.incidence[:, j]
    return frozenset(np.array(r.x_alphabet.symbols)[mask])


def _mask_to_symbols(mask: int, alphabet: Alphabet) -> frozenset[str]:
    return frozenset(s for i, s in enumerate(alphabet) if mask >> i & 1)


def _enumerate_concepts(r: Relation) -> list[tuple[frozenset[str], frozenset[str]]]:
    """All Galois-closed pairs, via closures over the smaller side."""
    n, m = len(r.x_alphabet), len(r.y_alphabet)
    if min(n, m) > MAX_ENUM_SIDE:
        raise ValueError(
            f"relation sides {n}x{m} exceed the enumeration limit {MAX_ENUM_SIDE}"
        )
    table = r.incidence if m <= n else r.incidence.T
    rows, cols = table.shape
    full_row_mask = (1 << rows) - 1
    # col_masks[j]: bitmask over rows related to column j.
    col_masks = [int(sum(1 << i for i in range(rows) if table[i, j])) for j in range(cols)]
    row_masks = [int(sum(1 << j for j in range(cols) if table[i, j])) for i in range(rows)]

    def close_rows(row_mask: int) -> int:
        out = (1 << cols) - 1
        i = 0
        mm = row_mask
        while mm:
            if mm & 1:
                out &= row_masks[i]
            mm >>= 1
            i += 1
        return out

    seen: set[tuple[int, int]] = set()
    for sub in range(1 << cols):
        amask = full_row_mask
        j, mm = 0, sub
        while mm:
            if mm & 1:
                amask &= col_masks[j]
            mm >>= 1
            j += 1
        bmask = close_rows(amask)
        seen.add((amask, bmask))
    concepts = []
    for amask, bmask in seen:
        if m <= n:
            concepts.append(
                (_mask_to_symbols(amask, r.x_alphabet), _mask_to_symbols(bmask, r.y_alphabet))
            )
        else:
            concepts.append(
                (_mask_to_symbols(bmask, r.x_alphabet), _mask_to_symbols(amask, r.y_alphabet))
            )
    return concepts


def _concept_sort_key(r: Relation, c: FormalConcept):
    return (len(c.extent), sorted(r.x_alphabet.index(s) for s in c.extent))


def formal_concepts(r: Relation, include_degenerate: bool = False) -> list[FormalConcept]:
    """All formal concepts, sorted by extent size then lexicographically.

    The two degenerate closures with an empty extent or intent are dropped
    unless include_degenerate is set; for the edgeless relation they are
    the only concepts and are always returned.
    """
    pairs = _enumerate_concepts(r)
    concepts = [FormalConcept(a, b) for a, b in pairs]
    if not include_degenerate:
        proper = [c for c in concepts if c.extent and c.intent]
        if proper:
            concepts = proper
    return sorted(concepts, key=lambda c: _concept_sort_key(r, c))


@dataclass(frozen=True)
class EigenConceptPair:
    """One eigenpair matched against its most similar concept."""

    eigenvalue: float
    concept: FormalConcept
    extent_cosine: float
    intent_cosine: float
    exact_support_match: bool


@dataclass(frozen=True)
class EigenConceptReport:
    """Outcome of comparing reduced-density eigenpairs with formal concepts."""

    eigenvalues: tuple[float, ...]
    pairs: tuple[EigenConceptPair, ...]
    n_eigenpairs: int
    n_concepts: int
    matched: int
    unmatched_eigenpairs: int
    unmatched_concepts: int
    mismatch: bool

    def to_dict(self) -> dict:
        return {
            "eigenvalues": list(self.eigenvalues),
            "pairs": [
                {
                    "eigenvalue": p.eigenvalue,
                    "extent": sorted(p.concept.extent),
                    "intent": sorted(p.concept.intent),
                    "extent_cosine": p.extent_cosine,
                    "intent_cosine": p.intent_cosine,
                    "exact_support_match": p.exact_support_match,
                }
                for p in self.pairs
            ],
            "n_eigenpairs": self.n_eigenpairs,
            "n_concepts": self.n_concepts,
            "matched": self.matched,
            "unmatched_eigenpairs": self.unmatched_eigenpairs,
            "unmatched_concepts": self.unmatched_concepts,
            "mismatch": self.mismatch,
        }


def _characteristic(alphabet: Alphabet, subset: frozenset[str]) -> np.ndarray:
    vec = np.zeros(len(alphabet))
    for s in subset:
        vec[alphabet.index(s)] = 1.0
    return vec


def _cosine(a: np.ndarray, b: np.ndarray) -> float:
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        return 0.0
    return float(a @ b / (na * nb))


def uniform_distribution(r: Relation) -> JointDistribution:
    """Uniform probability on the relation's edges."""
    if r.n_edges == 0:
        raise ValueError("relation has no edges")
    return JointDistribution(
        r.x_alphabet, r.y_alphabet, r.incidence.astype(float) / r.n_edges
    )


def compare_eigen_concepts(r: Relation) -> EigenConceptReport:
    """Pair reduced-density eigenpairs with their closest formal concepts.

    Each eigenpair is matched to the concept maximizing the mean cosine
    similarity between the eigenvectors' absolute values and the normalized
    characteristic vectors of extent and intent. An exact match means the
    eigenvector supports equal extent and intent on the nose.
    """
    concepts = formal_concepts(r)
    sd = qprob.schmidt(qprob.build_state(uniform_distribution(r)))
    keep = sd.coefficients**2 > EIGEN_CUTOFF
    eigenvalues = tuple(float(v) for v in sd.coefficients[keep] ** 2)
    pairs = []
    matched_concepts: set[int] = set()
    for rank, lam in enumerate(eigenvalues):
        evec_x = np.abs(sd.x_vectors[:, rank])
        evec_y = np.abs(sd.y_vectors[:, rank])
        best, best_idx, best_score = None, -1, -np.inf
        for idx, c in enumerate(concepts):
            score_x = _cosine(evec_x, _characteristic(r.x_alphabet, c.extent))
            score_y = _cosine(evec_y, _characteristic(r.y_alphabet, c.intent))
            score = (score_x + score_y) / 2.0
            if score > best_score:
                best, best_idx, best_score = c, idx, score
                best_scores = (score_x, score_y)
        support_x = frozenset(
            s for i, s in enumerate(r.x_alphabet) if evec_x[i] > SUPPORT_CUTOFF
        )
        support_y = frozenset(
            s for i, s in enumerate(r.y_alphabet) if evec_y[i] > SUPPORT_CUTOFF
        )
        exact = best is not None and support_x == best.extent and support_y == best.intent
        if exact:
            matched_concepts.add(best_idx)
        pairs.append(
            EigenConceptPair(
                eigenvalue=lam,
                concept=best,
                extent_cosine=best_scores[0],
                intent_cosine=best_scores[1],
                exact_support_match=exact,
            )
        )
    matched = sum(1 for p in pairs if p.exact_support_match)
    unmatched_eig = len(pairs) - matched
    unmatched_con = len(concepts) - len(matched_concepts)
    return EigenConceptReport(
        eigenvalues=eigenvalues,
        pairs=tuple(pairs),
        n_eigenpairs=len(pairs),
        n_concepts=len(concepts),
        matched=matched,
        unmatched_eigenpairs=unmatched_eig,
        unmatched_concepts=unmatched_con,
        mismatch=(unmatched_eig > 0 or unmatched_con > 0),
    )
