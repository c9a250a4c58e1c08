"""Empirical distributions from sequence datasets and their graph combinatorics.

Cutting each length-N sample into a prefix and a suffix yields a bipartite
multigraph whose adjacency counts give the reduced-density entries directly,
with no need to build the full state: diagonals are vertex degrees and
off-diagonals count shared neighbors (length-two paths). For parity-block
graphs the top eigenvectors of the prefix density are plane rotations whose
angles come from the block degrees and shared-suffix counts.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np

from .qprob import MAX_PRODUCT_DIM, Alphabet, DensityMatrix, JointDistribution

__all__ = [
    "SequenceDataset",
    "EmpiricalGraph",
    "parse_dataset",
    "load_dataset",
    "empirical_distribution",
    "graph_reduced_density",
    "parity_graph",
    "summarizer_angles",
    "PARITY_PREFIX_ORDER",
]

# Two-bit prefixes grouped into the even block then the odd block.
PARITY_PREFIX_ORDER = (("0", "0"), ("1", "1"), ("0", "1"), ("1", "0"))


@dataclass(frozen=True)
class SequenceDataset:
    """Multiset of fixed-length token sequences over one alphabet."""

    alphabet: Alphabet
    length: int
    samples: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(tuple(s) for s in self.samples))
        if self.length < 1:
            raise ValueError("sequence length must be positive")
        tokens = set(self.alphabet)
        for s in self.samples:
            if len(s) != self.length:
                raise ValueError(f"sample {s!r} does not have length {self.length}")
            if not tokens.issuperset(s):
                raise ValueError(f"sample {s!r} uses tokens outside the alphabet")

    @property
    def n_samples(self) -> int:
        return len(self.samples)


def parse_dataset(lines: Iterable[str], alphabet: Alphabet | None = None) -> SequenceDataset:
    """Parse one sample per line; tokens are space separated.

    A line without spaces and longer than one character is read as a
    contiguous bitstring-style sample, one token per character. If no
    alphabet is given it is inferred: ('0', '1') when every token is a bit,
    otherwise tokens in first-appearance order.
    """
    samples: list[tuple[str, ...]] = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        tokens = tuple(line.split(" ")) if " " in line else tuple(line) if len(line) > 1 else (line,)
        if any(not t for t in tokens):
            raise ValueError(f"line {lineno}: malformed sample {raw!r}")
        samples.append(tokens)
    if not samples:
        raise ValueError("dataset is empty")
    lengths = {len(s) for s in samples}
    if len(lengths) != 1:
        raise ValueError(f"samples have mixed lengths {sorted(lengths)}")
    if alphabet is None:
        seen = {t for s in samples for t in s}
        if seen.issubset({"0", "1"}):
            alphabet = Alphabet(("0", "1"))
        else:
            order: dict[str, None] = {}
            for s in samples:
                for t in s:
                    order.setdefault(t, None)
            alphabet = Alphabet(tuple(order))
    return SequenceDataset(alphabet, lengths.pop(), tuple(samples))


def load_dataset(path, alphabet: Alphabet | None = None) -> SequenceDataset:
    with open(path, encoding="utf-8") as fh:
        return parse_dataset(fh, alphabet)


def _split_counts(ds: SequenceDataset, cut: int) -> Counter:
    if not 1 <= cut < ds.length:
        raise ValueError(f"cut must lie in [1, {ds.length - 1}], got {cut}")
    if not ds.samples:
        raise ValueError("dataset is empty")
    return Counter((s[:cut], s[cut:]) for s in ds.samples)


def _first_appearance(pairs: Iterable[tuple], position: int) -> list[tuple[str, ...]]:
    order: dict[tuple[str, ...], None] = {}
    for pair in pairs:
        order.setdefault(pair[position], None)
    return list(order)


def _join(tokens: tuple[str, ...]) -> str:
    return " ".join(tokens)


def _full_prefixes(ds: SequenceDataset, cut: int) -> list[tuple[str, ...]]:
    if len(ds.alphabet) ** cut > MAX_PRODUCT_DIM:
        raise ValueError(
            f"full prefix basis of {len(ds.alphabet)}**{cut} elements exceeds the "
            f"supported {MAX_PRODUCT_DIM}"
        )
    return [tuple(p) for p in itertools.product(ds.alphabet, repeat=cut)]


def empirical_distribution(
    ds: SequenceDataset, cut: int, full_prefix_basis: bool = False
) -> JointDistribution:
    """Joint table of prefix/suffix frequencies at the given cut.

    Prefixes (and suffixes) are indexed in first-appearance order; with
    full_prefix_basis the prefix side is padded to the entire product of
    the alphabet with itself, in lexicographic order.
    """
    counts = _split_counts(ds, cut)
    if full_prefix_basis:
        prefixes = _full_prefixes(ds, cut)
    else:
        prefixes = _first_appearance(counts, 0)
    suffixes = _first_appearance(counts, 1)
    table = np.zeros((len(prefixes), len(suffixes)))
    pidx = {p: i for i, p in enumerate(prefixes)}
    sidx = {s: i for i, s in enumerate(suffixes)}
    for (p, s), c in counts.items():
        table[pidx[p], sidx[s]] = c / ds.n_samples
    return JointDistribution(
        Alphabet(tuple(_join(p) for p in prefixes)),
        Alphabet(tuple(_join(s) for s in suffixes)),
        table,
    )


@dataclass(frozen=True)
class EmpiricalGraph:
    """Bipartite prefix/suffix multigraph with edge multiplicities."""

    prefixes: tuple[tuple[str, ...], ...]
    suffixes: tuple[tuple[str, ...], ...]
    edge_counts: Mapping[tuple[tuple[str, ...], tuple[str, ...]], int]
    total_edges: int

    def __post_init__(self):
        if self.total_edges != sum(self.edge_counts.values()):
            raise ValueError("total_edges does not match the sum of edge counts")
        pset, sset = set(self.prefixes), set(self.suffixes)
        for p, s in self.edge_counts:
            if p not in pset or s not in sset:
                raise ValueError(f"edge ({p!r}, {s!r}) uses an unknown vertex")
        object.__setattr__(self, "edge_counts", MappingProxyType(dict(self.edge_counts)))

    @classmethod
    def from_dataset(
        cls,
        ds: SequenceDataset,
        cut: int,
        full_prefix_basis: bool = False,
        prefix_order: Iterable[tuple[str, ...]] | None = None,
    ) -> "EmpiricalGraph":
        counts = _split_counts(ds, cut)
        if prefix_order is not None:
            prefixes = [tuple(p) for p in prefix_order]
            observed = {p for p, _ in counts}
            if not observed.issubset(prefixes):
                raise ValueError("prefix_order does not cover all observed prefixes")
        elif full_prefix_basis:
            prefixes = _full_prefixes(ds, cut)
        else:
            prefixes = _first_appearance(counts, 0)
        suffixes = _first_appearance(counts, 1)
        return cls(tuple(prefixes), tuple(suffixes), dict(counts), ds.n_samples)

    def count_matrix(self) -> np.ndarray:
        """Edge multiplicities as a prefixes x suffixes integer table."""
        table = np.zeros((len(self.prefixes), len(self.suffixes)))
        pidx = {p: i for i, p in enumerate(self.prefixes)}
        sidx = {s: i for i, s in enumerate(self.suffixes)}
        for (p, s), c in self.edge_counts.items():
            table[pidx[p], sidx[s]] = c
        return table

    def degrees(self, side: str) -> np.ndarray:
        table = self.count_matrix()
        return table.sum(axis=1) if side == "prefix" else table.sum(axis=0)


def graph_reduced_density(g: EmpiricalGraph, keep: str) -> DensityMatrix:
    """Reduced density read off the graph: degrees and shared-neighbor counts.

    For a simple graph, entry (i, j) counts the length-two paths joining
    vertices i and j (the degree when i == j), divided by the number of
    edges. Multi-edges enter through the square roots of their counts so
    the result matches the state-based reduction exactly.
    """
    if keep not in ("prefix", "suffix"):
        raise ValueError(f"keep must be 'prefix' or 'suffix', got {keep!r}")
    if g.total_edges <= 0:
        raise ValueError("graph has no edges")
    adj = np.sqrt(g.count_matrix())
    if keep == "prefix":
        mat = adj @ adj.T / g.total_edges
        basis = Alphabet(tuple(_join(p) for p in g.prefixes))
    else:
        mat = adj.T @ adj / g.total_edges
        basis = Alphabet(tuple(_join(s) for s in g.suffixes))
    return DensityMatrix(basis, mat)


def parity_graph(ds: SequenceDataset) -> EmpiricalGraph:
    """Cut-2 graph of a bitstring dataset with the parity-block prefix basis."""
    if tuple(ds.alphabet) != ("0", "1"):
        raise ValueError("parity graphs require the bit alphabet ('0', '1')")
    if ds.length < 3:
        raise ValueError("parity graphs need sequences of length at least 3")
    return EmpiricalGraph.from_dataset(ds, cut=2, prefix_order=PARITY_PREFIX_ORDER)


def _block_angle(gap: float, shared: float) -> float:
    if shared == 0.0:
        return 0.0
    return math.atan(2.0 * shared / (math.sqrt(gap * gap + 4.0 * shared * shared) + gap))


def summarizer_angles(g: EmpiricalGraph) -> tuple[float, float]:
    """Rotation angles of the top eigenvectors of the two parity blocks.

    The prefix basis must be the parity order (00, 11, 01, 10). Within each
    block the top eigenvector is (cos t, sin t) where t depends on the gap
    between the two degrees and the shared-suffix count; a block with no
    shared suffixes is diagonal and gets angle 0 by convention.
    """
    if g.prefixes != PARITY_PREFIX_ORDER:
        raise ValueError(
            "summarizer angles require the parity prefix basis (00, 11, 01, 10)"
        )
    adj = np.sqrt(g.count_matrix())
    gram = adj @ adj.T
    d1, d2, s_e = gram[0, 0], gram[1, 1], gram[0, 1]
    d3, d4, s_o = gram[2, 2], gram[3, 3], gram[2, 3]
    theta = _block_angle(d1 - d2, s_e)
    phi = _block_angle(d3 - d4, s_o)
    return theta, phi
