import itertools

import numpy as np
import pytest

from qdensity.empirical import SequenceDataset
from qdensity.qprob import Alphabet, JointDistribution

BITS = Alphabet(("0", "1"))

# Three-phrase corpus: the uniform distribution with pairs
# (orange, fruit), (green, fruit), (purple, vegetable).
THREE_PHRASE_LINES = ["orange fruit", "green fruit", "purple vegetable"]

# Five-phrase, length-four corpus used throughout the entailment material.
FIVE_PHRASE_LINES = [
    "small ripe orange fruit",
    "large ripe orange vegetable",
    "small rotten orange fruit",
    "large rotten green vegetable",
    "small ripe orange vegetable",
]

# Five-edge bipartite graph: x1-y1, x2-y1, x2-y2, x3-y1, x3-y2.
FIVE_EDGE_LINES = ["x1 y1", "x2 y1", "x2 y2", "x3 y1", "x3 y2"]


def three_phrase_distribution() -> JointDistribution:
    table = np.array([[1 / 3, 0.0], [1 / 3, 0.0], [0.0, 1 / 3]])
    return JointDistribution(
        Alphabet(("orange", "green", "purple")),
        Alphabet(("fruit", "vegetable")),
        table,
    )


def even_dataset(n: int) -> SequenceDataset:
    """All even-parity bitstrings of length n as a dataset."""
    samples = tuple(
        tuple(bits)
        for bits in itertools.product("01", repeat=n)
        if sum(map(int, bits)) % 2 == 0
    )
    return SequenceDataset(BITS, n, samples)


def even_indices(n: int) -> np.ndarray:
    """Positions of even-parity strings in the lexicographic enumeration."""
    flags = [
        sum(bits) % 2 == 0 for bits in itertools.product((0, 1), repeat=n)
    ]
    return np.nonzero(flags)[0]


def random_dataset(rng, alphabet_size: int, length: int, n_samples: int) -> SequenceDataset:
    symbols = tuple(chr(ord("a") + i) for i in range(alphabet_size))
    raw = rng.integers(alphabet_size, size=(n_samples, length))
    samples = tuple(tuple(symbols[j] for j in row) for row in raw)
    return SequenceDataset(Alphabet(symbols), length, samples)


def random_joint(rng, n: int, m: int) -> JointDistribution:
    table = rng.random((n, m))
    # sprinkle zeros so supports are ragged
    table[rng.random((n, m)) < 0.3] = 0.0
    if table.sum() == 0:
        table[0, 0] = 1.0
    table /= table.sum()
    xs = Alphabet(tuple(f"x{i}" for i in range(n)))
    ys = Alphabet(tuple(f"y{i}" for i in range(m)))
    return JointDistribution(xs, ys, table)


def dense_sweep_distribution(ds: SequenceDataset, chi: int) -> np.ndarray:
    """Oracle: the sweep applied to the explicit amplitude vector.

    Materializes the full 2**n state, truncates each cut's dense reduced
    density independently of the sample-streamed code path, and expands the
    resulting tensors back into a full Born table.
    """
    from qdensity import linalg

    n = ds.length
    d = len(ds.alphabet)
    lookup = {s: i for i, s in enumerate(ds.alphabet)}
    amps = np.zeros(d**n)
    for sample in ds.samples:
        pos = 0
        for tok in sample:
            pos = pos * d + lookup[tok]
        amps[pos] += 1.0
    amps = np.sqrt(amps / ds.n_samples)

    isometries = []
    vec = amps
    bond = d
    for k in range(2, n):
        rest = d ** (n - k)
        mat = vec.reshape(bond * d, rest)
        rho = mat @ mat.T
        rho /= np.trace(rho)
        iso = linalg.sym_eigen(rho).eigenvectors[:, :chi]
        isometries.append(iso)
        vec = (iso.T @ mat).reshape(-1)
        bond = chi
    final = vec / np.linalg.norm(vec)

    cur = final.reshape(bond, d)
    for iso in reversed(isometries):
        rows = iso.shape[0]
        cur = iso @ cur.reshape(iso.shape[1], -1)
        cur = cur.reshape(rows // d, d * cur.shape[1])
    return cur.reshape(-1) ** 2


@pytest.fixture
def five_phrase_corpus(tmp_path):
    path = tmp_path / "corpus.txt"
    path.write_text("\n".join(FIVE_PHRASE_LINES) + "\n")
    return path


@pytest.fixture
def three_phrase_csv(tmp_path):
    path = tmp_path / "three.csv"
    rows = ["x,y,p"]
    for x, y in (("orange", "fruit"), ("green", "fruit"), ("purple", "vegetable")):
        rows.append(f"{x},{y},{1 / 3!r}")
    path.write_text("\n".join(rows) + "\n")
    return path
