"""Joint distributions modeled as pure states and their reduced densities.

A joint probability table becomes a unit vector whose coefficients are the
square roots of the probabilities. Projecting onto that vector gives a
rank-one density whose two reduced densities carry the classical marginals
on their diagonals and cross-subsystem interactions off-diagonal. This
module computes the reductions by three independent routes (partial trace,
Gram products, slice projections), decodes their spectra, and reassembles
the state from the spectral data.

Pair layout: the basis of the product space lists pairs with the suffix
index varying slower, so the coefficient vector of a state reshapes in C
order into the matrix M with M[a, i] = amplitude(x_i, y_a).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg

__all__ = [
    "Alphabet",
    "ProductBasis",
    "JointDistribution",
    "PureState",
    "DensityMatrix",
    "SchmidtData",
    "build_state",
    "density_diag",
    "density_projection",
    "partial_trace",
    "reduced_via_gram",
    "kraus_reduced",
    "born_distribution",
    "marginalize",
    "schmidt",
    "reconstruct_state",
    "von_neumann_entropy",
    "entanglement_entropy",
]

NORM_TOL = 1e-12
DENSITY_TOL = 1e-10
ENTROPY_CUTOFF = 1e-14
MAX_PRODUCT_DIM = 2**20


def _readonly(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=float)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class Alphabet:
    """Ordered, duplicate-free list of tokens naming the basis vectors."""

    symbols: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(self.symbols))
        if not self.symbols:
            raise ValueError("alphabet must be nonempty")
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError("alphabet symbols must be distinct")

    def __len__(self) -> int:
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)

    def index(self, symbol: str) -> int:
        return self.symbols.index(symbol)


@dataclass(frozen=True)
class ProductBasis:
    """Basis of a two-factor product space, pairs listed suffix-major."""

    x: Alphabet
    y: Alphabet

    def __len__(self) -> int:
        return len(self.x) * len(self.y)

    def pair_labels(self) -> tuple[tuple[str, str], ...]:
        return tuple((xs, ys) for ys in self.y for xs in self.x)


@dataclass(frozen=True)
class JointDistribution:
    """Probability table over an ordered product of two alphabets.

    probs[i, a] is the probability of (x_i, y_a); entries are nonnegative
    and sum to one within 1e-12.
    """

    x_alphabet: Alphabet
    y_alphabet: Alphabet
    probs: np.ndarray

    def __post_init__(self):
        table = np.asarray(self.probs, dtype=float)
        if table.shape != (len(self.x_alphabet), len(self.y_alphabet)):
            raise ValueError(
                f"probability table shape {table.shape} does not match alphabets "
                f"({len(self.x_alphabet)}, {len(self.y_alphabet)})"
            )
        if table.size > MAX_PRODUCT_DIM:
            raise ValueError(
                f"product space of {table.size} entries exceeds the supported {MAX_PRODUCT_DIM}"
            )
        if np.any(table < 0):
            raise ValueError("probabilities must be nonnegative")
        total = float(table.sum())
        if abs(total - 1.0) > NORM_TOL:
            raise ValueError(f"probabilities sum to {total!r}, expected 1")
        object.__setattr__(self, "probs", _readonly(table))


@dataclass(frozen=True)
class PureState:
    """Unit vector over the product basis, stored as its amplitude table.

    amplitudes[i, a] belongs to the pair (x_i, y_a). States built from a
    distribution have nonnegative amplitudes (square roots of
    probabilities); reconstructed states may carry signs.
    """

    x_alphabet: Alphabet
    y_alphabet: Alphabet
    amplitudes: np.ndarray

    def __post_init__(self):
        table = np.asarray(self.amplitudes, dtype=float)
        if table.shape != (len(self.x_alphabet), len(self.y_alphabet)):
            raise ValueError(
                f"amplitude table shape {table.shape} does not match alphabets"
            )
        sq = float((table**2).sum())
        if abs(sq - 1.0) > NORM_TOL:
            raise ValueError(f"squared amplitudes sum to {sq!r}, expected 1")
        object.__setattr__(self, "amplitudes", _readonly(table))

    @property
    def vector(self) -> np.ndarray:
        """Coefficient vector in the canonical suffix-major order."""
        return self.amplitudes.T.reshape(-1)

    def matrix(self) -> np.ndarray:
        """The |Y| x |X| coefficient matrix M with M[a, i] = amplitude(x_i, y_a)."""
        return linalg.reshape_vector_to_matrix(
            self.vector, len(self.y_alphabet), len(self.x_alphabet)
        )


@dataclass(frozen=True)
class DensityMatrix:
    """Symmetric PSD matrix with unit trace over a declared basis.

    Construction checks symmetry and trace; use from_matrix to also verify
    positive semidefiniteness of matrices from untrusted sources.
    """

    basis: Alphabet | ProductBasis
    matrix: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=float)
        dim = len(self.basis)
        if mat.shape != (dim, dim):
            raise ValueError(f"matrix shape {mat.shape} does not match basis size {dim}")
        if np.max(np.abs(mat - mat.T)) > DENSITY_TOL:
            raise ValueError("density matrix must be symmetric")
        tr = float(np.trace(mat))
        if abs(tr - 1.0) > DENSITY_TOL:
            raise ValueError(f"density matrix has trace {tr!r}, expected 1")
        object.__setattr__(self, "matrix", _readonly(mat))

    @classmethod
    def from_matrix(cls, basis: Alphabet | ProductBasis, matrix) -> "DensityMatrix":
        """Fully validated constructor, including the PSD check."""
        dm = cls(basis, matrix)
        if not linalg.is_psd(dm.matrix, DENSITY_TOL):
            raise ValueError("density matrix must be positive semidefinite")
        return dm


@dataclass(frozen=True)
class SchmidtData:
    """Schmidt decomposition of a two-factor pure state.

    coefficients are descending and their squares sum to one; x_vectors and
    y_vectors hold the matched orthonormal factor columns.
    """

    coefficients: np.ndarray
    x_vectors: np.ndarray
    y_vectors: np.ndarray
    x_alphabet: Alphabet
    y_alphabet: Alphabet

    def __post_init__(self):
        coeffs = np.asarray(self.coefficients, dtype=float)
        sq = float((coeffs**2).sum())
        if abs(sq - 1.0) > DENSITY_TOL:
            raise ValueError(f"squared Schmidt coefficients sum to {sq!r}, expected 1")
        object.__setattr__(self, "coefficients", _readonly(coeffs))
        object.__setattr__(self, "x_vectors", _readonly(self.x_vectors))
        object.__setattr__(self, "y_vectors", _readonly(self.y_vectors))


def _check_keep(keep: str) -> str:
    if keep not in ("X", "Y"):
        raise ValueError(f"keep must be 'X' or 'Y', got {keep!r}")
    return keep


def build_state(pi: JointDistribution) -> PureState:
    """Weight every basis pair by the square root of its probability."""
    return PureState(pi.x_alphabet, pi.y_alphabet, np.sqrt(pi.probs))


def density_diag(pi: JointDistribution) -> DensityMatrix:
    """Maximal-rank density with the joint probabilities on the diagonal."""
    vec = pi.probs.T.reshape(-1)
    return DensityMatrix(ProductBasis(pi.x_alphabet, pi.y_alphabet), np.diag(vec))


def density_projection(psi: PureState) -> DensityMatrix:
    """Rank-one density projecting onto the state vector."""
    v = psi.vector
    norm = float(np.linalg.norm(v))
    if abs(norm - 1.0) > 1e-9:
        raise ValueError(f"state has norm {norm!r}, expected 1")
    return DensityMatrix(ProductBasis(psi.x_alphabet, psi.y_alphabet), np.outer(v, v))


def partial_trace(rho: DensityMatrix, keep: str) -> DensityMatrix:
    """Trace out one factor of a density on a declared product basis.

    keep='X' sums matched suffix indices, keep='Y' matched prefix indices.
    """
    _check_keep(keep)
    if not isinstance(rho.basis, ProductBasis):
        raise ValueError("partial trace requires a density on a product basis")
    n, m = len(rho.basis.x), len(rho.basis.y)
    # Suffix-major layout: flat index of (i, a) is a*n + i.
    t = rho.matrix.reshape(m, n, m, n)
    if keep == "X":
        return DensityMatrix(rho.basis.x, np.einsum("aiaj->ij", t))
    return DensityMatrix(rho.basis.y, np.einsum("aibi->ab", t))


def reduced_via_gram(psi: PureState, keep: str) -> DensityMatrix:
    """Reduced density as a Gram product of the reshaped state.

    With M the coefficient matrix, keep='X' gives M.T @ M and keep='Y'
    gives M @ M.T; both agree with the partial trace.
    """
    _check_keep(keep)
    m = psi.matrix()
    if keep == "X":
        return DensityMatrix(psi.x_alphabet, m.T @ m)
    return DensityMatrix(psi.y_alphabet, m @ m.T)


def kraus_reduced(psi: PureState, keep: str) -> DensityMatrix:
    """Reduced density as a sum of slice projections of the state.

    Each basis vector of the traced-out factor contributes the projection
    onto its slice of the coefficient matrix (operator-sum form).
    """
    _check_keep(keep)
    m = psi.matrix()
    if keep == "Y":
        dim = len(psi.y_alphabet)
        acc = np.zeros((dim, dim))
        for i in range(m.shape[1]):
            col = m[:, i]
            acc += np.outer(col, col)
        return DensityMatrix(psi.y_alphabet, acc)
    dim = len(psi.x_alphabet)
    acc = np.zeros((dim, dim))
    for a in range(m.shape[0]):
        row = m[a, :]
        acc += np.outer(row, row)
    return DensityMatrix(psi.x_alphabet, acc)


def born_distribution(rho: DensityMatrix) -> np.ndarray:
    """Probabilities of the basis elements: the diagonal of the density."""
    diag = np.diag(rho.matrix).copy()
    if np.any(diag < -1e-12):
        raise ValueError("density diagonal has a negative entry")
    total = float(diag.sum())
    if abs(total - 1.0) > DENSITY_TOL:
        raise ValueError(f"density diagonal sums to {total!r}, expected 1")
    return diag


def marginalize(pi: JointDistribution, keep: str) -> np.ndarray:
    """Classical marginal obtained by summing over the other factor."""
    _check_keep(keep)
    return pi.probs.sum(axis=1) if keep == "X" else pi.probs.sum(axis=0)


def schmidt(psi: PureState) -> SchmidtData:
    """Schmidt decomposition via the SVD of the coefficient matrix.

    The right singular vectors live on the prefix side, the left ones on
    the suffix side, and the singular values are the Schmidt coefficients.
    """
    u, s, v = linalg.svd(psi.matrix())
    return SchmidtData(
        coefficients=s,
        x_vectors=v,
        y_vectors=u,
        x_alphabet=psi.x_alphabet,
        y_alphabet=psi.y_alphabet,
    )


def reconstruct_state(sd: SchmidtData) -> PureState:
    """Reassemble the pure state from its Schmidt data.

    Round-trips schmidt() within 1e-10. For synthetic Schmidt data the
    reconstructed amplitudes may carry signs.
    """
    m = sd.y_vectors @ np.diag(sd.coefficients) @ sd.x_vectors.T
    return PureState(sd.x_alphabet, sd.y_alphabet, m.T)


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """Shannon entropy of the density's eigenvalue distribution."""
    w = linalg.sym_eigen(rho.matrix).eigenvalues
    w = w[w > ENTROPY_CUTOFF]
    return float(-(w * np.log(w)).sum())


def entanglement_entropy(psi: PureState) -> float:
    """Shannon entropy of the squared Schmidt coefficients.

    Zero exactly when the state is a product (Schmidt rank one).
    """
    sq = schmidt(psi).coefficients ** 2
    sq = sq[sq > ENTROPY_CUTOFF]
    return float(-(sq * np.log(sq)).sum())
