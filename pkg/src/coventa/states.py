"""Dense bipartite states: construction, validation, partial traces, sampling.

Composite indices are A-major: ``i = i_a * dim_b + i_b``, which is the ordering
``np.kron(op_a, op_b)`` produces.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatch,
    DimensionOutOfRange,
    NormalizationError,
    NotHermitian,
    NotPositive,
    SimplexViolation,
    TraceNotOne,
)

MAX_DIM = 16
HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
EIGEN_FLOOR = -1e-9
NORM_TOL = 1e-10
SCHMIDT_NORM_TOL = 1e-8


def check_dims(*dims: int) -> None:
    for d in dims:
        if int(d) != d or not 2 <= d <= MAX_DIM:
            raise DimensionOutOfRange(f"local dimension {d} outside [2, {MAX_DIM}]")


def hermiticity_residue(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def require_hermitian(op: np.ndarray, name: str = "operator", tol: float = HERMITIAN_TOL) -> None:
    diff = np.abs(op - op.conj().T)
    worst = float(diff.max())
    if worst > tol:
        i, j = np.unravel_index(int(np.argmax(diff)), diff.shape)
        raise NotHermitian(
            f"{name} not Hermitian: |M - M^dag| = {worst:.3e} at ({i}, {j}) exceeds tol {tol:g}"
        )


@dataclass(frozen=True)
class DensityMatrix:
    dim_a: int
    dim_b: int
    matrix: np.ndarray
    report: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def dim(self) -> int:
        return self.dim_a * self.dim_b


@dataclass(frozen=True)
class PureState:
    dim_a: int
    dim_b: int
    amplitudes: np.ndarray

    def density(self) -> DensityMatrix:
        psi = self.amplitudes
        return make_density(self.dim_a, self.dim_b, np.outer(psi, psi.conj()))

    def coefficient_matrix(self) -> np.ndarray:
        return self.amplitudes.reshape(self.dim_a, self.dim_b)


@dataclass(frozen=True)
class SchmidtSpectrum:
    """Descending Schmidt probabilities, padded with zeros to ``dim_a``."""

    probabilities: np.ndarray
    basis_a: np.ndarray | None = None
    basis_b: np.ndarray | None = None

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=float)
        object.__setattr__(self, "probabilities", p)
        if p.ndim != 1 or p.size == 0:
            raise SimplexViolation("Schmidt probabilities must be a non-empty vector")
        if p.min() < -1e-12 or abs(p.sum() - 1.0) > 1e-10:
            raise SimplexViolation(
                f"Schmidt probabilities off the simplex: min {p.min():.3e}, sum {p.sum():.12g}"
            )
        if np.any(np.diff(p) > 1e-12):
            raise SimplexViolation("Schmidt probabilities must be in descending order")


@dataclass(frozen=True)
class BlochExpansion:
    """Coefficients over ``{1, lambda_1, ...}`` on each side; index 0 is the identity."""

    a: np.ndarray
    b: np.ndarray
    l: np.ndarray


def make_density(dim_a: int, dim_b: int, entries) -> DensityMatrix:
    check_dims(dim_a, dim_b)
    m = np.array(entries, dtype=complex)
    d = dim_a * dim_b
    if m.shape != (d, d):
        raise DimensionMismatch(f"expected a {d}x{d} matrix for dims {dim_a}x{dim_b}, got {m.shape}")
    if not np.all(np.isfinite(m)):
        raise DimensionMismatch("matrix has non-finite entries")
    require_hermitian(m, "density matrix")
    tr = np.trace(m)
    if abs(tr - 1.0) > TRACE_TOL:
        raise TraceNotOne(f"trace {tr.real:.12g}{tr.imag:+.3e}j deviates from 1 by more than {TRACE_TOL:g}")
    # symmetrize away sub-tolerance rounding so downstream traces are real
    m = 0.5 * (m + m.conj().T)
    evals = np.linalg.eigvalsh(m)
    if evals[0] < EIGEN_FLOOR:
        raise NotPositive(f"smallest eigenvalue {evals[0]:.3e} below floor {EIGEN_FLOOR:g}")
    report = {
        "hermiticity_residue": hermiticity_residue(np.array(entries, dtype=complex)),
        "trace_error": float(abs(tr - 1.0)),
        "min_eigenvalue": float(evals[0]),
        "rank": int(np.sum(evals > 1e-10)),
    }
    m.setflags(write=False)
    return DensityMatrix(int(dim_a), int(dim_b), m, report)


def make_pure(dim_a: int, dim_b: int, amplitudes, tol: float = NORM_TOL) -> PureState:
    check_dims(dim_a, dim_b)
    psi = np.array(amplitudes, dtype=complex).ravel()
    if psi.size != dim_a * dim_b:
        raise DimensionMismatch(f"expected {dim_a * dim_b} amplitudes, got {psi.size}")
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > tol:
        raise NormalizationError(f"state norm {norm:.12g} deviates from 1 by more than {tol:g}")
    psi.setflags(write=False)
    return PureState(int(dim_a), int(dim_b), psi)


def as_density(state) -> DensityMatrix:
    return state.density() if isinstance(state, PureState) else state


def product_density(rho_a, rho_b) -> DensityMatrix:
    rho_a = np.asarray(rho_a, dtype=complex)
    rho_b = np.asarray(rho_b, dtype=complex)
    return make_density(rho_a.shape[0], rho_b.shape[0], np.kron(rho_a, rho_b))


def partial_trace(rho: DensityMatrix, trace_out: str = "B") -> np.ndarray:
    """Reduced state of the side that is kept after tracing out ``trace_out``."""
    t = rho.matrix.reshape(rho.dim_a, rho.dim_b, rho.dim_a, rho.dim_b)
    if trace_out == "B":
        return np.einsum("ikjk->ij", t)
    if trace_out == "A":
        return np.einsum("kikj->ij", t)
    raise ValueError(f"trace_out must be 'A' or 'B', got {trace_out!r}")


def schmidt_decompose(psi: PureState) -> SchmidtSpectrum:
    amps = np.asarray(psi.amplitudes)
    norm = np.linalg.norm(amps)
    if abs(norm - 1.0) > SCHMIDT_NORM_TOL:
        raise NormalizationError(f"state norm {norm:.12g} deviates from 1 by more than {SCHMIDT_NORM_TOL:g}")
    u, s, vh = np.linalg.svd(amps.reshape(psi.dim_a, psi.dim_b))
    # svd already returns singular values in descending order
    p = np.zeros(psi.dim_a)
    p[: s.size] = s**2
    p /= p.sum()
    return SchmidtSpectrum(p, u, vh.conj().T)


def expectation(rho: DensityMatrix, op) -> float:
    op = np.asarray(op, dtype=complex)
    if op.shape != rho.matrix.shape:
        raise DimensionMismatch(f"operator shape {op.shape} does not match state {rho.matrix.shape}")
    require_hermitian(op)
    val = np.einsum("ij,ji->", rho.matrix, op)
    if abs(val.imag) > 1e-10:
        raise NotHermitian(f"expectation has imaginary residue {val.imag:.3e}")
    return float(val.real)


def apply_local_unitaries(rho: DensityMatrix, u_a, u_b) -> DensityMatrix:
    u = np.kron(u_a, u_b)
    return make_density(rho.dim_a, rho.dim_b, u @ rho.matrix @ u.conj().T)


def bloch_expand(rho: DensityMatrix, ops_a, ops_b) -> BlochExpansion:
    """Expand over identity plus orthonormal generators on each side."""
    basis_a = [np.eye(rho.dim_a)] + list(ops_a)
    basis_b = [np.eye(rho.dim_b)] + list(ops_b)
    # dual elements: identity pairs with 1/N, generators with themselves
    dual_a = [basis_a[0] / rho.dim_a] + basis_a[1:]
    dual_b = [basis_b[0] / rho.dim_b] + basis_b[1:]
    t = rho.matrix.reshape(rho.dim_a, rho.dim_b, rho.dim_a, rho.dim_b)
    da = np.array(dual_a)
    db = np.array(dual_b)
    l = np.einsum("ikjm,pji,qmk->pq", t, da, db).real
    rho_a = partial_trace(rho, "B")
    rho_b = partial_trace(rho, "A")
    a = np.einsum("ij,pji->p", rho_a, da).real
    b = np.einsum("ij,pji->p", rho_b, db).real
    return BlochExpansion(a, b, l)


def bloch_reconstruct(exp: BlochExpansion, ops_a, ops_b) -> np.ndarray:
    basis_a = np.array([np.eye(ops_a[0].shape[0])] + list(ops_a))
    basis_b = np.array([np.eye(ops_b[0].shape[0])] + list(ops_b))
    full = np.einsum("pq,pij,qkm->ikjm", exp.l, basis_a, basis_b)
    n = basis_a.shape[1] * basis_b.shape[1]
    return full.reshape(n, n)


def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def _complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_pure_state(dim_a: int, dim_b: int, seed=None) -> PureState:
    check_dims(dim_a, dim_b)
    v = _complex_gaussian(_rng(seed), dim_a * dim_b)
    return make_pure(dim_a, dim_b, v / np.linalg.norm(v))


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    z = _complex_gaussian(rng, (n, n)) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_local_unitary(dim_a: int, dim_b: int, seed=None) -> tuple[np.ndarray, np.ndarray]:
    check_dims(dim_a, dim_b)
    rng = _rng(seed)
    return haar_unitary(dim_a, rng), haar_unitary(dim_b, rng)


def _random_unit_vector(n: int, rng: np.random.Generator) -> np.ndarray:
    v = _complex_gaussian(rng, n)
    return v / np.linalg.norm(v)


def random_separable_mixed(dim_a: int, dim_b: int, terms: int, seed=None) -> DensityMatrix:
    check_dims(dim_a, dim_b)
    if terms < 1:
        raise ValueError("terms must be >= 1")
    rng = _rng(seed)
    weights = rng.dirichlet(np.ones(terms))
    m = np.zeros((dim_a * dim_b,) * 2, dtype=complex)
    for w in weights:
        v = np.kron(_random_unit_vector(dim_a, rng), _random_unit_vector(dim_b, rng))
        m += w * np.outer(v, v.conj())
    return make_density(dim_a, dim_b, m)


def random_mixed_state(dim_a: int, dim_b: int, seed=None, rank: int | None = None) -> DensityMatrix:
    """Ginibre-ensemble mixed state; full rank unless ``rank`` is given."""
    check_dims(dim_a, dim_b)
    d = dim_a * dim_b
    g = _complex_gaussian(_rng(seed), (d, rank or d))
    m = g @ g.conj().T
    return make_density(dim_a, dim_b, m / np.trace(m).real)


def bell_state(dim: int = 2) -> PureState:
    """Maximally entangled ``sum_j |jj> / sqrt(dim)``."""
    psi = np.zeros(dim * dim, dtype=complex)
    psi[[j * dim + j for j in range(dim)]] = 1 / np.sqrt(dim)
    return make_pure(dim, dim, psi)


def basis_state(dim_a: int, dim_b: int, i_a: int, i_b: int) -> PureState:
    psi = np.zeros(dim_a * dim_b, dtype=complex)
    psi[i_a * dim_b + i_b] = 1.0
    return make_pure(dim_a, dim_b, psi)
