"""The covariance entanglement measure G and its companions.

G is computed along independent routes that must agree:

* ``g_covariance``: sum of squared covariances of local generator pairs;
* ``g_hilbert_schmidt``: ``Tr[(rho - rho_A (x) rho_B)^2]``;
* ``g_pure_schmidt``: closed form in the Schmidt probabilities of a pure state;
* ``g_from_invariants``: ``C_I^4 + C_I^2 - 6 C_3`` (pure states only).
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from itertools import chain, combinations

import numpy as np

from .errors import AlphaOutOfRange, CoventaError, DimensionMismatch, SimplexViolation
from .generators import GeneratorSet, validate_generator_set
from .states import (
    DensityMatrix,
    PureState,
    SchmidtSpectrum,
    as_density,
    make_density,
    partial_trace,
    require_hermitian,
    schmidt_decompose,
)

COVARIANCE_SUM = "CovarianceSum"
HILBERT_SCHMIDT = "HilbertSchmidt"
PURE_SCHMIDT = "PureSchmidt"
FROM_INVARIANTS = "FromInvariants"

ENTANGLED = "Entangled"
INCONCLUSIVE = "Inconclusive"
THRESHOLD = 0.25
ISOTROPIC_THRESHOLD = 3 / (4 * np.sqrt(2))


class PureSemanticsWarning(UserWarning):
    """A pure-state formula was evaluated on a mixed state."""


@dataclass(frozen=True)
class MeasureResult:
    g: float
    route: str
    context: dict = field(default_factory=dict)

    def __float__(self):
        return self.g


@dataclass(frozen=True)
class InvariantReport:
    c_i_squared: float
    c_3: float
    g_predicted: float


@dataclass(frozen=True)
class CorrelatedMixture:
    probabilities: np.ndarray
    dim_a: int
    dim_b: int | None = None

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=float)
        object.__setattr__(self, "probabilities", p)
        if self.dim_b is None:
            object.__setattr__(self, "dim_b", self.dim_a)
        _require_simplex(p)
        if p.size > min(self.dim_a, self.dim_b):
            raise SimplexViolation(f"{p.size} weights exceed local dimension {min(self.dim_a, self.dim_b)}")


def _require_simplex(p: np.ndarray, tol: float = 1e-10) -> None:
    if p.ndim != 1 or p.size == 0 or p.min() < -tol or abs(p.sum() - 1.0) > tol:
        raise SimplexViolation(f"weights {p} are not a probability vector within {tol:g}")


def max_g(dim_a: int, dim_b: int) -> float:
    n = min(dim_a, dim_b)
    return 1.0 - 1.0 / n**2


def covariance(rho: DensityMatrix, op_a, op_b) -> float:
    op_a = np.asarray(op_a, dtype=complex)
    op_b = np.asarray(op_b, dtype=complex)
    if op_a.shape != (rho.dim_a,) * 2 or op_b.shape != (rho.dim_b,) * 2:
        raise DimensionMismatch(
            f"operators {op_a.shape}, {op_b.shape} do not match local dims {rho.dim_a}x{rho.dim_b}"
        )
    require_hermitian(op_a, "A-side operator")
    require_hermitian(op_b, "B-side operator")
    joint = np.trace(rho.matrix @ np.kron(op_a, op_b)).real
    mean_a = np.trace(partial_trace(rho, "B") @ op_a).real
    mean_b = np.trace(partial_trace(rho, "A") @ op_b).real
    return float(joint - mean_a * mean_b)


def covariance_matrix(rho: DensityMatrix, set_a: GeneratorSet, set_b: GeneratorSet) -> np.ndarray:
    """``C[k, l] = <l_k (x) m_l> - <l_k><m_l>`` for all generator pairs."""
    if set_a.dim != rho.dim_a or set_b.dim != rho.dim_b:
        raise DimensionMismatch(
            f"generator dims {set_a.dim}x{set_b.dim} do not match state dims {rho.dim_a}x{rho.dim_b}"
        )
    for s in (set_a, set_b):
        rep = validate_generator_set(s)
        if not rep["passed"]:
            raise CoventaError(f"generator set failed validation: {rep}")
    ops_a, ops_b = set_a.stacked(), set_b.stacked()
    t = rho.matrix.reshape(rho.dim_a, rho.dim_b, rho.dim_a, rho.dim_b)
    joint = np.einsum("ikjm,pji,qmk->pq", t, ops_a, ops_b).real
    mean_a = np.einsum("ij,pji->p", partial_trace(rho, "B"), ops_a).real
    mean_b = np.einsum("ij,pji->p", partial_trace(rho, "A"), ops_b).real
    return joint - np.outer(mean_a, mean_b)


def g_covariance(rho, set_a: GeneratorSet, set_b: GeneratorSet) -> MeasureResult:
    rho = as_density(rho)
    c = covariance_matrix(rho, set_a, set_b)
    return MeasureResult(float(np.sum(c**2)), COVARIANCE_SUM,
                         {"dims": (rho.dim_a, rho.dim_b),
                          "generators": (set_a.provenance, set_b.provenance)})


def correlation_operator(rho: DensityMatrix) -> np.ndarray:
    return rho.matrix - np.kron(partial_trace(rho, "B"), partial_trace(rho, "A"))


def g_hilbert_schmidt(rho) -> MeasureResult:
    rho = as_density(rho)
    diff = correlation_operator(rho)
    # Hermitian, so Tr(D^2) is the squared Frobenius norm
    return MeasureResult(float(np.sum(np.abs(diff) ** 2)), HILBERT_SCHMIDT,
                         {"dims": (rho.dim_a, rho.dim_b)})


def _spectrum(s) -> np.ndarray:
    if isinstance(s, SchmidtSpectrum):
        return s.probabilities
    p = np.asarray(s, dtype=float)
    _require_simplex(p)
    return p


def _pair_sum(x: np.ndarray) -> float:
    """sum_{i<j} x_i x_j"""
    return float((x.sum() ** 2 - np.sum(x**2)) / 2)


def g_pure_schmidt(spectrum) -> MeasureResult:
    a = _spectrum(spectrum)
    g = (np.sum(a**4) + 2 * _pair_sum(a**2) - 2 * np.sum(a**3)
         + np.sum(a**2) + 2 * _pair_sum(a))
    return MeasureResult(float(g), PURE_SCHMIDT, {"schmidt_rank": int(np.sum(a > 1e-14))})


def i_concurrence_squared(state) -> float:
    """``1 - Tr(rho_A^2)``; for mixed input this is not the convex-roof quantity and a warning is raised."""
    if isinstance(state, SchmidtSpectrum):
        return 2 * _pair_sum(state.probabilities)
    rho = as_density(state)
    rho_a = partial_trace(rho, "B")
    purity_total = float(np.sum(np.abs(rho.matrix) ** 2))
    if not isinstance(state, PureState) and purity_total < 1 - 1e-10:
        warnings.warn("I-concurrence of a mixed state: pure-state semantics only", PureSemanticsWarning,
                      stacklevel=2)
    return float(1.0 - np.sum(np.abs(rho_a) ** 2))


def three_concurrence(spectrum) -> float:
    """Third elementary symmetric polynomial ``sum_{i<j<k} a_i a_j a_k`` (Newton's identity)."""
    a = _spectrum(spectrum)
    p1, p2, p3 = a.sum(), np.sum(a**2), np.sum(a**3)
    return float(max((p1**3 - 3 * p1 * p2 + 2 * p3) / 6, 0.0))


def invariants(psi: PureState) -> InvariantReport:
    spec = schmidt_decompose(psi)
    c2 = i_concurrence_squared(spec)
    c3 = three_concurrence(spec)
    return InvariantReport(c2, c3, g_from_invariants(c2, c3).g)


def g_from_invariants(c_i_squared: float, c_3: float) -> MeasureResult:
    if not -1e-12 <= c_i_squared <= 1 + 1e-12 or c_3 < -1e-12:
        raise ValueError(f"invariants out of range: C_I^2 = {c_i_squared}, C_3 = {c_3}")
    return MeasureResult(c_i_squared**2 + c_i_squared - 6 * c_3, FROM_INVARIANTS)


def separability_verdict(g) -> str:
    """Entangled when G > 1/4; otherwise Inconclusive (the criterion is one-sided)."""
    g = float(g)
    if g < -1e-12:
        raise ValueError(f"G must be nonnegative, got {g}")
    return ENTANGLED if g > THRESHOLD + 1e-12 else INCONCLUSIVE


def isotropic_state(alpha: float) -> DensityMatrix:
    if not -1 / 8 - 1e-12 <= alpha <= 1 + 1e-12:
        raise AlphaOutOfRange(f"alpha = {alpha} outside [-1/8, 1]")
    ghz = np.zeros(9)
    ghz[[0, 4, 8]] = 1.0
    m = (1 - alpha) / 9 * np.eye(9) + alpha / 3 * np.outer(ghz, ghz)
    return make_density(3, 3, m)


def isotropic_g(alpha: float) -> float:
    if not -1 / 8 - 1e-12 <= alpha <= 1 + 1e-12:
        raise AlphaOutOfRange(f"alpha = {alpha} outside [-1/8, 1]")
    return 8 * alpha**2 / 9


def correlated_state(mix: CorrelatedMixture) -> DensityMatrix:
    d = mix.dim_a * mix.dim_b
    diag = np.zeros(d)
    for j, p in enumerate(mix.probabilities):
        diag[j * mix.dim_b + j] = p
    return make_density(mix.dim_a, mix.dim_b, np.diag(diag))


def correlated_mixture_g(mix: CorrelatedMixture) -> float:
    return g_hilbert_schmidt(correlated_state(mix)).g


def _correlated_objective(p: np.ndarray) -> np.ndarray:
    # G of sum_j p_j |jj><jj| in closed form: S2 - 2 S3 + S2^2 (vectorized over rows)
    s2 = np.sum(p**2, axis=-1)
    return s2 - 2 * np.sum(p**3, axis=-1) + s2**2


def _project_simplex(v: np.ndarray) -> np.ndarray:
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1
    rho = np.nonzero(u - css / np.arange(1, v.size + 1) > 0)[0][-1]
    return np.maximum(v - css[rho] / (rho + 1), 0.0)


def _simplex_grid(n: int, resolution: int) -> np.ndarray:
    """All points of the simplex with coordinates in multiples of 1/resolution (stars and bars)."""
    bars = np.fromiter(chain.from_iterable(combinations(range(resolution + n - 1), n - 1)),
                       dtype=np.int32).reshape(-1, n - 1)
    edges = np.hstack([np.full((bars.shape[0], 1), -1), bars,
                       np.full((bars.shape[0], 1), resolution + n - 1)])
    return (np.diff(edges, axis=1) - 1) / resolution


def _ascend(p: np.ndarray, step: float = 0.1, iters: int = 5000, tol: float = 1e-15) -> np.ndarray:
    for _ in range(iters):
        s2 = np.sum(p**2)
        grad = 2 * p - 6 * p**2 + 4 * s2 * p
        nxt = _project_simplex(p + step * grad)
        if np.max(np.abs(nxt - p)) < tol:
            return nxt
        p = nxt
    return p


def maximize_correlated_g(n: int, starts: int = 64, seed: int = 0,
                          grid_resolution: int = 200) -> tuple[CorrelatedMixture, float]:
    """Maximize G over maximally correlated separable states ``sum_j p_j |jj><jj|``.

    Exhaustive grid for ``n <= 4`` plus multi-start projected gradient ascent.
    The returned value is re-evaluated through ``g_hilbert_schmidt``.
    """
    if not 2 <= n <= 8:
        raise ValueError(f"n = {n} outside [2, 8]")
    candidates = []
    if n <= 4:
        grid = _simplex_grid(n, grid_resolution)
        candidates.append(grid[int(np.argmax(_correlated_objective(grid)))])
    rng = np.random.default_rng(seed)
    for _ in range(starts):
        candidates.append(_ascend(rng.dirichlet(np.ones(n))))
    values = [_correlated_objective(c) for c in candidates]
    best = candidates[int(np.argmax(values))]
    best = best / best.sum()
    mix = CorrelatedMixture(best, n)
    return mix, correlated_mixture_g(mix)


def measure_report(state, set_a: GeneratorSet, set_b: GeneratorSet) -> list[dict]:
    """Rows (route, G, C_I^2, C_3, verdict) for every applicable route."""
    rho = as_density(state)
    c2 = c3 = None
    results = [g_covariance(rho, set_a, set_b), g_hilbert_schmidt(rho)]
    if isinstance(state, PureState):
        spec = schmidt_decompose(state)
        c2, c3 = i_concurrence_squared(spec), three_concurrence(spec)
        results += [g_pure_schmidt(spec), g_from_invariants(c2, c3)]
    return [{"route": r.route, "G": r.g, "C_I2": c2, "C_3": c3,
             "verdict": separability_verdict(max(r.g, 0.0))} for r in results]
