"""Mutually unbiased bases in prime dimension from the Weyl shift and clock operators.

Basis ``k < N`` is the eigenbasis of ``A D^k``; basis ``k = N`` is the eigenbasis of
``D`` (the computational basis). Column ``j`` of each basis is the eigenvector
with eigenvalue ``omega**j``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg

from .errors import NotPrime

MAX_PRIME = 13
SNAP_TOL = 1e-6


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % p for p in range(2, int(n**0.5) + 1))


def require_prime(n: int, limit: int = MAX_PRIME) -> None:
    if not is_prime(n):
        raise NotPrime(
            f"dimension {n} is not prime; only prime-dimension MUBs are constructed "
            "(prime-power and composite dimensions are not supported)"
        )
    if n > limit:
        raise NotPrime(f"prime dimension {n} exceeds supported maximum {limit}")


@dataclass(frozen=True)
class WeylPair:
    dim: int
    shift: np.ndarray
    clock: np.ndarray

    @property
    def omega(self) -> complex:
        return np.exp(2j * np.pi / self.dim)

    def operator(self, k: int) -> np.ndarray:
        """``O_k = A D^k`` for ``k < N`` and ``D`` for ``k = N``.

        For N = 2 the odd powers pick up a factor ``i`` so the spectrum is {1, -1}
        (``A D`` alone has eigenvalues +-i).
        """
        n = self.dim
        if k == n:
            return self.clock
        op = self.shift @ np.linalg.matrix_power(self.clock, k)
        if n == 2 and k % 2:
            op = 1j * op
        return op


def weyl_pair(n: int) -> WeylPair:
    omega = np.exp(2j * np.pi / n)
    shift = np.roll(np.eye(n, dtype=complex), 1, axis=0)  # A|j> = |j+1 mod n>
    clock = np.diag(omega ** np.arange(n))
    return WeylPair(n, shift, clock)


@dataclass(frozen=True)
class MubFamily:
    dim: int
    bases: tuple  # N+1 arrays, columns are basis vectors ordered by eigenvalue exponent j


def _fix_phases(vecs: np.ndarray) -> np.ndarray:
    out = vecs.copy()
    for c in range(out.shape[1]):
        col = out[:, c]
        idx = int(np.argmax(np.abs(col) > 1e-12))
        out[:, c] = col * (abs(col[idx]) / col[idx])
    return out


def labeled_eigenbasis(op: np.ndarray, n: int) -> np.ndarray:
    """Eigenvectors of a unitary with spectrum equal to the n-th roots of unity, column j <-> omega**j."""
    t, z = scipy.linalg.schur(op, output="complex")
    evals = np.diag(t)
    step = 2 * np.pi / n
    labels = np.mod(np.rint(np.angle(evals) / step).astype(int), n)
    snapped = np.exp(1j * step * labels)
    worst = float(np.max(np.abs(evals - snapped)))
    if worst > SNAP_TOL or len(set(labels.tolist())) != n:
        raise ArithmeticError(f"spectrum is not the set of {n}-th roots of unity (snap error {worst:.2e})")
    basis = np.empty_like(z)
    basis[:, labels] = z
    return _fix_phases(basis)


@lru_cache(maxsize=None)
def build_mub(n: int) -> MubFamily:
    require_prime(n)
    w = weyl_pair(n)
    bases = tuple(labeled_eigenbasis(w.operator(k), n) for k in range(n + 1))
    for b in bases:
        b.setflags(write=False)
    return MubFamily(n, bases)


def certify_unbiasedness(family: MubFamily) -> dict:
    n = family.dim
    gram_dev = 0.0
    cross_dev = 0.0
    for k, bk in enumerate(family.bases):
        gram_dev = max(gram_dev, float(np.max(np.abs(bk.conj().T @ bk - np.eye(n)))))
        for bl in family.bases[k + 1:]:
            overlaps = np.abs(bk.conj().T @ bl) ** 2
            cross_dev = max(cross_dev, float(np.max(np.abs(overlaps - 1.0 / n))))
    return {
        "dim": n,
        "bases": len(family.bases),
        "max_cross_deviation": cross_dev,
        "max_gram_deviation": gram_dev,
        "passed": cross_dev < 1e-9 and gram_dev < 1e-10,
    }


def mub_projectors(family: MubFamily) -> np.ndarray:
    """Projector table indexed ``[k, j]`` -> ``|phi_jk><phi_jk|``."""
    b = np.array(family.bases)  # (k, component, j)
    return np.einsum("kaj,kbj->kjab", b, b.conj())
