"""Orthonormal su(N) generator sets with Tr(l_k) = 0 and Tr(l_k l_l) = delta_kl.

Each set carries a grouping of its generators into commuting families together
with a common eigenbasis per family; measurement planning uses these.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DimensionOutOfRange, MissingMubFamily, UngroupableSet
from .mub import MubFamily, build_mub, mub_projectors, require_prime
from .states import MAX_DIM

GELL_MANN = "GellMann"
MUB_BASED = "MubBased"
CUSTOM = "Custom"


@dataclass(frozen=True)
class GeneratorSet:
    dim: int
    ops: tuple
    provenance: str = CUSTOM
    grouping: tuple = ()
    group_bases: tuple = ()

    def __len__(self):
        return len(self.ops)

    def stacked(self) -> np.ndarray:
        return np.array(self.ops)


def _freeze(ops):
    for op in ops:
        op.setflags(write=False)
    return tuple(ops)


def gell_mann_matrices(n: int) -> list[np.ndarray]:
    """Symmetric and antisymmetric pairs in (j, k) order, then the diagonal family."""
    ops = []
    s = 1 / np.sqrt(2)
    for j in range(n):
        for k in range(j + 1, n):
            sym = np.zeros((n, n), dtype=complex)
            sym[j, k] = sym[k, j] = s
            asym = np.zeros((n, n), dtype=complex)
            asym[j, k] = -1j * s
            asym[k, j] = 1j * s
            ops += [sym, asym]
    for l in range(1, n):
        diag = np.zeros(n)
        diag[:l] = 1.0
        diag[l] = -l
        ops.append(np.diag(diag / np.sqrt(l * (l + 1))).astype(complex))
    return ops


def _commutes(a, b, tol=1e-10) -> bool:
    return float(np.max(np.abs(a @ b - b @ a))) < tol


def common_eigenbasis(ops) -> np.ndarray:
    """Orthonormal basis diagonalizing every operator of a commuting family."""
    n = ops[0].shape[0]
    # generic fixed weights: joint eigenspaces of the family are the eigenspaces of the combination
    weights = np.random.default_rng(20061).uniform(1.0, 2.0, len(ops))
    combo = sum(w * op for w, op in zip(weights, ops))
    _, vecs = np.linalg.eigh(combo)
    for op in ops:
        m = vecs.conj().T @ op @ vecs
        if np.max(np.abs(m - np.diag(np.diag(m)))) > 1e-10:
            raise UngroupableSet("family has no common eigenbasis within 1e-10")
    return vecs


def group_commuting(ops, seed_groups=()) -> list[list[int]]:
    """First-fit grouping by pairwise commutation, starting from ``seed_groups``."""
    groups = [list(g) for g in seed_groups]
    placed = {i for g in groups for i in g}
    for i, op in enumerate(ops):
        if i in placed:
            continue
        for g in groups:
            if all(_commutes(op, ops[m]) for m in g):
                g.append(i)
                break
        else:
            groups.append([i])
    return groups


@lru_cache(maxsize=None)
def gell_mann_set(n: int) -> GeneratorSet:
    if not 2 <= n <= MAX_DIM:
        raise DimensionOutOfRange(f"dimension {n} outside [2, {MAX_DIM}]")
    ops = gell_mann_matrices(n)
    diagonal = list(range(n * (n - 1), n * n - 1))
    groups = group_commuting(ops, seed_groups=[diagonal])
    bases = []
    for g in groups:
        if g == diagonal:
            bases.append(np.eye(n, dtype=complex))
        else:
            bases.append(common_eigenbasis([ops[i] for i in g]))
    return GeneratorSet(n, _freeze(ops), GELL_MANN,
                        tuple(tuple(g) for g in groups), _freeze(bases))


def mub_generator_set(n: int, family: MubFamily | None = None) -> GeneratorSet:
    """Generators built from MUB projectors; one commuting group per basis.

    For odd prime ``n = 2m + 1`` and each basis ``k`` the operators are
    ``sqrt(2/n) * sum_j cos(2 pi l j / n) P_jk`` and the matching sine sum,
    for ``l = 1..m``. For ``n = 2`` each basis contributes ``(P_0k - P_1k) / sqrt(2)``,
    the scaled Pauli matrices.
    """
    require_prime(n)
    if family is None:
        family = build_mub(n)
    elif family.dim != n:
        raise MissingMubFamily(f"MUB family has dimension {family.dim}, need {n}")
    proj = mub_projectors(family)
    ops, groups = [], []
    j = np.arange(n)
    for k in range(n + 1):
        start = len(ops)
        if n == 2:
            ops.append((proj[k, 0] - proj[k, 1]) / np.sqrt(2))
        else:
            for l in range(1, (n - 1) // 2 + 1):
                cos_w = np.sqrt(2 / n) * np.cos(2 * np.pi * l * j / n)
                sin_w = np.sqrt(2 / n) * np.sin(2 * np.pi * l * j / n)
                ops.append(np.einsum("j,jab->ab", cos_w, proj[k]))
                ops.append(np.einsum("j,jab->ab", sin_w, proj[k]))
        groups.append(tuple(range(start, len(ops))))
    return GeneratorSet(n, _freeze(ops), MUB_BASED, tuple(groups),
                        tuple(np.array(b) for b in family.bases))


def validate_generator_set(gset: GeneratorSet, tol: float = 1e-9) -> dict:
    ops = np.array(gset.ops)
    n = gset.dim
    traces = np.einsum("kii->k", ops)
    gram = np.einsum("kij,lji->kl", ops, ops)
    herm = float(np.max(np.abs(ops - ops.conj().transpose(0, 2, 1)))) if len(ops) else 0.0
    trace_dev = float(np.max(np.abs(traces))) if len(ops) else 0.0
    ortho_dev = float(np.max(np.abs(gram - np.eye(len(ops))))) if len(ops) else 0.0
    count_ok = len(ops) == n * n - 1
    return {
        "dim": n,
        "provenance": gset.provenance,
        "count": len(ops),
        "count_ok": count_ok,
        "max_hermiticity_deviation": herm,
        "max_trace_deviation": trace_dev,
        "max_orthonormality_deviation": ortho_dev,
        "passed": count_ok and max(herm, trace_dev, ortho_dev) < tol,
    }


def rescaled(gset: GeneratorSet, factor: float) -> GeneratorSet:
    """Explicit rescale, e.g. ``factor=sqrt(2)`` for the Tr(l_k l_l) = 2 delta_kl convention."""
    return GeneratorSet(gset.dim, tuple(factor * op for op in gset.ops),
                        CUSTOM, gset.grouping, gset.group_bases)


def generator_set(name: str, n: int) -> GeneratorSet:
    if name in ("gellmann", GELL_MANN):
        return gell_mann_set(n)
    if name in ("mub", MUB_BASED):
        return mub_generator_set(n)
    raise ValueError(f"unknown generator set {name!r}; expected 'gellmann' or 'mub'")
