"""Circulants, the back-diagonal matrix R, and the two 4x4 block arrays.

Everything here is exact integer arithmetic on int64 numpy arrays. Matrix
indices are the group elements 0..v-1 in natural order.
"""

from __future__ import annotations

import numpy as np

from propus.families import DiffFamily, FamilyError, to_sign_sequence
from propus.residues import ResidueSet, check_modulus, is_skew_set, is_symmetric_set


class NoValidArrangement(FamilyError):
    pass


def circulant(a) -> np.ndarray:
    """``A[x, y] = a[(y - x) mod v]``."""
    a = np.asarray(a, dtype=np.int64)
    v = check_modulus(len(a))
    idx = (np.arange(v)[None, :] - np.arange(v)[:, None]) % v
    return a[idx]


def block_circulant(X: ResidueSet) -> np.ndarray:
    return circulant(to_sign_sequence(X))


def back_diagonal(v: int) -> np.ndarray:
    """Permutation matrix with ``R[x, y] = 1`` iff ``x + y = 0 (mod v)``."""
    check_modulus(v)
    R = np.zeros((v, v), dtype=np.int64)
    x = np.arange(v)
    R[x, (-x) % v] = 1
    return R


def _check_blocks(blocks) -> int:
    if len(blocks) != 4:
        raise ValueError("expected four blocks")
    n = blocks[0].shape[0]
    for A in blocks:
        if A.shape != (n, n):
            raise ValueError("blocks must be square matrices of one order")
    return n


def build_gsa(A1, A2, A3, A4) -> np.ndarray:
    """Goethals-Seidel array of order 4v."""
    v = _check_blocks((A1, A2, A3, A4))
    R = back_diagonal(v)
    return np.block([
        [A1, A2 @ R, A3 @ R, A4 @ R],
        [-A2 @ R, A1, -R @ A4, R @ A3],
        [-A3 @ R, R @ A4, A1, -R @ A2],
        [-A4 @ R, -R @ A3, R @ A2, A1],
    ])


def build_propus(A1, A2, A3, A4) -> np.ndarray:
    """Propus array of order 4v.

    This is the Goethals-Seidel array with its first block column negated and
    block rows 2 and 3 interchanged. It is symmetric as soon as A1 is
    symmetric and A2 == A3, whatever A4 is.
    """
    v = _check_blocks((A1, A2, A3, A4))
    R = back_diagonal(v)
    return np.block([
        [-A1, A2 @ R, A3 @ R, A4 @ R],
        [A3 @ R, R @ A4, A1, -R @ A2],
        [A2 @ R, A1, -R @ A4, R @ A3],
        [A4 @ R, -R @ A3, R @ A2, A1],
    ])


def arrange_for_propus(family: DiffFamily) -> tuple[ResidueSet, ...]:
    """Order the blocks as (symmetric, pair, pair, remaining).

    X1 stays in slot 1 when it is symmetric; otherwise a symmetric X4 is
    swapped into slot 1. Permuting blocks keeps the difference family.
    """
    X1, X2, X3, X4 = family.blocks
    if X2 != X3:
        raise NoValidArrangement("X2 and X3 differ")
    if is_symmetric_set(X1):
        return (X1, X2, X3, X4)
    if is_symmetric_set(X4):
        return (X4, X2, X3, X1)
    raise NoValidArrangement("neither X1 nor X4 is symmetric")


def arrange_for_skew(family: DiffFamily) -> tuple[ResidueSet, ...]:
    """Move a skew block into slot 1 of the Goethals-Seidel array, if any."""
    X1, X2, X3, X4 = family.blocks
    if is_skew_set(X1):
        return (X1, X2, X3, X4)
    if is_skew_set(X4):
        return (X4, X2, X3, X1)
    if is_skew_set(X2):
        return (X2, X1, X4, X3)
    return (X1, X2, X3, X4)


def propus_matrix(family: DiffFamily) -> np.ndarray:
    return build_propus(*(block_circulant(B) for B in arrange_for_propus(family)))


def gsa_matrix(family: DiffFamily, skew_first: bool = True) -> np.ndarray:
    blocks = arrange_for_skew(family) if skew_first else family.blocks
    return build_gsa(*(block_circulant(B) for B in blocks))


def is_hadamard(M) -> bool:
    M = np.asarray(M, dtype=np.int64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        return False
    if not np.all(np.abs(M) == 1):
        return False
    n = M.shape[0]
    return bool(np.array_equal(M @ M.T, n * np.eye(n, dtype=np.int64)))


def is_symmetric_matrix(M) -> bool:
    M = np.asarray(M)
    return M.ndim == 2 and M.shape[0] == M.shape[1] and bool(np.array_equal(M, M.T))


def is_skew_type(M) -> bool:
    M = np.asarray(M, dtype=np.int64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        return False
    n = M.shape[0]
    return bool(np.array_equal(M + M.T, 2 * np.eye(n, dtype=np.int64)))
