"""Rank decisions, nullspaces and Gram-aware orthonormalization.

All rank cuts go through the same policy: singular values below
max(scale * REL_CUT, ABS_CUT) count as zero, and the decision must be
backed by a spectral gap of at least GAP_RATIO between the smallest
kept and the largest dropped value, otherwise RankAmbiguous is raised.
"""

from __future__ import annotations

import numpy as np

from .errors import RankAmbiguous

REL_CUT = 1e-10
ABS_CUT = 1e-10
GAP_RATIO = 10.0


def rank_split(svals: np.ndarray, scale: float | None = None) -> int:
    """Number of nonzero singular values in a descending array."""
    s = np.asarray(svals, dtype=float)
    if s.size == 0:
        return 0
    if scale is None:
        scale = s[0]
    cut = max(scale * REL_CUT, ABS_CUT)
    kept = int(np.sum(s > cut))
    if 0 < kept < s.size:
        top_dropped = s[kept]
        if top_dropped > 0 and s[kept - 1] / top_dropped < GAP_RATIO:
            raise RankAmbiguous(
                f"no clear gap at rank {kept}: kept {s[kept - 1]:.3e}, "
                f"dropped {top_dropped:.3e}"
            )
    return kept


def nullspace(mat: np.ndarray) -> np.ndarray:
    """Orthonormal basis (columns) of the kernel, by SVD with the shared cut."""
    m = np.asarray(mat, dtype=complex)
    rows, cols = m.shape
    if rows == 0:
        return np.eye(cols, dtype=complex)
    # economy SVD only returns all right-singular vectors when rows >= cols
    full = rows < cols
    _, s, vh = np.linalg.svd(m, full_matrices=full)
    s = np.concatenate([s, np.zeros(cols - s.size)])
    rank = rank_split(s)
    return vh[rank:].conj().T


def gram_onb(vectors: np.ndarray, gram: np.ndarray | None = None, panel: int = 64):
    """Orthonormalize columns against a Gram matrix by blocked Gram-Schmidt.

    Panels of columns are projected against the kept basis in two passes
    (reorthogonalization), then finished sequentially within the panel.
    Returns (Q, kept) where Q has inner-product-orthonormal columns spanning
    the input and kept lists the surviving column indices. Rank drops share
    the gap-ratio guard.
    """
    v = np.asarray(vectors, dtype=complex)
    if v.ndim != 2:
        raise ValueError("expected a matrix of column vectors")
    n, k = v.shape

    def hdot(w):
        return w if gram is None else gram @ w

    q = np.zeros((n, k), dtype=complex)
    qc = np.zeros((n, k), dtype=complex)  # conjugate copy, kept in sync
    r = 0
    kept: list[int] = []
    kept_ratio: list[float] = []
    dropped_ratio: list[float] = []
    scale = 0.0
    for p0 in range(0, k, panel):
        w = v[:, p0 : p0 + panel].copy()
        n0s = np.sqrt(np.abs(np.sum(np.conj(w) * hdot(w), axis=0).real))
        for _ in range(2):
            if r:
                w = w - q[:, :r] @ (qc[:, :r].T @ hdot(w))
        rp = r  # columns kept within this panel start here
        for jj in range(w.shape[1]):
            col = w[:, jj]
            n0 = n0s[jj]
            scale = max(scale, n0)
            if scale == 0.0:
                dropped_ratio.append(0.0)
                continue
            for _ in range(2):
                if r > rp:
                    col = col - q[:, rp:r] @ (qc[:, rp:r].T @ hdot(col))
            nr = np.sqrt(abs(np.conj(col) @ hdot(col)).real)
            ratio = nr / scale
            if nr <= max(scale * REL_CUT, ABS_CUT) or n0 == 0.0:
                dropped_ratio.append(ratio)
                continue
            q[:, r] = col / nr
            qc[:, r] = np.conj(q[:, r])
            r += 1
            kept.append(p0 + jj)
            kept_ratio.append(ratio)
    if kept_ratio and dropped_ratio:
        worst_drop = max(dropped_ratio)
        if worst_drop > 0 and min(kept_ratio) / worst_drop < GAP_RATIO:
            raise RankAmbiguous(
                f"orthonormalization rank unclear: kept ratio {min(kept_ratio):.3e} "
                f"vs dropped {worst_drop:.3e}"
            )
    return q[:, :r].copy(), kept


def onb_transform(gram: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(T, T_inv) with T mapping raw coordinates to orthonormal ones.

    gram = L L^H by Cholesky; T = L^H, so that <x, y>_gram = <Tx, Ty>_std.
    """
    chol = np.linalg.cholesky(np.asarray(gram, dtype=complex))
    t = chol.conj().T
    return t, np.linalg.inv(t)


def frob(m: np.ndarray) -> float:
    return float(np.linalg.norm(np.asarray(m).ravel()))
