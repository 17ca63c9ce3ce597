"""Dense matrix kernels used by the factorization pipeline.

Everything here operates on plain ``numpy`` arrays at desk scale (state
dimensions of a few dozen at most).  Rank decisions are always relative to
the largest singular value; magnitudes in typical models span several orders
of magnitude, so absolute thresholds are avoided throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import schur

from .errors import (
    AmbiguousEigenspace,
    ComplexPairSplit,
    NotPositiveDefinite,
    RankDeficientBasis,
    SingularSteinOperator,
)

__all__ = [
    "ToleranceConfig",
    "DEFAULT_TOL",
    "solve_stein",
    "sym_sqrt",
    "pseudo_inverse",
    "orth_projector",
    "orth_basis",
    "basis_from_projector",
    "EigenBlock",
    "eigen_blocks",
    "invariant_basis",
    "selection_basis",
    "is_invariant",
]


@dataclass(frozen=True)
class ToleranceConfig:
    """Numerical knobs shared by the whole pipeline.

    Attributes
    ----------
    rank_rel_tol : float
        Relative threshold (against the largest singular value) below which
        singular values are treated as zero.
    residual_tol : float
        Acceptance threshold for equation residuals and sampled identities.
    circle_samples : int
        Number of unit-circle sample points used by sampled checks.
    """

    rank_rel_tol: float = 1e-9
    residual_tol: float = 1e-8
    circle_samples: int = 512

    def __post_init__(self):
        if not (self.rank_rel_tol > 0 and self.residual_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.circle_samples < 8:
            raise ValueError("circle_samples must be at least 8")


DEFAULT_TOL = ToleranceConfig()


def _as_matrix(x, name="matrix"):
    m = np.atleast_2d(np.asarray(x, dtype=float))
    if m.ndim != 2:
        raise ValueError(f"{name} must be two-dimensional, got shape {m.shape}")
    if m.size and not np.all(np.isfinite(m)):
        raise ValueError(f"{name} contains non-finite entries")
    return m


def _require_square(m, name="matrix"):
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be square, got shape {m.shape}")


def solve_stein(m, q, config: ToleranceConfig = DEFAULT_TOL):
    """Solve the Stein equation  M^T X M - X = Q  for symmetric X.

    The equation is linearized over the stacked columns of X and solved
    densely; at desk scale this is exact up to rounding and avoids any
    Schur-form bookkeeping.  A unique solution exists iff no eigenvalue pair
    of M has product one.

    Parameters
    ----------
    m : (n, n) array_like
    q : (n, n) array_like, symmetric

    Returns
    -------
    (n, n) ndarray, symmetric

    Raises
    ------
    SingularSteinOperator
        If the linearized operator is rank deficient under the relative rank
        tolerance.
    """
    m = _as_matrix(m, "M")
    q = _as_matrix(q, "Q")
    _require_square(m, "M")
    _require_square(q, "Q")
    if m.shape != q.shape:
        raise ValueError("M and Q must have the same shape")
    n = m.shape[0]
    if n == 0:
        return np.zeros((0, 0))

    # vec(M^T X M) = kron(M^T, M^T) vec(X) with column-major stacking.
    op = np.kron(m.T, m.T) - np.eye(n * n)
    u, s, vt = np.linalg.svd(op)
    if s[0] == 0.0 or s[-1] <= config.rank_rel_tol * s[0]:
        raise SingularSteinOperator(
            "Stein operator is singular: an eigenvalue pair of M has product one"
        )

    def solve(rhs):
        return (vt.T @ ((u.T @ rhs.flatten(order="F")) / s)).reshape(
            (n, n), order="F")

    x = solve(q)
    # One step of iterative refinement keeps the residual at rounding level
    # even when the operator is moderately ill conditioned.
    x = x + solve(q - (m.T @ x @ m - x))
    return 0.5 * (x + x.T)


def sym_sqrt(s, config: ToleranceConfig = DEFAULT_TOL):
    """Principal square root of a symmetric positive-definite matrix.

    Computed through the symmetric eigendecomposition so the result is
    symmetric positive definite by construction.

    Raises
    ------
    NotPositiveDefinite
        If the smallest eigenvalue does not clear the relative rank
        tolerance.
    """
    s = _as_matrix(s, "S")
    _require_square(s, "S")
    if s.shape[0] == 0:
        return np.zeros((0, 0))
    s = 0.5 * (s + s.T)
    w, v = np.linalg.eigh(s)
    scale = max(abs(w[0]), abs(w[-1]))
    if w[0] <= config.rank_rel_tol * scale or scale == 0.0:
        raise NotPositiveDefinite(
            f"matrix is not positive definite (min eigenvalue {w[0]:.3e})"
        )
    r = (v * np.sqrt(w)) @ v.T
    return 0.5 * (r + r.T)


def pseudo_inverse(s, config: ToleranceConfig = DEFAULT_TOL):
    """Moore-Penrose pseudo-inverse with relative rank truncation.

    Symmetric input goes through the symmetric eigendecomposition, which
    guarantees a symmetric result; anything else falls back to the SVD.
    """
    s = _as_matrix(s, "S")
    if s.size == 0:
        return np.zeros(s.shape[::-1])
    scale = np.linalg.norm(s)
    if scale == 0.0:
        return np.zeros(s.shape[::-1])
    if s.shape[0] == s.shape[1] and np.linalg.norm(s - s.T) <= 1e-13 * scale:
        w, v = np.linalg.eigh(0.5 * (s + s.T))
        cutoff = config.rank_rel_tol * np.max(np.abs(w))
        inv_w = np.where(np.abs(w) > cutoff, 1.0 / np.where(w == 0, 1.0, w), 0.0)
        p = (v * inv_w) @ v.T
        return 0.5 * (p + p.T)
    return np.linalg.pinv(s, rcond=config.rank_rel_tol)


def orth_basis(v, config: ToleranceConfig = DEFAULT_TOL):
    """Orthonormal basis of the column space of a full-column-rank matrix.

    Raises
    ------
    RankDeficientBasis
        If ``v`` has fewer numerically independent columns than its width.
    """
    v = _as_matrix(v, "V")
    if v.shape[1] == 0:
        return np.zeros((v.shape[0], 0))
    u, s, _ = np.linalg.svd(v, full_matrices=False)
    if s[0] == 0.0 or s[-1] <= config.rank_rel_tol * s[0]:
        raise RankDeficientBasis(
            f"basis matrix has rank below its column count {v.shape[1]}"
        )
    return u


def orth_projector(v, config: ToleranceConfig = DEFAULT_TOL):
    """Orthogonal projector onto the column space of ``v``.

    The result is symmetric and idempotent and depends only on the column
    space, not the particular basis.
    """
    q = orth_basis(v, config)
    if q.shape[1] == 0:
        return np.zeros((q.shape[0], q.shape[0]))
    pi = q @ q.T
    return 0.5 * (pi + pi.T)


def basis_from_projector(pi, config: ToleranceConfig = DEFAULT_TOL):
    """Orthonormal basis of the range of an orthogonal projector.

    Uses greedy column pivoting with modified Gram-Schmidt so that a
    coordinate-aligned projector yields coordinate basis vectors exactly
    (no sign or rotation surprises from a factorization routine).
    """
    pi = _as_matrix(pi, "Pi")
    _require_square(pi, "Pi")
    n = pi.shape[0]
    rank = int(round(float(np.trace(pi)))) if n else 0
    if rank <= 0:
        return np.zeros((n, 0))
    cols = pi.copy()
    basis = []
    for _ in range(rank):
        norms = np.linalg.norm(cols, axis=0)
        j = int(np.argmax(norms))
        if norms[j] <= config.rank_rel_tol:
            break
        q = cols[:, j] / norms[j]
        basis.append(q)
        cols -= np.outer(q, q @ cols)
    if len(basis) != rank:
        raise RankDeficientBasis(
            "projector trace and numerical range dimension disagree"
        )
    return np.column_stack(basis)


@dataclass(frozen=True)
class EigenBlock:
    """One block of the real spectral structure of a square matrix.

    ``kind`` is ``"real"`` for a simple real eigenvalue, ``"pair"`` for a
    simple complex-conjugate pair, or ``"repeated"`` for an eigenvalue
    cluster of multiplicity >= 2.  ``indices`` are the positions occupied in
    the canonically ordered eigenvalue list.  ``basis`` is a real orthonormal
    basis of the block's invariant subspace (``None`` for defective
    clusters, which fall outside the supported class).
    """

    kind: str
    eigenvalues: tuple
    indices: tuple
    basis: np.ndarray | None

    @property
    def dim(self) -> int:
        return len(self.indices)


def _schur_block_basis(m, cluster, cluster_tol):
    """Real orthonormal basis of the invariant subspace of an eigenvalue
    cluster, via the ordered real Schur form (backward stable; invariance
    residual at rounding level even for non-normal matrices)."""
    targets = np.asarray(cluster, dtype=complex)

    def sel(re, im):
        lam = np.asarray(re) + 1j * np.asarray(im)
        hit = np.zeros(np.shape(lam), dtype=bool)
        for t in targets:
            hit |= np.abs(lam - t) <= cluster_tol
        return hit

    try:
        _, z, sdim = schur(m, output="real", sort=sel)
    except np.linalg.LinAlgError:
        return None
    if sdim != len(cluster):
        return None
    basis = z[:, :sdim].copy()
    # Deterministic sign: largest-magnitude entry of each vector positive.
    for j in range(basis.shape[1]):
        k = int(np.argmax(np.abs(basis[:, j])))
        if basis[k, j] < 0:
            basis[:, j] = -basis[:, j]
    return basis


def _geometric_multiplicity(m, lam, config):
    """Kernel dimension of m - lam*I (or of the real quadratic factor of a
    conjugate pair); detects defective clusters."""
    n = m.shape[0]
    if abs(lam.imag) > 0:
        poly = m @ m - 2.0 * lam.real * m + (abs(lam) ** 2) * np.eye(n)
    else:
        poly = m - lam.real * np.eye(n)
    s = np.linalg.svd(poly, compute_uv=False)
    tol = max(s[0], 1.0) * max(config.rank_rel_tol, 1e-10)
    return int(np.sum(s <= tol))


def eigen_blocks(m, config: ToleranceConfig = DEFAULT_TOL):
    """Cluster the spectrum of ``m`` into real/pair/repeated blocks.

    Eigenvalues are sorted by (real part, imaginary part) and clustered at a
    scale-relative gap; conjugate pairs are kept atomic.  The returned blocks
    carry orthonormal invariant-subspace bases for semisimple clusters.
    """
    m = _as_matrix(m, "M")
    _require_square(m, "M")
    n = m.shape[0]
    if n == 0:
        return []
    eigs = np.linalg.eigvals(m)
    scale = max(1.0, float(np.max(np.abs(eigs))))
    cluster_tol = 1e-7 * scale

    order = np.lexsort((eigs.imag, eigs.real))
    eigs = eigs[order]

    # Union-find style clustering on pairwise distance.
    labels = -np.ones(n, dtype=int)
    nlab = 0
    for i in range(n):
        if labels[i] >= 0:
            continue
        labels[i] = nlab
        for j in range(i + 1, n):
            if labels[j] < 0 and (
                abs(eigs[j] - eigs[i]) <= cluster_tol
                or abs(eigs[j] - eigs[i].conjugate()) <= cluster_tol
            ):
                labels[j] = nlab
        nlab += 1
    # Merge conjugate clusters that were split by the scan above.
    for a in range(nlab):
        ia = labels == a
        for b in range(a + 1, nlab):
            ib = labels == b
            if np.min(np.abs(eigs[ia][:, None] - eigs[ib][None, :].conj())) <= cluster_tol:
                labels[ib] = a

    blocks = []
    pos = 0
    for lab in sorted(set(labels), key=lambda l: (eigs[labels == l].real.min(),
                                                  abs(eigs[labels == l].imag).min())):
        vals = eigs[labels == lab]
        rep = vals[np.argmax(vals.imag >= 0)] if np.any(vals.imag >= 0) else vals[0]
        is_pair = np.max(np.abs(vals.imag)) > cluster_tol
        if is_pair:
            kind = "pair" if len(vals) == 2 else "repeated"
        else:
            vals = vals.real + 0j
            kind = "real" if len(vals) == 1 else "repeated"
        basis = _schur_block_basis(m, vals, cluster_tol)
        if (basis is not None and kind == "repeated"
                and _geometric_multiplicity(m, rep, config) != len(vals)):
            basis = None  # defective cluster: geometric < algebraic multiplicity
        idx = tuple(range(pos, pos + len(vals)))
        pos += len(vals)
        blocks.append(EigenBlock(kind=kind,
                                 eigenvalues=tuple(complex(v) for v in vals),
                                 indices=idx,
                                 basis=basis))
    return blocks


def selection_basis(m, selection, config: ToleranceConfig = DEFAULT_TOL,
                    allow_full_repeated: bool = False):
    """Basis of the invariant subspace picked by eigenvalue indices.

    ``selection`` indexes the canonically ordered spectrum of ``m``.  Complex
    pairs must be selected atomically; repeated eigenvalues are accepted only
    when ``allow_full_repeated`` is set and the whole cluster is selected
    (the full eigenspace is the only unambiguous choice).
    """
    m = _as_matrix(m, "M")
    _require_square(m, "M")
    n = m.shape[0]
    sel = sorted(set(int(i) for i in selection))
    if any(i < 0 or i >= n for i in sel):
        raise ValueError(f"selection indices must lie in [0, {n})")
    if not sel:
        return np.zeros((n, 0))
    blocks = eigen_blocks(m, config)
    chosen = []
    for blk in blocks:
        hit = [i for i in blk.indices if i in sel]
        if not hit:
            continue
        if len(hit) < blk.dim:
            if blk.kind == "pair":
                raise ComplexPairSplit(
                    "complex-conjugate pairs must be selected atomically"
                )
            raise AmbiguousEigenspace(
                f"eigenvalue {blk.eigenvalues[0]} has multiplicity {blk.dim}; "
                "supply an explicit basis"
            )
        if blk.kind == "repeated" and not allow_full_repeated:
            raise AmbiguousEigenspace(
                f"eigenvalue {blk.eigenvalues[0]} has multiplicity {blk.dim}; "
                "supply an explicit basis"
            )
        if blk.basis is None:
            raise AmbiguousEigenspace(
                f"eigenvalue cluster at {blk.eigenvalues[0]} is defective"
            )
        chosen.append(blk.basis)
    v = np.hstack(chosen) if chosen else np.zeros((n, 0))
    return orth_basis(v, config) if v.shape[1] else v


def invariant_basis(m, selection, config: ToleranceConfig = DEFAULT_TOL):
    """Real basis of the invariant subspace spanned by selected eigenvalues.

    Selection indexes the canonically ordered spectrum (ascending real part,
    then imaginary part).  Repeated eigenvalues are rejected: their invariant
    subspaces form a continuum and must be supplied as explicit bases.

    Raises
    ------
    AmbiguousEigenspace
        If a selected eigenvalue has multiplicity greater than one.
    ComplexPairSplit
        If the selection cuts a complex-conjugate pair.
    """
    return selection_basis(m, selection, config, allow_full_repeated=False)


def is_invariant(m, v, tol=None, config: ToleranceConfig = DEFAULT_TOL):
    """True iff the column space of ``v`` is invariant under ``m``.

    Checks ``||M V - V (V^+ M V)|| <= tol * max(1, ||M||)``.
    """
    m = _as_matrix(m, "M")
    v = _as_matrix(v, "V")
    if tol is None:
        tol = config.residual_tol
    if v.shape[1] == 0:
        return True
    if v.shape[0] != m.shape[0]:
        raise ValueError("V rows must match M")
    u, s, _ = np.linalg.svd(v, full_matrices=False)
    if s[0] == 0.0 or s[-1] <= config.rank_rel_tol * s[0]:
        raise RankDeficientBasis("V does not have full column rank")
    mv = m @ v
    resid = mv - v @ (pseudo_inverse(v, config) @ mv)
    return bool(np.linalg.norm(resid) <= tol * max(1.0, np.linalg.norm(m)))
