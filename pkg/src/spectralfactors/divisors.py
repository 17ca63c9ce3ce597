"""Left all-pass divisors of the conjugate phase function.

Divisors are parametrized by orthogonal projectors onto invariant subspaces
of the block-diagonal state matrix diag(Gamma, A^{-T}).  Because the two
blocks have disjoint spectra (inside vs outside the unit circle), every
invariant subspace splits block-diagonally, so a subspace is specified per
block: either by eigenvalue selection or by an explicit basis.

Given a projector Pi the divisor realization is

    P   = (Pi P0^{-1} Pi)^+
    Dp  = (I + C P C^T)^{1/2}
    Bp  = A P C^T Dp^{-1}
    Tl  = minimal realization of (A, Bp, C, Dp)

normalized so the constant right factor is symmetric positive definite.
Repeated eigenvalues span continua of invariant subspaces; those are never
enumerated silently but surfaced as continuum records for the caller to
sample through explicit bases.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from itertools import combinations

import numpy as np

from .errors import (
    AmbiguousEigenspace,
    CompressionNotPD,
    DegreeAdditivityViolation,
    InvalidSubspace,
    NotInvariant,
    NotPositiveDefinite,
    SpectralFactorsError,
)
from .matnum import (
    DEFAULT_TOL,
    ToleranceConfig,
    basis_from_projector,
    eigen_blocks,
    is_invariant,
    orth_basis,
    orth_projector,
    pseudo_inverse,
    selection_basis,
    sym_sqrt,
)
from .spectral import ConjugatePhase, allpass_residual
from .statespace import Realization, constant, inverse, minimal, series

__all__ = [
    "SubspaceSpec",
    "AllPassDivisor",
    "ContinuumFamily",
    "DivisorEnumeration",
    "projector_from_spec",
    "divisor_from_projector",
    "right_complement",
    "enumerate_divisors",
    "continuum_angle_basis",
]

# Generated divisors are certified all-pass against this sampled threshold;
# it is looser than equation residuals because it accumulates evaluation
# error over the whole circle.
ALLPASS_CERT_TOL = 1e-7


@dataclass(frozen=True)
class SubspaceSpec:
    """Description of an invariant subspace of diag(Gamma, A^{-T}).

    Each block is given either by ``*_select`` (indices into the canonically
    ordered spectrum of that block) or by ``*_basis`` (explicit basis in
    block coordinates), never both.  Empty selections are the default, so
    ``SubspaceSpec()`` describes the zero subspace.
    """

    gamma_select: tuple = ()
    gamma_basis: np.ndarray | None = None
    a_select: tuple = ()
    a_basis: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "gamma_select", tuple(self.gamma_select))
        object.__setattr__(self, "a_select", tuple(self.a_select))
        if self.gamma_basis is not None and self.gamma_select:
            raise ValueError("give gamma_select or gamma_basis, not both")
        if self.a_basis is not None and self.a_select:
            raise ValueError("give a_select or a_basis, not both")
        for name in ("gamma_basis", "a_basis"):
            v = getattr(self, name)
            if v is not None:
                object.__setattr__(self, name,
                                   np.atleast_2d(np.asarray(v, dtype=float)))


@dataclass(frozen=True)
class ContinuumFamily:
    """Marker for an infinite family of invariant subspaces inside a
    repeated eigenspace.  ``basis`` spans the full eigenspace in block
    coordinates; members of the family are proper subspaces of it."""

    part: str                  # "gamma" or "a"
    eigenvalue: complex
    dim: int
    basis: np.ndarray


@dataclass(frozen=True)
class AllPassDivisor:
    """A left all-pass divisor with its generating data.

    ``t_ell`` is minimal; ``p`` is the compressed Gramian, ``b_p``/``d_p``
    the raw input/feedthrough blocks before reduction, ``degree`` the
    McMillan degree certificate.  ``subspace_dims`` records the (gamma, a)
    split of the generating subspace dimension; ``right_complement`` is
    attached when degree additivity has been certified.
    """

    t_ell: Realization
    projector: np.ndarray
    p: np.ndarray
    b_p: np.ndarray
    d_p: np.ndarray
    degree: int
    subspace_dims: tuple = (0, 0)
    label: str = ""
    right_complement: Realization | None = None


def _part_basis(block_matrix, select, basis, part, config):
    """Orthonormal basis for one block of the subspace specification."""
    if basis is not None:
        if basis.shape[0] != block_matrix.shape[0]:
            raise InvalidSubspace(
                f"{part} basis has {basis.shape[0]} rows, expected "
                f"{block_matrix.shape[0]}"
            )
        q = orth_basis(basis, config)
        if not is_invariant(block_matrix, q, config.residual_tol, config):
            raise InvalidSubspace(
                f"{part} basis does not span an invariant subspace"
            )
        return q
    try:
        return selection_basis(block_matrix, select, config,
                               allow_full_repeated=True)
    except (AmbiguousEigenspace, SpectralFactorsError) as exc:
        raise InvalidSubspace(f"invalid {part} selection: {exc}") from exc


def _stacked_basis(cp: ConjugatePhase, spec: SubspaceSpec, config):
    vg = _part_basis(cp.gamma, spec.gamma_select, spec.gamma_basis,
                     "gamma", config)
    va = _part_basis(cp.a_inv_t, spec.a_select, spec.a_basis, "a", config)
    ng, na = cp.n_gamma, cp.n_a
    v = np.zeros((ng + na, vg.shape[1] + va.shape[1]))
    v[:ng, :vg.shape[1]] = vg
    v[ng:, vg.shape[1]:] = va
    return v, (vg.shape[1], va.shape[1])


def projector_from_spec(cp: ConjugatePhase, spec: SubspaceSpec,
                        config: ToleranceConfig = DEFAULT_TOL):
    """Orthogonal projector onto the invariant subspace described by
    ``spec``.  Raises InvalidSubspace if the description is inconsistent."""
    v, _ = _stacked_basis(cp, spec, config)
    n = cp.n_gamma + cp.n_a
    if v.shape[1] == 0:
        return np.zeros((n, n))
    return orth_projector(v, config)


def _split_dims(pi, n_gamma):
    """Dimension split (gamma part, a part) of a block-diagonal projector."""
    ng = int(round(float(np.trace(pi[:n_gamma, :n_gamma]))))
    total = int(round(float(np.trace(pi))))
    return ng, total - ng


def divisor_from_projector(cp: ConjugatePhase, pi,
                           config: ToleranceConfig = DEFAULT_TOL) -> AllPassDivisor:
    """Build the left all-pass divisor generated by the projector ``pi``.

    ``pi`` must be symmetric, idempotent, and project onto an invariant
    subspace of the conjugate phase state matrix.  The divisor depends only
    on the range of ``pi``.

    Raises
    ------
    NotInvariant
        If the range of ``pi`` is not invariant (or ``pi`` is not an
        orthogonal projector).
    CompressionNotPD
        If I + C P C^T fails the positive-definiteness check.
    """
    pi = np.asarray(pi, dtype=float)
    a, b, c, d = cp.t.a, cp.t.b, cp.t.c, cp.t.d
    n2 = a.shape[0]
    m = d.shape[0]
    if pi.shape != (n2, n2):
        raise NotInvariant(f"projector must be {n2}x{n2}, got {pi.shape}")
    scale = max(1.0, float(np.linalg.norm(pi)))
    if (np.linalg.norm(pi - pi.T) > config.residual_tol * scale
            or np.linalg.norm(pi @ pi - pi) > config.residual_tol * scale):
        raise NotInvariant("matrix is not an orthogonal projector")

    basis = basis_from_projector(pi, config)
    if basis.shape[1] and not is_invariant(a, basis, config.residual_tol,
                                           config):
        raise NotInvariant(
            "projector range is not an invariant subspace of the conjugate "
            "phase state matrix"
        )

    p = pseudo_inverse(pi @ cp.p0_inv @ pi, config)
    s = np.eye(m) + c @ p @ c.T
    try:
        d_p = sym_sqrt(s, config)
    except NotPositiveDefinite as exc:
        raise CompressionNotPD(
            "I + C P C^T is not positive definite for this projector"
        ) from exc
    b_p = np.linalg.solve(d_p, (a @ p @ c.T).T).T

    if basis.shape[1] == 0:
        t_ell = constant(d_p)
    else:
        # The range of Pi is invariant and contains the columns of Bp, so
        # compressing onto it preserves the transfer function exactly.
        leak = np.linalg.norm(b_p - pi @ b_p)
        if leak <= config.residual_tol * max(1.0, np.linalg.norm(b_p)):
            compressed = Realization(basis.T @ a @ basis, basis.T @ b_p,
                                     c @ basis, d_p)
            t_ell = minimal(compressed, config)
        else:
            t_ell = minimal(Realization(a, b_p, c, d_p), config)

    dims = _split_dims(pi, cp.n_gamma)
    return AllPassDivisor(
        t_ell=t_ell, projector=pi, p=p, b_p=b_p, d_p=d_p, degree=t_ell.n,
        subspace_dims=dims,
        label=f"dim(gamma)={dims[0]}, dim(a)={dims[1]}",
    )


def right_complement(cp: ConjugatePhase, div: AllPassDivisor,
                     config: ToleranceConfig = DEFAULT_TOL) -> Realization:
    """Right all-pass cofactor T_r with T = T_l T_r and additive degrees.

    Raises DegreeAdditivityViolation when the degrees fail to add up to the
    degree of the conjugate phase function; this flags a numerical rank
    failure, not a property of valid inputs.
    """
    t_r = minimal(series(inverse(div.t_ell, config), cp.t), config)
    total = cp.t.n
    if div.degree + t_r.n != total:
        raise DegreeAdditivityViolation(
            f"divisor degree {div.degree} + complement degree {t_r.n} != "
            f"{total}"
        )
    return t_r


class DivisorEnumeration(list):
    """List of certified divisors plus markers for continuum families."""

    def __init__(self, divisors=(), continua=()):
        super().__init__(divisors)
        self.continua = list(continua)


def _block_choices(blocks, part):
    """Enumerable block subsets for one side plus continuum markers.

    Simple real eigenvalues and complex pairs toggle in or out; a repeated
    (semisimple) eigenvalue contributes only the empty or full eigenspace
    and is reported as a continuum of intermediate subspaces.
    """
    continua = []
    for blk in blocks:
        if blk.basis is None:
            raise AmbiguousEigenspace(
                f"{part} block at {blk.eigenvalues[0]} is defective; "
                "automated enumeration requires diagonalizable blocks"
            )
        if blk.dim >= 2 and blk.kind == "repeated":
            continua.append(ContinuumFamily(
                part=part, eigenvalue=blk.eigenvalues[0], dim=blk.dim,
                basis=blk.basis,
            ))
    subsets = []
    idx = range(len(blocks))
    for k in range(len(blocks) + 1):
        subsets.extend(combinations(idx, k))
    return subsets, continua


def enumerate_divisors(cp: ConjugatePhase,
                       config: ToleranceConfig = DEFAULT_TOL) -> DivisorEnumeration:
    """Enumerate and certify all divisors reachable by block selection.

    One divisor per subset pair of eigenvalue blocks of the two sides
    (2^k_gamma * 2^k_a total); every divisor is certified all-pass and gets
    its right complement attached (degree additivity).  Eigenspaces of
    multiplicity >= 2 are reported as continuum families; the caller samples
    them through explicit bases.
    """
    n2 = cp.t.n
    if n2 == 0:
        ident = divisor_from_projector(cp, np.zeros((0, 0)), config)
        return DivisorEnumeration([ident], [])
    g_blocks = eigen_blocks(cp.gamma, config)
    a_blocks = eigen_blocks(cp.a_inv_t, config)
    g_subsets, g_cont = _block_choices(g_blocks, "gamma")
    a_subsets, a_cont = _block_choices(a_blocks, "a")

    ng = cp.n_gamma
    out = []
    for gs in g_subsets:
        vg = (np.hstack([g_blocks[i].basis for i in gs])
              if gs else np.zeros((ng, 0)))
        for as_ in a_subsets:
            va = (np.hstack([a_blocks[i].basis for i in as_])
                  if as_ else np.zeros((cp.n_a, 0)))
            v = np.zeros((n2, vg.shape[1] + va.shape[1]))
            v[:ng, :vg.shape[1]] = vg
            v[ng:, vg.shape[1]:] = va
            pi = (orth_projector(v, config) if v.shape[1]
                  else np.zeros((n2, n2)))
            div = divisor_from_projector(cp, pi, config)
            resid = allpass_residual(div.t_ell, config)
            if resid > ALLPASS_CERT_TOL:
                raise DegreeAdditivityViolation(
                    f"enumerated divisor failed the all-pass certificate "
                    f"(residual {resid:.3e})"
                )
            t_r = right_complement(cp, div, config)
            out.append(replace(div, right_complement=t_r,
                               label=f"gamma blocks {gs}, a blocks {as_}"))
    return DivisorEnumeration(out, g_cont + a_cont)


def continuum_angle_basis(eigenspace_basis, theta: float):
    """One-dimensional member of a two-dimensional continuum family.

    Returns the column q1 cos(theta) + q2 sin(theta) in block coordinates,
    where q1, q2 are the columns of ``eigenspace_basis``.  Distinct
    subspaces correspond to theta in [0, pi).
    """
    q = np.asarray(eigenspace_basis, dtype=float)
    if q.ndim != 2 or q.shape[1] != 2:
        raise ValueError("angle sampling needs a two-column eigenspace basis")
    return (q @ np.array([np.cos(theta), np.sin(theta)])).reshape(-1, 1)
