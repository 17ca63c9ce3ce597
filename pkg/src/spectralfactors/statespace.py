"""Algebra of rational matrices carried as state-space realizations.

A rational matrix G(z) = C (zI - A)^{-1} B + D is represented by the
quadruple (A, B, C, D); n = 0 encodes a constant.  All operations return new
realizations and never mutate their inputs.  Transfer-function equality is
decided by evaluation on a fixed deterministic sample set plus McMillan
degree equality, never by canonical-form comparison.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    EvaluationAtPole,
    NoParameterFound,
    ParameterHitsSpectrum,
    SingularFeedthrough,
    SingularStateMatrix,
)
from .matnum import DEFAULT_TOL, ToleranceConfig

__all__ = [
    "Realization",
    "PoleZeroReport",
    "constant",
    "identity",
    "evalfr",
    "evalfr_many",
    "series",
    "inverse",
    "adjoint",
    "moebius",
    "moebius_image",
    "moebius_preimage",
    "choose_moebius_parameter",
    "minimal",
    "mcmillan_degree",
    "poles_zeros",
    "transfer_equal",
    "eval_gap",
]


def _arr(x, name):
    a = np.atleast_2d(np.asarray(x, dtype=float))
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite entries")
    return a


@dataclass(frozen=True)
class Realization:
    """State-space quadruple (A, B, C, D) of a proper rational matrix.

    ``n`` is the state dimension (0 for constants), ``n_in``/``n_out`` the
    input/output widths.  Construction validates dimension compatibility and
    finiteness of all entries.
    """

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        a = a.reshape(0, 0) if a.size == 0 else np.atleast_2d(a)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DimensionMismatch(f"A must be square, got {a.shape}")
        n = a.shape[0]
        d = np.atleast_2d(np.asarray(self.d, dtype=float))
        b = np.asarray(self.b, dtype=float)
        b = b.reshape(n, d.shape[1]) if b.size == 0 else np.atleast_2d(b)
        c = np.asarray(self.c, dtype=float)
        c = c.reshape(d.shape[0], n) if c.size == 0 else np.atleast_2d(c)
        for m_, name in ((a, "A"), (b, "B"), (c, "C"), (d, "D")):
            if m_.size and not np.all(np.isfinite(m_)):
                raise ValueError(f"{name} contains non-finite entries")
        if b.shape[0] != n or c.shape[1] != n:
            raise DimensionMismatch("B/C state dimensions do not match A")
        if d.shape != (c.shape[0], b.shape[1]):
            raise DimensionMismatch(
                f"D must be {(c.shape[0], b.shape[1])}, got {d.shape}"
            )
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)

    @property
    def n(self) -> int:
        return self.a.shape[0]

    @property
    def n_in(self) -> int:
        return self.d.shape[1]

    @property
    def n_out(self) -> int:
        return self.d.shape[0]

    def poles(self):
        """Eigenvalues of A (poles of this particular realization)."""
        return np.linalg.eigvals(self.a) if self.n else np.zeros(0, complex)

    def __repr__(self):
        return f"Realization(n={self.n}, n_out={self.n_out}, n_in={self.n_in})"


def constant(d) -> Realization:
    """Constant rational matrix (state dimension zero)."""
    d = _arr(d, "D")
    return Realization(np.zeros((0, 0)), np.zeros((0, d.shape[1])),
                       np.zeros((d.shape[0], 0)), d)


def identity(m: int) -> Realization:
    return constant(np.eye(m))


@dataclass(frozen=True)
class PoleZeroReport:
    """Pole/zero inventory of the minimal realization.

    Poles and zeros are listed with multiplicity (repeated entries), sorted
    by real then imaginary part.  ``zeros`` is None when the feedthrough is
    not square invertible.
    """

    poles: np.ndarray
    zeros: np.ndarray | None
    degree: int

    def to_dict(self):
        def enc(v):
            return [[float(x.real), float(x.imag)] for x in v]
        return {
            "degree": self.degree,
            "poles": enc(self.poles),
            "zeros": None if self.zeros is None else enc(self.zeros),
        }


def _sorted_eigs(m):
    e = np.linalg.eigvals(m) if m.shape[0] else np.zeros(0, complex)
    return e[np.lexsort((e.imag, e.real))]


def _pole_guard(r: Realization, zs, config):
    """Raise EvaluationAtPole if any sample sits on the spectrum of A."""
    if r.n == 0:
        return
    eigs = np.linalg.eigvals(r.a)
    norm_a = max(np.linalg.norm(r.a), 1.0)
    zs = np.atleast_1d(zs)
    dist = np.min(np.abs(zs[:, None] - eigs[None, :]), axis=1)
    bad = dist <= config.rank_rel_tol * (1.0 + np.abs(zs)) * norm_a
    if np.any(bad):
        raise EvaluationAtPole(
            f"evaluation point {zs[np.argmax(bad)]} is too close to a pole"
        )


def evalfr(r: Realization, z, config: ToleranceConfig = DEFAULT_TOL):
    """Evaluate the transfer matrix at a single complex point."""
    return evalfr_many(r, [z], config)[0]


def evalfr_many(r: Realization, zs, config: ToleranceConfig = DEFAULT_TOL):
    """Evaluate the transfer matrix at a batch of complex points.

    Returns an array of shape (len(zs), n_out, n_in).  Raises
    EvaluationAtPole if any point is within the relative pole guard of the
    spectrum of A.
    """
    zs = np.asarray(zs, dtype=complex).ravel()
    if r.n == 0:
        return np.broadcast_to(r.d.astype(complex),
                               (zs.size, r.n_out, r.n_in)).copy()
    _pole_guard(r, zs, config)
    eye = np.eye(r.n)
    lhs = zs[:, None, None] * eye - r.a
    rhs = np.broadcast_to(r.b.astype(complex), (zs.size, r.n, r.n_in))
    try:
        sol = np.linalg.solve(lhs, rhs)
    except np.linalg.LinAlgError as exc:  # exact hit despite the guard
        raise EvaluationAtPole("evaluation point is a pole") from exc
    return r.c @ sol + r.d


def series(r1: Realization, r2: Realization) -> Realization:
    """Cascade realization of the product G1(z) G2(z).

    ``evalfr(series(r1, r2), z) == evalfr(r1, z) @ evalfr(r2, z)``.  The
    result has state dimension n1 + n2 and is not reduced.
    """
    if r1.n_in != r2.n_out:
        raise DimensionMismatch(
            f"cannot compose: left input width {r1.n_in} != right output "
            f"width {r2.n_out}"
        )
    n1, n2 = r1.n, r2.n
    a = np.zeros((n1 + n2, n1 + n2))
    a[:n1, :n1] = r1.a
    a[:n1, n1:] = r1.b @ r2.c
    a[n1:, n1:] = r2.a
    b = np.vstack([r1.b @ r2.d, r2.b])
    c = np.hstack([r1.c, r1.d @ r2.c])
    d = r1.d @ r2.d
    return Realization(a, b, c, d)


def _inv(m, config, err):
    if m.shape[0] != m.shape[1]:
        raise err("matrix is not square")
    if m.shape[0] == 0:
        return m.copy()
    u, s, vt = np.linalg.svd(m)
    if s[0] == 0.0 or s[-1] / s[0] <= config.rank_rel_tol:
        raise err(f"matrix is singular (condition ~{s[0] / max(s[-1], 1e-300):.2e})")
    return (vt.T / s) @ u.T


def inverse(r: Realization, config: ToleranceConfig = DEFAULT_TOL) -> Realization:
    """Realization of G(z)^{-1} for square G with invertible feedthrough.

    The state matrix of the inverse is the zero matrix A - B D^{-1} C.
    """
    d_inv = _inv(r.d, config, SingularFeedthrough)
    a = r.a - r.b @ d_inv @ r.c
    return Realization(a, r.b @ d_inv, -d_inv @ r.c, d_inv)


def adjoint(r: Realization, config: ToleranceConfig = DEFAULT_TOL) -> Realization:
    """Realization of G^*(z) = G(1/z)^T.

    Requires A invertible; shift with a Moebius change of variable first if
    it is not.
    """
    if r.n == 0:
        return constant(r.d.T)
    a_it = _inv(r.a, config, SingularStateMatrix).T
    return Realization(a_it, a_it @ r.c.T, -r.b.T @ a_it,
                       r.d.T - r.b.T @ a_it @ r.c.T)


def moebius_image(z, a: float):
    """Scalar Moebius map z -> (z - a) / (1 - a z); maps circle to circle."""
    z = np.asarray(z, dtype=complex)
    return (z - a) / (1.0 - a * z)


def moebius_preimage(lam, a: float):
    """Inverse of moebius_image: lam -> (lam + a) / (1 + a lam)."""
    lam = np.asarray(lam, dtype=complex)
    return (lam + a) / (1.0 + a * lam)


def moebius(r: Realization, a: float,
            config: ToleranceConfig = DEFAULT_TOL) -> Realization:
    """Change of frequency variable G(lam) = F((lam + a) / (1 + a lam)).

    Poles move by p -> (p - a)/(1 - a p), the unit circle maps to itself and
    the McMillan degree is preserved.  ``moebius(moebius(r, a), -a)`` is
    eval-equal to ``r``.

    Raises
    ------
    ParameterHitsSpectrum
        If |a| >= 1 or 1/a is an eigenvalue of A (the transformed system
        would be improper).
    """
    if not abs(a) < 1.0:
        raise ParameterHitsSpectrum(f"|a| must be < 1, got {a}")
    if a == 0.0 or r.n == 0:
        return Realization(r.a, r.b, r.c, r.d)
    n = r.n
    e = np.eye(n) - a * r.a
    u, s, vt = np.linalg.svd(e)
    if s[-1] <= config.rank_rel_tol * s[0]:
        raise ParameterHitsSpectrum(
            f"1/a = {1.0 / a:.6g} hits the spectrum of the state matrix"
        )
    e_inv = (vt.T / s) @ u.T
    a_new = e_inv @ (r.a - a * np.eye(n))
    b_new = e_inv @ r.b
    c_new = (1.0 - a * a) * r.c @ e_inv
    d_new = r.d + a * r.c @ e_inv @ r.b
    return Realization(a_new, b_new, c_new, d_new)


_PARAM_GRID = tuple(
    s * v for v in (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9) for s in (1, -1)
)


def choose_moebius_parameter(poles, zeros,
                             config: ToleranceConfig = DEFAULT_TOL,
                             max_draws: int = 1000) -> float:
    """Pick a real Moebius parameter clear of the given poles and zeros.

    Scans the fixed grid +-0.1, ..., +-0.9 and then uniform random draws,
    returning the first ``a`` with |a| <= 0.9 such that a, -a, 1/a and -1/a
    all keep a scale-relative distance from every listed pole and zero.
    """
    pts = [complex(p) for p in list(poles) + list(zeros)]

    def admissible(a):
        for q in (a, -a, 1.0 / a, -1.0 / a):
            for p in pts:
                if abs(q - p) < 10.0 * config.rank_rel_tol * (1.0 + abs(p)):
                    return False
        return True

    for a in _PARAM_GRID:
        if admissible(a):
            return a
    rng = np.random.default_rng(0)
    for _ in range(max_draws):
        a = float(rng.uniform(-0.9, 0.9))
        if abs(a) > 1e-3 and admissible(a):
            return a
    raise NoParameterFound("no admissible Moebius parameter found")


def _sample_radii(moduli):
    """Evaluation radii interleaving the pole moduli on a log scale.

    Every log-gap between consecutive pole moduli contributes a radius (its
    geometric midpoint), plus one radius just inside and one just outside
    the annulus; this keeps every mode visible in the samples regardless of
    how widely the pole magnitudes are spread.
    """
    moduli = np.asarray([m for m in np.atleast_1d(moduli) if m > 0.0])
    if not moduli.size:
        return [1.0, 0.67]
    logs = np.sort(np.log(np.unique(moduli)))
    radii = [float(np.exp(logs[0] - 0.5)), float(np.exp(logs[-1] + 0.5))]
    radii.extend(float(np.exp(0.5 * (a + b)))
                 for a, b in zip(logs[:-1], logs[1:]) if b - a > 1e-6)
    if np.min(np.abs(logs)) > 0.05:
        radii.append(1.0)
    # Radii closest to the unit circle first: they carry the most weight in
    # the downstream circle-sampled checks.
    radii.sort(key=lambda rho: abs(np.log(rho)))
    return radii


def _half_points(radii, k_half, offset):
    """k_half upper-half-plane points cycling through the given radii;
    conjugates are accounted for analytically."""
    rho = np.asarray([radii[t % len(radii)] for t in range(k_half)])
    theta = np.pi * (((offset + 0.381966 * np.arange(k_half)) % 1.0) * 0.96
                     + 0.02)
    return rho * np.exp(1j * theta)


def _block_matrix(grid):
    """(p, q, a, b) block grid -> (p*a, q*b) matrix."""
    p, q, a, b = grid.shape
    return np.ascontiguousarray(grid.transpose(0, 2, 1, 3)).reshape(p * a, q * b)


def minimal(r: Realization, config: ToleranceConfig = DEFAULT_TOL) -> Realization:
    """Minimal realization with the same transfer function.

    The McMillan degree is decided at the transfer-function level: block
    samples of G(z) - D at points interleaving the pole magnitudes form a
    Loewner matrix whose numerical rank (relative tolerance) is the degree.
    State-space rank tests (staircase/Krylov) are not used because
    near-cancellations of a cascade can be invisible to reachability and
    observability separately while the transfer function drops degree; the
    Loewner rank has its cliff at rounding level instead.

    An already-minimal realization is returned unchanged (same object); a
    reducible one is rebuilt from the sample data via the Loewner pencil
    compression, which reproduces the transfer function exactly.  Samples
    are taken in conjugate pairs and rotated to a real basis, so the result
    is real.
    """
    if r.n == 0:
        return r
    if not np.any(r.b) or not np.any(r.c):
        return Realization(np.zeros((0, 0)), np.zeros((0, r.n_in)),
                           np.zeros((r.n_out, 0)), r.d)
    n, m_in, m_out = r.n, r.n_in, r.n_out
    m = max(m_in, m_out)
    eigs = np.linalg.eigvals(r.a)
    radii = _sample_radii(np.abs(eigs))
    k_half = max(int(np.ceil((n + 2) / (2.0 * m))) + 1, len(radii))

    guard = 1e-6
    offset = 0.173
    for _ in range(8):
        mu = _half_points(radii, k_half, offset)
        lam = _half_points(radii[::-1], k_half, offset + 0.291)
        pts = np.concatenate([mu, lam])
        dist = np.min(np.abs(pts[:, None] - eigs[None, :]), axis=1)
        sep = np.min(np.abs(mu[:, None] - lam[None, :]))
        if np.all(dist > guard * (1.0 + np.abs(pts))) and sep > guard:
            break
        offset += 0.0937

    v = evalfr_many(r, mu, config) - r.d          # (k_half, m_out, m_in)
    w = evalfr_many(r, lam, config) - r.d

    # Block Loewner data for the conjugate-completed sample sets, rotated to
    # a real basis analytically: with X = blocks at (mu, lam) and Y = blocks
    # at (mu, conj lam), the real form per pair is
    # [[Re(X+Y), Im(Y-X)], [Im(X+Y), Re(X-Y)]].
    def real_pairs(x, y):
        grid = np.empty((k_half, 2, k_half, 2, m_out, m_in))
        grid[:, 0, :, 0] = np.real(x + y)
        grid[:, 0, :, 1] = np.imag(y - x)
        grid[:, 1, :, 0] = np.imag(x + y)
        grid[:, 1, :, 1] = np.real(x - y)
        return grid.reshape(k_half * 2, k_half * 2, m_out, m_in)

    d_x = (mu[:, None] - lam[None, :])[:, :, None, None]
    d_y = (mu[:, None] - np.conj(lam)[None, :])[:, :, None, None]
    x_blk = (v[:, None] - w[None, :]) / d_x
    y_blk = (v[:, None] - np.conj(w)[None, :]) / d_y
    low = _block_matrix(real_pairs(x_blk, y_blk))
    xs_blk = (mu[:, None, None, None] * v[:, None]
              - lam[None, :, None, None] * w[None, :]) / d_x
    ys_blk = (mu[:, None, None, None] * v[:, None]
              - np.conj(lam)[None, :, None, None] * np.conj(w)[None, :]) / d_y
    shifted = _block_matrix(real_pairs(xs_blk, ys_blk))

    rt2 = np.sqrt(2.0)
    v_stack = np.empty((k_half * 2, m_out, m_in))
    v_stack[0::2] = rt2 * np.real(v)
    v_stack[1::2] = rt2 * np.imag(v)
    v_stack = v_stack.reshape(k_half * 2 * m_out, m_in)
    w_cols = np.empty((k_half * 2, m_out, m_in))
    w_cols[0::2] = rt2 * np.real(w)
    w_cols[1::2] = -rt2 * np.imag(w)
    w_stack = np.hstack(list(w_cols))

    # The rank cut is anchored on the transfer magnitude: when the strictly
    # proper part is pure rounding noise, a cut relative to the Loewner
    # matrix's own largest singular value would keep phantom rank.
    sample_scale = max(
        float(np.max(np.abs(v))) if v.size else 0.0,
        float(np.max(np.abs(w))) if w.size else 0.0,
        float(np.max(np.abs(r.d))) if r.d.size else 0.0,
    )
    u, s, vt = np.linalg.svd(low)
    anchor = max(s[0] if s.size else 0.0, sample_scale)
    nu = int(np.sum(s > config.rank_rel_tol * anchor)) if anchor > 0 else 0
    if nu >= n:
        return r
    if nu == 0:
        return Realization(np.zeros((0, 0)), np.zeros((0, m_in)),
                           np.zeros((m_out, 0)), r.d)
    y_l = u[:, :nu]
    x_r = vt[:nu].T
    e_c = -(y_l.T @ low @ x_r)
    a_c = -(y_l.T @ shifted @ x_r)
    a_new = np.linalg.solve(e_c, a_c)
    b_new = np.linalg.solve(e_c, y_l.T @ v_stack)
    c_new = w_stack @ x_r
    return Realization(a_new, b_new, c_new, r.d)


def mcmillan_degree(r: Realization, config: ToleranceConfig = DEFAULT_TOL) -> int:
    """McMillan degree: state dimension of the minimal realization."""
    return minimal(r, config).n


def poles_zeros(r: Realization, config: ToleranceConfig = DEFAULT_TOL) -> PoleZeroReport:
    """Pole/zero inventory of the minimal realization.

    Poles are the eigenvalues of the minimal A; zeros are the eigenvalues of
    the minimal zero matrix A - B D^{-1} C (square invertible-D systems
    only; ``zeros`` is None otherwise).
    """
    rm = minimal(r, config)
    poles = _sorted_eigs(rm.a)
    zeros = None
    if rm.n_in == rm.n_out:
        try:
            d_inv = _inv(rm.d, config, SingularFeedthrough)
        except SingularFeedthrough:
            d_inv = None
        if d_inv is not None:
            zeros = _sorted_eigs(rm.a - rm.b @ d_inv @ rm.c)
    return PoleZeroReport(poles=poles, zeros=zeros, degree=rm.n)


def _sample_points(config, radii=(1.0, 1.37)):
    k = config.circle_samples
    base = np.exp(2j * np.pi * np.arange(k) / k)
    return np.concatenate([rho * base for rho in radii])


def eval_gap(r1: Realization, r2: Realization, zs=None,
             config: ToleranceConfig = DEFAULT_TOL) -> float:
    """Largest entrywise evaluation gap between two realizations.

    Sample points too close to a pole of either system are skipped.
    """
    if (r1.n_out, r1.n_in) != (r2.n_out, r2.n_in):
        raise DimensionMismatch("output/input widths differ")
    if zs is None:
        zs = _sample_points(config)
    zs = np.asarray(zs, dtype=complex).ravel()
    keep = np.ones(zs.shape, dtype=bool)
    for r in (r1, r2):
        if r.n == 0:
            continue
        eigs = np.linalg.eigvals(r.a)
        norm_a = max(np.linalg.norm(r.a), 1.0)
        dist = np.min(np.abs(zs[:, None] - eigs[None, :]), axis=1)
        keep &= dist > 1e3 * config.rank_rel_tol * (1.0 + np.abs(zs)) * norm_a
    zs = zs[keep]
    if zs.size == 0:
        raise EvaluationAtPole("no admissible sample points away from poles")
    diff = evalfr_many(r1, zs, config) - evalfr_many(r2, zs, config)
    return float(np.max(np.abs(diff)))


def transfer_equal(r1: Realization, r2: Realization,
                   config: ToleranceConfig = DEFAULT_TOL) -> bool:
    """Decide transfer-function equality by sampling plus degree equality."""
    if (r1.n_out, r1.n_in) != (r2.n_out, r2.n_in):
        return False
    if mcmillan_degree(r1, config) != mcmillan_degree(r2, config):
        return False
    scale = 1.0 + max(np.max(np.abs(r1.d)) if r1.d.size else 0.0,
                      np.max(np.abs(r2.d)) if r2.d.size else 0.0)
    return eval_gap(r1, r2, config=config) <= config.residual_tol * scale
