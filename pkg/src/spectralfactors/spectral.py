"""Extremal spectral factors and the conjugate phase function.

Input contract: a minimal realization of the outer (minimum-phase) spectral
factor W-, square with invertible feedthrough, poles and zeros strictly
inside the unit circle.  From it this module constructs

* the stable/maximum-phase factor W+ and the all-pass quotient T1 =
  W-^{-1} W+  (zeros flipped outside the circle),
* the conjugate outer factor Wbar+ and the all-pass quotient T2 =
  W+^{-1} Wbar+  (poles flipped outside the circle),
* the conjugate phase function T = T1 T2 together with its structural
  Gramian P0 and the explicit inverse used by the divisor parametrization.

Outer-ness is validated rather than trusted: every sign and definiteness
claim downstream depends on it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    EvaluationAtPole,
    GramianIdentityViolation,
    NotOuter,
    NotPositiveDefiniteY,
    SingularFeedthrough,
)
from .matnum import DEFAULT_TOL, ToleranceConfig, solve_stein, sym_sqrt
from .statespace import Realization, evalfr_many, mcmillan_degree

__all__ = [
    "ExtremalSet",
    "ConjugatePhase",
    "GramianCheck",
    "zero_matrix",
    "validate_outer",
    "outer_to_plus",
    "plus_to_bar_plus",
    "extremal_set",
    "conjugate_phase",
    "spectrum_sample",
    "spectrum_samples",
    "is_all_pass",
    "allpass_residual",
    "check_gramian_identities",
]

_STABILITY_MARGIN = 1e-8


def _inv(m, err_cls, what, config):
    if m.shape[0] == 0:
        return m.copy()
    u, s, vt = np.linalg.svd(m)
    if s[0] == 0.0 or s[-1] / s[0] <= config.rank_rel_tol:
        raise err_cls(f"{what} is singular")
    return (vt.T / s) @ u.T


def zero_matrix(r: Realization, config: ToleranceConfig = DEFAULT_TOL):
    """Zero matrix A - B D^{-1} C; its eigenvalues are the transmission
    zeros of a square realization with invertible feedthrough."""
    d_inv = _inv(r.d, SingularFeedthrough, "feedthrough D", config)
    return r.a - r.b @ d_inv @ r.c


def validate_outer(w: Realization, config: ToleranceConfig = DEFAULT_TOL):
    """Check that ``w`` is a usable minimal outer factor.

    Requires: square with invertible D; A and the zero matrix invertible and
    with spectra strictly inside the open unit disc (margin 1e-8); minimal
    state dimension.  Returns the zero matrix on success.

    Raises NotOuter (spectrum, invertibility or minimality violations) or
    SingularFeedthrough.
    """
    if w.n_in != w.n_out:
        raise NotOuter(f"outer factor must be square, got {w.n_out}x{w.n_in}")
    gamma = zero_matrix(w, config)
    if w.n == 0:
        return gamma
    for m, what in ((w.a, "pole"), (gamma, "zero")):
        eigs = np.linalg.eigvals(m)
        radius = float(np.max(np.abs(eigs)))
        if radius >= 1.0 - _STABILITY_MARGIN:
            raise NotOuter(
                f"not outer: {what} at modulus {radius:.6g} is not strictly "
                "inside the unit circle"
            )
        if float(np.min(np.abs(eigs))) <= _STABILITY_MARGIN:
            raise NotOuter(
                f"{what} matrix is singular; apply a Moebius change of "
                "variable first"
            )
    if mcmillan_degree(w, config) != w.n:
        raise NotOuter("realization is not minimal")
    return gamma


@dataclass(frozen=True)
class ZeroFlip:
    """Stage one: all-pass quotient T1 = W-^{-1} W+ and the factor W+.

    ``x`` is the (negative-definite) solution of the zero-direction Stein
    equation  Gamma^T X Gamma = X + H1^T H1  with H1 = D^{-1} C.
    """

    t1: Realization
    w_plus: Realization
    gamma: np.ndarray
    h1: np.ndarray
    x: np.ndarray
    u1: np.ndarray
    g1: np.ndarray
    b_plus: np.ndarray
    d_plus: np.ndarray


def outer_to_plus(w_minus: Realization,
                  config: ToleranceConfig = DEFAULT_TOL) -> ZeroFlip:
    """Flip the zeros of the outer factor outside the circle.

    Produces the all-pass quotient T1 (poles at the zeros of W-) and the
    maximum-phase stable factor W+ = W- T1 with the same state matrix as W-
    and zeros at the reciprocals of the zeros of W-.

    Raises NotOuter if the Stein solution fails to be negative definite.
    """
    gamma = validate_outer(w_minus, config)
    n, m = w_minus.n, w_minus.n_in
    d_inv = _inv(w_minus.d, SingularFeedthrough, "feedthrough D", config)
    h1 = d_inv @ w_minus.c
    if n == 0:
        t1 = Realization(np.zeros((0, 0)), np.zeros((0, m)),
                         np.zeros((m, 0)), np.eye(m))
        return ZeroFlip(t1=t1, w_plus=w_minus, gamma=gamma, h1=h1,
                        x=np.zeros((0, 0)), u1=np.eye(m),
                        g1=np.zeros((0, m)), b_plus=w_minus.b.copy(),
                        d_plus=w_minus.d.copy())
    x = solve_stein(gamma, h1.T @ h1, config)
    wx = np.linalg.eigvalsh(x)
    if wx[-1] >= -config.rank_rel_tol * abs(wx[0]):
        raise NotOuter(
            "zero-direction Stein solution is not negative definite; the "
            "realization is not a minimal outer factor"
        )
    x_inv = np.linalg.inv(x)
    u1 = sym_sqrt(np.eye(m) + h1 @ x_inv @ h1.T, config)
    g1 = gamma @ x_inv @ h1.T @ np.linalg.inv(u1)
    b_plus = w_minus.b @ u1 + g1
    d_plus = w_minus.d @ u1
    t1 = Realization(gamma, g1, h1, u1)
    w_plus = Realization(w_minus.a, b_plus, w_minus.c, d_plus)
    return ZeroFlip(t1=t1, w_plus=w_plus, gamma=gamma, h1=h1, x=x, u1=u1,
                    g1=g1, b_plus=b_plus, d_plus=d_plus)


@dataclass(frozen=True)
class PoleFlip:
    """Stage two: all-pass quotient T2 = W+^{-1} Wbar+ and the conjugate
    outer factor Wbar+.

    ``y`` is the (positive-definite) reachability-type Stein solution of
    Y = A Y A^T + B+ B+^T.
    """

    t2: Realization
    w_bar_plus: Realization
    h2: np.ndarray
    y: np.ndarray
    u2: np.ndarray
    g2: np.ndarray


def plus_to_bar_plus(w_plus: Realization,
                     config: ToleranceConfig = DEFAULT_TOL) -> PoleFlip:
    """Flip the poles of the stable maximum-phase factor outside the circle.

    Produces the all-pass quotient T2 (poles at the reciprocals of the poles
    of W+) and the conjugate outer factor Wbar+ = W+ T2, realized directly
    on n states with state matrix A^{-T}.

    Raises NotPositiveDefiniteY if the Stein solution fails to be positive
    definite.
    """
    n, m = w_plus.n, w_plus.n_in
    if n == 0:
        t2 = Realization(np.zeros((0, 0)), np.zeros((0, m)),
                         np.zeros((m, 0)), np.eye(m))
        return PoleFlip(t2=t2, w_bar_plus=w_plus, h2=np.zeros((m, 0)),
                        y=np.zeros((0, 0)), u2=np.eye(m),
                        g2=np.zeros((0, m)))
    a_inv_t = np.linalg.inv(w_plus.a).T
    b_plus = w_plus.b
    h2 = b_plus.T @ a_inv_t
    # Reachability form Y = A Y A^T + B+ B+^T of the pole-direction Stein
    # equation; its right-hand side is far better scaled than H2^T H2 when
    # A has small eigenvalues.
    y = solve_stein(w_plus.a.T, -(b_plus @ b_plus.T), config)
    wy = np.linalg.eigvalsh(y)
    if wy[0] <= config.rank_rel_tol * abs(wy[-1]):
        raise NotPositiveDefiniteY(
            "pole-direction Stein solution is not positive definite"
        )
    y_inv = np.linalg.inv(y)
    u2 = sym_sqrt(np.eye(m) + h2 @ y_inv @ h2.T, config)
    g2 = a_inv_t @ y_inv @ h2.T @ np.linalg.inv(u2)
    t2 = Realization(a_inv_t, g2, h2, u2)
    # Direct n-state realization of W+ T2: the stable part cancels exactly.
    c_bar = w_plus.c @ y + w_plus.d @ h2
    w_bar_plus = Realization(a_inv_t, g2, c_bar, w_plus.d @ u2)
    return PoleFlip(t2=t2, w_bar_plus=w_bar_plus, h2=h2, y=y, u2=u2, g2=g2)


@dataclass(frozen=True)
class ExtremalSet:
    """The extremal factors of the spectral density of W- together with the
    quantities produced along the construction chain."""

    w_minus: Realization
    w_plus: Realization
    w_bar_plus: Realization
    t1: Realization
    t2: Realization
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    u1: np.ndarray
    u2: np.ndarray
    g1: np.ndarray
    g2: np.ndarray
    h1: np.ndarray
    h2: np.ndarray
    b_plus: np.ndarray
    d_plus: np.ndarray
    gamma: np.ndarray


def extremal_set(w_minus: Realization,
                 config: ToleranceConfig = DEFAULT_TOL) -> ExtremalSet:
    """Run both construction stages and validate the Gramian couplings.

    Besides the stage outputs this checks Z = Y + X^{-1} against its own
    Stein equation  Z = B B^T + A Z A^T.
    """
    s1 = outer_to_plus(w_minus, config)
    s2 = plus_to_bar_plus(s1.w_plus, config)
    n = w_minus.n
    if n:
        z = s2.y + np.linalg.inv(s1.x)
        resid = np.linalg.norm(
            z - w_minus.b @ w_minus.b.T - w_minus.a @ z @ w_minus.a.T
        )
        if resid > config.residual_tol * (1.0 + np.linalg.norm(z)):
            raise GramianIdentityViolation(
                f"Z = B B^T + A Z A^T fails with residual {resid:.3e}"
            )
    else:
        z = np.zeros((0, 0))
    return ExtremalSet(
        w_minus=w_minus, w_plus=s1.w_plus, w_bar_plus=s2.w_bar_plus,
        t1=s1.t1, t2=s2.t2, x=s1.x, y=s2.y, z=z, u1=s1.u1, u2=s2.u2,
        g1=s1.g1, g2=s2.g2, h1=s1.h1, h2=s2.h2, b_plus=s1.b_plus,
        d_plus=s1.d_plus, gamma=s1.gamma,
    )


@dataclass(frozen=True)
class GramianCheck:
    """Residuals of the structural identities of the conjugate phase
    realization and its Gramian."""

    state_residual: float        # A P0 A^T - P0 - B B^T
    cross_residual: float        # A P0 C^T - B D^T
    output_residual: float       # I + C P0 C^T - D D^T
    inverse_residual: float      # A^T P0^{-1} A - P0^{-1} - C^T C
    passed: bool

    def residuals(self):
        return {
            "state": self.state_residual,
            "cross": self.cross_residual,
            "output": self.output_residual,
            "inverse": self.inverse_residual,
        }


@dataclass(frozen=True)
class ConjugatePhase:
    """Minimal realization of the conjugate phase function T = W-^{-1} Wbar+
    with its structural Gramian.

    The state matrix of ``t`` is block diagonal: the leading ``n_gamma``
    states carry the zero matrix of W- (spectrum inside the circle), the
    trailing ``n_a`` states carry A^{-T} (spectrum outside).  ``p0_inv`` is
    assembled from the closed form [[X, -I], [-I, Z]] rather than by
    numerical inversion.
    """

    t: Realization
    p0: np.ndarray
    p0_inv: np.ndarray
    n_gamma: int
    n_a: int
    gamma: np.ndarray
    a_inv_t: np.ndarray
    extremals: ExtremalSet
    moebius_a: float | None = None


def check_gramian_identities(cp: ConjugatePhase,
                             config: ToleranceConfig = DEFAULT_TOL) -> GramianCheck:
    """Residuals of the four defining identities of the structural Gramian.

    Residual fields are absolute; the pass decision is relative to the
    magnitude of the terms entering each identity (the Gramian and its
    inverse can span many orders of magnitude).
    """
    a, b, c, d = cp.t.a, cp.t.b, cp.t.c, cp.t.d
    p0, p0_inv = cp.p0, cp.p0_inv
    m = d.shape[0]
    nrm = np.linalg.norm
    r1 = nrm(a @ p0 @ a.T - p0 - b @ b.T)
    r2 = nrm(a @ p0 @ c.T - b @ d.T)
    r3 = nrm(np.eye(m) + c @ p0 @ c.T - d @ d.T)
    r4 = nrm(a.T @ p0_inv @ a - p0_inv - c.T @ c)
    tol = config.residual_tol
    ok = (
        r1 <= tol * (1.0 + nrm(p0) + nrm(b @ b.T))
        and r2 <= tol * (1.0 + nrm(b @ d.T) + nrm(p0))
        and r3 <= tol * (1.0 + nrm(d @ d.T) + nrm(p0))
        and r4 <= tol * (1.0 + nrm(p0_inv) + nrm(c.T @ c))
    )
    return GramianCheck(
        state_residual=float(r1), cross_residual=float(r2),
        output_residual=float(r3), inverse_residual=float(r4),
        passed=bool(ok),
    )


def conjugate_phase(w_minus: Realization,
                    config: ToleranceConfig = DEFAULT_TOL) -> ConjugatePhase:
    """Assemble the conjugate phase function of the spectral density of W-.

    The 2n-state realization is built in the basis that decouples the two
    blocks: state matrix diag(Gamma, A^{-T}), input matrix stacked from
    [G1 U2 + X^{-1} G2; G2], output matrix [H1 | B^T A^{-T}], feedthrough
    U1 U2.  The structural Gramian identities are verified before returning.

    Raises GramianIdentityViolation if any identity residual exceeds
    tolerance or if the realization is not minimal of dimension 2n.
    """
    ext = extremal_set(w_minus, config)
    n, m = w_minus.n, w_minus.n_in
    if n == 0:
        t = Realization(np.zeros((0, 0)), np.zeros((0, m)),
                        np.zeros((m, 0)), ext.u1 @ ext.u2)
        return ConjugatePhase(t=t, p0=np.zeros((0, 0)),
                              p0_inv=np.zeros((0, 0)), n_gamma=0, n_a=0,
                              gamma=ext.gamma, a_inv_t=np.zeros((0, 0)),
                              extremals=ext)
    a_inv_t = np.linalg.inv(w_minus.a).T
    x_inv = np.linalg.inv(ext.x)
    y_inv = np.linalg.inv(ext.y)

    a_t = np.zeros((2 * n, 2 * n))
    a_t[:n, :n] = ext.gamma
    a_t[n:, n:] = a_inv_t
    b_t = np.vstack([ext.g1 @ ext.u2 + x_inv @ ext.g2, ext.g2])
    c_t = np.hstack([ext.h1, w_minus.b.T @ a_inv_t])
    d_t = ext.u1 @ ext.u2
    t = Realization(a_t, b_t, c_t, d_t)

    p0 = np.block([[x_inv + x_inv @ y_inv @ x_inv, x_inv @ y_inv],
                   [y_inv @ x_inv, y_inv]])
    p0 = 0.5 * (p0 + p0.T)
    p0_inv = np.block([[ext.x, -np.eye(n)], [-np.eye(n), ext.z]])

    inv_resid = np.linalg.norm(p0 @ p0_inv - np.eye(2 * n))
    if inv_resid > config.residual_tol * (1.0 + np.linalg.norm(p0_inv)):
        raise GramianIdentityViolation(
            f"closed-form Gramian inverse fails with residual {inv_resid:.3e}"
        )
    cp = ConjugatePhase(t=t, p0=p0, p0_inv=p0_inv, n_gamma=n, n_a=n,
                        gamma=ext.gamma, a_inv_t=a_inv_t, extremals=ext)
    check = check_gramian_identities(cp, config)
    if not check.passed:
        raise GramianIdentityViolation(
            f"structural Gramian identities fail: {check.residuals()}"
        )
    if mcmillan_degree(t, config) != 2 * n:
        raise GramianIdentityViolation(
            "conjugate phase realization is not minimal of dimension 2n"
        )
    return cp


def spectrum_sample(w: Realization, z,
                    config: ToleranceConfig = DEFAULT_TOL):
    """Spectral density sample Phi(z) = W(z) W^T(1/z).

    On the unit circle this equals W(z) W(z)^H and is Hermitian positive
    semi-definite by construction.
    """
    z = complex(z)
    if abs(abs(z) - 1.0) <= 1e-9:
        v = evalfr_many(w, [z], config)[0]
        phi = v @ v.conj().T
        return 0.5 * (phi + phi.conj().T)
    if z == 0:
        raise EvaluationAtPole("spectral density sample undefined at z = 0")
    v = evalfr_many(w, [z], config)[0]
    v_rec = evalfr_many(w, [1.0 / z], config)[0]
    return v @ v_rec.T


def spectrum_samples(w: Realization, zs,
                     config: ToleranceConfig = DEFAULT_TOL):
    """Batched spectral density samples on the unit circle."""
    vals = evalfr_many(w, zs, config)
    phi = vals @ np.conj(np.swapaxes(vals, -1, -2))
    return 0.5 * (phi + np.conj(np.swapaxes(phi, -1, -2)))


def _circle_points(k):
    return np.exp(2j * np.pi * np.arange(k) / k)


def allpass_residual(r: Realization, config: ToleranceConfig = DEFAULT_TOL,
                     samples: int | None = None) -> float:
    """Max deviation of G(z) G(z)^H from the identity over circle samples.

    Returns ``inf`` when a sample hits a pole (a pole on the circle rules
    out the all-pass property by definition).
    """
    if r.n_in != r.n_out:
        raise ValueError("all-pass check requires a square system")
    zs = _circle_points(samples or config.circle_samples)
    try:
        vals = evalfr_many(r, zs, config)
    except EvaluationAtPole:
        return float("inf")
    gap = vals @ np.conj(np.swapaxes(vals, -1, -2)) - np.eye(r.n_out)
    return float(np.max(np.abs(gap)))


def is_all_pass(r: Realization, tol: float | None = None,
                config: ToleranceConfig = DEFAULT_TOL,
                samples: int | None = None) -> bool:
    """True iff ||G(z) G(z)^H - I|| <= tol at every circle sample."""
    if tol is None:
        tol = config.residual_tol
    return allpass_residual(r, config, samples) <= tol
