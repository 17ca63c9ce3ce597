"""Generation and verification of minimal spectral factors.

Every minimal spectral factor of the density of W- is W- times a left
all-pass divisor of the conjugate phase function, and conversely the
quotient W-^{-1} W0 of any minimal factor W0 is such a divisor.  This module
generates factors from divisors, verifies candidate factors, and extracts
and certifies the divisor of a given candidate.

Verification never raises on a mathematically bad *candidate* (bad
candidates are data); exceptions are reserved for numerical breakdowns in
generated objects.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .divisors import (
    AllPassDivisor,
    SubspaceSpec,
    divisor_from_projector,
    projector_from_spec,
)
from .errors import (
    DegreeViolation,
    NotAFactor,
    NotMinimalFactor,
    ParameterHitsSpectrum,
    SpectralFactorsError,
    SpectrumMismatch,
)
from .matnum import DEFAULT_TOL, ToleranceConfig
from .spectral import (
    allpass_residual,
    conjugate_phase,
    extremal_set,
    spectrum_samples,
)
from .statespace import (
    PoleZeroReport,
    Realization,
    evalfr_many,
    inverse,
    mcmillan_degree,
    minimal,
    moebius,
    poles_zeros,
    series,
)

__all__ = [
    "FactorReport",
    "minimal_factor",
    "extract_left_divisor",
    "verify_factor",
    "factor_family",
    "spectrum_gap",
    "orthogonal_equivalence_gap",
]

# Sampled all-pass certificates accumulate circle-evaluation error, so they
# run at a looser threshold than equation residuals.
ALLPASS_CERT_TOL = 1e-7


@dataclass(frozen=True)
class FactorReport:
    """Verification record for one candidate or generated factor."""

    degree: int
    expected_degree: int
    spectrum_residual: float
    allpass_residual: float | None
    pole_zero: PoleZeroReport | None
    passed: bool
    reasons: tuple = ()

    def to_dict(self):
        return {
            "degree": self.degree,
            "expected_degree": self.expected_degree,
            "spectrum_residual": self.spectrum_residual,
            "allpass_residual": self.allpass_residual,
            "pole_zero": None if self.pole_zero is None else self.pole_zero.to_dict(),
            "passed": self.passed,
            "reasons": list(self.reasons),
        }

    def __str__(self):
        verdict = "pass" if self.passed else "fail"
        lines = [
            f"verdict:           {verdict}",
            f"degree:            {self.degree} (expected {self.expected_degree})",
            f"spectrum residual: {self.spectrum_residual:.3e}",
        ]
        if self.allpass_residual is not None:
            lines.append(f"all-pass residual: {self.allpass_residual:.3e}")
        if self.pole_zero is not None:
            lines.append(f"poles:             {np.round(self.pole_zero.poles, 6)}")
            if self.pole_zero.zeros is not None:
                lines.append(f"zeros:             {np.round(self.pole_zero.zeros, 6)}")
        for r in self.reasons:
            lines.append(f"reason:            {r}")
        return "\n".join(lines)


def _circle(k):
    return np.exp(2j * np.pi * np.arange(k) / k)


def spectrum_gap(w: Realization, w_ref: Realization,
                 config: ToleranceConfig = DEFAULT_TOL,
                 samples: int | None = None) -> float:
    """Largest entrywise gap between the two spectral densities on the
    circle.  Returns ``inf`` if either system has a pole on a sample."""
    zs = _circle(samples or config.circle_samples)
    try:
        phi_w = spectrum_samples(w, zs, config)
        phi_ref = spectrum_samples(w_ref, zs, config)
    except Exception:
        return float("inf")
    return float(np.max(np.abs(phi_w - phi_ref)))


def verify_factor(w: Realization, w_minus: Realization,
                  config: ToleranceConfig = DEFAULT_TOL,
                  samples: int | None = None) -> FactorReport:
    """Check a candidate factor against the outer factor's spectrum.

    Compares spectral density samples on the circle, checks the McMillan
    degree against that of W-, and inventories poles and zeros.  Bad
    candidates produce a failing report, never an exception.
    """
    expected = mcmillan_degree(w_minus, config)
    residual = spectrum_gap(w, w_minus, config, samples)
    degree = mcmillan_degree(w, config)
    reasons = []
    if degree != expected:
        reasons.append(f"McMillan degree {degree} != expected {expected}")
    if not residual <= config.residual_tol:
        reasons.append(
            f"spectrum residual {residual:.3e} exceeds {config.residual_tol:.1e}"
        )
    try:
        pz = poles_zeros(w, config)
    except Exception:
        pz = None
    return FactorReport(
        degree=degree, expected_degree=expected, spectrum_residual=residual,
        allpass_residual=None, pole_zero=pz, passed=not reasons,
        reasons=tuple(reasons),
    )


def minimal_factor(w_minus: Realization, div: AllPassDivisor,
                   config: ToleranceConfig = DEFAULT_TOL):
    """Minimal spectral factor W = W- T_l generated by a divisor.

    Returns the reduced factor and its verification report.  For a divisor
    built from the conjugate phase of ``w_minus`` the degree equals the
    degree of W- and the spectrum matches exactly; violations signal
    numerical failure and raise.
    """
    w = minimal(series(w_minus, div.t_ell), config)
    report = verify_factor(w, w_minus, config)
    if report.degree != report.expected_degree:
        raise DegreeViolation(
            f"generated factor has degree {report.degree}, expected "
            f"{report.expected_degree}"
        )
    if not report.spectrum_residual <= config.residual_tol:
        raise SpectrumMismatch(
            f"generated factor spectrum residual {report.spectrum_residual:.3e}"
        )
    return w, report


def extract_left_divisor(w_minus: Realization, w0: Realization,
                         config: ToleranceConfig = DEFAULT_TOL,
                         w_bar_plus: Realization | None = None):
    """Extract and certify the divisor of a candidate minimal factor.

    Computes T = W-^{-1} W0 reduced, requires it to be all-pass (otherwise
    the candidate does not share the spectrum: NotAFactor), then certifies
    degree additivity against the conjugate phase function through the
    cofactor W0^{-1} Wbar+ (failure: NotMinimalFactor).

    Returns the extracted divisor and a report on the candidate.
    """
    t_minus = minimal(series(inverse(w_minus, config), w0), config)
    ap_res = allpass_residual(t_minus, config)
    if ap_res > ALLPASS_CERT_TOL:
        raise NotAFactor(
            f"quotient is not all-pass (residual {ap_res:.3e}); the candidate "
            "is not a spectral factor of the same density"
        )
    if w_bar_plus is None:
        w_bar_plus = extremal_set(w_minus, config).w_bar_plus
    t_plus = minimal(series(inverse(w0, config), w_bar_plus), config)
    total = 2 * w_minus.n
    if t_minus.n + t_plus.n != total:
        raise NotMinimalFactor(
            f"divisor degrees {t_minus.n} + {t_plus.n} != {total}; the "
            "candidate factor is not minimal"
        )
    report = verify_factor(w0, w_minus, config)
    report = FactorReport(
        degree=report.degree, expected_degree=report.expected_degree,
        spectrum_residual=report.spectrum_residual, allpass_residual=ap_res,
        pole_zero=report.pole_zero, passed=report.passed,
        reasons=report.reasons,
    )
    return t_minus, report


def factor_family(w_minus: Realization, specs,
                  config: ToleranceConfig = DEFAULT_TOL,
                  moebius_param: float | bool | None = None):
    """Generate the factors for a batch of subspace specifications.

    ``moebius_param`` routes the pipeline through a Moebius change of
    variable: a float uses that parameter, ``True`` picks one automatically,
    ``None`` (default) processes the model as given.  Factors are mapped
    back to the original variable and re-verified.

    Returns a list of (factor, report) pairs, one per specification.
    """
    from .statespace import choose_moebius_parameter  # local: avoid clutter

    a_param = None
    w_work = w_minus
    if moebius_param is not None and moebius_param is not False:
        if moebius_param is True:
            pz = poles_zeros(w_minus, config)
            zeros = pz.zeros if pz.zeros is not None else []
            a_param = choose_moebius_parameter(pz.poles, zeros, config)
        else:
            a_param = float(moebius_param)
        w_work = moebius(w_minus, a_param, config)

    cp = conjugate_phase(w_work, config)
    out = []
    for spec in specs:
        if isinstance(spec, SubspaceSpec):
            pi = projector_from_spec(cp, spec, config)
        else:
            pi = np.asarray(spec, dtype=float)
        div = divisor_from_projector(cp, pi, config)
        w, report = minimal_factor(w_work, div, config)
        if a_param is not None:
            try:
                w = moebius(w, -a_param, config)
            except SpectralFactorsError as exc:
                raise ParameterHitsSpectrum(
                    "factor is improper in the original variable (pole at "
                    "infinity); it is representable only in the transformed "
                    "variable"
                ) from exc
            report = verify_factor(w, w_minus, config)
            if report.degree != report.expected_degree:
                raise DegreeViolation(
                    f"mapped-back factor degree {report.degree} != "
                    f"{report.expected_degree}"
                )
            if not report.spectrum_residual <= config.residual_tol:
                raise SpectrumMismatch(
                    "mapped-back factor spectrum residual "
                    f"{report.spectrum_residual:.3e}"
                )
        out.append((w, report))
    return out


def orthogonal_equivalence_gap(r1: Realization, r2: Realization,
                               config: ToleranceConfig = DEFAULT_TOL,
                               samples: int = 16) -> float:
    """Distance from "equal up to a constant orthogonal right factor".

    Evaluates O(z) = G1(z)^{-1} G2(z) on circle samples and measures the
    deviation of O from a single real orthogonal constant.  Factors of the
    same spectrum that are essentially equal give a gap at rounding level.
    """
    zs = np.exp(1j * (0.2831853 + 2.0 * np.pi * np.arange(samples) / samples))
    v1 = evalfr_many(r1, zs, config)
    v2 = evalfr_many(r2, zs, config)
    o = np.linalg.solve(v1, v2)
    o_ref = np.real(o[0])
    gap = float(np.max(np.abs(o - o_ref)))
    gap = max(gap, float(np.linalg.norm(o_ref.T @ o_ref - np.eye(o_ref.shape[0]))))
    return gap
