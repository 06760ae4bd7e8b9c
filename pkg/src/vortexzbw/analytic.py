"""Closed-form amplitude laws and the numerical consistency report.

The trembling amplitude of a vortex packet is controlled by the mean
transverse momentum of its profile.  This module collects the printed
closed forms for that quantity and its limits:

  * I_closed_form : the full Bessel-Gaussian expression in X = (w0 k_r)^2/8,
        (sqrt(2 pi)/w0) e^{-X} [ (1/2 + X) I_ell(X)
            + (X/2)(I_{ell-1}(X) + I_{ell+1}(X)) ] / I_ell(2X),
    with I_{-1} = I_1, assembled from exponentially scaled Bessel
    functions so it never overflows;
  * gaussian_limit : the X -> 0 law (sqrt(2)/w0) Gamma(ell+3/2)/Gamma(ell+1);
  * large_ell_asymptotic : sqrt(2 ell)/w0 (1 + 3/(8 ell));
  * bessel_limit : the ring momentum k_r itself;
  * huang_amplitude : the zero-charge width law 1/(2 w0);
  * enhancement_factor / gamma_ratio_enhancement : the sqrt(ell) scaling
    of the amplitude and its exact Gamma-ratio form.

run_consistency_report cross-checks every one of these claims against
the certified quadrature pipeline and returns per-case verdicts.  The
X -> 0 evaluation switches to the analytic limit below X = 1e-6 rather
than forming the numerical 0/0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from scipy.special import logsumexp

from .observables import (
    _fitted_amplitude,
    angular_momentum_zbw,
    loglog_slope,
    mean_transverse_momentum,
    sweep_enhancement,
)
from .packet import BGParams
from .special import bessel_I_scaled, log_bessel_I_scaled, log_gamma_ratio

__all__ = [
    "ClosedFormValue",
    "ConsistencyRow",
    "ConsistencyReport",
    "I_closed_form",
    "log_I_closed_form",
    "gaussian_limit",
    "large_ell_asymptotic",
    "bessel_limit",
    "huang_amplitude",
    "enhancement_factor",
    "gamma_ratio_enhancement",
    "run_consistency_report",
    "SWEEP_ELLS",
    "SWEEP_BASE",
    "HUANG_WIDTHS",
    "ANGULAR_ELLS",
]

_SQRT_2PI = math.sqrt(2.0 * math.pi)
_LIMIT_X = 1e-6

# frozen parameter sets shared by the report and the acceptance checks;
# chosen so every row stays inside the non-relativistic guard
SWEEP_ELLS = (16, 32, 64, 128, 256)
SWEEP_BASE = BGParams(ell=0, k_r=0.0, w0=200.0, sigma_z=200.0, k0z=0.0, z0=0.0)
HUANG_WIDTHS = (10.0, 20.0, 40.0)
ANGULAR_ELLS = (0, 1, 2)


def _check_ell(ell) -> int:
    if isinstance(ell, bool) or not isinstance(ell, (int,)):
        raise ValueError("ell must be a plain integer")
    if ell < 0:
        raise ValueError("ell must be >= 0")
    return int(ell)


def _check_positive(name: str, x: float) -> float:
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise ValueError(f"{name} must be positive and finite")
    return x


class ClosedFormValue(NamedTuple):
    value: float
    via_limit: bool


def _log_limit_value(ell: int, w0: float) -> float:
    return math.log(_SQRT_2PI) + math.log(ell + 0.5) - ell * math.log(2.0) - math.log(w0)


def I_closed_form(ell: int, w0: float, k_r: float) -> ClosedFormValue:
    """The printed closed form for the mean transverse momentum.

    Evaluated through scaled Bessel functions: the bracket carries its
    e^{-X} factor node-exactly and the I_ell(2X) denominator is divided
    out in scaled form, leaving a net e^{-2X}.  Below X = 1e-6 the
    analytic small-ring limit sqrt(2 pi)(ell + 1/2)/(2^ell w0) is
    returned instead (flagged via_limit), since the direct quotient is
    0/0 there for ell >= 1.  The value underflows to exactly 0.0 once
    e^{-2X} leaves float64 range; log_I_closed_form stays finite there.
    """
    ell = _check_ell(ell)
    w0 = _check_positive("w0", w0)
    k_r = float(k_r)
    if not math.isfinite(k_r) or k_r < 0.0:
        raise ValueError("k_r must be >= 0 and finite")
    X = (w0 * k_r) ** 2 / 8.0
    if X < _LIMIT_X:
        return ClosedFormValue(math.exp(_log_limit_value(ell, w0)), True)
    bracket = (0.5 + X) * bessel_I_scaled(ell, X) + 0.5 * X * (
        bessel_I_scaled(abs(ell - 1), X) + bessel_I_scaled(ell + 1, X)
    )
    denom = bessel_I_scaled(ell, 2.0 * X)
    value = math.nan
    if bracket > 0.0 and denom > 0.0:
        value = (_SQRT_2PI / w0) * bracket * math.exp(-2.0 * X) / denom
    if not math.isfinite(value):
        # scaled route underflowed (large order, modest X); the log
        # companion handles that corner and may round to 0.0 honestly
        value = math.exp(min(log_I_closed_form(ell, w0, k_r), 700.0))
    return ClosedFormValue(float(value), False)


def log_I_closed_form(ell: int, w0: float, k_r: float) -> float:
    """log of I_closed_form, finite wherever the value is positive.

    This is the positivity certificate for the closed form: the plain
    value underflows to 0.0 for X beyond ~354, while this stays finite
    (and strictly ordered) across the whole tested range.
    """
    ell = _check_ell(ell)
    w0 = _check_positive("w0", w0)
    k_r = float(k_r)
    if not math.isfinite(k_r) or k_r < 0.0:
        raise ValueError("k_r must be >= 0 and finite")
    X = (w0 * k_r) ** 2 / 8.0
    if X < _LIMIT_X:
        return _log_limit_value(ell, w0)
    logs = [
        math.log(0.5 + X) + log_bessel_I_scaled(ell, X),
        math.log(0.5 * X) + log_bessel_I_scaled(abs(ell - 1), X),
        math.log(0.5 * X) + log_bessel_I_scaled(ell + 1, X),
    ]
    bracket_log = float(logsumexp(logs))
    return (
        math.log(_SQRT_2PI)
        - math.log(w0)
        + bracket_log
        - 2.0 * X
        - log_bessel_I_scaled(ell, 2.0 * X)
    )


def gaussian_limit(ell: int, w0: float) -> float:
    """Mean transverse momentum of the pure vortex Gaussian,
    (sqrt(2)/w0) Gamma(ell + 3/2)/Gamma(ell + 1)."""
    ell = _check_ell(ell)
    w0 = _check_positive("w0", w0)
    return (math.sqrt(2.0) / w0) * math.exp(log_gamma_ratio(ell))


def large_ell_asymptotic(ell: int, w0: float) -> float:
    """High-charge expansion sqrt(2 ell)/w0 (1 + 3/(8 ell)); ell >= 1."""
    ell = _check_ell(ell)
    if ell == 0:
        raise ValueError("the high-charge expansion needs ell >= 1")
    w0 = _check_positive("w0", w0)
    return math.sqrt(2.0 * ell) / w0 * (1.0 + 3.0 / (8.0 * ell))


def bessel_limit(k_r: float) -> float:
    """Narrow-ring limit: the mean transverse momentum is the ring momentum."""
    k_r = float(k_r)
    if not math.isfinite(k_r) or k_r < 0.0:
        raise ValueError("k_r must be >= 0 and finite")
    return k_r


def huang_amplitude(w0: float) -> float:
    """Zero-charge trembling amplitude law, 1/(2 w0) in Compton units."""
    return 0.5 / _check_positive("w0", w0)


def enhancement_factor(ell: int) -> float:
    """sqrt(ell) amplitude enhancement; defined as 1 at ell = 0."""
    ell = _check_ell(ell)
    return 1.0 if ell == 0 else math.sqrt(float(ell))


def gamma_ratio_enhancement(ell: int) -> float:
    """Exact amplitude enhancement Gamma(ell+3/2)Gamma(1)/(Gamma(ell+1)Gamma(3/2)).

    Equals 1 at ell = 0 and 3/2 at ell = 1; grows like
    (2/sqrt(pi)) sqrt(ell) (1 + 3/(8 ell)) at high charge, which is the
    sqrt(ell) scaling with a fixed prefactor.
    """
    ell = _check_ell(ell)
    return math.exp(log_gamma_ratio(ell) - log_gamma_ratio(0))


# ---------------------------------------------------------------------------
# consistency report
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConsistencyRow:
    claim_id: str
    case: str
    description: str
    reference_value: float
    computed_value: float
    rel_deviation: float
    verdict: str
    note: str = ""


@dataclass(frozen=True)
class ConsistencyReport:
    rows: tuple

    @property
    def claim_ids(self) -> tuple:
        seen = []
        for row in self.rows:
            if row.claim_id not in seen:
                seen.append(row.claim_id)
        return tuple(seen)

    def rows_for(self, claim_id: str) -> tuple:
        return tuple(r for r in self.rows if r.claim_id == claim_id)

    def as_records(self) -> list:
        return [
            {
                "claim": r.claim_id,
                "case": r.case,
                "description": r.description,
                "reference": r.reference_value,
                "computed": r.computed_value,
                "rel_deviation": r.rel_deviation,
                "verdict": r.verdict,
                "note": r.note,
            }
            for r in self.rows
        ]


_THRESHOLDS = {
    "closed_form_vs_quadrature": 1e-3,
    "small_ring_limit": 1e-9,
    "large_ring_limit": 1e-3,
    "width_asymptotic": 1e-3,
    "width_scaling": 0.1,
    "charge_scaling": 0.1,
    "zero_charge_reduction": 0.05,
    "angular_tremor_law": 0.05,
}


def _dev(reference: float, computed: float) -> float:
    return abs(reference - computed) / max(abs(reference), abs(computed), 1e-300)


def _verdict(claim_id: str, dev: float) -> str:
    return "confirmed" if dev <= _THRESHOLDS[claim_id] else "deviates"


def _row(claim_id, case, description, reference, computed, note="") -> ConsistencyRow:
    dev = _dev(reference, computed)
    return ConsistencyRow(
        claim_id=claim_id,
        case=case,
        description=description,
        reference_value=float(reference),
        computed_value=float(computed),
        rel_deviation=dev,
        verdict=_verdict(claim_id, dev),
        note=note,
    )


def _claim_closed_form_vs_quadrature() -> list:
    desc = "full closed form versus certified quadrature of <k_perp>"
    rows = []
    for ell, X in ((0, 1e-8), (0, 1.0), (1, 1.0), (2, 1.0)):
        k_r = math.sqrt(8.0 * X)
        cf = I_closed_form(ell, 1.0, k_r)
        params = BGParams(ell=ell, k_r=k_r, w0=1.0, sigma_z=1.0, k0z=0.0, z0=0.0)
        num = mean_transverse_momentum(params)
        note = "evaluated via the analytic small-ring limit" if cf.via_limit else ""
        rows.append(_row(
            "closed_form_vs_quadrature",
            f"ell={ell}, X={X:g}",
            desc,
            cf.value,
            num,
            note,
        ))
    return rows


def _claim_small_ring() -> list:
    desc = "X -> 0 limit of the closed form versus the vortex-Gaussian law"
    rows = []
    for ell in range(7):
        cf = I_closed_form(ell, 1.0, 0.0)
        law = gaussian_limit(ell, 1.0)
        rows.append(_row(
            "small_ring_limit",
            f"ell={ell}",
            desc,
            cf.value,
            law,
            "agreement is an identity only at ell = 0 and ell = 1",
        ))
    return rows


def _claim_large_ring() -> list:
    desc = "X -> infinity behaviour of the closed form versus the ring momentum"
    rows = []
    for ell in (0, 3):
        k_r = 100.0
        cf = I_closed_form(ell, 1.0, k_r)
        params = BGParams(ell=ell, k_r=k_r, w0=1.0, sigma_z=1.0, k0z=0.0, z0=0.0)
        num = mean_transverse_momentum(params)
        logv = log_I_closed_form(ell, 1.0, k_r)
        rows.append(_row(
            "large_ring_limit",
            f"ell={ell}, w0*k_r=100",
            desc,
            cf.value,
            num,
            f"closed form decays like exp(-2X): log value {logv:.1f}; "
            f"narrow-ring law predicts {bessel_limit(k_r):g}",
        ))
    return rows


def _claim_width_asymptotic() -> list:
    desc = "high-charge expansion versus quadrature at vanishing ring momentum"
    rows = []
    for ell in (25, 50, 100, 200):
        asym = large_ell_asymptotic(ell, 1.0)
        params = BGParams(ell=ell, k_r=0.0, w0=1.0, sigma_z=1.0, k0z=0.0, z0=0.0)
        num = mean_transverse_momentum(params)
        rows.append(_row(
            "width_asymptotic",
            f"ell={ell}",
            desc,
            asym,
            num,
            "remainder shrinks like 1/ell^2",
        ))
    return rows


def _amplitudes_for_widths() -> dict:
    out = {}
    for w0 in HUANG_WIDTHS:
        params = BGParams(ell=0, k_r=0.0, w0=w0, sigma_z=w0, k0z=0.0, z0=0.0)
        amp, _ = _fitted_amplitude(params, 11.0, 168, 1e-10, 1e-8, 1e-10)
        out[w0] = amp
    return out


def _claim_width_scaling() -> list:
    amps = _amplitudes_for_widths()
    slope = loglog_slope(list(amps.keys()), list(amps.values()))
    note = "; ".join(f"w0={w0:g}: amplitude={amps[w0]:.6g}" for w0 in HUANG_WIDTHS)
    return [_row(
        "width_scaling",
        "ell=0, w0 in {10, 20, 40}",
        "fitted tremor amplitude scales like 1/w0 at zero charge",
        -1.0,
        slope,
        note,
    )]


def _claim_charge_scaling() -> list:
    rows = sweep_enhancement(SWEEP_ELLS, SWEEP_BASE)
    slope = loglog_slope([r.ell for r in rows], [r.amplitude for r in rows])
    note = "; ".join(f"ell={r.ell}: amplitude={r.amplitude:.6g}" for r in rows)
    return [_row(
        "charge_scaling",
        "ell in {16, 32, 64, 128, 256}, w0=200",
        "fitted tremor amplitude grows like sqrt(ell)",
        0.5,
        slope,
        note,
    )]


def _claim_zero_charge_reduction() -> list:
    w0 = 40.0
    params = BGParams(ell=0, k_r=0.0, w0=w0, sigma_z=w0, k0z=0.0, z0=0.0)
    amp, _ = _fitted_amplitude(params, 11.0, 168, 1e-10, 1e-8, 1e-10)
    half_mean = 0.5 * mean_transverse_momentum(params)
    return [_row(
        "zero_charge_reduction",
        f"ell=0, w0={w0:g}",
        "zero-charge amplitude reduces to half the mean transverse momentum",
        1.0,
        amp / half_mean,
        f"the bare width law 1/(2 w0) = {huang_amplitude(w0):g} differs from "
        f"the fitted amplitude by the fixed Gaussian factor sqrt(pi/2) ~ 1.2533",
    )]


def _claim_angular_tremor() -> list:
    t_eval = math.pi / 2.0
    rows = []
    for ell in ANGULAR_ELLS:
        params = BGParams(ell=ell, k_r=0.04, w0=40.0, sigma_z=40.0, k0z=0.0, z0=0.0)
        law = (ell + 1.0) * (1.0 - math.cos(2.0 * t_eval))
        num = angular_momentum_zbw(params, t_eval)
        rows.append(_row(
            "angular_tremor_law",
            f"ell={ell}, 2t=pi",
            "angular tremor follows (ell + 1)(1 - cos 2 t) at low momentum",
            law,
            num,
        ))
    return rows


def _claim_transverse_as_printed() -> list:
    return [ConsistencyRow(
        claim_id="transverse_tremor_as_printed",
        case="any parameters",
        description="component-level transverse tremor expressions, taken "
        "verbatim, average to zero over azimuth at every radius",
        reference_value=0.0,
        computed_value=0.0,
        rel_deviation=0.0,
        verdict="not evaluable as printed",
        note="the radial interference displacement computed by the pipeline "
        "carries the observable amplitude instead",
    )]


def run_consistency_report() -> ConsistencyReport:
    """Evaluate every closed-form claim against the numerical pipeline.

    Deterministic: all parameter grids are frozen module constants and
    every evaluation is a pure function of them.  Each claim appears
    once; multi-case claims contribute one row per case.
    """
    rows = []
    rows += _claim_closed_form_vs_quadrature()
    rows += _claim_small_ring()
    rows += _claim_large_ring()
    rows += _claim_width_asymptotic()
    rows += _claim_width_scaling()
    rows += _claim_charge_scaling()
    rows += _claim_zero_charge_reduction()
    rows += _claim_angular_tremor()
    rows += _claim_transverse_as_printed()
    return ConsistencyReport(rows=tuple(rows))
