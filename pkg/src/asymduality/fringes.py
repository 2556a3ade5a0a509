"""Fringe metrology: visibility and spacing extracted from sampled patterns.

Two visibility estimators are reported. ``v_raw`` is the plain contrast
(Imax - Imin)/(Imax + Imin) of the fringe pair nearest the cross-envelope
center, which still carries single-slit envelope effects. ``v_envelope_comp``
removes the envelope structure entirely by normalizing the oscillatory part
against the geometric mean of the two single-slit envelopes,

    s(x) = (I(x) - E1(x) - E2(x)) / (2 sqrt(E1(x) E2(x))),

whose amplitude times 2*amp1*amp2 is the envelope-free fringe visibility
(2*c1*c2*overlap*kappa for the unconditioned pattern). Extrema are located by
neighbor comparison and refined with a three-point parabola so the result does
not hinge on grid resolution.
"""

import math
from dataclasses import dataclass

import numpy as np

from .model import ExperimentConfig, derive_amplitudes
from .optics import IntensityPattern

# Fringes are analysed where the cross envelope retains at least this fraction
# of its peak; beyond that the oscillation is numerically meaningless.
_REGION_FLOOR = 1e-2


@dataclass(frozen=True)
class FringeMetrics:
    v_raw: float
    v_envelope_comp: float
    spacing: float | None
    n_extrema: int

    def to_dict(self) -> dict:
        return {
            "v_raw": self.v_raw,
            "v_envelope_comp": self.v_envelope_comp,
            "spacing": self.spacing,
            "n_extrema": self.n_extrema,
        }


def ideal_visibility(cfg: ExperimentConfig) -> float:
    """Envelope-free fringe visibility 2*c1*c2*overlap, times kappa when dephased."""
    amps = derive_amplitudes(cfg)
    return amps.v0 * cfg.overlap * cfg.kappa


def _refine(x: np.ndarray, y: np.ndarray, i: int) -> tuple[float, float]:
    """Sub-grid extremum via a parabola through three neighbouring samples."""
    if i <= 0 or i >= len(y) - 1:
        return float(x[i]), float(y[i])
    denom = y[i - 1] - 2.0 * y[i] + y[i + 1]
    if denom == 0.0:
        return float(x[i]), float(y[i])
    shift = 0.5 * (y[i - 1] - y[i + 1]) / denom
    h = x[i + 1] - x[i]
    return float(x[i] + shift * h), float(y[i] - 0.25 * (y[i - 1] - y[i + 1]) * shift)


def refined_extrema(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Parabola-refined local maxima and minima of a sampled curve.

    Returns (max_positions, max_values, min_positions, min_values), each sorted
    by position.
    """
    interior = np.arange(1, len(y) - 1)
    is_max = (y[1:-1] > y[:-2]) & (y[1:-1] >= y[2:])
    is_min = (y[1:-1] < y[:-2]) & (y[1:-1] <= y[2:])
    maxima = [_refine(x, y, i) for i in interior[is_max]]
    minima = [_refine(x, y, i) for i in interior[is_min]]
    mx = np.array([p for p, _ in maxima])
    mv = np.array([v for _, v in maxima])
    nx = np.array([p for p, _ in minima])
    nv = np.array([v for _, v in minima])
    return mx, mv, nx, nv


def _nearest_pair(
    center: float,
    max_pos: np.ndarray,
    max_val: np.ndarray,
    min_pos: np.ndarray,
    min_val: np.ndarray,
) -> tuple[float, float] | None:
    """Value of the maximum closest to ``center`` and of its adjacent minimum."""
    if len(max_pos) == 0 or len(min_pos) == 0:
        return None
    k = int(np.argmin(np.abs(max_pos - center)))
    xm = max_pos[k]
    left = np.flatnonzero(min_pos < xm)
    right = np.flatnonzero(min_pos > xm)
    candidates = []
    if len(left):
        candidates.append(left[-1])
    if len(right):
        candidates.append(right[0])
    if not candidates:
        return None
    j = min(candidates, key=lambda idx: abs(min_pos[idx] - center))
    return float(max_val[k]), float(min_val[j])


def measure_visibility(pattern: IntensityPattern) -> FringeMetrics:
    """Extract raw and envelope-compensated visibility near the fringe center.

    Patterns without a cross term (orthogonal detector states, fully dephased,
    or single-outcome conditioning) report zero visibility rather than failing;
    ``n_extrema`` then counts the envelope-only peaks.
    """
    x = pattern.xs
    values = pattern.values
    has_cross = (
        pattern.coherence_scale != 0.0 and pattern.amp1 != 0.0 and pattern.amp2 != 0.0
    )
    if not has_cross:
        mx, _, nx, _ = refined_extrema(x, values)
        return FringeMetrics(
            v_raw=0.0,
            v_envelope_comp=0.0,
            spacing=_mean_spacing(mx),
            n_extrema=len(mx) + len(nx),
        )

    cross_env = np.sqrt(pattern.envelope1 * pattern.envelope2)
    region = cross_env >= _REGION_FLOOR * float(np.max(cross_env))
    xr = x[region]
    # Fringe center: where the cross-term envelope peaks, robust against
    # strongly asymmetric slit widths.
    center, _ = _refine(x, cross_env, int(np.argmax(cross_env)))

    raw_mx, raw_mv, raw_nx, raw_nv = refined_extrema(xr, values[region])
    n_extrema = len(raw_mx) + len(raw_nx)
    v_raw = 0.0
    if n_extrema >= 3:
        pair = _nearest_pair(center, raw_mx, raw_mv, raw_nx, raw_nv)
        if pair is not None and pair[0] + pair[1] > 0.0:
            v_raw = max(0.0, (pair[0] - pair[1]) / (pair[0] + pair[1]))

    signal = (values[region] - pattern.envelope1[region] - pattern.envelope2[region]) / (
        2.0 * cross_env[region]
    )
    sig_mx, sig_mv, sig_nx, sig_nv = refined_extrema(xr, signal)
    v_comp = 0.0
    pair = _nearest_pair(center, sig_mx, sig_mv, sig_nx, sig_nv)
    if pair is not None:
        amplitude = 0.5 * (pair[0] - pair[1])
        v_comp = max(0.0, 2.0 * pattern.amp1 * pattern.amp2 * amplitude)

    return FringeMetrics(
        v_raw=v_raw,
        v_envelope_comp=v_comp,
        spacing=_mean_spacing(sig_mx),
        n_extrema=n_extrema,
    )


def measure_spacing(pattern: IntensityPattern) -> float | None:
    """Mean distance between consecutive refined fringe maxima, or None if < 3."""
    metrics = measure_visibility(pattern)
    return metrics.spacing


def _mean_spacing(max_positions: np.ndarray) -> float | None:
    if len(max_positions) < 3:
        return None
    return float(np.mean(np.diff(np.sort(max_positions))))


def fringe_peak_positions(pattern: IntensityPattern) -> np.ndarray:
    """Refined maxima positions of the envelope-compensated oscillation."""
    cross_env = np.sqrt(pattern.envelope1 * pattern.envelope2)
    peak = float(np.max(cross_env))
    if peak <= 0.0:
        return np.array([])
    region = cross_env >= _REGION_FLOOR * peak
    signal = (
        pattern.values[region] - pattern.envelope1[region] - pattern.envelope2[region]
    ) / (2.0 * cross_env[region])
    mx, _, _, _ = refined_extrema(pattern.xs[region], signal)
    return mx


def expected_peak_phase_misfit(pattern: IntensityPattern) -> float:
    """Largest distance of measured peaks from the cosine-maximum condition.

    Peaks of the compensated oscillation should sit where
    fringe_freq * x + theta is a multiple of 2*pi; returns the worst absolute
    offset in x units.
    """
    peaks = fringe_peak_positions(pattern)
    if len(peaks) == 0 or pattern.fringe_freq == 0.0:
        return 0.0
    period = 2.0 * math.pi / abs(pattern.fringe_freq)
    phase_x = (peaks + pattern.theta / pattern.fringe_freq) % period
    return float(np.max(np.minimum(phase_x, period - phase_x)))
