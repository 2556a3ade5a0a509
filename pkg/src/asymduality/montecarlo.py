"""Per-quanton simulation: outcome sampling, screen positions, group statistics.

Every detected quanton carries one of the three discrimination outcomes. On
outcomes 1 and 2 it lands on the screen with a single-slit envelope (particle
group); on outcome 3 it lands with the coherent two-packet density (wave
group). Positions are drawn by rejection from a two-component Gaussian mixture
proposal built from the exact single-slit envelopes; the cross term is bounded
by its geometric mean, which caps the expected number of proposals per trial
at 2 regardless of configuration.

Randomness is counter based: a Philox stream is keyed by (seed, purpose) with
one purpose for the outcomes and one per rejection round, and trial i always
consumes element i of each stream. A trial's record is therefore a function of
(seed, trial_index) alone, independent of how trials are partitioned across
workers.
"""

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import stats

from .errors import ConsistencyError, ValidationError
from .model import ExperimentConfig, canonical_slits, derive_amplitudes
from .optics import Mode, envelope_sigma, wavepackets_at_screen
from .uqsd import UqsdBasis

_MAX_ROUNDS = 512
_OUTCOME_STREAM = 0
_POSITION_STREAM_BASE = 1


@dataclass(frozen=True)
class SampleRecord:
    outcome: int
    x: float
    trial_index: int


@dataclass(frozen=True)
class SampleBatch:
    """Vectorized sample run; ``records()`` materializes individual trials."""

    outcomes: np.ndarray
    xs: np.ndarray
    seed: int
    acceptance_rate: float

    def __len__(self) -> int:
        return len(self.outcomes)

    def records(self) -> list[SampleRecord]:
        return [
            SampleRecord(outcome=int(o), x=float(x), trial_index=i)
            for i, (o, x) in enumerate(zip(self.outcomes, self.xs))
        ]


@dataclass(frozen=True)
class GroupStats:
    """Counts and fringe fits for the particle (1, 2) and wave (3) groups."""

    n1: int
    n2: int
    n3: int
    group12_fit: float | None
    group3_visibility: float | None
    group3_phase: float | None
    pvalue_flat: float | None

    def to_dict(self) -> dict:
        return {
            "n1": self.n1,
            "n2": self.n2,
            "n3": self.n3,
            "group12_fit": self.group12_fit,
            "group3_visibility": self.group3_visibility,
            "group3_phase": self.group3_phase,
            "pvalue_flat": self.pvalue_flat,
        }


def _stream(seed: int, purpose: int) -> np.random.Generator:
    key = (seed & 0xFFFFFFFFFFFFFFFF) | (purpose << 64)
    return np.random.Generator(np.random.Philox(key=key))


def _branch_table(
    cfg: ExperimentConfig, basis: UqsdBasis, amps
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Amplitude pairs (a1, a2) and coherence factor per outcome, a1^2 + a2^2 = 1."""
    a1 = np.zeros(3)
    a2 = np.zeros(3)
    coh = np.zeros(3)
    a1[0] = 1.0
    a2[1] = 1.0
    p3 = basis.p_outcome3
    if p3 > 0.0:
        root = math.sqrt(p3)
        a1[2] = amps.c1 * basis.beta / root
        a2[2] = amps.c2 * basis.delta_mod / root
        coh[2] = cfg.kappa
    return a1, a2, coh


def sample_batch(cfg: ExperimentConfig, basis: UqsdBasis, n: int, seed: int) -> SampleBatch:
    """Draw ``n`` (outcome, position) pairs, reproducibly for a given seed."""
    if n < 1:
        raise ValidationError(f"sample count must be >= 1, got {n}")
    amps = derive_amplitudes(cfg)
    slits = canonical_slits(cfg, amps)
    gamma = cfg.gamma_big
    centers = np.array([slits.center1, slits.center2])
    sigmas = np.array(
        [envelope_sigma(slits.width1, gamma), envelope_sigma(slits.width2, gamma)]
    )

    p1, p2, p3 = basis.probabilities
    edges = np.array([p1, p1 + p2])
    u = _stream(seed, _OUTCOME_STREAM).random(n)
    outcomes = 1 + np.searchsorted(edges, u, side="right")

    a1_tab, a2_tab, coh_tab = _branch_table(cfg, basis, amps)
    idx = outcomes - 1
    a1 = a1_tab[idx]
    a2 = a2_tab[idx]
    coh = coh_tab[idx]
    cross_weight = coh * a1 * a2
    # Proposal mixture h = (a1^2 + k)*G1 + (a2^2 + k)*G2 with k = coh*a1*a2
    # dominates the density; total proposal mass is 1 + 2k <= 2.
    w1 = a1 * a1 + cross_weight
    bound_mass = 1.0 + 2.0 * cross_weight
    phase = complex(math.cos(slits.theta), math.sin(slits.theta))

    xs = np.zeros(n)
    pending = np.arange(n)
    proposals = 0
    for round_index in range(_MAX_ROUNDS):
        if len(pending) == 0:
            break
        gen = _stream(seed, _POSITION_STREAM_BASE + round_index)
        u_comp = gen.random(n)
        z = gen.standard_normal(n)
        u_accept = gen.random(n)

        proposals += len(pending)
        comp = (u_comp[pending] * bound_mass[pending] >= w1[pending]).astype(int)
        x_try = centers[comp] + sigmas[comp] * z[pending]

        psi1, psi2 = wavepackets_at_screen(cfg, x_try, Mode.EXACT, amps)
        g1 = np.abs(psi1) ** 2
        g2 = np.abs(psi2) ** 2
        density = (
            a1[pending] ** 2 * g1
            + a2[pending] ** 2 * g2
            + 2.0 * cross_weight[pending] * np.real(np.conj(psi1) * psi2 * phase)
        )
        envelope = (a1[pending] ** 2 + cross_weight[pending]) * g1 + (
            a2[pending] ** 2 + cross_weight[pending]
        ) * g2
        accepted = u_accept[pending] * envelope <= density
        xs[pending[accepted]] = x_try[accepted]
        pending = pending[~accepted]
    else:
        raise ConsistencyError(
            f"rejection sampling did not terminate within {_MAX_ROUNDS} rounds"
        )

    return SampleBatch(
        outcomes=outcomes, xs=xs, seed=seed, acceptance_rate=n / proposals
    )


def sample_run(cfg: ExperimentConfig, basis: UqsdBasis, n: int, seed: int) -> list[SampleRecord]:
    """Individual trial records; deterministic in (cfg, n, seed)."""
    return sample_batch(cfg, basis, n, seed).records()


def _as_arrays(records) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(records, SampleBatch):
        return records.outcomes, records.xs
    outcomes = np.fromiter((r.outcome for r in records), dtype=int, count=len(records))
    xs = np.fromiter((r.x for r in records), dtype=float, count=len(records))
    return outcomes, xs


def _bin_expected(density, edges: np.ndarray) -> np.ndarray:
    """Per-bin integral of a smooth density by composite Simpson (3 nodes)."""
    left = edges[:-1]
    right = edges[1:]
    mid = 0.5 * (left + right)
    return (right - left) / 6.0 * (density(left) + 4.0 * density(mid) + density(right))


def _fit_modulation(
    counts: np.ndarray,
    edges: np.ndarray,
    envelope_density,
    total: int,
    freq: float,
    theta: float,
) -> tuple[float, float]:
    """Least-squares amplitude and phase of envelope * (1 + v cos(freq x + psi)).

    The cosine columns carry the exact per-bin average of cos/sin over the bin
    width (a sinc factor), so binning does not bias the fitted amplitude.
    """
    centers = 0.5 * (edges[:-1] + edges[1:])
    width = edges[1] - edges[0]
    base = total * _bin_expected(envelope_density, edges)
    half = 0.5 * freq * width
    sinc = math.sin(half) / half if half != 0.0 else 1.0
    arg = freq * centers + theta
    design = np.column_stack([base * sinc * np.cos(arg), base * sinc * np.sin(arg)])
    target = counts - base
    (a, b), *_ = np.linalg.lstsq(design, target, rcond=None)
    return float(math.hypot(a, b)), float(math.atan2(-b, a))


def group_statistics(
    records,
    cfg: ExperimentConfig,
    basis: UqsdBasis,
    bins: int | None = None,
) -> GroupStats:
    """Histogram-level statistics of the particle and wave groups.

    The fit window spans twelve fringe widths around the cross-envelope
    center. ``group3_visibility``/``group3_phase`` are the fitted fringe
    modulation of the wave group; ``group12_fit`` the (expected near zero)
    modulation of the pooled particle groups; ``pvalue_flat`` the chi-square
    goodness of fit of the particle groups against their analytic envelopes.
    """
    outcomes, xs = _as_arrays(records)
    if len(outcomes) == 0:
        raise ValidationError("records must be nonempty")
    if bins is None:
        bins = 128
    if bins < 32:
        raise ValidationError(f"need at least 32 bins, got {bins}")

    amps = derive_amplitudes(cfg)
    slits = canonical_slits(cfg, amps)
    gamma = cfg.gamma_big
    centers = np.array([slits.center1, slits.center2])
    sigmas = np.array(
        [envelope_sigma(slits.width1, gamma), envelope_sigma(slits.width2, gamma)]
    )
    weights_inv = 1.0 / sigmas**2
    cross_center = float(np.sum(centers * weights_inv) / np.sum(weights_inv))
    window = 6.0 * cfg.fringe_width
    edges = np.linspace(cross_center - window, cross_center + window, bins + 1)
    freq = 2.0 * (slits.center1 - slits.center2) / gamma

    def gauss(k):
        return lambda x: stats.norm.pdf(x, loc=centers[k], scale=sigmas[k])

    n1 = int(np.sum(outcomes == 1))
    n2 = int(np.sum(outcomes == 2))
    n3 = int(np.sum(outcomes == 3))

    group12_fit = None
    pvalue_flat = None
    if n1 + n2 > 0:
        mask = outcomes != 3
        counts, _ = np.histogram(xs[mask], bins=edges)
        p1, p2, _ = basis.probabilities
        share1 = p1 / (p1 + p2)

        def env12(x, s1=share1):
            return s1 * gauss(0)(x) + (1.0 - s1) * gauss(1)(x)

        group12_fit, _ = _fit_modulation(counts, edges, env12, n1 + n2, freq, slits.theta)
        expected = (n1 + n2) * _bin_expected(env12, edges)
        usable = expected >= 10.0
        if int(np.sum(usable)) >= 8:
            chi2 = float(np.sum((counts[usable] - expected[usable]) ** 2 / expected[usable]))
            pvalue_flat = float(stats.chi2.sf(chi2, int(np.sum(usable)) - 1))

    group3_visibility = None
    group3_phase = None
    if n3 > 0:
        counts, _ = np.histogram(xs[outcomes == 3], bins=edges)
        a1_tab, a2_tab, _ = _branch_table(cfg, basis, amps)
        a1sq, a2sq = a1_tab[2] ** 2, a2_tab[2] ** 2

        def env3(x, w1=a1sq, w2=a2sq):
            return w1 * gauss(0)(x) + w2 * gauss(1)(x)

        group3_visibility, offset = _fit_modulation(counts, edges, env3, n3, freq, slits.theta)
        group3_phase = slits.theta + offset

    return GroupStats(
        n1=n1,
        n2=n2,
        n3=n3,
        group12_fit=group12_fit,
        group3_visibility=group3_visibility,
        group3_phase=group3_phase,
        pvalue_flat=pvalue_flat,
    )
