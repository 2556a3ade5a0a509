"""Optimal unambiguous discrimination of the two detector pointer states.

The detector Hilbert space is enlarged to three dimensions spanned by an
orthonormal basis {|q1>, |q2>, |q3>} in which the pointer states read

    |d1> = alpha |q1> + beta  |q3>
    |d2> = gamma |q2> + delta |q3>

Measuring the observable with eigenvalues (1, 2, 3) on |q1>, |q2>, |q3>
identifies the path with certainty on outcomes 1 and 2 and fails on outcome 3.
The coefficients below minimize the failure probability. Two regimes exist,
split at overlap = c2/c1.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError
from .model import Case, ExperimentConfig, PathAmplitudes, _classify, canonical_theta, derive_amplitudes

_CROSS_CHECK_TOL = 1e-12


@dataclass(frozen=True)
class UqsdBasis:
    """Discrimination-basis coefficients plus the three outcome probabilities.

    Phase convention: alpha, beta, gamma are real and non-negative; delta
    carries the whole detector phase, arg(delta) = theta.
    """

    alpha: float
    beta: float
    gamma: float
    delta_mod: float
    theta: float
    case_label: Case
    p_outcome1: float
    p_outcome2: float
    p_outcome3: float

    def __post_init__(self):
        d1_norm = self.alpha**2 + self.beta**2
        d2_norm = self.gamma**2 + self.delta_mod**2
        if abs(d1_norm - 1.0) > _CROSS_CHECK_TOL:
            raise ConsistencyError(f"|d1> not normalized: alpha^2 + |beta|^2 = {d1_norm}")
        if abs(d2_norm - 1.0) > _CROSS_CHECK_TOL and self.delta_mod != 0.0:
            raise ConsistencyError(f"|d2> not normalized: gamma^2 + |delta|^2 = {d2_norm}")
        total = self.p_outcome1 + self.p_outcome2 + self.p_outcome3
        if abs(total - 1.0) > _CROSS_CHECK_TOL:
            raise ConsistencyError(f"outcome probabilities sum to {total}, expected 1")

    @property
    def delta(self) -> complex:
        return self.delta_mod * complex(math.cos(self.theta), math.sin(self.theta))

    @property
    def probabilities(self) -> tuple[float, float, float]:
        return (self.p_outcome1, self.p_outcome2, self.p_outcome3)

    def detector_vectors(self) -> tuple[np.ndarray, np.ndarray]:
        """Explicit 3-vectors of |d1>, |d2> in the {|q1>,|q2>,|q3>} basis."""
        d1 = np.array([self.alpha, 0.0, self.beta], dtype=complex)
        d2 = np.array([0.0, self.gamma, self.delta], dtype=complex)
        return d1, d2


def path_observable() -> np.ndarray:
    """The three-outcome observable diag(1, 2, 3) in the {|q_k>} basis."""
    return np.diag([1.0, 2.0, 3.0]).astype(complex)


def build_basis(amps: PathAmplitudes, overlap: float, theta: float = 0.0) -> UqsdBasis:
    """Failure-minimizing coefficients for given amplitudes and detector overlap.

    CaseA (overlap <= c2/c1):
        |beta|^2 = overlap*c2/c1,  |delta|^2 = overlap*c1/c2,
        alpha = sqrt(1 - overlap*c2/c1),  gamma = sqrt(1 - overlap*c1/c2)
    CaseB (overlap > c2/c1):
        alpha = sqrt(1 - overlap^2), |beta| = overlap, gamma = 0, |delta| = 1

    The orthogonal limit overlap = 0 keeps delta = 0 (instead of the
    unit-modulus convention) so that beta* delta = <d1|d2> holds trivially and
    the failure probability vanishes.
    """
    if not 0.0 <= overlap <= 1.0:
        raise ConsistencyError(f"overlap must be in [0, 1], got {overlap}")
    c1, c2 = amps.c1, amps.c2
    if overlap == 0.0:
        alpha, beta, gamma, delta = 1.0, 0.0, 1.0, 0.0
        case = Case.A
    else:
        case = _classify(c1, c2, overlap)
        if case is Case.A:
            beta_sq = overlap * c2 / c1
            delta_sq = overlap * c1 / c2
            alpha = math.sqrt(max(0.0, 1.0 - beta_sq))
            beta = math.sqrt(beta_sq)
            gamma = math.sqrt(max(0.0, 1.0 - delta_sq))
            delta = math.sqrt(min(1.0, delta_sq))
        else:
            alpha = math.sqrt(max(0.0, 1.0 - overlap * overlap))
            beta = overlap
            gamma = 0.0
            delta = 1.0
    p1 = c1 * c1 * alpha * alpha
    p2 = c2 * c2 * gamma * gamma
    p3 = c1 * c1 * beta * beta + c2 * c2 * delta * delta
    return UqsdBasis(
        alpha=alpha,
        beta=beta,
        gamma=gamma,
        delta_mod=delta,
        theta=theta,
        case_label=case,
        p_outcome1=p1,
        p_outcome2=p2,
        p_outcome3=p3,
    )


def basis_from_config(cfg: ExperimentConfig) -> tuple[PathAmplitudes, UqsdBasis]:
    """Derive canonical amplitudes and the matching discrimination basis."""
    amps = derive_amplitudes(cfg)
    return amps, build_basis(amps, cfg.overlap, canonical_theta(cfg, amps))


def outcome_probabilities(basis: UqsdBasis, amps: PathAmplitudes) -> tuple[float, float, float]:
    """(P1, P2, P3) = (c1^2 alpha^2, c2^2 gamma^2, c1^2 |beta|^2 + c2^2 |delta|^2)."""
    c1sq = amps.c1 * amps.c1
    c2sq = amps.c2 * amps.c2
    return (
        c1sq * basis.alpha**2,
        c2sq * basis.gamma**2,
        c1sq * basis.beta**2 + c2sq * basis.delta_mod**2,
    )


def closed_form_distinguishability(amps: PathAmplitudes, overlap: float) -> float:
    """Case closed forms: 1 - 2*c1*c2*overlap (CaseA) or c1^2*(1 - overlap^2) (CaseB)."""
    if _classify(amps.c1, amps.c2, overlap) is Case.A:
        return 1.0 - amps.v0 * overlap
    return amps.c1 * amps.c1 * (1.0 - overlap * overlap)


def distinguishability(basis: UqsdBasis, amps: PathAmplitudes) -> float:
    """Maximum probability of unambiguously identifying the path.

    Computed three ways (1 - P3, P1 + P2, and the case closed form) which must
    agree to 1e-12; disagreement raises ``ConsistencyError``.
    """
    p1, p2, p3 = outcome_probabilities(basis, amps)
    from_failure = 1.0 - p3
    from_success = p1 + p2
    if abs(from_failure - from_success) > _CROSS_CHECK_TOL:
        raise ConsistencyError(
            f"distinguishability routes disagree: 1-P3 = {from_failure!r}, "
            f"P1+P2 = {from_success!r}"
        )
    # |beta||delta| reproduces the overlap in every regime, including the
    # orthogonal limit where both factors vanish.
    closed = closed_form_distinguishability(amps, basis.beta * basis.delta_mod)
    if abs(closed - from_success) > _CROSS_CHECK_TOL:
        raise ConsistencyError(
            f"closed-form distinguishability {closed!r} disagrees with P1+P2 = {from_success!r}"
        )
    return closed


def reconstructed_overlap(basis: UqsdBasis) -> complex:
    """beta* delta, which must reproduce <d1|d2> = overlap * exp(i*theta)."""
    return basis.beta * basis.delta
