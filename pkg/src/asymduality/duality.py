"""Distinguishability-visibility duality relations and coherence diagnostics.

For pure states the two regimes saturate their respective relations exactly:

    CaseA:  D_Q + V = 1
    CaseB:  D_Q / (  (1 + P0)/2 ) + V^2 / V0^2 = 1

while mixedness (kappa < 1) turns both into strict inequalities and
D_Q + V <= 1 holds everywhere. Identity checks are reported as violation
flags rather than exceptions so parameter sweeps can log offenders.
"""

import math
from dataclasses import dataclass

from .errors import ValidationError
from .model import Case, ExperimentConfig, PathAmplitudes, canonical_theta, derive_amplitudes
from .uqsd import UqsdBasis, basis_from_config, distinguishability

_IDENTITY_TOL = 1e-12
_SATURATION_TOL = 1e-9


@dataclass(frozen=True)
class QuantonDetectorState:
    """Reduced description of the quanton-plus-detector state after the slits.

    ``kappa`` is the survival factor of the path off-diagonal element under
    path-basis dephasing; kappa = 1 is the pure state. The path coherence
    element is rho12 = kappa * c1 * c2 * <d2|d1>.
    """

    amps: PathAmplitudes
    overlap: float
    theta: float
    kappa: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.overlap <= 1.0:
            raise ValidationError(f"overlap must be in [0, 1], got {self.overlap}", field="overlap")
        if not 0.0 <= self.kappa <= 1.0:
            raise ValidationError(f"kappa must be in [0, 1], got {self.kappa}", field="kappa")

    @property
    def is_pure(self) -> bool:
        return self.kappa == 1.0

    @property
    def rho12_mod(self) -> float:
        return self.kappa * self.amps.c1 * self.amps.c2 * self.overlap

    @property
    def rho12(self) -> complex:
        return self.rho12_mod * complex(math.cos(self.theta), -math.sin(self.theta))


def state_from_config(cfg: ExperimentConfig) -> QuantonDetectorState:
    amps = derive_amplitudes(cfg)
    return QuantonDetectorState(
        amps=amps, overlap=cfg.overlap, theta=canonical_theta(cfg, amps), kappa=cfg.kappa
    )


def coherence(state: QuantonDetectorState) -> float:
    """Normalized l1 coherence of the reduced path state: 2 |rho12|.

    Equals the ideal fringe visibility; for pure states 2*c1*c2*overlap.
    """
    return 2.0 * state.rho12_mod


def apply_dephasing(state: QuantonDetectorState, kappa: float) -> QuantonDetectorState:
    """Scale the path coherence by ``kappa``, leaving populations untouched."""
    if not 0.0 <= kappa <= 1.0:
        raise ValidationError(f"kappa must be in [0, 1], got {kappa}", field="kappa")
    return QuantonDetectorState(
        amps=state.amps, overlap=state.overlap, theta=state.theta, kappa=state.kappa * kappa
    )


@dataclass(frozen=True)
class DualityReport:
    """All duality-relation diagnostics for one configuration."""

    d_q: float
    v_analytic: float
    v_measured: float | None
    v0: float
    p0_pred: float
    coherence_c: float
    case_label: Case
    lhs_duality1: float
    lhs_duality2: float
    englert_d: float | None
    englert_lhs: float | None
    saturated1: bool
    saturated2: bool
    violations: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "d_q": self.d_q,
            "v_analytic": self.v_analytic,
            "v_measured": self.v_measured,
            "v0": self.v0,
            "p0_pred": self.p0_pred,
            "coherence_c": self.coherence_c,
            "case": self.case_label.value,
            "lhs_duality1": self.lhs_duality1,
            "lhs_duality2": self.lhs_duality2,
            "englert_d": self.englert_d,
            "englert_lhs": self.englert_lhs,
            "saturated1": self.saturated1,
            "saturated2": self.saturated2,
            "violations": list(self.violations),
        }


def evaluate_duality(
    state: QuantonDetectorState, basis: UqsdBasis, v_measured: float | None = None
) -> DualityReport:
    """Evaluate both duality relations, the global bound, and their gaps.

    The expected-gap identities subsume the pure-state saturation checks
    (expected gap zero) and the strict inequality under dephasing (expected
    gap positive); any mismatch beyond 1e-12 is recorded in ``violations``.
    """
    amps = state.amps
    overlap = state.overlap
    kappa = state.kappa
    v0 = amps.v0
    p0 = amps.p0_pred

    d_q = distinguishability(basis, amps)
    v = kappa * overlap * v0
    c = coherence(state)

    lhs1 = d_q + v
    ratio = (v / v0) if v0 > 0.0 else 0.0
    lhs2 = d_q / (0.5 * (1.0 + p0)) + ratio * ratio

    violations: list[str] = []
    if lhs1 > 1.0 + _IDENTITY_TOL:
        violations.append(f"global-inequality: D_Q + V = {lhs1!r} exceeds 1")
    if basis.case_label is Case.A:
        expected_gap = (1.0 - kappa) * overlap * v0
        if abs((1.0 - lhs1) - expected_gap) > _IDENTITY_TOL:
            violations.append(
                f"duality1-gap: 1 - (D_Q + V) = {1.0 - lhs1!r}, expected {expected_gap!r}"
            )
    elif v0 > 0.0:
        expected_gap = overlap * overlap * (1.0 - kappa * kappa)
        if abs((1.0 - lhs2) - expected_gap) > _IDENTITY_TOL:
            violations.append(
                f"duality2-gap: 1 - lhs2 = {1.0 - lhs2!r}, expected {expected_gap!r}"
            )

    englert_d = None
    englert_lhs = None
    if state.is_pure and abs(amps.c1 - amps.c2) <= 1e-12:
        d_sq = d_q * (2.0 - d_q)
        englert_d = math.sqrt(max(0.0, d_sq))
        englert_lhs = d_sq + v * v
        if abs(englert_lhs - 1.0) > _IDENTITY_TOL:
            violations.append(f"englert-identity: D^2 + V^2 = {englert_lhs!r}, expected 1")

    return DualityReport(
        d_q=d_q,
        v_analytic=v,
        v_measured=v_measured,
        v0=v0,
        p0_pred=p0,
        coherence_c=c,
        case_label=basis.case_label,
        lhs_duality1=lhs1,
        lhs_duality2=lhs2,
        englert_d=englert_d,
        englert_lhs=englert_lhs,
        saturated1=abs(lhs1 - 1.0) <= _SATURATION_TOL,
        saturated2=abs(lhs2 - 1.0) <= _SATURATION_TOL,
        violations=tuple(violations),
    )


def evaluate_config(cfg: ExperimentConfig, v_measured: float | None = None) -> DualityReport:
    """Convenience wrapper: derive everything from a configuration and evaluate."""
    amps, basis = basis_from_config(cfg)
    state = QuantonDetectorState(
        amps=amps, overlap=cfg.overlap, theta=canonical_theta(cfg, amps), kappa=cfg.kappa
    )
    return evaluate_duality(state, basis, v_measured=v_measured)


def englert_limit(state: QuantonDetectorState, basis: UqsdBasis) -> tuple[float, float]:
    """Distinguishability D = sqrt(D_Q (2 - D_Q)) and D^2 + V^2 for symmetric pure states."""
    if not state.is_pure or abs(state.amps.c1 - state.amps.c2) > 1e-12:
        raise ValidationError("Englert form valid only for the symmetric pure case")
    d_q = distinguishability(basis, state.amps)
    v = state.overlap * state.amps.v0
    d_sq = d_q * (2.0 - d_q)
    return math.sqrt(max(0.0, d_sq)), d_sq + v * v
