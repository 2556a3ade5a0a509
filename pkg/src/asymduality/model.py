"""Experiment configuration, effective path amplitudes, and a-priori quantities.

The physical setup is a double slit with unequal beam weights (p1, p2) and
unequal Gaussian slit widths (epsilon and xi*epsilon), plus a two-state path
detector characterised entirely by the inner product of its two pointer
states, ``overlap * exp(i*theta)``, and an optional dephasing survival factor
``kappa`` acting on the path coherence.
"""

import math
import warnings
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .errors import ConsistencyError, ValidationError

CONFIG_KEYS = ("p1", "p2", "x0", "epsilon", "xi", "lambda", "D", "overlap", "theta", "kappa")

# Sums of p1 + p2 within this of 1 are renormalized (with a warning); anything
# further off is rejected.
_RENORM_TOLERANCE = 0.01


class Case(str, Enum):
    """Optimality regime of the three-outcome discrimination measurement."""

    A = "CaseA"
    B = "CaseB"


def _require_finite(value: float, field: str) -> float:
    try:
        x = float(value)
    except (TypeError, ValueError):
        raise ValidationError(f"{field} must be a real number, got {value!r}", field=field)
    if not math.isfinite(x):
        raise ValidationError(f"{field} must be finite, got {x}", field=field)
    return x


def _require_positive(value: float, field: str) -> float:
    x = _require_finite(value, field)
    if x <= 0.0:
        raise ValidationError(f"{field} must be > 0, got {x}", field=field)
    return x


def _require_unit_interval(value: float, field: str) -> float:
    x = _require_finite(value, field)
    if not 0.0 <= x <= 1.0:
        raise ValidationError(f"{field} must be in [0, 1], got {x}", field=field)
    return x


@dataclass(frozen=True)
class ExperimentConfig:
    """All physical inputs of one experiment.

    p1, p2            beam probability weights (renormalized to p1 + p2 = 1)
    x0                half slit separation; the slits sit at +x0 and -x0
    epsilon           Gaussian width parameter of slit 1
    xi                slit-width ratio; slit 2 has width xi * epsilon
    wavelength        quanton wavelength (config key ``lambda``)
    screen_distance   slit-to-screen distance (config key ``D``)
    overlap           |<d1|d2>| of the detector pointer states, in [0, 1]
    theta             phase of <d1|d2>, radians
    kappa             dephasing survival factor in [0, 1]; 1 = pure state
    """

    p1: float = 0.5
    p2: float = 0.5
    x0: float = 10.0
    epsilon: float = 1.0
    xi: float = 1.0
    wavelength: float = 0.5
    screen_distance: float = 1.0e4
    overlap: float = 0.5
    theta: float = 0.0
    kappa: float = 1.0

    def __post_init__(self):
        p1 = _require_finite(self.p1, "p1")
        p2 = _require_finite(self.p2, "p2")
        if p1 < 0.0:
            raise ValidationError(f"p1 must be >= 0, got {p1}", field="p1")
        if p2 < 0.0:
            raise ValidationError(f"p2 must be >= 0, got {p2}", field="p2")
        total = p1 + p2
        if abs(total - 1.0) > _RENORM_TOLERANCE:
            raise ValidationError(
                f"p1 + p2 must equal 1 (within {_RENORM_TOLERANCE:.0%}), got {total}", field="p1"
            )
        if abs(total - 1.0) > 1e-12:
            warnings.warn(
                f"renormalizing beam weights: p1 + p2 = {total} != 1", stacklevel=2
            )
            p1, p2 = p1 / total, p2 / total
        object.__setattr__(self, "p1", p1)
        object.__setattr__(self, "p2", p2)

        object.__setattr__(self, "x0", _require_positive(self.x0, "x0"))
        object.__setattr__(self, "epsilon", _require_positive(self.epsilon, "epsilon"))
        object.__setattr__(self, "xi", _require_positive(self.xi, "xi"))
        object.__setattr__(self, "wavelength", _require_positive(self.wavelength, "lambda"))
        object.__setattr__(self, "screen_distance", _require_positive(self.screen_distance, "D"))
        object.__setattr__(self, "overlap", _require_unit_interval(self.overlap, "overlap"))
        object.__setattr__(self, "theta", _require_finite(self.theta, "theta"))
        object.__setattr__(self, "kappa", _require_unit_interval(self.kappa, "kappa"))

    @property
    def slit_separation(self) -> float:
        return 2.0 * self.x0

    @property
    def width1(self) -> float:
        return self.epsilon

    @property
    def width2(self) -> float:
        return self.xi * self.epsilon

    @property
    def gamma_big(self) -> float:
        """Propagation parameter lambda * D / pi, unifying photon and massive cases."""
        return self.wavelength * self.screen_distance / math.pi

    @property
    def fringe_width(self) -> float:
        """Fringe spacing lambda * D / d of the far-field pattern."""
        return self.wavelength * self.screen_distance / self.slit_separation

    def to_mapping(self) -> dict[str, float]:
        """Flat mapping using the external config keys (post-canonicalization)."""
        return {
            "p1": self.p1,
            "p2": self.p2,
            "x0": self.x0,
            "epsilon": self.epsilon,
            "xi": self.xi,
            "lambda": self.wavelength,
            "D": self.screen_distance,
            "overlap": self.overlap,
            "theta": self.theta,
            "kappa": self.kappa,
        }


@dataclass(frozen=True)
class PathAmplitudes:
    """Effective path amplitudes, canonicalized so that c1 >= c2.

    ``swapped`` records whether the two slit labels were exchanged to reach
    the canonical ordering; downstream formulas then apply verbatim while the
    CLI can still report results in the user's original labeling.
    """

    c1: float
    c2: float
    swapped: bool
    p0_pred: float
    v0: float
    case_label: Case

    def __post_init__(self):
        norm = self.c1 * self.c1 + self.c2 * self.c2
        if abs(norm - 1.0) > 1e-12:
            raise ConsistencyError(f"c1^2 + c2^2 = {norm}, expected 1")
        if not (self.c1 >= self.c2 >= 0.0):
            raise ConsistencyError(f"expected c1 >= c2 >= 0, got c1={self.c1}, c2={self.c2}")
        if abs(self.p0_pred**2 + self.v0**2 - 1.0) > 1e-12:
            raise ConsistencyError("p0_pred^2 + v0^2 != 1")


def _classify(c1: float, c2: float, overlap: float) -> Case:
    # CaseA iff overlap <= c2/c1, written multiplicatively; ties go to CaseA
    # where both coefficient sets coincide.
    return Case.A if overlap * c1 <= c2 else Case.B


def derive_amplitudes(cfg: ExperimentConfig) -> PathAmplitudes:
    """Effective amplitudes c1 = sqrt(p1/(p1+xi*p2)), c2 = sqrt(xi*p2/(p1+xi*p2)).

    The slit-width ratio feeds the branch probabilities because a wider slit
    passes proportionally more of the beam. Labels are exchanged if needed so
    that c1 >= c2.
    """
    s = cfg.p1 + cfg.xi * cfg.p2
    c1 = math.sqrt(cfg.p1 / s)
    c2 = math.sqrt(cfg.xi * cfg.p2 / s)
    swapped = c1 < c2
    if swapped:
        c1, c2 = c2, c1
    p0 = (c1 * c1 - c2 * c2) / (c1 * c1 + c2 * c2)
    v0 = 2.0 * c1 * c2
    return PathAmplitudes(
        c1=c1,
        c2=c2,
        swapped=swapped,
        p0_pred=p0,
        v0=v0,
        case_label=_classify(c1, c2, cfg.overlap),
    )


def a_priori_stats(amps: PathAmplitudes) -> tuple[float, float]:
    """Predictability P0 = (c1^2 - c2^2)/(c1^2 + c2^2) and visibility V0 = 2*c1*c2."""
    c1sq = amps.c1 * amps.c1
    c2sq = amps.c2 * amps.c2
    return (c1sq - c2sq) / (c1sq + c2sq), 2.0 * amps.c1 * amps.c2


def classify_case(amps: PathAmplitudes, overlap: float) -> Case:
    """Which optimality regime applies at this detector overlap."""
    overlap = _require_unit_interval(overlap, "overlap")
    return _classify(amps.c1, amps.c2, overlap)


def canonical_theta(cfg: ExperimentConfig, amps: PathAmplitudes) -> float:
    """Detector phase in the canonical labeling (conjugated when labels swapped)."""
    return -cfg.theta if amps.swapped else cfg.theta


@dataclass(frozen=True)
class SlitPair:
    """Slit geometry in canonical label order: (center_k, width_k) pairs with c_k."""

    center1: float
    width1: float
    center2: float
    width2: float
    theta: float


def canonical_slits(cfg: ExperimentConfig, amps: PathAmplitudes) -> SlitPair:
    """Physical slit parameters aligned with the canonical amplitude labels."""
    if amps.swapped:
        return SlitPair(-cfg.x0, cfg.width2, cfg.x0, cfg.width1, -cfg.theta)
    return SlitPair(cfg.x0, cfg.width1, -cfg.x0, cfg.width2, cfg.theta)


def parse_config_text(text: str, source: str = "<config>") -> dict[str, float]:
    """Parse a flat ``key = value`` config file body; '#' starts a comment."""
    values: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in CONFIG_KEYS:
            raise ValidationError(
                f"{source}:{lineno}: unknown key {key!r} (known: {', '.join(CONFIG_KEYS)})",
                field=key,
            )
        try:
            values[key] = float(value.strip())
        except ValueError:
            raise ValidationError(
                f"{source}:{lineno}: value for {key!r} is not a number: {value.strip()!r}",
                field=key,
            )
    return values


def load_config_file(path: str | Path) -> dict[str, float]:
    """Read a flat key-value config file. Returns raw values keyed by config key."""
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read config file {p}: {exc}")
    return parse_config_text(text, source=str(p))


def config_from_mapping(values: dict[str, float]) -> ExperimentConfig:
    """Build an ``ExperimentConfig`` from config-key values, using defaults for the rest."""
    unknown = set(values) - set(CONFIG_KEYS)
    if unknown:
        raise ValidationError(f"unknown config keys: {sorted(unknown)}")
    kwargs = dict(values)
    if "lambda" in kwargs:
        kwargs["wavelength"] = kwargs.pop("lambda")
    if "D" in kwargs:
        kwargs["screen_distance"] = kwargs.pop("D")
    return ExperimentConfig(**kwargs)
