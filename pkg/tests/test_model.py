import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from asymduality import (
    Case,
    ExperimentConfig,
    ValidationError,
    a_priori_stats,
    classify_case,
    config_from_mapping,
    derive_amplitudes,
    load_config_file,
)
from asymduality.model import canonical_slits, canonical_theta, parse_config_text

from conftest import make_config


class TestDeriveAmplitudes:
    def test_symmetric(self):
        amps = derive_amplitudes(make_config(p1=0.5, p2=0.5, xi=1.0))
        assert amps.c1 == pytest.approx(0.70710678118654752, abs=1e-15)
        assert amps.c2 == pytest.approx(0.70710678118654752, abs=1e-15)
        assert not amps.swapped

    def test_asymmetric_beam(self):
        # c1 = sqrt(0.8), c2 = sqrt(0.2), frozen from high-precision evaluation
        amps = derive_amplitudes(make_config(p1=0.8, p2=0.2, xi=1.0))
        assert amps.c1 == pytest.approx(0.89442719099991588, abs=1e-15)
        assert amps.c2 == pytest.approx(0.44721359549995794, abs=1e-15)
        assert not amps.swapped

    def test_swap_on_wide_second_slit(self):
        # raw c1^2 = 0.2, c2^2 = 0.8: labels exchange so c1 >= c2
        amps = derive_amplitudes(make_config(p1=0.5, p2=0.5, xi=4.0))
        assert amps.swapped
        assert amps.c1 == pytest.approx(0.89442719099991588, abs=1e-15)
        assert amps.c2 == pytest.approx(0.44721359549995794, abs=1e-15)

    def test_normalization(self, rng):
        for _ in range(300):
            p1 = rng.uniform(0.01, 0.99)
            cfg = make_config(p1=p1, p2=1.0 - p1, xi=rng.uniform(0.05, 20.0))
            amps = derive_amplitudes(cfg)
            assert abs(amps.c1**2 + amps.c2**2 - 1.0) < 1e-12
            assert amps.c1 >= amps.c2 >= 0.0

    @settings(deadline=None, max_examples=150)
    @given(
        p1=st.floats(min_value=0.01, max_value=0.99),
        xi=st.floats(min_value=0.05, max_value=20.0),
    )
    def test_weight_width_exchange_leaves_amplitude_set(self, p1, xi):
        """Swapping (p1, p2) together with xi -> 1/xi relabels the slits."""
        a = derive_amplitudes(make_config(p1=p1, p2=1.0 - p1, xi=xi))
        b = derive_amplitudes(make_config(p1=1.0 - p1, p2=p1, xi=1.0 / xi))
        assert a.c1 == pytest.approx(b.c1, abs=1e-12)
        assert a.c2 == pytest.approx(b.c2, abs=1e-12)

    def test_equal_widths_pick_larger_weight(self, rng):
        for _ in range(50):
            p1 = rng.uniform(0.01, 0.99)
            amps = derive_amplitudes(make_config(p1=p1, p2=1.0 - p1, xi=1.0))
            assert amps.c1**2 == pytest.approx(max(p1, 1.0 - p1), abs=1e-12)
            assert amps.c2**2 == pytest.approx(min(p1, 1.0 - p1), abs=1e-12)


class TestAPrioriStats:
    def test_symmetric(self):
        amps = derive_amplitudes(make_config())
        p0, v0 = a_priori_stats(amps)
        assert p0 == pytest.approx(0.0, abs=1e-15)
        assert v0 == pytest.approx(1.0, abs=1e-15)

    def test_asymmetric(self):
        amps = derive_amplitudes(make_config(p1=0.8, p2=0.2))
        p0, v0 = a_priori_stats(amps)
        assert p0 == pytest.approx(0.6, abs=1e-12)
        assert v0 == pytest.approx(0.8, abs=1e-12)

    def test_single_path_limit(self):
        amps = derive_amplitudes(make_config(p1=1.0, p2=0.0))
        p0, v0 = a_priori_stats(amps)
        assert p0 == 1.0
        assert v0 == 0.0

    def test_matches_stored_fields(self, rng):
        for _ in range(100):
            p1 = rng.uniform(0.01, 0.99)
            amps = derive_amplitudes(make_config(p1=p1, p2=1.0 - p1, xi=rng.uniform(0.1, 10)))
            p0, v0 = a_priori_stats(amps)
            assert p0 == pytest.approx(amps.p0_pred, abs=1e-15)
            assert v0 == pytest.approx(amps.v0, abs=1e-15)
            assert abs(p0**2 + v0**2 - 1.0) < 1e-12


class TestClassifyCase:
    def test_symmetric_always_case_a(self):
        amps = derive_amplitudes(make_config(overlap=0.9))
        assert classify_case(amps, 0.9) is Case.A

    def test_strong_asymmetry_case_b(self):
        amps = derive_amplitudes(make_config(p1=0.9, p2=0.1, overlap=0.5))
        # c2/c1 = 1/3 < 0.5
        assert classify_case(amps, 0.5) is Case.B

    def test_boundary_is_case_a(self):
        amps = derive_amplitudes(make_config(p1=0.9, p2=0.1))
        assert classify_case(amps, amps.c2 / amps.c1) is Case.A

    def test_monotone_in_overlap(self, rng):
        for _ in range(50):
            p1 = rng.uniform(0.5, 0.99)
            amps = derive_amplitudes(make_config(p1=p1, p2=1.0 - p1))
            labels = [classify_case(amps, ov) for ov in np.linspace(0.0, 1.0, 21)]
            switched = False
            for lab in labels:
                if lab is Case.B:
                    switched = True
                else:
                    assert not switched, "CaseB must not revert to CaseA as overlap grows"


class TestValidation:
    @pytest.mark.parametrize(
        "kwargs,field",
        [
            (dict(p1=-0.1, p2=1.1), "p1"),
            (dict(epsilon=0.0), "epsilon"),
            (dict(epsilon=-1.0), "epsilon"),
            (dict(xi=0.0), "xi"),
            (dict(x0=0.0), "x0"),
            (dict(wavelength=0.0), "lambda"),
            (dict(screen_distance=-5.0), "D"),
            (dict(overlap=1.2), "overlap"),
            (dict(overlap=-0.2), "overlap"),
            (dict(kappa=1.01), "kappa"),
            (dict(theta=float("nan")), "theta"),
        ],
    )
    def test_rejects_and_names_field(self, kwargs, field):
        with pytest.raises(ValidationError) as err:
            make_config(**kwargs)
        assert err.value.field == field

    def test_rejects_bad_weight_sum(self):
        with pytest.raises(ValidationError):
            make_config(p1=0.7, p2=0.7)

    def test_renormalizes_close_weights_with_warning(self):
        with pytest.warns(UserWarning, match="renormalizing"):
            cfg = make_config(p1=0.502, p2=0.5)
        assert cfg.p1 + cfg.p2 == pytest.approx(1.0, abs=1e-15)
        assert cfg.p1 == pytest.approx(0.502 / 1.002, abs=1e-15)

    def test_exact_weights_no_warning(self, recwarn):
        make_config(p1=0.25, p2=0.75)
        assert len(recwarn) == 0


class TestConfigIO:
    def test_parse_text(self):
        text = "p1 = 0.6\np2=0.4   # trailing comment\n# full line\n\nlambda = 0.8\nD = 2e4\n"
        values = parse_config_text(text)
        assert values == {"p1": 0.6, "p2": 0.4, "lambda": 0.8, "D": 2e4}

    def test_unknown_key(self):
        with pytest.raises(ValidationError, match="unknown key"):
            parse_config_text("wavelength = 0.5\n")

    def test_bad_value(self):
        with pytest.raises(ValidationError, match="not a number"):
            parse_config_text("p1 = abc\n")

    def test_missing_equals(self):
        with pytest.raises(ValidationError, match="key = value"):
            parse_config_text("p1 0.5\n")

    def test_file_roundtrip(self, tmp_path):
        path = tmp_path / "exp.cfg"
        path.write_text("p1 = 0.7\np2 = 0.3\noverlap = 0.25\ntheta = 0.5\n")
        cfg = config_from_mapping(load_config_file(path))
        assert cfg.p1 == 0.7
        assert cfg.overlap == 0.25
        assert cfg.theta == 0.5
        # untouched keys keep defaults
        assert cfg.wavelength == 0.5

    def test_missing_file(self, tmp_path):
        with pytest.raises(ValidationError, match="cannot read"):
            load_config_file(tmp_path / "nope.cfg")

    def test_mapping_keys(self):
        cfg = config_from_mapping({"lambda": 0.7, "D": 5e3})
        assert cfg.wavelength == 0.7
        assert cfg.screen_distance == 5e3
        assert cfg.to_mapping()["lambda"] == 0.7
        assert set(cfg.to_mapping()) == {
            "p1", "p2", "x0", "epsilon", "xi", "lambda", "D", "overlap", "theta", "kappa",
        }


class TestCanonicalization:
    def test_slit_pairing_unswapped(self):
        cfg = make_config(p1=0.8, p2=0.2, theta=0.3)
        amps = derive_amplitudes(cfg)
        slits = canonical_slits(cfg, amps)
        assert (slits.center1, slits.width1) == (cfg.x0, cfg.epsilon)
        assert slits.theta == 0.3
        assert canonical_theta(cfg, amps) == 0.3

    def test_slit_pairing_swapped(self):
        cfg = make_config(p1=0.2, p2=0.8, xi=2.0, theta=0.3)
        amps = derive_amplitudes(cfg)
        assert amps.swapped
        slits = canonical_slits(cfg, amps)
        assert (slits.center1, slits.width1) == (-cfg.x0, 2.0 * cfg.epsilon)
        assert (slits.center2, slits.width2) == (cfg.x0, cfg.epsilon)
        assert slits.theta == -0.3

    def test_gamma_and_fringe_width(self):
        cfg = make_config()
        assert cfg.gamma_big == pytest.approx(0.5 * 1e4 / math.pi, rel=1e-15)
        assert cfg.fringe_width == pytest.approx(250.0, rel=1e-15)
