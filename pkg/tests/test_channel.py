import math
import warnings

import numpy as np
import pytest
import yaml
from hypothesis import given
from hypothesis import strategies as st

from bosonic_capacity.channel import (
    C_LIGHT,
    HBAR,
    ChannelModel,
    FarFieldGeometry,
    FlatGrid,
    FlatProfile,
    ModeGrid,
    ModeSet,
    ModeSpec,
    ResourceBudget,
    TabulatedProfile,
    discretize,
    fresnel,
    mode_set,
    reference_power,
)
from bosonic_capacity.config import load_config, parse_config
from bosonic_capacity.errors import (
    ConfigError,
    DomainError,
    FarFieldInvalidWarning,
    ProfileMismatch,
    TransmissivityClampWarning,
)

from helpers import geometry_with_cutoff_fresnel


class TestModeTypes:
    @pytest.mark.parametrize("omega,eta", [(0.0, 0.5), (-1.0, 0.5), (1.0, -0.1), (1.0, 1.1)])
    def test_mode_spec_invariants(self, omega, eta):
        with pytest.raises(DomainError):
            ModeSpec(omega, eta)

    def test_mode_set_round_trip(self):
        specs = [ModeSpec(1.0, 0.2), ModeSpec(2.0, 0.0)]
        ms = ModeSet.from_specs(specs)
        assert ms.to_specs() == specs
        with pytest.raises(ValueError):
            ms.eta[0] = 1.0

    def test_tabulated_order(self):
        with pytest.raises(DomainError):
            TabulatedProfile((ModeSpec(2.0, 0.5), ModeSpec(1.0, 0.5)))
        with pytest.raises(DomainError):
            TabulatedProfile((ModeSpec(1.0, 0.5), ModeSpec(1.0, 0.4)))

    def test_flat_grid(self):
        ms = FlatGrid(0.3, 0.5).modes(4)
        np.testing.assert_array_equal(ms.omega, [0.5, 1.0, 1.5, 2.0])
        np.testing.assert_array_equal(ms.eta, 0.3)

    def test_budget_forms(self):
        b = ResourceBudget.power_and_time(2.0, 3.0)
        assert b.energy == 6.0
        assert b == ResourceBudget.energy_per_use(6.0)
        assert b.normalized(2.0, hbar=0.5).energy == 6.0


class TestFresnel:
    def test_quadratic_scaling(self):
        geo = geometry_with_cutoff_fresnel(0.01, omega_c=3.0)
        assert fresnel(geo, 3.0) == pytest.approx(0.01, rel=1e-14)
        assert fresnel(geo, 1.5) == pytest.approx(0.0025, rel=1e-14)

    @pytest.mark.filterwarnings("ignore::bosonic_capacity.errors.FarFieldInvalidWarning")
    def test_optical_hand_computation(self):
        geo = FarFieldGeometry(0.01, 0.01, 1e5, 2 * math.pi * 1e15)
        nu = 600e12
        expected = 0.01 * 0.01 * (nu / (299_792_458 * 1e5)) ** 2
        assert fresnel(geo, 2 * math.pi * nu) == pytest.approx(expected, rel=1e-14)
        assert expected == pytest.approx(4.0055e-2, rel=1e-4)

    def test_array_and_monotone(self):
        geo = geometry_with_cutoff_fresnel(0.05)
        omega = np.linspace(0.01, 1.0, 500)
        d = fresnel(geo, omega)
        assert np.all(np.diff(d) > 0)
        assert np.all((d >= 0) & (d <= 1))

    def test_clamp_warns(self):
        geo = geometry_with_cutoff_fresnel(0.04)
        with pytest.warns(TransmissivityClampWarning):
            assert fresnel(geo, 10.0) == 1.0

    @pytest.mark.parametrize("omega", [0.0, -1.0, math.nan])
    def test_domain(self, omega):
        with pytest.raises(DomainError):
            fresnel(geometry_with_cutoff_fresnel(0.01), omega)

    def test_geometry_validity(self):
        with pytest.raises(DomainError):
            geometry_with_cutoff_fresnel(1.5)
        with pytest.warns(FarFieldInvalidWarning):
            geo = geometry_with_cutoff_fresnel(0.3)
        assert not geo.far_field_valid
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            assert geometry_with_cutoff_fresnel(0.01).far_field_valid
        with pytest.raises(DomainError):
            FarFieldGeometry(0.0, 1.0, 1.0, 1.0)

    @given(st.floats(1e-3, 1.0), st.floats(1e-3, 1.0))
    def test_strictly_increasing(self, a, b):
        geo = geometry_with_cutoff_fresnel(0.02)
        if a < b:
            assert fresnel(geo, a) < fresnel(geo, b)


class TestDiscretize:
    def test_flat(self):
        modes = discretize(ChannelModel(FlatProfile(0.5)), 1.0, 3)
        assert modes == [ModeSpec(1.0, 0.5), ModeSpec(2.0, 0.5), ModeSpec(3.0, 0.5)]

    def test_farfield_two_modes(self):
        model = ChannelModel(geometry_with_cutoff_fresnel(0.04, omega_c=2.0))
        eta = [m.eta for m in discretize(model, 1.0, 2)]
        np.testing.assert_allclose(eta, [0.01, 0.04], rtol=1e-14)

    def test_farfield_increasing(self):
        model = ChannelModel(geometry_with_cutoff_fresnel(0.01), ModeGrid(1e-3, 1000))
        ms = mode_set(model)
        assert len(ms) == 1000
        assert np.all(np.diff(ms.eta) > 0)

    @pytest.mark.filterwarnings("ignore::bosonic_capacity.errors.FarFieldInvalidWarning")
    def test_farfield_ratio_invariant(self, rng):
        geo = FarFieldGeometry(0.013, 0.02, 3.7e4, 1.9e15)
        ms = mode_set(ChannelModel(geo), 1.9e15 / 700, 700)
        i, j = rng.integers(0, 700, size=(2, 2000))
        ratio = ms.eta[i] / ms.eta[j]
        expected = (ms.omega[i] / ms.omega[j]) ** 2
        np.testing.assert_allclose(ratio, expected, rtol=1e-14)

    def test_tabulated_ignores_matching_grid(self):
        tab = TabulatedProfile((ModeSpec(0.5, 0.1), ModeSpec(1.0, 0.2)))
        model = ChannelModel(tab)
        assert discretize(model) == list(tab.modes)
        assert discretize(model, 0.5, 2) == list(tab.modes)

    def test_tabulated_conflict(self):
        model = ChannelModel(TabulatedProfile((ModeSpec(0.5, 0.1), ModeSpec(1.0, 0.2))))
        with pytest.raises(ProfileMismatch):
            discretize(model, 0.3, 2)
        with pytest.raises(ProfileMismatch):
            discretize(model, 0.5, 3)

    def test_needs_grid(self):
        with pytest.raises(DomainError):
            discretize(ChannelModel(FlatProfile(0.5)))
        with pytest.raises(DomainError):
            discretize(ChannelModel(FlatProfile(0.5)), 0.0, 3)


class TestReferencePower:
    def test_unit_geometry(self):
        geo = FarFieldGeometry(1.0, 1.0, 1.0, 1.0)
        assert reference_power(geo) == pytest.approx(2 * math.pi * HBAR * C_LIGHT**2, rel=1e-15)

    def test_doubling_area_halves(self):
        a = FarFieldGeometry(0.01, 0.01, 1e5, 1e15)
        b = FarFieldGeometry(0.02, 0.01, 1e5, 1e15)
        assert reference_power(b) == pytest.approx(0.5 * reference_power(a), rel=1e-15)

    @given(st.floats(1e-4, 1.0), st.floats(1e-4, 1.0), st.floats(1e2, 1e7), st.floats(1e12, 1e16))
    @pytest.mark.filterwarnings("ignore::bosonic_capacity.errors.FarFieldInvalidWarning")
    def test_identity(self, at, ar, length, omega_c):
        try:
            geo = FarFieldGeometry(at, ar, length, omega_c)
        except DomainError:
            return
        lhs = reference_power(geo) * geo.fresnel_at_cutoff
        assert lhs == pytest.approx(HBAR * omega_c**2 / (2 * math.pi), rel=1e-12)


class TestConfig:
    def test_flat(self):
        model, settings = parse_config({"profile": "flat", "eta": 0.5, "detection": "het"})
        assert model.profile == FlatProfile(0.5)
        assert settings == {"detection": "het"}

    def test_farfield_scientific_strings(self, tmp_path):
        path = tmp_path / "c.yaml"
        path.write_text(
            "profile: farfield\narea_t_m2: 0.01\narea_r_m2: 0.01\n"
            "path_len_m: 1.0e5\nomega_c_rad_s: 1.0e15\n"
        )
        cfg = load_config(path)
        assert cfg.model.profile.omega_c == 1e15
        assert len(cfg.sha256) == 64

    def test_tabulated(self):
        model, _ = parse_config({"profile": "tabulated", "modes": [[1, 0.5], [2, 0.25]]})
        assert model.profile.modes == (ModeSpec(1.0, 0.5), ModeSpec(2.0, 0.25))

    @pytest.mark.parametrize("raw,key", [
        ({"eta": 0.5}, "profile"),
        ({"profile": "curved"}, "profile"),
        ({"profile": "flat"}, "eta"),
        ({"profile": "flat", "eta": 1.5}, "eta"),
        ({"profile": "flat", "eta": "lots"}, "eta"),
        ({"profile": "flat", "eta": 0.5, "colour": 1}, "colour"),
        ({"profile": "flat", "eta": 0.5, "modes": []}, "modes"),
        ({"profile": "flat", "eta": 0.5, "n_modes": 3}, "delta_omega"),
        ({"profile": "flat", "eta": 0.5, "delta_omega": 1, "n_modes": 0}, "n_modes"),
        ({"profile": "farfield", "area_t_m2": 1, "area_r_m2": 1, "path_len_m": 1}, "omega_c_rad_s"),
        ({"profile": "farfield", "area_t_m2": -1, "area_r_m2": 1, "path_len_m": 1,
          "omega_c_rad_s": 1}, "area_t_m2"),
        ({"profile": "tabulated", "modes": [[1, 0.5], [1, 0.5]]}, "modes"),
        ({"profile": "tabulated", "modes": [[1, 0.5, 3]]}, "modes"),
        ({"profile": "tabulated", "modes": [[1, 2.0]]}, "modes"),
    ])
    def test_errors_name_key(self, raw, key):
        with pytest.raises(ConfigError) as info:
            parse_config(raw)
        assert info.value.key == key
        assert str(info.value).startswith(key + ":")

    def test_unreadable(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "missing.yaml")
        bad = tmp_path / "bad.yaml"
        bad.write_text("profile: [flat\n")
        with pytest.raises(ConfigError):
            load_config(bad)

    def test_json_is_accepted(self, tmp_path):
        path = tmp_path / "c.json"
        path.write_text('{"profile": "flat", "eta": 0.25}')
        assert load_config(path).model.profile.eta == 0.25
