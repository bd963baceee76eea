import os
import subprocess
import sys

import numpy as np
import pytest

from bosonic_capacity import _backend
from bosonic_capacity._backend import numpy_kernels

needs_numba = pytest.mark.skipif(not _backend.numba_available(), reason="numba not installed")


@pytest.fixture
def modes(rng):
    omega = np.sort(rng.uniform(0.01, 5.0, 5000))
    eta = rng.uniform(1e-4, 1.0, 5000)
    return omega, eta


@needs_numba
class TestNumbaMatchesNumpy:
    @pytest.fixture(autouse=True)
    def kernels(self):
        self.nb = _backend.get("numba")
        self.np = numpy_kernels

    def test_g_values(self, rng):
        x = np.concatenate([[0.0, 1e-9, 1e-8], rng.lognormal(0, 5, 1000)])
        np.testing.assert_allclose(self.nb.g_values(x), self.np.g_values(x), rtol=1e-14, atol=0)

    @pytest.mark.parametrize("beta", [1e-3, 0.7, 40.0])
    def test_holevo(self, modes, beta):
        omega, eta = modes
        np.testing.assert_allclose(
            self.nb.holevo_occupation(omega, eta, beta),
            self.np.holevo_occupation(omega, eta, beta), rtol=1e-14, atol=0)
        assert self.nb.holevo_energy(omega, eta, beta) == pytest.approx(
            self.np.holevo_energy(omega, eta, beta), rel=1e-13)

    @pytest.mark.parametrize("xi2", [1.0, 0.25])
    @pytest.mark.parametrize("beta", [1e-3, 0.7])
    def test_waterfill(self, modes, beta, xi2):
        omega, eta = modes
        np.testing.assert_allclose(
            self.nb.waterfill_occupation(omega, eta, beta, xi2),
            self.np.waterfill_occupation(omega, eta, beta, xi2), rtol=1e-14, atol=1e-12)
        assert self.nb.waterfill_energy(omega, eta, beta, xi2) == pytest.approx(
            self.np.waterfill_energy(omega, eta, beta, xi2), rel=1e-13)

    def test_sums(self, rng):
        x = rng.lognormal(0, 3, 100_000)
        assert self.nb.g_sum(x) == pytest.approx(self.np.g_sum(x), rel=1e-13)
        for xi in (0.5, 1.0):
            assert self.nb.shannon_sum(x, xi) == pytest.approx(self.np.shannon_sum(x, xi), rel=1e-13)


def test_overflow_short_circuit():
    omega = np.array([1.0, 1.0])
    eta = np.array([1e-6, 1.0])
    n = numpy_kernels.holevo_occupation(omega, eta, 1.0)
    assert n[0] == 0.0 and n[1] > 0


def test_use_restores_previous():
    before = _backend.name
    with _backend.use("numpy") as kernels:
        assert kernels is numpy_kernels
        assert _backend.name == "numpy"
    assert _backend.name == before


def test_unknown_backend():
    with pytest.raises(ValueError):
        _backend.get("fortran")


@pytest.mark.parametrize("flag,expected", [
    ("numpy", "numpy"),
    pytest.param("numba", "numba", marks=needs_numba),
])
def test_env_flag_selects_backend(flag, expected):
    env = dict(os.environ, BOSONIC_CAPACITY_BACKEND=flag)
    out = subprocess.run(
        [sys.executable, "-c", "from bosonic_capacity import _backend; print(_backend.name)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == expected


@needs_numba
def test_allocator_agrees_across_backends():
    from bosonic_capacity.allocator import capacity
    from bosonic_capacity.channel import FlatGrid, ResourceBudget

    grid, budget = FlatGrid(0.5, 1e-3), ResourceBudget(2 * np.pi * 1e3)
    values = {}
    for name in ("numpy", "numba"):
        with _backend.use(name):
            values[name] = capacity(grid, budget).value
    assert values["numba"] == pytest.approx(values["numpy"], rel=1e-12)
    # continuum value: T * sqrt(eta) / ln2 * sqrt(pi P / 3) with P = 1, T = 2 pi / delta_omega
    continuum = 2e3 * np.pi * np.sqrt(0.5) / np.log(2) * np.sqrt(np.pi / 3)
    assert values["numpy"] == pytest.approx(continuum, rel=2e-3)


def test_default_backend_is_numpy():
    env = {k: v for k, v in os.environ.items() if k != "BOSONIC_CAPACITY_BACKEND"}
    out = subprocess.run(
        [sys.executable, "-c", "from bosonic_capacity import _backend; print(_backend.name)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "numpy"
