from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fqb.observables import (
    BipartitionSpec,
    EnergyPeak,
    charging_power,
    density_eigenvalues,
    detect_period,
    entanglement_entropy,
    entropy_from_eigenvalues,
    jacobi_eigvalsh,
    local_maxima,
    max_stored_energy,
    reduced_density_matrix,
    stored_energy,
)
from fqb.statevector import StateVector, ground_state


def random_state(N: int, seed: int) -> StateVector:
    rng = np.random.default_rng(seed)
    a = rng.normal(size=1 << N) + 1j * rng.normal(size=1 << N)
    return StateVector(N, a / np.linalg.norm(a))


def brute_partial_trace(psi: StateVector, kept: list[int]) -> np.ndarray:
    """Element-by-element sum over traced configurations; no reshapes."""
    N = psi.N
    traced = [s for s in range(N) if s not in kept]
    k = len(kept)
    rho = np.zeros((1 << k, 1 << k), dtype=complex)

    def index(sub: int, env: int) -> int:
        b = 0
        for pos, s in enumerate(kept):
            b |= ((sub >> pos) & 1) << s
        for pos, s in enumerate(traced):
            b |= ((env >> pos) & 1) << s
        return b

    for env in range(1 << len(traced)):
        for r in range(1 << k):
            for c in range(1 << k):
                rho[r, c] += psi.amps[index(r, env)] * np.conj(psi.amps[index(c, env)])
    return rho


def random_hermitian(n: int, seed: int, scale: float = 1.0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * (a + a.conj().T)


@st.composite
def state_and_sites(draw, max_N=7):
    N = draw(st.integers(2, max_N))
    sites = draw(st.sets(st.integers(0, N - 1), min_size=1, max_size=N - 1))
    seed = draw(st.integers(0, 2**32 - 1))
    return random_state(N, seed), sorted(sites)


@given(state_and_sites())
@settings(max_examples=40, deadline=None)
def test_reduced_density_matches_brute_force(case):
    psi, kept = case
    rho = reduced_density_matrix(psi, BipartitionSpec(frozenset(kept)))
    np.testing.assert_allclose(rho, brute_partial_trace(psi, kept), atol=1e-12)


@given(state_and_sites())
@settings(max_examples=40, deadline=None)
def test_reduced_density_is_a_state(case):
    psi, kept = case
    rho = reduced_density_matrix(psi, BipartitionSpec(frozenset(kept)))
    np.testing.assert_allclose(rho, rho.conj().T, atol=1e-14)
    assert np.trace(rho).real == pytest.approx(1.0, abs=1e-12)
    assert density_eigenvalues(rho).min() >= -1e-12


@given(state_and_sites(max_N=8))
@settings(max_examples=40, deadline=None)
def test_entropy_equal_for_complementary_subsystems(case):
    psi, kept = case
    spec = BipartitionSpec(frozenset(kept))
    s_a = entanglement_entropy(psi, spec)
    s_b = entanglement_entropy(psi, spec.complement(psi.N))
    assert s_a == pytest.approx(s_b, abs=1e-10)
    assert 0.0 <= s_a <= min(len(kept), psi.N - len(kept)) * math.log(2) + 1e-12


def test_product_state_has_zero_entropy():
    psi = ground_state(6, 1.0)
    assert entanglement_entropy(psi, BipartitionSpec({0, 2})) == 0.0


def test_bell_pair_entropy():
    psi = StateVector(2, np.array([1, 0, 0, 1]) / math.sqrt(2))
    assert entanglement_entropy(psi, BipartitionSpec({0})) == pytest.approx(math.log(2))
    assert entanglement_entropy(psi, BipartitionSpec({0}, "2")) == pytest.approx(1.0)


def test_ghz_entropy_any_cut():
    N = 6
    amps = np.zeros(1 << N)
    amps[0] = amps[-1] = 1 / math.sqrt(2)
    psi = StateVector(N, amps)
    for sites in ({0}, {1, 4}, {0, 1, 2}):
        assert entanglement_entropy(psi, BipartitionSpec(sites)) == pytest.approx(math.log(2))


def test_kept_site_order_is_lsb_first():
    # |site0=down, site1=up> -> bit0 = 1, bit1 = 0 -> index 1
    psi = StateVector.basis(3, 0b001)
    rho = reduced_density_matrix(psi, BipartitionSpec({0, 1}))
    assert rho[1, 1] == 1.0


@pytest.mark.parametrize(
    "spec_sites, N", [(set(), 4), ({0, 1, 2, 3}, 4), ({5}, 4), ({-1}, 4)]
)
def test_bipartition_rejects_bad_sites(spec_sites, N):
    with pytest.raises(ValueError):
        BipartitionSpec(spec_sites).check(N)


def test_bipartition_size_cap():
    with pytest.raises(ValueError):
        BipartitionSpec(range(13)).check(16)


def test_bipartition_rejects_log_base():
    with pytest.raises(ValueError):
        BipartitionSpec({0}, "10")


@pytest.mark.parametrize("n", [2, 3, 4, 5, 8, 16, 32, 48])
@pytest.mark.parametrize("scale", [1e-3, 1.0, 50.0])
def test_jacobi_matches_lapack(n, scale):
    A = random_hermitian(n, n, scale)
    np.testing.assert_allclose(
        jacobi_eigvalsh(A), np.linalg.eigvalsh(A), atol=1e-12 * max(1.0, scale * n)
    )


@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 12))
@settings(max_examples=40, deadline=None)
def test_jacobi_property(seed, n):
    A = random_hermitian(n, seed)
    lam = jacobi_eigvalsh(A)
    np.testing.assert_allclose(lam, np.linalg.eigvalsh(A), atol=1e-11)
    assert lam.sum() == pytest.approx(np.trace(A).real, abs=1e-10)


def test_jacobi_degenerate_and_diagonal():
    np.testing.assert_allclose(jacobi_eigvalsh(np.eye(5) * 0.2), [0.2] * 5)
    np.testing.assert_allclose(jacobi_eigvalsh(np.diag([3.0, -1.0, 2.0])), [-1, 2, 3])
    P = np.full((4, 4), 0.25)  # rank-one projector
    np.testing.assert_allclose(jacobi_eigvalsh(P), [0, 0, 0, 1], atol=1e-14)


def test_jacobi_rejects_non_square():
    with pytest.raises(ValueError):
        jacobi_eigvalsh(np.zeros((2, 3)))


def test_density_eigenvalues_closed_form_qubit():
    rho = np.array([[0.7, 0.2 - 0.1j], [0.2 + 0.1j, 0.3]])
    np.testing.assert_allclose(density_eigenvalues(rho), np.linalg.eigvalsh(rho), atol=1e-15)


def test_density_eigenvalues_large_falls_back():
    rho = random_hermitian(64, 3)
    np.testing.assert_allclose(density_eigenvalues(rho), np.linalg.eigvalsh(rho))


def test_entropy_clamps_noise():
    assert entropy_from_eigenvalues(np.array([-1e-16, 1e-15, 1.0 + 1e-15])) == 0.0
    assert entropy_from_eigenvalues(np.array([0.5, 0.5]), "2") == pytest.approx(1.0)


def test_stored_energy_of_excited_state():
    psi = StateVector.basis(4, 0)  # all spins up
    assert stored_energy(psi, 1.5, 4) == pytest.approx(12.0)


def test_charging_power():
    assert charging_power(0.0, 0, 0.0, 0.0) == 0.0
    assert charging_power(16.0, 4, math.pi / 2, math.pi / 2) == pytest.approx(4 / math.pi)
    with pytest.raises(ValueError):
        charging_power(1.0, 3, 0.0, 0.0)
    with pytest.raises(ValueError):
        charging_power(1.0, -1, 1.0, 1.0)


def test_max_stored_energy_first_arrival_with_ties():
    assert max_stored_energy([0, 3, 1, 3, 2]) == EnergyPeak(3.0, 1)
    # drift within tolerance does not displace an earlier exact peak
    assert max_stored_energy([0, 4.0, 0, 4.0 + 1e-12]).n_star == 1
    with pytest.raises(ValueError):
        max_stored_energy([])


def test_detect_period():
    assert detect_period([0, 1, 0, 1, 0, 1]) == 2
    assert detect_period([0.0] * 6) == 1
    assert detect_period([0, 1, 2, 0, 1, 2, 0]) == 3
    assert detect_period([0, 1, 2, 3, 4]) is None
    assert detect_period([0, 1, 0, 1 + 1e-6]) is None


@given(
    st.lists(st.floats(-10, 10, allow_nan=False), min_size=1, max_size=6),
    st.integers(2, 6),
)
def test_detect_period_finds_no_longer_period_than_repeat(block, reps):
    series = np.tile(block, reps)
    p = detect_period(series)
    assert p is not None and p <= len(block)
    assert np.all(np.abs(series[p:] - series[:-p]) <= 1e-9)


def test_local_maxima():
    assert local_maxima([0, 2, 1, 3, 3, 0]) == [1, 3, 4]
    assert local_maxima([1, 2]) == []
