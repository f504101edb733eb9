import math

import numpy as np
import pytest

from polqpdf.coherence import (
    MAX_TOTAL_ORDER,
    CoherenceOrder,
    coherence_function,
    factorization_check,
    polarization_residual,
)
from polqpdf.errors import TruncationError, ValidationError
from polqpdf.fock import TwoModeState, coherent_vector, two_mode_coherent_density


def all_orders(max_total):
    return [
        CoherenceOrder(mx, my, nx, ny)
        for mx in range(max_total + 1)
        for my in range(max_total + 1)
        for nx in range(max_total + 1)
        for ny in range(max_total + 1)
        if mx + my + nx + ny <= max_total
    ]


def test_zeroth_order_is_the_trace():
    state = two_mode_coherent_density(0.7 + 0.3j, 0.2 - 0.5j, 40)
    assert coherence_function(state, CoherenceOrder(0, 0, 0, 0)) == pytest.approx(
        1.0, abs=1e-12
    )


def test_first_order_intensity():
    beta = 1.1 - 0.4j
    state = two_mode_coherent_density(beta, 0.3j, 40)
    got = coherence_function(state, CoherenceOrder(1, 0, 1, 0))
    assert got == pytest.approx(abs(beta) ** 2, abs=1e-10)


def test_coherent_states_factor_all_orders():
    """Gamma of |beta,gamma> is conj(b)^mx conj(g)^my b^nx g^ny."""
    rng = np.random.default_rng(401)
    orders = all_orders(4)
    for _ in range(10):
        r = 2.0 * np.sqrt(rng.uniform(0, 1, 2))
        th = rng.uniform(0, 2 * math.pi, 2)
        beta = complex(r[0] * math.cos(th[0]), r[0] * math.sin(th[0]))
        gamma = complex(r[1] * math.cos(th[1]), r[1] * math.sin(th[1]))
        state = two_mode_coherent_density(beta, gamma, 40)
        for o in orders[:: 7]:
            want = (
                beta.conjugate() ** o.mx
                * gamma.conjugate() ** o.my
                * beta**o.nx
                * gamma**o.ny
            )
            assert abs(coherence_function(state, o) - want) <= 1e-9


def test_hermitian_symmetry():
    state = two_mode_coherent_density(0.7 + 0.3j, 0.2 - 0.5j, 40)
    for o in all_orders(4)[::5]:
        lhs = coherence_function(state, o)
        rhs = coherence_function(state, o.swapped()).conjugate()
        assert abs(lhs - rhs) <= 1e-10


def test_factorization_all_70_orders():
    p = complex(math.sqrt(0.5), math.sqrt(0.5))
    state = two_mode_coherent_density(1.0 + 0j, p, 40)
    orders = all_orders(4)
    assert len(orders) == 70
    for o in orders:
        chk = factorization_check(state, p, o)
        assert chk.abs_error <= 1e-10


def test_factorization_zeroth_order_trivial():
    state = two_mode_coherent_density(0.5, 0.5j, 30)
    chk = factorization_check(state, 1j, CoherenceOrder(0, 0, 0, 0))
    assert chk.lhs == pytest.approx(1.0, abs=1e-12)
    assert chk.rhs == pytest.approx(1.0, abs=1e-12)


def test_factorization_reports_violation_without_raising():
    p = 0.5 + 0.5j
    state = two_mode_coherent_density(1.0, p * 1.0 + 0.4, 40)
    chk = factorization_check(state, p, CoherenceOrder(0, 1, 0, 1))
    assert chk.abs_error > 1e-3


def test_residual_of_polarized_pairs():
    rng = np.random.default_rng(402)
    for _ in range(10):
        beta = complex(*rng.normal(0, 0.8, 2))
        p = complex(*rng.normal(0, 0.8, 2))
        state = two_mode_coherent_density(beta, p * beta, 40)
        assert polarization_residual(state, p) <= 1e-9


def test_residual_detects_perturbation():
    p = complex(math.sqrt(0.5), math.sqrt(0.5))
    beta = 1.0 + 0j
    # coherent pairs make the residual exactly the offset |gamma - p*beta|
    for offset in (0.1, 0.5):
        state = two_mode_coherent_density(beta, p * beta + offset, 40)
        res = polarization_residual(state, p)
        assert res >= 1e-3
        assert res == pytest.approx(offset, rel=1e-6)


def test_residual_of_vacuum_is_zero():
    vac = two_mode_coherent_density(0j, 0j, 12)
    assert polarization_residual(vac, 1.7 - 0.3j) == 0.0


def test_residual_mixture_and_density_routes():
    p = 0.4 - 0.6j
    k1 = np.kron(coherent_vector(0.5, 30), coherent_vector(0.5 * p, 30))
    k2 = np.kron(coherent_vector(0.8j, 30), coherent_vector(0.8j * p, 30))
    mix = TwoModeState.from_kets([(0.6, k1), (0.4, k2)], 30)
    assert polarization_residual(mix, p) <= 1e-9
    rho = 0.6 * np.outer(k1, k1.conj()) + 0.4 * np.outer(k2, k2.conj())
    dens = TwoModeState.from_density(rho, 30)
    assert polarization_residual(dens, p) <= 1e-9


def test_order_validation():
    with pytest.raises(ValidationError):
        CoherenceOrder(-1, 0, 0, 0)
    with pytest.raises(ValidationError):
        CoherenceOrder(2, 2, 2, 1)
    with pytest.raises(ValidationError):
        CoherenceOrder(0.5, 0, 0, 0)
    o = CoherenceOrder(np.int64(1), 0, 1, 0)
    assert o.total == 2
    assert sum((o.mx, o.my, o.nx, o.ny)) <= MAX_TOTAL_ORDER


def test_order_truncation_guard():
    small = two_mode_coherent_density(0j, 0j, 3)
    with pytest.raises(TruncationError, match="dim=3"):
        coherence_function(small, CoherenceOrder(2, 0, 2, 0))
