"""
Tests for angular-momentum special functions
"""

import math

import numpy as np
import pytest

from exceptions import InvalidQuantumNumberError
from models import HalfInt
from utils.angular import (
    gauss_legendre,
    half_integers_up_to,
    legendre_p,
    log_factorial,
    spherical_harmonic,
    three_j,
    wigner_big_d,
    wigner_d_column,
    wigner_d_matrix,
    wigner_small_d,
)

HALF = HalfInt(1)


class TestFactorialAndLegendre:
    """Test cases for log factorials and Legendre polynomials"""

    def test_log_factorial_small(self):
        """Test ln(n!) for small n"""
        assert log_factorial(0) == 0.0
        assert log_factorial(5) == pytest.approx(math.log(120.0), abs=1e-12)

    def test_log_factorial_large_is_finite(self):
        """Test ln(170!) matches a direct sum of logarithms"""
        expected = math.fsum(math.log(k) for k in range(1, 171))
        assert log_factorial(170) == pytest.approx(expected, rel=1e-13)

    def test_log_factorial_rejects_negative(self):
        """Test negative arguments are rejected"""
        with pytest.raises(ValueError):
            log_factorial(-1)

    def test_legendre_values(self):
        """Test textbook Legendre values"""
        assert legendre_p(0, 0.3) == 1.0
        assert legendre_p(2, 0.5) == pytest.approx(-0.125, abs=1e-15)
        assert legendre_p(7, -1.0) == pytest.approx(-1.0, abs=1e-14)

    def test_legendre_accepts_arrays(self):
        """Test elementwise evaluation"""
        x = np.linspace(-1.0, 1.0, 7)
        np.testing.assert_allclose(legendre_p(3, x), 0.5 * (5 * x**3 - 3 * x), atol=1e-14)


class TestWignerFunctions:
    """Test cases for Wigner small-d and big-D functions"""

    def test_identity_rotation(self):
        """Test d^j_{mk}(0) is the identity"""
        for j in half_integers_up_to(3):
            matrix = wigner_d_matrix(j, 0.0)
            np.testing.assert_allclose(matrix, np.eye(j.twice_value + 1), atol=1e-14)

    def test_standard_low_spin_values(self):
        """Test d^1_00 and the spin-1/2 entries"""
        beta = 0.7
        assert wigner_small_d(1, 0, 0, beta) == pytest.approx(math.cos(beta), abs=1e-14)
        assert wigner_small_d(HALF, HALF, HALF, beta) == pytest.approx(math.cos(beta / 2), abs=1e-14)
        assert wigner_small_d(HALF, HALF, -HALF, beta) == pytest.approx(
            -math.sin(beta / 2), abs=1e-14
        )
        assert wigner_small_d(1, 1, 0, beta) == pytest.approx(-math.sin(beta) / math.sqrt(2), abs=1e-14)

    def test_zonal_entry_is_legendre(self):
        """Test d^l_00(beta) = P_l(cos beta)"""
        beta = np.linspace(0.0, math.pi, 11)
        for L in (3, 6, 10):
            np.testing.assert_allclose(
                wigner_small_d(L, 0, 0, beta), legendre_p(L, np.cos(beta)), atol=1e-10
            )

    def test_index_swap_symmetry(self):
        """Test d^j_{mk} = (-1)^{m-k} d^j_{km}"""
        rng = np.random.default_rng(11)
        for j in half_integers_up_to(HalfInt(7)):
            beta = rng.uniform(0.0, math.pi)
            for m in j.projections():
                for k in j.projections():
                    sign = -1.0 if (m - k).to_int() % 2 else 1.0
                    assert wigner_small_d(j, m, k, beta) == pytest.approx(
                        sign * wigner_small_d(j, k, m, beta), abs=1e-12
                    )

    def test_d_orthogonality_integral(self):
        """Test (2j+1)/2 int d^j_mk d^j'_mk dx = delta_jj' for j, j' <= 4"""
        rule = gauss_legendre(12)
        beta = np.arccos(rule.nodes)
        for j in half_integers_up_to(4):
            for jp in half_integers_up_to(4):
                if (j - jp).twice_value % 2:
                    continue
                for m in min(j, jp).projections():
                    for k in min(j, jp).projections():
                        overlap = rule.integrate(
                            wigner_small_d(j, m, k, beta) * wigner_small_d(jp, m, k, beta)
                        )
                        expected = 1.0 if j == jp else 0.0
                        assert (j.twice_value + 1) / 2 * overlap == pytest.approx(expected, abs=1e-10)

    def test_big_d_is_pure_phase(self):
        """Test |D^j_mk(phi, theta, 0)| = |d^j_mk(theta)| and row unitarity"""
        j = HalfInt(5)
        phi, theta = 1.9, 0.8
        total = 0.0
        for k in j.projections():
            value = wigner_big_d(j, HALF, k, phi, theta)
            assert abs(value) == pytest.approx(abs(wigner_small_d(j, HALF, k, theta)), abs=1e-14)
            total += abs(value) ** 2
        assert total == pytest.approx(1.0, abs=1e-13)

    def test_big_d_identity(self):
        """Test D^j_mk(0, 0, 0) = delta_mk"""
        assert wigner_big_d(1, 1, 1, 0.0, 0.0, 0.0) == pytest.approx(1.0)
        assert wigner_big_d(1, 1, 0, 0.0, 0.0, 0.0) == pytest.approx(0.0)

    def test_d_matrix_is_orthogonal(self):
        """Test the small-d matrix is a real orthogonal matrix"""
        matrices = wigner_d_matrix(HalfInt(5), np.array([0.3, 1.2, 2.9]))
        assert matrices.shape == (3, 6, 6)
        for matrix in matrices:
            np.testing.assert_allclose(matrix @ matrix.T, np.eye(6), atol=1e-13)

    @pytest.mark.parametrize("j", [HalfInt(100), HalfInt(99)])
    def test_large_spin_matrix_is_orthogonal(self, j):
        """Test d^j(beta) stays orthogonal at j = 50 and j = 99/2"""
        matrix = wigner_d_matrix(j, 1.3)
        np.testing.assert_allclose(matrix @ matrix.T, np.eye(j.twice_value + 1), atol=1e-9)

    def test_large_spin_row_unitarity(self):
        """Test sum_k d^100_{mk}(beta)^2 = 1 for several rows"""
        j = HalfInt(200)
        projections = j.projections()
        for beta in (0.2, 1.3, 2.8):
            for m in (0, 40, 100, -73):
                row = np.array([wigner_small_d(j, m, k, beta) for k in projections])
                assert np.sum(row**2) == pytest.approx(1.0, abs=1e-9)

    @pytest.mark.parametrize("L, M", [(50, 10), (100, 40), (30, -7)])
    def test_large_spin_zonal_column_matches_harmonic(self, L, M):
        """Test d^L_{M0}(theta) = sqrt(4pi/(2L+1)) Y_L^M(theta, 0)"""
        theta = np.array([0.4, 1.3, 2.5])
        harmonic = spherical_harmonic(L, M, theta, np.zeros(3))
        expected = math.sqrt(4 * math.pi / (2 * L + 1)) * harmonic.real
        np.testing.assert_allclose(wigner_small_d(L, M, 0, theta), expected, atol=1e-11)

    @pytest.mark.parametrize("k", [50, 10, -3, -50])
    def test_large_spin_top_row_closed_form(self, k):
        """Test d^50_{50,k}(beta) = (-1)^{50-k} sqrt(C(100, 50-k)) cos^{50+k}(beta/2) sin^{50-k}(beta/2)"""
        beta = 1.3
        log_expected = 0.5 * (math.lgamma(101) - math.lgamma(51 + k) - math.lgamma(51 - k))
        log_expected += (50 + k) * math.log(math.cos(beta / 2)) + (50 - k) * math.log(math.sin(beta / 2))
        expected = (-1) ** (50 - k) * math.exp(log_expected)
        assert wigner_small_d(50, 50, k, beta) == pytest.approx(expected, rel=1e-9)

    def test_half_turn_reflects_projection(self):
        """Test d^j_{mk}(pi) = (-1)^{j-k} delta_{m,-k}"""
        j = HalfInt(37)
        matrix = wigner_d_matrix(j, math.pi)
        expected = np.zeros_like(matrix)
        for col, k in enumerate(j.projections()):
            expected[j.twice_value - col, col] = -1.0 if (j - k).to_int() % 2 else 1.0
        np.testing.assert_allclose(matrix, expected, atol=1e-12)

    def test_column_is_unit_vector(self):
        """Test U(n)|j, k> has unit norm"""
        column = wigner_d_column(2, 1, np.array([0.4, 2.0]), np.array([5.0, 0.1]))
        assert column.shape == (2, 5)
        np.testing.assert_allclose(np.sum(np.abs(column) ** 2, axis=-1), 1.0, atol=1e-13)

    def test_invalid_projection_rejected(self):
        """Test |m| > j and parity mismatches are rejected"""
        with pytest.raises(InvalidQuantumNumberError):
            wigner_small_d(1, 2, 0, 0.5)
        with pytest.raises(InvalidQuantumNumberError):
            wigner_small_d(1, HALF, HALF, 0.5)


class TestSphericalHarmonics:
    """Test cases for spherical harmonics"""

    def test_low_order_values(self):
        """Test Y_0^0 and Y_1^0"""
        assert spherical_harmonic(0, 0, 1.1, 2.2) == pytest.approx(1.0 / math.sqrt(4 * math.pi))
        theta = 0.9
        assert spherical_harmonic(1, 0, theta, 0.0) == pytest.approx(
            math.sqrt(3 / (4 * math.pi)) * math.cos(theta)
        )

    def test_associated_legendre_form(self):
        """Test Y_2^1 against -sqrt(15/8pi) sin cos e^{i phi}"""
        theta, phi = math.pi / 3, math.pi / 4
        expected = (
            -math.sqrt(15 / (8 * math.pi)) * math.sin(theta) * math.cos(theta) * np.exp(1j * phi)
        )
        assert spherical_harmonic(2, 1, theta, phi) == pytest.approx(expected, abs=1e-14)

    def test_negative_order_conjugation(self):
        """Test Y_L^{-M} = (-1)^M conj(Y_L^M)"""
        theta, phi = 1.3, 4.1
        for L in range(5):
            for M in range(L + 1):
                lhs = spherical_harmonic(L, -M, theta, phi)
                rhs = (-1) ** M * np.conj(spherical_harmonic(L, M, theta, phi))
                assert lhs == pytest.approx(rhs, abs=1e-13)

    def test_normalization_on_sphere(self):
        """Test int |Y_3^2|^2 dOmega = 1 with a product rule"""
        rule = gauss_legendre(8)
        phis = 2 * math.pi * np.arange(9) / 9
        theta_grid, phi_grid = np.meshgrid(np.arccos(rule.nodes), phis, indexing="ij")
        values = np.abs(spherical_harmonic(3, 2, theta_grid, phi_grid)) ** 2
        integral = np.sum(rule.weights[:, None] * values) * 2 * math.pi / 9
        assert integral == pytest.approx(1.0, abs=1e-12)

    def test_order_exceeding_degree_rejected(self):
        """Test |M| > L raises"""
        with pytest.raises(InvalidQuantumNumberError):
            spherical_harmonic(1, 2, 0.1, 0.2)


class TestThreeJ:
    """Test cases for 3-j symbols"""

    def test_selection_rules(self):
        """Test vanishing symbols"""
        assert three_j(1, 1, 1, 1, 0, 0) == 0.0
        assert three_j(1, 1, 3, 0, 0, 0) == 0.0
        assert three_j(1, 1, 1, 0, 0, 0) == 0.0

    def test_known_values(self):
        """Test (1 1 0; 1 -1 0) and (j j 0; m -m 0)"""
        assert three_j(1, 1, 0, 1, -1, 0) == pytest.approx(1 / math.sqrt(3), abs=1e-15)
        assert three_j(HALF, HALF, 0, HALF, -HALF, 0) == pytest.approx(1 / math.sqrt(2), abs=1e-15)
        j = HalfInt(5)
        for m in j.projections():
            sign = -1.0 if (j - m).to_int() % 2 else 1.0
            assert three_j(j, j, 0, m, -m, 0) == pytest.approx(sign / math.sqrt(6), abs=1e-14)

    def test_column_permutations(self):
        """Test cyclic invariance and the anti-cyclic phase"""
        args = (HalfInt(3), 1, HalfInt(5), HALF, 1, HalfInt(-3))
        value = three_j(*args)
        j1, j2, j3, m1, m2, m3 = args
        assert value != 0.0
        assert three_j(j2, j3, j1, m2, m3, m1) == pytest.approx(value, abs=1e-14)
        assert three_j(j3, j1, j2, m3, m1, m2) == pytest.approx(value, abs=1e-14)
        parity = (HalfInt.of(j1) + j2 + j3).to_int() % 2
        sign = -1.0 if parity else 1.0
        assert three_j(j2, j1, j3, m2, m1, m3) == pytest.approx(sign * value, abs=1e-14)

    @pytest.mark.parametrize("j1, j2", [(1, 1), (HalfInt(3), 1), (2, HalfInt(3))])
    def test_orthogonality(self, j1, j2):
        """Test sum_{m1,m2} (2l+1)(j1 j2 l; m1 m2 M)(j1 j2 l'; m1 m2 M) = delta_ll'"""
        j1, j2 = HalfInt.of(j1), HalfInt.of(j2)
        ls = abs(j1 - j2).ladder_to(j1 + j2)
        for L in ls:
            for lp in ls:
                for M in min(L, lp).projections():
                    total = 0.0
                    for m1 in j1.projections():
                        m2 = -M - m1
                        if abs(m2) > j2:
                            continue
                        total += three_j(j1, j2, L, m1, m2, M) * three_j(j1, j2, lp, m1, m2, M)
                    expected = 1.0 if L == lp else 0.0
                    assert (L.twice_value + 1) * total == pytest.approx(expected, abs=1e-12)


class TestGaussLegendre:
    """Test cases for Gauss-Legendre quadrature"""

    def test_one_and_two_nodes(self):
        """Test the textbook rules"""
        one = gauss_legendre(1)
        assert one.nodes[0] == pytest.approx(0.0, abs=1e-15)
        assert one.weights[0] == pytest.approx(2.0)
        two = gauss_legendre(2)
        np.testing.assert_allclose(two.nodes, [-1 / math.sqrt(3), 1 / math.sqrt(3)], atol=1e-14)
        np.testing.assert_allclose(two.weights, [1.0, 1.0], atol=1e-14)

    def test_exact_polynomials(self):
        """Test x^4 with 3 nodes and x^8 with 5 nodes"""
        three = gauss_legendre(3)
        assert three.integrate(three.nodes**4) == pytest.approx(0.4, abs=1e-14)
        five = gauss_legendre(5)
        assert five.integrate(five.nodes**8) == pytest.approx(2 / 9, abs=1e-14)

    def test_many_nodes(self):
        """Test weights sum to 2 and nodes are sorted for large n"""
        rule = gauss_legendre(400)
        assert rule.size == 400
        assert np.sum(rule.weights) == pytest.approx(2.0, abs=1e-12)
        assert np.all(np.diff(rule.nodes) > 0)

    def test_rejects_zero_nodes(self):
        """Test n < 1 raises"""
        with pytest.raises(ValueError):
            gauss_legendre(0)

    def test_half_integers_up_to(self):
        """Test the spin ladder 0, 1/2, ..., J"""
        assert half_integers_up_to(HalfInt(3)) == [HalfInt(0), HalfInt(1), HalfInt(2), HalfInt(3)]
