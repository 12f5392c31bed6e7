"""
Angular-momentum special functions.

Legendre polynomials, spherical harmonics, Wigner small-d / big-D functions,
3-j symbols and Gauss-Legendre quadrature. Small-d uses the Jacobi-polynomial
form with log-space prefactors, so quantum numbers up to several hundred stay
accurate. Quantum numbers are HalfInt values (or anything HalfInt.of accepts).
Spherical harmonics come from scipy with the Condon-Shortley phase:

    Y_L^M(theta, phi) = sqrt((2L+1)/4pi) e^{i M phi} d^L_{M0}(theta)

so that conj(D^L_{M0}(phi, theta, 0)) = sqrt(4pi/(2L+1)) Y_L^M(theta, phi).
All functions are pure.
"""

import logging
import math
from functools import lru_cache
from typing import List, Tuple, Union

import numpy as np
from scipy.special import eval_jacobi, gammaln, sph_harm_y

from constants import GAUSS_LEGENDRE_MAX_ITER, GAUSS_LEGENDRE_TOL
from exceptions import ConvergenceError, InvalidQuantumNumberError
from models import HalfInt, Quadrature

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]


def log_factorial(n: int) -> float:
    """ln(n!) via the log-gamma function"""
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 0:
        raise ValueError(f"log_factorial needs a non-negative integer, got {n!r}")
    return float(gammaln(int(n) + 1))


def legendre_p(L: int, x: ArrayLike) -> ArrayLike:
    """Legendre polynomial P_L(x) by Bonnet's recurrence"""
    if isinstance(L, bool) or not isinstance(L, (int, np.integer)) or L < 0:
        raise ValueError(f"Legendre degree must be a non-negative integer, got {L!r}")
    x_arr = np.asarray(x, dtype=float)
    prev = np.ones_like(x_arr)
    if L == 0:
        return _scalar_or_array(prev, x)
    current = x_arr.copy()
    for k in range(1, L):
        prev, current = current, ((2 * k + 1) * x_arr * current - k * prev) / (k + 1)
    return _scalar_or_array(current, x)


def _scalar_or_array(values: np.ndarray, like):
    if np.ndim(like) == 0:
        return values.item()
    return values


def _check_projection(j: HalfInt, m: HalfInt, label: str = "m"):
    if j.twice_value < 0:
        raise InvalidQuantumNumberError(f"j must be non-negative, got {j}")
    if abs(m) > j:
        raise InvalidQuantumNumberError(f"|{label}| = {abs(m)} exceeds j = {j}")
    if (j - m).twice_value % 2:
        raise InvalidQuantumNumberError(f"j - {label} must be an integer (j={j}, {label}={m})")


@lru_cache(maxsize=4096)
def _jacobi_parameters(j2: int, m2: int, k2: int) -> Tuple[int, int, int, int, float]:
    """
    Degree, Jacobi parameters (alpha, beta), sign and log normalisation of d^j_{mk}.

    Arguments are twice the quantum numbers.
    """
    edges = ((j2 + k2) // 2, (j2 - k2) // 2, (j2 + m2) // 2, (j2 - m2) // 2)
    degree = min(edges)
    # m - k is an integer
    shift = (m2 - k2) // 2
    which = edges.index(degree)
    alpha = shift if which in (0, 3) else -shift
    exponent = shift if which in (0, 3) else 0
    beta = (j2 - 2 * degree) - alpha
    log_norm = 0.5 * (
        gammaln(degree + 1)
        + gammaln(degree + alpha + beta + 1)
        - gammaln(degree + alpha + 1)
        - gammaln(degree + beta + 1)
    )
    sign = -1 if exponent % 2 else 1
    return degree, alpha, beta, sign, float(log_norm)


def wigner_small_d(j, m, k, beta: ArrayLike) -> ArrayLike:
    """
    Wigner small-d function d^j_{mk}(beta).

    Jacobi-polynomial form

        d^j_{mk} = (-1)^lam sqrt(s!(s+a+b)!/((s+a)!(s+b)!))
                   sin^a(beta/2) cos^b(beta/2) P_s^{(a,b)}(cos beta)

    with s = min(j +- m, j +- k). The prefactor and the half-angle powers
    are combined in log space, so j up to several hundred stays accurate.
    beta may be an array.
    """
    j, m, k = HalfInt.of(j), HalfInt.of(m), HalfInt.of(k)
    _check_projection(j, m, "m")
    _check_projection(j, k, "k")
    degree, alpha, beta_exp, sign, log_norm = _jacobi_parameters(
        j.twice_value, m.twice_value, k.twice_value
    )

    beta_arr = np.asarray(beta, dtype=float)
    half_sin = np.sin(beta_arr / 2.0)
    half_cos = np.cos(beta_arr / 2.0)
    log_mag = np.full_like(beta_arr, log_norm)
    term_sign = np.full_like(beta_arr, float(sign))
    with np.errstate(divide="ignore"):
        if alpha:
            log_mag = log_mag + alpha * np.log(np.abs(half_sin))
            if alpha % 2:
                term_sign = np.where(half_sin < 0.0, -term_sign, term_sign)
        if beta_exp:
            log_mag = log_mag + beta_exp * np.log(np.abs(half_cos))
            if beta_exp % 2:
                term_sign = np.where(half_cos < 0.0, -term_sign, term_sign)
    jacobi = eval_jacobi(degree, alpha, beta_exp, np.cos(beta_arr))
    with np.errstate(divide="ignore"):
        log_mag = log_mag + np.log(np.abs(jacobi))
    total = term_sign * np.sign(jacobi) * np.exp(log_mag)
    return _scalar_or_array(total, beta)


def wigner_big_d(j, m, k, phi: ArrayLike, theta: ArrayLike, gamma: ArrayLike = 0.0):
    """Wigner D-function D^j_{mk}(phi, theta, gamma) = e^{-i m phi} d^j_{mk}(theta) e^{-i k gamma}"""
    j, m, k = HalfInt.of(j), HalfInt.of(m), HalfInt.of(k)
    d = np.asarray(wigner_small_d(j, m, k, theta))
    phase = np.exp(-1j * (float(m) * np.asarray(phi) + float(k) * np.asarray(gamma)))
    value = phase * d
    if np.ndim(value) == 0:
        return complex(value)
    return value


def wigner_d_matrix(j, beta: ArrayLike) -> np.ndarray:
    """
    Full small-d matrix, shape beta.shape + (2j+1, 2j+1).

    Rows and columns are ordered m = -j, ..., j.
    """
    j = HalfInt.of(j)
    projections = j.projections()
    beta_arr = np.asarray(beta, dtype=float)
    size = len(projections)
    out = np.empty(beta_arr.shape + (size, size))
    for row, m in enumerate(projections):
        for col, k in enumerate(projections):
            out[..., row, col] = wigner_small_d(j, m, k, beta_arr)
    return out


def wigner_d_column(j, k, theta: ArrayLike, phi: ArrayLike) -> np.ndarray:
    """
    Column D^j_{m'k}(phi, theta, 0) for m' = -j, ..., j.

    Shape theta.shape + (2j+1,): the components of U(n)|j, k> in the
    |j, m'> basis for the direction n = (theta, phi).
    """
    j, k = HalfInt.of(j), HalfInt.of(k)
    theta_arr = np.asarray(theta, dtype=float)
    phi_arr = np.asarray(phi, dtype=float)
    projections = j.projections()
    out = np.empty(np.broadcast(theta_arr, phi_arr).shape + (len(projections),), dtype=complex)
    for index, m in enumerate(projections):
        out[..., index] = np.exp(-1j * float(m) * phi_arr) * wigner_small_d(j, m, k, theta_arr)
    return out


def spherical_harmonic(L: int, M: int, theta: ArrayLike, phi: ArrayLike):
    """Spherical harmonic Y_L^M(theta, phi) with the Condon-Shortley phase"""
    for label, value in (("L", L), ("M", M)):
        if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
            raise InvalidQuantumNumberError(f"{label} must be an integer, got {value!r}")
    if L < 0 or abs(M) > L:
        raise InvalidQuantumNumberError(f"Need 0 <= |M| <= L, got L={L}, M={M}")
    value = sph_harm_y(int(L), int(M), np.asarray(theta, dtype=float), np.asarray(phi, dtype=float))
    if np.ndim(value) == 0:
        return complex(value)
    return value


def three_j(j1, j2, j3, m1, m2, m3) -> float:
    """Wigner 3-j symbol by the Racah formula, zero when selection rules fail"""
    j1, j2, j3 = HalfInt.of(j1), HalfInt.of(j2), HalfInt.of(j3)
    m1, m2, m3 = HalfInt.of(m1), HalfInt.of(m2), HalfInt.of(m3)
    for j, m, label in ((j1, m1, "m1"), (j2, m2, "m2"), (j3, m3, "m3")):
        _check_projection(j, m, label)

    if (m1 + m2 + m3).twice_value != 0:
        return 0.0
    if (j1 + j2 + j3).twice_value % 2:
        return 0.0
    if j3 > j1 + j2 or j3 < abs(j1 - j2):
        return 0.0

    # everything below is an integer
    a = (j1 + j2 - j3).to_int()
    b = (j1 - j2 + j3).to_int()
    c = (-j1 + j2 + j3).to_int()
    total = (j1 + j2 + j3).to_int()
    j1pm1, j1mm1 = (j1 + m1).to_int(), (j1 - m1).to_int()
    j2pm2, j2mm2 = (j2 + m2).to_int(), (j2 - m2).to_int()
    j3pm3, j3mm3 = (j3 + m3).to_int(), (j3 - m3).to_int()
    shift1 = (j3 - j2 + m1).to_int()
    shift2 = (j3 - j1 - m2).to_int()

    log_prefactor = 0.5 * (
        gammaln(a + 1)
        + gammaln(b + 1)
        + gammaln(c + 1)
        - gammaln(total + 2)
        + gammaln(j1pm1 + 1)
        + gammaln(j1mm1 + 1)
        + gammaln(j2pm2 + 1)
        + gammaln(j2mm2 + 1)
        + gammaln(j3pm3 + 1)
        + gammaln(j3mm3 + 1)
    )

    t_min = max(0, -shift1, -shift2)
    t_max = min(a, j1mm1, j2pm2)
    value = 0.0
    for t in range(t_min, t_max + 1):
        log_den = (
            gammaln(t + 1)
            + gammaln(shift1 + t + 1)
            + gammaln(shift2 + t + 1)
            + gammaln(a - t + 1)
            + gammaln(j1mm1 - t + 1)
            + gammaln(j2pm2 - t + 1)
        )
        term = math.exp(log_prefactor - log_den)
        value += -term if t % 2 else term

    phase_exponent = (j1 - j2 - m3).to_int()
    return -value if phase_exponent % 2 else value


@lru_cache(maxsize=64)
def gauss_legendre(n: int) -> Quadrature:
    """
    Gauss-Legendre rule with n nodes on [-1, 1].

    Nodes are roots of P_n found by Newton iteration from the Chebyshev-like
    initial guess; exact for polynomials of degree <= 2n - 1.
    """
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"Node count must be a positive integer, got {n!r}")
    n = int(n)
    x = np.cos(math.pi * (np.arange(1, n + 1) - 0.25) / (n + 0.5))

    for iteration in range(GAUSS_LEGENDRE_MAX_ITER):
        p_n, dp_n = _legendre_with_derivative(n, x)
        step = p_n / dp_n
        x = x - step
        if np.max(np.abs(step)) < GAUSS_LEGENDRE_TOL:
            break
    else:
        raise ConvergenceError(f"Gauss-Legendre Newton iteration did not converge for n={n}")

    _, dp_n = _legendre_with_derivative(n, x)
    weights = 2.0 / ((1.0 - x * x) * dp_n * dp_n)
    order = np.argsort(x)
    logger.debug(f"Gauss-Legendre rule with {n} nodes after {iteration + 1} Newton steps")
    return Quadrature(nodes=x[order], weights=weights[order])


def _legendre_with_derivative(n: int, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    prev = np.ones_like(x)
    current = x.copy()
    for k in range(1, n):
        prev, current = current, ((2 * k + 1) * x * current - k * prev) / (k + 1)
    if n == 1:
        return current, np.ones_like(x)
    derivative = n * (x * current - prev) / (x * x - 1.0)
    return current, derivative


def half_integers_up_to(J) -> List[HalfInt]:
    """0, 1/2, 1, ..., J"""
    J = HalfInt.of(J)
    return [HalfInt(t) for t in range(0, J.twice_value + 1)]
