"""Gaussian-free-field covariance checks for eigenvalue height pairings.

The eigenvalue counting functions of the growing graph, paired against
Chebyshev-U polynomials, converge to half-plane Gaussian free field pairings
along the trajectories Omega(x, t) = e^t (x + i sqrt(1 - x^2)).  The GFF
covariance is the half-plane Green function; pushed through the pairing it
reduces to a double integral whose closed form is

    delta_jk * (pi / 4k) * e^{j (t0 - t1)},   t0 <= t1.

This module evaluates the double integral numerically (handling the
logarithmic singularity on the diagonal at equal times) and exposes the
discrete height pairing computed from a graph spectrum.
"""

from __future__ import annotations

import cmath
import math
import warnings

from scipy import integrate

from .errors import InvalidInputError, NumericError
from .spectra import PolySeries, Spectrum, cheb_t_poly, linear_statistic


def green_halfplane(z: complex, w: complex) -> float:
    """Green function of the upper half plane with Dirichlet boundary."""
    z = complex(z)
    w = complex(w)
    if z.imag <= 0 or w.imag <= 0:
        raise InvalidInputError("both points need positive imaginary part")
    if z == w:
        raise NumericError("Green function diverges at coincident points")
    return (-math.log(abs(z - w)) + math.log(abs(z - w.conjugate()))) / (2 * math.pi)


def gff_closed_form(j: int, k: int, t0: float, t1: float) -> float:
    """Closed form of the pairing covariance: delta_jk (pi/4k) e^{j(t0-t1)}."""
    if j != k:
        return 0.0
    return math.pi / (4 * k) * math.exp(j * (t0 - t1))


def gff_cheb_covariance(
    j: int, k: int, t0: float, t1: float, tol: float = 1e-6
) -> float:
    """Numerical pairing covariance of the j-th and k-th Chebyshev-U heights.

    Evaluates -(1/2pi) times the double integral over [0, pi]^2 of

        sin(j u) sin(k v) log | (e^{t0+iu} - e^{t1+iv}) / (e^{t0+iu} - e^{t1-iv}) |.

    At t0 = t1 the integrand has an integrable log singularity on u = v; the
    inner integral is split there.  Raises on a quadrature error estimate
    above 1e-5.
    """
    if j < 1 or k < 1:
        raise InvalidInputError("need j >= 1 and k >= 1")
    if t0 > t1:
        raise InvalidInputError(f"need t0 <= t1, got t0={t0}, t1={t1}")

    def integrand(u: float, v: float) -> float:
        z0 = cmath.exp(complex(t0, u))
        num = abs(z0 - cmath.exp(complex(t1, v)))
        den = abs(z0 - cmath.exp(complex(t1, -v)))
        if num == 0.0 or den == 0.0:
            return 0.0
        return math.sin(j * u) * math.sin(k * v) * math.log(num / den)

    singular = t0 == t1
    err_acc = 0.0

    def inner(v: float) -> float:
        nonlocal err_acc
        if singular and 0.0 < v < math.pi:
            a, ea = integrate.quad(integrand, 0.0, v, args=(v,), epsabs=tol, limit=100)
            b, eb = integrate.quad(
                integrand, v, math.pi, args=(v,), epsabs=tol, limit=100
            )
            err_acc = max(err_acc, ea + eb)
            return a + b
        val, err = integrate.quad(
            integrand, 0.0, math.pi, args=(v,), epsabs=tol, limit=100
        )
        err_acc = max(err_acc, err)
        return val

    with warnings.catch_warnings():
        # near the diagonal the log singularity triggers a spurious slow-
        # convergence warning; the explicit error bound below still governs
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        total, outer_err = integrate.quad(inner, 0.0, math.pi, epsabs=tol, limit=100)
    bound = outer_err + math.pi * err_acc
    if bound > 1e-5:
        raise NumericError(f"quadrature error estimate {bound:.2e} exceeds 1e-5")
    return -total / (2 * math.pi)


def height_pairing(
    spectrum: Spectrum, d: int, k: int, conditional_mean: float
) -> float:
    """Discrete height pairing against the (k-1)-th Chebyshev-U polynomial.

    Equals -(1/k) (tr T_k - conditional mean), where the conditional mean of
    the same centered trace statistic given the vertex count is estimated by
    the caller across runs.
    """
    if k < 1:
        raise InvalidInputError(f"need k >= 1, got {k}")
    if spectrum.scale != "unit":
        raise InvalidInputError(f"need a unit-scale spectrum, got {spectrum.scale!r}")
    stat = linear_statistic(spectrum, cheb_t_poly(k))
    return -(stat - conditional_mean) / k
