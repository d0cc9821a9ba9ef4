"""
Birkhoff-James orthogonality via one-sided derivatives.

x is orthogonal to y iff 0 minimizes the convex function g(lam) = ||x + lam*y||,
i.e. iff the left derivative of g at 0 is <= 0 and the right derivative is >= 0.
"""
import math
import logging
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from ..config import TOLERANCES
from ..enums import NormKind, OrthoMethod
from ..errors import NormError
from ..spaces.norms import NormDescriptor, Vector, as_vector, norm_values
from ..spaces.polygon import active_facets

logger = logging.getLogger(__name__)

# Maps an (m, n) block of directions to (d_minus, d_plus) arrays of length m.
BracketOracle = Callable[[Vector], tuple[Vector, Vector]]


@dataclass(frozen=True)
class OrthoCertificate:
    """
    Evidence for (or against) x orthogonal to y.

    :param d_minus: Left derivative of lam -> ||x + lam*y|| at 0.
    :param d_plus: Right derivative at 0.
    :param method: How the derivatives were obtained.
    :param tol: Tolerance of the sign test.
    """
    d_minus: float
    d_plus: float
    method: OrthoMethod
    tol: float

    @property
    def asserts_orthogonal(self) -> bool:
        return self.d_minus <= self.tol and self.d_plus >= -self.tol

    def to_dict(self) -> dict:
        return {
            "d_minus": self.d_minus,
            "d_plus": self.d_plus,
            "method": self.method.value,
            "tol": self.tol,
        }


def default_method(norm: NormDescriptor) -> OrthoMethod:
    if norm.is_polyhedral:
        return OrthoMethod.EXACT_POLYHEDRAL
    return OrthoMethod.CLOSED_FORM_LP


def _lp_gradient(norm: NormDescriptor, x: Vector) -> Vector:
    """Gradient of a smooth Lp norm at x != 0 (the norming functional)."""
    p = norm.exponent
    nx = float(norm_values(norm, x))
    mag = np.abs(x) / nx
    return np.sign(x) * mag ** (p - 1.0)


def _polyhedral_oracle(norm: NormDescriptor, x: Vector) -> BracketOracle:
    active = norm.facet_matrix[active_facets(norm, x)]

    def oracle(ys: Vector) -> tuple[Vector, Vector]:
        values = ys @ active.T
        return np.min(values, axis=-1), np.max(values, axis=-1)

    return oracle


def _l1_oracle(x: Vector) -> BracketOracle:
    # Coordinates of x that vanish contribute |y_i| with both signs.
    cutoff = TOLERANCES.facet_activity * float(np.max(np.abs(x)))
    zero = np.abs(x) <= cutoff
    signs = np.where(zero, 0.0, np.sign(x))

    def oracle(ys: Vector) -> tuple[Vector, Vector]:
        smooth = ys @ signs
        kink = np.abs(ys[..., zero]).sum(axis=-1)
        return smooth - kink, smooth + kink

    return oracle


def _linf_oracle(x: Vector) -> BracketOracle:
    mag = np.abs(x)
    top = float(np.max(mag))
    active = np.flatnonzero(mag >= top * (1.0 - TOLERANCES.facet_activity))
    signs = np.sign(x[active])

    def oracle(ys: Vector) -> tuple[Vector, Vector]:
        values = ys[..., active] * signs
        return np.min(values, axis=-1), np.max(values, axis=-1)

    return oracle


def _smooth_oracle(norm: NormDescriptor, x: Vector) -> BracketOracle:
    grad = _lp_gradient(norm, x)

    def oracle(ys: Vector) -> tuple[Vector, Vector]:
        d = ys @ grad
        return d, d

    return oracle


def _quotient_oracle(norm: NormDescriptor, x: Vector) -> BracketOracle:
    g0 = float(norm_values(norm, x))
    k_min, k_max = TOLERANCES.quotient_k_min, TOLERANCES.quotient_k_max

    def oracle(ys: Vector) -> tuple[Vector, Vector]:
        ys = np.atleast_2d(ys)
        q_minus = np.full(len(ys), -np.inf)
        q_plus = np.full(len(ys), np.inf)
        live = np.arange(len(ys))
        for k in range(k_min, k_max + 1):
            h = 2.0 ** -k
            # Convexity: q_plus decreases to d_plus, q_minus increases to d_minus as h -> 0,
            # so [q_minus, q_plus] always contains [d_minus, d_plus].
            new_plus = (norm_values(norm, x + h * ys[live]) - g0) / h
            new_minus = (g0 - norm_values(norm, x - h * ys[live])) / h
            width = new_plus - new_minus
            # At a kink the bracket cannot close, and past the rounding floor it widens again.
            stalled = width >= q_plus[live] - q_minus[live] - TOLERANCES.quotient_width
            keep = live[~stalled]
            q_plus[keep] = new_plus[~stalled]
            q_minus[keep] = new_minus[~stalled]
            live = live[~(stalled | (width < TOLERANCES.quotient_width))]
            if not len(live):
                break
        return q_minus, q_plus

    return oracle


def bracket_oracle(norm: NormDescriptor, x, method: OrthoMethod | None = None) -> BracketOracle:
    """
    Derivative oracle for a fixed base point x, evaluated on blocks of directions.
    Precomputes the active set / gradient once, so sweeps over many y stay cheap.

    :param norm: Norm descriptor.
    :param x: Nonzero base point.
    :param method: Force a method; default picks the exact one for the norm.
    :raises NormError: x = 0, or the method does not apply to the norm.
    """
    x = as_vector(x, norm.dim)
    if not np.any(x):
        raise NormError("Orthogonality base point must be nonzero")

    method = method or default_method(norm)
    match method:
        case OrthoMethod.BRACKETED_QUOTIENT:
            return _quotient_oracle(norm, x)
        case OrthoMethod.EXACT_POLYHEDRAL:
            if not norm.is_polyhedral:
                raise NormError(f"Exact polyhedral derivatives need a polyhedral norm, got {norm.label()}")
            return _polyhedral_oracle(norm, x)
        case _:
            if norm.kind is NormKind.POLYHEDRAL:
                raise NormError("Closed-form Lp derivatives do not apply to polyhedral norms")
            if norm.is_smooth_lp:
                return _smooth_oracle(norm, x)
            if math.isinf(norm.p):
                return _linf_oracle(x)
            return _l1_oracle(x)


def one_sided_derivatives(
    norm: NormDescriptor, x, y, method: OrthoMethod | None = None
) -> tuple[float, float]:
    """
    One-sided derivatives (d_minus, d_plus) of lam -> ||x + lam*y|| at lam = 0.
    :raises NormError: x = 0.
    """
    y = as_vector(y, norm.dim)
    d_minus, d_plus = bracket_oracle(norm, x, method)(y[None, :])
    return float(d_minus[0]), float(d_plus[0])


def is_bj_orthogonal(
    norm: NormDescriptor,
    x,
    y,
    tol: float = TOLERANCES.ortho,
    method: OrthoMethod | None = None,
) -> tuple[bool, OrthoCertificate]:
    """
    Decide x orthogonal to y in the Birkhoff-James sense.

    :return: (verdict, certificate); y = 0 is orthogonal to every x.
    :raises NormError: x = 0.
    """
    method = method or default_method(norm)
    y = as_vector(y, norm.dim)
    if not np.any(y):
        bracket_oracle(norm, x, method)  # still rejects x = 0
        cert = OrthoCertificate(0.0, 0.0, method, tol)
        return True, cert
    d_minus, d_plus = one_sided_derivatives(norm, x, y, method)
    cert = OrthoCertificate(d_minus, d_plus, method, tol)
    return cert.asserts_orthogonal, cert


def james_supporting_functional(norm: NormDescriptor, x) -> Vector:
    """
    Norming functional f with f(x) = ||x|| and dual norm 1.

    Polyhedral and Lp(inf): among the active facets, the one with the lexicographically
    largest (|f|, f). For Lp(inf) that is sign(x_i) e_i for the smallest active index i,
    so a max-norm ball and its polygon form give the same functional.
    Smooth Lp: the gradient of the norm at x.
    Lp(1): the sign vector, zero on vanishing coordinates.

    :raises NormError: x = 0.
    """
    x = as_vector(x, norm.dim)
    if not np.any(x):
        raise NormError("Supporting functional needs a nonzero point")
    if norm.is_polyhedral:
        facets = norm.facet_matrix[active_facets(norm, x)]
        best = max(range(len(facets)), key=lambda i: (*np.abs(facets[i]), *facets[i]))
        return facets[best].copy()
    if norm.is_smooth_lp:
        return _lp_gradient(norm, x)
    if math.isinf(norm.p):
        mag = np.abs(x)
        i = int(np.flatnonzero(mag >= np.max(mag) * (1.0 - TOLERANCES.facet_activity))[0])
        f = np.zeros_like(x)
        f[i] = np.sign(x[i])
        return f
    cutoff = TOLERANCES.facet_activity * float(np.max(np.abs(x)))
    return np.where(np.abs(x) <= cutoff, 0.0, np.sign(x))


def james_orthogonal(norm: NormDescriptor, x, y, tol: float = TOLERANCES.ortho) -> bool:
    """
    James's criterion for polyhedral norms: some norming functional of x vanishes on y.
    The norming functionals of x are the convex hull of its active facets, so one of them
    vanishes on y iff the active facet values on y straddle zero.
    """
    x = as_vector(x, norm.dim)
    y = as_vector(y, norm.dim)
    if not norm.is_polyhedral:
        raise NormError(f"James's facet criterion needs a polyhedral norm, got {norm.label()}")
    values = norm.facet_matrix[active_facets(norm, x)] @ y
    return bool(np.min(values) <= tol and np.max(values) >= -tol)
