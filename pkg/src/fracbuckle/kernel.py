"""Riesz-Caputo fractional derivative on piecewise-cubic fields.

The two-sided derivative of order ``alpha`` at ``x`` is written as a
convolution of the first integer derivative with the power-law kernel

.. math::

    A(x, \\xi) = \\frac{1 - \\alpha}{2}
        \\begin{cases}
        \\ell_A^{\\alpha - 1} (x - \\xi)^{-\\alpha}, & x - \\ell_A < \\xi < x, \\\\
        \\ell_B^{\\alpha - 1} (\\xi - x)^{-\\alpha}, & x < \\xi < x + \\ell_B,
        \\end{cases}

where :math:`\\ell_A = \\min(x, l_f)` and :math:`\\ell_B = \\min(L - x, l_f)`
are the horizons truncated by the domain ends. With these prefactors each
side integrates to exactly 1/2, so a unit slope has unit derivative and
``alpha = 1`` recovers the classical first derivative.

Since the FE fields are piecewise cubic, the convolution is integrated
exactly: each element intersected by the horizon contributes power-law
moments of the kernel (see :func:`frac_moments`) times the Taylor
coefficients of the shape-function derivatives.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from math import comb, factorial

import numpy as np
from scipy.special import hyp2f1

from fracbuckle.errors import DomainError, ParameterError, SingularityError
from fracbuckle.fem import Mesh1D, hermite_derivatives, shape_rows


class LengthScale(enum.Enum):
    """Which lengths enter the kernel prefactors.

    ``TRUNCATED`` uses the position-dependent horizons ``(l_A, l_B)``, which
    keeps the kernel normalised everywhere. ``CONSTANT`` uses ``l_f`` on both
    sides while still truncating the support at the domain ends.
    """

    TRUNCATED = "truncated"
    CONSTANT = "constant"


class Side(enum.Enum):
    LEFT = "left"
    RIGHT = "right"


@dataclass(frozen=True)
class FracParams:
    """Fractional order ``alpha`` in (0, 1] and nominal horizon length ``l_f``."""

    alpha: float
    l_f: float
    length_scale: LengthScale = LengthScale.TRUNCATED

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ParameterError(f"alpha must lie in (0, 1], got {self.alpha}")
        if not self.l_f > 0.0:
            raise ParameterError(f"l_f must be positive, got {self.l_f}")
        object.__setattr__(self, "length_scale", LengthScale(self.length_scale))

    @property
    def is_local(self) -> bool:
        return self.alpha == 1.0


@dataclass(frozen=True)
class Horizon:
    """Terminal distances to the left (``l_A``) and right (``l_B``) of a point."""

    l_A: float
    l_B: float

    def length(self, side: Side) -> float:
        return self.l_A if side is Side.LEFT else self.l_B


def horizon_at(x: float, length: float, l_f: float) -> Horizon:
    """Horizon at ``x`` on ``[0, length]``, truncated at the domain ends."""
    if not 0.0 <= x <= length:
        raise DomainError(f"x = {x} outside [0, {length}]")
    if l_f <= 0:
        raise ParameterError("l_f must be positive")
    return Horizon(min(x, l_f), min(length - x, l_f))


def kernel_weight(
    x: float, xi: float, h: Horizon, alpha: float, scale: Horizon | None = None
) -> float:
    """Kernel density :math:`A(x, \\xi)` in units of 1/length.

    :arg scale: lengths used in the prefactors; defaults to ``h`` itself
        (normalised kernel). The support is always ``h``.
    """
    if not 0.0 < alpha < 1.0:
        raise ParameterError("kernel_weight needs 0 < alpha < 1; alpha = 1 is the local limit")
    if xi == x:
        raise SingularityError("kernel is singular at xi = x")
    side = Side.LEFT if xi < x else Side.RIGHT
    ell = h.length(side)
    if ell <= 0.0:
        raise ParameterError(f"{side.value} horizon has zero length")
    if abs(xi - x) >= ell:
        raise DomainError(f"xi = {xi} outside the horizon of x = {x}")
    s = (scale or h).length(side)
    return 0.5 * (1.0 - alpha) * s ** (alpha - 1.0) * abs(x - xi) ** (-alpha)


def _moments(a, b, x, alpha: float, side: Side, max_degree: int = 3) -> np.ndarray:
    """Vectorised :math:`\\int_a^b |x - \\xi|^{-\\alpha} (\\xi - a)^k d\\xi`.

    Segments closer to ``x`` than their own length use the binomial expansion
    of the power-law antiderivative; farther ones use the Gauss hypergeometric
    form, which avoids cancellation between nearly equal powers.
    """
    a, b, x = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (a, b, x)))
    ell = b - a
    if side is Side.RIGHT:
        near, far = a - x, b - x
        z_sign = -1.0
    else:
        near, far = x - b, x - a
        z_sign = 1.0
    # distance from x to the segment end at which (xi - a)^k is anchored
    anchor = near if side is Side.RIGHT else far
    use_binom = near < ell
    out = np.zeros(a.shape + (max_degree + 1,))
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(use_binom, 0.0, z_sign * ell / np.where(anchor > 0, anchor, 1.0))
        for k in range(max_degree + 1):
            acc = np.zeros(a.shape)
            for j in range(k + 1):
                p = j + 1.0 - alpha
                power = (far**p - near**p) / p
                if side is Side.RIGHT:
                    c = comb(k, j) * (-near) ** (k - j)
                else:
                    c = comb(k, j) * (-1.0) ** j * far ** (k - j)
                acc += c * power
            hyp = ell ** (k + 1) / (k + 1) * anchor ** (-alpha) * hyp2f1(alpha, k + 1, k + 2, z)
            out[..., k] = np.where(use_binom, acc, hyp)
    out[ell <= 0] = 0.0
    return out


def frac_moments(seg, x: float, alpha: float, max_degree: int = 3) -> np.ndarray:
    """Power-law moments :math:`m_k = \\int_a^b |x - \\xi|^{-\\alpha} (\\xi - a)^k d\\xi`.

    :arg seg: interval ``(a, b)`` with ``x`` not strictly inside it.
    :returns: array of ``m_0 .. m_{max_degree}``.
    """
    a, b = map(float, seg)
    if not b > a:
        raise ParameterError("segment must satisfy a < b")
    if not 0.0 < alpha < 1.0:
        raise ParameterError("moments need 0 < alpha < 1")
    if not 0 <= max_degree <= 3:
        raise ParameterError("max_degree must be in 0..3")
    if a < x < b:
        raise DomainError("x lies inside the segment; split it at x first")
    side = Side.RIGHT if a >= x else Side.LEFT
    return _moments(a, b, x, alpha, side, max_degree)


@dataclass(frozen=True)
class WeightRow:
    """Linear functional on the nodal vector of a 1D mesh.

    ``weights @ u`` approximates the fractional derivative at ``eval_point``.
    """

    weights: np.ndarray
    eval_point: float

    @property
    def entries(self) -> dict[int, float]:
        nz = np.flatnonzero(self.weights)
        return {int(i): float(self.weights[i]) for i in nz}

    def apply(self, values) -> float:
        return float(self.weights @ np.asarray(values, dtype=float))


def frac_derivative_rows(mesh: Mesh1D, fp: FracParams, xs, base_deriv: int) -> np.ndarray:
    """Rows ``R`` with ``R @ u`` = :math:`D^\\alpha[u^{(d)}](x)` at every ``x`` in ``xs``.

    Vectorised over evaluation points and elements. At ``alpha = 1`` this is
    exactly the integer derivative row of order ``base_deriv + 1``.
    """
    if base_deriv not in (0, 1):
        raise ParameterError("base_deriv must be 0 or 1")
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    L, h = mesh.length, mesh.l_e
    if np.any(xs < 0.0) or np.any(xs > L):
        raise DomainError(f"evaluation point outside [0, {L}]")
    order = base_deriv + 1
    if fp.is_local:
        return shape_rows(mesh, xs, order)

    alpha = fp.alpha
    # adjacent elements must share bit-identical endpoints: with a singular
    # kernel even a 1e-17 gap next to x carries weight gap**(1 - alpha)
    nodes = mesh.nodes
    starts, ends = nodes[:-1], nodes[1:]
    cols = 2 * np.arange(mesh.n_elem)
    rows = np.zeros((xs.size, mesh.n_dof))
    kfact = np.array([factorial(k) for k in range(4)], dtype=float)

    for side in Side:
        if side is Side.LEFT:
            ell = np.minimum(xs, fp.l_f)
            lo, hi = xs - ell, xs
        else:
            ell = np.minimum(L - xs, fp.l_f)
            lo, hi = xs, xs + ell
        a = np.maximum(starts[None, :], lo[:, None])
        b = np.minimum(ends[None, :], hi[:, None])
        ok = b > a
        b = np.where(ok, b, a)
        mom = _moments(a, b, xs[:, None], alpha, side)
        s0 = (a - starts[None, :]) / h
        # Taylor coefficients in (xi - a) of the order-th shape derivative
        taylor = np.stack(
            [hermite_derivatives(s0, h, order + k) / kfact[k] for k in range(4)], axis=-1
        )
        w = np.einsum("pesk,pek->pes", taylor, mom)
        if fp.length_scale is LengthScale.TRUNCATED:
            pref_len = ell
        else:
            pref_len = np.full_like(ell, fp.l_f)
        safe = np.where(ell > 0.0, pref_len, 1.0)
        pref = np.where(ell > 0.0, 0.5 * (1.0 - alpha) * safe ** (alpha - 1.0), 0.0)
        w *= np.where(ok, 1.0, 0.0)[:, :, None] * pref[:, None, None]
        for i in range(4):
            rows[:, cols + i] += w[:, :, i]

        # a vanishing side is the limit of a normalised half-kernel: half the
        # local derivative (zero under constant prefactors)
        dead = ell <= 0.0
        if np.any(dead) and fp.length_scale is LengthScale.TRUNCATED:
            rows[dead] += 0.5 * shape_rows(mesh, xs[dead], order)
    return rows


def frac_derivative_row(mesh: Mesh1D, fp: FracParams, x: float, base_deriv: int) -> WeightRow:
    """Fractional derivative row at a single point (see :func:`frac_derivative_rows`)."""
    return WeightRow(frac_derivative_rows(mesh, fp, [x], base_deriv)[0], float(x))
