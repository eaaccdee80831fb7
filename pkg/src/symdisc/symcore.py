"""Core geometry of the symmetrized polydisc G_n.

A point of C^n is written z = (z_1, ..., z_n); it lies in G_n exactly
when the monic polynomial

    X^n - z_1 X^{n-1} + z_2 X^{n-2} - ... + (-1)^n z_n

has all roots in the open unit disc, i.e. z = sigma(t) for some t in
D^n with sigma the elementary symmetric map.  Two independent membership
oracles are provided:

* ``classify_point`` -- find the roots and compare moduli against 1.
* ``membership_via_flambda`` -- the rational criterion: z in G_n iff the
  family  f_lambda(z) = (sum_j j z_j lambda^{j-1}) /
  (n + sum_{j<n} (n-j) z_j lambda^j)  has modulus < 1 on the closed unit
  disc in lambda (the denominator must not vanish there).

The one-variable reduction maps p_{n,lambda} : G_n -> G_{n-1} compose
down to the disc, which is what the distance estimates in
:mod:`symdisc.metrics` are built on.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .polyalg import QuasiHomPoly

__all__ = [
    "MembershipVerdict",
    "RootFindingError",
    "DegenerateDenominatorError",
    "sym_map",
    "classify_point",
    "membership_via_flambda",
    "p_reduce",
    "f_multi",
    "f_lambda",
    "gz_taylor",
    "pk_polynomial",
]

BOUNDARY_TOL = 1e-9          # default width of the boundary band
DENOM_CUTOFF = 1e-14         # reduction maps refuse smaller denominators


class RootFindingError(RuntimeError):
    """The companion-matrix root finder failed to converge; no verdict."""


class DegenerateDenominatorError(ZeroDivisionError):
    """A reduction-map denominator fell below the cutoff."""


@dataclass(frozen=True)
class MembershipVerdict:
    """Outcome of a membership test.

    ``margin`` is the oracle's distance-like excess: negative inside,
    positive outside, and ``kind`` is derived from it by thresholding
    against ``tolerance`` (inside iff margin < -tolerance, boundary iff
    |margin| <= tolerance).  ``diagnostic`` carries side information such
    as a vanishing slice denominator.
    """

    kind: str
    margin: float
    tolerance: float
    diagnostic: str = ""

    @staticmethod
    def from_margin(margin: float, tolerance: float,
                    diagnostic: str = "") -> "MembershipVerdict":
        if margin < -tolerance:
            kind = "inside"
        elif margin <= tolerance:
            kind = "boundary"
        else:
            kind = "outside"
        return MembershipVerdict(kind=kind, margin=float(margin),
                                 tolerance=float(tolerance),
                                 diagnostic=diagnostic)


# ----------------------------------------------------------------------
# the symmetrization map and its inverse direction (root finding)
# ----------------------------------------------------------------------

def sym_map(roots: Sequence[complex]) -> tuple[complex, ...]:
    """Elementary symmetric functions (sigma_1, ..., sigma_n) of roots.

    The roots are sorted by (re, im) before the incremental expansion of
    prod_j (X + t_j), so permutations of the input produce bit-identical
    output.
    """
    ts = sorted((complex(t) for t in roots),
                key=lambda t: (t.real, t.imag))
    n = len(ts)
    coeffs = [1.0 + 0.0j] + [0.0 + 0.0j] * n
    deg = 0
    for t in ts:
        deg += 1
        for k in range(deg, 0, -1):
            coeffs[k] = coeffs[k] + t * coeffs[k - 1]
    return tuple(coeffs[1:])


def _monic_coeffs(z: Sequence[complex]) -> np.ndarray:
    """Coefficients [1, -z_1, z_2, ...] of X^n - z_1 X^{n-1} + ..."""
    n = len(z)
    c = np.empty(n + 1, dtype=np.complex128)
    c[0] = 1.0
    for j in range(1, n + 1):
        c[j] = (-1) ** j * complex(z[j - 1])
    return c


def _polyval_and_deriv(coeffs: np.ndarray, x: complex) -> tuple[complex, complex]:
    p = 0.0 + 0.0j
    dp = 0.0 + 0.0j
    for c in coeffs:
        dp = dp * x + p
        p = p * x + c
    return p, dp


def _newton_polish(coeffs: np.ndarray, x: complex, iters: int = 2) -> complex:
    for _ in range(iters):
        p, dp = _polyval_and_deriv(coeffs, x)
        if abs(dp) > DENOM_CUTOFF:
            step = p / dp
            if abs(step) < 0.5 * (1.0 + abs(x)):
                x = x - step
    return x


def poly_roots(coeffs: np.ndarray) -> np.ndarray:
    """Roots of a monic polynomial, cluster-corrected and polished.

    Companion-matrix eigenvalues (numpy.roots), clustered before any
    polishing: an m-fold root produces an eigenvalue cloud of radius
    O(eps^{1/m}) whose centroid is accurate to near rounding level (the
    eigenvalue sum matches the trace), so accepted clusters are replaced
    by their raw centroid.  Newton polishing is applied only to roots
    that stay single -- polishing cluster members first would scatter
    the centroid by O(eps^{1/m}) and lose that accuracy.  Raises
    :class:`RootFindingError` if residuals stay large.
    """
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    n = len(coeffs) - 1
    if n == 0:
        return np.zeros(0, dtype=np.complex128)
    raw = np.roots(coeffs)
    if len(raw) != n or not np.all(np.isfinite(raw)):
        raise RootFindingError("companion eigenvalue failure")
    roots = _merge_root_clusters(coeffs, [complex(r) for r in raw])
    scale = float(np.max(np.abs(coeffs)))
    for x in roots:
        p, _ = _polyval_and_deriv(coeffs, x)
        if abs(p) > 1e-6 * scale * max(1.0, abs(x)) ** n:
            raise RootFindingError(
                f"root residual {abs(p):.3e} too large at {x!r}")
    order = sorted(range(n), key=lambda i: (roots[i].real, roots[i].imag))
    return np.array([roots[i] for i in order], dtype=np.complex128)


def _merge_root_clusters(coeffs: np.ndarray,
                         roots: list[complex]) -> list[complex]:
    """Replace eigenvalue clouds of multiple roots by their centroid.

    The residual gate: a cluster of m genuinely coincident roots has
    |p(centroid)| at rounding-noise level, while m distinct roots at
    spread s give |p(centroid)| ~ s^m * |rest|, a factor ~10^m above the
    (s/10)^m threshold.  Merges therefore fire only when consistent with
    true multiplicity; rejected clusters fall back to Newton-polished
    individual roots, as do singletons.  Multiplicity >= 5 clouds can
    exceed the chaining radius, in which case accuracy degrades
    gracefully to the polished eigenvalues.
    """
    n = len(roots)
    radius = 1e-2
    scale = float(np.max(np.abs(coeffs)))
    deg = len(coeffs) - 1
    used = [False] * n
    out: list[complex] = []
    for i in range(n):
        if used[i]:
            continue
        cluster = [i]
        used[i] = True
        for j in range(i + 1, n):
            if not used[j] and any(abs(roots[j] - roots[k]) < radius
                                   for k in cluster):
                cluster.append(j)
                used[j] = True
        if len(cluster) == 1:
            out.append(_newton_polish(coeffs, roots[i]))
            continue
        m = len(cluster)
        centroid = sum(roots[k] for k in cluster) / m
        spread = max(abs(roots[k] - centroid) for k in cluster)
        p, _ = _polyval_and_deriv(coeffs, centroid)
        tol = scale * ((spread / 10.0) ** m
                       + 1e-12 * max(1.0, abs(centroid)) ** deg)
        if abs(p) <= tol:
            out.extend([centroid] * m)
        else:
            out.extend(_newton_polish(coeffs, roots[k]) for k in cluster)
    return out


def classify_point(z: Sequence[complex],
                   tolerance: float = BOUNDARY_TOL) -> MembershipVerdict:
    """Membership via root moduli: margin = max_j |root_j| - 1."""
    z = tuple(complex(w) for w in z)
    if len(z) == 0:
        raise ValueError("empty point")
    roots = poly_roots(_monic_coeffs(z))
    margin = float(np.max(np.abs(roots))) - 1.0
    return MembershipVerdict.from_margin(margin, tolerance)


# ----------------------------------------------------------------------
# rational slice family and reduction maps
# ----------------------------------------------------------------------

def _numerator_coeffs(z: Sequence[complex]) -> np.ndarray:
    """N(lambda) = sum_{j=1}^n j z_j lambda^{j-1}, ascending coeffs."""
    n = len(z)
    return np.array([j * complex(z[j - 1]) for j in range(1, n + 1)],
                    dtype=np.complex128)


def _denominator_coeffs(z: Sequence[complex]) -> np.ndarray:
    """D(lambda) = n + sum_{j=1}^{n-1} (n-j) z_j lambda^j, ascending."""
    n = len(z)
    c = np.zeros(n, dtype=np.complex128)
    c[0] = n
    for j in range(1, n):
        c[j] = (n - j) * complex(z[j - 1])
    return c


def f_lambda(z: Sequence[complex], lam: complex) -> complex:
    """The rational slice function f_lambda(z) in closed form."""
    lam = complex(lam)
    num = complex(np.polyval(_numerator_coeffs(z)[::-1], lam))
    den = complex(np.polyval(_denominator_coeffs(z)[::-1], lam))
    if abs(den) < DENOM_CUTOFF:
        raise DegenerateDenominatorError(
            f"slice denominator ~ 0 at lambda={lam!r}")
    return num / den


def p_reduce(z: Sequence[complex], lam: complex) -> tuple[complex, ...]:
    """One step of the reduction G_n -> G_{n-1}:

        ztilde_j = ((n-j) z_j + lambda (j+1) z_{j+1}) / (n + lambda z_1).
    """
    n = len(z)
    if n < 2:
        raise ValueError("p_reduce needs n >= 2")
    lam = complex(lam)
    if abs(lam) > 1 + 1e-12:
        raise ValueError("|lambda| must be <= 1")
    den = n + lam * complex(z[0])
    if abs(den) < DENOM_CUTOFF:
        raise DegenerateDenominatorError(
            f"degenerate denominator at stage n={n}")
    return tuple(((n - j) * complex(z[j - 1]) + lam * (j + 1) * complex(z[j]))
                 / den
                 for j in range(1, n))


def f_multi(z: Sequence[complex], lams: Sequence[complex]) -> complex:
    """Composite reduction down to the disc.

    ``lams`` supplies the n-1 parameters, consumed from the G_n stage
    downward; the last stage G_2 -> D is f_lambda for n=2.  When all
    parameters coincide this agrees with ``f_lambda(z, lam)`` to
    rounding, which the tests check at relative 1e-12.
    """
    z = tuple(complex(w) for w in z)
    n = len(z)
    if len(lams) != n - 1:
        raise ValueError(f"need {n - 1} parameters for n={n}")
    for lam in lams:
        if abs(complex(lam)) > 1 + 1e-12:
            raise ValueError("all |lambda_j| must be <= 1")
    cur = z
    idx = 0
    while len(cur) > 1:
        cur = p_reduce(cur, lams[idx])
        idx += 1
    return cur[0]


# ----------------------------------------------------------------------
# certified membership through the slice family
# ----------------------------------------------------------------------

def membership_via_flambda(z: Sequence[complex],
                           samples: int | None = None,
                           tolerance: float = 1e-6) -> MembershipVerdict:
    """Membership via sup of |f_lambda(z)| over the closed unit disc.

    Checks first that the denominator D(lambda) has no zero in the
    closed disc (otherwise the verdict is driven by how far the zeros
    sit outside, with a diagnostic flag); when D is zero-free, f is
    holomorphic across the closed disc, the maximum principle puts the
    sup on |lambda| = 1, and the circle maximum is computed by complete
    critical-point enumeration (see :func:`symdisc.certopt.circle_ratio_max`).
    Margin = sup - 1.
    """
    from .certopt import circle_ratio_max  # local import, avoids a cycle

    z = tuple(complex(w) for w in z)
    n = len(z)
    if samples is None:
        samples = 16 * n
    if samples < 8 * n:
        raise ValueError(f"need samples >= {8 * n}")
    num = _numerator_coeffs(z)
    den = _denominator_coeffs(z)

    # (i) denominator zero-free on the closed disc?  mu^{n-1} D(1/mu)
    # has descending coefficients (d_0, ..., d_{n-1}) with leading
    # d_0 = n, and its roots are reciprocals of the zeros of D; D is
    # zero-free on |lambda| <= 1 iff every |mu| < 1.
    dmargin = -1.0
    if n >= 2 and float(np.max(np.abs(den[1:]))) > 0.0:
        mu = poly_roots(den / den[0])
        dmargin = float(np.max(np.abs(mu))) - 1.0
    if dmargin > tolerance:
        return MembershipVerdict.from_margin(
            dmargin, tolerance, diagnostic="denominator vanishes in disc")

    value, _theta = circle_ratio_max(num, den, samples=samples)
    margin = value - 1.0
    diag = "" if dmargin < -tolerance else "denominator zero near circle"
    return MembershipVerdict.from_margin(margin, tolerance, diagnostic=diag)


# ----------------------------------------------------------------------
# Taylor coefficients of the slice generating function
# ----------------------------------------------------------------------

def gz_taylor(z: Sequence[complex], k: int) -> complex:
    """k-th Taylor coefficient at 0 of g_z(lambda) = lambda f_lambda(z).

    Writes g_z = N~ / D with N~(lambda) = sum_j j z_j lambda^j and runs
    the power-series division; the coefficient a_k is the value of the
    weight-k polynomial returned by :func:`pk_polynomial`.
    """
    z = tuple(complex(w) for w in z)
    n = len(z)
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    # D coefficients: d_0 = n, d_j = (n-j) z_j for 1 <= j <= n-1
    d = [complex(n)] + [(n - j) * z[j - 1] for j in range(1, n)]
    a: list[complex] = [0.0 + 0.0j]
    for i in range(1, k + 1):
        num = i * z[i - 1] if i <= n else 0.0 + 0.0j
        s = num
        for l in range(1, min(i, n)):
            s -= a[i - l] * d[l]
        a.append(s / n)
    return a[k]


def pk_polynomial(n: int, k: int) -> QuasiHomPoly:
    """The weight-k polynomial P_k with g_z(lambda) = sum_k P_k(z) lambda^k.

    Exact rational power-series division of sum_j j z_j lambda^j by
    n + sum_j (n-j) z_j lambda^j.  P_1 = z_1/n, and generally the z_k
    coefficient is k/n; each P_k maps G_n into the unit disc.
    """
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    zero = QuasiHomPoly.from_terms(n, [], weight=0)
    # denominator coefficient polynomials d_j, j >= 1
    dvars = [QuasiHomPoly.variable(n, j).scale(Fraction(n - j))
             for j in range(1, n)]
    a: list[QuasiHomPoly] = [zero]
    for i in range(1, k + 1):
        if i <= n:
            e = [0] * n
            e[i - 1] = 1
            s = QuasiHomPoly.from_terms(n, [(tuple(e), Fraction(i))],
                                        weight=i)
        else:
            s = QuasiHomPoly.from_terms(n, [], weight=i)
        for l in range(1, min(i, n)):
            prod = (a[i - l] * dvars[l - 1]).scale(Fraction(-1))
            s = s + prod
        a.append(s.scale(Fraction(1, n)))
    out = a[k]
    return QuasiHomPoly.from_terms(n, out.terms, weight=k)
