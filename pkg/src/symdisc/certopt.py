"""Certified optimization of exponential sums on tori.

Every certification here reduces to elementary interval reasoning: if F
has Lipschitz constant L in the max metric, a sample F(c) controls F on
the whole box around c.  Two certifiers share that principle:

* ``grid_certify`` -- a uniform grid with covering radius step/2; the
  certificate is  max_sample + L*step/2 < tau.
* ``bb_maximize`` -- breadth-first box subdivision.  Besides the first
  order bound |F(c)| + L*h it uses a second order bound
  sqrt(|F(c)|^2 + 2 sum_j |Re(conj(F) dF_j)| h_j + (sum_j |dF_j| h_j)^2)
  + L2*h^2/2, valid because the affine part of the Taylor expansion can
  be maximized over the box explicitly and the remainder is controlled
  by the curvature constant L2.  Near a smooth peak the second order
  bound closes quadratically, which is what makes 1e-6 tolerances
  affordable.

Results are deterministic: evaluation order is fixed, thread counts only
shard grid rows whose partial results merge in index order, and ties in
the argmax break toward the lexicographically smallest angle vector.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .polyalg import ExpSum, format_float, lipschitz_bound

__all__ = [
    "Certificate",
    "Interval1D",
    "CriticalPoint",
    "grid_certify",
    "bb_maximize",
    "minimize_1d",
    "critical_scan",
    "circle_ratio_max",
    "newton_polish_max",
    "multistart_max",
]

TWO_PI = 2.0 * np.pi
MAX_GRID_POINTS = 2 ** 53


@dataclass
class Certificate:
    """Machine-checkable record of a torus maximization run.

    ``conclusion`` is one of ``certified_below`` (the sup of |F| over the
    whole domain is provably < tau), ``witness_at_or_above`` (some
    evaluated point has |F| >= tau, recorded in ``witness``), or
    ``inconclusive``.  ``max_sample`` never exceeds the true maximum and
    the witness re-evaluates to it.  ``wall_time_s`` is informational and
    excluded from the canonical byte form used for determinism checks.
    """

    mode: str                      # "grid" | "branch-bound"
    L: float
    tau: float
    max_sample: float
    witness: tuple
    conclusion: str
    evals: int
    step: float | None = None          # grid mode
    boxes_explored: int | None = None  # branch-bound mode
    wall_time_s: float = 0.0

    def to_json_dict(self, include_timing: bool = True) -> dict:
        d: dict = {
            "mode": self.mode,
            "L": format_float(self.L),
            "tau": format_float(self.tau),
        }
        if self.mode == "grid":
            d["step"] = format_float(self.step)
        else:
            d["boxes_explored"] = int(self.boxes_explored or 0)
        d["max_sample"] = format_float(self.max_sample)
        d["witness"] = [format_float(x) for x in self.witness]
        d["conclusion"] = self.conclusion
        d["evals"] = int(self.evals)
        if include_timing:
            d["wall_time_s"] = format_float(self.wall_time_s)
        return d

    def to_json(self, include_timing: bool = True) -> str:
        return json.dumps(self.to_json_dict(include_timing),
                          separators=(",", ":"))

    def canonical_bytes(self) -> bytes:
        """Timing-free byte form; identical across reruns and threads."""
        return self.to_json(include_timing=False).encode()


@dataclass(frozen=True)
class Interval1D:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError("need lo < hi")

    @property
    def width(self) -> float:
        return self.hi - self.lo


# ----------------------------------------------------------------------
# grid certification
# ----------------------------------------------------------------------

def _lex_smallest(points: np.ndarray) -> np.ndarray:
    """Lexicographically smallest row of an (N, m) array."""
    order = np.lexsort(points.T[::-1])
    return points[order[0]]


def grid_certify(F: ExpSum, L: float | None, tau: float, step: float,
                 upper: float | None = None, threads: int = 1) -> Certificate:
    """Certify sup |F| < tau from a uniform grid.

    The grid is {i*step : i = 0..M}^m with M*step reaching past 2*pi
    (``upper`` overrides the reach, e.g. 6.2832 for the historical
    parameter set), so every torus point is within step/2 of a sample in
    the max metric and  max_sample + L*step/2 < tau  certifies the sup.
    A declared ``L`` is used as given so the certificate documents the
    constant the margin was checked under; None falls back to the
    collected-sum bound.  Sharding across threads happens in fixed row
    blocks merged in index order; output is byte-identical for any
    thread count.
    """
    t0 = time.perf_counter()
    m = F.m
    L_eff = float(L) if L is not None else lipschitz_bound(F)
    if upper is None:
        M = int(np.floor(TWO_PI / step)) + 1
    else:
        M = int(round(upper / step))
    npts = M + 1
    if float(npts) ** m > MAX_GRID_POINTS:
        raise ValueError(f"grid of {npts}^{m} points exceeds 2^53")
    if npts * step < TWO_PI:
        raise ValueError("grid does not cover the torus")
    axis = np.arange(npts, dtype=np.float64) * step

    rows_per_block = max(1, int(2.0e5 // max(1, npts ** (m - 1))))
    blocks = [(i, min(i + rows_per_block, npts))
              for i in range(0, npts, rows_per_block)]

    def eval_block(bounds: tuple[int, int]):
        lo, hi = bounds
        best_v = -np.inf
        best_pt = None
        count = 0
        if m == 1:
            pts = axis[lo:hi, None]
            vals = np.abs(F.eval_batch(pts))
            i = int(np.argmax(vals))
            return float(vals[i]), (float(pts[i, 0]),), len(pts)
        # inner chunks keep the per-call arrays bounded
        chunk = max(1, int(1.0e6 // max(1, npts ** max(0, m - 2))))
        for r0 in range(lo, hi):
            th0 = axis[r0]
            for c0 in range(0, npts, chunk):
                c1 = min(c0 + chunk, npts)
                rest = [axis[c0:c1]] + [axis] * (m - 2)
                mesh = np.meshgrid(*rest, indexing="ij")
                pts = np.empty((mesh[0].size, m), dtype=np.float64)
                pts[:, 0] = th0
                for j, g in enumerate(mesh):
                    pts[:, 1 + j] = g.reshape(-1)
                vals = np.abs(F.eval_batch(pts))
                count += len(pts)
                i = int(np.argmax(vals))
                v = float(vals[i])
                if v > best_v:
                    ties = np.flatnonzero(vals == vals[i])
                    if len(ties) > 1:
                        best_pt = tuple(_lex_smallest(pts[ties]))
                    else:
                        best_pt = tuple(pts[i])
                    best_v = v
        return best_v, best_pt, count

    if threads <= 1 or len(blocks) == 1:
        results = [eval_block(b) for b in blocks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(eval_block, blocks))

    best_v = -np.inf
    best_pt: tuple = ()
    evals = 0
    for v, pt, count in results:  # merge in block index order
        evals += count
        if pt is not None and v > best_v:
            best_v, best_pt = v, pt
    conclusion = ("certified_below"
                  if best_v + L_eff * step / 2.0 < tau else "inconclusive")
    return Certificate(mode="grid", L=L_eff, tau=tau, step=step,
                       max_sample=best_v, witness=tuple(best_pt),
                       conclusion=conclusion, evals=evals,
                       wall_time_s=time.perf_counter() - t0)


# ----------------------------------------------------------------------
# branch and bound
# ----------------------------------------------------------------------

def _box_upper_bounds(F: ExpSum, rows: np.ndarray, absC: np.ndarray,
                      Kabs: np.ndarray, L: float,
                      centers: np.ndarray, halves: np.ndarray,
                      second_order: bool) -> tuple[np.ndarray, np.ndarray]:
    """Per-box upper bound for |F| over center+/-half, and |F(center)|."""
    N = len(centers)
    sl = 131072
    if N > sl:
        parts = [_box_upper_bounds(F, rows, absC, Kabs, L,
                                   centers[i:i + sl], halves[i:i + sl],
                                   second_order)
                 for i in range(0, N, sl)]
        return (np.concatenate([p[0] for p in parts]),
                np.concatenate([p[1] for p in parts]))
    vals = F.eval_rows(centers, rows)
    A = vals[0]
    absA = np.abs(A)
    hmax = halves.max(axis=1)
    ub = absA + L * hmax
    if second_order:
        m = F.m
        lin = np.zeros(N)
        amp = np.zeros(N)
        conjA = np.conj(A)
        for j in range(m):
            Bj = vals[1 + j]
            lin += np.abs((conjA * Bj).real) * halves[:, j]
            amp += np.abs(Bj) * halves[:, j]
        # curvature remainder: 1/2 sum_t |c_t| (|k_t| . h)^2
        KH = Kabs @ halves.T           # (T, N)
        rem = 0.5 * np.einsum("t,tn->n", absC, KH * KH)
        so = np.sqrt(absA * absA + 2.0 * lin + amp * amp) + rem
        ub = np.minimum(ub, so)
    return ub, absA


def bb_maximize(F: ExpSum, L: float | None = None, tau: float | None = None,
                tol: float = 1e-6, *, second_order: bool = True,
                max_boxes: int = 40_000_000,
                track_gap: float | None = None) -> Certificate:
    cert, _ = bb_maximize_tracked(F, L, tau, tol, second_order=second_order,
                                  max_boxes=max_boxes, track_gap=track_gap)
    return cert


def bb_maximize_tracked(F: ExpSum, L: float | None = None,
                        tau: float | None = None, tol: float = 1e-6, *,
                        second_order: bool = True,
                        max_boxes: int = 40_000_000,
                        track_gap: float | None = None
                        ) -> tuple[Certificate, list]:
    """Breadth-first branch and bound for max |F| over the torus.

    With ``tau`` set, proves sup |F| < tau (conclusion certified_below),
    or returns an evaluated witness with |F| >= tau - 1e-12.  With
    ``tau`` unset, runs to gap ``tol``: on return the true maximum lies
    in [max_sample, max_sample + tol] and tau is reported as
    max_sample + tol.

    ``track_gap`` additionally collects every evaluated center scoring
    within that gap of the running maximum; the second return value
    lists (value, angles) pairs for witness clustering.
    """
    t0 = time.perf_counter()
    m = F.m
    # a declared L is honored as given (see grid_certify); for the box
    # bounds a larger valid constant only loosens the first-order term
    L_eff = float(L) if L is not None else lipschitz_bound(F)
    rows = F.gradient_rows() if second_order else F.coeff_vector().reshape(1, -1)
    absC = np.abs(F.coeff_vector())
    Kabs = np.abs(F.freq_matrix()).astype(np.float64)

    centers = np.full((1, m), np.pi)
    halves = np.full((1, m), np.pi)
    best_v = -np.inf
    best_pt = np.zeros(m)
    boxes = 0
    evals = 0
    tracked: list[tuple[float, tuple]] = []
    witness_hit: tuple | None = None
    conclusion = "inconclusive"

    while len(centers):
        boxes += len(centers)
        if boxes > max_boxes:
            conclusion = "inconclusive"
            break
        ub, absA = _box_upper_bounds(F, rows, absC, Kabs, L_eff,
                                     centers, halves, second_order)
        evals += len(centers)
        # update the running maximum from this level's samples
        i = int(np.argmax(absA))
        v = float(absA[i])
        if v > best_v:
            ties = np.flatnonzero(absA == absA[i])
            if len(ties) > 1:
                cand = centers[ties]
                pick = _lex_smallest(cand)
            else:
                pick = centers[i]
            best_v, best_pt = v, pick.copy()
        elif v == best_v:
            ties = np.flatnonzero(absA == v)
            cand = np.vstack([centers[ties], best_pt[None, :]])
            best_pt = _lex_smallest(cand).copy()
        if track_gap is not None:
            keep = np.flatnonzero(absA >= best_v - track_gap)
            tracked.extend((float(absA[k]), tuple(centers[k])) for k in keep)
            if len(tracked) > 200_000:
                tracked = [t for t in tracked if t[0] >= best_v - track_gap]

        if tau is not None:
            hits = np.flatnonzero(absA >= tau - 1e-12)
            if len(hits):
                j = hits[int(np.argmax(absA[hits]))]
                ties = np.flatnonzero(absA == absA[j])
                witness_hit = tuple(_lex_smallest(centers[ties]))
                conclusion = "witness_at_or_above"
                break
            keep = ub >= tau
        else:
            keep = ub > best_v + tol
        if not np.any(keep):
            conclusion = "certified_below"
            break
        centers = centers[keep]
        halves = halves[keep]
        # split the longest axis of each surviving box
        axis = np.argmax(halves, axis=1)
        newh = halves.copy()
        rowsel = np.arange(len(newh))
        newh[rowsel, axis] = halves[rowsel, axis] / 2.0
        off = np.zeros_like(centers)
        off[rowsel, axis] = newh[rowsel, axis]
        centers = np.vstack([centers - off, centers + off])
        halves = np.vstack([newh, newh])

    if track_gap is not None:
        tracked = [t for t in tracked if t[0] >= best_v - track_gap]
    tau_out = float(tau) if tau is not None else best_v + tol
    if witness_hit is not None:
        wit = witness_hit
    else:
        wit = tuple(best_pt)
    cert = Certificate(mode="branch-bound", L=L_eff, tau=tau_out,
                       max_sample=float(best_v), witness=wit,
                       conclusion=conclusion, evals=evals,
                       boxes_explored=boxes,
                       wall_time_s=time.perf_counter() - t0)
    return cert, tracked


# ----------------------------------------------------------------------
# one-dimensional minimization
# ----------------------------------------------------------------------

_INVPHI = (np.sqrt(5.0) - 1.0) / 2.0


def minimize_1d(f: Callable[[float], float], interval: Interval1D,
                tol: float = 1e-9, coarse: int = 64) -> tuple[float, float]:
    """Coarse scan plus golden-section refinement; returns (x, f(x)).

    The scan uses ``coarse`` (>= 64 enforced) uniform samples slightly
    inside the interval; golden section then narrows the surrounding
    bracket to width ``tol``.  For a unimodal f this is the global
    minimum; for a general f it is the best local minimum reachable from
    the scan's argmin.
    """
    coarse = max(64, int(coarse))
    lo, hi = interval.lo, interval.hi
    pad = (hi - lo) * 1e-9
    xs = np.linspace(lo + pad, hi - pad, coarse)
    vals = [float(f(float(x))) for x in xs]
    i = int(np.argmin(vals))
    a = xs[max(0, i - 1)]
    b = xs[min(coarse - 1, i + 1)]
    if a == b:
        return float(xs[i]), vals[i]
    # golden section on [a, b]
    x1 = b - _INVPHI * (b - a)
    x2 = a + _INVPHI * (b - a)
    f1 = float(f(float(x1)))
    f2 = float(f(float(x2)))
    while (b - a) > tol:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INVPHI * (b - a)
            f1 = float(f(float(x1)))
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INVPHI * (b - a)
            f2 = float(f(float(x2)))
    xbest, fbest = (x1, f1) if f1 <= f2 else (x2, f2)
    return float(xbest), float(fbest)


# ----------------------------------------------------------------------
# critical point scan for the three-angle coefficient search
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class CriticalPoint:
    angles: tuple
    value: float
    grad_norm: float


def _h_eval(c: float, T: np.ndarray) -> np.ndarray:
    a, b, g = T[:, 0], T[:, 1], T[:, 2]
    return ((1.0 - 2.0 * c) * (np.cos(a + b) + np.cos(b + g) + np.cos(g + a))
            - c * (np.cos(2 * a) + np.cos(2 * b) + np.cos(2 * g)))


def _h_grad_hess(c: float, T: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    a, b, g = T[:, 0], T[:, 1], T[:, 2]
    q = 1.0 - 2.0 * c
    sab, sbg, sga = np.sin(a + b), np.sin(b + g), np.sin(g + a)
    cab, cbg, cga = np.cos(a + b), np.cos(b + g), np.cos(g + a)
    grad = np.stack([
        -q * (sab + sga) + 2 * c * np.sin(2 * a),
        -q * (sab + sbg) + 2 * c * np.sin(2 * b),
        -q * (sbg + sga) + 2 * c * np.sin(2 * g),
    ], axis=1)
    H = np.empty((len(T), 3, 3))
    H[:, 0, 0] = -q * (cab + cga) + 4 * c * np.cos(2 * a)
    H[:, 1, 1] = -q * (cab + cbg) + 4 * c * np.cos(2 * b)
    H[:, 2, 2] = -q * (cbg + cga) + 4 * c * np.cos(2 * g)
    H[:, 0, 1] = H[:, 1, 0] = -q * cab
    H[:, 1, 2] = H[:, 2, 1] = -q * cbg
    H[:, 0, 2] = H[:, 2, 0] = -q * cga
    return grad, H


def critical_scan(c: float, grid_n: int = 24,
                  newton_tol: float = 1e-10) -> list[CriticalPoint]:
    """All critical points of the three-angle objective

        h(a,b,g) = (1-2c)(cos(a+b)+cos(b+g)+cos(g+a))
                   - c(cos 2a + cos 2b + cos 2g),

    the torus restriction of Re(z_2 - c z_1^2) in root angles.  Newton
    iteration from a grid_n^3 lattice, deduplicated modulo 2*pi and
    coordinate permutation; sorted by descending h.
    """
    if grid_n < 16:
        raise ValueError("need grid_n >= 16")
    c = float(c)
    axis = np.arange(grid_n) * (TWO_PI / grid_n)
    A, B, G = np.meshgrid(axis, axis, axis, indexing="ij")
    T = np.stack([A.reshape(-1), B.reshape(-1), G.reshape(-1)], axis=1)
    eye = np.eye(3)
    for _ in range(60):
        grad, H = _h_grad_hess(c, T)
        if np.max(np.abs(grad)) < newton_tol * 1e-3:
            break
        # light ridge keeps near-singular Hessians solvable without
        # displacing well-conditioned steps
        H = H + 1e-11 * eye
        det = np.abs(np.linalg.det(H))
        ok = det > 1e-30
        step = np.zeros_like(T)
        if np.any(ok):
            step[ok] = np.linalg.solve(H[ok], grad[ok][..., None])[..., 0]
        nrm = np.max(np.abs(step), axis=1, keepdims=True)
        step = np.where(nrm > 1.0, step / np.maximum(nrm, 1e-300), step)
        T = T - step
    grad, _ = _h_grad_hess(c, T)
    gnorm = np.max(np.abs(grad), axis=1)
    conv = gnorm <= newton_tol
    T = np.mod(T[conv], TWO_PI)
    T[T > TWO_PI - 1e-7] = 0.0
    gnorm = gnorm[conv]
    vals = _h_eval(c, T)
    seen: dict[tuple, CriticalPoint] = {}
    for i in range(len(T)):
        angles = tuple(sorted(float(x) for x in T[i]))
        key = tuple(round(x, 6) for x in angles)
        rec = CriticalPoint(angles=angles, value=float(vals[i]),
                            grad_norm=float(gnorm[i]))
        old = seen.get(key)
        if old is None or rec.grad_norm < old.grad_norm:
            seen[key] = rec
    out = sorted(seen.values(), key=lambda r: (-r.value, r.angles))
    return out


# ----------------------------------------------------------------------
# circle maxima of rational moduli by critical point enumeration
# ----------------------------------------------------------------------

def _autocorr(coeffs: np.ndarray) -> np.ndarray:
    """|p(e^{i theta})|^2 = sum_d u_d e^{i d theta}; returns u_{-p}..u_p."""
    c = np.asarray(coeffs, dtype=np.complex128)
    return np.convolve(c, np.conj(c[::-1]))


def _laurent_eval(u: np.ndarray, theta: np.ndarray) -> np.ndarray:
    p = (len(u) - 1) // 2
    out = np.zeros(len(theta), dtype=np.complex128)
    for d in range(-p, p + 1):
        out += u[d + p] * np.exp(1j * d * theta)
    return out.real


def circle_ratio_max(num: np.ndarray, den: np.ndarray | None = None,
                     samples: int = 64) -> tuple[float, float]:
    """Global max of |N(lambda)/D(lambda)| on |lambda| = 1.

    Both |N|^2 and |D|^2 are real trigonometric polynomials; the
    stationarity condition  (|N|^2)' |D|^2 - |N|^2 (|D|^2)' = 0  is
    another trigonometric polynomial whose zeros on the circle are read
    off as polynomial roots (companion matrix).  Evaluating the ratio at
    every critical angle plus a coarse uniform floor of ``samples``
    points yields the global maximum; the floor makes the result a
    certified lower bound even in degenerate cases.  A circle zero of D
    shared by N (removable: the ratio stays bounded) cannot be sampled
    directly -- |N|^2 and |D|^2 both cancel catastrophically there -- so
    the limit is taken exactly as the ratio of the first significant
    derivatives at the zero; an unshared D zero is a pole and the
    returned value is inf.
    """
    num = np.asarray(num, dtype=np.complex128)
    U = _autocorr(num)
    if den is None:
        den = np.array([1.0 + 0.0j])
    else:
        den = np.asarray(den, dtype=np.complex128)
    V = _autocorr(den)
    pU = (len(U) - 1) // 2
    pV = (len(V) - 1) // 2
    # W = U' V - U V' as a Laurent polynomial; derivative multiplies u_d
    # by i*d.  Work with iW (real coefficients pattern) -- only zeros
    # matter.
    dU = U * 1j * np.arange(-pU, pU + 1)
    dV = V * 1j * np.arange(-pV, pV + 1)
    W = np.convolve(dU, V) - np.convolve(U, dV)
    theta_cand = [np.arange(samples) * (TWO_PI / samples)]
    scaleW = float(np.max(np.abs(W))) if len(W) else 0.0
    if scaleW > 0 and np.max(np.abs(W)) > 1e-14 * max(
            1.0, float(np.max(np.abs(U))) + float(np.max(np.abs(V)))):
        # highest-degree-first coefficients of lambda^{p} W(lambda)
        wpoly = W[::-1]
        nz = np.flatnonzero(np.abs(wpoly) > 1e-300)
        if len(nz):
            wpoly = wpoly[nz[0]:nz[-1] + 1]
        if len(wpoly) > 1:
            rts = np.roots(wpoly)
            on_circle = rts[np.abs(np.abs(rts) - 1.0) < 1e-6]
            if len(on_circle):
                theta_cand.append(np.mod(np.angle(on_circle), TWO_PI))
    theta = np.sort(np.concatenate(theta_cand))
    u = _laurent_eval(U, theta)
    v = _laurent_eval(V, theta)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(v > 0, u / np.where(v > 0, v, 1.0), -np.inf)
    r = np.where(np.isfinite(r), r, -np.inf)
    i = int(np.argmax(r))
    best = float(max(r[i], 0.0))
    theta_best = float(theta[i])
    if len(den) > 1:
        for lim_sq, th in _circle_zero_limits(num, den):
            if lim_sq > best:
                best, theta_best = float(lim_sq), th
    return float(np.sqrt(best)), theta_best


def _derivative_values(asc: np.ndarray, x: complex, jmax: int) -> list:
    """[P(x), P'(x)/1!, P''(x)/2!, ...] from ascending coefficients."""
    c = np.asarray(asc, dtype=np.complex128)
    vals = []
    for j in range(jmax + 1):
        acc = 0.0 + 0.0j
        for i in range(len(c) - 1, j - 1, -1):
            acc = acc * x + complex(c[i]) * math.comb(i, j)
        vals.append(acc)
    return vals


def _circle_zero_limits(num: np.ndarray, den: np.ndarray) -> list:
    """(limit of |N/D|^2, angle) at each circle zero of D.

    For a zero of D of multiplicity k shared by N to order >= k the
    ratio extends continuously with value |N^(k)/D^(k)|; significance of
    a derivative is judged against 1e-7 of the coefficient mass, which
    tolerates the O(eps^(1/k)) error of computed multiple roots.  A zero
    N does not share is a pole: the limit reported is inf.
    """
    dd = den[::-1]
    scale = float(np.max(np.abs(dd)))
    if scale <= 0.0:
        return []
    keep = np.flatnonzero(np.abs(dd) > 1e-14 * scale)
    if len(keep) == 0 or keep[0] >= len(dd) - 1:
        return []
    dd = dd[keep[0]:]
    roots = np.roots(dd / dd[0])
    tN = 1e-7 * float(np.sum(np.abs(num)))
    tD = 1e-7 * float(np.sum(np.abs(den)))
    jmax = max(len(num), len(den)) - 1
    out: list[tuple[float, float]] = []
    for r in roots[np.abs(np.abs(roots) - 1.0) < 1e-6]:
        r = complex(r)
        nv = _derivative_values(num, r, jmax)
        dv = _derivative_values(den, r, jmax)
        jD = next((j for j, w in enumerate(dv) if abs(w) > tD), None)
        jN = next((j for j, w in enumerate(nv) if abs(w) > tN), None)
        if jD is None or jN is None or jN > jD:
            continue
        theta = float(np.mod(np.angle(r), TWO_PI))
        if jN < jD:
            out.append((float("inf"), theta))
        else:
            out.append((abs(nv[jN]) ** 2 / abs(dv[jD]) ** 2, theta))
    return out


# ----------------------------------------------------------------------
# local polishing of torus maxima
# ----------------------------------------------------------------------

def newton_polish_max(F: ExpSum, seeds: np.ndarray, iters: int = 40,
                      gtol: float = 1e-12
                      ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Newton iteration on grad |F|^2 = 0 from each seed (batched).

    Returns (points, values, converged) with values = |F| at the final
    iterates.  Saddles converge too; callers that want maxima filter by
    value.  Non-converged seeds keep their last iterate with
    ``converged`` False.
    """
    m = F.m
    seeds = np.asarray(seeds, dtype=np.float64).reshape(-1, m)
    grows = F.gradient_rows()
    hrows, pairs = F.hessian_rows()
    rows = np.vstack([grows, hrows])
    T = seeds.copy()
    scale = max(1.0, F.crude_bound ** 2)
    for _ in range(iters):
        vals = F.eval_rows(T, rows)
        Fv = vals[0]
        dF = vals[1:1 + m]                    # (m, N)
        # R = |F|^2: grad_j = 2 Re(conj(F) dF_j)
        grad = 2.0 * (np.conj(Fv)[None, :] * dF).real   # (m, N)
        H = np.empty((len(T), m, m))
        for r, (j, l) in enumerate(pairs):
            d2 = vals[1 + m + r]
            hjl = 2.0 * (np.conj(dF[l]) * dF[j] + np.conj(Fv) * d2).real
            H[:, j, l] = hjl
            H[:, l, j] = hjl
        g = grad.T                             # (N, m)
        if np.max(np.abs(g)) < gtol * scale * 1e-2:
            break
        H = H + (1e-12 * scale) * np.eye(m)
        det = np.abs(np.linalg.det(H))
        ok = det > 1e-300
        step = np.zeros_like(T)
        if np.any(ok):
            step[ok] = np.linalg.solve(H[ok], g[ok][..., None])[..., 0]
        nrm = np.max(np.abs(step), axis=1, keepdims=True)
        step = np.where(nrm > 0.5, step * (0.5 / np.maximum(nrm, 1e-300)),
                        step)
        T = T - step
    vals = F.eval_rows(T, rows[:1 + m])
    Fv = vals[0]
    dF = vals[1:1 + m]
    grad = 2.0 * (np.conj(Fv)[None, :] * dF).real
    converged = np.max(np.abs(grad), axis=0) <= gtol * scale
    return np.mod(T, TWO_PI), np.abs(Fv), converged


def multistart_max(F: ExpSum, extra_seeds: np.ndarray | None = None,
                   lattice: int = 4, top_k: int = 64,
                   coarse_per_axis: int = 12) -> tuple[float, np.ndarray]:
    """Polished (non-certified) estimate of max |F|.

    Seeds are the lattice {2*pi*i/lattice}^m, the top_k points of a
    coarse uniform grid, and any caller-provided extras; the best
    polished value is returned with its angles.  The coarse grid maximum
    is kept as a floor, so the estimate is never below plain sampling.
    """
    m = F.m
    seeds = []
    if lattice ** m <= 8192:
        ax = np.arange(lattice) * (TWO_PI / lattice)
        mesh = np.meshgrid(*([ax] * m), indexing="ij")
        seeds.append(np.stack([g.reshape(-1) for g in mesh], axis=1))
    ax = (np.arange(coarse_per_axis) + 0.5) * (TWO_PI / coarse_per_axis)
    if coarse_per_axis ** m <= 4_000_000:
        mesh = np.meshgrid(*([ax] * m), indexing="ij")
        grid = np.stack([g.reshape(-1) for g in mesh], axis=1)
        gv = np.abs(F.eval_batch(grid))
        order = np.argsort(-gv, kind="stable")[:top_k]
        seeds.append(grid[order])
        floor_v = float(gv[order[0]])
        floor_pt = grid[order[0]]
    else:
        floor_v, floor_pt = -np.inf, np.zeros(m)
    if extra_seeds is not None and len(extra_seeds):
        seeds.append(np.asarray(extra_seeds, dtype=np.float64).reshape(-1, m))
    allseeds = np.vstack(seeds)
    pts, vals, _conv = newton_polish_max(F, allseeds)
    i = int(np.argmax(vals))
    if vals[i] >= floor_v:
        return float(vals[i]), pts[i]
    return floor_v, floor_pt
