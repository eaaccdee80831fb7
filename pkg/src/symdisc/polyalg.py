"""Polynomial algebra for the symmetrized polydisc.

Two term-level representations drive everything downstream:

* ``QuasiHomPoly`` -- a sparse polynomial in the coordinates z_1..z_n of
  C^n, where z_j carries weight j.  A polynomial is quasi-homogeneous of
  weight w when every monomial z^a satisfies sum_j j*a_j = w; such
  polynomials pick up the factor lambda^w under the root scaling
  t -> lambda*t, which is what makes torus maxima of their moduli
  meaningful.  Coefficients are exact rationals (``fractions.Fraction``)
  or binary64 complex numbers; exact inputs stay exact through ring
  operations.

* ``ExpSum`` -- a finite exponential sum  sum_k c_k exp(i<k, theta>)  on
  an m-torus with integer frequency vectors k.  This is the form in which
  boundary restrictions get certified: the pullback of a polynomial under
  z = sigma(e^{i theta_1}, ..., e^{i theta_m} [, 1]) is an ExpSum, and an
  ExpSum carries computable Lipschitz and curvature constants.

Evaluation orders are fixed (terms sorted by exponent/frequency vector)
so that repeated runs produce bit-identical floating point results.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

Coeff = Union[Fraction, complex]

__all__ = [
    "QuasiHomPoly",
    "ExpSum",
    "PowerSumExpr",
    "eval_poly",
    "pullback_torus",
    "lipschitz_bound",
    "newton_power_sum",
    "waring_coefficient",
    "format_float",
]


# ----------------------------------------------------------------------
# coefficient arithmetic: Fraction stays exact, anything else is complex
# ----------------------------------------------------------------------

def _norm_coeff(c) -> Coeff:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    return complex(c)


def _cadd(a: Coeff, b: Coeff) -> Coeff:
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a + b
    return _ccomplex(a) + _ccomplex(b)


def _cmul(a: Coeff, b: Coeff) -> Coeff:
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a * b
    return _ccomplex(a) * _ccomplex(b)


def _ccomplex(c: Coeff) -> complex:
    if isinstance(c, Fraction):
        return complex(float(c))
    return complex(c)


def _is_zero(c: Coeff) -> bool:
    return c == 0


def format_float(x: float) -> str:
    """Decimal string with 17 significant digits (binary64 round-trips)."""
    return format(float(x), ".17g")


def _coeff_to_json(c: Coeff):
    if isinstance(c, Fraction):
        return {"rational": f"{c.numerator}/{c.denominator}"}
    z = complex(c)
    return {"re": format_float(z.real), "im": format_float(z.imag)}


def _coeff_from_json(obj) -> Coeff:
    if "rational" in obj:
        num, den = obj["rational"].split("/")
        return Fraction(int(num), int(den))
    return complex(float(obj["re"]), float(obj["im"]))


# ----------------------------------------------------------------------
# quasi-homogeneous polynomials
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class QuasiHomPoly:
    """Sparse polynomial in z_1..z_n with weight(z_j) = j.

    ``terms`` maps exponent vectors (length n, nonnegative ints) to
    nonzero coefficients and is stored sorted by exponent vector, so all
    iteration (evaluation, serialization, arithmetic) is deterministic.
    ``weight`` is the declared quasi-homogeneous weight, or None for a
    polynomial with mixed weights.
    """

    n: int
    terms: tuple  # ((expt, coeff), ...) sorted by expt
    weight: int | None = None

    @staticmethod
    def from_terms(n: int,
                   items: Iterable[tuple[Sequence[int], Coeff]] | Mapping,
                   weight: int | None = None,
                   infer_weight: bool = False) -> "QuasiHomPoly":
        if isinstance(items, Mapping):
            items = items.items()
        acc: dict[tuple[int, ...], Coeff] = {}
        for expt, coeff in items:
            e = tuple(int(a) for a in expt)
            if len(e) != n or any(a < 0 for a in e):
                raise ValueError(f"bad exponent vector {e} for n={n}")
            c = _norm_coeff(coeff)
            if e in acc:
                acc[e] = _cadd(acc[e], c)
            else:
                acc[e] = c
        terms = tuple((e, c) for e, c in sorted(acc.items()) if not _is_zero(c))
        if infer_weight:
            weights = {QuasiHomPoly.monomial_weight(e) for e, _ in terms}
            weight = weights.pop() if len(weights) == 1 else None
        if weight is not None:
            for e, _ in terms:
                w = QuasiHomPoly.monomial_weight(e)
                if w != weight:
                    raise ValueError(
                        f"monomial {e} has weight {w}, declared {weight}")
        return QuasiHomPoly(n=n, terms=terms, weight=weight)

    @staticmethod
    def monomial_weight(expt: Sequence[int]) -> int:
        return sum((j + 1) * a for j, a in enumerate(expt))

    @staticmethod
    def variable(n: int, j: int) -> "QuasiHomPoly":
        """The coordinate z_j (1-based)."""
        e = [0] * n
        e[j - 1] = 1
        return QuasiHomPoly.from_terms(n, [(tuple(e), Fraction(1))], weight=j)

    def evaluate(self, z: Sequence[complex]) -> complex:
        """Evaluate at a point of C^n; term order is fixed by the sorted
        exponent vectors, so the summation order never varies."""
        if len(z) != self.n:
            raise ValueError(f"expected {self.n} coordinates, got {len(z)}")
        zs = [complex(w) for w in z]
        total = 0.0 + 0.0j
        for expt, coeff in self.terms:
            mono = 1.0 + 0.0j
            for base, a in zip(zs, expt):
                if a:
                    mono *= base ** a
            total += _ccomplex(coeff) * mono
        return total

    def __add__(self, other: "QuasiHomPoly") -> "QuasiHomPoly":
        if self.n != other.n:
            raise ValueError("mixed variable counts")
        w = self.weight if self.weight == other.weight else None
        return QuasiHomPoly.from_terms(
            self.n, list(self.terms) + list(other.terms), weight=w)

    def __mul__(self, other: "QuasiHomPoly") -> "QuasiHomPoly":
        if self.n != other.n:
            raise ValueError("mixed variable counts")
        acc: dict[tuple[int, ...], Coeff] = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                e = tuple(a + b for a, b in zip(e1, e2))
                c = _cmul(c1, c2)
                acc[e] = _cadd(acc[e], c) if e in acc else c
        w = None
        if self.weight is not None and other.weight is not None:
            w = self.weight + other.weight
        return QuasiHomPoly.from_terms(self.n, acc, weight=w)

    def scale(self, c: Coeff) -> "QuasiHomPoly":
        c = _norm_coeff(c)
        return QuasiHomPoly.from_terms(
            self.n, [(e, _cmul(c, k)) for e, k in self.terms],
            weight=self.weight)

    def coefficient(self, expt: Sequence[int]) -> Coeff:
        e = tuple(int(a) for a in expt)
        for ee, c in self.terms:
            if ee == e:
                return c
        return Fraction(0)

    def total_degree_part(self, d: int) -> "QuasiHomPoly":
        """Monomials of ordinary total degree d (used for jet extraction)."""
        kept = [(e, c) for e, c in self.terms if sum(e) == d]
        return QuasiHomPoly.from_terms(self.n, kept)

    def min_total_degree(self) -> int:
        if not self.terms:
            return 0
        return min(sum(e) for e, _ in self.terms)

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "weight": self.weight,
            "terms": [
                {"expt": list(e), "coeff": _coeff_to_json(c)}
                for e, c in self.terms
            ],
        }

    @staticmethod
    def from_json_dict(obj: dict) -> "QuasiHomPoly":
        return QuasiHomPoly.from_terms(
            int(obj["n"]),
            [(tuple(t["expt"]), _coeff_from_json(t["coeff"]))
             for t in obj["terms"]],
            weight=obj.get("weight"),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), separators=(",", ":"))


def eval_poly(P: QuasiHomPoly, z: Sequence[complex]) -> complex:
    return P.evaluate(z)


# ----------------------------------------------------------------------
# exponential sums on tori
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class ExpSum:
    """Finite sum  F(theta) = sum_k c_k exp(i <k, theta>)  on [0,2pi)^m.

    Frequencies are integer vectors of length ``m``; terms are stored
    sorted lexicographically by frequency.  The cached constants are the
    crude sup bound B = sum |c_k|, the Lipschitz constant in the max
    metric L = sum |c_k| * ||k||_1, and the curvature constant
    L2 = sum |c_k| * ||k||_1^2 bounding the Hessian quadratic form.
    """

    m: int
    terms: tuple  # ((freq, complex coeff), ...) lex-sorted by freq

    @staticmethod
    def from_terms(m: int,
                   items: Iterable[tuple[Sequence[int], complex]] | Mapping
                   ) -> "ExpSum":
        if isinstance(items, Mapping):
            items = items.items()
        acc: dict[tuple[int, ...], complex] = {}
        for freq, coeff in items:
            k = tuple(int(a) for a in freq)
            if len(k) != m:
                raise ValueError(f"frequency {k} has wrong length for m={m}")
            c = complex(coeff)
            acc[k] = acc.get(k, 0.0 + 0.0j) + c
        terms = tuple((k, c) for k, c in sorted(acc.items()) if c != 0)
        return ExpSum(m=m, terms=terms)

    @staticmethod
    def constant(m: int, c: complex) -> "ExpSum":
        return ExpSum.from_terms(m, [((0,) * m, c)])

    @cached_property
    def crude_bound(self) -> float:
        """B = sum |c_k|, a sup bound for |F| on the torus."""
        return float(sum(abs(c) for _, c in self.terms))

    @cached_property
    def lipschitz(self) -> float:
        """L = sum |c_k| * ||k||_1; |F(a)-F(b)| <= L * max_j |a_j-b_j|."""
        return float(sum(abs(c) * sum(abs(k) for k in freq)
                         for freq, c in self.terms))

    @cached_property
    def curvature(self) -> float:
        """L2 = sum |c_k| * ||k||_1^2, bounds |d^2/dt^2 F(theta+t u)| for
        ||u||_inf <= 1."""
        return float(sum(abs(c) * sum(abs(k) for k in freq) ** 2
                         for freq, c in self.terms))

    def __add__(self, other: "ExpSum") -> "ExpSum":
        if self.m != other.m:
            raise ValueError("mixed torus dimensions")
        return ExpSum.from_terms(self.m, list(self.terms) + list(other.terms))

    def __mul__(self, other: "ExpSum") -> "ExpSum":
        if self.m != other.m:
            raise ValueError("mixed torus dimensions")
        acc: dict[tuple[int, ...], complex] = {}
        for k1, c1 in self.terms:
            for k2, c2 in other.terms:
                k = tuple(a + b for a, b in zip(k1, k2))
                acc[k] = acc.get(k, 0.0 + 0.0j) + c1 * c2
        return ExpSum.from_terms(self.m, acc)

    def scale(self, c: complex) -> "ExpSum":
        return ExpSum.from_terms(
            self.m, [(k, complex(c) * v) for k, v in self.terms])

    def derivative(self, axis: int) -> "ExpSum":
        """d/d theta_axis, again an ExpSum (coefficients pick up i*k_axis)."""
        return ExpSum.from_terms(
            self.m,
            [(k, 1j * k[axis] * c) for k, c in self.terms])

    def freq_matrix(self) -> np.ndarray:
        return np.array([k for k, _ in self.terms], dtype=np.int64).reshape(
            len(self.terms), self.m)

    def coeff_vector(self) -> np.ndarray:
        return np.array([c for _, c in self.terms], dtype=np.complex128)

    # -- evaluation ----------------------------------------------------

    def eval_at(self, theta: Sequence[float]) -> complex:
        th = [float(t) for t in theta]
        if len(th) != self.m:
            raise ValueError("wrong number of angles")
        total = 0.0 + 0.0j
        for k, c in self.terms:
            phase = sum(a * t for a, t in zip(k, th))
            total += c * complex(np.cos(phase), np.sin(phase))
        return total

    def _power_tables(self, Theta: np.ndarray) -> list[dict[int, np.ndarray]]:
        """Per-axis tables of exp(i p theta_j) for every exponent p used."""
        K = self.freq_matrix()
        tables: list[dict[int, np.ndarray]] = []
        for j in range(self.m):
            needed = sorted(set(int(p) for p in K[:, j]))
            base = np.exp(1j * Theta[:, j])
            tab: dict[int, np.ndarray] = {0: np.ones(len(Theta),
                                                     dtype=np.complex128)}
            pmax = max((p for p in needed if p > 0), default=0)
            pmin = min((p for p in needed if p < 0), default=0)
            cur = tab[0]
            for p in range(1, pmax + 1):
                cur = cur * base
                tab[p] = cur
            if pmin < 0:
                ibase = np.conj(base)
                cur = tab[0]
                for p in range(1, -pmin + 1):
                    cur = cur * ibase
                    tab[-p] = cur
            tables.append(tab)
        return tables

    def eval_batch(self, Theta: np.ndarray) -> np.ndarray:
        """Evaluate at rows of Theta (N, m) -> (N,) complex.

        Accumulation is a fixed-order loop over the sorted terms (no BLAS
        reductions), so results are identical from run to run and do not
        depend on thread counts.
        """
        Theta = np.asarray(Theta, dtype=np.float64).reshape(-1, self.m)
        if not self.terms:
            return np.zeros(len(Theta), dtype=np.complex128)
        tables = self._power_tables(Theta)
        out = np.zeros(len(Theta), dtype=np.complex128)
        for k, c in self.terms:
            mono = tables[0][k[0]].copy() if self.m else None
            for j in range(1, self.m):
                if k[j]:
                    mono = mono * tables[j][k[j]]
            out += c * mono
        return out

    def eval_rows(self, Theta: np.ndarray,
                  coeff_rows: np.ndarray) -> np.ndarray:
        """Evaluate several sums sharing this frequency support.

        ``coeff_rows`` has shape (R, T) over this sum's terms; returns
        (R, N) complex values.  Used to get F together with its partial
        derivatives in one pass over the monomial values.
        """
        Theta = np.asarray(Theta, dtype=np.float64).reshape(-1, self.m)
        R = coeff_rows.shape[0]
        out = np.zeros((R, len(Theta)), dtype=np.complex128)
        if not self.terms:
            return out
        tables = self._power_tables(Theta)
        for t, (k, _) in enumerate(self.terms):
            mono = tables[0][k[0]]
            for j in range(1, self.m):
                if k[j]:
                    mono = mono * tables[j][k[j]]
            for r in range(R):
                c = coeff_rows[r, t]
                if c != 0:
                    out[r] += c * mono
        return out

    def gradient_rows(self) -> np.ndarray:
        """Coefficient rows (1+m, T): row 0 is F, row 1+j is dF/dtheta_j."""
        K = self.freq_matrix()
        c = self.coeff_vector()
        rows = np.zeros((1 + self.m, len(self.terms)), dtype=np.complex128)
        rows[0] = c
        for j in range(self.m):
            rows[1 + j] = 1j * K[:, j] * c
        return rows

    def hessian_rows(self) -> tuple[np.ndarray, list[tuple[int, int]]]:
        """Second-derivative coefficient rows and their (j,l) index pairs."""
        K = self.freq_matrix()
        c = self.coeff_vector()
        pairs = [(j, l) for j in range(self.m) for l in range(j, self.m)]
        rows = np.zeros((len(pairs), len(self.terms)), dtype=np.complex128)
        for r, (j, l) in enumerate(pairs):
            rows[r] = -K[:, j] * K[:, l] * c
        return rows, pairs

    def to_json_dict(self) -> dict:
        return {
            "m": self.m,
            "terms": [
                {"freq": list(k),
                 "re": format_float(c.real),
                 "im": format_float(c.imag)}
                for k, c in self.terms
            ],
        }

    @staticmethod
    def from_json_dict(obj: dict) -> "ExpSum":
        return ExpSum.from_terms(
            int(obj["m"]),
            [(tuple(t["freq"]), complex(float(t["re"]), float(t["im"])))
             for t in obj["terms"]],
        )

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), separators=(",", ":"))


def lipschitz_bound(F: ExpSum, declared_valid: float | None = None) -> float:
    """Lipschitz constant of F on the torus in the max metric.

    The generic bound is sum |c_k| * ||k||_1.  A caller holding an
    externally derived constant that is known to be valid may pass it;
    the smaller of the two is returned.
    """
    L = F.lipschitz
    if declared_valid is not None:
        L = min(L, float(declared_valid))
    return L


# ----------------------------------------------------------------------
# torus pullback
# ----------------------------------------------------------------------

def _elementary_symmetric_expsums(n: int, m: int, reduce: bool
                                  ) -> list[dict[tuple[int, ...], int]]:
    """sigma_0..sigma_n of the roots (e^{i th_1},...,e^{i th_m}[,1]) as
    frequency dicts with integer coefficients."""
    zero = (0,) * m
    # polynomial prod (X + t_j) built as list of sigma_k dicts
    sig: list[dict[tuple[int, ...], int]] = [
        {zero: 1}] + [dict() for _ in range(n)]
    roots: list[dict[tuple[int, ...], int]] = []
    for j in range(m):
        f = [0] * m
        f[j] = 1
        roots.append({tuple(f): 1})
    if reduce:
        roots.append({zero: 1})
    for root in roots:
        for k in range(min(n, len(roots)), 0, -1):
            add = _freq_conv(sig[k - 1], root)
            for key, v in add.items():
                sig[k][key] = sig[k].get(key, 0) + v
    return sig


def _freq_conv(a: dict, b: dict) -> dict:
    out: dict[tuple[int, ...], int] = {}
    for k1, c1 in a.items():
        for k2, c2 in b.items():
            k = tuple(x + y for x, y in zip(k1, k2))
            out[k] = out.get(k, 0) + c1 * c2
    return out


def pullback_torus(P: QuasiHomPoly, reduce: bool = True) -> ExpSum:
    """Restrict P(sigma(t)) to unimodular roots t, as an ExpSum.

    With ``reduce=True`` the last root is pinned at 1, so the result
    lives on an (n-1)-torus; since P must be quasi-homogeneous this loses
    nothing of max |P| over the full torus (a common rotation of the
    roots scales P by a unimodular factor).  With ``reduce=False`` all n
    roots are free.
    """
    n = P.n
    if reduce and P.weight is None:
        raise ValueError("reduced pullback requires a quasi-homogeneous "
                         "polynomial (declared weight)")
    m = n - 1 if reduce else n
    sig = _elementary_symmetric_expsums(n, m, reduce)
    # cache powers of each sigma_j as frequency dicts
    powers: dict[tuple[int, int], dict] = {}

    def sig_power(j: int, a: int) -> dict:
        if a == 0:
            return {(0,) * m: 1}
        key = (j, a)
        if key not in powers:
            if a == 1:
                powers[key] = sig[j]
            else:
                powers[key] = _freq_conv(sig_power(j, a - 1), sig[j])
        return powers[key]

    acc: dict[tuple[int, ...], complex] = {}
    for expt, coeff in P.terms:
        mono: dict[tuple[int, ...], int] = {(0,) * m: 1}
        for j, a in enumerate(expt):
            if a:
                mono = _freq_conv(mono, sig_power(j + 1, a))
        c = _ccomplex(coeff)
        for k, v in mono.items():
            acc[k] = acc.get(k, 0.0 + 0.0j) + c * v
    return ExpSum.from_terms(m, acc)


# ----------------------------------------------------------------------
# power sums via Newton's identities
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class PowerSumExpr:
    """p_m = sum t_j^m written in the coordinates z = sigma(t)."""

    n: int
    m: int
    expr: QuasiHomPoly


def newton_power_sum(n: int, m: int) -> PowerSumExpr:
    """Power sum p_m over n roots as an exact polynomial in z_1..z_n.

    Newton's identities with all arithmetic in Fraction:
        p_m = z_1 p_{m-1} - z_2 p_{m-2} + ... + (-1)^{m-1} m z_m  (m <= n)
    and the same recursion without the trailing term once m > n.
    """
    if n < 1 or m < 1:
        raise ValueError("need n >= 1, m >= 1")
    ps: list[QuasiHomPoly] = [
        QuasiHomPoly.from_terms(n, [((0,) * n, Fraction(0))], weight=0)]
    for mm in range(1, m + 1):
        acc = QuasiHomPoly.from_terms(n, [], weight=mm)
        for i in range(1, min(mm - 1, n) + 1):
            zi = QuasiHomPoly.variable(n, i)
            term = (zi * ps[mm - i]).scale(Fraction((-1) ** (i - 1)))
            acc = acc + term
        if mm <= n:
            e = [0] * n
            e[mm - 1] = 1
            acc = acc + QuasiHomPoly.from_terms(
                n, [(tuple(e), Fraction((-1) ** (mm - 1) * mm))], weight=mm)
        ps.append(acc)
    return PowerSumExpr(n=n, m=m, expr=ps[m])


def waring_coefficient(n: int) -> Fraction:
    """Coefficient of z_1 z_n in p_{n+1}/n, exactly (-1)^{n-1} (n+1)/n.

    p_{n+1}/n is the normalized next power sum after the variable count;
    its z_1 z_n cross coefficient is the quantity that feeds the
    cross-direction lower bound for the order-two Reiffen metric.
    """
    expr = newton_power_sum(n, n + 1).expr
    e = [0] * n
    e[0] += 1
    e[n - 1] += 1
    c = expr.coefficient(tuple(e))
    if not isinstance(c, Fraction):
        raise TypeError("power sum coefficients must be exact")
    return c / n
