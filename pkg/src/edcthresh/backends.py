"""Scalar backends for syndrome-likelihood arrays.

A backend supplies the scalar type stored in a distribution and the handful of
array constructors the engine needs. Likelihood propagation only ever adds and
multiplies nonnegative values, so double precision is the fast default; exact
rationals back the brute-force oracles, arbitrary-precision floats reproduce
high-precision runs, and truncated polynomials in a single error parameter
support the formal order checks.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Sequence

import mpmath
import numpy as np


class DoubleBackend:
    name = "double"

    one = 1.0
    zero = 0.0

    def scalar(self, x) -> float:
        if isinstance(x, str):
            return float(Fraction(x))
        return float(x)

    def as_float(self, s) -> float:
        return float(s)

    def is_zero(self, s) -> bool:
        return s == 0.0

    def delta(self, r: int):
        d = np.zeros(1 << r, dtype=np.float64)
        d[0] = 1.0
        return d

    def array(self, values: Sequence) -> np.ndarray:
        return np.array([self.scalar(v) for v in values], dtype=np.float64)

    def extend_double(self, dist):
        return np.concatenate([dist, np.zeros_like(dist)])

    def kron(self, a, b):
        return np.kron(a, b)

    def scatter(self, dist, idx):
        out = np.empty_like(dist)
        out[idx] = dist
        return out

    def all_zero(self, dist) -> bool:
        return not np.any(dist)


class _ObjectBackend:
    """Shared numpy-object-array plumbing for exact scalar types."""

    def delta(self, r: int):
        d = np.full(1 << r, self.zero, dtype=object)
        d[0] = self.one
        return d

    def array(self, values: Sequence) -> np.ndarray:
        return np.array([self.scalar(v) for v in values], dtype=object)

    def extend_double(self, dist):
        zeros = np.full(len(dist), self.zero, dtype=object)
        return np.concatenate([dist, zeros])

    def kron(self, a, b):
        return np.kron(a, b)

    def scatter(self, dist, idx):
        out = np.empty_like(dist)
        out[idx] = dist
        return out

    def all_zero(self, dist) -> bool:
        return all(self.is_zero(v) for v in dist)


class RationalBackend(_ObjectBackend):
    """Exact Fraction arithmetic; the reference backend for oracle comparisons."""

    name = "rational"

    one = Fraction(1)
    zero = Fraction(0)

    def scalar(self, x) -> Fraction:
        return Fraction(x)

    def as_float(self, s) -> float:
        return float(s)

    def is_zero(self, s) -> bool:
        return s == 0


class BigFloatBackend(_ObjectBackend):
    """mpmath arbitrary-precision floats.

    mpmath precision is process-global; creating this backend pins it.
    """

    name = "bigfloat"

    def __init__(self, digits: int = 48):
        self.digits = digits
        mpmath.mp.dps = digits
        self.one = mpmath.mpf(1)
        self.zero = mpmath.mpf(0)

    def scalar(self, x):
        if isinstance(x, Fraction):
            return mpmath.mpf(x.numerator) / mpmath.mpf(x.denominator)
        if isinstance(x, str):
            return mpmath.mpf(x)
        return mpmath.mpf(x)

    def as_float(self, s) -> float:
        return float(s)

    def is_zero(self, s) -> bool:
        return s == 0


@dataclass(frozen=True)
class Poly:
    """Truncated power series in one error parameter with a remainder bound.

    Coefficients are exact series coefficients up to the cap for the positive
    operations used in likelihood propagation; discarded higher-order terms
    accumulate into `rem`, evaluated at the configured upper bound on the
    parameter, so that value(e) <= poly(e) + rem for 0 <= e <= emax.
    """

    coeffs: tuple
    rem: float
    cap: int
    emax: float

    def __post_init__(self):
        if len(self.coeffs) != self.cap + 1:
            raise ValueError("coefficient list must have cap+1 entries")

    def _check(self, other: "Poly"):
        if self.cap != other.cap or self.emax != other.emax:
            raise ValueError("mismatched polynomial configurations")

    def __add__(self, other: "Poly") -> "Poly":
        self._check(other)
        c = tuple(a + b for a, b in zip(self.coeffs, other.coeffs))
        return Poly(c, self.rem + other.rem, self.cap, self.emax)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return Poly(
                tuple(c * other for c in self.coeffs),
                self.rem * other,
                self.cap,
                self.emax,
            )
        if not isinstance(other, Poly):
            return NotImplemented
        self._check(other)
        cap = self.cap
        c = [0.0] * (cap + 1)
        overflow = 0.0
        for i, a in enumerate(self.coeffs):
            if a == 0.0:
                continue
            for j, b in enumerate(other.coeffs):
                if b == 0.0:
                    continue
                if i + j <= cap:
                    c[i + j] += a * b
                else:
                    overflow += a * b * self.emax ** (i + j)
        rem = (
            overflow
            + self.eval(self.emax) * other.rem
            + other.eval(other.emax) * self.rem
            + self.rem * other.rem
        )
        return Poly(tuple(c), rem, cap, self.emax)

    __rmul__ = __mul__

    def __truediv__(self, other: "Poly") -> "Poly":
        """Truncated power-series quotient with an interval-style remainder."""
        self._check(other)
        d0 = other.coeffs[0]
        if d0 == 0.0:
            raise ZeroDivisionError("division by polynomial with zero constant term")
        cap = self.cap
        q = [0.0] * (cap + 1)
        for k in range(cap + 1):
            acc = self.coeffs[k]
            for j in range(1, k + 1):
                acc -= other.coeffs[j] * q[k - j]
            q[k] = acc / d0
        # Conservative slack: tail of the inverse series plus remainder carry.
        u = (other.eval(other.emax) - d0) / d0
        if u < 1.0:
            inv_tail = (u ** (cap + 1)) / (d0 * (1.0 - u))
        else:
            inv_tail = float("inf")
        num_hi = self.eval(self.emax) + self.rem
        rem = num_hi * (inv_tail + other.rem / (d0 * d0)) + self.rem / d0
        return Poly(tuple(q), rem, cap, self.emax)

    def eval(self, e: float) -> float:
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * e + c
        return acc

    def upper(self) -> float:
        return self.eval(self.emax) + self.rem

    def min_degree(self):
        """Index of the first nonzero coefficient, or None if all are zero."""
        for i, c in enumerate(self.coeffs):
            if c != 0.0:
                return i
        return None

    def is_exact_zero(self) -> bool:
        return self.rem == 0.0 and all(c == 0.0 for c in self.coeffs)

    def __eq__(self, other):
        if isinstance(other, (int, float)):
            return self.rem == 0.0 and self.coeffs[0] == other and all(
                c == 0.0 for c in self.coeffs[1:]
            )
        return (
            self.coeffs == other.coeffs
            and self.rem == other.rem
            and self.cap == other.cap
            and self.emax == other.emax
        )


class PolyDist:
    """Distribution of Poly scalars stored as dense coefficient arrays."""

    def __init__(self, coeffs: np.ndarray, rem: np.ndarray, cap: int, emax: float):
        self.coeffs = coeffs  # shape (N, cap + 1)
        self.rem = rem  # shape (N,)
        self.cap = cap
        self.emax = emax

    def __len__(self) -> int:
        return self.coeffs.shape[0]

    def copy(self) -> "PolyDist":
        return PolyDist(self.coeffs.copy(), self.rem.copy(), self.cap, self.emax)

    def __getitem__(self, idx):
        if isinstance(idx, (int, np.integer)):
            return Poly(tuple(self.coeffs[idx]), float(self.rem[idx]), self.cap, self.emax)
        return PolyDist(self.coeffs[idx], self.rem[idx], self.cap, self.emax)

    def __setitem__(self, idx, value: "PolyDist"):
        self.coeffs[idx] = value.coeffs
        self.rem[idx] = value.rem

    def __add__(self, other: "PolyDist") -> "PolyDist":
        return PolyDist(
            self.coeffs + other.coeffs, self.rem + other.rem, self.cap, self.emax
        )

    def __mul__(self, scalar):
        if isinstance(scalar, (int, float)):
            return PolyDist(self.coeffs * scalar, self.rem * scalar, self.cap, self.emax)
        out_c = np.zeros_like(self.coeffs)
        out_r = np.zeros_like(self.rem)
        values = self._eval_all(self.emax)
        for j, b in enumerate(scalar.coeffs):
            if b == 0.0:
                continue
            keep = self.cap + 1 - j
            out_c[:, j:] += b * self.coeffs[:, :keep]
            if keep < self.cap + 1:
                # overflow of degrees > cap, evaluated at emax
                degs = np.arange(keep, self.cap + 1)
                out_r += b * (self.coeffs[:, keep:] * self.emax ** (degs + j)).sum(axis=1)
        out_r += scalar.rem * (values + self.rem) + scalar.eval(self.emax) * self.rem
        return PolyDist(out_c, out_r, self.cap, self.emax)

    __rmul__ = __mul__

    def __truediv__(self, scalar: Poly) -> "PolyDist":
        out_c = np.empty_like(self.coeffs)
        out_r = np.empty_like(self.rem)
        for i in range(len(self)):
            q = self[i] / scalar
            out_c[i] = q.coeffs
            out_r[i] = q.rem
        return PolyDist(out_c, out_r, self.cap, self.emax)

    def sum(self) -> Poly:
        return Poly(
            tuple(self.coeffs.sum(axis=0)), float(self.rem.sum()), self.cap, self.emax
        )

    def _eval_all(self, e: float) -> np.ndarray:
        powers = e ** np.arange(self.cap + 1)
        return self.coeffs @ powers

    def min_degrees(self) -> list:
        out = []
        for i in range(len(self)):
            nz = np.nonzero(self.coeffs[i])[0]
            out.append(int(nz[0]) if len(nz) else None)
        return out


class PolyBackend:
    name = "polynomial"

    def __init__(self, degree_cap: int = 4, e_max: float = 1.0 / 400):
        self.cap = degree_cap
        self.emax = e_max
        zeros = (0.0,) * (degree_cap + 1)
        self.zero = Poly(zeros, 0.0, degree_cap, e_max)
        self.one = Poly((1.0,) + zeros[1:], 0.0, degree_cap, e_max)

    def monomial(self, coeff: float = 1.0, degree: int = 1) -> Poly:
        c = [0.0] * (self.cap + 1)
        c[degree] = coeff
        return Poly(tuple(c), 0.0, self.cap, self.emax)

    def scalar(self, x) -> Poly:
        if isinstance(x, Poly):
            if x.cap != self.cap or x.emax != self.emax:
                raise ValueError("polynomial scalar from a different configuration")
            return x
        c = [0.0] * (self.cap + 1)
        c[0] = float(x)
        return Poly(tuple(c), 0.0, self.cap, self.emax)

    def as_float(self, s: Poly) -> float:
        return s.eval(s.emax)

    def is_zero(self, s: Poly) -> bool:
        return s.is_exact_zero()

    def delta(self, r: int) -> PolyDist:
        n = 1 << r
        coeffs = np.zeros((n, self.cap + 1))
        coeffs[0, 0] = 1.0
        return PolyDist(coeffs, np.zeros(n), self.cap, self.emax)

    def array(self, values: Sequence) -> PolyDist:
        scalars = [self.scalar(v) for v in values]
        coeffs = np.array([s.coeffs for s in scalars])
        rem = np.array([s.rem for s in scalars])
        return PolyDist(coeffs, rem, self.cap, self.emax)

    def extend_double(self, dist: PolyDist) -> PolyDist:
        n = len(dist)
        coeffs = np.zeros((2 * n, self.cap + 1))
        coeffs[:n] = dist.coeffs
        rem = np.zeros(2 * n)
        rem[:n] = dist.rem
        return PolyDist(coeffs, rem, self.cap, self.emax)

    def kron(self, a: PolyDist, b: PolyDist) -> PolyDist:
        na, nb = len(a), len(b)
        cap = self.cap
        coeffs = np.zeros((na * nb, cap + 1))
        rem = np.zeros(na * nb)
        a_val = a._eval_all(self.emax)
        b_val = b._eval_all(self.emax)
        for i in range(cap + 1):
            ai = a.coeffs[:, i]
            if not np.any(ai):
                continue
            for j in range(cap + 1 - i):
                bj = b.coeffs[:, j]
                if not np.any(bj):
                    continue
                coeffs[:, i + j] += np.outer(ai, bj).ravel()
            for j in range(cap + 1 - i, cap + 1):
                bj = b.coeffs[:, j]
                if not np.any(bj):
                    continue
                rem += np.outer(ai * self.emax**i, bj * self.emax**j).ravel()
        rem += (
            np.outer(a.rem, b_val).ravel()
            + np.outer(a_val, b.rem).ravel()
            + np.outer(a.rem, b.rem).ravel()
        )
        return PolyDist(coeffs, rem, cap, self.emax)

    def scatter(self, dist: PolyDist, idx) -> PolyDist:
        coeffs = np.empty_like(dist.coeffs)
        rem = np.empty_like(dist.rem)
        coeffs[idx] = dist.coeffs
        rem[idx] = dist.rem
        return PolyDist(coeffs, rem, self.cap, self.emax)

    def all_zero(self, dist: PolyDist) -> bool:
        return not np.any(dist.coeffs) and not np.any(dist.rem)


def backend_from_spec(spec: str):
    """Parse backend descriptors: double, rational, bigfloat[:digits],
    polynomial[:cap[:emax]]."""
    parts = spec.split(":")
    kind = parts[0]
    if kind == "double":
        return DoubleBackend()
    if kind == "rational":
        return RationalBackend()
    if kind == "bigfloat":
        digits = int(parts[1]) if len(parts) > 1 else 48
        return BigFloatBackend(digits)
    if kind in ("polynomial", "poly"):
        cap = int(parts[1]) if len(parts) > 1 else 4
        emax = float(parts[2]) if len(parts) > 2 else 1.0 / 400
        return PolyBackend(cap, emax)
    raise ValueError(f"unknown backend spec {spec!r}")
