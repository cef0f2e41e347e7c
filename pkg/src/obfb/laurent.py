"""Laurent polynomials and Laurent polynomial matrices over the complex field.

A Laurent polynomial is stored as ``(lo, coeffs)`` and represents

    p(z) = sum_t coeffs[t] * z**(-(lo + t))

so ``lo`` is the lowest power of ``z**-1`` present.  Monomials are units of
the ring C[z, z^-1]; they carry no roots.
"""

from dataclasses import dataclass
from itertools import permutations

import numpy as np

from .config import default_tolerances


class InterpolationError(RuntimeError):
    """Raised when evaluation-interpolation cannot recover a determinant."""


@dataclass(frozen=True, eq=False)
class LaurentPoly:
    lo: int
    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", np.atleast_1d(np.asarray(self.coeffs, dtype=complex)))
        object.__setattr__(self, "lo", int(self.lo))

    @classmethod
    def zero(cls) -> "LaurentPoly":
        return cls(0, np.zeros(0, dtype=complex))

    @classmethod
    def monomial(cls, power: int, value=1.0) -> "LaurentPoly":
        """``value * z**(-power)``."""
        return cls(power, [value])

    @classmethod
    def constant(cls, value) -> "LaurentPoly":
        return normalize(cls(0, [value]))

    @property
    def hi(self) -> int:
        """Highest power of z^-1 (``lo - 1`` for the zero polynomial)."""
        return self.lo + len(self.coeffs) - 1

    @property
    def width(self) -> int:
        return len(self.coeffs)

    def is_zero(self) -> bool:
        return len(self.coeffs) == 0

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        if self.is_zero():
            return np.zeros_like(z)
        w = 1.0 / z
        # Horner in w = z^-1 on the shifted polynomial, then restore z^-lo
        acc = np.zeros_like(z)
        for c in self.coeffs[::-1]:
            acc = acc * w + c
        return acc * w**self.lo

    def __add__(self, other):
        other = _as_poly(other)
        if self.is_zero():
            return normalize(other)
        if other.is_zero():
            return normalize(self)
        lo = min(self.lo, other.lo)
        hi = max(self.hi, other.hi)
        out = np.zeros(hi - lo + 1, dtype=complex)
        out[self.lo - lo:self.hi - lo + 1] += self.coeffs
        out[other.lo - lo:other.hi - lo + 1] += other.coeffs
        return normalize(LaurentPoly(lo, out))

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly(self.lo, -self.coeffs)

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        return mul(self, _as_poly(other))

    __rmul__ = __mul__

    def allclose(self, other, atol=1e-12) -> bool:
        diff = self - _as_poly(other)
        return diff.is_zero() or bool(np.max(np.abs(diff.coeffs)) <= atol)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.coeffs))) if self.width else 0.0

    def __repr__(self):
        return f"LaurentPoly(lo={self.lo}, coeffs={np.array2string(self.coeffs, precision=4)})"


def _as_poly(x) -> LaurentPoly:
    if isinstance(x, LaurentPoly):
        return x
    return LaurentPoly(0, [x])


def normalize(p: LaurentPoly, tol: float | None = None) -> LaurentPoly:
    """Strip leading/trailing coefficients with modulus <= ``tol``."""
    if tol is None:
        tol = default_tolerances().zero
    c = p.coeffs
    keep = np.flatnonzero(np.abs(c) > tol)
    if keep.size == 0:
        return LaurentPoly.zero()
    first, last = keep[0], keep[-1]
    return LaurentPoly(p.lo + first, c[first:last + 1].copy())


def mul(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    if a.is_zero() or b.is_zero():
        return LaurentPoly.zero()
    return normalize(LaurentPoly(a.lo + b.lo, np.convolve(a.coeffs, b.coeffs)))


def roots(p: LaurentPoly, tol: float | None = None) -> np.ndarray:
    """Nonzero roots of ``p``, from the eigenvalues of a companion matrix.

    Multiplying by ``z**(lo + width - 1)`` turns ``p`` into an ordinary
    polynomial in z whose leading coefficient is ``coeffs[0]`` and whose
    constant term is ``coeffs[-1]``; tight support means z = 0 is never a root.
    """
    p = normalize(p, tol)
    if p.is_zero():
        raise ValueError("roots of the zero polynomial are undefined")
    c = p.coeffs
    deg = len(c) - 1
    if deg == 0:
        return np.zeros(0, dtype=complex)
    comp = np.zeros((deg, deg), dtype=complex)
    comp[0, :] = -c[1:] / c[0]
    comp[np.arange(1, deg), np.arange(deg - 1)] = 1.0
    return np.linalg.eigvals(comp)


def same_root(r1: complex, r2: complex, tol: float | None = None) -> bool:
    if tol is None:
        tol = default_tolerances().root_match
    return abs(r1 - r2) <= tol * max(1.0, abs(r1))


def relative_residual(p: LaurentPoly, z) -> np.ndarray:
    """``|p(z)| / sum_t |c_t| |z|^-(lo+t)``: backward-error style root test."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    powers = -(p.lo + np.arange(p.width))
    mag = np.abs(z)[:, None] ** powers[None, :]
    scale = mag @ np.abs(p.coeffs)
    val = np.abs(p(z))
    return np.where(scale > 0, val / np.where(scale > 0, scale, 1.0), 0.0)


@dataclass(frozen=True, eq=False)
class LaurentMatrix:
    entries: tuple

    def __post_init__(self):
        rows = tuple(tuple(_as_poly(e) for e in row) for row in self.entries)
        if len({len(r) for r in rows}) > 1:
            raise ValueError("ragged LaurentMatrix")
        object.__setattr__(self, "entries", rows)

    @classmethod
    def from_blocks(cls, blocks, lo: int = 0, tol: float | None = None) -> "LaurentMatrix":
        """Matrix ``sum_l blocks[l] z**-(lo + l)`` from an (L, rows, cols) array."""
        blocks = np.asarray(blocks, dtype=complex)
        _, r, c = blocks.shape
        return cls(tuple(
            tuple(normalize(LaurentPoly(lo, blocks[:, i, j]), tol) for j in range(c))
            for i in range(r)))

    @classmethod
    def identity(cls, n: int) -> "LaurentMatrix":
        return cls(tuple(tuple(LaurentPoly.constant(1.0 if i == j else 0.0) for j in range(n))
                         for i in range(n)))

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0]) if self.entries else 0

    @property
    def shape(self):
        return self.rows, self.cols

    def __getitem__(self, idx):
        i, j = idx
        return self.entries[i][j]

    def submatrix(self, rows, cols=None) -> "LaurentMatrix":
        cols = range(self.cols) if cols is None else cols
        return LaurentMatrix(tuple(tuple(self.entries[i][j] for j in cols) for i in rows))

    def evaluate(self, z) -> np.ndarray:
        """Values at the points ``z``; returns shape ``z.shape + (rows, cols)``."""
        z = np.asarray(z, dtype=complex)
        out = np.empty(z.shape + self.shape, dtype=complex)
        for i, row in enumerate(self.entries):
            for j, e in enumerate(row):
                out[..., i, j] = e(z)
        return out

    def support(self):
        """(lowest, highest) power of z^-1 over the nonzero entries."""
        los = [e.lo for row in self.entries for e in row if not e.is_zero()]
        his = [e.hi for row in self.entries for e in row if not e.is_zero()]
        if not los:
            return 0, -1
        return min(los), max(his)

    def to_blocks(self):
        """Inverse of :meth:`from_blocks`: returns ``(lo, blocks)``."""
        lo, hi = self.support()
        blocks = np.zeros((max(hi - lo + 1, 1), self.rows, self.cols), dtype=complex)
        for i, row in enumerate(self.entries):
            for j, e in enumerate(row):
                if not e.is_zero():
                    blocks[e.lo - lo:e.hi - lo + 1, i, j] = e.coeffs
        return lo, blocks

    def __matmul__(self, other: "LaurentMatrix") -> "LaurentMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = LaurentPoly.zero()
                for t in range(self.cols):
                    a, b = self.entries[i][t], other.entries[t][j]
                    if not (a.is_zero() or b.is_zero()):
                        acc = acc + mul(a, b)
                row.append(acc)
            out.append(tuple(row))
        return LaurentMatrix(tuple(out))

    def __sub__(self, other: "LaurentMatrix") -> "LaurentMatrix":
        return LaurentMatrix(tuple(
            tuple(a - b for a, b in zip(ra, rb)) for ra, rb in zip(self.entries, other.entries)))

    def max_abs(self) -> float:
        return max((e.max_abs() for row in self.entries for e in row), default=0.0)


def _cofactor_det(m: LaurentMatrix) -> LaurentPoly:
    n = m.rows
    if n == 1:
        return m[0, 0]
    if n == 2:
        return m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    acc = LaurentPoly.zero()
    for j in range(n):
        e = m[0, j]
        if e.is_zero():
            continue
        minor = m.submatrix(range(1, n), [c for c in range(n) if c != j])
        term = e * _cofactor_det(minor)
        acc = acc + term if j % 2 == 0 else acc - term
    return acc


def _leibniz_det(m: LaurentMatrix) -> LaurentPoly:
    # permutation sum; only used as a test oracle for tiny sizes
    n = m.rows
    acc = LaurentPoly.zero()
    for perm in permutations(range(n)):
        inv = sum(1 for a in range(n) for b in range(a + 1, n) if perm[a] > perm[b])
        term = LaurentPoly.constant(1.0)
        for i, j in enumerate(perm):
            term = term * m[i, j]
        acc = acc + term if inv % 2 == 0 else acc - term
    return acc


def row_bounds(m: LaurentMatrix):
    """Per-row (min lo, max hi, l1 mass) used to bound determinant support."""
    bounds = []
    for row in m.entries:
        nz = [e for e in row if not e.is_zero()]
        if not nz:
            bounds.append(None)
        else:
            bounds.append((min(e.lo for e in nz), max(e.hi for e in nz),
                           sum(float(np.abs(e.coeffs).sum()) for e in nz)))
    return bounds


def interpolate_det(values: np.ndarray, lo: int, scale: float, tol_zero: float) -> LaurentPoly:
    """Recover a determinant from its values at the D-th roots of unity.

    ``values[t]`` is the determinant at ``z_t = exp(2i*pi*t/D)``.  Because
    ``z_t**lo * det(z_t)`` is the DFT of the coefficient vector, an inverse FFT
    recovers the coefficients; the sampling matrix is unitary, so this never
    degenerates.  Coefficients below ``tol_zero * scale`` are stripped, where
    ``scale`` bounds ``|det|`` on the unit circle.
    """
    D = values.shape[0]
    z = np.exp(2j * np.pi * np.arange(D) / D)
    c = np.fft.ifft(values * z**lo)
    if not np.all(np.isfinite(c)):
        raise InterpolationError("non-finite interpolated coefficients")
    return normalize(LaurentPoly(lo, c), tol_zero * scale if scale > 0 else tol_zero)


def determinant(m: LaurentMatrix, method: str = "auto", tol: float | None = None) -> LaurentPoly:
    """Exact determinant over C[z, z^-1].

    ``method`` is ``"cofactor"``, ``"interp"`` (evaluation-interpolation on the
    unit circle) or ``"auto"`` (cofactor up to 3x3).
    """
    if m.rows != m.cols:
        raise ValueError("determinant needs a square matrix")
    if tol is None:
        tol = default_tolerances().zero
    if method == "auto":
        method = "cofactor" if m.rows <= 3 else "interp"
    if method == "cofactor":
        return _cofactor_det(m)
    if method != "interp":
        raise ValueError(f"unknown method {method!r}")

    bounds = row_bounds(m)
    if any(b is None for b in bounds):
        return LaurentPoly.zero()
    lo = sum(b[0] for b in bounds)
    hi = sum(b[1] for b in bounds)
    scale = float(np.prod([b[2] for b in bounds]))
    D = hi - lo + 1
    z = np.exp(2j * np.pi * np.arange(D) / D)
    values = np.linalg.det(m.evaluate(z))
    return interpolate_det(values, lo, scale, tol)
