"""Analysis/synthesis filter banks in polyphase form.

Conventions
-----------
Analysis polyphase blocks: ``H(l)[i, j] = h_i(N l + j)`` for ``l = 0..k-1``,
so that ``y(n) = sum_l H(l) x(n - l)`` with ``x(n)_j = x(N n - j)``.

Synthesis blocks: ``Ht(l)[i, j] = ht_j(N l - i)`` for ``l = -p1..p2``.  The
impulse response of synthesis channel j lives on
``m = -p1 N - N + 1, ..., p2 N`` and is stored time-ascending from that origin.
Because the synthesis side is allowed to be non-causal, a perfect
reconstruction pair reproduces the input with no delay.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .laurent import LaurentMatrix


class BankFormatError(ValueError):
    pass


@dataclass
class AnalysisBank:
    M: int
    N: int
    k: int
    impulses: np.ndarray  # (M, kN) complex

    def __post_init__(self):
        self.impulses = np.asarray(self.impulses, dtype=complex)
        if self.M <= self.N:
            raise ValueError(f"oversampled bank needs M > N, got M={self.M}, N={self.N}")
        if self.k < 1:
            raise ValueError("overlap factor k must be >= 1")
        if self.impulses.shape != (self.M, self.k * self.N):
            raise ValueError(
                f"impulses must have shape {(self.M, self.k * self.N)}, got {self.impulses.shape}")

    @property
    def redundancy(self) -> float:
        return self.M / self.N


@dataclass
class SynthesisBank:
    N: int
    M: int
    p1: int
    p2: int
    blocks: np.ndarray  # (p, N, M) complex; blocks[s] = Ht(s - p1)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.blocks = np.asarray(self.blocks, dtype=complex)
        if self.p1 < 0 or self.p2 < 0:
            raise ValueError("p1 and p2 must be non-negative")
        if self.blocks.shape != (self.p, self.N, self.M):
            raise ValueError(f"blocks must have shape {(self.p, self.N, self.M)}, got {self.blocks.shape}")

    @property
    def p(self) -> int:
        return self.p1 + self.p2 + 1

    @property
    def origin(self) -> int:
        """Time index of the first stored tap of every synthesis filter."""
        return -self.p1 * self.N - self.N + 1

    @property
    def times(self) -> np.ndarray:
        return self.origin + np.arange(self.p * self.N)

    @property
    def impulses(self) -> np.ndarray:
        """(M, pN) impulse responses, time-ascending from :attr:`origin`."""
        # ht_j(N l - i) = Ht(l)[i, j]; the time offset from origin is
        # (N l - i) - origin = N (s + 1) - 1 - i with s = l + p1
        p, N = self.p, self.N
        out = np.empty((self.M, p * N), dtype=complex)
        for s in range(p):
            for i in range(N):
                out[:, N * (s + 1) - 1 - i] = self.blocks[s, i, :]
        return out

    @classmethod
    def from_impulses(cls, impulses, N: int, p1: int, p2: int, metadata=None) -> "SynthesisBank":
        impulses = np.asarray(impulses, dtype=complex)
        M = impulses.shape[0]
        p = p1 + p2 + 1
        if impulses.shape != (M, p * N):
            raise ValueError(f"impulses must have shape {(M, p * N)}, got {impulses.shape}")
        blocks = np.empty((p, N, M), dtype=complex)
        for s in range(p):
            for i in range(N):
                blocks[s, i, :] = impulses[:, N * (s + 1) - 1 - i]
        return cls(N, M, p1, p2, blocks, dict(metadata or {}))

    def polyphase_matrix(self) -> LaurentMatrix:
        return LaurentMatrix.from_blocks(self.blocks, lo=-self.p1)


def to_polyphase(bank: AnalysisBank) -> np.ndarray:
    """Return the (k, M, N) stack of blocks ``H(l)[i, j] = h_i(N l + j)``."""
    return bank.impulses.reshape(bank.M, bank.k, bank.N).transpose(1, 0, 2).copy()


def from_polyphase(pp: np.ndarray) -> AnalysisBank:
    k, M, N = pp.shape
    return AnalysisBank(M, N, k, np.asarray(pp).transpose(1, 0, 2).reshape(M, k * N))


def polyphase_matrix(pp: np.ndarray) -> LaurentMatrix:
    return LaurentMatrix.from_blocks(pp, lo=0)


def analyze(bank: AnalysisBank, x) -> np.ndarray:
    """Subband signals ``y_i(n) = sum_p h_i(p) x(N n - p)`` for n >= 0.

    ``x`` is indexed from time 0 and zero-extended; every nonzero output
    sample is returned, shape ``(M, ceil((len(x) + kN - 1) / N))``.
    """
    x = np.asarray(x, dtype=complex)
    if x.size == 0:
        return np.zeros((bank.M, 0), dtype=complex)
    return np.stack([np.convolve(h, x)[::bank.N] for h in bank.impulses])


def synthesize_full(bank: SynthesisBank, y) -> tuple[np.ndarray, int]:
    """Reconstruction over its whole support; returns ``(signal, first_time)``.

    Implements ``xt(m) = sum_j sum_l ht_j(m - N l) y_j(l)`` with ``y_j``
    indexed from l = 0.
    """
    y = np.asarray(y, dtype=complex)
    if y.ndim != 2 or y.shape[0] != bank.M:
        raise ValueError(f"expected {bank.M} subband sequences")
    N = bank.N
    n_y = y.shape[1]
    if n_y == 0:
        return np.zeros(0, dtype=complex), bank.origin
    g = bank.impulses
    u = np.zeros(N * (n_y - 1) + 1, dtype=complex)
    out = np.zeros(u.size + g.shape[1] - 1, dtype=complex)
    for j in range(bank.M):
        u[::N] = y[j]
        out += np.convolve(g[j], u)
    return out, bank.origin


def synthesize(bank: SynthesisBank, y) -> np.ndarray:
    """Reconstructed samples at times m >= 0 (aligned with the analysis input)."""
    out, first = synthesize_full(bank, y)
    return out[-first:] if first < 0 else np.concatenate([np.zeros(first, complex), out])


def frequency_grid(grid: int) -> np.ndarray:
    """``grid`` uniform points of [-1/2, 1/2)."""
    return -0.5 + np.arange(grid) / grid


def dtft(taps, times, nu) -> np.ndarray:
    """``sum_m taps[m] exp(-2i pi times[m] nu)`` for each frequency in ``nu``."""
    nu = np.asarray(nu, dtype=float)
    return np.exp(-2j * np.pi * np.outer(nu, times)) @ np.asarray(taps, dtype=complex)


def frequency_response(bank: SynthesisBank, j: int, grid: int = 4096) -> np.ndarray:
    if not 0 <= j < bank.M:
        raise IndexError(f"channel {j} out of range")
    return dtft(bank.impulses[j], bank.times, frequency_grid(grid))


def analysis_frequency_response(bank: AnalysisBank, j: int, grid: int = 4096) -> np.ndarray:
    return dtft(bank.impulses[j], np.arange(bank.k * bank.N), frequency_grid(grid))


def pr_product(synth: SynthesisBank, pp: np.ndarray) -> LaurentMatrix:
    """The N x N Laurent matrix ``Ht[z] H[z]``."""
    return synth.polyphase_matrix() @ polyphase_matrix(pp)


def pr_poly_residual(synth: SynthesisBank, pp: np.ndarray) -> float:
    """Largest coefficient of ``Ht[z] H[z] - I_N`` (0 for exact PR).

    Computed as a raw block convolution, without the zero stripping of
    :class:`LaurentMatrix`, so residuals below ``tol_zero`` stay visible.
    """
    pp = np.asarray(pp)
    k, p = pp.shape[0], synth.p
    prod = np.zeros((p + k - 1, synth.N, synth.N), dtype=complex)
    for s in range(p):
        for l in range(k):
            prod[s + l] += synth.blocks[s] @ pp[l]
    # prod[t] is the coefficient of z^-(t - p1)
    prod[synth.p1] -= np.eye(synth.N)
    return float(np.max(np.abs(prod)))


# --- JSON serialization -----------------------------------------------------

def _encode_filters(impulses) -> list:
    return [[[float(c.real), float(c.imag)] for c in row] for row in impulses]


def _decode_filters(filters) -> np.ndarray:
    try:
        arr = np.asarray(filters, dtype=float)
    except (TypeError, ValueError) as exc:
        raise BankFormatError(f"filters are not a rectangular [[re, im], ...] array: {exc}") from exc
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise BankFormatError("filters must be a list of lists of [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def bank_to_dict(bank) -> dict:
    if isinstance(bank, AnalysisBank):
        return {"type": "analysis", "M": bank.M, "N": bank.N, "k": bank.k,
                "filters": _encode_filters(bank.impulses)}
    if isinstance(bank, SynthesisBank):
        d = {"type": "synthesis", "M": bank.M, "N": bank.N, "p1": bank.p1, "p2": bank.p2,
             "filters": _encode_filters(bank.impulses)}
        if bank.metadata:
            d["metadata"] = bank.metadata
        return d
    raise TypeError(f"not a filter bank: {type(bank).__name__}")


def bank_from_dict(d: dict):
    if not isinstance(d, dict):
        raise BankFormatError("bank document must be a JSON object")
    kind = d.get("type")
    try:
        M, N = int(d["M"]), int(d["N"])
        filters = _decode_filters(d["filters"])
        if filters.shape[0] != M:
            raise BankFormatError(f"expected {M} filters, found {filters.shape[0]}")
        if kind == "analysis":
            k = int(d["k"])
            if filters.shape[1] != k * N:
                raise BankFormatError(f"filter length {filters.shape[1]} != kN = {k * N}")
            return AnalysisBank(M, N, k, filters)
        if kind == "synthesis":
            p1, p2 = int(d["p1"]), int(d["p2"])
            if filters.shape[1] != (p1 + p2 + 1) * N:
                raise BankFormatError(f"filter length {filters.shape[1]} != pN")
            return SynthesisBank.from_impulses(filters, N, p1, p2, d.get("metadata"))
    except KeyError as exc:
        raise BankFormatError(f"missing field {exc}") from exc
    except ValueError as exc:
        if isinstance(exc, BankFormatError):
            raise
        raise BankFormatError(str(exc)) from exc
    raise BankFormatError(f"unknown bank type {kind!r}")


def save_bank(bank, path) -> None:
    Path(path).write_text(json.dumps(bank_to_dict(bank), indent=1))


def read_bank(path):
    try:
        d = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise BankFormatError(f"{path}: invalid JSON ({exc})") from exc
    return bank_from_dict(d)
