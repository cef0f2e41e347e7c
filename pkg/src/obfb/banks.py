"""Example analysis banks: modulated complex lapped transforms and file loading."""

from fractions import Fraction

import numpy as np

from .filterbank import AnalysisBank, BankFormatError, read_bank


def sine_window(L: int) -> np.ndarray:
    n = np.arange(1, L + 1)
    return np.sin(n * np.pi / (L + 1))


def kaiser_lowpass_window(L: int, beta: float = 8.0) -> np.ndarray:
    """Zero-phase windowed-sinc low-pass, cutoff 2 pi / L rad/sample, unit peak.

    Symmetric about (L + 1) / 2 in the 1-based index n = 1..L.
    """
    t = np.arange(1, L + 1) - (L + 1) / 2
    wc = 2 * np.pi / L
    h = (wc / np.pi) * np.sinc(wc * t / np.pi) * np.kaiser(L, beta)
    return h / np.max(np.abs(h))


def mclt_modulation(M: int, N: int, k: int) -> np.ndarray:
    """(M, kN) modulation ``E(i, n)`` for n = 1..kN."""
    i = np.arange(M)[:, None]
    n = np.arange(1, k * N + 1)[None, :]
    phase = (i - M / 2 + 0.5) * (n - k * N / 2 + 0.5) * 2 * np.pi / M
    return np.exp(-1j * phase) / np.sqrt(M)


def mclt(N: int, k: int, k_prime, window="sine", beta: float = 8.0) -> AnalysisBank:
    """MCLT analysis bank ``h_i(n) = E(i, n) h_a(n)`` with M = k' N channels.

    ``window`` is ``"sine"``, ``"kaiser"`` or an array of kN real coefficients.
    """
    Mf = Fraction(k_prime).limit_denominator(10_000) * N
    if Mf.denominator != 1:
        raise ValueError(f"M = k' N = {float(Mf)} is not an integer")
    M = int(Mf)
    L = k * N
    if isinstance(window, str):
        if window == "sine":
            w = sine_window(L)
        elif window == "kaiser":
            w = kaiser_lowpass_window(L, beta)
        else:
            raise ValueError(f"unknown window {window!r}")
    else:
        w = np.asarray(window, dtype=float)
        if w.shape != (L,):
            raise ValueError(f"custom window must have {L} coefficients")
    return AnalysisBank(M, N, k, mclt_modulation(M, N, k) * w[None, :])


def load_bank(path) -> AnalysisBank:
    bank = read_bank(path)
    if not isinstance(bank, AnalysisBank):
        raise BankFormatError(f"{path}: expected an analysis bank")
    return bank
