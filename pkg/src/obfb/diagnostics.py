"""Quality metrics: time/frequency dispersion, reconstruction residuals, tables."""

import csv
from dataclasses import dataclass

import numpy as np

from .filterbank import AnalysisBank, SynthesisBank, analyze, dtft, synthesize


class DegenerateFilterError(ValueError):
    pass


@dataclass
class Dispersion:
    centroid: float
    dispersion: float


def _taps_times(bank, j: int):
    if not 0 <= j < bank.M:
        raise IndexError(f"channel {j} out of range")
    if isinstance(bank, SynthesisBank):
        return bank.impulses[j], bank.times
    if isinstance(bank, AnalysisBank):
        return bank.impulses[j], np.arange(bank.k * bank.N)
    raise TypeError(f"not a filter bank: {type(bank).__name__}")


def time_dispersion(bank, j: int) -> Dispersion:
    """Centroid ``sum m |h(m)|^2 / sum |h(m)|^2`` and the second moment around it."""
    taps, times = _taps_times(bank, j)
    w = np.abs(taps) ** 2
    total = w.sum()
    if total == 0:
        raise DegenerateFilterError(f"channel {j} is identically zero")
    c = float(np.sum(w * times) / total)
    return Dispersion(c, float(np.sum(w * (times - c) ** 2) / total))


def freq_centroid(taps, times, grid: int = 8192) -> float:
    """Circular centroid of ``|h[nu]|^2``, folded into [-1/2, 1/2)."""
    nu = -0.5 + np.arange(grid) / grid
    power = np.abs(dtft(taps, times, nu)) ** 2
    if power.sum() == 0:
        raise DegenerateFilterError("filter is identically zero")
    ang = np.angle(np.sum(power * np.exp(2j * np.pi * nu)))
    return float((ang / (2 * np.pi) + 0.5) % 1.0 - 0.5)


def freq_dispersion(bank, j: int, grid: int = 8192, center: float | None = None,
                    alpha: float = 2.0) -> Dispersion:
    """``int |nu - f|^alpha |h[nu]|^2 / int |h[nu]|^2`` over ``[f - 1/2, f + 1/2]``.

    Trapezoidal rule on ``grid`` intervals.  ``f`` defaults to the circular
    centroid of the channel's power spectrum.
    """
    taps, times = _taps_times(bank, j)
    f = freq_centroid(taps, times, grid) if center is None else float(center)
    nu = f - 0.5 + np.arange(grid + 1) / grid
    power = np.abs(dtft(taps, times, nu)) ** 2
    den = np.trapezoid(power, nu)
    if den == 0:
        raise DegenerateFilterError(f"channel {j} is identically zero")
    return Dispersion(f, float(np.trapezoid(np.abs(nu - f) ** alpha * power, nu) / den))


def reconstruct(analysis: AnalysisBank, synthesis: SynthesisBank, x) -> np.ndarray:
    """``synthesize(analyze(x))`` cut to the length of x."""
    x = np.asarray(x)
    return synthesize(synthesis, analyze(analysis, x))[:x.size]


def signal_residual(analysis: AnalysisBank, synthesis: SynthesisBank, x, trim: int | None = None,
                    relative: bool = True) -> float:
    """Interior reconstruction error of one signal, ``max |xhat - x|``.

    With ``relative`` the error is divided by ``max |x|`` over the same
    samples, which makes it invariant to the input scale.
    """
    _compatible(analysis, synthesis)
    x = np.asarray(x)
    trim = (analysis.k + synthesis.p) * analysis.N if trim is None else trim
    if x.size <= 2 * trim:
        raise ValueError(f"signal of length {x.size} has no interior after trimming {trim} samples")
    inner = slice(trim, x.size - trim)
    err = float(np.max(np.abs(reconstruct(analysis, synthesis, x)[inner] - x[inner])))
    if not relative:
        return err
    scale = float(np.max(np.abs(x[inner])))
    return err / scale if scale > 0 else err


def pr_residual(analysis: AnalysisBank, synthesis: SynthesisBank, trials: int = 10,
                length: int = 1024, seed: int = 0, real: bool = False,
                trim: int | None = None) -> float:
    """Worst absolute interior reconstruction error over seeded random signals.

    Inputs are standard normal (complex unless ``real``); ``trim`` boundary
    samples are ignored at each end, (k + p) N by default.
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        x = rng.standard_normal(length)
        if not real:
            x = x + 1j * rng.standard_normal(length)
        worst = max(worst, signal_residual(analysis, synthesis, x, trim, relative=False))
    return worst


def max_imag_output(analysis: AnalysisBank, synthesis: SynthesisBank, trials: int = 10,
                    length: int = 1024, seed: int = 0) -> float:
    """Largest imaginary part of the reconstruction of real random signals."""
    rng = np.random.default_rng(seed)
    return max(float(np.max(np.abs(reconstruct(analysis, synthesis, rng.standard_normal(length)).imag)))
               for _ in range(trials))


def _compatible(analysis: AnalysisBank, synthesis: SynthesisBank) -> None:
    if (analysis.M, analysis.N) != (synthesis.M, synthesis.N):
        raise ValueError(f"analysis (M={analysis.M}, N={analysis.N}) and synthesis "
                         f"(M={synthesis.M}, N={synthesis.N}) do not match")


def dispersion_table(bank, grid: int = 8192, centers=None) -> list[dict]:
    rows = []
    for j in range(bank.M):
        t = time_dispersion(bank, j)
        f = freq_dispersion(bank, j, grid, None if centers is None else centers[j])
        rows.append({"channel": j, "time_centroid": t.centroid, "time_dispersion": t.dispersion,
                     "freq_centroid": f.centroid, "freq_dispersion": f.dispersion})
    return rows


TABLE_COLUMNS = ["channel", "time_centroid", "time_dispersion", "freq_centroid", "freq_dispersion"]


def write_dispersion_csv(rows, path, header: str | None = None) -> None:
    with open(path, "w", newline="") as fh:
        if header:
            fh.write(f"# {header}\n")
        w = csv.DictWriter(fh, fieldnames=TABLE_COLUMNS)
        w.writeheader()
        for r in rows:
            w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()})


def summary(rows) -> dict:
    td = np.array([r["time_dispersion"] for r in rows])
    fd = np.array([r["freq_dispersion"] for r in rows])
    return {"mean_time_dispersion": float(td.mean()), "mean_freq_dispersion": float(fd.mean()),
            "time_spread": float(td.max() - td.min()), "freq_spread": float(fd.max() - fd.min())}
