"""Kernel semi-norms and the time/frequency localization costs.

A channel's taps form a (p, N) matrix ``T[s, i] = ht_j(N (s - p1) - i)``;
flattened row-major this is the vector ``a[i + s N]``, the ordering of the
flattened kernel matrix ``K'[i + s N, i' + s' N] = K(i, i', s, s')``.  The
semi-norm is ``||A||_K^2 = sum_{u,v} a_u conj(a_v) K'[u, v]``.

Each cost is ``J(C) = sum_j ||T_j||^2_{K_j} / ||T_j||^2_F`` with
``T_j = V_j C + Ht0_j``.  Gradients follow the convention
``dJ/dRe(C) + i dJ/dIm(C)`` (general case) or ``dJ/dC`` (HS case, C real).
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .config import default_tolerances
from .filterbank import AnalysisBank, analysis_frequency_response, frequency_grid
from .paramspace import ParamSpace


class KernelError(ValueError):
    pass


class DegenerateChannelError(ZeroDivisionError):
    pass


@dataclass(frozen=True, eq=False)
class Kernel:
    """Structured kernel over (N, p) tap arrays.

    Exactly one representation is set: ``diag`` (length pN, diagonal kernel),
    ``kappa`` (length 2pN - 1, ``K'[u, v] = kappa[d + pN - 1]`` with
    ``d = m_u - m_v`` and ``m_u = s N - i``) or ``dense`` (pN x pN).
    """

    N: int
    p: int
    diag: np.ndarray | None = None
    kappa: np.ndarray | None = None
    dense: np.ndarray | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def size(self) -> int:
        return self.N * self.p

    def lags(self) -> np.ndarray:
        """``d[u, v] = m_u - m_v`` over the flattened index."""
        m = (np.arange(self.p)[:, None] * self.N - np.arange(self.N)[None, :]).ravel()
        return m[:, None] - m[None, :]

    def matrix(self) -> np.ndarray:
        """Flattened K' (pN x pN)."""
        if "K" not in self._cache:
            if self.dense is not None:
                K = np.asarray(self.dense, dtype=complex)
            elif self.diag is not None:
                K = np.diag(np.asarray(self.diag, dtype=complex))
            else:
                K = np.asarray(self.kappa)[self.lags() + self.size - 1]
            self._cache["K"] = K
        return self._cache["K"]

    def tensor(self) -> np.ndarray:
        """Four-index form K(i, i', s, s'), shape (N, N, p, p)."""
        return self.matrix().reshape(self.p, self.N, self.p, self.N).transpose(1, 3, 0, 2)


def lambda_kernel(N: int, p: int) -> Kernel:
    return Kernel(N, p, diag=np.ones(N * p))


def seminorm_sq(A, K: Kernel, tol: float | None = None) -> float:
    """``sum A[i, l] conj(A[i', l']) K(i, i', l, l')`` for A of shape (N, p)."""
    tol = default_tolerances().kernel_psd if tol is None else tol
    A = np.asarray(A, dtype=complex)
    if A.shape != (K.N, K.p):
        raise ValueError(f"A must have shape {(K.N, K.p)}, got {A.shape}")
    a = A.T.ravel()
    if K.diag is not None:
        val = complex(np.sum(K.diag * np.abs(a) ** 2))
    else:
        val = complex(a @ K.matrix() @ a.conj())
    if abs(val.imag) > 1e-10 * max(abs(val.real), 1.0):
        raise KernelError(f"kernel is not Hermitian: imaginary part {val.imag:.3e}")
    if val.real < -tol:
        raise KernelError(f"kernel is not positive semi-definite: {val.real:.3e}")
    return max(val.real, 0.0)


@dataclass
class CostConfig:
    kind: str = "time"           # "time" | "freq"
    alpha: float = 2.0
    weights: np.ndarray | None = None   # defaults to 1/M each
    centers: np.ndarray | None = None   # time centers (time) or frequencies (freq)

    def __post_init__(self):
        if self.kind not in ("time", "freq"):
            raise ValueError(f"kind must be 'time' or 'freq', got {self.kind!r}")
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if self.weights is not None:
            w = np.asarray(self.weights, dtype=float)
            if np.any(w < 0) or not np.isclose(w.sum(), 1.0):
                raise ValueError("weights must be non-negative and sum to 1")
            self.weights = w

    def weight(self, j: int, M: int) -> float:
        return 1.0 / M if self.weights is None else float(self.weights[j])


def default_time_center(N: int, p1: int, p2: int) -> float:
    """Middle of the synthesis support {-p1 N - N + 1, ..., p2 N}."""
    return (p2 * N + 1 - p1 * N - N) / 2


def analysis_centers(bank: AnalysisBank, grid: int = 4096) -> np.ndarray:
    """Passband center of each analysis filter, in [-1/2, 1/2).

    Circular centroid of ``|h_j[nu]|^2``, so bands that wrap around
    nu = +-1/2 are located correctly.
    """
    nu = frequency_grid(grid)
    out = np.empty(bank.M)
    for j in range(bank.M):
        power = np.abs(analysis_frequency_response(bank, j, grid)) ** 2
        ang = np.angle(np.sum(power * np.exp(2j * np.pi * nu)))
        out[j] = ((ang / (2 * np.pi)) + 0.5) % 1.0 - 0.5
    return out


def kernel_time(cfg: CostConfig, j: int, N: int, p1: int, p2: int, M: int) -> Kernel:
    """Diagonal kernel ``w_j |m - mbar_j|^alpha`` on tap times ``m = l N - i``."""
    p = p1 + p2 + 1
    center = default_time_center(N, p1, p2) if cfg.centers is None else float(cfg.centers[j])
    m = ((np.arange(p)[:, None] - p1) * N - np.arange(N)[None, :]).ravel()
    return Kernel(N, p, diag=cfg.weight(j, M) * np.abs(m - center) ** cfg.alpha)


def freq_kernel_profile(alpha: float, max_lag: int) -> np.ndarray:
    """``int_{-1/2}^{1/2} |nu|^alpha exp(-2i pi d nu) d nu`` for d = 0..max_lag."""
    d = np.arange(max_lag + 1)
    out = np.empty(max_lag + 1)
    if alpha == 2:
        out[0] = 1.0 / 12.0
        out[1:] = (-1.0) ** d[1:] / (2 * np.pi**2 * d[1:] ** 2)
        return out
    out[0] = 2 * 0.5 ** (alpha + 1) / (alpha + 1)
    for t in d[1:]:
        val, _ = integrate.quad(lambda v: v**alpha, 0.0, 0.5, weight="cos", wvar=2 * np.pi * t,
                                epsabs=1e-13, epsrel=1e-12, limit=200)
        out[t] = 2 * val
    return out


def kernel_freq(cfg: CostConfig, j: int, N: int, p1: int, p2: int, M: int,
                centers=None, profile=None) -> Kernel:
    """``w_j int |nu|^alpha exp(-2i pi d (nu + f_j)) d nu`` as a function of the lag d."""
    p = p1 + p2 + 1
    centers = cfg.centers if centers is None else centers
    if centers is None:
        raise ValueError("frequency kernel needs channel centers f_j")
    L = p * N - 1
    prof = freq_kernel_profile(cfg.alpha, L) if profile is None else profile
    d = np.arange(-L, L + 1)
    kappa = cfg.weight(j, M) * prof[np.abs(d)] * np.exp(-2j * np.pi * d * float(centers[j]))
    return Kernel(N, p, kappa=kappa)


def make_kernels(ps: ParamSpace, cfg: CostConfig, analysis: AnalysisBank | None = None) -> list:
    """One kernel per channel; frequency centers default to the analysis passbands."""
    if cfg.kind == "time":
        return [kernel_time(cfg, j, ps.N, ps.p1, ps.p2, ps.M) for j in range(ps.M)]
    centers = cfg.centers
    if centers is None:
        if analysis is None:
            raise ValueError("frequency cost needs centers or the analysis bank")
        centers = analysis_centers(analysis)
    prof = freq_kernel_profile(cfg.alpha, ps.p * ps.N - 1)
    return [kernel_freq(cfg, j, ps.N, ps.p1, ps.p2, ps.M, centers, prof) for j in range(ps.M)]


class Objective:
    """``J(C)`` and its gradient for one parameter space and kernel set."""

    def __init__(self, ps: ParamSpace, kernels):
        if len(kernels) != ps.M:
            raise ValueError(f"need {ps.M} kernels, got {len(kernels)}")
        self.ps = ps
        self.kernels = list(kernels)
        self._V = ps.slices.reshape(ps.M, ps.p, ps.dim)
        if all(K.diag is not None for K in kernels):
            self._diag = np.stack([np.asarray(K.diag, dtype=float) for K in kernels])
            self._dense = None
        else:
            self._diag = None
            # K'^T per channel: (K'^T a)_v = sum_u K'[u, v] a_u
            self._dense = np.stack([K.matrix().T for K in kernels])

    def _flat_taps(self, C) -> np.ndarray:
        return self.ps.taps(C).reshape(self.ps.M, -1)

    def _apply(self, a: np.ndarray) -> np.ndarray:
        if self._diag is not None:
            return self._diag * a
        return np.einsum("juv,jv->ju", self._dense, a)

    def _terms(self, C):
        a = self._flat_taps(C)
        Ka = self._apply(a)
        alpha = np.real(np.sum(Ka * a.conj(), axis=1))
        beta = np.sum(np.abs(a) ** 2, axis=1)
        if np.any(beta < 1e-14):
            bad = np.flatnonzero(beta < 1e-14).tolist()
            raise DegenerateChannelError(f"synthesis channels {bad} vanish")
        return a, Ka, alpha, beta

    def channel_costs(self, C) -> np.ndarray:
        _, _, alpha, beta = self._terms(C)
        return alpha / beta

    def cost(self, C) -> float:
        return float(np.sum(self.channel_costs(C)))

    def value_and_grad(self, C):
        a, Ka, alpha, beta = self._terms(C)
        X = (beta[:, None] * Ka - alpha[:, None] * a) / beta[:, None] ** 2
        X = X.reshape(self.ps.M, self.ps.p, self.ps.N)
        G = 2 * np.einsum("jpd,jpn->dn", self._V.conj(), X)
        if self.ps.hs:
            G = G.real
        return float(np.sum(alpha / beta)), G

    def gradient(self, C) -> np.ndarray:
        return self.value_and_grad(C)[1]


def cost(ps: ParamSpace, C, kernels) -> float:
    return Objective(ps, kernels).cost(C)


def gradient(ps: ParamSpace, C, kernels) -> np.ndarray:
    return Objective(ps, kernels).gradient(C)
