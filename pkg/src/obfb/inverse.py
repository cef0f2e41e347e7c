"""Minimal-order FIR synthesis banks via the block-convolution PR system.

For a candidate support ``l = -p1..p2`` of the synthesis blocks, perfect
reconstruction ``sum_s Ht(s) H(l - s) = delta_l I_N`` is the linear system
``Hcal @ Htcal = Ucal`` with

    Hcal[c N + a, s M + b] = H(c - s)[b, a]      (block Toeplitz)
    Htcal[s M + j, i]      = Ht(s - p1)[i, j]
    Ucal                   = [0_{p1 N}; I_N; 0_{(p2 + k - 1) N}]

The Hermitian-symmetric variant solves a real system of the same size in
the left half of the synthesis channels and mirrors it onto the right half.
"""

from dataclasses import dataclass

import numpy as np

from .config import Tolerances, default_tolerances
from .filterbank import SynthesisBank


class OrderBudgetExceeded(RuntimeError):
    pass


class NotHermitianSymmetric(ValueError):
    pass


@dataclass
class PRSystem:
    Hcal: np.ndarray
    Ucal: np.ndarray
    p1: int
    p2: int
    M: int
    N: int
    k: int
    hs: bool = False
    parity: str | None = None  # "even" | "odd" for HS systems

    @property
    def p(self) -> int:
        return self.p1 + self.p2 + 1


@dataclass
class SVDSolution:
    Ht0: np.ndarray      # minimum-norm solution, (pM, N)
    V1: np.ndarray       # orthonormal null-space basis, (pM, pM - r)
    rank: int
    residual: float      # ||Hcal Ht0 - Ucal||_F / ||Ucal||_F
    singular_values: np.ndarray


def counter_identity(n: int) -> np.ndarray:
    return np.eye(n)[::-1]


def _block_toeplitz(pp: np.ndarray, p: int) -> np.ndarray:
    k, M, N = pp.shape
    Hcal = np.zeros(((k + p - 1) * N, p * M), dtype=pp.dtype)
    for s in range(p):
        for l in range(k):
            c = s + l
            Hcal[c * N:(c + 1) * N, s * M:(s + 1) * M] = pp[l].T
    return Hcal


def _target(N: int, k: int, p1: int, p2: int, scale=1.0) -> np.ndarray:
    U = np.zeros(((k + p1 + p2) * N, N))
    U[p1 * N:(p1 + 1) * N, :] = scale * np.eye(N)
    return U


def build_system(pp: np.ndarray, p1: int, p2: int) -> PRSystem:
    if p1 < 0 or p2 < 0:
        raise ValueError("p1 and p2 must be non-negative")
    pp = np.asarray(pp, dtype=complex)
    k, M, N = pp.shape
    p = p1 + p2 + 1
    return PRSystem(_block_toeplitz(pp, p), _target(N, k, p1, p2).astype(complex), p1, p2, M, N, k)


def svd_solve(Hcal: np.ndarray, Ucal: np.ndarray) -> SVDSolution:
    """Pseudo-inverse solution and null-space basis from one SVD.

    Numerical rank uses ``max(shape) * eps * sigma_max``.
    """
    U, s, Vh = np.linalg.svd(Hcal, full_matrices=True)
    tol = max(Hcal.shape) * np.finfo(float).eps * (s[0] if s.size else 0.0)
    r = int(np.sum(s > tol))
    V = Vh.conj().T
    Ht0 = V[:, :r] @ ((U[:, :r].conj().T @ Ucal) / s[:r, None])
    res = np.linalg.norm(Hcal @ Ht0 - Ucal) / np.linalg.norm(Ucal)
    return SVDSolution(Ht0, V[:, r:], r, float(res), s)


def couples(p: int):
    """(p1, p2) candidates for overlap p, in search order (p-1, 0) ... (0, p-1)."""
    return [(p - 1 - t, t) for t in range(p)]


def blocks_from_stacked(Htcal: np.ndarray, M: int, N: int) -> np.ndarray:
    """(pM, N) stacked solution -> (p, N, M) synthesis blocks."""
    p = Htcal.shape[0] // M
    return Htcal.reshape(p, M, N).transpose(0, 2, 1)


def _search(make_system, p_max: int, tol: Tolerances, lift):
    tried = []
    for p in range(1, p_max + 1):
        for p1, p2 in couples(p):
            system = make_system(p1, p2)
            sol = svd_solve(system.Hcal, system.Ucal)
            tried.append({"p1": p1, "p2": p2, "residual": sol.residual})
            if sol.residual <= tol.pr:
                Ht = lift(system, sol.Ht0)
                meta = {"p1": p1, "p2": p2, "residual": sol.residual, "rank": sol.rank,
                        "hs": system.hs, "rejected": tried[:-1]}
                return SynthesisBank(system.N, system.M, p1, p2,
                                     blocks_from_stacked(Ht, system.M, system.N), meta)
    raise OrderBudgetExceeded(f"no FIR inverse found within order budget p <= {p_max}")


def solve_min_order(pp: np.ndarray, p_max: int | None = None,
                    tol: Tolerances | None = None) -> SynthesisBank:
    """Minimum-norm synthesis bank of minimal overlap ``p = p1 + p2 + 1``.

    ``metadata["rejected"]`` lists every smaller couple tried with its
    residual, which documents minimality.
    """
    tol = tol or default_tolerances()
    pp = np.asarray(pp, dtype=complex)
    p_max = 4 * pp.shape[0] if p_max is None else p_max
    return _search(lambda p1, p2: build_system(pp, p1, p2), p_max, tol, lambda system, Ht0: Ht0)


# --- Hermitian symmetric case ---------------------------------------------

def check_hs_analysis(pp: np.ndarray, atol: float = 1e-12) -> bool:
    """True iff ``H(l) = J_M conj(H(l))`` for every block."""
    pp = np.asarray(pp, dtype=complex)
    return bool(np.all(np.abs(pp - np.conj(pp[:, ::-1, :])) <= atol))


def check_hs_synthesis(bank: SynthesisBank, atol: float = 1e-12) -> bool:
    """True iff ``Ht(l) = conj(Ht(l)) J_M`` for every block."""
    b = bank.blocks
    return bool(np.all(np.abs(b - np.conj(b[:, :, ::-1])) <= atol))


def hs_max_deviation(bank: SynthesisBank) -> float:
    b = bank.blocks
    return float(np.max(np.abs(b - np.conj(b[:, :, ::-1]))))


def _hs_rows(pp: np.ndarray) -> np.ndarray:
    """Real (k, M, N) blocks [Re H1; c2 / sqrt 2; Im H1] replacing H(l)."""
    k, M, N = pp.shape
    Mh = M // 2
    H1 = pp[:, :Mh, :]
    parts = [H1.real]
    if M % 2:
        parts.append(pp[:, Mh:Mh + 1, :].real / np.sqrt(2.0))
    parts.append(H1.imag)
    return np.concatenate(parts, axis=1)


def build_hs_system(pp: np.ndarray, p1: int, p2: int) -> PRSystem:
    pp = np.asarray(pp, dtype=complex)
    if not check_hs_analysis(pp):
        raise NotHermitianSymmetric("analysis bank does not satisfy H(l) = J_M conj(H(l))")
    k, M, N = pp.shape
    p = p1 + p2 + 1
    Hs = _block_toeplitz(_hs_rows(pp), p)
    return PRSystem(Hs, _target(N, k, p1, p2, 0.5), p1, p2, M, N, k, hs=True,
                    parity="odd" if M % 2 else "even")


def prc_block(M: int) -> np.ndarray:
    """The M x M block of the real-to-complex lift P_rc."""
    Mh = M // 2
    I, J = np.eye(Mh), counter_identity(Mh)
    B = np.zeros((M, M), dtype=complex)
    top, bottom = slice(0, Mh), slice(M - Mh, M)
    left, right = slice(0, Mh), slice(M - Mh, M)
    B[top, left] = I
    B[top, right] = -1j * I
    B[bottom, left] = J
    B[bottom, right] = 1j * J
    if M % 2:
        B[Mh, Mh] = np.sqrt(2.0)
    return B


def lift_hs(Hts: np.ndarray, M: int) -> np.ndarray:
    """Apply the block-diagonal P_rc to a stacked real solution (pM, ...)."""
    p = Hts.shape[0] // M
    B = prc_block(M)
    return np.concatenate([B @ Hts[s * M:(s + 1) * M] for s in range(p)], axis=0)


def prc_matrix(M: int, p: int) -> np.ndarray:
    return np.kron(np.eye(p), prc_block(M))


def solve_min_order_hs(pp: np.ndarray, p_max: int | None = None,
                       tol: Tolerances | None = None) -> SynthesisBank:
    """Minimal-order synthesis bank satisfying ``Ht(l) = conj(Ht(l)) J_M``."""
    tol = tol or default_tolerances()
    pp = np.asarray(pp, dtype=complex)
    if not check_hs_analysis(pp):
        raise NotHermitianSymmetric("analysis bank does not satisfy H(l) = J_M conj(H(l))")
    p_max = 4 * pp.shape[0] if p_max is None else p_max
    M = pp.shape[1]
    return _search(lambda p1, p2: build_hs_system(pp, p1, p2), p_max, tol,
                   lambda system, Hts: lift_hs(Hts, M))


def hs_average(bank: SynthesisBank) -> SynthesisBank:
    """``(Ht + conj(Ht) J_M) / 2``: turns any PR synthesis bank of an HS
    analysis bank into an HS one."""
    b = bank.blocks
    return SynthesisBank(bank.N, bank.M, bank.p1, bank.p2, 0.5 * (b + np.conj(b[:, :, ::-1])),
                         dict(bank.metadata))
