"""Affine parameterization of every FIR inverse at a fixed (p1, p2).

All solutions of ``Hcal @ Htcal = Ucal`` are ``Htcal = B @ C + Ht0`` where
``Ht0`` is the pseudo-inverse solution and the columns of ``B`` span the null
space of ``Hcal``.  In the general case ``B = V1`` (orthonormal, C complex);
in the Hermitian-symmetric case ``B = P_rc V1`` with ``V1`` from the real
system and C real.
"""

from dataclasses import dataclass

import numpy as np

from .filterbank import SynthesisBank
from .inverse import PRSystem, blocks_from_stacked, lift_hs, prc_matrix, svd_solve


@dataclass(frozen=True, eq=False)
class ParamSpace:
    M: int
    N: int
    p1: int
    p2: int
    rank: int
    Ht0: np.ndarray     # (pM, N) particular solution (already lifted when hs)
    V1: np.ndarray      # (pM, d) orthonormal null-space basis of the solved system
    basis: np.ndarray   # (pM, d) V1, or W1 = P_rc V1 when hs
    hs: bool = False
    P_rc: np.ndarray | None = None
    residual: float = 0.0

    @property
    def p(self) -> int:
        return self.p1 + self.p2 + 1

    @property
    def dim(self) -> int:
        """Number of rows of the free matrix C."""
        return self.basis.shape[1]

    @property
    def c_shape(self) -> tuple[int, int]:
        return self.dim, self.N

    @property
    def c_dtype(self):
        return float if self.hs else complex

    @property
    def slices(self) -> np.ndarray:
        """(M, p, d): ``slices[j][l + p1, n] = basis[(l + p1) M + j, n]``."""
        return self.basis.reshape(self.p, self.M, self.dim).transpose(1, 0, 2)

    @property
    def Ht0_slices(self) -> np.ndarray:
        """(M, p, N): ``Ht0_slices[j][l + p1, i] = Ht(l)[i, j]`` at C = 0."""
        return self.Ht0.reshape(self.p, self.M, self.N).transpose(1, 0, 2)

    def taps(self, C) -> np.ndarray:
        """(M, p, N) channel tap matrices ``V_j C + Ht0_j``."""
        C = self._check(C)
        return np.einsum("jpd,dn->jpn", self.slices, C) + self.Ht0_slices

    def zeros(self) -> np.ndarray:
        return np.zeros(self.c_shape, dtype=self.c_dtype)

    def _check(self, C) -> np.ndarray:
        C = np.asarray(C)
        if C.shape != self.c_shape:
            raise ValueError(f"C must have shape {self.c_shape}, got {C.shape}")
        if self.hs and np.iscomplexobj(C):
            if np.any(C.imag != 0):
                raise ValueError("C must be real in the Hermitian-symmetric case")
            C = C.real
        return C


def _build(system: PRSystem, lift) -> ParamSpace:
    sol = svd_solve(system.Hcal, system.Ucal)
    Ht0 = lift(sol.Ht0)
    basis = lift(sol.V1)
    return ParamSpace(system.M, system.N, system.p1, system.p2, sol.rank, Ht0.astype(complex),
                      sol.V1, basis.astype(complex), system.hs,
                      prc_matrix(system.M, system.p) if system.hs else None, sol.residual)


def build_paramspace(system: PRSystem) -> ParamSpace:
    if system.hs:
        return build_paramspace_hs(system)
    return _build(system, lambda X: X)


def build_paramspace_hs(system: PRSystem) -> ParamSpace:
    if not system.hs:
        raise ValueError("expected a Hermitian-symmetric system")
    return _build(system, lambda X: lift_hs(X, system.M))


def assemble(ps: ParamSpace, C) -> SynthesisBank:
    """Synthesis bank for ``Htcal = basis @ C + Ht0``."""
    C = ps._check(C)
    Ht = ps.basis @ C + ps.Ht0 if ps.dim else ps.Ht0.copy()
    return SynthesisBank(ps.N, ps.M, ps.p1, ps.p2, blocks_from_stacked(Ht, ps.M, ps.N),
                         {"p1": ps.p1, "p2": ps.p2, "rank": ps.rank, "hs": ps.hs})
