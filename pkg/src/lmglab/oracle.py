"""Brute-force validation of the sector computations in the full 2^N space.

Everything here works on dense Kronecker-product operators with no sector
bookkeeping, so agreement with the (N+1)-dimensional computations is a real
cross-check.  Dense diagonalization is LAPACK's (numpy.linalg.eigh), a
different code path from the banded kernel used on the sector side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .evolve import TimeSeries, eigensystem
from .model import LmgParams, build_hamiltonian, ground_M
from .spinspace import build_sector
from .ssb import localize_ground_state

MAX_FULL_SPACE_N = 12
MAX_CORRELATION_N = 10

_DEGEN_RTOL = 1e-10

_PAULI_HALF = {
    "x": np.array([[0.0, 0.5], [0.5, 0.0]], dtype=np.complex128),
    "y": np.array([[0.0, -0.5j], [0.5j, 0.0]], dtype=np.complex128),
    "z": np.array([[0.5, 0.0], [0.0, -0.5]], dtype=np.complex128),
}


class OracleMismatchError(RuntimeError):
    """A sector-vs-full comparison exceeded its tolerance."""


@dataclass(frozen=True)
class FullSpaceOperators:
    """Dense collective operators S_x, S_y, S_z on the 2^N product space."""

    N: int
    sx: np.ndarray
    sy: np.ndarray
    sz: np.ndarray


def _site_sum(N: int, single: np.ndarray) -> np.ndarray:
    dim = 2**N
    total = np.zeros((dim, dim), dtype=np.complex128)
    for site in range(N):
        op = np.kron(
            np.eye(2**site), np.kron(single, np.eye(2 ** (N - 1 - site)))
        )
        total += op
    return total


def full_space_operators(N: int) -> FullSpaceOperators:
    """Collective spin operators as sums of single-site Pauli/2 matrices."""
    if N > MAX_FULL_SPACE_N:
        raise ValueError(
            f"resource limit: full-space operators support N <= {MAX_FULL_SPACE_N}"
        )
    if N < 1:
        raise ValueError("N must be >= 1")
    return FullSpaceOperators(
        N=N,
        sx=_site_sum(N, _PAULI_HALF["x"]),
        sy=_site_sum(N, _PAULI_HALF["y"]),
        sz=_site_sum(N, _PAULI_HALF["z"]),
    )


def full_hamiltonian(
    params: LmgParams,
    ops: FullSpaceOperators,
    g: float = 0.0,
    phi_n: float = 0.0,
) -> np.ndarray:
    """Dense H = (lam/N)(Sx^2 + gamma Sy^2) - h Sz - g S_n on the product space."""
    h_full = (params.lam / params.N) * (
        ops.sx @ ops.sx + params.gamma * (ops.sy @ ops.sy)
    )
    h_full -= params.h * ops.sz
    if g != 0.0:
        h_full -= g * (math.cos(phi_n) * ops.sx + math.sin(phi_n) * ops.sy)
    return h_full


@dataclass(frozen=True)
class FullGround:
    energy: float
    vector: np.ndarray
    degenerate: bool


def full_space_ground(
    N: int, params: LmgParams, g: float = 0.0, phi_n: float = 0.0
) -> FullGround:
    """Dense ground state of the (possibly kicked) Hamiltonian."""
    ops = full_space_operators(N)
    w, v = np.linalg.eigh(full_hamiltonian(params, ops, g=g, phi_n=phi_n))
    degenerate = bool(w[1] - w[0] <= _DEGEN_RTOL * max(1.0, abs(w[0])))
    return FullGround(energy=float(w[0]), vector=v[:, 0].copy(), degenerate=degenerate)


def full_space_correlation(N: int, h: float, tgrid) -> list[tuple[float, TimeSeries]]:
    """f_N(t) evaluated entirely in the 2^N space.

    Returns one (ground Sz expectation, series) pair per ground level,
    ascending in Sz.  A degenerate ground pair is resolved by diagonalizing
    Sz inside the ground eigenspace, which reproduces the sector-side
    magnetization members.
    """
    if N > MAX_CORRELATION_N:
        raise ValueError(
            f"resource limit: full-space correlation supports N <= {MAX_CORRELATION_N}"
        )
    tgrid = np.asarray(tgrid, dtype=np.float64)
    ops = full_space_operators(N)
    params = LmgParams(N=N, h=h)
    w, v = np.linalg.eigh(full_hamiltonian(params, ops))
    e0 = w[0]
    ground_idx = np.nonzero(w - e0 <= _DEGEN_RTOL * max(1.0, abs(e0)))[0]
    basis = v[:, ground_idx]
    if ground_idx.shape[0] > 1:
        # resolve the degenerate subspace along Sz
        sz_block = basis.conj().T @ ops.sz @ basis
        _, rot = np.linalg.eigh(sz_block)
        basis = basis @ rot
    members = []
    for col in range(basis.shape[1]):
        phi = basis[:, col]
        m_val = float(np.real(np.vdot(phi, ops.sz @ phi)))
        u = ops.sx @ phi
        proj = v.conj().T @ u
        weights = np.abs(proj) ** 2
        values = (4.0 / N**2) * (
            weights[None, :] @ np.exp(-1j * (w - e0)[:, None] * tgrid[None, :])
        )[0]
        members.append(
            (m_val, TimeSeries(t=tgrid, values=values, label="fN_full"))
        )
    members.sort(key=lambda pair: pair[0])
    return members


@dataclass(frozen=True)
class OracleReport:
    """Maximum absolute deviations between sector and full-space routes."""

    N: int
    h: float
    g: float
    ground_energy: float
    ground_sz: float
    correlation: float
    localized_mx: float

    def worst(self) -> float:
        return max(
            self.ground_energy, self.ground_sz, self.correlation, self.localized_mx
        )


def sector_vs_full_checks(
    N: int, h: float, g: float | None = None, samples: int = 64
) -> OracleReport:
    """Run every sector-vs-full comparison for one parameter point.

    Covers the ground energy, the ground Sz expectation (per degenerate
    member), f_N(t) on a uniform grid over one collective period, and the
    order parameter of the kicked ground state.
    """
    from .evolve import correlation_fN
    from .ssb import default_kick

    if g is None:
        g = default_kick(N)
    params = LmgParams(N=N, h=h)
    sector = build_sector(N)

    # ground energy
    e0_sector = eigensystem(build_hamiltonian(params, sector)).ground_energy
    full = full_space_ground(N, params)
    dev_energy = abs(e0_sector - full.energy)

    # ground Sz expectation, matched member by member
    tgrid = np.arange(samples) * (2.0 * math.pi * N / samples)
    full_members = full_space_correlation(N, h, tgrid)
    sector_levels = ground_M(N, h).levels
    dev_sz = max(
        abs(m_full - m_sec)
        for (m_full, _), m_sec in zip(full_members, sector_levels)
    )

    # correlation function
    corr = correlation_fN(sector, h, tgrid)
    dev_corr = 0.0
    for (_, full_series), member in zip(full_members, corr.members):
        dev_corr = max(
            dev_corr,
            float(np.max(np.abs(full_series.values - member.direct.values))),
        )

    # localized order parameter
    localized = localize_ground_state(params, g=g)
    kicked = full_space_ground(N, params, g=g)
    ops = full_space_operators(N)
    mx_full = 2.0 / N * float(np.real(np.vdot(kicked.vector, ops.sx @ kicked.vector)))
    dev_mx = abs(localized.m_n - mx_full)

    return OracleReport(
        N=N,
        h=h,
        g=g,
        ground_energy=dev_energy,
        ground_sz=dev_sz,
        correlation=dev_corr,
        localized_mx=dev_mx,
    )
