"""Truncated Fock-space realizations of the deformed ladder algebra.

The annihilation operator acts as a |n> = x_n |n-1> with
x_n = sqrt(s q^{-n} [n]_q) = sqrt(phi(n)), so a, a^dag, X, P and N are all
(bi/tri)diagonal on the first D number states.  The momentum operator is
kept in real arithmetic: it is stored as the real matrix M with P = i M,
which is Hermitian exactly when M is antisymmetric.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .qcore import DeformParams, DomainError, CompensatedSum, structure_function

__all__ = [
    "DEFAULT_MAX_DIM",
    "FockTruncation",
    "TridiagonalOperator",
    "SpectrumRow",
    "BoundednessReport",
    "ladder_entries",
    "ladder_matrices",
    "commutator_defect",
    "position_momentum",
    "spectrum",
    "boundedness_diagnostic",
]

DEFAULT_MAX_DIM = 4096


@dataclass(frozen=True)
class FockTruncation:
    """Finite section over the number states |0> .. |dim-1>."""

    dim: int
    max_dim: int = DEFAULT_MAX_DIM

    def __post_init__(self) -> None:
        if self.dim != int(self.dim) or self.dim < 2:
            raise DomainError(f"truncation dimension must be an integer >= 2, got {self.dim}")
        if self.dim > self.max_dim:
            raise DomainError(f"truncation dimension {self.dim} exceeds the maximum {self.max_dim}")


def _frozen(arr: np.ndarray) -> np.ndarray:
    out = np.asarray(arr, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class TridiagonalOperator:
    """Tridiagonal matrix in the number basis.

    ``sub``/``sup`` hold the first sub/superdiagonal (length dim-1) and
    ``diag`` the main diagonal.  With ``i_prefactor`` set, the operator is
    i times the stored real matrix; the ``hermitian`` flag is derived from
    the stored arrays (sub == sup in the real case, sub == -sup under the
    i prefactor, both meaning sub_k = conj(sup_k) entrywise).
    """

    dim: int
    sub: np.ndarray
    diag: np.ndarray
    sup: np.ndarray
    i_prefactor: bool = False
    hermitian: bool = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "sub", _frozen(self.sub))
        object.__setattr__(self, "diag", _frozen(self.diag))
        object.__setattr__(self, "sup", _frozen(self.sup))
        if self.sub.shape != (self.dim - 1,) or self.sup.shape != (self.dim - 1,) \
                or self.diag.shape != (self.dim,):
            raise DomainError("band lengths must be dim-1 (off) and dim (main)")
        if self.i_prefactor:
            herm = bool(np.array_equal(self.sub, -self.sup))
        else:
            herm = bool(np.array_equal(self.sub, self.sup))
        object.__setattr__(self, "hermitian", herm)

    def to_dense(self) -> np.ndarray:
        """Dense matrix; complex when the operator carries the i prefactor."""
        n = self.dim
        m = np.zeros((n, n))
        idx = np.arange(n - 1)
        m[idx, idx + 1] = self.sup
        m[idx + 1, idx] = self.sub
        m[np.arange(n), np.arange(n)] = self.diag
        return 1j * m if self.i_prefactor else m


def ladder_entries(p: DeformParams, dim: int) -> np.ndarray:
    """Matrix elements x_1 .. x_{dim-1} with x_n = sqrt(phi(n))."""
    return np.sqrt([structure_function(p, n) for n in range(1, dim)])


def ladder_matrices(p: DeformParams, t: FockTruncation
                    ) -> tuple[TridiagonalOperator, TridiagonalOperator, TridiagonalOperator]:
    """Annihilation, creation and number operators on the truncated space.

    a |n> = x_n |n-1> (so a |0> = 0), a^dag is the transpose of a, and the
    number operator is diag(0 .. dim-1).
    """
    d = t.dim
    x = ladder_entries(p, d)
    zeros_off = np.zeros(d - 1)
    zeros_diag = np.zeros(d)
    a = TridiagonalOperator(d, zeros_off, zeros_diag, x)
    a_dag = TridiagonalOperator(d, x, zeros_diag, zeros_off)
    n_op = TridiagonalOperator(d, zeros_off, np.arange(d, dtype=float), zeros_off)
    return a, a_dag, n_op


def commutator_defect(p: DeformParams, t: FockTruncation) -> np.ndarray:
    """Per-state residual <n| (a a^dag - a^dag a - s q^{-n-1}) |n>, n < dim-1.

    The last retained state is excluded: a a^dag is broken there by the
    finite section.  Residuals are returned raw (signed); callers decide the
    scale to compare against.
    """
    a, _, _ = ladder_matrices(p, t)
    x = a.sup
    s = p.scale
    out = np.empty(t.dim - 1)
    for n in range(t.dim - 1):
        aad = x[n] * x[n]
        ada = x[n - 1] * x[n - 1] if n >= 1 else 0.0
        out[n] = aad - ada - s * p.q ** (-(n + 1))
    return out


def position_momentum(p: DeformParams, t: FockTruncation, mass: float = 1.0,
                      omega: float = 1.0, hbar: float = 1.0
                      ) -> tuple[TridiagonalOperator, TridiagonalOperator]:
    """Position sqrt(hbar/2 m w)(a + a^dag) and momentum -i sqrt(m hbar w/2)(a - a^dag).

    X is real symmetric with zero diagonal; P is returned as its real
    coefficient matrix under the i prefactor (antisymmetric, hence Hermitian).
    """
    for name, val in (("mass", mass), ("omega", omega), ("hbar", hbar)):
        if not (val > 0.0) or not math.isfinite(val):
            raise DomainError(f"{name} must be positive and finite, got {val}")
    d = t.dim
    x = ladder_entries(p, d)
    cx = math.sqrt(hbar / (2.0 * mass * omega))
    cp = math.sqrt(mass * hbar * omega / 2.0)
    zeros_diag = np.zeros(d)
    x_op = TridiagonalOperator(d, cx * x, zeros_diag, cx * x)
    # P = i M with M_{n,n+1} = -cp x_{n+1}, M_{n+1,n} = +cp x_{n+1}
    p_op = TridiagonalOperator(d, cp * x, zeros_diag, -cp * x, i_prefactor=True)
    return x_op, p_op


@dataclass(frozen=True)
class SpectrumRow:
    """Energy and number-state uncertainties at level n.

    ``energy`` carries the hbar*omega/2 prefactor supplied to
    :func:`spectrum`; ``var_x`` is in units hbar/(2 m w), ``var_p`` in units
    m hbar w / 2 and ``uncertainty_product`` in units hbar/2, so all three
    equal phi(n) + phi(n+1) numerically.
    """

    n: int
    energy: float
    var_x: float
    var_p: float
    uncertainty_product: float


def spectrum(p: DeformParams, n_max: int, hbar_omega: float = 1.0) -> list[SpectrumRow]:
    """Eigenvalues E(n) = (hbar w / 2) (phi(n) + phi(n+1)) with uncertainties.

    Equivalent to (hbar w / 2) s q^{-n-1}(q [n]_q + [n+1]_q); strictly
    increasing in n because phi is.
    """
    if n_max < 0:
        raise DomainError(f"n_max must be nonnegative, got {n_max}")
    if not (hbar_omega > 0.0):
        raise DomainError(f"hbar_omega must be positive, got {hbar_omega}")
    rows = []
    phi_n = 0.0
    for n in range(n_max + 1):
        phi_n1 = structure_function(p, n + 1)
        both = phi_n + phi_n1
        rows.append(SpectrumRow(n=n, energy=0.5 * hbar_omega * both,
                                var_x=both, var_p=both, uncertainty_product=both))
        phi_n = phi_n1
    return rows


@dataclass(frozen=True)
class BoundednessReport:
    """Outcome of the Jacobi-matrix boundedness probe.

    For q > 1 the off-diagonal entries stay below sqrt(s/(q-1)) and the
    matrices are bounded; for q < 1 they diverge, and the ratio test on
    sum 1/x_n (limit sqrt(q) < 1) certifies its convergence.
    """

    bounded: bool
    sup_bound: float | None
    reciprocal_sum_estimate: float | None
    ratio_at_probe: float | None
    ratio_limit: float | None
    max_ratio_to_bound: float | None


def boundedness_diagnostic(p: DeformParams, probe_n: int = 200) -> BoundednessReport:
    """Probe x_n up to ``probe_n`` and report the regime certificate."""
    if probe_n < 2:
        raise DomainError(f"probe_n must be >= 2, got {probe_n}")
    if p.q > 1.0:
        sup = math.sqrt(p.scale / (p.q - 1.0))
        worst = 0.0
        for n in range(1, probe_n + 1):
            worst = max(worst, math.sqrt(structure_function(p, n)) / sup)
        return BoundednessReport(bounded=True, sup_bound=sup,
                                 reciprocal_sum_estimate=None, ratio_at_probe=None,
                                 ratio_limit=None, max_ratio_to_bound=worst)
    acc = CompensatedSum()
    for n in range(1, probe_n + 1):
        acc.add(1.0 / math.sqrt(structure_function(p, n)))
    ratio = math.sqrt(structure_function(p, probe_n) / structure_function(p, probe_n + 1))
    return BoundednessReport(bounded=False, sup_bound=None,
                             reciprocal_sum_estimate=acc.value, ratio_at_probe=ratio,
                             ratio_limit=math.sqrt(p.q), max_ratio_to_bound=None)
