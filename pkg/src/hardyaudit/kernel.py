"""Finite-dimensional linear algebra for two-value observables.

Matrices are plain ``numpy`` complex128 arrays. Observables and state
vectors are validated once at construction and treated as immutable
afterwards (their arrays are marked read-only).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

ALGEBRAIC_TOL = 1e-10
CORRELATION_TOL = 1e-9
NORM_TOL = 1e-12

ComplexMatrix = np.ndarray


class KernelError(ValueError):
    """Base class for violations of the linear-algebra contracts."""


class NotHermitian(KernelError):
    pass


class NotInvolutory(KernelError):
    pass


class DegenerateSpectrum(KernelError):
    pass


class DimensionMismatch(KernelError):
    pass


class NonCommuting(KernelError):
    pass


class NotNormalized(KernelError):
    pass


class Region(enum.Enum):
    ALPHA = "alpha"
    BETA = "beta"


class Sign(enum.IntEnum):
    PLUS = 1
    MINUS = -1


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=np.complex128)
    array.setflags(write=False)
    return array


def as_matrix(entries) -> ComplexMatrix:
    """Coerce ``entries`` to a square complex128 matrix."""
    m = np.asarray(entries, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise DimensionMismatch(f"expected a non-empty square matrix, got shape {m.shape}")
    return m


def max_abs(m: np.ndarray) -> float:
    return float(np.max(np.abs(m))) if m.size else 0.0


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized pure state; construction fails if ``‖ψ‖² ≠ 1``."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.ndim != 1 or amps.size == 0:
            raise DimensionMismatch(f"state must be a non-empty vector, got shape {amps.shape}")
        norm_sq = float(np.vdot(amps, amps).real)
        if abs(norm_sq - 1.0) > NORM_TOL:
            raise NotNormalized(f"‖ψ‖² = {norm_sq!r} differs from 1 by more than {NORM_TOL}")
        object.__setattr__(self, "amplitudes", _frozen(amps))

    @classmethod
    def from_unnormalized(cls, amplitudes) -> StateVector:
        amps = np.asarray(amplitudes, dtype=np.complex128)
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise NotNormalized("zero vector cannot be normalized")
        return cls(amps / norm)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def __eq__(self, other):
        if not isinstance(other, StateVector):
            return NotImplemented
        return np.array_equal(self.amplitudes, other.amplitudes)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class TwoValueObservable:
    """Hermitian involution with both eigenvalues ±1 present.

    Build through :func:`validate_observable`; direct construction runs
    the same checks at the default tolerance.
    """

    matrix: np.ndarray
    region: Region
    label: str
    tol: float = ALGEBRAIC_TOL

    def __post_init__(self):
        m = as_matrix(self.matrix)
        _check_two_value(m, self.tol)
        object.__setattr__(self, "matrix", _frozen(m))
        object.__setattr__(self, "region", Region(self.region))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __eq__(self, other):
        if not isinstance(other, TwoValueObservable):
            return NotImplemented
        return (
            self.label == other.label
            and self.region == other.region
            and np.array_equal(self.matrix, other.matrix)
        )

    __hash__ = None

    def __repr__(self):
        return f"TwoValueObservable(label={self.label!r}, region={self.region.value}, dim={self.dim})"


def _check_two_value(m: np.ndarray, tol: float) -> None:
    if tol <= 0:
        raise ValueError("tol must be positive")
    dim = m.shape[0]
    herm = max_abs(m - m.conj().T)
    if herm >= tol:
        raise NotHermitian(f"‖M − M†‖_max = {herm:.3e} ≥ {tol:g}")
    invol = max_abs(m @ m - np.eye(dim))
    if invol >= tol:
        raise NotInvolutory(f"‖M² − 1‖_max = {invol:.3e} ≥ {tol:g}")
    trace = abs(np.trace(m).real)
    if trace >= dim - tol:
        raise DegenerateSpectrum(f"|tr M| = {trace:.6g}: M = ±1, only one eigenvalue present")


def validate_observable(matrix, region: Region, label: str, tol: float = ALGEBRAIC_TOL) -> TwoValueObservable:
    """Check that ``matrix`` is a two-value observable and wrap it.

    Raises :class:`NotHermitian`, :class:`NotInvolutory` or
    :class:`DegenerateSpectrum`, tested in that order.
    """
    return TwoValueObservable(as_matrix(matrix), Region(region), label, tol)


@dataclass(frozen=True, eq=False)
class Projector:
    matrix: np.ndarray
    parent: TwoValueObservable
    sign: Sign


def projector(obs: TwoValueObservable, sign: Sign) -> Projector:
    """Spectral projector ``(1 ± M)/2`` of ``obs``."""
    sign = Sign(sign)
    matrix = (np.eye(obs.dim) + int(sign) * obs.matrix) / 2
    return Projector(_frozen(matrix), obs, sign)


def tensor_product(a, b) -> ComplexMatrix:
    return np.kron(np.asarray(a, dtype=np.complex128), np.asarray(b, dtype=np.complex128))


def _same_dim(*dims: int) -> None:
    if len(set(dims)) != 1:
        raise DimensionMismatch(f"dimensions differ: {dims}")


def commutator_norm(a: TwoValueObservable, b: TwoValueObservable) -> float:
    _same_dim(a.dim, b.dim)
    return max_abs(a.matrix @ b.matrix - b.matrix @ a.matrix)


def commutes(a: TwoValueObservable, b: TwoValueObservable, tol: float = ALGEBRAIC_TOL) -> bool:
    return commutator_norm(a, b) < tol


def _real(value: complex, what: str) -> float:
    if abs(value.imag) >= ALGEBRAIC_TOL:
        raise KernelError(f"{what} has imaginary part {value.imag:.3e}")
    return float(value.real)


def expectation(psi: StateVector, obs: TwoValueObservable) -> float:
    """``⟨ψ|Mψ⟩``, clamped to [-1, 1]."""
    _same_dim(psi.dim, obs.dim)
    value = _real(np.vdot(psi.amplitudes, obs.matrix @ psi.amplitudes), "expectation")
    return min(1.0, max(-1.0, value))


def outcome_probability(psi: StateVector, obs: TwoValueObservable, sign: Sign) -> float:
    """Born probability ``‖P_sign ψ‖²`` of a single measurement."""
    _same_dim(psi.dim, obs.dim)
    v = projector(obs, sign).matrix @ psi.amplitudes
    return float(np.vdot(v, v).real)


def _require_commuting(a: TwoValueObservable, b: TwoValueObservable, tol: float) -> None:
    norm = commutator_norm(a, b)
    if norm >= tol:
        raise NonCommuting(f"[{a.label}, {b.label}] has norm {norm:.3e}; no joint distribution")


def joint_probability(
    psi: StateVector,
    a: TwoValueObservable,
    sa: Sign,
    b: TwoValueObservable,
    sb: Sign,
    tol: float = ALGEBRAIC_TOL,
) -> float:
    """Probability that a joint measurement of ``a`` and ``b`` yields ``(sa, sb)``.

    Evaluated as ``‖P_sa(A) P_sb(B) ψ‖²``, which equals
    ``⟨ψ|P_sa P_sb ψ⟩`` for commuting projectors and is never negative.
    """
    _same_dim(psi.dim, a.dim, b.dim)
    _require_commuting(a, b, tol)
    v = projector(a, sa).matrix @ (projector(b, sb).matrix @ psi.amplitudes)
    return min(1.0, float(np.vdot(v, v).real))


def correlation_residual(d: TwoValueObservable, b: TwoValueObservable, psi: StateVector) -> float:
    """``‖P₊(D)P₊(B)ψ − P₊(D)ψ‖``; zero exactly when D→B holds in ψ."""
    _same_dim(psi.dim, d.dim, b.dim)
    pd = projector(d, Sign.PLUS).matrix
    pb = projector(b, Sign.PLUS).matrix
    return float(np.linalg.norm(pd @ (pb @ psi.amplitudes) - pd @ psi.amplitudes))


def correlation_holds(
    d: TwoValueObservable,
    b: TwoValueObservable,
    psi: StateVector,
    tol: float = CORRELATION_TOL,
) -> bool:
    """Operator test of the correlation D→B in state ψ."""
    _require_commuting(d, b, ALGEBRAIC_TOL)
    return correlation_residual(d, b, psi) < tol


PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
IDENTITY_2 = np.eye(2, dtype=np.complex128)
