"""Spin-j matrices, control systems and dynamical Lie algebra closure.

hbar = 1 throughout, so a Hamiltonian ``H`` generates ``exp(-i t H)`` and the
corresponding Lie algebra element is ``-i H`` (equivalently ``i H`` up to sign,
which does not change the span).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import ClosureError, InvalidInputError
from .linalg import (
    RANK_TOL,
    MatrixSubspaceBasis,
    _GramSchmidt,
    _realify,
    as_square_matrix,
    is_hermitian,
    is_skew_hermitian,
)

__all__ = [
    "ClosureReport",
    "ControlSystem",
    "SpinLabel",
    "SpinOperators",
    "build_spin_operators",
    "clebsch_gordan_labels",
    "lie_closure",
    "spin_control_system",
]


@dataclass(frozen=True, order=True)
class SpinLabel:
    """Spin quantum number stored as ``two_j = 2j`` to stay exact for half-integers."""

    two_j: int

    def __post_init__(self):
        if int(self.two_j) != self.two_j or self.two_j < 0:
            raise InvalidInputError(f"two_j must be a non-negative integer, got {self.two_j!r}")
        object.__setattr__(self, "two_j", int(self.two_j))

    @classmethod
    def from_j(cls, j) -> "SpinLabel":
        """Build from ``j`` given as a number or a string such as ``"7/2"`` or ``"3.5"``."""
        try:
            frac = Fraction(str(j).strip()) if isinstance(j, str) else Fraction(j).limit_denominator(2)
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidInputError(f"cannot parse spin {j!r}") from exc
        two_j = 2 * frac
        if two_j.denominator != 1:
            raise InvalidInputError(f"spin must be an integer or half-integer, got {j!r}")
        return cls(int(two_j))

    @property
    def j(self) -> float:
        return self.two_j / 2

    @property
    def dim(self) -> int:
        return self.two_j + 1

    @property
    def floor_j(self) -> int:
        return self.two_j // 2

    def __str__(self):
        return str(self.two_j // 2) if self.two_j % 2 == 0 else f"{self.two_j}/2"


@dataclass(frozen=True)
class SpinOperators:
    label: SpinLabel
    jx: np.ndarray = field(repr=False)
    jy: np.ndarray = field(repr=False)
    jz: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.label.dim

    def generators(self):
        """Skew-Hermitian generators ``(i jx, i jy, i jz)``."""
        return [1j * self.jx, 1j * self.jy, 1j * self.jz]


def build_spin_operators(label: SpinLabel) -> SpinOperators:
    """Angular momentum matrices in the ``|j, m>`` basis ordered m = j, j-1, ..., -j."""
    j = label.j
    m = j - np.arange(label.dim)
    # <m+1|J+|m> sits one place above the diagonal because m decreases down the rows
    jplus = np.diag(np.sqrt(j * (j + 1) - m[1:] * (m[1:] + 1)), k=1).astype(complex)
    jminus = jplus.conj().T
    jx = 0.5 * (jplus + jminus)
    jy = -0.5j * (jplus - jminus)
    jz = np.diag(m).astype(complex)
    return SpinOperators(label, jx, jy, jz)


@dataclass(frozen=True)
class ControlSystem:
    """Drift ``h0`` plus control Hamiltonians ``controls`` (all Hermitian, hbar = 1)."""

    h0: np.ndarray = field(repr=False)
    controls: tuple = field(repr=False)

    def __post_init__(self):
        h0 = as_square_matrix(self.h0, "h0")
        if not self.controls:
            raise InvalidInputError("a control system needs at least one control Hamiltonian")
        ctrls = tuple(as_square_matrix(h, f"control {k}") for k, h in enumerate(self.controls))
        for name, h in [("h0", h0)] + [(f"control {k}", h) for k, h in enumerate(ctrls)]:
            if h.shape != h0.shape:
                raise InvalidInputError(f"{name} has shape {h.shape}, expected {h0.shape}")
            if not is_hermitian(h, 1e-10):
                raise InvalidInputError(f"{name} is not Hermitian")
        object.__setattr__(self, "h0", h0)
        object.__setattr__(self, "controls", ctrls)

    @property
    def dim(self) -> int:
        return self.h0.shape[0]

    @property
    def n_controls(self) -> int:
        return len(self.controls)

    def generators(self):
        """Skew-Hermitian generators ``-i H`` of the dynamical Lie algebra."""
        return [-1j * self.h0] + [-1j * h for h in self.controls]

    def to_json_dict(self) -> dict:
        return {
            "dim": self.dim,
            "h0": matrix_to_json(self.h0),
            "controls": [matrix_to_json(h) for h in self.controls],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "ControlSystem":
        try:
            h0 = matrix_from_json(data["h0"])
            controls = [matrix_from_json(h) for h in data["controls"]]
        except KeyError as exc:
            raise InvalidInputError(f"problem file is missing field {exc}") from None
        sys = cls(h0, tuple(controls))
        if "dim" in data and int(data["dim"]) != sys.dim:
            raise InvalidInputError(f"declared dim {data['dim']} does not match matrices ({sys.dim})")
        return sys


def matrix_to_json(m) -> list:
    """Nested ``[re, im]`` pairs, row-major."""
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def matrix_from_json(data) -> np.ndarray:
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError("matrix must be nested arrays of [re, im] pairs") from exc
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise InvalidInputError(f"matrix must be nested arrays of [re, im] pairs, got shape {arr.shape}")
    return as_square_matrix(arr[..., 0] + 1j * arr[..., 1])


def spin_control_system(label: SpinLabel, quadratic_drift: float = 0.0, drift: str = "z",
                        controls: Sequence[str] = ("x", "y")) -> ControlSystem:
    """Spin-j system with drift ``J_drift + q J_z^2`` and linear spin controls.

    A non-zero ``quadratic_drift`` breaks the SU(2) symmetry and, for
    generic values, makes the system fully controllable.
    """
    ops = build_spin_operators(label)
    axis = {"x": ops.jx, "y": ops.jy, "z": ops.jz}
    h0 = axis[drift] + quadratic_drift * (ops.jz @ ops.jz)
    return ControlSystem(h0, tuple(axis[c] for c in controls))


@dataclass(frozen=True)
class ClosureReport:
    """Result of a Lie closure: the algebra basis plus the controllability verdict."""

    basis: MatrixSubspaceBasis
    traceless_dim: int
    rounds: int

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def ambient_dim(self) -> int:
        return self.basis.ambient_dim

    @property
    def controllable(self) -> bool:
        n = self.ambient_dim
        return self.traceless_dim >= n * n - 1

    def to_json_dict(self) -> dict:
        n = self.ambient_dim
        return {
            "ambient_dim": n,
            "lie_algebra_dim": self.dim,
            "traceless_dim": self.traceless_dim,
            "full_dim_u": n * n,
            "full_dim_su": n * n - 1,
            "rounds": self.rounds,
            "controllable": self.controllable,
        }


def _traceless_rank(basis: MatrixSubspaceBasis, rank_tol: float) -> int:
    if len(basis) == 0:
        return 0
    n = basis.ambient_dim
    el = basis.elements
    tr = np.trace(el, axis1=1, axis2=2)
    traceless = el - tr[:, None, None] / n * np.eye(n)
    s = np.linalg.svd(_realify(traceless), compute_uv=False)
    return int(np.sum(s > rank_tol))


def lie_closure(generators, max_dim: int | None = None, rank_tol: float = RANK_TOL,
                max_rounds: int | None = None) -> ClosureReport:
    """Dynamical Lie algebra generated by skew-Hermitian ``generators``.

    Brackets every newly found direction against the current basis until no
    new direction survives Gram-Schmidt, or ``max_dim`` (default ``N**2``) is
    reached.  Raises ClosureError carrying the partial basis if more than
    ``max_rounds`` (default ``2 N**2``) rounds are needed.
    """
    gens = [as_square_matrix(g, "generator") for g in generators]
    if not gens:
        raise InvalidInputError("lie_closure needs at least one generator")
    n = gens[0].shape[0]
    for k, g in enumerate(gens):
        if g.shape != (n, n):
            raise InvalidInputError(f"generator {k} has shape {g.shape}, expected {(n, n)}")
        if not is_skew_hermitian(g, 1e-10 * max(1.0, np.linalg.norm(g))):
            raise InvalidInputError(f"generator {k} is not skew-Hermitian")
    max_dim = n * n if max_dim is None else int(max_dim)
    max_rounds = 2 * n * n if max_rounds is None else int(max_rounds)

    gs = _GramSchmidt(n, rank_tol)
    frontier = [e for e in (gs.add(g) for g in gens) if e is not None]
    rounds = 0
    while frontier and len(gs) < max_dim:
        rounds += 1
        if rounds > max_rounds:
            raise ClosureError(f"Lie closure did not stabilize within {max_rounds} rounds",
                               partial_basis=gs.basis())
        fresh = []
        for x in frontier:
            # gs.mats grows while we iterate; new members are bracketed next round anyway
            for y in list(gs.mats):
                e = gs.add(x @ y - y @ x)
                if e is not None:
                    fresh.append(e)
                    if len(gs) >= max_dim:
                        break
            if len(gs) >= max_dim:
                break
        frontier = fresh
    basis = gs.basis()
    return ClosureReport(basis, _traceless_rank(basis, rank_tol), rounds)


def clebsch_gordan_labels(j1: SpinLabel, j2: SpinLabel) -> list[SpinLabel]:
    """Irreducible components |j1 - j2|, ..., j1 + j2 of the tensor product."""
    lo = abs(j1.two_j - j2.two_j)
    hi = j1.two_j + j2.two_j
    return [SpinLabel(t) for t in range(lo, hi + 1, 2)]


def casimir(ops: SpinOperators) -> np.ndarray:
    return ops.jx @ ops.jx + ops.jy @ ops.jy + ops.jz @ ops.jz
