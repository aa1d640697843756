"""Gate-fidelity landscape on the group manifold itself.

The objective is ``J(U) = |tr(W^dag U)| / N``.  Its gradient with respect to a
right-multiplied perturbation ``U exp(s A)`` is the skew-Hermitian matrix
returned by :func:`gate_gradient_generator`; restricting that gradient to a
symmetry algebra gives the flow whose fixed points are the landscape's
critical points inside the symmetry group.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .characters import TWO_PI, LandscapeGrid, su2_character
from .errors import InvalidInputError, NonSmoothPointError
from .linalg import (
    MatrixSubspaceBasis,
    as_square_matrix,
    expm_skew,
    is_unitary,
    nearest_unitary,
    orthonormalize,
    project,
)
from .representations import SpinLabel, SpinOperators, build_spin_operators

__all__ = [
    "AscentConfig",
    "EulerPoint",
    "FlowResult",
    "TargetGate",
    "certify_realizable",
    "criticality_residual",
    "euler_unitary",
    "fidelity",
    "gate_gradient_generator",
    "kinematic_flow",
    "random_group_element",
    "reduced_scan",
    "riemannian_ascent",
    "spin_algebra",
    "spin_class_angle",
    "spin_setup",
    "spin_target",
]

# |tr(W^dag U)| below this is treated as the kink of the modulus.
KINK_TOL = 1e-12


@dataclass(frozen=True)
class TargetGate:
    """Target unitary plus an optional realizability verdict.

    ``realizable`` is None until decided, either constructively
    (:meth:`from_algebra`) or by :func:`certify_realizable`.
    """

    w: np.ndarray = field(repr=False)
    realizable: bool | None = None
    certificate: str | None = None

    def __post_init__(self):
        w = as_square_matrix(self.w, "target")
        if not is_unitary(w, 1e-10):
            raise InvalidInputError("target matrix is not unitary within 1e-10")
        w.setflags(write=False)
        object.__setattr__(self, "w", w)

    @property
    def dim(self) -> int:
        return self.w.shape[0]

    @classmethod
    def from_algebra(cls, a) -> "TargetGate":
        """``W = exp(a)`` for an algebra element ``a``; realizable by construction."""
        return cls(expm_skew(as_square_matrix(a, "algebra element")), True, "constructed")

    def with_verdict(self, realizable: bool, certificate: str) -> "TargetGate":
        return TargetGate(self.w, realizable, certificate)


@dataclass(frozen=True)
class EulerPoint:
    psi1: float
    theta: float
    psi2: float

    def __post_init__(self):
        for name in ("psi1", "theta", "psi2"):
            object.__setattr__(self, name, float(getattr(self, name)) % TWO_PI)


def euler_unitary(ops: SpinOperators, p: EulerPoint) -> np.ndarray:
    """``exp(psi1 i jz) exp(theta i jx) exp(psi2 i jz)``."""
    return (expm_skew(1j * ops.jz, p.psi1) @ expm_skew(1j * ops.jx, p.theta)
            @ expm_skew(1j * ops.jz, p.psi2))


def spin_algebra(ops: SpinOperators) -> MatrixSubspaceBasis:
    """Orthonormal basis of the spin-j image of su(2)."""
    return orthonormalize(ops.generators())


def _target_matrix(w) -> np.ndarray:
    return w.w if isinstance(w, TargetGate) else as_square_matrix(w, "target")


def fidelity(u, w) -> float:
    wm = _target_matrix(w)
    u = np.asarray(u)
    if u.shape != wm.shape:
        raise InvalidInputError(f"dimension mismatch: {u.shape} vs {wm.shape}")
    return float(abs(np.vdot(wm, u))) / wm.shape[0]


def gate_gradient_generator(u, w) -> np.ndarray:
    """Skew-Hermitian gradient of ``J`` at ``u`` for right perturbations.

    ``J(u exp(sA)) - J(u) = s <D, A> + O(s^2)`` with
    ``D = (e^{i phi} u^dag W - e^{-i phi} W^dag u) / (2N)`` and
    ``phi = arg tr(W^dag u)``.  The phase factor makes this the gradient of
    the modulus; the formula is undefined where the trace vanishes.
    """
    wm = _target_matrix(w)
    u = as_square_matrix(u, "u")
    if u.shape != wm.shape:
        raise InvalidInputError(f"dimension mismatch: {u.shape} vs {wm.shape}")
    n = wm.shape[0]
    m = wm.conj().T @ u
    t = np.trace(m)
    if abs(t) < KINK_TOL:
        raise NonSmoothPointError(f"|tr(W^dag U)| = {abs(t):.3g} is below {KINK_TOL}; J is not differentiable here")
    ph = t / abs(t)
    return (ph * m.conj().T - np.conj(ph) * m) / (2 * n)


def criticality_residual(u, w, algebra: MatrixSubspaceBasis) -> float:
    """Frobenius norm of the gradient projected onto ``algebra``."""
    return float(np.linalg.norm(project(gate_gradient_generator(u, w), algebra)))


# ---------------------------------------------------------------------------
# Reduced Euler-angle scan
# ---------------------------------------------------------------------------

def reduced_scan(ops: SpinOperators, w, resolution: int) -> LandscapeGrid:
    """``J(theta, phi) = |tr(W^dag exp(phi i jz) exp(theta i jx))| / N`` on [0, 2pi)^2.

    Valid for targets commuting with ``jz``: then the two outer Euler angles
    enter only through their sum ``phi``.
    """
    wm = _target_matrix(w)
    n = ops.dim
    if wm.shape != (n, n):
        raise InvalidInputError(f"target has shape {wm.shape}, spin operators are {n}x{n}")
    if resolution < 64:
        raise InvalidInputError("resolution must be at least 64")
    if np.linalg.norm(wm @ ops.jz - ops.jz @ wm) > 1e-10:
        raise InvalidInputError("reduced scan needs a target commuting with jz ([W, jz] = 0)")
    wd = np.diag(wm)
    mu, v = np.linalg.eigh(ops.jx)
    weights = np.abs(v) ** 2  # weights[m, k] = |<m|k>|^2
    m = np.real(np.diag(ops.jz))
    ax = np.linspace(0.0, TWO_PI, resolution, endpoint=False)
    # diagonal of exp(theta i jx) in the jz basis, for every theta
    diag_x = np.exp(1j * np.outer(ax, mu)) @ weights.T
    phase_z = np.exp(1j * np.outer(ax, m)) * np.conj(wd)[None, :]
    vals = np.abs(diag_x @ phase_z.T) / n
    meta = {"kind": "reduced_euler_scan", "j": str(ops.label), "resolution": resolution,
            "target_diagonal": [[float(z.real), float(z.imag)] for z in wd]}
    return LandscapeGrid(f"su2:j={ops.label}", ("theta", "phi"), (ax, ax.copy()), vals, meta)


# ---------------------------------------------------------------------------
# Riemannian ascent restricted to a symmetry algebra
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AscentConfig:
    tol: float = 1e-8
    max_iter: int = 100_000
    armijo: float = 1e-4
    shrink: float = 0.5
    initial_step: float = 0.5
    kink_kick: float = 1e-3
    max_restarts: int = 10
    record_every: int = 1

    def __post_init__(self):
        if not self.tol > 0 or self.max_iter < 0 or not 0 < self.shrink < 1 or not 0 < self.armijo < 1:
            raise InvalidInputError("invalid ascent configuration")


@dataclass
class FlowResult:
    start: np.ndarray = field(repr=False)
    end: np.ndarray = field(repr=False)
    final_J: float
    iterations: int
    residual: float
    converged: bool
    trajectory: np.ndarray = field(repr=False, default_factory=lambda: np.zeros(0))
    notes: dict = field(default_factory=dict)

    def summary(self, seed=None) -> dict:
        return {"seed": seed, "final_J": self.final_J, "iterations": self.iterations,
                "residual": self.residual, "converged": self.converged}


def _increment(wdag_u, lam, v, eta):
    """Exact ``tr(W^dag U (exp(eta G) - I))`` for ``G = v diag(i lam) v^dag``.

    ``expm1`` keeps full relative precision when the step is tiny, which is
    what lets the ascent resolve improvements far below ``eps * J``.
    """
    em1 = np.expm1(1j * eta * lam)
    return np.einsum("ij,jk,k,ik->", wdag_u, v, em1, v.conj())


def riemannian_ascent(start, w, algebra: MatrixSubspaceBasis, config: AscentConfig | None = None,
                      rng: np.random.Generator | None = None) -> FlowResult:
    """Backtracking gradient ascent of ``J`` on ``exp(algebra)``.

    Each iteration moves ``U <- U exp(eta G)`` with ``G`` the projected
    gradient, starting from ``eta = initial_step / |G|`` and shrinking until
    the Armijo condition holds.  The recorded trajectory accumulates the
    exactly computed increments, so it is nondecreasing by construction.
    """
    cfg = config or AscentConfig()
    wm = _target_matrix(w)
    u0 = as_square_matrix(start, "start")
    if u0.shape != wm.shape:
        raise InvalidInputError(f"dimension mismatch: {u0.shape} vs {wm.shape}")
    if len(algebra) and algebra.ambient_dim != wm.shape[0]:
        raise InvalidInputError("algebra dimension does not match the target")
    n = wm.shape[0]
    wdag = wm.conj().T
    rng = rng if rng is not None else np.random.default_rng(0)
    u = u0.copy()
    restarts = 0

    def kick(u):
        xi = algebra.combine(rng.standard_normal(len(algebra)))
        return u @ expm_skew(xi * (cfg.kink_kick / max(np.linalg.norm(xi), 1e-300)))

    while abs(np.trace(wdag @ u)) < KINK_TOL and restarts < cfg.max_restarts and len(algebra):
        u = kick(u)
        restarts += 1

    m = wdag @ u
    t = np.trace(m)
    j_acc = abs(t) / n
    traj = [j_acc]
    it = 0
    resid = math.inf
    while True:
        if abs(t) < KINK_TOL:
            if restarts >= cfg.max_restarts:
                break
            u = kick(u)
            restarts += 1
            m = wdag @ u
            t = np.trace(m)
            j_acc = abs(t) / n
            continue
        g = project(gate_gradient_generator(u, wm), algebra)
        resid = float(np.linalg.norm(g))
        if resid < cfg.tol or it >= cfg.max_iter:
            break
        lam, v = np.linalg.eigh(-1j * g)
        eta = cfg.initial_step / resid
        need = cfg.armijo * resid * resid
        while True:
            delta = _increment(m, lam, v, eta)
            tn = t + delta
            gain = (2 * (np.conj(t) * delta).real + abs(delta) ** 2) / (abs(tn) + abs(t)) / n
            if gain >= need * eta:
                break
            eta *= cfg.shrink
            if eta * resid < 1e-18:
                gain = None
                break
        if gain is None:
            break  # no representable improvement left
        u = u @ ((v * np.exp(1j * eta * lam)) @ v.conj().T)
        it += 1
        if it % 64 == 0 and not is_unitary(u, 1e-9):
            u = nearest_unitary(u)
        m = wdag @ u
        t = np.trace(m)
        j_acc += gain
        if it % cfg.record_every == 0:
            traj.append(j_acc)
    if not is_unitary(u, 1e-9):
        u = nearest_unitary(u)
    final = float(abs(np.trace(wdag @ u))) / n
    return FlowResult(u0, u, final, it, resid, bool(resid < cfg.tol), np.asarray(traj),
                      {"restarts": restarts})


def _min_gap(e: np.ndarray) -> float:
    lam = np.linalg.eigvalsh(-1j * e)
    d = np.abs(lam[:, None] - lam[None, :])
    d = d[d > 1e-9 * max(1.0, float(np.max(np.abs(lam))))]
    return float(d.min()) if d.size else 1.0


def random_group_element(algebra: MatrixSubspaceBasis, rng: np.random.Generator) -> np.ndarray:
    """``exp(xi)`` for a Gaussian element ``xi`` of ``algebra``.

    Each coordinate has standard deviation ``2 pi / gap`` where ``gap`` is the
    smallest spectral gap of the basis elements, so one-parameter subgroups
    are wound around several times and the sample spreads over the group.
    """
    if len(algebra) == 0:
        raise InvalidInputError("cannot sample from an empty algebra")
    scale = TWO_PI / min(_min_gap(e) for e in algebra.elements)
    return expm_skew(algebra.combine(scale * rng.standard_normal(len(algebra))))


def kinematic_flow(w, algebra: MatrixSubspaceBasis, starts: int, seed: int = 0,
                   config: AscentConfig | None = None) -> list[tuple[int, FlowResult]]:
    """Multi-start ascent; run ``k`` uses the ``k``-th spawned child of ``seed``.

    Returns ``(run_seed, FlowResult)`` pairs in run order.
    """
    if starts < 1:
        raise InvalidInputError("starts must be positive")
    out = []
    for child in np.random.SeedSequence(seed).spawn(starts):
        run_seed = int(child.generate_state(1)[0])
        rng = np.random.default_rng(child)
        u0 = random_group_element(algebra, rng)
        out.append((run_seed, riemannian_ascent(u0, w, algebra, config, rng)))
    return out


def certify_realizable(w, algebra: MatrixSubspaceBasis, starts: int = 32, seed: int = 0,
                       config: AscentConfig | None = None) -> TargetGate:
    """Numerical realizability verdict: some ascent inside ``exp(algebra)`` reaches J > 1 - 1e-6."""
    gate = w if isinstance(w, TargetGate) else TargetGate(w)
    if gate.certificate == "constructed":
        return gate
    best = 0.0
    for _, res in kinematic_flow(gate, algebra, starts, seed, config):
        best = max(best, res.final_J)
        if best > 1 - 1e-6:
            return gate.with_verdict(True, f"ascent reached J={best:.12f}")
    return gate.with_verdict(False, f"best of {starts} ascents J={best:.12f}")


# ---------------------------------------------------------------------------
# Class angle of a spin-j rotation
# ---------------------------------------------------------------------------

def _fold_su2(beta: float) -> float:
    b = beta % math.pi
    return math.pi - b if b > math.pi / 2 else b


def spin_class_angle(u, label: SpinLabel) -> tuple[float, float]:
    """Class angle ``beta`` in [0, pi/2] of a matrix in the spin-j image of SU(2).

    Such a matrix has eigenvalues ``exp(2 i m beta)``, m = -j..j.  Candidates
    for ``beta`` come from the eigenphases, and the one whose first ``N``
    power sums ``chi_j(r beta)`` best match ``tr(u^r)`` wins.  Returns
    ``(beta, mismatch)``; a mismatch far above rounding means ``u`` is not in
    the image.
    """
    u = as_square_matrix(u, "u")
    n = label.dim
    if u.shape != (n, n):
        raise InvalidInputError(f"expected {n}x{n} matrix for j={label}, got {u.shape}")
    if n == 1:
        return 0.0, float(abs(u[0, 0] - 1))
    ev = np.linalg.eigvals(u)
    powers = np.array([np.trace(np.linalg.matrix_power(u, r)) for r in range(1, n + 1)])
    two_j = label.two_j
    cands = [(math.atan2(z.imag, z.real) + TWO_PI * l) / two_j for z in ev for l in range(two_j)]
    r = np.arange(1, n + 1)
    best = (math.inf, 0.0)
    for b in cands:
        err = float(np.max(np.abs(powers - su2_character(label, r * b))))
        if err < best[0]:
            best = (err, b)
    return _fold_su2(best[1]), best[0]


def spin_target(label: SpinLabel, name: str) -> TargetGate:
    """Named spin targets: ``identity`` and ``flip`` (``diag(-1, 1, ..., 1)``)."""
    n = label.dim
    if name == "identity":
        return TargetGate(np.eye(n), True, "identity")
    if name == "flip":
        return TargetGate(np.diag([-1.0] + [1.0] * (n - 1)))
    raise InvalidInputError(f"unknown target {name!r}; expected 'identity' or 'flip'")


def spin_setup(label: SpinLabel):
    ops = build_spin_operators(label)
    return ops, spin_algebra(ops)
