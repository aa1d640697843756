"""Piecewise-constant control dynamics and exact-gradient pulse optimization.

A field holds ``m`` control channels over ``P`` steps of length ``dt``.  Step
``p`` evolves with ``exp(-i dt H_p)``, ``H_p = H0 + sum_k eps[k, p] H_k``, so the
propagator is exact for the discretized field.  Gradients of the gate
fidelity use the divided-difference form of the derivative of each step
exponential in the eigenbasis of ``H_p``.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidInputError, NonSmoothPointError
from .kinematics import KINK_TOL, TargetGate
from .linalg import is_unitary, nearest_unitary
from .representations import ControlSystem, matrix_from_json, matrix_to_json

__all__ = [
    "ControlField",
    "GrapeConfig",
    "GrapeOutcome",
    "Problem",
    "PropagationResult",
    "TrapSummary",
    "default_final_time",
    "fidelity_and_gradient",
    "load_problem",
    "propagate",
    "run_grape",
    "trap_statistics",
]

UNITARITY_TOL = 1e-9


@dataclass(frozen=True)
class ControlField:
    amplitudes: np.ndarray = field(repr=False)
    dt: float
    bound: float | None = None

    def __post_init__(self):
        a = np.array(self.amplitudes, dtype=float)
        if a.ndim == 1:
            a = a[None, :]
        if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
            raise InvalidInputError(f"amplitudes must be an m x P array with m, P >= 1, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise InvalidInputError("amplitudes must be finite")
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise InvalidInputError(f"dt must be positive, got {self.dt}")
        if self.bound is not None and np.max(np.abs(a)) > self.bound * (1 + 1e-12):
            raise InvalidInputError(f"amplitudes exceed the bound {self.bound}")
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)
        object.__setattr__(self, "dt", float(self.dt))

    @property
    def channels(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def steps(self) -> int:
        return self.amplitudes.shape[1]

    @property
    def final_time(self) -> float:
        return self.steps * self.dt


@dataclass
class PropagationResult:
    final_propagator: np.ndarray = field(repr=False)
    intermediate_propagators: np.ndarray | None = field(default=None, repr=False)


@dataclass
class _Steps:
    """Eigen-decomposed step Hamiltonians and their exponentials."""

    lam: np.ndarray  # (P, N)
    vec: np.ndarray  # (P, N, N)
    unitaries: np.ndarray  # (P, N, N)


def _check(sys: ControlSystem, fld: ControlField):
    if fld.channels != sys.n_controls:
        raise InvalidInputError(f"field has {fld.channels} channels, system has {sys.n_controls} controls")


def _steps(sys: ControlSystem, fld: ControlField) -> _Steps:
    ctrl = np.stack(sys.controls)
    h = sys.h0[None] + np.tensordot(fld.amplitudes.T, ctrl, axes=1)
    lam, vec = np.linalg.eigh(h)
    u = (vec * np.exp(-1j * fld.dt * lam)[:, None, :]) @ np.conj(np.swapaxes(vec, 1, 2))
    return _Steps(lam, vec, u)


def _forward(unitaries: np.ndarray) -> np.ndarray:
    """``F[p] = U_p ... U_1`` with ``F[0] = I``; shape (P+1, N, N)."""
    p, n, _ = unitaries.shape
    out = np.empty((p + 1, n, n), dtype=complex)
    out[0] = np.eye(n)
    for k in range(p):
        nxt = unitaries[k] @ out[k]
        if (k + 1) % 256 == 0 and not is_unitary(nxt, UNITARITY_TOL):
            nxt = nearest_unitary(nxt)
        out[k + 1] = nxt
    if not is_unitary(out[-1], UNITARITY_TOL):
        out[-1] = nearest_unitary(out[-1])
    return out


def propagate(sys: ControlSystem, fld: ControlField, keep_intermediate: bool = False) -> PropagationResult:
    """``U(t_f) = U_P ... U_1`` with exact per-step exponentials."""
    _check(sys, fld)
    fwd = _forward(_steps(sys, fld).unitaries)
    return PropagationResult(fwd[-1], fwd[1:] if keep_intermediate else None)


def _target(w) -> np.ndarray:
    return w.w if isinstance(w, TargetGate) else TargetGate(w).w


def fidelity_and_gradient(sys: ControlSystem, fld: ControlField, w) -> tuple[float, np.ndarray]:
    """``J = |tr(W^dag U(t_f))| / N`` and the exact ``dJ / d eps[k, p]``."""
    _check(sys, fld)
    wm = _target(w)
    if wm.shape != sys.h0.shape:
        raise InvalidInputError(f"target has shape {wm.shape}, system is {sys.dim}-dimensional")
    n = sys.dim
    st = _steps(sys, fld)
    fwd = _forward(st.unitaries)
    t = np.vdot(wm, fwd[-1])
    if abs(t) < KINK_TOL:
        raise NonSmoothPointError(f"|tr(W^dag U)| = {abs(t):.3g}; J is not differentiable here")
    # backward products B[p] = W^dag U_P ... U_{p+1}
    P = fld.steps
    bwd = np.empty_like(fwd[1:])
    acc = wm.conj().T
    for p in range(P - 1, -1, -1):
        bwd[p] = acc
        acc = acc @ st.unitaries[p]
    m = fwd[:-1] @ bwd  # M_p with tr(M_p dU_p) = dt
    vdag = np.conj(np.swapaxes(st.vec, 1, 2))
    mt = vdag @ m @ st.vec
    d = st.lam[:, :, None] - st.lam[:, None, :]
    s = st.lam[:, :, None] + st.lam[:, None, :]
    dt = fld.dt
    # divided differences of exp(-i dt x); np.sinc(x) = sin(pi x) / (pi x)
    lmat = -1j * dt * np.exp(-0.5j * dt * s) * np.sinc(dt * d / (2 * math.pi))
    ctrl = np.stack(sys.controls)
    k = vdag[None] @ ctrl[:, None] @ st.vec[None]  # controls in each step eigenbasis
    dtr = (k * (np.swapaxes(mt, 1, 2) * lmat)[None]).sum(axis=(2, 3))
    grad = (np.conj(t) / abs(t) * dtr).real / n
    return float(abs(t)) / n, grad


# ---------------------------------------------------------------------------
# GRAPE
# ---------------------------------------------------------------------------

def default_final_time(sys: ControlSystem) -> float:
    """``10 pi N / |H0|_F``, or ``10 pi N`` for a vanishing drift."""
    nrm = float(np.linalg.norm(sys.h0))
    return 10 * math.pi * sys.dim / (nrm if nrm > 0 else 1.0)


@dataclass(frozen=True)
class GrapeConfig:
    starts: int = 50
    steps: int = 64
    t_f: float | None = None
    dt: float | None = None
    init_amplitude: float = 1.0
    bound: float | None = None
    max_iter: int = 3000
    gtol: float = 1e-7
    armijo: float = 1e-4
    initial_step: float = 1.0
    seed: int = 0
    trajectory_samples: int = 16

    def __post_init__(self):
        if self.starts < 1 or self.steps < 1 or self.max_iter < 0:
            raise InvalidInputError("starts and steps must be positive, max_iter non-negative")
        if self.t_f is not None and self.dt is not None and not math.isclose(self.t_f, self.dt * self.steps):
            raise InvalidInputError("t_f and dt are inconsistent with the number of steps")
        for name in ("t_f", "dt", "bound"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise InvalidInputError(f"{name} must be positive")
        if not self.init_amplitude >= 0 or not self.gtol > 0:
            raise InvalidInputError("init_amplitude must be non-negative and gtol positive")

    def resolved_dt(self, sys: ControlSystem) -> float:
        if self.dt is not None:
            return float(self.dt)
        tf = self.t_f if self.t_f is not None else default_final_time(sys)
        return float(tf) / self.steps

    def to_json_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json_dict(cls, d: dict) -> "GrapeConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known - {"bounds"}
        if unknown:
            raise InvalidInputError(f"unknown experiment fields: {sorted(unknown)}")
        d = dict(d)
        if "bounds" in d:
            d["bound"] = d.pop("bounds")
        try:
            return cls(**d)
        except TypeError as exc:
            raise InvalidInputError(str(exc)) from None


@dataclass
class GrapeOutcome:
    run: int
    seed: int
    final_J: float
    gradient_norm: float
    iterations: int
    converged: bool
    trajectory_summary: list
    amplitudes: np.ndarray | None = field(default=None, repr=False)

    def to_json_dict(self) -> dict:
        return {"run": self.run, "seed": self.seed, "final_J": self.final_J,
                "gradient_norm": self.gradient_norm, "iterations": self.iterations,
                "converged": self.converged, "trajectory_summary": list(self.trajectory_summary)}

    @classmethod
    def from_json_dict(cls, d: dict) -> "GrapeOutcome":
        return cls(int(d["run"]), int(d["seed"]), float(d["final_J"]), float(d["gradient_norm"]),
                   int(d["iterations"]), bool(d["converged"]), [float(x) for x in d["trajectory_summary"]])


def _sample(traj: list, k: int) -> list:
    if len(traj) <= k:
        return [float(x) for x in traj]
    idx = np.unique(np.linspace(0, len(traj) - 1, k).round().astype(int))
    return [float(traj[i]) for i in idx]


def _ascend(sys, wm, amps, dt, cfg: GrapeConfig):
    clip = (lambda a: np.clip(a, -cfg.bound, cfg.bound)) if cfg.bound is not None else (lambda a: a)
    jv, g = fidelity_and_gradient(sys, ControlField(amps, dt), wm)
    traj = [jv]
    eta = cfg.initial_step
    it = 0
    gn = float(np.linalg.norm(g))
    while gn >= cfg.gtol and it < cfg.max_iter:
        trial = clip(amps + eta * g)
        step = trial - amps
        try:
            jt, gt = fidelity_and_gradient(sys, ControlField(trial, dt), wm)
        except NonSmoothPointError:
            jt = -math.inf
        if jt >= jv + cfg.armijo * float(np.vdot(g, step)) and jt > jv:
            amps, jv, g = trial, jt, gt
            gn = float(np.linalg.norm(g))
            traj.append(jv)
            it += 1
            eta *= 1.5
        else:
            eta *= 0.5
            if eta * gn < 1e-16:
                break
    return amps, jv, gn, it, traj


def run_grape(sys: ControlSystem, w, config: GrapeConfig | None = None) -> list[GrapeOutcome]:
    """Multi-start gradient ascent of the gate fidelity over control amplitudes.

    Run ``r`` draws its initial amplitudes uniformly from
    ``[-init_amplitude, init_amplitude]`` with a generator seeded by the
    ``r``-th child of ``config.seed``; results are in run order.
    """
    cfg = config or GrapeConfig()
    wm = _target(w)
    if wm.shape != sys.h0.shape:
        raise InvalidInputError(f"target has shape {wm.shape}, system is {sys.dim}-dimensional")
    dt = cfg.resolved_dt(sys)
    lim = cfg.init_amplitude if cfg.bound is None else min(cfg.init_amplitude, cfg.bound)
    out = []
    for run, child in enumerate(np.random.SeedSequence(cfg.seed).spawn(cfg.starts)):
        rng = np.random.default_rng(child)
        amps = rng.uniform(-lim, lim, (sys.n_controls, cfg.steps))
        try:
            amps, jv, gn, it, traj = _ascend(sys, wm, amps, dt, cfg)
        except NonSmoothPointError:
            amps = amps + 1e-6 * rng.standard_normal(amps.shape)
            amps, jv, gn, it, traj = _ascend(sys, wm, amps, dt, cfg)
        out.append(GrapeOutcome(run, int(child.generate_state(1)[0]), jv, gn, it, bool(gn < cfg.gtol),
                                _sample(traj, cfg.trajectory_samples), amps))
    return out


@dataclass
class TrapSummary:
    reference_values: list
    counts: list
    unassigned: int
    total: int
    band: float
    global_value: float

    @property
    def unassigned_fraction(self) -> float:
        return self.unassigned / self.total

    @property
    def trapped_fraction(self) -> float:
        trapped = sum(c for v, c in zip(self.reference_values, self.counts) if v < self.global_value - 1e-12)
        return trapped / self.total

    def to_json_dict(self) -> dict:
        return {"reference_values": self.reference_values, "counts": self.counts,
                "unassigned": self.unassigned, "total": self.total, "band": self.band,
                "global_value": self.global_value, "trapped_fraction": self.trapped_fraction,
                "unassigned_fraction": self.unassigned_fraction}


def trap_statistics(outcomes, reference_values, band: float = 2e-3) -> TrapSummary:
    """Assign each final J to the nearest reference value within ``band``.

    ``outcomes`` may be GrapeOutcome objects or plain numbers.  The largest
    reference value is the global one; anything assigned below it is trapped.
    """
    vals = [o.final_J if isinstance(o, GrapeOutcome) else float(o) for o in outcomes]
    if not vals:
        raise InvalidInputError("trap_statistics needs at least one outcome")
    ref = [float(r) for r in reference_values]
    if not ref:
        raise InvalidInputError("reference_values must not be empty")
    if any(b < a for a, b in zip(ref, ref[1:])):
        raise InvalidInputError("reference_values must be sorted ascending")
    r = np.asarray(ref)
    counts = [0] * len(ref)
    unassigned = 0
    for v in vals:
        k = int(np.argmin(np.abs(r - v)))
        if abs(r[k] - v) <= band:
            counts[k] += 1
        else:
            unassigned += 1
    return TrapSummary(ref, counts, unassigned, len(vals), band, ref[-1])


# ---------------------------------------------------------------------------
# Problem files
# ---------------------------------------------------------------------------

@dataclass
class Problem:
    system: ControlSystem
    target: TargetGate | None
    experiment: GrapeConfig

    def to_json_dict(self) -> dict:
        d = self.system.to_json_dict()
        if self.target is not None:
            d["target"] = matrix_to_json(self.target.w)
        d["experiment"] = self.experiment.to_json_dict()
        return d


def load_problem(path) -> Problem:
    """Read a problem JSON file: ``dim``, ``h0``, ``controls``, optional ``target`` and ``experiment``."""
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise InvalidInputError(f"cannot read problem file {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"problem file {path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise InvalidInputError("problem file must hold a JSON object")
    sys = ControlSystem.from_json_dict(data)
    target = TargetGate(matrix_from_json(data["target"])) if "target" in data else None
    if target is not None and target.dim != sys.dim:
        raise InvalidInputError(f"target is {target.dim}-dimensional, system is {sys.dim}-dimensional")
    exp = GrapeConfig.from_json_dict(data.get("experiment", {}))
    return Problem(sys, target, exp)
