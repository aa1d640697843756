"""Critical points, traps and basins of the character landscapes.

The fidelity ``J = |chi| / dim`` is not differentiable where ``chi = 0``.
Those zeros are recorded directly as minima with value 0; everywhere else
critical points are refined on the smooth squared modulus ``|chi|^2``.  The
reported Hessian eigenvalues are those of ``J^2`` (smooth everywhere), so
their signs classify maxima, minima and saddles uniformly.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import ndimage, optimize

from .characters import (
    TWO_PI,
    IrrepLabel,
    LandscapeGrid,
    SU3Label,
    TorusPoint,
    format_label,
    parse_label,
    su2_character_derivatives,
    su3_character_derivatives,
    su3_symmetry_images,
)
from .errors import InvalidInputError, RefinementError
from .representations import SpinLabel

__all__ = [
    "CriticalPoint",
    "CriticalReport",
    "RuggednessSummary",
    "ascend_su2",
    "ascend_torus",
    "critical_level_summary",
    "critical_points",
    "critical_points_su2",
    "critical_points_torus",
    "global_basin_su2",
    "ruggedness_compare",
]

log = logging.getLogger(__name__)

LOCAL_MAX = "local_max"
LOCAL_MIN = "local_min"
SADDLE = "saddle"

# Hessian eigenvalues below this fraction of the largest one mark a degenerate point.
DEGENERACY_RATIO = 1e-4
# Degenerate points are only located to roughly eps**(1/k) for a k-th order
# flat direction, so their copies are merged within this radius.
DEGENERATE_MERGE_RADIUS = 1e-3


@dataclass(frozen=True)
class CriticalPoint:
    location: TorusPoint
    value: float
    kind: str
    hessian_eigenvalues: tuple
    is_global: bool = False
    degenerate: bool = False

    def to_json_dict(self) -> dict:
        return {
            "location": list(self.location.angles),
            "value": self.value,
            "kind": self.kind,
            "hessian_eigenvalues": list(self.hessian_eigenvalues),
            "is_global": self.is_global,
            "degenerate": self.degenerate,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "CriticalPoint":
        return cls(TorusPoint(tuple(d["location"])), float(d["value"]), d["kind"],
                   tuple(float(x) for x in d["hessian_eigenvalues"]), bool(d["is_global"]),
                   bool(d.get("degenerate", False)))


@dataclass
class CriticalReport:
    label: IrrepLabel
    points: list
    suboptima_count: int
    global_basin: dict
    notes: dict = field(default_factory=dict)

    def of_kind(self, kind: str) -> list:
        return [p for p in self.points if p.kind == kind]

    @property
    def maxima(self) -> list:
        return self.of_kind(LOCAL_MAX)

    @property
    def minima(self) -> list:
        return self.of_kind(LOCAL_MIN)

    @property
    def saddles(self) -> list:
        return self.of_kind(SADDLE)

    @property
    def global_point(self) -> CriticalPoint:
        return next(p for p in self.points if p.is_global)

    def critical_values(self, kinds=(LOCAL_MAX, LOCAL_MIN, SADDLE), decimals: int = 9) -> list:
        vals = {round(p.value, decimals) for p in self.points if p.kind in kinds}
        return sorted(vals)

    def to_json_dict(self) -> dict:
        return {
            "label": format_label(self.label),
            "dim": self.label.dim,
            "suboptima_count": self.suboptima_count,
            "local_max_count": len(self.maxima),
            "local_min_count": len(self.minima),
            "saddle_count": len(self.saddles),
            "global_basin": self.global_basin,
            "points": [p.to_json_dict() for p in self.points],
            "notes": self.notes,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "CriticalReport":
        return cls(parse_label(d["label"]), [CriticalPoint.from_json_dict(p) for p in d["points"]],
                   int(d["suboptima_count"]), d["global_basin"], d.get("notes", {}))

    def to_table(self) -> str:
        lines = [f"critical points of {format_label(self.label)} (dim {self.label.dim}), "
                 f"{self.suboptima_count} suboptima"]
        lines.append(f"{'kind':<10} {'value':>12}  {'location':<32} hessian(J^2)")
        for p in self.points:
            loc = ", ".join(f"{a:.10f}" for a in p.location.angles)
            hes = ", ".join(f"{h:.4g}" for h in p.hessian_eigenvalues)
            tag = " *global*" if p.is_global else ""
            lines.append(f"{p.kind:<10} {p.value:>12.9f}  {loc:<32} [{hes}]{tag}")
        return "\n".join(lines)


def _finalize(label, points, basin, notes) -> CriticalReport:
    maxima = [p for p in points if p.kind == LOCAL_MAX]
    if maxima:
        top = max(maxima, key=lambda p: (p.value, -np.linalg.norm(p.location.angles)))
        points = [replace(p, is_global=p is top) for p in points]
        gval = top.value
        subopt = sum(1 for p in maxima if p.value < gval - 1e-9)
    else:
        subopt = 0
    order = {LOCAL_MAX: 0, SADDLE: 1, LOCAL_MIN: 2}
    points.sort(key=lambda p: (order[p.kind], -p.value, p.location.angles))
    return CriticalReport(label, points, subopt, basin, notes)


# ---------------------------------------------------------------------------
# SU(2): one class angle on [0, pi/2]
# ---------------------------------------------------------------------------

def _brent(f, a, b, tol):
    try:
        return optimize.brentq(f, a, b, xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=500)
    except (RuntimeError, ValueError) as exc:
        raise RefinementError(f"root refinement failed on [{a}, {b}]: {exc}", bracket=(a, b)) from exc


def _su2_zeros(label: SpinLabel, beta, chi, tol):
    """Zeros of chi on the grid interval, refined by Brent's method."""
    chi_f = lambda b: float(su2_character_derivatives(label, b)[0])
    roots = []
    for k in np.nonzero(chi[:-1] * chi[1:] < 0)[0]:
        roots.append(_brent(chi_f, beta[k], beta[k + 1], tol))
    roots.extend(float(beta[k]) for k in np.nonzero(chi == 0)[0])
    return sorted(roots)


def critical_points_su2(label: SpinLabel, refine_tol: float = 1e-10, resolution: int = 4096) -> CriticalReport:
    """Critical points of ``J(beta) = |sin((2j+1) beta) / ((2j+1) sin beta)|`` on [0, pi/2].

    Zeros of the character are minima of value 0.  Stationary points of the
    character with nonzero value are bracketed on a uniform grid and refined
    with Brent's method.  Both endpoints are stationary by the reflection
    symmetries of the domain and are classified from the second derivative.
    """
    if not isinstance(label, SpinLabel):
        raise InvalidInputError("critical_points_su2 needs an SU(2) label")
    if not 0 < refine_tol <= 1e-4:
        raise InvalidInputError("refine_tol must lie in (0, 1e-4]")
    if resolution < 4096:
        raise InvalidInputError("resolution must be at least 4096")
    n = label.dim
    half_pi = math.pi / 2
    xtol = refine_tol * 1e-2
    beta = np.linspace(0.0, half_pi, resolution)
    chi, d1, _ = su2_character_derivatives(label, beta)
    zero_tol = 1e-9 * n

    found: list[tuple[float, str]] = []

    def add(b, origin):
        if all(abs(b - c) > 10 * refine_tol for c, _ in found):
            found.append((b, origin))

    for b in (0.0, half_pi):
        add(b, "endpoint")
    for b in _su2_zeros(label, beta, chi, xtol):
        add(b, "zero")
    d1_f = lambda b: float(su2_character_derivatives(label, b)[1])
    for k in np.nonzero(d1[:-1] * d1[1:] < 0)[0]:
        if chi[k] * chi[k + 1] < 0:
            continue  # sign flip of J' caused by a zero, handled above
        add(_brent(d1_f, beta[k], beta[k + 1], xtol), "stationary")

    points = []
    for b, _origin in sorted(found):
        c, c1, c2 = (float(x) for x in su2_character_derivatives(label, b))
        if abs(c) < zero_tol:
            points.append(CriticalPoint(TorusPoint((b,)), abs(c) / n, LOCAL_MIN, (2 * c1 * c1 / n**2,)))
            continue
        h = 2 * c * c2 / n**2
        flat = abs(h) < 1e-12
        if flat:
            kind = _probe_kind_1d(label, b)
        else:
            kind = LOCAL_MAX if h < 0 else LOCAL_MIN
        points.append(CriticalPoint(TorusPoint((b,)), abs(c) / n, kind, (h,), degenerate=flat))

    zeros = sorted(p.location.angles[0] for p in points if p.kind == LOCAL_MIN and p.value < 1e-9)
    first_zero = zeros[0] if zeros else half_pi
    basin = {"kind": "interval", "interval": [0.0, first_zero]}
    notes = {"resolution": resolution, "refine_tol": refine_tol, "domain": [0.0, half_pi],
             "theorem_floor_j": label.floor_j}
    return _finalize(label, points, basin, notes)


def _probe_kind_1d(label, b, r=1e-4):
    c0 = abs(su2_character_derivatives(label, b)[0])
    lo, hi = (abs(su2_character_derivatives(label, b + s * r)[0]) for s in (-1, 1))
    if lo <= c0 and hi <= c0:
        return LOCAL_MAX
    if lo >= c0 and hi >= c0:
        return LOCAL_MIN
    return SADDLE


def global_basin_su2(label: SpinLabel, resolution: int = 4096, refine_tol: float = 1e-12) -> tuple:
    """Interval ``[0, beta_0]`` of class angles flowing to the identity.

    ``beta_0`` is the first zero of the character detected on the grid; the
    closed form is ``pi / (2j + 1)``.  A trap-free landscape returns the whole
    domain.
    """
    if not isinstance(label, SpinLabel):
        raise InvalidInputError("global_basin_su2 needs an SU(2) label")
    beta = np.linspace(0.0, math.pi / 2, resolution)
    chi = su2_character_derivatives(label, beta)[0]
    zeros = [z for z in _su2_zeros(label, beta, chi, refine_tol) if z > 0]
    if not zeros and label.dim > 1:
        # even dim: the first zero can sit exactly on the pi/2 endpoint
        zeros = [math.pi / 2]
    return (0.0, zeros[0] if zeros else math.pi / 2)


# ---------------------------------------------------------------------------
# Vectorized gradient ascent on |chi|^2
# ---------------------------------------------------------------------------

def _batch_ascent(fg, x0, step=0.05, gtol=1e-10, max_iter=20000, max_move=np.inf):
    """Monotone gradient ascent for many independent starts at once.

    One trial per point and iteration; accepted trials enlarge the step by
    1.5, rejected ones halve it (Armijo with c = 1e-4).  ``max_move`` caps the
    step length so an ascent cannot hop across a valley into another basin.
    """
    x = np.array(x0, dtype=float)
    f, g = fg(x)
    gn2 = np.sum(g * g, axis=1)
    eta = np.minimum(step, max_move / np.sqrt(np.maximum(gn2, 1e-300)))
    iters = np.zeros(len(x), dtype=int)
    active = gn2 > gtol**2
    for _ in range(max_iter):
        idx = np.nonzero(active)[0]
        if idx.size == 0:
            break
        trial = x[idx] + eta[idx, None] * g[idx]
        ft, gt = fg(trial)
        ok = ft >= f[idx] + 1e-4 * eta[idx] * gn2[idx]
        acc = idx[ok]
        x[acc], f[acc], g[acc] = trial[ok], ft[ok], gt[ok]
        gn2[acc] = np.sum(gt[ok] ** 2, axis=1)
        iters[acc] += 1
        eta[acc] = np.minimum(1.5 * eta[acc], max_move / np.sqrt(np.maximum(gn2[acc], 1e-300)))
        eta[idx[~ok]] *= 0.5
        active = (gn2 > gtol**2) & (eta > 1e-14)
    return x, f, gn2 <= gtol**2, iters


def _su2_fg(label):
    def fg(x):
        c, c1, _ = su2_character_derivatives(label, x[:, 0])
        return c * c, (2 * c * c1)[:, None]
    return fg


def _su3_fg(label):
    def fg(x):
        chi, grad = su3_character_derivatives(label, x[:, 0], x[:, 1], order=1)
        return np.abs(chi) ** 2, 2 * np.real(np.conj(chi)[:, None] * grad)
    return fg


def ascend_su2(label: SpinLabel, beta0, max_iter: int = 20000):
    """Gradient ascent of the class-angle landscape from each start in ``beta0``.

    Returns ``(beta_final, J_final, converged)`` arrays.
    """
    x0 = np.atleast_1d(np.asarray(beta0, dtype=float))[:, None]
    n = label.dim
    x, f, conv, _ = _batch_ascent(_su2_fg(label), x0, step=0.5 / n**2, gtol=1e-6 * n**2, max_iter=max_iter,
                                  max_move=math.pi / (4 * n))
    return x[:, 0], np.sqrt(f) / n, conv


def ascend_torus(label: SU3Label, starts, max_iter: int = 20000):
    """Gradient ascent on the SU(3) torus from ``starts`` of shape ``(k, 2)``."""
    n = label.dim
    x, f, conv, _ = _batch_ascent(_su3_fg(label), np.asarray(starts, dtype=float), step=0.5 / n**2,
                                  gtol=1e-6 * n**2, max_iter=max_iter, max_move=math.pi / (4 * n))
    return x % TWO_PI, np.sqrt(f) / n, conv


# ---------------------------------------------------------------------------
# SU(3): two angles on the periodic torus
# ---------------------------------------------------------------------------

def _torus_distance(a, b):
    d = np.abs(np.asarray(a) - np.asarray(b)) % TWO_PI
    d = np.minimum(d, TWO_PI - d)
    return np.sqrt(np.sum(d * d, axis=-1))


def _sign_change_cells(g):
    corners = np.stack([g, np.roll(g, -1, 0), np.roll(g, -1, 1), np.roll(np.roll(g, -1, 0), -1, 1)])
    return (corners.min(axis=0) <= 0) & (corners.max(axis=0) >= 0)


def _f_derivs(label, x):
    chi, grad, hess = su3_character_derivatives(label, x[:, 0], x[:, 1])
    gF = 2 * np.real(np.conj(chi)[:, None] * grad)
    hF = 2 * np.real(np.conj(grad)[:, :, None] * grad[:, None, :] + np.conj(chi)[:, None, None] * hess)
    return chi, grad, gF, hF


def _newton_torus(label, x0, tol, max_iter=200):
    """Batched Newton on ``grad |chi|^2 = 0`` with a pseudo-inverse Hessian.

    Degenerate critical points (a Hessian eigenvalue that vanishes at the
    point itself) still converge, linearly rather than quadratically, because
    the pseudo-inverse keeps stepping along the flat direction.  Near such
    points rounding noise eventually dominates the step, so the iterate with
    the smallest gradient is returned.
    """
    x = np.array(x0, dtype=float)
    n2 = float(label.dim) ** 2
    best = x.copy()
    best_g = np.full(len(x), np.inf)
    done = np.zeros(len(x), dtype=bool)
    for _ in range(max_iter):
        idx = np.nonzero(~done)[0]
        if not len(idx):
            break
        _, _, gF, hF = _f_derivs(label, x[idx])
        gn = np.linalg.norm(gF, axis=1)
        better = gn < best_g[idx]
        best[idx[better]] = x[idx[better]]
        best_g[idx[better]] = gn[better]
        w, v = np.linalg.eigh(hF)
        cut = 1e-13 * np.maximum(np.abs(w).max(axis=1, keepdims=True), 1e-300)
        winv = np.where(np.abs(w) > cut, 1.0 / np.where(w == 0, 1.0, w), 0.0)
        step = np.einsum("kij,kj,klj,kl->ki", v, winv, v, gF)
        # cap wild first steps; a critical point is never more than a few cells away
        nrm = np.linalg.norm(step, axis=1)
        big = nrm > 0.5
        step[big] *= (0.5 / nrm[big])[:, None]
        x[idx] -= step
        done[idx[(np.linalg.norm(step, axis=1) < tol) | (gn < 1e-14 * n2)]] = True
    _, _, gF, _ = _f_derivs(label, x)
    gn = np.linalg.norm(gF, axis=1)
    better = gn < best_g
    best[better] = x[better]
    best_g[better] = gn[better]
    return best % TWO_PI, best_g < 1e-9 * n2


def _polish_zero(label, x, iters=8):
    """Newton on ``(Re chi, Im chi) = 0``.

    Returns the polished point and whether the zero is isolated.  A rank
    deficient Jacobian means the zero lies on a nodal curve, as happens for
    self-conjugate labels whose character is real.
    """
    for _ in range(iters):
        chi, grad, _ = su3_character_derivatives(label, x[0], x[1])
        jac = np.array([[grad[0].real, grad[1].real], [grad[0].imag, grad[1].imag]])
        sv = np.linalg.svd(jac, compute_uv=False)
        if sv[-1] <= 1e-8 * max(sv[0], 1e-300):
            return x % TWO_PI, False
        dx = np.linalg.solve(jac, [chi.real, chi.imag])
        x = x - dx
        if np.linalg.norm(dx) < 1e-15:
            break
    return x % TWO_PI, True


def _canonical(images):
    """Lexicographically smallest image, with angles within 1e-9 of 0 or 2 pi snapped to 0."""
    imgs = np.asarray(images, dtype=float) % TWO_PI
    imgs[(imgs > TWO_PI - 1e-9) | (imgs < 1e-9)] = 0.0
    keyed = sorted(imgs.tolist(), key=lambda p: (round(p[0], 8), round(p[1], 8)))
    return keyed[0]


def critical_points_torus(label: SU3Label, resolution: int = 256, refine_tol: float = 1e-10,
                          deduplicate: bool = True, basin_samples: int = 32) -> CriticalReport:
    """Isolated critical points of ``J = |chi| / dim`` on the SU(3) torus.

    Grid cells where both components of ``grad |chi|^2`` change sign seed a
    Newton iteration.  Converged points are deduplicated modulo the
    eigenvalue permutations and the center (which fixes ``|chi|``), unless
    ``deduplicate`` is False, in which case only periodic copies merge.
    """
    if not isinstance(label, SU3Label):
        raise InvalidInputError("critical_points_torus needs an SU(3) label")
    if resolution < 128:
        raise InvalidInputError("resolution must be at least 128")
    if not 0 < refine_tol <= 1e-4:
        raise InvalidInputError("refine_tol must lie in (0, 1e-4]")
    n = label.dim
    notes = {"resolution": resolution, "refine_tol": refine_tol, "deduplicated": deduplicate,
             "symmetry": "S3 permutations x Z3 center" if deduplicate else "periodicity only"}
    if n == 1:
        pt = CriticalPoint(TorusPoint((0.0, 0.0)), 1.0, LOCAL_MAX, (0.0, 0.0))
        notes["constant_landscape"] = True
        return _finalize(label, [pt], {"kind": "area_fraction", "fraction": 1.0, "samples": 0}, notes)

    t = np.linspace(0.0, TWO_PI, resolution, endpoint=False)
    h = TWO_PI / resolution
    t1, t2 = np.meshgrid(t, t, indexing="ij")
    chi, grad = su3_character_derivatives(label, t1, t2, order=1)
    gF = 2 * np.real(np.conj(chi)[..., None] * grad)
    cells = _sign_change_cells(gF[..., 0]) & _sign_change_cells(gF[..., 1])
    ii, kk = np.nonzero(cells)
    seeds = np.column_stack([t[ii] + h / 2, t[kk] + h / 2])
    x, ok = _newton_torus(label, seeds, refine_tol)
    dropped = int(np.sum(~ok))
    if dropped:
        log.warning("%d Newton candidates dropped for %s", dropped, format_label(label))
    notes["candidates"] = int(len(seeds))
    notes["dropped_candidates"] = dropped

    zero_tol = 1e-6 * n
    points: list[CriticalPoint] = []
    reps: list[np.ndarray] = []
    nodal = 0
    for p in x[ok]:
        c = su3_character_derivatives(label, p[0], p[1], order=0)
        if abs(c) < zero_tol:
            p, isolated = _polish_zero(label, p)
            if not isolated:
                nodal += 1
                continue
        images = su3_symmetry_images(p[0], p[1], include_center=deduplicate) if deduplicate else p[None, :]
        cand = _classify_torus(label, p)

        def same(r, q):
            radius = DEGENERATE_MERGE_RADIUS if cand.degenerate or q.degenerate else 10 * refine_tol
            return np.min(_torus_distance(images, r)) < radius and abs(q.value - cand.value) < 1e-9

        if any(same(r, q) for r, q in zip(reps, points)):
            continue
        loc = np.array(_canonical(images)) if deduplicate else p
        reps.append(loc)
        points.append(replace(cand, location=TorusPoint((float(loc[0]), float(loc[1])))))

    # zeros on nodal curves are not isolated critical points; only their count is kept
    notes["nodal_zero_samples"] = nodal
    basin = _torus_basin(label, basin_samples)
    return _finalize(label, points, basin, notes)


def _classify_torus(label, p) -> CriticalPoint:
    n = label.dim
    chi, _, _, hF = _f_derivs(label, p[None, :])
    value = float(abs(chi[0])) / n
    eig = np.linalg.eigvalsh(hF[0]) / n**2
    loc = TorusPoint((float(p[0]), float(p[1])))
    cut = DEGENERACY_RATIO * float(np.max(np.abs(eig)))
    degenerate = bool(np.min(np.abs(eig)) <= cut)
    if value < 1e-9:
        kind = LOCAL_MIN  # zero of the character; |chi| has a cone there
    elif not degenerate:
        kind = LOCAL_MAX if eig[-1] < 0 else LOCAL_MIN if eig[0] > 0 else SADDLE
    else:
        kind = _probe_kind_2d(label, p)
    return CriticalPoint(loc, value, kind, tuple(float(e) for e in eig), degenerate=degenerate and value >= 1e-9)


def _probe_kind_2d(label, p, r=1e-2, m=720):
    ang = np.linspace(0, TWO_PI, m, endpoint=False)
    ring = p[None, :] + r * np.column_stack([np.cos(ang), np.sin(ang)])
    c0 = abs(su3_character_derivatives(label, p[0], p[1], order=0))
    cr = np.abs(su3_character_derivatives(label, ring[:, 0], ring[:, 1], order=0))
    if np.all(cr <= c0):
        return LOCAL_MAX
    if np.all(cr >= c0):
        return LOCAL_MIN
    return SADDLE


def _torus_basin(label, samples) -> dict:
    if samples <= 0:
        return {"kind": "area_fraction", "fraction": None, "samples": 0}
    t = (np.arange(samples) + 0.5) * TWO_PI / samples
    t1, t2 = np.meshgrid(t, t, indexing="ij")
    _, jf, _ = ascend_torus(label, np.column_stack([t1.ravel(), t2.ravel()]))
    frac = float(np.mean(jf > 1 - 1e-6))
    return {"kind": "area_fraction", "fraction": frac, "samples": int(samples * samples)}


def critical_points(label: IrrepLabel, resolution: int | None = None, refine_tol: float = 1e-10) -> CriticalReport:
    """Dispatch to the SU(2) or SU(3) critical point finder."""
    if isinstance(label, SpinLabel):
        return critical_points_su2(label, refine_tol, resolution or 4096)
    return critical_points_torus(label, resolution or 256, refine_tol)


# ---------------------------------------------------------------------------
# Comparisons
# ---------------------------------------------------------------------------

@dataclass
class RuggednessSummary:
    entries: list
    ordering: list
    config: dict

    def to_json_dict(self) -> dict:
        return {"entries": self.entries, "ordering": self.ordering, "config": self.config}


def ruggedness_compare(labels, starts: int = 1000, seed: int = 0, resolution: int = 256,
                       refine_tol: float = 1e-10) -> RuggednessSummary:
    """Compare landscapes of equal-dimensional irreps.

    For each label: number of distinct local maxima, fraction of uniform
    random starts whose ascent reaches the global maximum, and the smallest
    Hessian eigenvalue magnitude of ``J^2`` at the global peak.  ``ordering``
    lists labels by decreasing local-maxima count.
    """
    labels = list(labels)
    if not labels:
        raise InvalidInputError("ruggedness_compare needs at least one label")
    dims = {lab.dim for lab in labels}
    if len(dims) != 1:
        raise InvalidInputError(f"labels must share one dimension, got {sorted(dims)}")
    if starts < 1000:
        raise InvalidInputError("basin estimates need at least 1000 starts")
    rng = np.random.default_rng(seed)
    entries = []
    for lab in labels:
        if isinstance(lab, SpinLabel):
            rep = critical_points_su2(lab, refine_tol)
            x0 = rng.uniform(0.0, math.pi / 2, starts)
            _, jf, _ = ascend_su2(lab, x0)
        else:
            rep = critical_points_torus(lab, resolution, refine_tol, basin_samples=0)
            x0 = rng.uniform(0.0, TWO_PI, (starts, 2))
            _, jf, _ = ascend_torus(lab, x0)
        top = rep.global_point
        entries.append({
            "label": format_label(lab),
            "dim": lab.dim,
            "local_max_count": len(rep.maxima),
            "suboptima_count": rep.suboptima_count,
            "saddle_count": len(rep.saddles),
            "local_min_count": len(rep.minima),
            "global_basin_fraction": float(np.mean(jf > 1 - 1e-6)),
            "global_peak_sharpness": float(np.min(np.abs(top.hessian_eigenvalues))),
        })
    ordering = [e["label"] for e in sorted(entries, key=lambda e: -e["local_max_count"])]
    cfg = {"starts": starts, "seed": seed, "resolution": resolution, "refine_tol": refine_tol}
    return RuggednessSummary(entries, ordering, cfg)


def _periodic_labels(mask: np.ndarray) -> tuple[np.ndarray, int]:
    """Connected components of ``mask`` on a periodic grid (4-neighbour)."""
    lab, count = ndimage.label(mask)
    if count == 0:
        return lab, 0
    parent = list(range(count + 1))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a, b in ((lab[0, :], lab[-1, :]), (lab[:, 0], lab[:, -1])):
        for u, v in zip(a, b):
            if u and v:
                parent[find(u)] = find(v)
    roots = sorted({find(k) for k in range(1, count + 1)})
    relabel = np.zeros(count + 1, dtype=int)
    for k in range(1, count + 1):
        relabel[k] = roots.index(find(k)) + 1
    return relabel[lab], len(roots)


def critical_level_summary(grid: LandscapeGrid, report: CriticalReport, gradient_ratio: float | None = None,
                           band: float = 2e-3, zero_floor: float = 1e-2) -> dict:
    """Critical structure of a periodic 2-D scan whose critical values are known.

    The critical set is approximated by grid points where the periodic
    central-difference gradient is below ``gradient_ratio`` times its maximum.
    The default ratio is ``10.24 / resolution`` (0.02 at 512), which keeps the
    mask a fixed number of cells wide across resolutions.
    Its connected components are matched to the nearest critical value of
    ``report`` (within ``band``).  Both the number of distinct critical values
    and the number of components are returned, since a count of "critical
    submanifolds" may mean either.  Zeros of a modulus landscape are kinks,
    not smooth critical points; values below ``zero_floor`` are left out.
    """
    v = np.asarray(grid.values, dtype=float)
    if v.ndim != 2:
        raise InvalidInputError("critical_level_summary needs a 2-D grid")
    if gradient_ratio is None:
        gradient_ratio = min(0.1, 10.24 / min(v.shape))
    gx = (np.roll(v, -1, 0) - np.roll(v, 1, 0)) / 2
    gy = (np.roll(v, -1, 1) - np.roll(v, 1, 1)) / 2
    gn = np.hypot(gx, gy)
    # central differences vanish across the |chi| kink too, so near-zero values are excluded
    lab, count = _periodic_labels((gn < gradient_ratio * gn.max()) & (v > zero_floor))
    ref = np.asarray(report.critical_values())
    per_value: dict = {}
    unmatched = 0
    for k in range(1, count + 1):
        # the extreme value inside the component is closest to the critical level
        vals = v[lab == k]
        level = vals.max() if abs(vals.max() - np.median(vals)) < abs(vals.min() - np.median(vals)) else vals.min()
        near = int(np.argmin(np.abs(ref - level))) if ref.size else -1
        if near >= 0 and abs(ref[near] - level) <= band:
            key = f"{ref[near]:.9f}"
            per_value[key] = per_value.get(key, 0) + 1
        else:
            unmatched += 1
    top = float(ref.max()) if ref.size else 0.0
    return {"distinct_critical_values": int(ref.size),
            "distinct_nonzero_critical_values": int(np.sum(ref > 1e-9)),
            "components_per_value": dict(sorted(per_value.items())),
            "matched_components": int(sum(per_value.values())),
            "suboptimal_components": int(sum(c for k, c in per_value.items() if float(k) < top - 1e-9)),
            "unmatched_components": unmatched,
            "gradient_ratio": gradient_ratio, "band": band, "zero_floor": zero_floor}
