"""Weyl characters of SU(2) and SU(3) irreps and the fidelity landscapes they induce.

For a realizable target the gate fidelity reduces to ``|chi(p)| / dim`` where
``p`` is a point on the maximal torus (eigenvalue angles of the SU(n)
preimage).  SU(2) points are a single angle ``beta`` (eigenvalues
``e^{+-i beta}``); SU(3) points are ``(theta1, theta2)`` with eigenvalues
``(e^{i theta1}, e^{i theta2}, e^{-i(theta1 + theta2)})``.

SU(3) irreps are labelled by strictly decreasing exponents ``r1 > r2 >= 1``
with an implicit trailing 0, so the character is the alternant ratio
``det[e_i^r1, e_i^r2, 1] / det[e_i^2, e_i, 1]``.  In partition language this is
the Schur polynomial of ``(r1 - 2, r2 - 1, 0)``.
"""
from __future__ import annotations

import csv
import io
import itertools
import json
import math
import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Union

import numpy as np

from .errors import InvalidInputError
from .representations import SpinLabel

__all__ = [
    "IrrepLabel",
    "LandscapeGrid",
    "SU3Label",
    "TorusPoint",
    "dimension",
    "fidelity_from_character",
    "format_label",
    "parse_label",
    "scan_landscape",
    "su2_character",
    "su2_character_derivatives",
    "su3_character",
    "su3_character_derivatives",
    "su3_symmetry_images",
    "su3_weights",
    "weyl_orthonormality",
]

TWO_PI = 2.0 * math.pi

# |sin beta| below this switches the SU(2) ratio to the weight sum.
SU2_SINGULAR_TOL = 1e-3
# |Vandermonde| below this switches the SU(3) ratio to the Schur polynomial.
SU3_SINGULAR_TOL = 1e-8


@dataclass(frozen=True, order=True)
class SU3Label:
    r1: int
    r2: int

    def __post_init__(self):
        if int(self.r1) != self.r1 or int(self.r2) != self.r2:
            raise InvalidInputError("SU(3) labels must be integers")
        if not self.r1 > self.r2 >= 1:
            raise InvalidInputError(f"SU(3) label needs r1 > r2 >= 1, got ({self.r1}, {self.r2})")
        object.__setattr__(self, "r1", int(self.r1))
        object.__setattr__(self, "r2", int(self.r2))

    @property
    def dim(self) -> int:
        return self.r1 * self.r2 * (self.r1 - self.r2) // 2

    def __str__(self):
        return f"({self.r1},{self.r2})"


IrrepLabel = Union[SpinLabel, SU3Label]


def dimension(label: IrrepLabel) -> int:
    return label.dim


def format_label(label: IrrepLabel) -> str:
    if isinstance(label, SpinLabel):
        return f"su2:j={label}"
    return f"su3:{label.r1},{label.r2}"


_SU2_RE = re.compile(r"^su2:(?:j=)?(?P<j>[0-9./]+)$")
_SU3_RE = re.compile(r"^su3:(?:r1=)?(?P<r1>\d+),(?:r2=)?(?P<r2>\d+)$")


def parse_label(text: str) -> IrrepLabel:
    """Parse ``su2:j=7/2``, ``su2:3``, ``su3:6,1`` or ``su3:r1=5,r2=2``."""
    s = text.strip().lower().replace(" ", "")
    if m := _SU2_RE.match(s):
        return SpinLabel.from_j(m["j"])
    if m := _SU3_RE.match(s):
        return SU3Label(int(m["r1"]), int(m["r2"]))
    raise InvalidInputError(f"unrecognized irrep label {text!r}; expected su2:j=J or su3:R1,R2")


@dataclass(frozen=True)
class TorusPoint:
    """Eigenvalue angles of a maximal-torus element, reduced to [0, 2 pi)."""

    angles: tuple

    def __post_init__(self):
        a = tuple(float(x) % TWO_PI for x in np.atleast_1d(self.angles))
        if len(a) not in (1, 2):
            raise InvalidInputError("torus points carry one (SU(2)) or two (SU(3)) angles")
        object.__setattr__(self, "angles", a)

    def eigenvalues(self) -> np.ndarray:
        if len(self.angles) == 1:
            b = self.angles[0]
            return np.array([np.exp(1j * b), np.exp(-1j * b)])
        t1, t2 = self.angles
        return np.array([np.exp(1j * t1), np.exp(1j * t2), np.exp(-1j * (t1 + t2))])


def _spin_of(label) -> SpinLabel:
    if not isinstance(label, SpinLabel):
        raise InvalidInputError(f"expected an SU(2) spin label, got {label!r}")
    return label


# ---------------------------------------------------------------------------
# SU(2)
# ---------------------------------------------------------------------------

def _su2_weight_sum(two_j: int, beta: np.ndarray) -> np.ndarray:
    # sum over m of e^{2 i m beta}; 2m runs over two_j, two_j - 2, ..., -two_j
    k = np.arange(two_j, -two_j - 1, -2)
    return np.cos(np.multiply.outer(beta, k)).sum(axis=-1)


def su2_character(label: SpinLabel, beta):
    """``chi_j(beta) = sin((2j+1) beta) / sin(beta)``, continuous at multiples of pi.

    Vectorized over ``beta``.  Near the zeros of ``sin(beta)`` the ratio is
    replaced by the equivalent finite sum ``sum_m cos(2 m beta)``.
    """
    label = _spin_of(label)
    b = np.asarray(beta, dtype=float)
    n = label.dim
    s = np.sin(b)
    regular = np.abs(s) >= SU2_SINGULAR_TOL
    out = np.empty(b.shape)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.sin(n * b) / s
    out[...] = np.where(regular, ratio, 0.0)
    if not np.all(regular):
        out[~regular] = _su2_weight_sum(label.two_j, b[~regular])
    return out if out.ndim else float(out)


def su2_character_derivatives(label: SpinLabel, beta):
    """``(chi, dchi/dbeta, d2chi/dbeta2)`` from the cosine expansion (smooth everywhere)."""
    label = _spin_of(label)
    b = np.asarray(beta, dtype=float)
    k = np.arange(label.two_j, -label.two_j - 1, -2).astype(float)
    arg = np.multiply.outer(b, k)
    c, s = np.cos(arg), np.sin(arg)
    return c.sum(-1), -(s * k).sum(-1), -(c * k * k).sum(-1)


# ---------------------------------------------------------------------------
# SU(3)
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _su3_weight_table(r1: int, r2: int):
    lam = (r1 - 2, r2 - 1, 0)
    total = sum(lam)
    mult: dict[tuple[int, int], int] = {}
    # Gelfand-Tsetlin patterns: lam interlaces (m1, m2) which interlaces (n,)
    for m1 in range(lam[1], lam[0] + 1):
        for m2 in range(lam[2], lam[1] + 1):
            for n in range(m2, m1 + 1):
                a, b, c = n, m1 + m2 - n, total - m1 - m2
                key = (a - c, b - c)
                mult[key] = mult.get(key, 0) + 1
    keys = sorted(mult)
    freqs = np.array(keys, dtype=float).reshape(-1, 2)
    counts = np.array([mult[k] for k in keys], dtype=float)
    freqs.setflags(write=False)
    counts.setflags(write=False)
    return freqs, counts


def su3_weights(label: SU3Label):
    """Torus frequencies ``(p, q)`` and multiplicities with ``chi = sum c e^{i(p t1 + q t2)}``."""
    return _su3_weight_table(label.r1, label.r2)


def _su3_polynomial(label: SU3Label, t1, t2):
    freqs, counts = su3_weights(label)
    phase = np.multiply.outer(t1, freqs[:, 0]) + np.multiply.outer(t2, freqs[:, 1])
    return (np.exp(1j * phase) * counts).sum(-1)


def _det3(c0, c1):
    """Determinant of the 3x3 matrix with columns c0, c1, ones (rows along axis 0)."""
    return (c0[0] * (c1[1] - c1[2]) - c0[1] * (c1[0] - c1[2]) + c0[2] * (c1[0] - c1[1]))


def _as_su3(label) -> SU3Label:
    if isinstance(label, SU3Label):
        return label
    raise InvalidInputError(f"expected an SU(3) label, got {label!r}")


def su3_character(label: SU3Label, theta1, theta2, singular_tol: float = SU3_SINGULAR_TOL):
    """Weyl character of the SU(3) irrep ``label`` at torus angles ``(theta1, theta2)``.

    Evaluated as the ratio of alternants; where the Vandermonde denominator is
    smaller than ``singular_tol`` the Schur polynomial (its analytic
    continuation) is used instead.  Vectorized; returns complex.
    """
    label = _as_su3(label)
    t1 = np.asarray(theta1, dtype=float)
    t2 = np.asarray(theta2, dtype=float)
    t1, t2 = np.broadcast_arrays(t1, t2)
    ang = np.stack([t1, t2, -(t1 + t2)])
    num = _det3(np.exp(1j * label.r1 * ang), np.exp(1j * label.r2 * ang))
    den = _det3(np.exp(2j * ang), np.exp(1j * ang))
    regular = np.abs(den) >= singular_tol
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(regular, num / np.where(regular, den, 1.0), 0.0 + 0.0j)
    if not np.all(regular):
        out[~regular] = _su3_polynomial(label, t1[~regular], t2[~regular])
    return out if out.ndim else complex(out)


def su3_character_derivatives(label: SU3Label, theta1, theta2, order: int = 2):
    """Character, gradient and Hessian from the weight expansion.

    Returns ``chi`` with shape ``S``, ``grad`` with shape ``S + (2,)`` and
    ``hess`` with shape ``S + (2, 2)``, all complex.  ``order`` 0 returns only
    ``chi``; ``order`` 1 returns ``(chi, grad)``.
    """
    label = _as_su3(label)
    freqs, counts = su3_weights(label)
    t1 = np.asarray(theta1, dtype=float)
    t2 = np.asarray(theta2, dtype=float)
    phase = np.multiply.outer(t1, freqs[:, 0]) + np.multiply.outer(t2, freqs[:, 1])
    terms = np.exp(1j * phase) * counts
    chi = terms.sum(-1)
    if order == 0:
        return chi
    grad = 1j * terms @ freqs
    if order == 1:
        return chi, grad
    outer = freqs[:, :, None] * freqs[:, None, :]
    hess = -np.tensordot(terms, outer, axes=([-1], [0]))
    return chi, grad, hess


def su3_symmetry_images(theta1, theta2, include_center: bool = True):
    """All images of a torus point under eigenvalue permutations (and center shifts).

    The permutation group S3 acts on the three eigenvalue angles; the center
    Z3 multiplies every eigenvalue by a cube root of unity, which leaves
    ``|chi|`` unchanged.  Returns an array of shape ``(k, 2)`` reduced mod 2 pi.
    """
    t3 = -(theta1 + theta2)
    shifts = (0.0, TWO_PI / 3, 2 * TWO_PI / 3) if include_center else (0.0,)
    out = []
    for a, b, _ in itertools.permutations((theta1, theta2, t3)):
        for s in shifts:
            out.append(((a + s) % TWO_PI, (b + s) % TWO_PI))
    return np.array(out)


# ---------------------------------------------------------------------------
# Fidelity and scans
# ---------------------------------------------------------------------------

def character(label: IrrepLabel, *angles):
    if isinstance(label, SpinLabel):
        if len(angles) != 1:
            raise InvalidInputError("SU(2) characters take one angle")
        return su2_character(label, angles[0])
    if len(angles) != 2:
        raise InvalidInputError("SU(3) characters take two angles")
    return su3_character(label, angles[0], angles[1])


def _unpack_angles(point):
    if isinstance(point, TorusPoint):
        return point.angles
    if isinstance(point, tuple):
        return point
    return (point,)


def fidelity_from_character(label: IrrepLabel, *point):
    """Canonical-form gate fidelity ``|chi(p)| / dim`` for a realizable target.

    ``point`` is a TorusPoint, or the angle(s) as scalars/arrays.
    """
    angles = _unpack_angles(point[0]) if len(point) == 1 else point
    return np.abs(character(label, *angles)) / label.dim


@dataclass
class LandscapeGrid:
    """Fidelity values sampled on a rectangular grid of angles.

    ``values[i, k]`` belongs to ``(axes[0][i], axes[1][k])``; 1-D grids have a
    single axis.
    """

    label: str
    axis_names: tuple
    axes: tuple = field(repr=False)
    values: np.ndarray = field(repr=False)
    metadata: dict = field(default_factory=dict)

    @property
    def resolution(self) -> int:
        return len(self.axes[0])

    def max(self) -> float:
        return float(np.max(self.values))

    def argmax(self) -> tuple:
        idx = np.unravel_index(int(np.argmax(self.values)), self.values.shape)
        return tuple(float(ax[i]) for ax, i in zip(self.axes, idx))

    def rows(self):
        mesh = np.meshgrid(*self.axes, indexing="ij")
        cols = [m.ravel() for m in mesh] + [self.values.ravel()]
        return np.column_stack(cols)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(list(self.axis_names) + ["J"])
        for row in self.rows():
            w.writerow([repr(float(x)) for x in row])
        return buf.getvalue()

    def to_json_dict(self) -> dict:
        return {
            "label": self.label,
            "axis_names": list(self.axis_names),
            "axes": [ax.tolist() for ax in self.axes],
            "shape": list(self.values.shape),
            "values": self.values.ravel().tolist(),
            "metadata": self.metadata,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)

    @classmethod
    def from_json_dict(cls, data: dict) -> "LandscapeGrid":
        axes = tuple(np.asarray(a, dtype=float) for a in data["axes"])
        values = np.asarray(data["values"], dtype=float).reshape(data["shape"])
        return cls(data["label"], tuple(data["axis_names"]), axes, values, dict(data.get("metadata", {})))


def scan_landscape(label: IrrepLabel, resolution: int) -> LandscapeGrid:
    """Sample the character landscape on its plotting domain.

    SU(2): ``resolution`` points on ``beta in [0, pi/2]`` (endpoints included;
    the rest of the circle repeats by reflection and the center).
    SU(3): ``resolution**2`` points on the periodic torus ``[0, 2 pi)^2``.
    """
    if int(resolution) != resolution or resolution < 16:
        raise InvalidInputError(f"resolution must be an integer >= 16, got {resolution!r}")
    resolution = int(resolution)
    meta = {"label": format_label(label), "resolution": resolution, "dim": label.dim}
    if isinstance(label, SpinLabel):
        beta = np.linspace(0.0, math.pi / 2, resolution)
        vals = fidelity_from_character(label, beta)
        meta["domain"] = [0.0, math.pi / 2]
        return LandscapeGrid(format_label(label), ("beta",), (beta,), vals, meta)
    t = np.linspace(0.0, TWO_PI, resolution, endpoint=False)
    t1, t2 = np.meshgrid(t, t, indexing="ij")
    vals = fidelity_from_character(label, t1, t2)
    meta["domain"] = [0.0, TWO_PI]
    return LandscapeGrid(format_label(label), ("theta1", "theta2"), (t, t), vals, meta)


def weyl_orthonormality(label: IrrepLabel, quadrature_points: int) -> float:
    """Weyl-integration-formula norm ``<chi, chi>``; equals 1 for an irreducible character.

    ``(1/|W|) * mean over the torus of |Delta|^2 |chi|^2`` on a uniform periodic
    grid, with ``Delta`` the Vandermonde of the eigenvalues and ``|W|`` the
    Weyl group order (2 for SU(2), 6 for SU(3)).  Uniform quadrature is exact
    for these trigonometric polynomials once the grid outresolves their degree.
    """
    if int(quadrature_points) != quadrature_points or quadrature_points < 256:
        raise InvalidInputError("quadrature_points must be an integer >= 256")
    m = int(quadrature_points)
    t = np.linspace(0.0, TWO_PI, m, endpoint=False)
    if isinstance(label, SpinLabel):
        delta2 = np.abs(np.exp(1j * t) - np.exp(-1j * t)) ** 2
        return float(np.mean(delta2 * su2_character(label, t) ** 2) / 2)
    t1, t2 = np.meshgrid(t, t, indexing="ij")
    e1, e2, e3 = np.exp(1j * t1), np.exp(1j * t2), np.exp(-1j * (t1 + t2))
    delta2 = np.abs((e1 - e2) * (e1 - e3) * (e2 - e3)) ** 2
    return float(np.mean(delta2 * np.abs(su3_character(label, t1, t2)) ** 2) / 6)
