from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qlandscape.characters import su2_character
from qlandscape.errors import ClosureError, InvalidInputError
from qlandscape.linalg import expm
from qlandscape.representations import (
    ControlSystem,
    SpinLabel,
    build_spin_operators,
    clebsch_gordan_labels,
    lie_closure,
    spin_control_system,
)

from conftest import random_unitary


def closure_dim_bruteforce(gens):
    """Independent oracle: bracket everything with everything until the SVD rank stops growing."""
    mats = list(gens)

    def rank(ms):
        flat = np.array([np.concatenate([m.real.ravel(), m.imag.ravel()]) for m in ms])
        return int(np.sum(np.linalg.svd(flat, compute_uv=False) > 1e-8))

    r = rank(mats)
    while True:
        new = mats + [a @ b - b @ a for a in mats for b in mats]
        flat = np.array([np.concatenate([m.real.ravel(), m.imag.ravel()]) for m in new])
        _, s, vt = np.linalg.svd(flat, full_matrices=False)
        k = int(np.sum(s > 1e-8))
        n = mats[0].shape[0]
        mats = [(v[: n * n] + 1j * v[n * n:]).reshape(n, n) for v in vt[:k]]
        if k == r:
            return k
        r = k


def test_spin_half_operators():
    ops = build_spin_operators(SpinLabel(1))
    assert np.allclose(ops.jz, np.diag([0.5, -0.5]))
    assert np.allclose(ops.jx, [[0, 0.5], [0.5, 0]])


def test_spin_three_dimension():
    ops = build_spin_operators(SpinLabel(6))
    assert ops.jx.shape == ops.jy.shape == ops.jz.shape == (7, 7)


def test_spin_seven_halves_casimir():
    ops = build_spin_operators(SpinLabel(7))
    cas = ops.jx @ ops.jx + ops.jy @ ops.jy + ops.jz @ ops.jz
    assert np.max(np.abs(cas - 63 / 4 * np.eye(8))) < 1e-10


@pytest.mark.parametrize("two_j", range(0, 31))
def test_spin_operator_invariants(two_j):
    ops = build_spin_operators(SpinLabel(two_j))
    j = two_j / 2
    assert np.allclose(np.diag(ops.jz).real, j - np.arange(two_j + 1))
    assert np.allclose(ops.jz, np.diag(np.diag(ops.jz)))
    comm = lambda a, b: a @ b - b @ a
    assert np.max(np.abs(comm(ops.jx, ops.jy) - 1j * ops.jz)) < 1e-10
    assert np.max(np.abs(comm(ops.jy, ops.jz) - 1j * ops.jx)) < 1e-10
    assert np.max(np.abs(comm(ops.jz, ops.jx) - 1j * ops.jy)) < 1e-10
    cas = ops.jx @ ops.jx + ops.jy @ ops.jy + ops.jz @ ops.jz
    assert np.max(np.abs(cas - j * (j + 1) * np.eye(two_j + 1))) < 1e-10


@pytest.mark.parametrize("text,two_j", [("7/2", 7), ("3.5", 7), ("3", 6), ("0", 0), (" 1/2 ", 1)])
def test_spin_label_parsing(text, two_j):
    assert SpinLabel.from_j(text).two_j == two_j


@pytest.mark.parametrize("bad", ["1/3", "abc", "-1"])
def test_spin_label_rejects(bad):
    with pytest.raises(InvalidInputError):
        SpinLabel.from_j(bad)


def test_spin_label_floor():
    assert SpinLabel(7).floor_j == 3 and SpinLabel(6).floor_j == 3 and SpinLabel(1).floor_j == 0


def test_closure_spin_half_xz():
    ops = build_spin_operators(SpinLabel(1))
    gens = [1j * ops.jx, 1j * ops.jz]
    assert lie_closure(gens).dim == 3 == closure_dim_bruteforce(gens)


def test_closure_spin_three_is_three_dimensional():
    ops = build_spin_operators(SpinLabel(6))
    rep = lie_closure(ops.generators())
    assert rep.dim == 3 == closure_dim_bruteforce(ops.generators())
    assert not rep.controllable


def test_closure_jz2_jx_pair_is_parity_confined():
    # both generators commute with exp(i pi jx), so the closure lives in its commutant u(2) + u(1)
    ops = build_spin_operators(SpinLabel(2))
    gens = [1j * ops.jz @ ops.jz, 1j * ops.jx]
    rep = lie_closure(gens)
    parity = expm(1j * np.pi * ops.jx)
    for e in rep.basis:
        assert np.max(np.abs(e @ parity - parity @ e)) < 1e-10
    assert rep.dim == closure_dim_bruteforce(gens) == 4
    assert not rep.controllable


def test_closure_spin_one_system_with_quadratic_drift_controllable():
    sys = spin_control_system(SpinLabel(2), quadratic_drift=1.0)
    rep = lie_closure(sys.generators())
    assert rep.dim >= 8 and rep.controllable
    assert rep.dim == closure_dim_bruteforce(sys.generators())


def test_closure_rejects_non_skew():
    with pytest.raises(InvalidInputError):
        lie_closure([np.eye(2)])
    with pytest.raises(InvalidInputError):
        lie_closure([])


def test_closure_round_cap_raises_with_partial_basis():
    ops = build_spin_operators(SpinLabel(4))
    with pytest.raises(ClosureError) as info:
        lie_closure([1j * ops.jz @ ops.jz, 1j * ops.jx], max_rounds=1)
    assert len(info.value.partial_basis) >= 2


@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_closure_monotone_and_conjugation_invariant(two_j, seed):
    rng = np.random.default_rng(seed)
    ops = build_spin_operators(SpinLabel(two_j))
    base = [1j * ops.jx, 1j * ops.jz]
    extra = 1j * ops.jz @ ops.jz
    d0 = lie_closure(base).dim
    assert lie_closure(base + [extra]).dim >= d0
    v = random_unitary(rng, two_j + 1)
    conj = [v @ g @ v.conj().T for g in base + [extra]]
    assert lie_closure(conj).dim == lie_closure(base + [extra]).dim


def test_clebsch_gordan_examples():
    half, one = SpinLabel(1), SpinLabel(2)
    assert [l.two_j for l in clebsch_gordan_labels(half, half)] == [0, 2]
    assert [l.two_j for l in clebsch_gordan_labels(one, half)] == [1, 3]


@pytest.mark.parametrize("a", range(0, 16))
def test_clebsch_gordan_dimension_identity(a):
    for b in range(0, 16):
        labels = clebsch_gordan_labels(SpinLabel(a), SpinLabel(b))
        assert sum(l.dim for l in labels) == (a + 1) * (b + 1)


def test_clebsch_gordan_character_identity(rng):
    j1, j2 = SpinLabel(3), SpinLabel(4)
    beta = rng.uniform(0, 2 * np.pi, 100)
    lhs = su2_character(j1, beta) * su2_character(j2, beta)
    rhs = sum(su2_character(l, beta) for l in clebsch_gordan_labels(j1, j2))
    assert np.max(np.abs(lhs - rhs)) < 1e-9


def test_control_system_validation():
    ops = build_spin_operators(SpinLabel(1))
    with pytest.raises(InvalidInputError):
        ControlSystem(ops.jz, ())
    with pytest.raises(InvalidInputError):
        ControlSystem(ops.jz, (1j * ops.jx,))
    with pytest.raises(InvalidInputError):
        ControlSystem(ops.jz, (np.eye(3),))


def test_control_system_json_round_trip():
    sys = spin_control_system(SpinLabel(3), quadratic_drift=0.7)
    back = ControlSystem.from_json_dict(sys.to_json_dict())
    assert np.array_equal(back.h0, sys.h0)
    assert all(np.array_equal(a, b) for a, b in zip(back.controls, sys.controls))


def test_control_system_declared_dim_mismatch():
    d = spin_control_system(SpinLabel(1)).to_json_dict()
    d["dim"] = 5
    with pytest.raises(InvalidInputError):
        ControlSystem.from_json_dict(d)


def test_half_integer_labels_are_exact():
    assert SpinLabel.from_j(Fraction(7, 2)).two_j == 7
