"""Acceptance criteria, each at its stated tolerance and time budget.

Run alone with ``pytest tests/test_acceptance.py -v``; the terminal summary
prints one PASS/FAIL line per criterion.
"""
import json
import math
import time
from pathlib import Path

import numpy as np
import pytest

from qlandscape.characters import SU3Label, su2_character, su3_character, weyl_orthonormality
from qlandscape.cli import main
from qlandscape.dynamics import (
    ControlField,
    GrapeConfig,
    fidelity_and_gradient,
    load_problem,
    run_grape,
    trap_statistics,
)
from qlandscape.figures import figure1
from qlandscape.kinematics import (
    TargetGate,
    fidelity,
    gate_gradient_generator,
    kinematic_flow,
    reduced_scan,
    spin_setup,
    spin_target,
)
from qlandscape.linalg import expm, hs_inner
from qlandscape.representations import ControlSystem, SpinLabel, build_spin_operators, lie_closure, spin_control_system
from qlandscape.topology import critical_points_su2, global_basin_su2, ruggedness_compare

from conftest import random_hermitian, random_skew, random_unitary

PROBLEMS = Path(__file__).resolve().parent.parent / "problems"
SPINS = range(1, 21)  # two_j: j = 1/2, 1, ..., 10


def test_criterion_1_floor_j_suboptima_via_cli(capsys):
    start = time.perf_counter()
    for two_j in SPINS:
        j = str(SpinLabel(two_j))
        assert main(["critical", "--label", f"su2:j={j}"]) == 0
        assert json.loads(capsys.readouterr().out)["suboptima_count"] == two_j // 2
    assert time.perf_counter() - start < 10


def test_criterion_2_d3_and_d72_curves(tmp_path):
    start = time.perf_counter()
    summary = figure1(tmp_path)["summary"]
    for panel in summary["panels"]:
        assert panel["local_max_count"] == 4
        assert panel["max_local_min_value"] < 1e-9
        assert panel["saddle_count"] == 0
    assert [p["label"] for p in summary["panels"]] == ["su2:j=3", "su2:j=7/2"]
    assert time.perf_counter() - start < 5


def test_criterion_3_first_zero():
    for two_j in SPINS:
        lab = SpinLabel(two_j)
        assert abs(global_basin_su2(lab)[1] - math.pi / (two_j + 1)) < 1e-8
        assert abs(critical_points_su2(lab).global_basin["interval"][1] - math.pi / (two_j + 1)) < 1e-8


def test_criterion_4_flip_target_maximum():
    start = time.perf_counter()
    lab = SpinLabel(7)
    ops, _ = spin_setup(lab)
    grid = reduced_scan(ops, spin_target(lab, "flip"), 512)
    assert time.perf_counter() - start < 60
    assert abs(grid.max() - 0.8) <= 0.02, f"scan maximum {grid.max():.6f}"


def test_criterion_5_ruggedness_order():
    start = time.perf_counter()
    cmp = ruggedness_compare([SpinLabel(14), SU3Label(6, 1), SU3Label(5, 2)], starts=1000, seed=0, resolution=512)
    counts = [e["local_max_count"] for e in cmp.entries]
    assert counts[0] > counts[1] > counts[2]
    assert time.perf_counter() - start < 300


def test_criterion_6_character_oracles():
    for two_j in range(0, 21):
        assert abs(su2_character(SpinLabel(two_j), 0.0) - (two_j + 1)) < 1e-8
    for r1 in range(2, 11):
        for r2 in range(1, r1):
            lab = SU3Label(r1, r2)
            assert abs(su3_character(lab, 0.0, 0.0) - lab.dim) < 1e-8
    assert abs(su3_character(SU3Label(6, 1), 0.0, 0.0) - 15) < 1e-8
    assert abs(su3_character(SU3Label(5, 2), 0.0, 0.0) - 15) < 1e-8
    for two_j in SPINS:
        assert abs(weyl_orthonormality(SpinLabel(two_j), 4096) - 1) < 1e-6
    for lab in (SU3Label(6, 1), SU3Label(5, 2), SU3Label(3, 1), SU3Label(4, 2)):
        assert abs(weyl_orthonormality(lab, 512) - 1) < 1e-4


def test_criterion_7_gradients_match_finite_differences():
    rng = np.random.default_rng(7)
    worst_kin = 0.0
    for _ in range(100):
        n = int(rng.integers(2, 9))
        u, w, a = random_unitary(rng, n), TargetGate(random_unitary(rng, n)), random_skew(rng, n)
        s = 1e-5
        fd = (fidelity(u @ expm(s * a), w) - fidelity(u @ expm(-s * a), w)) / (2 * s)
        an = hs_inner(gate_gradient_generator(u, w), a)
        worst_kin = max(worst_kin, abs(an - fd) / abs(an))
    worst_grape = 0.0
    for _ in range(100):
        n = int(rng.integers(2, 9))
        m = int(rng.integers(1, 3))
        sys = ControlSystem(random_hermitian(rng, n), tuple(random_hermitian(rng, n) for _ in range(m)))
        amps = rng.uniform(-1, 1, (m, 3))
        dt = float(rng.uniform(0.05, 0.4))
        w = TargetGate(random_unitary(rng, n))
        _, g = fidelity_and_gradient(sys, ControlField(amps, dt), w)
        fd = np.zeros_like(amps)
        h = 1e-6
        for idx in np.ndindex(*amps.shape):
            p, q = amps.copy(), amps.copy()
            p[idx] += h
            q[idx] -= h
            fd[idx] = (fidelity_and_gradient(sys, ControlField(p, dt), w)[0]
                       - fidelity_and_gradient(sys, ControlField(q, dt), w)[0]) / (2 * h)
        worst_grape = max(worst_grape, np.max(np.abs(g - fd)) / np.max(np.abs(fd)))
    assert worst_kin < 1e-6, worst_kin
    assert worst_grape < 1e-6, worst_grape


def test_criterion_8_kinematic_trapping():
    lab = SpinLabel(6)
    _, alg = spin_setup(lab)
    crit = np.array(critical_points_su2(lab).critical_values())
    finals = np.array([r.final_J for _, r in kinematic_flow(spin_target(lab, "identity"), alg, 200, seed=0)])
    assert np.all(np.min(np.abs(finals[:, None] - crit[None, :]), axis=1) < 1e-6)
    trapped = np.mean(finals < 1 - 1e-6)
    assert 0 < trapped < 1


@pytest.mark.slow
def test_criterion_9_dynamical_kinematic_correspondence(capsys):
    start = time.perf_counter()
    sym = load_problem(PROBLEMS / "spin3_symmetric.json")
    assert sym.experiment.starts == 200
    crit = critical_points_su2(SpinLabel(6)).critical_values()
    outcomes = run_grape(sym.system, sym.target, sym.experiment)
    stats = trap_statistics(outcomes, crit, band=2e-3)
    assert 1 - stats.unassigned_fraction >= 0.9

    quad = load_problem(PROBLEMS / "spin3_quadratic_drift.json")
    assert main(["controllability", "--problem", str(PROBLEMS / "spin3_quadratic_drift.json")]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["lie_algebra_dim"] >= 7 * 7 - 1 and report["controllable"]
    assert quad.experiment.starts == 50
    finals = np.array([o.final_J for o in run_grape(quad.system, quad.target, quad.experiment)])
    assert np.mean(finals < 1 - 1e-3) == 0
    assert time.perf_counter() - start < 15 * 60


def test_criterion_10_lie_closure():
    for two_j in range(1, 16):
        ops = build_spin_operators(SpinLabel(two_j))
        rep = lie_closure([1j * ops.jx, 1j * ops.jz])
        assert rep.dim == 3
        assert rep.controllable == (two_j == 1)
    rep = lie_closure(spin_control_system(SpinLabel(2), quadratic_drift=1.0).generators())
    assert rep.dim >= 8 and rep.controllable
