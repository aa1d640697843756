import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qlandscape.characters import (
    SU3Label,
    fidelity_from_character,
    su2_character_derivatives,
    su3_character_derivatives,
    su3_symmetry_images,
)
from qlandscape.errors import InvalidInputError
from qlandscape.kinematics import reduced_scan, spin_setup, spin_target
from qlandscape.representations import SpinLabel
from qlandscape.topology import (
    LOCAL_MAX,
    LOCAL_MIN,
    SADDLE,
    CriticalReport,
    ascend_su2,
    ascend_torus,
    critical_level_summary,
    critical_points,
    critical_points_su2,
    critical_points_torus,
    global_basin_su2,
    ruggedness_compare,
)


@pytest.fixture(scope="module")
def torus_reports():
    labels = [SU3Label(6, 1), SU3Label(5, 2)]
    return {(lab, res): critical_points_torus(lab, res, basin_samples=0) for lab in labels for res in (256, 512)}


def dense_grid_maxima(two_j, m=200001):
    """Oracle: local maxima of J on a very fine grid, including reflecting endpoints."""
    b = np.linspace(0, math.pi / 2, m)
    v = np.abs(su2_character_derivatives(SpinLabel(two_j), b)[0])
    inner = np.nonzero((v[1:-1] > v[:-2]) & (v[1:-1] >= v[2:]))[0] + 1
    idx = list(inner) + [k for k, nb in ((0, 1), (m - 1, m - 2)) if v[k] > v[nb]]
    return sorted(b[idx]), v[idx] / (two_j + 1)


def test_spin_half_is_trap_free():
    rep = critical_points_su2(SpinLabel(1))
    assert rep.suboptima_count == 0
    top = rep.global_point
    assert top.location.angles[0] == 0.0 and top.value == 1.0
    mins = rep.minima
    assert len(mins) == 1 and mins[0].location.angles[0] == pytest.approx(math.pi / 2) and mins[0].value < 1e-12


def test_spin_three_structure():
    rep = critical_points_su2(SpinLabel(6))
    assert len(rep.maxima) == 4 and rep.suboptima_count == 3
    assert not rep.saddles
    assert all(p.value < 1e-9 for p in rep.minima)


def test_spin_one_trap_against_dense_grid():
    rep = critical_points_su2(SpinLabel(2))
    assert rep.suboptima_count == 1
    trap = [p for p in rep.maxima if not p.is_global][0]
    locs, vals = dense_grid_maxima(2)
    assert trap.location.angles[0] == pytest.approx(locs[-1], abs=1e-5)
    assert trap.value == pytest.approx(vals[-1], abs=1e-9)
    assert trap.value == pytest.approx(1 / 3, abs=1e-12)


@pytest.mark.parametrize("two_j", range(2, 21))
def test_floor_j_suboptima(two_j):
    rep = critical_points_su2(SpinLabel(two_j))
    assert rep.suboptima_count == two_j // 2
    assert not rep.saddles
    assert all(p.value < 1e-9 for p in rep.minima)
    assert sum(p.is_global for p in rep.points) == 1


@pytest.mark.parametrize("two_j", [3, 6, 7, 12, 19])
def test_su2_maxima_match_dense_grid(two_j):
    rep = critical_points_su2(SpinLabel(two_j))
    locs, vals = dense_grid_maxima(two_j)
    got = sorted(p.location.angles[0] for p in rep.maxima)
    assert np.allclose(got, locs, atol=1e-5)


@pytest.mark.parametrize("two_j", range(1, 21))
def test_su2_refined_points_are_stationary(two_j):
    lab = SpinLabel(two_j)
    rep = critical_points_su2(lab)
    for p in rep.points:
        c, c1, _ = su2_character_derivatives(lab, p.location.angles[0])
        assert p.value == pytest.approx(float(fidelity_from_character(lab, p.location.angles[0])), abs=1e-9)
        if p.value > 1e-9:
            # dJ/dbeta = sign(chi) chi' / N
            assert abs(c1) / lab.dim < 1e-8


def test_suboptima_monotone_in_spin():
    counts = [critical_points_su2(SpinLabel(t)).suboptima_count for t in range(0, 21)]
    assert all(a <= b for a, b in zip(counts, counts[1:]))


def test_su2_rejects_bad_tolerance():
    with pytest.raises(InvalidInputError):
        critical_points_su2(SpinLabel(3), refine_tol=1e-3)


@pytest.mark.parametrize("two_j,expected", [(6, math.pi / 7), (1, math.pi / 2), (14, math.pi / 15)])
def test_global_basin_examples(two_j, expected):
    assert global_basin_su2(SpinLabel(two_j))[1] == pytest.approx(expected, abs=1e-10)


def test_global_basin_shrinks_with_spin():
    widths = [global_basin_su2(SpinLabel(t))[1] for t in range(1, 21)]
    assert all(a > b for a, b in zip(widths, widths[1:]))


@pytest.mark.parametrize("two_j", [2, 6, 7, 14])
def test_global_basin_by_ascent(two_j):
    lab = SpinLabel(two_j)
    edge = global_basin_su2(lab)[1]
    inside = np.linspace(1e-3, edge - 1e-3, 64)
    outside = np.linspace(edge + 1e-3, min(edge + 0.3, math.pi / 2), 64)
    b_in, j_in, _ = ascend_su2(lab, inside)
    b_out, j_out, _ = ascend_su2(lab, outside)
    assert np.all(j_in > 1 - 1e-6)
    assert np.all(j_out < 1 - 1e-3)


def test_report_json_round_trip():
    rep = critical_points_su2(SpinLabel(7))
    back = CriticalReport.from_json_dict(json.loads(json.dumps(rep.to_json_dict())))
    assert back.to_json_dict() == rep.to_json_dict()


def test_report_table_lists_every_point():
    rep = critical_points_su2(SpinLabel(6))
    assert len(rep.to_table().splitlines()) == 2 + len(rep.points)


def test_torus_61_global(torus_reports):
    rep = torus_reports[(SU3Label(6, 1), 256)]
    top = rep.global_point
    assert top.location.angles == (0.0, 0.0) and top.value == pytest.approx(1.0, abs=1e-12)
    assert sum(p.is_global for p in rep.points) == 1


def test_torus_52_less_rugged_than_61(torus_reports):
    assert len(torus_reports[(SU3Label(5, 2), 256)].maxima) < len(torus_reports[(SU3Label(6, 1), 256)].maxima)


@pytest.mark.parametrize("label", [SU3Label(6, 1), SU3Label(5, 2)])
def test_torus_counts_stable_under_refinement(torus_reports, label):
    a, b = torus_reports[(label, 256)], torus_reports[(label, 512)]
    assert len(a.points) == len(b.points)
    for p in a.points:
        tol = 1e-3 if p.degenerate else 10 * a.notes["refine_tol"]
        match = [q for q in b.points if q.kind == p.kind and abs(q.value - p.value) < 1e-9
                 and np.max(np.abs(np.subtract(q.location.angles, p.location.angles))) < tol]
        assert match, p


@pytest.mark.parametrize("label", [SU3Label(6, 1), SU3Label(5, 2)])
def test_torus_points_consistent(torus_reports, label):
    rep = torus_reports[(label, 256)]
    n = label.dim
    for p in rep.points:
        t1, t2 = p.location.angles
        assert p.value == pytest.approx(float(fidelity_from_character(label, t1, t2)), abs=1e-9)
        if not p.degenerate and p.value > 1e-9:
            ev = np.asarray(p.hessian_eigenvalues)
            expected = LOCAL_MAX if ev.max() < 0 else LOCAL_MIN if ev.min() > 0 else SADDLE
            assert p.kind == expected
            chi, grad = su3_character_derivatives(label, t1, t2, order=1)
            assert np.linalg.norm(2 * np.real(np.conj(chi) * grad)) / n**2 < 1e-8
    assert rep.suboptima_count == sum(1 for p in rep.maxima if p.value < rep.global_point.value - 1e-9)


@pytest.mark.parametrize("label", [SU3Label(6, 1), SU3Label(5, 2)])
def test_torus_set_invariant_under_weyl_action(torus_reports, label):
    rep = torus_reports[(label, 256)]
    full = critical_points_torus(label, 256, deduplicate=False, basin_samples=0)
    reps = [np.array(p.location.angles) for p in rep.points]
    # every periodic-only critical point is an image of a deduplicated one of the same value
    for q in full.points:
        imgs = su3_symmetry_images(*q.location.angles)
        tol = 1e-3 if q.degenerate else 1e-8
        found = False
        for p, r in zip(rep.points, reps):
            d = np.abs(imgs - r) % (2 * np.pi)
            d = np.minimum(d, 2 * np.pi - d).max(axis=1)
            if d.min() < tol and abs(p.value - q.value) < 1e-9:
                found = True
                break
        assert found, q


@pytest.mark.parametrize("label", [SU3Label(3, 1), SU3Label(4, 1), SU3Label(6, 1)])
def test_torus_morse_count_is_euler_characteristic(label):
    # on the torus, #max - #saddle + #min = 0 when every critical point is non-degenerate
    full = critical_points_torus(label, 256, deduplicate=False, basin_samples=0)
    assert not any(p.degenerate for p in full.points)
    assert len(full.maxima) - len(full.saddles) + len(full.minima) == 0


def test_self_conjugate_label_reports_nodal_curve():
    rep = critical_points_torus(SU3Label(4, 2), 128, basin_samples=0)
    assert rep.notes["nodal_zero_samples"] > 0
    assert rep.global_point.value == pytest.approx(1.0)


def test_trivial_su3_label():
    rep = critical_points_torus(SU3Label(2, 1), 128)
    assert rep.suboptima_count == 0 and len(rep.points) == 1


def test_torus_rejects_small_resolution():
    with pytest.raises(InvalidInputError):
        critical_points_torus(SU3Label(3, 1), 64)


def test_dispatch():
    assert critical_points(SpinLabel(6)).suboptima_count == 3
    assert critical_points(SU3Label(3, 1), 128).label == SU3Label(3, 1)


@given(st.lists(st.tuples(st.floats(0, 2 * np.pi), st.floats(0, 2 * np.pi)), min_size=1, max_size=20))
def test_torus_ascent_is_monotone(starts):
    lab = SU3Label(5, 2)
    x0 = np.array(starts)
    j0 = fidelity_from_character(lab, x0[:, 0], x0[:, 1])
    _, jf, _ = ascend_torus(lab, x0, max_iter=2000)
    assert np.all(jf >= j0 - 1e-12)


@pytest.mark.slow
def test_ruggedness_ordering_and_basins():
    labels = [SpinLabel(14), SU3Label(6, 1), SU3Label(5, 2)]
    cmp = ruggedness_compare(labels, starts=1000, seed=0, resolution=256)
    counts = [e["local_max_count"] for e in cmp.entries]
    assert counts[0] > counts[1] > counts[2]
    assert cmp.entries[0]["suboptima_count"] == 7
    assert cmp.entries[2]["global_basin_fraction"] > cmp.entries[0]["global_basin_fraction"]
    assert cmp.ordering == ["su2:j=7", "su3:6,1", "su3:5,2"]
    # the spin-7 basin is exactly the first-zero interval, so the estimate is a uniform fraction of pi/2
    assert cmp.entries[0]["global_basin_fraction"] == pytest.approx((math.pi / 15) / (math.pi / 2), abs=0.04)


def test_ruggedness_rejects_mixed_dimensions():
    with pytest.raises(InvalidInputError):
        ruggedness_compare([SpinLabel(14), SU3Label(4, 1)])


@pytest.mark.parametrize("two_j", [6, 7])
@pytest.mark.parametrize("resolution", [256, 512])
def test_critical_level_summary_reports_both_counts(two_j, resolution):
    lab = SpinLabel(two_j)
    ops, _ = spin_setup(lab)
    rep = critical_points_su2(lab)
    s = critical_level_summary(reduced_scan(ops, spin_target(lab, "identity"), resolution), rep)
    nonzero = [v for v in rep.critical_values() if v > 1e-9]
    assert s["distinct_nonzero_critical_values"] == len(nonzero)
    assert s["unmatched_components"] == 0
    assert s["suboptimal_components"] == rep.suboptima_count
