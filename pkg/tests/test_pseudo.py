from fractions import Fraction

import mpmath
import pytest

from zerofree.errors import ConfigError, ConflictingAssignment, GibbsUndefined
from zerofree.exact import marginal
from zerofree.models import (
    ModelSpec, build_hardcore, build_proper_coloring, complete, edgeless, grid, path,
)
from zerofree.pseudo import (
    SsmRow,
    conditional_pseudo_marginal,
    interpolation_accuracy,
    min_radius,
    pseudo_gap,
    pseudo_marginal,
    ssm_scan,
    stated_radius,
    theorem1_check,
)

EMPTY, OCC = 1, 2


def test_radius_rules():
    assert [min_radius("type1", m) for m in (0, 1, 3)] == [2, 3, 5]
    assert [min_radius("type2", m) for m in (0, 1, 3)] == [0, 2, 6]
    assert stated_radius("type1", 3) == 3
    with pytest.raises(ConfigError):
        min_radius("type1", -1)


@pytest.mark.parametrize("kind", ["type1", "type2"])
def test_empty_pin_is_exactly_one(kind):
    g = build_hardcore(path(4), Fraction(1, 2))
    assert pseudo_marginal(g, [], None, kind, 1, 3).is_exactly_one()


@pytest.mark.parametrize("kind", ["type1", "type2"])
def test_empty_condition_matches_unconditional(kind):
    g = build_hardcore(path(5), 1)
    a = pseudo_marginal(g, [2], [OCC], kind, 1, 2)
    b = conditional_pseudo_marginal(g, [2], [OCC], [], [], kind, 1, 2)
    assert a.same_data(b)


def test_pinned_set_inside_condition_is_one():
    g = build_proper_coloring(path(4), 3)
    pm = conditional_pseudo_marginal(g, [1], [2], [0, 1], [1, 2], "type2", 1, 2)
    assert pm.is_exactly_one()


def test_conflicting_assignment():
    g = build_proper_coloring(path(4), 3)
    with pytest.raises(ConflictingAssignment):
        conditional_pseudo_marginal(g, [1], [2], [1], [3], "type2", 1, 2)


def test_single_node_converges_to_gibbs():
    g = build_hardcore(path(1), Fraction(1, 2))
    pm = pseudo_marginal(g, [0], [OCC], "type1", 1, 20)
    assert abs(pm.value(80) - mpmath.mpf(1) / 3) < 1e-6
    assert pm.z_power == 1 and pm.ratio == Fraction(1, 2)


def test_single_edge_approaches_gibbs():
    g = build_hardcore(path(2), 1)
    pm = pseudo_marginal(g, [0], [EMPTY], "type1", Fraction(1, 2), 12)
    # root -1/2 sits on |z| = 1/2, so convergence to 3/4 is slow
    assert abs(pm.value(80) - 0.7806) < 1e-4
    assert abs(pm.value(80) - 0.75) < abs(pseudo_marginal(g, [0], [EMPTY], "type1", Fraction(1, 2), 4).value(80) - 0.75)


def test_type2_exact_on_edgeless():
    g = build_proper_coloring(edgeless(3), 4)
    pm = pseudo_marginal(g, [0], [2], "type2", 1, 0)
    assert Fraction(str(pm.value(60))) == Fraction(1, 4) or abs(pm.value(60) - 0.25) < 1e-15
    assert marginal(g, [0], [2]) == Fraction(1, 4)


def test_json_is_exact():
    g = build_hardcore(path(3), 1)
    js = pseudo_marginal(g, [0], [OCC], "type1", 1, 2).to_json()
    assert js["ratio"] == "1/1" and js["z_power"] == 1 and all("/" in c for c in js["coeffs"])


# -- locality -------------------------------------------------------------------

def test_type1_stated_radius_counterexample():
    g = build_hardcore(path(7), 1)
    rep = theorem1_check(g, [0], [OCC], 3, "type1", 3)
    assert not rep.holds
    assert rep.stated_condition_met and not rep.radius_condition_met
    assert rep.witness == {"tau": [[3, 1]], "component": "t_k", "k": 3, "lhs": "-17/3", "rhs": "-20/3"}
    rep = theorem1_check(g, [0], [EMPTY], 3, "type1", 3)
    assert rep.witness == {"tau": [[3, 2]], "component": "t_k", "k": 3, "lhs": "-7/3", "rhs": "-10/3"}


@pytest.mark.parametrize("sigma", [EMPTY, OCC])
def test_type1_holds_at_min_radius(sigma):
    g = build_hardcore(path(7), 1)
    rep = theorem1_check(g, [0], [sigma], 5, "type1", 3)
    assert rep.holds and rep.radius_condition_met and rep.tau_checked == 2


def test_type2_holds_at_min_radius():
    g = build_proper_coloring(path(9), 3)
    rep = theorem1_check(g, [0], [1], 4, "type2", 2)
    assert rep.holds and rep.tau_count == 3 and not rep.sampled


def test_violation_probe_below_radius():
    g = build_hardcore(path(5), 1)
    rep = theorem1_check(g, [0], [OCC], 1, "type1", 3)
    assert not rep.holds and not rep.radius_condition_met
    assert rep.witness["tau"] == [[1, 1]] and rep.witness["k"] == 1


def test_empty_boundary_holds_trivially():
    rep = theorem1_check(build_hardcore(path(3), 1), [0], [1], 5, "type1", 1)
    assert rep.holds and rep.tau_count == 0


def test_sampled_grid_needs_seed():
    g = build_hardcore(grid(3, 3), 1)
    with pytest.raises(ConfigError):
        theorem1_check(g, [4], [OCC], 1, "type1", 1, tau_budget=4)
    rep = theorem1_check(g, [4], [OCC], 1, "type1", 1, tau_budget=4, samples=5, seed=7)
    again = theorem1_check(g, [4], [OCC], 1, "type1", 1, tau_budget=4, samples=5, seed=7)
    assert rep.sampled and rep.tau_count == 5
    assert rep.to_json() == again.to_json()


def test_skipped_taus_are_counted():
    # occupied centre plus occupied neighbour has weight zero
    g = build_hardcore(path(3), 1)
    rep = theorem1_check(g, [1], [OCC], 1, "type1", 1, stop_at_first=False)
    assert rep.tau_skipped >= 1 and rep.tau_checked + rep.tau_skipped == rep.tau_count


# -- accuracy and scans -------------------------------------------------------------

def test_accuracy_type2_coloring_shrinks():
    g = build_proper_coloring(path(6), 5)
    rows = interpolation_accuracy(g, "type2", 8)
    errs = [r.rel_error for r in rows]
    assert errs[-1] < errs[0] and errs[-1] < 1e-4


def test_accuracy_edgeless_exact_at_zero():
    rows = interpolation_accuracy(build_proper_coloring(edgeless(4), 3), "type2", 2)
    assert all(r.rel_error == 0 for r in rows)


def test_accuracy_undefined_when_z_vanishes():
    with pytest.raises(GibbsUndefined):
        interpolation_accuracy(build_proper_coloring(complete(3), 2), "type2", 2)


def test_ssm_scan_rows():
    model = ModelSpec("hardcore", (("lambda", Fraction(1)),))
    rows = ssm_scan(path(9), model, [4], [1, 4], kind="type1", m=1)
    assert [r.R for r in rows] == [1, 4]
    assert rows[0].rho == Fraction(1, 2) and rows[1].rho == Fraction(19, 442)
    assert rows[1].pseudo_gap_exact_zero and rows[1].radius_condition_met
    assert len(rows[0].csv_fields()) == len(SsmRow.CSV_HEADER)


def test_ssm_scan_sweep():
    model = ModelSpec("hardcore", (("lambda", Fraction(1)),))
    rows = ssm_scan(path(6), model, [0], [2], param="lambda", values=["1/2", "1", "2"])
    rhos = [r.rho for r in rows]
    assert rhos == sorted(rhos) and [r.value for r in rows] == [Fraction(1, 2), 1, 2]


def test_pseudo_gap_nonzero_below_radius():
    gap, zero = pseudo_gap(build_hardcore(path(5), 1), [0], 1, "type1", 3)
    assert not zero and gap > 0
