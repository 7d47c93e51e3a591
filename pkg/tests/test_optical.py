import math

import numpy as np
import pytest

from danzerkit.geometry import AxisBox
from danzerkit.lattice import BudgetExceeded, count_in_ball, enumerate_points
from danzerkit.optical import NetSpec, epsilon_net, long_box, optical_forest_points, optical_forest_spec
from danzerkit.verifiers import empty_box_search_nd, largest_empty_rectangle_2d


def test_optical_schedule():
    s2 = optical_forest_spec(2)
    assert s2.params(1) == (0.5, 2.0, 0.25)
    assert s2.params(3) == (0.125, 8.0, 1 / 16)
    s3 = optical_forest_spec(3)
    assert s3.params(1) == (0.25, 4.0, 1 / (math.sqrt(2) * 4))
    with pytest.raises(ValueError):
        optical_forest_spec(1)


def test_optical_points_have_coarse_coordinate():
    pts = optical_forest_points(2, AxisBox.cube(2, -9, 9))
    coarse = np.isin(np.abs(pts), [2.0, 4.0, 6.0, 8.0])
    assert np.all(coarse.any(axis=1))


def test_net_parameters():
    s = NetSpec(2, 1)
    assert s.epsilon == 0.25
    assert s.tau == pytest.approx(2 * 2**0.25 * 2)
    assert s.tau**2 == pytest.approx(4 * math.sqrt(2) / s.epsilon)
    s3 = NetSpec(3, 2)
    assert s3.tau**3 == pytest.approx(8 * math.sqrt(3) / s3.epsilon)
    assert NetSpec.for_epsilon(2, 0.1).n == 2
    assert NetSpec.for_epsilon(2, 0.25).n == 1
    with pytest.raises(ValueError):
        NetSpec(2, 0)


def test_net_lies_in_unit_cube():
    net = epsilon_net(2, 2)
    assert np.all(np.abs(net.points) <= 0.5)
    r = net.report()
    assert r["cardinality"] == len(net.points) and r["epsilon"] == 2**-4


def test_net_matches_forest_patch():
    net = epsilon_net(2, 1)
    tau = net.spec.tau
    patch = enumerate_points(optical_forest_spec(2), AxisBox.cube(2, 0, tau))
    assert np.allclose(np.sort((net.points + 0.5) * tau, axis=0), np.sort(patch, axis=0))


@pytest.mark.parametrize("n", [1, 2])
def test_planar_net_property(n):
    net = epsilon_net(2, n)
    assert largest_empty_rectangle_2d(net.points).volume < net.spec.epsilon


def test_long_box():
    b = long_box(3, 0.01, [0, 0, 0], long_axis=1)
    assert b.volume == pytest.approx(8 * math.sqrt(3))
    assert b.extents[0] == pytest.approx(0.01)


def test_optical_growth_stays_near_T2_log_T():
    spec = optical_forest_spec(2)
    ratios = [count_in_ball(spec, T) / (T**2 * math.log(T)) for T in (8, 16, 32, 64)]
    assert max(ratios) / min(ratios) < 2.0


def test_net_budget():
    with pytest.raises(BudgetExceeded):
        epsilon_net(2, 3, budget=100)


def test_three_dimensional_net_corner_gap():
    # every point of the patch has a nonzero coarse coordinate, so the corner
    # cube [0, 2^(d-1))^d of the patch is empty; rescaled, its volume is
    # 2^(d(d-2))/sqrt(d) times the net's epsilon: above epsilon once d >= 3.
    net = epsilon_net(3, 1)
    eps, tau = net.spec.epsilon, net.spec.tau
    corner = AxisBox.cube(3, -0.5, -0.5 + 4 / tau)
    assert not np.any(np.all((net.points > corner.lo) & (net.points < corner.hi), axis=1))
    assert corner.volume == pytest.approx(eps * 8 / math.sqrt(3))
    found = empty_box_search_nd(net.points, 3, resolution=8)
    assert found.volume >= eps
    assert not found.exact
    # in the plane the same corner is below epsilon
    net2 = epsilon_net(2, 1)
    assert (2 / net2.spec.tau) ** 2 == pytest.approx(net2.spec.epsilon / math.sqrt(2))
