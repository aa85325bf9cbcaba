"""Domain type tests: parameter validation, paths, containers, invariant checks."""

import numpy as np
import pytest

from hiergen.errors import ConsistencyError, ParameterError
from hiergen.model import (
    Dataset,
    GeneratorParams,
    Hierarchy,
    NodeDistribution,
    NodeState,
    check_partition,
    parent_path,
    path_depth,
    validate,
)
from hiergen.presets import preset


def make_node(path, means=(0.0,), sigmas=(1.0,), **kw):
    return NodeState(path, NodeDistribution(np.array(means), np.array(sigmas)), **kw)


def test_validate_table_parameters_ok():
    validate(preset("s00"))  # n=10000, d=2, alpha0=1, lam=0.5, gamma=0.2


def test_validate_rejects_zero_gamma():
    params = GeneratorParams(n=10, d=2, alpha0=1.0, lam=0.5, gamma=0.0)
    with pytest.raises(ParameterError) as err:
        validate(params)
    assert "gamma" in err.value.fields


def test_validate_rejects_equal_sigma_bounds():
    params = GeneratorParams(
        n=10, d=2, alpha0=1.0, lam=0.5, gamma=0.2, sigma_min=10.0, sigma_max=10.0
    )
    with pytest.raises(ParameterError) as err:
        validate(params)
    assert "sigma_min" in err.value.fields


@pytest.mark.parametrize(
    "overrides, field",
    [
        ({"n": -1}, "n"),
        ({"d": 0}, "d"),
        ({"alpha0": 0.0}, "alpha0"),
        ({"lam": -0.5}, "lam"),
        ({"p": 0.0}, "p"),
        ({"q": -2.0}, "q"),
        ({"sigma_min": -0.1}, "sigma_min"),
        ({"sigma_max": 0.0}, "sigma_max"),
        ({"seed": -3}, "seed"),
        ({"max_depth": 0}, "max_depth"),
    ],
)
def test_validate_names_the_offending_field(overrides, field):
    base = dict(n=10, d=2, alpha0=1.0, lam=0.5, gamma=0.2)
    base.update(overrides)
    with pytest.raises(ParameterError) as err:
        validate(GeneratorParams(**base))
    assert field in err.value.fields


def test_path_helpers():
    assert path_depth(()) == 0
    assert path_depth((0, 1, 2)) == 3
    assert parent_path((0, 1, 2)) == (0, 1)
    with pytest.raises(ValueError):
        parent_path(())


def test_children_are_sorted_in_child_map():
    params = GeneratorParams(n=0, d=1, alpha0=1.0, lam=1.0, gamma=1.0)
    nodes = {
        (): make_node(()),
        (1,): make_node((1,)),
        (0,): make_node((0,)),
        (0, 0): make_node((0, 0)),
    }
    h = Hierarchy(nodes, params)
    cm = h.child_map()
    assert cm[()] == [(0,), (1,)]
    assert cm[(0,)] == [(0, 0)]
    assert h.paths_preorder() == [(), (0,), (0, 0), (1,)]


def test_check_closure_detects_orphan():
    params = GeneratorParams(n=0, d=1, alpha0=1.0, lam=1.0, gamma=1.0)
    h = Hierarchy({(): make_node(()), (0, 0): make_node((0, 0))}, params)
    with pytest.raises(ConsistencyError):
        h.check_closure()


def test_check_sigma_monotone_detects_violation():
    params = GeneratorParams(n=0, d=1, alpha0=1.0, lam=1.0, gamma=1.0)
    h = Hierarchy(
        {(): make_node((), sigmas=(1.0,)), (0,): make_node((0,), sigmas=(2.0,))},
        params,
    )
    with pytest.raises(ConsistencyError):
        h.check_sigma_monotone()


def test_check_partition_detects_double_ownership():
    params = GeneratorParams(n=0, d=1, alpha0=1.0, lam=1.0, gamma=1.0)
    h = Hierarchy(
        {
            (): make_node((), point_ids=[0]),
            (0,): make_node((0,), point_ids=[0]),
        },
        params,
    )
    ds = Dataset(np.array([0]), np.zeros((1, 1)), [()])
    with pytest.raises(ConsistencyError):
        check_partition(h, ds)


def test_check_partition_detects_missing_owner():
    params = GeneratorParams(n=0, d=1, alpha0=1.0, lam=1.0, gamma=1.0)
    h = Hierarchy({(): make_node((), point_ids=[0])}, params)
    ds = Dataset(np.array([0]), np.zeros((1, 1)), [(5,)])
    with pytest.raises(ConsistencyError):
        check_partition(h, ds)


def test_dataset_iterates_data_points():
    ds = Dataset(np.array([0, 1]), np.array([[1.0, 2.0], [3.0, 4.0]]), [(), (0,)])
    points = list(ds)
    assert points[0].id == 0 and points[0].owner == ()
    assert np.array_equal(points[1].features, [3.0, 4.0])
    assert len(ds) == 2
    clone = ds.copy()
    clone.owners[0] = (9,)
    assert ds.owners[0] == ()


def test_node_state_copy_is_deep_enough():
    node = make_node((0,), nu=0.5, psi_sticks=[0.1], point_ids=[1, 2])
    dup = node.copy()
    dup.psi_sticks.append(0.9)
    dup.point_ids.append(3)
    assert node.psi_sticks == [0.1]
    assert node.point_ids == [1, 2]
    assert dup.distribution is node.distribution
