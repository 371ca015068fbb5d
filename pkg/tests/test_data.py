import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import chain_topology, dataset_for, two_stage_topology
from dea_mpss.data import (
    DataWarning,
    Dataset,
    Link,
    NetworkTopology,
    ProcessSpec,
    dataset_to_csv,
    load_dataset,
    parse_data_csv,
    parse_topology_json,
    summarize,
    topology_to_json,
)
from dea_mpss.errors import UnsupportedTopologyError, ValidationError


def write_pair(tmp_path, topology, csv_text):
    data = tmp_path / "d.csv"
    topo = tmp_path / "t.json"
    data.write_text(csv_text, encoding="utf-8")
    topo.write_text(topology_to_json(topology), encoding="utf-8")
    return data, topo


def test_load_round_trip(tmp_path):
    topo = two_stage_topology()
    csv_text = "dmu,in1_0,mid_0,out1_0,in2_0,out2_0\na,1,2,3,4,5\nb,2,3,4,5,6\n"
    data_path, topo_path = write_pair(tmp_path, topo, csv_text)
    dataset, topology = load_dataset(data_path, topo_path)
    assert dataset.dmu_ids == ("a", "b")
    assert topology.shape_tag == "two_stage_general"
    # serialize -> parse is the identity
    again = parse_data_csv(dataset_to_csv(dataset))
    assert again.dmu_ids == dataset.dmu_ids
    for name in dataset.measure_names:
        assert np.array_equal(again.measures[name], dataset.measures[name])
    topo_again = parse_topology_json(topology_to_json(topology))
    assert topo_again == topology


def test_missing_column_named_in_error(tmp_path):
    procs = [
        ProcessSpec("upstream", 1, exogenous_inputs=["cost"], intermediate_outputs=["sales2"]),
        ProcessSpec("downstream", 2, intermediate_inputs=["sales2"], final_outputs=["profit"]),
    ]
    topo = NetworkTopology(procs, [Link("upstream", "downstream", "sales2")], "two_stage_general")
    data_path, topo_path = write_pair(tmp_path, topo, "dmu,cost,profit\na,1,2\n")
    with pytest.raises(ValidationError, match="sales2"):
        load_dataset(data_path, topo_path)


def test_epsilon_substitution_warns():
    with pytest.warns(DataWarning, match="0.001"):
        ds = parse_data_csv("dmu,a\nu1,0\nu2,2\n", min_epsilon=0.001)
    assert ds.measures["a"][0] == 0.001


def test_zero_rejected_without_epsilon():
    with pytest.raises(ValidationError, match="nonpositive"):
        parse_data_csv("dmu,a\nu1,0\n")


def test_non_numeric_cell_coordinates():
    with pytest.raises(ValidationError, match=r"row 3, column 'b'"):
        parse_data_csv("dmu,a,b\nu1,1,2\nu2,1,oops\n")


def test_duplicate_dmu_rejected():
    with pytest.raises(ValidationError, match="duplicate DMU"):
        parse_data_csv("dmu,a\nu1,1\nu1,2\n")


def test_header_must_start_with_dmu():
    with pytest.raises(ValidationError, match='"dmu"'):
        parse_data_csv("unit,a\nu1,1\n")


def test_unsupported_shape_rejected():
    with pytest.raises(UnsupportedTopologyError, match="unsupported topology"):
        NetworkTopology([ProcessSpec("p", 1, exogenous_inputs=["x"])], [], "ring")


def test_cycle_rejected():
    procs = [
        ProcessSpec("a", 1, exogenous_inputs=["x"], intermediate_outputs=["z1"],
                    intermediate_inputs=["z2"]),
        ProcessSpec("b", 2, intermediate_inputs=["z1"], intermediate_outputs=["z2"],
                    final_outputs=["y"]),
    ]
    links = [Link("a", "b", "z1"), Link("b", "a", "z2")]
    with pytest.raises(ValidationError, match="cycle"):
        NetworkTopology(procs, links, "two_stage_general")


def test_measure_with_two_roles_rejected():
    with pytest.raises(ValidationError, match="more than one role"):
        ProcessSpec("p", 1, exogenous_inputs=["x"], final_outputs=["x"])


def test_source_process_must_be_stage_one():
    procs = [
        ProcessSpec("up", 2, exogenous_inputs=["x"], intermediate_outputs=["z"]),
        ProcessSpec("down", 1, intermediate_inputs=["z"], final_outputs=["y"],
                    exogenous_inputs=["w"]),
    ]
    with pytest.raises(ValidationError):
        NetworkTopology(procs, [Link("up", "down", "z")], "two_stage_general")


def test_stage_weights_must_sum_to_one():
    procs = [
        ProcessSpec("op", 1, exogenous_inputs=["a"], intermediate_outputs=["z1"],
                    importance_weight=0.7),
        ProcessSpec("rd", 1, exogenous_inputs=["b"], intermediate_outputs=["z2"],
                    importance_weight=0.7),
        ProcessSpec("mkt", 2, intermediate_inputs=["z1", "z2"], final_outputs=["y"]),
    ]
    links = [Link("op", "mkt", "z1"), Link("rd", "mkt", "z2")]
    with pytest.raises(ValidationError, match="importance weights"):
        NetworkTopology(procs, links, "series_parallel_chain")


def test_chain_topology_builds():
    topo = chain_topology(m=2, p=1, k=3, e=1, s=1)
    assert topo.intermediate_measures() == ("op_mid_0", "rd_mid_0")
    assert len(topo.stage_processes(1)) == 2


def test_topology_json_field_names():
    doc = json.loads(topology_to_json(two_stage_topology()))
    assert set(doc) == {"shape", "processes", "links"}
    assert set(doc["processes"][0]) == {
        "name", "stage", "exogenous_inputs", "intermediate_outputs",
        "intermediate_inputs", "final_outputs", "importance_weight",
    }
    assert set(doc["links"][0]) == {"from", "to", "measure"}


def test_summarize_basics():
    ds = Dataset(["a", "b", "c"], {"m": [1.0, 1.0, 1.0], "w": [1.0, 3.0, 2.0]})
    stats = summarize(ds)
    row = stats.row("m")
    assert (row.mean, row.sd, row.minimum, row.maximum) == (1.0, 0.0, 1.0, 1.0)


def test_summarize_two_point_sample():
    ds = Dataset(["a", "b"], {"m": [1.0, 3.0]})
    row = summarize(ds).row("m")
    assert row.mean == pytest.approx(2.0)
    assert row.sd == pytest.approx(math.sqrt(2.0))
    assert (row.minimum, row.maximum) == (1.0, 3.0)


def test_summarize_permutation_invariant():
    rng = np.random.default_rng(5)
    vals = rng.uniform(0.5, 9.0, size=12)
    ds = Dataset([f"u{i}" for i in range(12)], {"m": vals})
    perm = rng.permutation(12)
    ds_perm = Dataset([f"u{i}" for i in perm], {"m": vals[perm]})
    a, b = summarize(ds).row("m"), summarize(ds_perm).row("m")
    assert a.mean == pytest.approx(b.mean)
    assert a.sd == pytest.approx(b.sd)
    assert (a.minimum, a.maximum) == (b.minimum, b.maximum)


positive_floats = st.floats(0.001, 1e6, allow_nan=False, allow_infinity=False)


@settings(max_examples=60, deadline=None)
@given(st.lists(positive_floats, min_size=1, max_size=20))
def test_summary_bounds_property(values):
    ds = Dataset([f"u{i}" for i in range(len(values))], {"m": values})
    row = summarize(ds).row("m")
    slack = 1e-9 * max(1.0, abs(row.maximum))  # summation rounding head-room
    assert row.minimum - slack <= row.mean <= row.maximum + slack
    assert row.sd >= 0.0


@settings(max_examples=40, deadline=None)
@given(
    st.lists(
        st.lists(positive_floats, min_size=3, max_size=3), min_size=1, max_size=8
    )
)
def test_csv_round_trip_property(rows):
    ds = Dataset(
        [f"u{i}" for i in range(len(rows))],
        {name: [r[k] for r in rows] for k, name in enumerate(("a", "b", "c"))},
    )
    again = parse_data_csv(dataset_to_csv(ds))
    for name in ds.measure_names:
        assert np.array_equal(again.measures[name], ds.measures[name])


def test_dataset_helpers():
    topo = two_stage_topology()
    ds = dataset_for(topo, [[1, 2, 3, 4, 5], [2, 3, 4, 5, 6]])
    assert ds.value("u2", "mid_0") == 3.0
    assert ds.matrix(["in1_0", "out2_0"]).shape == (2, 2)
    with pytest.raises(ValidationError, match="unknown DMU"):
        ds.index_of("nope")
    with pytest.raises(ValidationError, match="unknown measure"):
        ds.column("nope")
