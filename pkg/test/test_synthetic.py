"""Tests for the synthetic instance generator and the brute-force oracle."""

import os

import numpy as np
import pytest

from labourflow.errors import InputError
from labourflow.models.scenario import BASELINE
from labourflow.models.state import SimulationParams
from labourflow.network import OccupationHierarchy, assortativity, build_network, is_connected
from labourflow.storage.artifact_store import ArtifactStore
from labourflow.storage.csv_io import load_mix, load_sector_demand, load_transitions
from labourflow.synthetic.generator import (SyntheticSpec, gen_mix, gen_sector_demand, gen_transitions,
                                            hierarchy_rows, leaf_occupations, synthetic_nodes, write_synthetic)
from labourflow.synthetic.oracle import enumerate_expected_hires, mean_field_oracle, oracle_step


class TestSyntheticSpec:

    def test_leaves_spread_over_groups(self, small_spec):
        assert leaf_occupations(small_spec) == ["11", "12", "21", "22", "31", "32"]
        assert len(synthetic_nodes(small_spec)) == 18

    def test_hierarchy_rows_load(self, small_spec):
        hierarchy = OccupationHierarchy.from_rows(hierarchy_rows(small_spec))
        assert hierarchy.parent("21") == "2"
        assert hierarchy.parent("2") is None

    @pytest.mark.parametrize("values, message", [
        ({"n_occupations": 0}, "n_occupations"),
        ({"shocks": {"shock": {"S9": 0.1}}}, "unknown sector"),
        ({"shocks": {BASELINE: {}}}, "cannot be a shock"),
        ({"n_occupations": 200, "depth": 2}, "increase depth"),
        ({"end_year": 2018}, "end_year"),
    ])
    def test_validation(self, values, message):
        with pytest.raises(InputError, match=message):
            SyntheticSpec(**values)

    def test_unknown_field(self):
        with pytest.raises(InputError, match="colour"):
            SyntheticSpec.from_dict({"colour": "red"})

    def test_dict_round_trip(self, small_spec):
        assert SyntheticSpec.from_dict(small_spec.to_dict()) == small_spec


class TestGenerator:

    def test_transitions_are_a_function_of_the_seed(self, small_spec):
        assert gen_transitions(small_spec).counts == gen_transitions(small_spec).counts
        other = SyntheticSpec(n_occupations=6, n_regions=3, seed=8)
        assert gen_transitions(other).counts != gen_transitions(small_spec).counts

    def test_support_is_connected(self):
        spec = SyntheticSpec(n_occupations=12, n_regions=4, transitions_per_node=5.0, seed=3)
        assert is_connected(build_network(gen_transitions(spec)))

    def test_regional_mixing_raises_regional_assortativity(self):
        values = dict(n_occupations=9, n_regions=4, transitions_per_node=5000.0, seed=1)
        weak = build_network(gen_transitions(SyntheticSpec(within_region=0.0, **values)))
        strong = build_network(gen_transitions(SyntheticSpec(within_region=10.0, **values)))
        assert assortativity(strong, "region") > assortativity(weak, "region") + 0.2

    def test_occupational_mixing_raises_group_assortativity(self):
        values = dict(n_occupations=9, n_regions=4, transitions_per_node=5000.0, seed=1)
        weak = build_network(gen_transitions(SyntheticSpec(within_occupation=0.0, **values)))
        strong = build_network(gen_transitions(SyntheticSpec(within_occupation=10.0, **values)))
        assert assortativity(strong, "broad_group") > assortativity(weak, "broad_group") + 0.2

    def test_dominant_regional_weight_gives_near_perfect_assortativity(self):
        spec = SyntheticSpec(n_occupations=9, n_regions=4, base_weight=1.0, within_region=1000.0,
                             within_occupation=0.0, self_weight=0.0, transitions_per_node=5000.0, seed=2)
        assert assortativity(build_network(gen_transitions(spec)), "region") > 0.9

    def test_equal_weights_give_neutral_mixing(self):
        spec = SyntheticSpec(n_occupations=9, n_regions=4, base_weight=1.0, within_region=0.0,
                             within_occupation=0.0, self_weight=0.0, transitions_per_node=5000.0, seed=2)
        network = build_network(gen_transitions(spec))
        assert assortativity(network, "region") == pytest.approx(0.0, abs=0.05)
        assert assortativity(network, "broad_group") == pytest.approx(0.0, abs=0.05)

    def test_sector_demand_growth(self):
        spec = SyntheticSpec(n_occupations=4, n_regions=2, shocks={"shock": {"S1": 0.1}})
        paths = gen_sector_demand(spec)
        base, shock = paths[BASELINE].values, paths["shock"].values
        assert base[("S1", "R1", 2019)] == pytest.approx(base[("S1", "R1", 2018)] * 1.01)
        assert shock[("S1", "R1", 2018)] == base[("S1", "R1", 2018)]
        assert shock[("S1", "R1", 2020)] == pytest.approx(base[("S1", "R1", 2020)] * 1.1 ** 2)
        assert shock[("S2", "R2", 2025)] == base[("S2", "R2", 2025)]

    def test_mix_shares_sum_to_one(self, small_spec):
        mix = gen_mix(small_spec)
        totals = mix.groupby(["year", "sector"])["share"].sum()
        np.testing.assert_allclose(totals.to_numpy(), 1.0, atol=1e-12)
        assert set(mix["year"]) == {2018, 2019}

    def test_written_inputs_load(self, tmp_path, small_spec):
        paths = write_synthetic(small_spec, ArtifactStore(str(tmp_path)))
        assert sorted(paths) == ["hierarchy", "mix", "regions", "sector_demand", "transitions", "wages"]
        assert all(os.path.isabs(path) and os.path.exists(path) for path in paths.values())
        counts = load_transitions(paths["transitions"], small_spec.regions,
                                  OccupationHierarchy.from_rows(hierarchy_rows(small_spec)))
        assert counts.counts == gen_transitions(small_spec).counts
        mix = load_mix(paths["mix"], small_spec.regions, broadcast=True)
        assert len(mix.shares) == small_spec.n_sectors * small_spec.n_regions
        assert sorted(load_sector_demand(paths["sector_demand"])) == [BASELINE, "shock"]


class TestOracle:

    @pytest.mark.parametrize("applicants, vacancies, expected", [
        (0, 3, 0.0), (3, 0, 0.0), (1, 5, 1.0), (4, 1, 1.0), (2, 2, 1.5), (3, 3, 19 / 9),
    ])
    def test_enumeration(self, applicants, vacancies, expected):
        assert enumerate_expected_hires(applicants, vacancies) == pytest.approx(expected, abs=1e-12)

    def test_enumeration_limit(self):
        with pytest.raises(InputError, match="too many"):
            enumerate_expected_hires(12, 10)

    def test_node_limit(self):
        matrix = np.full((6, 6), 1 / 6).tolist()
        with pytest.raises(InputError, match="at most 5"):
            mean_field_oracle(matrix, [1] * 6, [0] * 6, [0] * 6, [[1] * 6], SimulationParams())

    def test_single_application_only(self):
        with pytest.raises(InputError):
            mean_field_oracle([[1.0]], [1], [0], [0], [[1]], SimulationParams(applications_per_worker=2))

    def test_oracle_conserves_workers(self):
        matrix = [[0.6, 0.4, 0.0], [0.1, 0.8, 0.1], [0.0, 0.5, 0.5]]
        history = mean_field_oracle(matrix, [100, 80, 60], [5, 4, 3], [2, 1, 0],
                                    [[100, 80, 60], [90, 95, 50], [80, 110, 40]], SimulationParams())
        workers = [sum(e) + sum(u) for e, u in zip(history["employed"], history["unemployed"])]
        assert workers == pytest.approx([252.0] * 3)

    def test_oracle_step_without_search(self):
        e, u, v = oracle_step([[1.0]], [10.0], [2.0], [1.0], [11.0],
                              SimulationParams(delta_u=0.0, delta_v=0.0, gamma_u=0.0, gamma_v=0.0))
        assert (e, u, v) == ([11.0], [1.0], [0.0])
