"""Tests for separations/openings, job search, matching and the run loop."""

import numpy as np
import pytest

from conftest import make_network, make_nodes, make_scenario, make_state
from labourflow.abm.engine import _check, age_vacancies, initial_state, run, simulate, step, stochastic_round
from labourflow.abm.matching import applications, expected_flows, fill_probability, matching, search_weights
from labourflow.abm.processes import expected_separations_and_openings, separations_and_openings
from labourflow.errors import InputError, SimulationFault
from labourflow.metrics.rates import avg_vacancy_rate
from labourflow.models.state import MEAN_FIELD, STOCHASTIC, SimulationParams
from labourflow.synthetic.oracle import closed_form_hires, enumerate_expected_hires, mean_field_oracle


E0 = np.array([800, 1000, 1200, 900, 1100])
FIVE_NODE_MATRIX = 0.5 * np.eye(5) + 0.1 * np.ones((5, 5))


def five_node_instance(**params):
    """Fixed 5-node instance in a demand surplus that shrinks 5% a year."""
    u0 = (0.05 * E0).astype(np.int64)
    v0 = (0.01 * E0).astype(np.int64)
    nodes = make_nodes(5)
    D_star = np.array([0.9 * (E0 + v0) * (1.0 - 0.05 * k) for k in range(4)])
    scenario = make_scenario(D_star, nodes, [2018, 2019, 2020, 2021])
    network = make_network(FIVE_NODE_MATRIX, nodes)
    values = dict(delta_u=0.01, delta_v=0.01, gamma_u=0.1, gamma_v=0.1, burn_in_steps=0)
    values.update(params)
    return E0, u0, v0, scenario, network, SimulationParams(**values)


class TestProcesses:

    def test_surplus_separations(self):
        params = SimulationParams()
        separations, openings = expected_separations_and_openings(np.array([100.0]), np.array([50.0]), params)
        assert separations[0] == pytest.approx(0.009 * 100 + 0.991 * 5.0)
        assert openings[0] == pytest.approx(0.9)

    def test_separations_are_capped_at_employment(self):
        params = SimulationParams()
        separations, _ = expected_separations_and_openings(np.array([10.0]), np.array([1000.0]), params)
        assert separations[0] == pytest.approx(10.0)

    def test_openings_follow_the_closure_without_a_cap(self):
        params = SimulationParams(delta_v=0.0, gamma_v=0.5, mode=MEAN_FIELD)
        _, openings = expected_separations_and_openings(np.array([10.0]), np.array([-100.0]), params)
        assert openings[0] == pytest.approx(50.0)

    def test_shortage_openings(self):
        params = SimulationParams(delta_v=0.0, gamma_v=0.5)
        _, openings = expected_separations_and_openings(np.array([50.0]), np.array([-20.0]), params)
        assert openings[0] == pytest.approx(10.0)

    def test_stochastic_openings_are_bounded_by_positions(self):
        params = SimulationParams(delta_v=0.0, gamma_v=0.5)
        state = make_state([10], [0], [0])
        _, openings = separations_and_openings(state, np.array([110.0]), params, np.random.default_rng(1))
        assert openings[0] == 10

    def test_node_without_employment_still_opens(self):
        params = SimulationParams()
        separations, openings = expected_separations_and_openings(np.array([0.0]), np.array([-1000.0]), params)
        assert separations[0] == 0.0
        assert openings[0] == pytest.approx(0.991 * 100.0)

    def test_stochastic_idle_node_opens_ceiling(self):
        params = SimulationParams(gamma_v=0.25)
        state = make_state([0, 100], [0, 0], [0, 0])
        separations, openings = separations_and_openings(
            state, np.array([10.0, 100.0]), params, np.random.default_rng(0))
        assert separations[0] == 0
        assert openings[0] == 3

    def test_stochastic_draws_match_expectation(self):
        params = SimulationParams(delta_u=0.02, delta_v=0.03, gamma_u=0.2, gamma_v=0.2)
        state = make_state([500, 500], [0, 0], [0, 0])
        d_target = np.array([400.0, 600.0])
        expected_b, expected_c = expected_separations_and_openings(
            state.employed, state.realised_demand - d_target, params)
        rng = np.random.default_rng(11)
        draws = [separations_and_openings(state, d_target, params, rng) for _ in range(4000)]
        mean_b = np.mean([b for b, _ in draws], axis=0)
        mean_c = np.mean([c for _, c in draws], axis=0)
        np.testing.assert_allclose(mean_b, expected_b, rtol=0.02)
        np.testing.assert_allclose(mean_c, expected_c, rtol=0.02)


class TestMatching:

    def test_search_weights(self):
        network = make_network([[0.5, 0.5, 0.0], [0.2, 0.3, 0.5], [0.0, 0.0, 1.0]])
        Q = search_weights(network, np.array([1.0, 3.0, 0.0]))
        np.testing.assert_allclose(Q[0], [0.25, 0.75, 0.0])
        np.testing.assert_allclose(Q[1], [0.2 / 1.1, 0.9 / 1.1, 0.0])
        assert (Q[2] == 0).all()

    def test_applications_follow_the_network(self, line_network):
        state = make_state([0, 0, 0], [5, 4, 3], [2, 2, 2])
        apps = applications(state, line_network, SimulationParams(), np.random.default_rng(0))
        counts = apps.counts(3)
        assert counts.tolist() == [[0, 5, 0], [0, 0, 4], [0, 3, 0]]

    def test_no_open_vacancy_means_no_applications(self, line_network):
        state = make_state([0, 0, 0], [5, 4, 3], [2, 0, 0])
        apps = applications(state, line_network, SimulationParams(), np.random.default_rng(0))
        assert len(apps) == 0

    def test_several_applications_per_worker(self):
        network = make_network(np.full((2, 2), 0.5))
        state = make_state([0, 0], [3, 0], [1, 1])
        apps = applications(state, network, SimulationParams(applications_per_worker=2), np.random.default_rng(2))
        assert len(apps) == 6
        assert np.bincount(apps.worker).tolist() == [2, 2, 2]

    def test_matching_respects_capacity(self):
        rng = np.random.default_rng(4)
        network = make_network(np.full((3, 3), 1.0 / 3))
        state = make_state([0, 0, 0], [40, 2, 7], [3, 10, 0])
        params = SimulationParams(applications_per_worker=3)
        for _ in range(50):
            apps = applications(state, network, params, rng)
            result = matching(apps, state, rng)
            assert (result.flows.hires_in <= state.vacancies).all()
            assert (result.flows.hires_out <= state.unemployed).all()
            assert (result.filled_by_age.sum(axis=1) == result.flows.hires_in).all()
            assert result.flows.flows[:, 2].sum() == 0

    def test_application_frequencies_follow_weighted_vacancies(self):
        # A * v weights 2 and 6
        network = make_network(np.full((2, 2), 0.5))
        state = make_state([0, 0], [100000, 0], [4, 12])
        apps = applications(state, network, SimulationParams(), np.random.default_rng(17))
        counts = apps.counts(2)[0]
        assert counts.sum() == 100000
        sigma = np.sqrt(0.25 * 0.75 / 100000)
        assert abs(counts[0] / 100000 - 0.25) <= 3 * sigma
        assert abs(counts[1] / 100000 - 0.75) <= 3 * sigma

    def test_two_applicants_one_vacancy(self):
        network = make_network([[0.0, 0.0, 1.0], [0.0, 0.0, 1.0], [0.0, 0.0, 1.0]])
        state = make_state([0, 0, 0], [1, 1, 0], [0, 0, 1])
        rng = np.random.default_rng(23)
        wins = []
        for _ in range(4000):
            result = matching(applications(state, network, SimulationParams(), rng), state, rng)
            assert result.flows.hires_in.tolist() == [0, 0, 1]
            wins.append(result.flows.flows[0, 2])
        assert abs(np.mean(wins) - 0.5) <= 3 * np.sqrt(0.25 / 4000)

    def test_fill_probability(self):
        p = fill_probability(np.array([4.0, 0.5, 3.0, 0.0]), np.array([4.0, 1.0, 1.0, 5.0]))
        np.testing.assert_allclose(p, [1.0 - 0.75 ** 4, 0.5, 1.0, 0.0])

    @pytest.mark.parametrize("applicants, vacancies", [(1, 1), (2, 3), (4, 4), (6, 2), (5, 7)])
    def test_closed_form_matches_enumeration(self, applicants, vacancies):
        assert closed_form_hires(applicants, vacancies) == pytest.approx(
            enumerate_expected_hires(applicants, vacancies), abs=1e-12)

    def test_expected_flows_single_target(self, line_network):
        flows, filled = expected_flows(np.array([3.0, 2.0, 1.0]), np.array([0.0, 4.0, 2.0]),
                                       line_network, SimulationParams())
        hires_1 = closed_form_hires(4, 4)
        assert flows[0, 1] == pytest.approx(0.75 * hires_1)
        assert flows[2, 1] == pytest.approx(0.25 * hires_1)
        assert flows[1, 2] == pytest.approx(1.5)
        assert filled[2] == pytest.approx(0.75)

    def test_line_network_single_step_matches_expectation(self, line_network):
        # no separations or openings: received counts are fixed, only slot choice is random
        params = SimulationParams(delta_u=0.0, delta_v=0.0, gamma_u=0.0, gamma_v=0.0)
        state = make_state([10, 10, 10], [3, 2, 1], [0, 4, 2])
        d_target = state.realised_demand.astype(np.float64)
        rng = np.random.default_rng(2024)
        hires = np.array([step(state, d_target, line_network, params, rng).flows.hires_in
                          for _ in range(10000)])
        expected = [0.0, enumerate_expected_hires(4, 4), enumerate_expected_hires(2, 2)]
        se = hires.std(axis=0, ddof=1) / np.sqrt(len(hires))
        assert (np.abs(hires.mean(axis=0) - expected) <= 3 * se + 1e-12).all()

        mean_field = step(state.copy(), d_target, line_network, SimulationParams(
            delta_u=0.0, delta_v=0.0, gamma_u=0.0, gamma_v=0.0, mode=MEAN_FIELD))
        np.testing.assert_allclose(mean_field.flows.hires_in, expected, atol=1e-12)


class TestStep:

    def test_stochastic_round(self):
        rng = np.random.default_rng(0)
        assert stochastic_round(np.array([3.0, 0.0, 7.0]), rng).tolist() == [3, 0, 7]
        draws = stochastic_round(np.full(20000, 2.3), rng)
        assert set(draws.tolist()) == {2, 3}
        assert draws.mean() == pytest.approx(2.3, abs=0.02)

    def test_age_vacancies(self):
        remaining = np.array([[1, 2, 3, 4]])
        aged = age_vacancies(remaining, np.array([5]))
        assert aged.tolist() == [[5, 1, 2, 7]]

    def test_stock_flow_identities(self):
        nodes = make_nodes(4)
        rng = np.random.default_rng(8)
        network = make_network(rng.dirichlet(np.ones(4), size=4), nodes)
        state = make_state([300, 200, 250, 150], [20, 10, 30, 5], [6, 4, 0, 3])
        d_target = np.array([280.0, 230.0, 240.0, 170.0])
        result = step(state, d_target, network, SimulationParams(), rng)
        hires_in, hires_out = result.flows.hires_in, result.flows.hires_out
        np.testing.assert_array_equal(result.state.employed, state.employed - result.separations + hires_in)
        np.testing.assert_array_equal(result.state.unemployed, state.unemployed + result.separations - hires_out)
        np.testing.assert_array_equal(result.state.vacancies, state.vacancies + result.openings - hires_in)
        assert result.state.workers == state.workers
        assert result.state.t == 1

    @pytest.mark.parametrize("mode", [STOCHASTIC, MEAN_FIELD])
    def test_every_worker_separates(self, mode):
        dtype = np.float64 if mode == MEAN_FIELD else np.int64
        params = SimulationParams(delta_u=1.0, delta_v=0.0, mode=mode)
        result = step(make_state([10], [0], [0], dtype=dtype), np.array([10.0]), make_network([[1.0]]),
                      params, np.random.default_rng(0))
        assert result.state.unemployed[0] == 10
        assert result.state.employed[0] == 0
        assert result.state.vacancies[0] == 0

    def test_node_count_mismatch(self, line_network):
        with pytest.raises(InputError):
            step(make_state([1, 1], [0, 0], [0, 0]), np.ones(2), line_network, SimulationParams())

    def test_negative_stock_is_a_fault(self):
        with pytest.raises(SimulationFault, match="employment"):
            _check("employment", np.array([3, -1]), True, 5)
        np.testing.assert_array_equal(_check("vacancies", np.array([1.0, -1e-12]), False, 5), [1.0, 0.0])


class TestRun:

    def test_trajectory_shape_and_seeding(self):
        _, _, _, scenario, network, params = five_node_instance(burn_in_steps=3, seed=5)
        first = simulate(scenario, network, params)
        second = simulate(scenario, network, params)
        other = simulate(scenario, network, params.with_seed(6))
        assert first.employed.shape == (37, 5)
        assert first.years == [2018, 2019, 2020, 2021]
        assert sorted(first.aged_vacancies) == [3, 6, 12]
        np.testing.assert_array_equal(first.employed, second.employed)
        np.testing.assert_array_equal(first.flow_total, second.flow_total)
        assert not np.array_equal(first.unemployed, other.unemployed)

    def test_initial_state(self):
        _, _, _, scenario, _, params = five_node_instance()
        state = initial_state(scenario, SimulationParams(mode=MEAN_FIELD, scale=2.0))
        np.testing.assert_allclose(state.employed, scenario.d_target[0] / 2.0)
        np.testing.assert_allclose(state.unemployed, 0.05 * state.employed)
        np.testing.assert_allclose(state.vacancy_ages[:, 0], 0.009 * state.employed)
        with pytest.raises(InputError):
            initial_state(scenario, params)

    def test_steps_per_year_mismatch(self):
        _, _, _, scenario, network, _ = five_node_instance()
        with pytest.raises(InputError, match="steps/year"):
            simulate(scenario, network, SimulationParams(steps_per_year=4))

    def test_conservation_over_twelve_years(self):
        rng = np.random.default_rng(50)
        nodes = [node for region in ("R1", "R2", "R3", "R4", "R5") for node in make_nodes(10, region)]
        network = make_network(rng.dirichlet(np.full(50, 0.3), size=50), nodes)
        base = rng.uniform(200, 2000, size=50)
        D_star = np.array([base * (1 + rng.normal(0, 0.03, size=50)) ** k for k in range(13)])
        scenario = make_scenario(D_star, nodes, list(range(2018, 2031)))
        for seed in range(3):
            trajectory = simulate(scenario, network, SimulationParams(seed=seed))
            workers = trajectory.employed.sum(axis=1) + trajectory.unemployed.sum(axis=1)
            assert trajectory.n_steps == 145
            assert (workers == workers[0]).all()

    def test_mean_field_run_matches_oracle(self):
        e0, u0, v0, scenario, network, params = five_node_instance(mode=MEAN_FIELD, burn_in_steps=6)
        initial = make_state(e0, u0, v0, dtype=np.float64)
        trajectory = run(initial, scenario, network, params)
        oracle = mean_field_oracle(FIVE_NODE_MATRIX.tolist(), e0, u0, v0, scenario.d_target.tolist(),
                                   params, burn_in_steps=6)
        np.testing.assert_allclose(trajectory.employed, oracle["employed"], rtol=0, atol=1e-9)
        np.testing.assert_allclose(trajectory.unemployed, oracle["unemployed"], rtol=0, atol=1e-9)
        np.testing.assert_allclose(trajectory.vacancies, oracle["vacancies"], rtol=0, atol=1e-9)

    def test_stochastic_ensemble_tracks_mean_field(self):
        e0, u0, v0, scenario, network, params = five_node_instance()
        initial = make_state(e0, u0, v0)
        runs = [run(initial, scenario, network, params.with_seed(seed)) for seed in range(200)]
        oracle = mean_field_oracle(FIVE_NODE_MATRIX.tolist(), e0, u0, v0, scenario.d_target.tolist(), params)
        for name in ("employed", "unemployed", "vacancies"):
            ensemble = np.array([getattr(trajectory, name) for trajectory in runs], dtype=np.float64)
            expected = np.array(oracle[name])
            for t in (0, 12, 24, 36):
                totals = ensemble[:, t].sum(axis=1)
                se = totals.std(ddof=1) / np.sqrt(len(runs))
                assert abs(totals.mean() - expected[t].sum()) <= 3 * se + 1e-9, (name, t)
                node_se = ensemble[:, t].std(axis=0, ddof=1) / np.sqrt(len(runs))
                assert (np.abs(ensemble[:, t].mean(axis=0) - expected[t]) <= 4 * node_se + 1e-9).all(), (name, t)

    @pytest.mark.parametrize("mode", [STOCHASTIC, MEAN_FIELD])
    def test_zero_shock_without_turnover_is_constant(self, mode):
        dtype = np.float64 if mode == MEAN_FIELD else np.int64
        nodes = make_nodes(3)
        employed = np.array([100, 200, 300])
        scenario = make_scenario(np.tile(employed, (3, 1)), nodes, [2018, 2019, 2020])
        network = make_network(np.full((3, 3), 1.0 / 3), nodes)
        params = SimulationParams(delta_u=0.0, delta_v=0.0, gamma_u=0.1, gamma_v=0.1, mode=mode)
        trajectory = run(make_state(employed, [5, 10, 15], [0, 0, 0], dtype=dtype), scenario, network, params)
        assert (trajectory.employed == employed).all()
        assert (trajectory.unemployed == [5, 10, 15]).all()
        assert (trajectory.vacancies == 0).all()

    def test_unfilled_vacancy_ages_through_the_run(self):
        # one vacancy open from t=0, nobody employed or searching
        nodes = make_nodes(1)
        scenario = make_scenario([[1.0], [1.0]], nodes, [2018, 2019])
        params = SimulationParams(delta_u=0.0, delta_v=0.0, gamma_u=0.0, gamma_v=0.0, burn_in_steps=0)
        trajectory = run(make_state([0], [0], [1]), scenario, make_network([[1.0]], nodes), params)
        assert trajectory.aged_vacancies[6][:13, 0].tolist() == [0] * 6 + [1] * 7
        assert avg_vacancy_rate(trajectory, range(12), x_months=6)[0] == pytest.approx(0.5)
