from fractions import Fraction

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mpps import degradation as deg
from mpps.chaos import MapKind, SubKey
from mpps.errors import ParameterError

CONFIGS = [(kind, mu, n) for kind, mu, ns in deg.FIGURE_CONFIGS for n in ns]


def _nx_graph(g):
    G = nx.DiGraph()
    G.add_nodes_from(range(g.size))
    G.add_edges_from((i, int(j)) for i, j in enumerate(g.successor))
    return G


class TestParseMu:
    @pytest.mark.parametrize(
        "text, expected",
        [
            ("121/2^5", Fraction(121, 32)),
            ("63/2**4", Fraction(63, 16)),
            ("121/32", Fraction(121, 32)),
            ("3.78125", 3.78125),
            (Fraction(61, 16), Fraction(61, 16)),
            (3.5, 3.5),
        ],
    )
    def test_forms(self, text, expected):
        assert deg.parse_mu(text) == expected

    def test_configs(self):
        assert [float(mu) for _, mu, _ in deg.FIGURE_CONFIGS] == [3.78125, 3.84375, 3.8125, 3.9375]


class TestGraphs:
    @pytest.mark.parametrize("kind, mu, n", CONFIGS)
    @pytest.mark.parametrize("mode", list(deg.QuantMode))
    def test_against_networkx(self, kind, mu, n, mode):
        g = deg.build_graph(kind, mu, n, mode)
        s = deg.summarize(g)
        G = _nx_graph(g)
        assert s.nodes == G.number_of_nodes() == 2**n
        assert all(d == 1 for _, d in G.out_degree())
        comps = list(nx.weakly_connected_components(G))
        cycles = list(nx.simple_cycles(G))
        assert s.components == len(comps) == len(cycles)
        assert sorted(s.cycle_lengths) == sorted(len(c) for c in cycles)
        for comp in comps:
            assert sum(1 for c in cycles if c[0] in comp) == 1
        assert s.cycle_nodes == sum(len(c) for c in cycles)
        assert sum(k * v for k, v in s.indegree_histogram.items()) == 2**n

    def test_tail_lengths_match_walks(self):
        g = deg.build_graph(MapKind.CLS, "61/2^4", 7, "floor")
        s = deg.summarize(g)
        G = _nx_graph(g)
        on_cycle = {v for c in nx.simple_cycles(G) for v in c}
        for v in range(g.size):
            steps, u = 0, v
            while u not in on_cycle:
                u = int(g.successor[u])
                steps += 1
            assert s.tail[v] == steps
        assert s.max_tail == int(s.tail.max())

    def test_components_labelled_by_smallest_cycle_node(self):
        s = deg.summarize(np.array([1, 0, 3, 3, 2]))
        assert s.components == 2
        assert s.cycle_lengths == [2, 1]
        assert s.component.tolist() == [0, 0, 1, 1, 1]
        assert s.tail.tolist() == [0, 0, 1, 0, 2]

    def test_successor_definition(self):
        g = deg.build_graph("cls", "121/2^5", 9, "round")
        mu = 121 / 32
        for i in (0, 1, 100, 257, 511):
            x = i / 512
            y = (mu * x * (1 - x) + 0.25 * (4 - mu) * np.sin(np.pi * x)) % 1.0
            assert g.successor[i] == int(np.floor(y * 512 + 0.5)) % 512

    def test_zero_is_a_fixed_point(self):
        for kind in MapKind:
            for mode in deg.QuantMode:
                assert deg.build_graph(kind, 3.9, 6, mode).successor[0] == 0

    @pytest.mark.parametrize("n", [1, 25])
    def test_precision_bounds(self, n):
        with pytest.raises(ParameterError):
            deg.build_graph("cls", 3.9, n)

    def test_mu_bounds(self):
        with pytest.raises(ParameterError):
            deg.build_graph("clt", "5/1", 6)

    @pytest.mark.parametrize("kind, mu, n", CONFIGS[:3])
    def test_dot_is_deterministic(self, kind, mu, n):
        a = deg.export_dot(deg.build_graph(kind, mu, n))
        b = deg.export_dot(deg.build_graph(kind, mu, n))
        assert a == b
        assert a.count("->") == 2**n

    @given(st.sampled_from(list(MapKind)), st.floats(0.0, 4.0), st.integers(2, 9), st.sampled_from(list(deg.QuantMode)))
    @settings(max_examples=40, deadline=None)
    def test_summary_invariants(self, kind, mu, n, mode):
        s = deg.summarize(deg.build_graph(kind, mu, n, mode))
        assert s.components >= 1
        assert s.components == len(s.cycle_lengths)
        assert sum(k * v for k, v in s.indegree_histogram.items()) == 2**n
        assert s.as_dict()["nodes"] == 2**n


class TestSymmetry:
    @pytest.mark.parametrize("kind", list(MapKind))
    @pytest.mark.parametrize("mu", [3.5, 3.9, 4.0])
    def test_mirror_states(self, kind, mu):
        assert deg.check_symmetry(kind, mu, samples=20_000) <= 1e-9

    def test_seam_pairs_use_short_distance(self):
        # images of x near 0 and of 1 - x can land on opposite sides of the 0/1 seam
        xs = np.array([0.0, 1e-12, 1 - 1e-12, 0.5])
        assert deg.check_symmetry("cls", 3.9, xs=xs) <= 1e-9

    def test_keystream_agreement_is_reported(self):
        rate = deg.symmetric_keystream_agreement(SubKey(0.23, 3.93, 500), 2000)
        assert 0.0 <= rate <= 1.0


class TestWeakKeys:
    def test_report(self):
        rep = deg.find_weak_keys()
        assert [(s, t) for s, t in rep.identity_rule_pairs if s == t] == [(r, r) for r in range(8)]
        assert rep.per_channel_count == 8
        assert rep.joint_count == 512
        assert rep.claimed_joint_count == 64
        assert rep.count_discrepancy
        for name, orbit in rep.fixed_point_orbits.items():
            assert all(v == 0.0 for v in orbit[1:]), name

    def test_identity_pairs_are_exactly_the_f_identity_class(self):
        from mpps import dna

        rep = deg.find_weak_keys()
        assert sorted(rep.identity_rule_pairs) == sorted(dna.enumerate_distinct_maps().f_classes[(0, 1, 2, 3)])
