import math

import numpy as np
import pytest
from conftest import channels, distributions
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import binary_input_capacity, h2, mutual_information_brute

from relaybound.blocks import EnumerationBudgetError
from relaybound.channels import (ChannelError, CompanionChannel, RelayChannel, bec, bsc, channel_matrix,
                                 companion_from_kernel, compose, degradation_test, det_example_channels,
                                 identity, joint_channel, mix_companions, prob_vector, product_companion)
from relaybound.info import (binary_entropy, capacity, entropy, mutual_information, pmi_mean, pmi_quantile,
                             pmi_samples)


class TestValidation:
    def test_prob_vector_rejects_bad_sum(self):
        with pytest.raises(ChannelError, match="sum"):
            prob_vector([0.5, 0.6])

    def test_prob_vector_rejects_negative(self):
        with pytest.raises(ChannelError):
            prob_vector([1.5, -0.5])

    def test_channel_matrix_names_bad_row(self):
        with pytest.raises(ChannelError, match="row 1"):
            channel_matrix([[1, 0], [0.3, 0.3]])

    def test_validated_arrays_are_read_only(self):
        w = bsc(0.1)
        with pytest.raises(ValueError):
            w[0, 0] = 0.5

    def test_builtin_parameter_ranges(self):
        for bad in (lambda: bec(1.5), lambda: bsc(-0.1), lambda: identity(0)):
            with pytest.raises(ChannelError):
                bad()

    def test_relay_rejects_mismatched_inputs(self):
        with pytest.raises(ChannelError, match="input alphabets"):
            RelayChannel(bec(0.5), identity(3))

    def test_relay_rejects_negative_r0(self):
        with pytest.raises(ChannelError):
            RelayChannel(bec(0.5), bec(0.5), -0.1)


class TestEntropy:
    @pytest.mark.parametrize("p, expected", [([0.5, 0.5], 1.0), ([1, 0], 0.0), ([0.25] * 4, 2.0)])
    def test_examples(self, p, expected):
        assert entropy(p) == pytest.approx(expected, abs=1e-15)

    def test_binary_entropy_values(self):
        assert binary_entropy(0.5) == 1.0
        assert binary_entropy(0.0) == binary_entropy(1.0) == 0.0
        assert binary_entropy(0.11) == pytest.approx(0.4999, abs=1e-3)
        assert binary_entropy(0.11) == pytest.approx(float(h2(0.11)), abs=1e-15)

    def test_binary_entropy_domain(self):
        with pytest.raises(ValueError):
            binary_entropy(1.2)


class TestMutualInformation:
    def test_identity_uniform(self):
        for k in (2, 3, 5):
            assert mutual_information(np.full(k, 1 / k), identity(k)) == pytest.approx(math.log2(k), abs=1e-12)

    def test_equal_rows_give_zero(self):
        assert mutual_information([0.3, 0.7], [[0.2, 0.8], [0.2, 0.8]]) == pytest.approx(0.0, abs=1e-15)

    def test_bec_uniform(self):
        assert mutual_information([0.5, 0.5], bec(0.5)) == pytest.approx(0.5, abs=1e-15)

    def test_dimension_mismatch(self):
        with pytest.raises(ChannelError):
            mutual_information([0.5, 0.5], identity(3))

    @given(channels(min_in=2, max_in=4), st.data())
    @settings(max_examples=60, deadline=None)
    def test_matches_direct_sum(self, w, data):
        p = data.draw(distributions(w.shape[0]))
        assert mutual_information(p, w) == pytest.approx(mutual_information_brute(p, w), abs=1e-12)


class TestCapacity:
    def test_bec_half(self):
        c, p = capacity(bec(0.5))
        assert c == pytest.approx(0.5, abs=1e-9)
        np.testing.assert_allclose(p, [0.5, 0.5], atol=1e-9)

    def test_identity(self):
        assert capacity(identity(2))[0] == pytest.approx(1.0, abs=1e-9)

    def test_two_bec_joint(self):
        c, _ = capacity(joint_channel(RelayChannel(bec(0.5), bec(0.5))))
        assert c == pytest.approx(0.75, abs=1e-6)

    def test_bsc_closed_form(self):
        for p in (0.01, 0.1, 0.3):
            assert capacity(bsc(p))[0] == pytest.approx(1 - float(h2(p)), abs=1e-9)

    def test_det_example_marginal(self):
        w_y, _ = det_example_channels()
        assert capacity(w_y)[0] == pytest.approx(1.0, abs=1e-9)

    def test_asymmetric_against_grid(self):
        w = [[0.9, 0.1, 0.0], [0.2, 0.3, 0.5]]
        assert capacity(w, tol=1e-11)[0] == pytest.approx(binary_input_capacity(w), abs=1e-8)

    def test_rejects_nonpositive_tol(self):
        with pytest.raises(ValueError):
            capacity(bsc(0.1), tol=0)

    @given(channels(min_in=2, max_in=3, min_out=2, max_out=3), channels(min_in=2, max_in=3, min_out=2, max_out=3))
    @settings(max_examples=30, deadline=None)
    def test_joint_dominates_marginals(self, w_y, w_z):
        if w_y.shape[0] != w_z.shape[0]:
            return
        tol = 1e-9
        relay = RelayChannel(w_y, w_z)
        c_joint = capacity(joint_channel(relay), tol)[0]
        assert c_joint >= max(capacity(w_y, tol)[0], capacity(w_z, tol)[0]) - 2 * tol


class TestJointChannel:
    def test_identity_pair(self):
        joint = joint_channel(RelayChannel(identity(2), identity(2)))
        np.testing.assert_array_equal(joint, [[1, 0, 0, 0], [0, 0, 0, 1]])

    def test_constant_relay_keeps_y(self):
        relay = RelayChannel(bsc(0.2), [[0.4, 0.6], [0.4, 0.6]])
        cube = joint_channel(relay).reshape(2, 2, 2)
        np.testing.assert_array_equal(cube.sum(axis=2), relay.w_y)

    def test_two_bec_entry(self):
        cube = joint_channel(RelayChannel(bec(0.5), bec(0.5))).reshape(2, 3, 3)
        assert cube[0, 0, 2] == 0.25
        assert cube[1, 1, 2] == 0.25

    @given(channels(), channels())
    @settings(max_examples=50, deadline=None)
    def test_rows_stochastic(self, w_y, w_z):
        if w_y.shape[0] != w_z.shape[0]:
            return
        joint = joint_channel(RelayChannel(w_y, w_z))
        np.testing.assert_allclose(joint.sum(axis=1), 1.0, atol=1e-12)


class TestDegradation:
    def test_identical_channels(self):
        np.testing.assert_array_equal(degradation_test(bec(0.3), bec(0.3)), np.eye(3))

    def test_bec_kernel(self):
        q = degradation_test(bec(0.2), bec(0.5))
        assert q is not None
        np.testing.assert_allclose(bec(0.2) @ q, bec(0.5), atol=1e-9)
        np.testing.assert_allclose(q[:2, 2], 0.375, atol=1e-9)
        np.testing.assert_allclose(q[2], [0, 0, 1], atol=1e-9)

    def test_cannot_unerase(self):
        assert degradation_test(bec(0.5), identity(2)) is None

    def test_dimension_mismatch(self):
        with pytest.raises(ChannelError):
            degradation_test(bec(0.5), identity(3))

    @given(channels(min_in=2, max_in=3, min_out=2, max_out=3), channels(min_in=2, max_in=3, min_out=2, max_out=3))
    @settings(max_examples=40, deadline=None)
    def test_data_processing(self, w_a, w_b):
        if w_a.shape[0] != w_b.shape[0]:
            return
        q = degradation_test(w_a, w_b)
        if q is None:
            return
        np.testing.assert_allclose(q.sum(axis=1), 1.0, atol=1e-12)
        assert capacity(w_b)[0] <= capacity(w_a)[0] + 2e-9

    @given(channels(min_in=2, max_in=3, min_out=2, max_out=3), channels(min_in=2, max_out=3, max_in=3, min_out=2))
    @settings(max_examples=30, deadline=None)
    def test_finds_planted_kernel(self, w, q):
        if w.shape[1] != q.shape[0]:
            return
        found = degradation_test(w, compose(w, q))
        assert found is not None
        np.testing.assert_allclose(w @ found, w @ q, atol=1e-9)


class TestCompanion:
    def test_iid_identity_kernel(self):
        relay = RelayChannel(bec(0.5), bec(0.5))
        comp = companion_from_kernel(relay, identity(3))
        cube = comp.cube
        for y in range(3):
            np.testing.assert_allclose(cube[:, y, y], relay.w_y[:, y])
        assert np.count_nonzero(cube) == np.count_nonzero(relay.w_y)

    def test_constant_kernel_is_product(self):
        relay = RelayChannel(bsc(0.1), [[0.3, 0.7], [0.3, 0.7]])
        comp = companion_from_kernel(relay, [[0.3, 0.7], [0.3, 0.7]])
        np.testing.assert_allclose(comp.joint, product_companion(relay).joint, atol=1e-15)

    def test_degraded_bec_pair(self):
        relay = RelayChannel(bec(0.2), bec(0.5))
        comp = companion_from_kernel(relay, degradation_test(relay.w_y, relay.w_z))
        np.testing.assert_allclose(comp.cube.sum(axis=1), relay.w_z, atol=1e-9)
        np.testing.assert_allclose(comp.y_marginal(), relay.w_y, atol=1e-12)

    def test_kernel_mismatch(self):
        relay = RelayChannel(bec(0.5), bec(0.2))
        with pytest.raises(ChannelError, match="reproduce"):
            companion_from_kernel(relay, identity(3))

    def test_joint_marginal_mismatch(self):
        relay = RelayChannel(bsc(0.1), bsc(0.1))
        with pytest.raises(ChannelError, match="marginals"):
            CompanionChannel(joint_channel(RelayChannel(bsc(0.2), bsc(0.1))), relay)

    def test_mixture_preserves_marginals(self):
        relay = RelayChannel(bec(0.5), bec(0.5))
        mixed = mix_companions(companion_from_kernel(relay, identity(3)), product_companion(relay), 0.3)
        np.testing.assert_allclose(mixed.y_marginal(), relay.w_y, atol=1e-12)
        assert capacity(joint_channel(relay))[0] >= capacity(mixed.joint)[0] >= 0.5 - 1e-9

    @given(channels(min_in=2, max_in=3, min_out=2, max_out=3), channels(min_in=2, max_in=3, min_out=2, max_out=3),
           st.floats(0, 1))
    @settings(max_examples=30, deadline=None)
    def test_companion_y_capacity_is_cxy(self, w_y, w_z, t):
        if w_y.shape[0] != w_z.shape[0]:
            return
        relay = RelayChannel(w_y, w_z)
        comp = product_companion(relay)
        kernel = degradation_test(w_y, w_z)
        if kernel is not None:
            comp = mix_companions(companion_from_kernel(relay, kernel), comp, t)
        np.testing.assert_allclose(comp.y_marginal(), w_y, atol=1e-9)
        assert capacity(comp.y_marginal())[0] == pytest.approx(capacity(w_y)[0], abs=2e-9)


class TestPmi:
    def test_deterministic_distinct_outputs(self):
        samples = pmi_samples(np.full(4, 0.25), identity(4))
        assert samples == [(2.0, 1.0)]

    def test_independent_output(self):
        samples = pmi_samples([0.2, 0.8], [[0.5, 0.5], [0.5, 0.5]])
        assert len(samples) == 1 and samples[0].value == 0.0

    def test_bec_single_letter(self):
        samples = pmi_samples([0.5, 0.5], bec(0.5))
        assert [(s.value, s.weight) for s in samples] == [(0.0, 0.5), (1.0, 0.5)]

    def test_quantile(self):
        samples = pmi_samples([0.5, 0.5], bec(0.5))
        assert pmi_quantile(samples, 0.5) == 0.0
        assert pmi_quantile(samples, 0.9) == 1.0
        with pytest.raises(ValueError):
            pmi_quantile(samples, 1.5)

    def test_conditional_zero_when_z_copies_y(self):
        relay = RelayChannel(bsc(0.2), bsc(0.2))
        comp = companion_from_kernel(relay, identity(2))
        samples = pmi_samples([0.5, 0.5], comp.joint, condition=relay.w_y)
        assert [s.value for s in samples] == [0.0]

    def test_conditional_requires_matching_marginal(self):
        relay = RelayChannel(bsc(0.2), bsc(0.2))
        with pytest.raises(ChannelError):
            pmi_samples([0.5, 0.5], joint_channel(relay), condition=bsc(0.3))

    def test_budget(self):
        with pytest.raises(EnumerationBudgetError):
            pmi_samples([0.5, 0.5], bsc(0.1), budget=2)

    @given(channels(min_in=2, max_in=4), st.data())
    @settings(max_examples=60, deadline=None)
    def test_mean_is_mutual_information(self, w, data):
        p = data.draw(distributions(w.shape[0]))
        samples = pmi_samples(p, w)
        assert sum(s.weight for s in samples) == pytest.approx(1.0, abs=1e-9)
        assert pmi_mean(samples) == pytest.approx(mutual_information(p, w), abs=1e-9)
