import math

import numpy as np
import pytest

from relaybound.blocks import all_sequences, codebook_channel
from relaybound.channels import RelayChannel, bec, bsc, det_example_channels, product_companion
from relaybound.simlab.codes import (RelayCode, code_success_probability, coloring_conditional_entropy,
                                     constant_coloring, det_code, random_code)
from relaybound.simlab.guessing import (ProxyUnavailableError, ball_size, exact_guessing_success,
                                        guess_radius, guessing_decoder_sim, proxy_mode, sample_ball)


def det_relay():
    w_y, w_z = det_example_channels()
    return RelayChannel(w_y, w_z, 0.5)


class TestHelpers:
    @pytest.mark.parametrize("n, radius, alphabet", [(4, 0, 2), (4, 2, 2), (3, 1, 3), (5, 9, 2)])
    def test_ball_size_counts(self, n, radius, alphabet):
        seqs = all_sequences(alphabet, n)
        brute = int(np.count_nonzero((seqs != 0).sum(axis=1) <= radius))
        assert ball_size(n, radius, alphabet) == brute

    def test_radius_rounds_up_and_clips(self):
        assert guess_radius(4, 2.0, 0.0) == 0
        assert guess_radius(8, 1.0, 1 / 64) == 1
        assert guess_radius(4, 4.0, 0.5) == 4

    def test_ball_samples_uniform(self):
        rng = np.random.default_rng(0)
        centers = np.zeros((60_000, 3), dtype=np.int64)
        pts = sample_ball(centers, 1, 3, rng)
        assert (pts != 0).sum(axis=1).max() <= 1
        idx = pts @ np.array([9, 3, 1])
        counts = np.bincount(idx, minlength=27)[np.unique(idx)]
        assert counts.size == ball_size(3, 1, 3) == 7
        # each of 7 points has mass 1/7; binomial sd is about 90
        assert np.all(np.abs(counts - 60_000 / 7) < 5 * math.sqrt(60_000 / 7))


class TestProxyMode:
    @pytest.mark.parametrize("w_y, w_z, mode", [(bsc(0.1), bsc(0.1), "iid"), (bec(0.2), bec(0.5), "XYZ"),
                                                (bec(0.5), bec(0.2), "XZY")])
    def test_structure(self, w_y, w_z, mode):
        assert proxy_mode(RelayChannel(w_y, w_z))[0] == mode

    def test_companion_overrides(self):
        relay = RelayChannel(bsc(0.1), bsc(0.1))
        assert proxy_mode(relay, product_companion(relay))[0] == "companion"

    def test_unrelated_outputs(self):
        with pytest.raises(ProxyUnavailableError):
            proxy_mode(RelayChannel(bsc(0.1), bec(0.5)))


class TestGuessingDecoder:
    def test_single_color_matches_code(self):
        relay = RelayChannel(bsc(0.1), bsc(0.1), 0.0)
        code = random_code(relay, 4, 0.5, 0.0, seed=2)
        out = guessing_decoder_sim(code, relay, 2.0, 20_000, seed=3)
        truth = code_success_probability(code, relay)
        assert out.references["radius"] == 0 and out.references["a_n"] == 0
        assert exact_guessing_success(code, relay, 2.0) == pytest.approx(truth, abs=1e-14)
        assert abs(out.estimate - truth) <= out.ci_halfwidth

    def test_full_ball_matches_exact(self):
        relay = RelayChannel(bec(0.5), bec(0.5), 0.5)
        code = random_code(relay, 4, 0.75, 0.5, seed=0)
        out = guessing_decoder_sim(code, relay, 4.0, 50_000, seed=11)
        assert out.references["radius"] >= code.n
        exact = exact_guessing_success(code, relay, 4.0)
        assert abs(out.estimate - exact) <= out.ci_halfwidth
        # the guessed color is uniform and independent of the channel outputs
        colors = np.bincount(code.coloring.color_of) / code.coloring.color_of.size
        p_y = codebook_channel(code.codebook, relay.w_y)
        per_y = np.zeros(code.size)
        for j, w in enumerate(colors):
            hits = code.decoder[j][None, :] == np.arange(code.size)[:, None]
            per_y += w * (p_y * hits).sum(axis=1)
        assert exact == pytest.approx(per_y.mean(), abs=1e-12)

    @pytest.mark.parametrize("w_y, w_z", [(bec(0.2), bec(0.5)), (bec(0.5), bec(0.2))])
    def test_degraded_modes_match_exact(self, w_y, w_z):
        relay = RelayChannel(w_y, w_z, 0.5)
        code = random_code(relay, 3, 2 / 3, 0.5, seed=4)
        out = guessing_decoder_sim(code, relay, 1.5, 40_000, seed=5)
        exact = exact_guessing_success(code, relay, 1.5)
        assert abs(out.estimate - exact) <= 1.5 * out.ci_halfwidth

    def test_companion_mode_matches_exact(self):
        relay = det_relay()
        code = det_code(4, 0.5)
        comp = product_companion(relay)
        out = guessing_decoder_sim(code, relay, 2.0, 40_000, seed=8, companion=comp)
        assert abs(out.estimate - exact_guessing_success(code, relay, 2.0, comp)) <= out.ci_halfwidth

    def test_deterministic_code_floor(self):
        relay = det_relay()
        code = det_code(6, 0.5)
        comp = product_companion(relay)
        for seed in range(1, 11):
            out = guessing_decoder_sim(code, relay, 2.0, 100_000, seed, companion=comp)
            assert out.estimate >= out.references["floor"]
            assert out.estimate <= 1.0

    def test_reproducible(self):
        relay = RelayChannel(bec(0.2), bec(0.5), 0.5)
        code = random_code(relay, 4, 0.5, 0.5, seed=1)
        a = guessing_decoder_sim(code, relay, 2.0, 9000, seed=42)
        b = guessing_decoder_sim(code, relay, 2.0, 9000, seed=42)
        assert a.to_json() == b.to_json()
        assert guessing_decoder_sim(code, relay, 2.0, 9000, seed=43).estimate != a.estimate

    def test_references(self):
        relay = RelayChannel(bec(0.5), bec(0.5), 0.5)
        code = random_code(relay, 4, 0.75, 0.5, seed=0)
        out = guessing_decoder_sim(code, relay, 2.0, 1000, seed=0)
        refs = out.references
        assert refs["a_n"] == pytest.approx(coloring_conditional_entropy(code, relay.w_z))
        assert refs["floor"] == pytest.approx(0.5 ** 3 / 4 / refs["ball_size"])
        assert 0 < refs["ceiling"] <= 1

    def test_rejects_few_trials(self):
        relay = RelayChannel(bsc(0.1), bsc(0.1), 0.0)
        code = RelayCode.with_map_decoder(all_sequences(2, 2), constant_coloring(2, 2), relay)
        with pytest.raises(ValueError):
            guessing_decoder_sim(code, relay, 2.0, 999, seed=0)
        with pytest.raises(ValueError):
            guessing_decoder_sim(code, relay, 1.0, 5000, seed=0)

    def test_needs_companion(self):
        relay = RelayChannel(bsc(0.1), bec(0.5), 0.5)
        code = random_code(relay, 3, 2 / 3, 0.5, seed=0)
        with pytest.raises(ProxyUnavailableError):
            guessing_decoder_sim(code, relay, 2.0, 1000, seed=0)
