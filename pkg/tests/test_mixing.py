import numpy as np
import pytest

from pairmix import (
    MixWeights,
    PairMixConfig,
    Waveform,
    compose_batch,
    concat_pair,
    fix_length,
    generate_pair,
    join_captions,
    mel_transform,
    plan_batch,
    sample_mix_level,
    sample_mix_weights,
)
from pairmix.synth import sine_wave


def two_sources(params, freqs=(440.0, 2000.0), seconds=0.25):
    a = sine_wave(freqs[0], seconds, params.sample_rate)
    b = sine_wave(freqs[1], seconds, params.sample_rate)
    return [(a, "a dog barks."), (b, "a man speaks")]


class TestSampling:
    def test_fixed_mode_equal_weights(self):
        w = sample_mix_weights("fixed", 2, rng_seed=0)
        assert w.values == (0.5, 0.5)
        w3 = sample_mix_weights("fixed", 3, rng_seed=0)
        assert all(v == pytest.approx(1 / 3) for v in w3)

    def test_beta_mode_moments(self):
        rngs = np.random.default_rng(123)
        draws = np.array(
            [sample_mix_weights("beta", 2, int(s)).values[0] for s in rngs.integers(2**63, size=4000)]
        )
        assert 0.4 < draws.mean() < 0.6
        assert 0.17 < draws.var() < 0.25  # analytic Beta(0.1, 0.1) variance is 0.2083

    def test_weights_sum_to_one(self):
        for n in (2, 3, 5):
            for seed in range(10):
                w = sample_mix_weights("beta", n, seed)
                assert abs(sum(w.values) - 1.0) <= 1e-9
                assert all(0.0 <= v <= 1.0 for v in w)

    def test_rejects_single_source(self):
        with pytest.raises(ValueError):
            sample_mix_weights("beta", 1, 0)

    def test_level_degenerate_probabilities(self):
        assert all(sample_mix_level(0.0, s) == 0 for s in range(50))
        assert all(sample_mix_level(1.0, s) == 1 for s in range(50))

    def test_level_deterministic(self):
        assert sample_mix_level(0.5, 42) == sample_mix_level(0.5, 42)


class TestMixWeights:
    def test_rejects_bad_sum(self):
        with pytest.raises(ValueError):
            MixWeights((0.5, 0.6))

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            MixWeights((-0.1, 1.1))


class TestGeneratePair:
    def test_one_hot_weights_bit_equal_both_levels(self, small_params):
        sources = two_sources(small_params)
        direct = mel_transform(sources[0][0], small_params)
        for level in (0, 1):
            pair = generate_pair(sources, MixWeights((1.0, 0.0)), level, small_params)
            np.testing.assert_array_equal(pair.mel.data, direct.data)
        assert pair.caption == "a dog barks a man speaks"

    def test_spectrogram_level_is_cellwise_mix(self, small_params):
        sources = two_sources(small_params)
        weights = MixWeights((0.3, 0.7))
        pair = generate_pair(sources, weights, 0, small_params)
        want = 0.3 * mel_transform(sources[0][0], small_params).data + 0.7 * mel_transform(
            sources[1][0], small_params
        ).data
        np.testing.assert_allclose(pair.mel.data, want, atol=1e-6)

    def test_waveform_level_transforms_the_mix(self, small_params):
        sources = two_sources(small_params)
        weights = MixWeights((0.5, 0.5))
        pair = generate_pair(sources, weights, 1, small_params)
        mixed = Waveform(
            (0.5 * sources[0][0].samples.astype(np.float64)
             + 0.5 * sources[1][0].samples.astype(np.float64)).astype(np.float32),
            small_params.sample_rate,
        )
        np.testing.assert_array_equal(pair.mel.data, mel_transform(mixed, small_params).data)

    def test_levels_genuinely_differ(self, small_params):
        sources = two_sources(small_params)
        weights = MixWeights((0.5, 0.5))
        wave_level = generate_pair(sources, weights, 1, small_params)
        spec_level = generate_pair(sources, weights, 0, small_params)
        gap = float(np.max(np.abs(wave_level.mel.data - spec_level.mel.data)))
        assert gap > 0.1

    def test_permutation_invariance_of_spectrogram_mix(self, small_params):
        sources = two_sources(small_params)
        forwards = generate_pair(sources, MixWeights((0.3, 0.7)), 0, small_params)
        backwards = generate_pair(sources[::-1], MixWeights((0.7, 0.3)), 0, small_params)
        np.testing.assert_allclose(forwards.mel.data, backwards.mel.data, atol=1e-6)

    def test_captions_appear_in_order(self, small_params):
        sources = two_sources(small_params)
        pair = generate_pair(sources, MixWeights((0.5, 0.5)), 0, small_params)
        first = pair.caption.find("a dog barks")
        second = pair.caption.find("a man speaks")
        assert 0 <= first < second

    def test_linear_power_mix_option(self, small_params):
        sources = two_sources(small_params)
        weights = MixWeights((0.5, 0.5))
        log_mix = generate_pair(sources, weights, 0, small_params, log_domain_mix=True)
        lin_mix = generate_pair(sources, weights, 0, small_params, log_domain_mix=False)
        a = np.exp(mel_transform(sources[0][0], small_params).data.astype(np.float64))
        b = np.exp(mel_transform(sources[1][0], small_params).data.astype(np.float64))
        want = np.log(np.maximum(0.5 * a + 0.5 * b, small_params.log_floor))
        np.testing.assert_allclose(lin_mix.mel.data, want, atol=1e-5)
        assert float(np.max(np.abs(log_mix.mel.data - lin_mix.mel.data))) > 1e-3

    def test_peak_flag_on_hot_mix(self, small_params):
        a = sine_wave(300.0, 0.2, small_params.sample_rate, amplitude=0.9)
        b = sine_wave(300.0, 0.2, small_params.sample_rate, amplitude=0.9)
        in_phase = generate_pair([(a, "x"), (b, "y")], MixWeights((0.5, 0.5)), 1, small_params)
        assert "waveform_peak_exceeded" not in in_phase.flags  # mix peaks at 0.9
        big = Waveform(np.full(3200, 1.5, dtype=np.float32), small_params.sample_rate)
        hot = generate_pair([(big, "x"), (big, "y")], MixWeights((0.9, 0.1)), 1, small_params)
        assert "waveform_peak_exceeded" in hot.flags

    def test_rejects_mismatched_lengths(self, small_params):
        a = sine_wave(440.0, 0.25, small_params.sample_rate)
        b = sine_wave(440.0, 0.30, small_params.sample_rate)
        with pytest.raises(ValueError, match="length"):
            generate_pair([(a, "x"), (b, "y")], MixWeights((0.5, 0.5)), 0, small_params)

    def test_rejects_mismatched_rates(self, small_params):
        a = sine_wave(440.0, 0.25, small_params.sample_rate)
        b = sine_wave(440.0, 0.25, 8000)
        with pytest.raises(ValueError, match="rate"):
            generate_pair([(a, "x"), (b, "y")], MixWeights((0.5, 0.5)), 0, small_params)


class TestJoinCaptions:
    def test_strips_non_final_terminal_punctuation(self):
        assert join_captions(["a dog barks.", "a man speaks"]) == "a dog barks a man speaks"

    def test_keeps_final_punctuation(self):
        assert join_captions(["a", "b."]) == "a b."

    def test_custom_joiner(self):
        assert join_captions(["a", "b"], joiner=" , ") == "a , b"


class TestConcatPair:
    def test_full_clips_truncate_back(self, small_params):
        seconds = 0.5
        sources = two_sources(small_params, seconds=seconds)
        pair = concat_pair(sources, small_params, clip_seconds=seconds)
        assert "concat_truncated" in pair.flags
        only_first = mel_transform(fix_length(sources[0][0], seconds), small_params)
        np.testing.assert_array_equal(pair.mel.data, only_first.data)

    def test_short_clips_both_present_plus_padding(self, small_params):
        rate = small_params.sample_rate
        a = sine_wave(440.0, 0.2, rate)
        b = sine_wave(880.0, 0.2, rate)
        pair = concat_pair([(a, "a"), (b, "b")], small_params, clip_seconds=0.5)
        assert "concat_truncated" not in pair.flags
        joined = np.zeros(int(0.5 * rate), dtype=np.float32)
        joined[: a.samples.size] = a.samples
        joined[a.samples.size : a.samples.size + b.samples.size] = b.samples
        want = mel_transform(Waveform(joined, rate), small_params)
        np.testing.assert_array_equal(pair.mel.data, want.data)

    def test_caption_concatenation(self, small_params):
        sources = two_sources(small_params)
        pair = concat_pair(sources, small_params, clip_seconds=0.25)
        assert pair.caption == "a dog barks a man speaks"
        assert pair.variant == "concat_audio"


class TestBatchComposition:
    def make_pool(self, small_params, n=64, seconds=0.2):
        items = {}
        for i in range(n):
            w = sine_wave(200.0 + 13.0 * i, seconds, small_params.sample_rate)
            items[f"id{i:03d}"] = (w, f"caption {i}")
        return items

    def test_generated_count_follows_ratio(self):
        ids = [f"id{i:03d}" for i in range(32)]
        pool = [f"p{i:03d}" for i in range(100)]
        for k, want in [(0.125, 4), (0.25, 8), (0.5, 16), (0.6, 19)]:
            cfg = PairMixConfig(k_ratio=k)
            assert len(plan_batch(ids, ids + pool, cfg, rng_seed=1)) == want

    def test_zero_ratio_generates_nothing(self, small_params):
        pool = self.make_pool(small_params, 8)
        batch = [(i, w, c) for i, (w, c) in list(pool.items())[:4]]
        originals, generated = compose_batch(
            batch, list(pool), pool.__getitem__, PairMixConfig(k_ratio=0.0),
            small_params, 0.2, rng_seed=3,
        )
        assert len(originals) == 4
        assert generated == []

    def test_sources_never_drawn_from_batch(self):
        pool_ids = [f"id{i:04d}" for i in range(200)]
        cfg = PairMixConfig(k_ratio=0.25)
        for seed in range(200):
            rng = np.random.default_rng(seed)
            batch_ids = [pool_ids[int(i)] for i in rng.choice(200, size=32, replace=False)]
            for plan in plan_batch(batch_ids, pool_ids, cfg, rng_seed=seed):
                assert not set(plan.source_ids) & set(batch_ids)
                assert len(set(plan.source_ids)) == cfg.n_sources

    def test_deterministic_given_seed(self):
        pool_ids = [f"id{i:04d}" for i in range(50)]
        cfg = PairMixConfig(k_ratio=0.5)
        a = plan_batch(pool_ids[:16], pool_ids, cfg, rng_seed=99)
        b = plan_batch(pool_ids[:16], pool_ids, cfg, rng_seed=99)
        assert a == b

    def test_pool_too_small_raises(self):
        cfg = PairMixConfig(k_ratio=0.5)
        with pytest.raises(ValueError, match="pool too small"):
            plan_batch(["a", "b"], ["a"], cfg, rng_seed=0)

    def test_exclusion_relaxes_when_batch_covers_pool(self):
        # batch == pool: strict exclusion would leave nothing to draw from
        ids = [f"id{i}" for i in range(8)]
        cfg = PairMixConfig(k_ratio=0.5)
        plans = plan_batch(ids, ids, cfg, rng_seed=2)
        assert len(plans) == 4
        assert all(p.exclusion_relaxed for p in plans)
        strict = plan_batch(ids[:4], ids + ["extra1", "extra2"], cfg, rng_seed=2)
        assert not any(p.exclusion_relaxed for p in strict)

    def test_forced_level_variants_match_forced_executor(self, small_params):
        pool = self.make_pool(small_params, 16)
        pool_ids = list(pool)
        batch = [(i, *pool[i]) for i in pool_ids[:4]]
        for variant, level in [("waveform_only", 1), ("spectrogram_only", 0)]:
            cfg = PairMixConfig(k_ratio=0.5, variant=variant)
            _, generated = compose_batch(
                batch, pool_ids, pool.__getitem__, cfg, small_params, 0.2, rng_seed=7
            )
            assert all(p.waveform_level == level for p in generated)
            assert all(p.variant == variant for p in generated)
            for pair in generated:
                sources = [
                    (fix_length(pool[sid][0], 0.2), pool[sid][1]) for sid in pair.source_ids
                ]
                direct = generate_pair(sources, pair.weights, level, small_params)
                np.testing.assert_array_equal(pair.mel.data, direct.mel.data)

    def test_output_size_is_b_plus_round_kb(self, small_params):
        pool = self.make_pool(small_params, 40)
        pool_ids = list(pool)
        batch = [(i, *pool[i]) for i in pool_ids[:32]]
        cfg = PairMixConfig(k_ratio=0.25)
        originals, generated = compose_batch(
            batch, pool_ids, pool.__getitem__, cfg, small_params, 0.2, rng_seed=5
        )
        assert len(originals) + len(generated) == 32 + 8

    def test_concat_variant_through_compose(self, small_params):
        pool = self.make_pool(small_params, 12)
        pool_ids = list(pool)
        batch = [(i, *pool[i]) for i in pool_ids[:4]]
        cfg = PairMixConfig(k_ratio=0.5, variant="concat_audio")
        _, generated = compose_batch(
            batch, pool_ids, pool.__getitem__, cfg, small_params, 0.2, rng_seed=13
        )
        assert len(generated) == 2
        assert all(p.variant == "concat_audio" for p in generated)


class TestConfigValidation:
    def test_rejects_k_of_one(self):
        with pytest.raises(ValueError):
            PairMixConfig(k_ratio=1.0)

    def test_rejects_unknown_variant(self):
        with pytest.raises(ValueError):
            PairMixConfig(variant="mashup")

    def test_rejects_single_source(self):
        with pytest.raises(ValueError):
            PairMixConfig(n_sources=1)
