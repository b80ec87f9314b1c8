"""Transformer tests: architecture invariants, finite-difference gradient
checks for every parameter class, low-rank adapter algebra, training
behavior on the bundled toy set, and persistence."""

import math

import numpy as np
import pytest

from hatelab.classifiers.linear import TrainingDivergedError
from hatelab.datasets import make_toy_token_set
from hatelab.microformer import (
    ModelConfig,
    WordTokenizer,
    attach_lora,
    forward_logits,
    init_model,
    load_adapters,
    load_checkpoint,
    loss_and_grads,
    merge_lora,
    pad_batch,
    save_adapters,
    save_checkpoint,
    total_parameters,
    trainable_parameters,
)
from hatelab.microformer.train import predict, train

SMALL = ModelConfig(
    vocab_size=50, max_seq_len=12, d_model=16, n_heads=4, n_layers=2, d_ff=32
)


def _small_batch(seed=0, n=6):
    rng = np.random.default_rng(seed)
    seqs = [
        list(rng.integers(0, SMALL.vocab_size, size=int(rng.integers(3, SMALL.max_seq_len))))
        for _ in range(n)
    ]
    labels = [bool(i % 2) for i in range(n)]
    return seqs, labels


def _energize(model, seed=7, std=0.3):
    """Push parameters away from their tiny init so gradients are well
    scaled for finite differences (biases start at exactly zero otherwise)."""
    rng = np.random.default_rng(seed)
    for p in model.params():
        p.value = p.value + rng.normal(0.0, std, size=p.value.shape)


def _gradcheck(model, seqs, labels, tol):
    """Central finite differences on 8 sampled coordinates per tensor,
    compared by norm. Tensors whose sampled gradients are all below 1e-8
    pass outright (some are exactly zero by symmetry, and differences
    there measure pure float noise)."""
    loss, grads = loss_and_grads(model, seqs, labels, train=False)
    assert np.isfinite(loss)
    params = model.param_map()
    eps = 1e-5
    rng = np.random.default_rng(3)
    assert grads, "no gradients produced"
    for name, grad in grads.items():
        flat = params[name].value.reshape(-1)
        picks = rng.choice(flat.size, size=min(8, flat.size), replace=False)
        fd = np.zeros(picks.size)
        an = np.zeros(picks.size)
        for j, i in enumerate(picks):
            old = flat[i]
            flat[i] = old + eps
            up, _ = loss_and_grads(model, seqs, labels, train=False)
            flat[i] = old - eps
            down, _ = loss_and_grads(model, seqs, labels, train=False)
            flat[i] = old
            fd[j] = (up - down) / (2 * eps)
            an[j] = grad.reshape(-1)[i]
        scale = max(float(np.linalg.norm(fd)), float(np.linalg.norm(an)))
        if scale < 1e-8:
            continue
        rel = float(np.linalg.norm(fd - an)) / scale
        assert rel < tol, f"{name}: relative error {rel:.3e}"


class TestConfig:
    def test_defaults(self):
        config = ModelConfig(vocab_size=100)
        assert config.max_seq_len == 64
        assert config.d_model == 64
        assert config.n_heads == 4
        assert config.n_layers == 2
        assert config.d_ff == 256
        assert config.n_classes == 2
        assert config.dropout == 0.0
        assert config.head_dim == 16

    def test_head_divisibility(self):
        with pytest.raises(ValueError, match="divisible"):
            ModelConfig(vocab_size=10, d_model=64, n_heads=3)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"vocab_size": 0},
            {"vocab_size": 10, "dropout": 1.0},
            {"vocab_size": 10, "dropout": -0.1},
            {"vocab_size": 10, "n_layers": 0},
            {"vocab_size": 10, "max_seq_len": 0},
        ],
    )
    def test_invalid_fields(self, kwargs):
        with pytest.raises(ValueError):
            ModelConfig(**kwargs)

    def test_dict_round_trip(self):
        config = ModelConfig(vocab_size=123, d_model=32, n_heads=2)
        assert ModelConfig.from_dict(config.to_dict()) == config


class TestInit:
    def test_deterministic(self):
        a = init_model(SMALL, seed=7)
        b = init_model(SMALL, seed=7)
        for pa, pb in zip(a.params(), b.params()):
            assert pa.name == pb.name
            np.testing.assert_array_equal(pa.value, pb.value)

    def test_seed_changes_weights(self):
        a = init_model(SMALL, seed=7)
        b = init_model(SMALL, seed=8)
        assert not np.array_equal(a.tok_emb.value, b.tok_emb.value)

    def test_parameter_count_closed_form(self):
        c = SMALL
        d, ff = c.d_model, c.d_ff
        per_linear = lambda d_in, d_out: d_in * d_out + d_out
        per_layer = (
            2 * d  # ln1
            + 4 * per_linear(d, d)  # wq wk wv wo
            + 2 * d  # ln2
            + per_linear(d, ff)
            + per_linear(ff, d)
        )
        expected = (
            c.vocab_size * d
            + c.max_seq_len * d
            + c.n_layers * per_layer
            + per_linear(d, c.n_classes)
        )
        model = init_model(c)
        assert total_parameters(model) == expected
        assert trainable_parameters(model) == expected

    def test_biases_zero_gains_one(self):
        model = init_model(SMALL, seed=0)
        assert not model.head.b.value.any()
        layer = model.layers[0]
        assert (layer.ln1.g.value == 1.0).all()
        assert not layer.ln1.b.value.any()
        assert not layer.attn.wq.b.value.any()


class TestForward:
    def test_eval_deterministic(self):
        model = init_model(SMALL, seed=1)
        seq = [3, 7, 7, 1, 20]
        np.testing.assert_array_equal(forward_logits(model, seq), forward_logits(model, seq))

    def test_logit_shape_for_every_length(self):
        model = init_model(SMALL, seed=1)
        rng = np.random.default_rng(0)
        for length in range(1, SMALL.max_seq_len + 1):
            seq = list(rng.integers(0, SMALL.vocab_size, size=length))
            logits = forward_logits(model, seq)
            assert logits.shape == (2,)
            assert np.isfinite(logits).all()

    def test_permutation_ablation_with_zeroed_positions(self):
        model = init_model(SMALL, seed=2)
        model.pos_emb.value[:] = 0.0
        seq = [5, 9, 14, 2, 30, 41]
        a = forward_logits(model, seq)
        b = forward_logits(model, list(reversed(seq)))
        np.testing.assert_allclose(a, b, atol=1e-12)

    def test_positions_break_permutation_symmetry(self):
        model = init_model(SMALL, seed=2)
        seq = [5, 9, 14, 2, 30, 41]
        a = forward_logits(model, seq)
        b = forward_logits(model, list(reversed(seq)))
        assert np.abs(a - b).max() > 1e-9

    def test_out_of_range_id_rejected(self):
        model = init_model(SMALL, seed=1)
        with pytest.raises(ValueError, match="out of range"):
            forward_logits(model, [0, SMALL.vocab_size])

    def test_too_long_rejected(self):
        model = init_model(SMALL, seed=1)
        with pytest.raises(ValueError, match="max_seq_len"):
            forward_logits(model, [1] * (SMALL.max_seq_len + 1))

    def test_padding_does_not_change_logits(self):
        # the same sequence alone and inside a longer padded batch
        model = init_model(SMALL, seed=3)
        short = [4, 8, 15]
        long = [16, 23, 42, 4, 8, 15, 16, 23]
        alone = forward_logits(model, short)
        ids, mask = pad_batch([short, long], SMALL.max_seq_len)
        batched, _ = model.forward_batch(ids, mask)
        np.testing.assert_allclose(batched[0], alone, atol=1e-9)

    def test_attention_rows_sum_to_one_and_ignore_padding(self):
        model = init_model(SMALL, seed=4)
        ids, mask = pad_batch([[1, 2, 3], [4, 5, 6, 7, 8, 9]], SMALL.max_seq_len)
        _, cache = model.forward_batch(ids, mask)
        for lcache in cache["layer_caches"]:
            att = lcache["ca"]["att"]
            np.testing.assert_allclose(att.sum(axis=-1), 1.0, atol=1e-9)
            # key weights on padded positions underflow to exactly zero
            assert (att[0, :, :, 3:] == 0.0).all()

    def test_layernorm_output_is_standardized(self):
        model = init_model(SMALL, seed=4)
        _energize(model, seed=12)
        ids, mask = pad_batch([[10, 20, 30, 40]], SMALL.max_seq_len)
        _, cache = model.forward_batch(ids, mask)
        xhat = cache["layer_caches"][0]["cl1"]["xhat"]
        mean = xhat.mean(axis=-1)
        var = xhat.var(axis=-1)
        assert np.abs(mean).max() < 1e-7
        np.testing.assert_allclose(var, 1.0, atol=1e-6)


class TestPadBatch:
    def test_left_aligned_with_mask(self):
        ids, mask = pad_batch([[5, 6], [7]], max_seq_len=8)
        np.testing.assert_array_equal(ids, [[5, 6], [7, 0]])
        np.testing.assert_array_equal(mask, [[True, True], [True, False]])

    def test_empty_batch_rejected(self):
        with pytest.raises(ValueError, match="empty batch"):
            pad_batch([], max_seq_len=8)

    def test_empty_sequence_rejected(self):
        with pytest.raises(ValueError, match="empty sequence"):
            pad_batch([[1], []], max_seq_len=8)

    def test_overlong_rejected(self):
        with pytest.raises(ValueError, match="max_seq_len"):
            pad_batch([[1] * 9], max_seq_len=8)


class TestLossAndGrads:
    def test_fresh_zeroed_head_gives_ln2(self):
        model = init_model(SMALL, seed=5)
        model.head.w.value[:] = 0.0
        model.head.b.value[:] = 0.0
        seqs, labels = _small_batch(seed=5)
        loss, _ = loss_and_grads(model, seqs, labels, train=False)
        assert abs(loss - math.log(2.0)) < 1e-9

    def test_gradients_full_model(self):
        model = init_model(SMALL, seed=1)
        _energize(model)
        seqs, labels = _small_batch()
        _gradcheck(model, seqs, labels, tol=1e-4)

    def test_gradients_lora_model(self):
        model = init_model(SMALL, seed=1)
        _energize(model)
        adapted = attach_lora(model, r=2, alpha=4.0, seed=5)
        rng = np.random.default_rng(9)
        for lin in adapted.linears().values():
            if lin.lora is not None:
                lin.lora.a.value = lin.lora.a.value + rng.normal(0, 0.3, lin.lora.a.value.shape)
                lin.lora.b.value = lin.lora.b.value + rng.normal(0, 0.3, lin.lora.b.value.shape)
        seqs, labels = _small_batch()
        _gradcheck(adapted, seqs, labels, tol=1e-4)

    def test_frozen_parameters_get_no_entry(self):
        model = init_model(SMALL, seed=1)
        adapted = attach_lora(model, r=2, alpha=4.0)
        seqs, labels = _small_batch()
        _, grads = loss_and_grads(adapted, seqs, labels)
        assert grads
        for name in grads:
            assert ".lora." in name or name in ("head.w", "head.b"), name

    def test_fully_frozen_model_yields_no_grads(self):
        model = init_model(SMALL, seed=1)
        model.set_trainable(False)
        seqs, labels = _small_batch()
        _, grads = loss_and_grads(model, seqs, labels)
        assert grads == {}

    def test_gradient_covers_every_trainable_param(self):
        model = init_model(SMALL, seed=1)
        seqs, labels = _small_batch()
        _, grads = loss_and_grads(model, seqs, labels)
        expected = {p.name for p in model.params()}
        assert set(grads) == expected
        for name, grad in grads.items():
            assert grad.shape == model.param_map()[name].value.shape

    def test_length_mismatch_rejected(self):
        model = init_model(SMALL, seed=1)
        with pytest.raises(ValueError, match="equal length"):
            loss_and_grads(model, [[1, 2]], [True, False])

    def test_dropout_requires_rng(self):
        config = ModelConfig(
            vocab_size=20, max_seq_len=8, d_model=8, n_heads=2, n_layers=1, d_ff=16, dropout=0.5
        )
        model = init_model(config, seed=0)
        with pytest.raises(ValueError, match="rng"):
            loss_and_grads(model, [[1, 2, 3]], [True], train=True)
        loss, _ = loss_and_grads(
            model, [[1, 2, 3]], [True], train=True, rng=np.random.default_rng(0)
        )
        assert np.isfinite(loss)


class TestLora:
    def test_identity_at_attach_is_exact(self):
        base = init_model(SMALL, seed=3)
        adapted = attach_lora(base, r=2, alpha=4.0, seed=5)
        seqs, _ = _small_batch(seed=10)
        ids, mask = pad_batch(seqs, SMALL.max_seq_len)
        base_logits, _ = base.forward_batch(ids, mask)
        adapted_logits, _ = adapted.forward_batch(ids, mask)
        np.testing.assert_array_equal(base_logits, adapted_logits)

    def test_attach_leaves_base_untouched(self):
        base = init_model(SMALL, seed=3)
        attach_lora(base, r=2, alpha=4.0)
        assert not base.has_adapters()
        assert all(p.trainable for p in base.params())

    def test_merge_right_after_attach_equals_base(self):
        base = init_model(SMALL, seed=3)
        merged = merge_lora(attach_lora(base, r=2, alpha=4.0))
        for pb, pm in zip(base.params(), merged.params()):
            np.testing.assert_array_equal(pb.value, pm.value)

    def test_merge_after_training_matches_adapted(self):
        base = init_model(SMALL, seed=3)
        adapted = attach_lora(base, r=2, alpha=4.0, seed=5)
        rng = np.random.default_rng(17)
        for lin in adapted.linears().values():
            if lin.lora is not None:
                lin.lora.a.value = rng.normal(0, 0.2, lin.lora.a.value.shape)
                lin.lora.b.value = rng.normal(0, 0.2, lin.lora.b.value.shape)
        merged = merge_lora(adapted)
        assert not merged.has_adapters()
        seqs = [
            list(rng.integers(0, SMALL.vocab_size, size=int(rng.integers(1, 12))))
            for _ in range(100)
        ]
        ids, mask = pad_batch(seqs, SMALL.max_seq_len)
        a, _ = adapted.forward_batch(ids, mask)
        m, _ = merged.forward_batch(ids, mask)
        scale = np.maximum(np.abs(a), 1.0)
        assert (np.abs(a - m) / scale).max() < 1e-9

    def test_merge_without_adapters_rejected(self):
        with pytest.raises(ValueError, match="no adapters"):
            merge_lora(init_model(SMALL, seed=1))

    def test_double_attach_rejected(self):
        adapted = attach_lora(init_model(SMALL, seed=1), r=2, alpha=4.0)
        with pytest.raises(ValueError, match="already"):
            attach_lora(adapted, r=2, alpha=4.0)

    def test_rank_must_be_low(self):
        with pytest.raises(ValueError, match="rank"):
            attach_lora(init_model(SMALL, seed=1), r=16, alpha=4.0)
        with pytest.raises(ValueError, match="rank"):
            attach_lora(init_model(SMALL, seed=1), r=0, alpha=4.0)

    def test_bad_targets_rejected(self):
        with pytest.raises(ValueError, match="unknown adapter targets"):
            attach_lora(init_model(SMALL, seed=1), r=2, alpha=4.0, targets=("wz",))
        with pytest.raises(ValueError, match="must not be empty"):
            attach_lora(init_model(SMALL, seed=1), r=2, alpha=4.0, targets=())

    def test_trainable_count_closed_form(self):
        base = init_model(SMALL, seed=1)
        r = 2
        adapted = attach_lora(base, r=r, alpha=4.0, targets=("wq", "wv"), train_head=True)
        d = SMALL.d_model
        adapters = SMALL.n_layers * 2 * r * (d + d)
        head = d * SMALL.n_classes + SMALL.n_classes
        assert trainable_parameters(adapted) == adapters + head
        assert total_parameters(adapted) == total_parameters(base) + adapters

    def test_default_config_ratio_under_ten_percent(self):
        config = ModelConfig(vocab_size=8194)
        adapted = attach_lora(init_model(config, seed=0), r=8, alpha=16.0)
        ratio = trainable_parameters(adapted) / total_parameters(adapted)
        assert ratio < 0.10

    def test_lora_training_keeps_base_weights_bit_identical(self):
        seqs, labels = make_toy_token_set(n_examples=16, vocab_size=100, seed=3)
        config = ModelConfig(
            vocab_size=100, max_seq_len=32, d_model=16, n_heads=4, n_layers=2, d_ff=32
        )
        adapted = attach_lora(init_model(config, seed=2), r=2, alpha=4.0)
        frozen_names = [
            p.name for p in adapted.params() if not p.trainable
        ]
        before = {name: adapted.param_map()[name].value.copy() for name in frozen_names}
        train(adapted, seqs, labels, epochs=3, lr=0.1, batch_size=8, mode="lora")
        after = adapted.param_map()
        for name in frozen_names:
            np.testing.assert_array_equal(before[name], after[name].value)
        # the adapters themselves must have moved
        moved = any(
            lin.lora is not None and lin.lora.b.value.any()
            for lin in adapted.linears().values()
        )
        assert moved


class TestTrainer:
    def _toy(self):
        return make_toy_token_set()

    def test_full_mode_reaches_perfect_accuracy(self):
        seqs, labels = self._toy()
        model = init_model(ModelConfig(vocab_size=8194, max_seq_len=64), seed=42)
        report = train(model, seqs, labels, epochs=10, lr=0.1, batch_size=16, seed=1)
        assert report.mode == "full"
        assert max(report.epoch_accuracies) == 1.0  # well under the 200-epoch bound

    def test_lora_mode_reaches_095_accuracy(self):
        seqs, labels = self._toy()
        base = init_model(ModelConfig(vocab_size=8194, max_seq_len=64), seed=42)
        adapted = attach_lora(base, r=8, alpha=16.0)
        report = train(
            adapted, seqs, labels, epochs=20, lr=0.1, batch_size=16, seed=1, mode="lora"
        )
        assert max(report.epoch_accuracies) >= 0.95  # well under the 400-epoch bound

    def test_lora_trainable_fraction(self):
        seqs, labels = make_toy_token_set(n_examples=8, vocab_size=100, seed=1)
        config = ModelConfig(
            vocab_size=100, max_seq_len=32, d_model=16, n_heads=4, n_layers=2, d_ff=32
        )
        full = train(init_model(config, seed=0), seqs, labels, epochs=1, batch_size=8)
        adapted = attach_lora(init_model(config, seed=0), r=2, alpha=4.0)
        lora = train(adapted, seqs, labels, epochs=1, batch_size=8, mode="lora")
        assert lora.trainable_params < 0.10 * full.trainable_params
        assert lora.trainable_params <= lora.total_params
        assert full.trainable_params == full.total_params

    def test_mode_validation(self):
        seqs, labels = make_toy_token_set(n_examples=8, vocab_size=100, seed=1)
        config = ModelConfig(
            vocab_size=100, max_seq_len=32, d_model=8, n_heads=2, n_layers=1, d_ff=16
        )
        plain = init_model(config, seed=0)
        with pytest.raises(ValueError, match="mode"):
            train(plain, seqs, labels, epochs=1, mode="half")
        with pytest.raises(ValueError, match="adapters"):
            train(plain, seqs, labels, epochs=1, mode="lora")
        adapted = attach_lora(plain, r=2, alpha=4.0)
        with pytest.raises(ValueError, match="plain"):
            train(adapted, seqs, labels, epochs=1, mode="full")

    def test_training_deterministic_given_seed(self):
        seqs, labels = make_toy_token_set(n_examples=16, vocab_size=100, seed=2)
        config = ModelConfig(
            vocab_size=100, max_seq_len=32, d_model=16, n_heads=4, n_layers=1, d_ff=32
        )
        a = init_model(config, seed=5)
        b = init_model(config, seed=5)
        ra = train(a, seqs, labels, epochs=3, lr=0.1, batch_size=8, seed=11)
        rb = train(b, seqs, labels, epochs=3, lr=0.1, batch_size=8, seed=11)
        assert ra.epoch_losses == rb.epoch_losses
        for pa, pb in zip(a.params(), b.params()):
            np.testing.assert_array_equal(pa.value, pb.value)

    def test_divergence_raises(self):
        seqs, labels = make_toy_token_set(n_examples=16, vocab_size=100, seed=2)
        config = ModelConfig(
            vocab_size=100, max_seq_len=32, d_model=16, n_heads=4, n_layers=1, d_ff=32
        )
        model = init_model(config, seed=5)
        with np.errstate(all="ignore"):
            with pytest.raises(TrainingDivergedError):
                train(model, seqs, labels, epochs=50, lr=1e18, batch_size=8)

    def test_predict_tie_breaks_negative(self):
        model = init_model(SMALL, seed=0)
        model.head.w.value[:] = 0.0
        model.head.b.value[:] = 0.0
        assert not predict(model, [[1, 2, 3], [4, 5]]).any()

    def test_empty_dataset_rejected(self):
        model = init_model(SMALL, seed=0)
        with pytest.raises(ValueError):
            train(model, [], [], epochs=1)


class TestTokenizer:
    def test_frequency_ranking_with_first_seen_ties(self):
        tok = WordTokenizer.fit([["b", "a", "b"], ["c", "a", "b"]])
        # b:3, a:2, c:1
        assert tok.terms == ["b", "a", "c"]
        assert tok.term_to_id == {"b": 2, "a": 3, "c": 4}
        assert tok.vocab_size == 5

    def test_tie_broken_by_first_appearance(self):
        tok = WordTokenizer.fit([["x", "y"], ["y", "x"]])
        assert tok.terms == ["x", "y"]

    def test_max_terms_cap(self):
        docs = [[f"w{i}"] * (10 - i) for i in range(10)]
        tok = WordTokenizer.fit(docs, max_terms=3)
        assert tok.terms == ["w0", "w1", "w2"]
        assert tok.vocab_size == 5

    def test_encode_maps_unknown_and_truncates(self):
        tok = WordTokenizer(["hello", "world"])
        assert tok.encode(["hello", "mystery", "world"], max_len=10) == [2, 1, 3]
        assert tok.encode(["hello"] * 5, max_len=2) == [2, 2]
        assert tok.encode([], max_len=4) == [WordTokenizer.UNK]

    def test_reserved_ids(self):
        assert WordTokenizer.PAD == 0
        assert WordTokenizer.UNK == 1

    def test_duplicate_terms_rejected(self):
        with pytest.raises(ValueError, match="duplicate"):
            WordTokenizer(["a", "a"])

    def test_save_load_round_trip(self, tmp_path):
        tok = WordTokenizer.fit([["one", "two", "two", "three"]])
        path = tmp_path / "tok.txt"
        tok.save(path)
        loaded = WordTokenizer.load(path)
        assert loaded.terms == tok.terms
        assert loaded.term_to_id == tok.term_to_id

    def test_truncated_file_rejected(self, tmp_path):
        path = tmp_path / "tok.txt"
        path.write_text("V 3\nalpha\nbeta\n")
        with pytest.raises(ValueError, match="truncated"):
            WordTokenizer.load(path)

    def test_bad_header_rejected(self, tmp_path):
        path = tmp_path / "tok.txt"
        path.write_text("terms 3\n")
        with pytest.raises(ValueError, match="header"):
            WordTokenizer.load(path)


class TestCheckpoints:
    def test_base_round_trip_bit_exact(self, tmp_path):
        model = init_model(SMALL, seed=9)
        _energize(model, seed=20)
        path = tmp_path / "model.npz"
        save_checkpoint(model, path)
        loaded = load_checkpoint(path)
        assert loaded.config == model.config
        for pa, pb in zip(model.params(), loaded.params()):
            assert pa.name == pb.name
            np.testing.assert_array_equal(pa.value, pb.value)
        seqs, _ = _small_batch(seed=1)
        ids, mask = pad_batch(seqs, SMALL.max_seq_len)
        a, _ = model.forward_batch(ids, mask)
        b, _ = loaded.forward_batch(ids, mask)
        np.testing.assert_array_equal(a, b)

    def test_adapted_model_cannot_be_checkpointed(self, tmp_path):
        adapted = attach_lora(init_model(SMALL, seed=1), r=2, alpha=4.0)
        with pytest.raises(ValueError, match="adapt"):
            save_checkpoint(adapted, tmp_path / "bad.npz")

    def test_adapter_round_trip_reproduces_adapted_model(self, tmp_path):
        base = init_model(SMALL, seed=9)
        adapted = attach_lora(base, r=2, alpha=4.0, seed=6)
        rng = np.random.default_rng(30)
        for lin in adapted.linears().values():
            if lin.lora is not None:
                lin.lora.a.value = rng.normal(0, 0.1, lin.lora.a.value.shape)
                lin.lora.b.value = rng.normal(0, 0.1, lin.lora.b.value.shape)
        adapted.head.w.value = rng.normal(0, 0.1, adapted.head.w.value.shape)

        base_path = tmp_path / "base.npz"
        adapter_path = tmp_path / "adapters.npz"
        save_checkpoint(base, base_path)
        save_adapters(adapted, adapter_path)

        restored = load_adapters(load_checkpoint(base_path), adapter_path)
        seqs, _ = _small_batch(seed=2)
        ids, mask = pad_batch(seqs, SMALL.max_seq_len)
        a, _ = adapted.forward_batch(ids, mask)
        b, _ = restored.forward_batch(ids, mask)
        np.testing.assert_array_equal(a, b)

    def test_save_adapters_requires_adapters(self, tmp_path):
        with pytest.raises(ValueError, match="no adapters"):
            save_adapters(init_model(SMALL, seed=1), tmp_path / "x.npz")

    def test_load_adapters_rejects_plain_checkpoint(self, tmp_path):
        model = init_model(SMALL, seed=1)
        path = tmp_path / "model.npz"
        save_checkpoint(model, path)
        with pytest.raises(ValueError, match="adapter"):
            load_adapters(model, path)

    def test_missing_parameter_detected(self, tmp_path):
        model = init_model(SMALL, seed=1)
        path = tmp_path / "model.npz"
        save_checkpoint(model, path)
        with np.load(path, allow_pickle=False) as archive:
            arrays = {k: archive[k] for k in archive.files if not k.endswith("head.w")}
        np.savez(tmp_path / "cut.npz", **arrays)
        with pytest.raises(ValueError, match="missing"):
            load_checkpoint(tmp_path / "cut.npz")
