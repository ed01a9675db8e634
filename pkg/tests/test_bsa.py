import json
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_unitary
from icoswitch.bsa import (
    AmbiguousOutcomeError,
    ConfusionMatrix,
    MeasurementRecord,
    NonHeraldedInputError,
    analyze_deterministic,
    confusion,
    decode,
    deterministic_confusion,
    iterate_switch,
    sample,
    state_seed,
    target_support,
)
from icoswitch.linalg import UnitaryMatrix, fidelity
from icoswitch.states import BellIndex, bell_state
from icoswitch.switch import SwitchConfig, apply_branchwise, canonical_config, decompose_control, switch_input


def decode_by_search(d, control, j_a, j_b):
    """Find (i, j) whose expected outcome pattern contains (control, j_a, j_b)."""
    hits = [
        (i, j)
        for i in range(d)
        for j in range(d)
        if (d - i) % d == control and (j_a + j + 1) % d == j_b
    ]
    assert len(hits) == 1
    return hits[0]


class TestDecode:
    def test_qutrit_example(self):
        assert decode(3, 2, 1, 1) == BellIndex(3, 1, 2)

    def test_ququart_example(self):
        assert decode(4, 0, 1, 3) == BellIndex(4, 0, 1)

    def test_d5_against_search(self):
        d = 5
        for l in range(d):
            for a in range(d):
                for b in range(d):
                    got = decode(d, l, a, b)
                    assert (got.i, got.j) == decode_by_search(d, l, a, b)

    @pytest.mark.parametrize("args", [(3, 3, 0, 0), (3, 0, -1, 0), (3, 0, 0, 3)])
    def test_out_of_range(self, args):
        with pytest.raises(ValueError):
            decode(*args)

    @settings(max_examples=200, deadline=None)
    @given(st.integers(2, 16).flatmap(lambda d: st.tuples(st.just(d), *(st.integers(0, d - 1),) * 3)))
    def test_inverts_outcome_pattern(self, args):
        d, i, j, j_a = args
        j_b = (j_a + j + 1) % d
        assert decode(d, (d - i) % d, j_a, j_b) == BellIndex(d, i, j)


class TestMeasurementRecord:
    def test_inconsistent_record_rejected(self):
        with pytest.raises(ValueError):
            MeasurementRecord(0, 0, 1, BellIndex(3, 1, 0))

    def test_to_dict(self):
        rec = MeasurementRecord.from_outcomes(3, 2, 1, 1)
        assert rec.to_dict() == {
            "control_outcome": 2,
            "alice_outcome": 1,
            "bob_outcome": 1,
            "decoded": {"d": 3, "i": 1, "j": 2},
        }


class TestAnalyzeDeterministic:
    def test_qutrit_00(self):
        rec = analyze_deterministic(3, BellIndex(3, 0, 0), canonical_config(3))
        assert rec.control_outcome == 0
        assert (rec.bob_outcome - rec.alice_outcome) % 3 == 1
        assert rec.decoded == BellIndex(3, 0, 0)

    def test_ququart_31(self):
        rec = analyze_deterministic(4, BellIndex(4, 3, 1), canonical_config(4))
        assert rec.control_outcome == 1
        assert (rec.bob_outcome - rec.alice_outcome) % 4 == 2
        assert rec.decoded == BellIndex(4, 3, 1)

    def test_support_has_d_outcomes(self):
        d = 6
        cfg = canonical_config(d)
        dec = decompose_control(apply_branchwise(cfg, switch_input(d, bell_state(BellIndex(d, 2, 3)))))
        support = target_support(dec.projected_target())
        assert len(support) == d
        assert {(b - a) % d for a, b in support} == {4}

    def test_random_config_not_heralded(self, rng):
        d = 3
        cfg = SwitchConfig(d, [random_unitary(rng, d) for _ in range(d)], [random_unitary(rng, d) for _ in range(d)])
        with pytest.raises(NonHeraldedInputError):
            analyze_deterministic(d, BellIndex(d, 0, 0), cfg)

    def test_ambiguous_support(self):
        # identical branches leave the control in D_0, but Bob's Fourier gate spreads every offset
        d = 3
        f = UnitaryMatrix(np.array([[np.exp(2j * np.pi * a * b / d) for b in range(d)] for a in range(d)]) / np.sqrt(d))
        cfg = SwitchConfig(d, [UnitaryMatrix.identity(d)] * d, [f] * d)
        with pytest.raises(AmbiguousOutcomeError):
            analyze_deterministic(d, BellIndex(d, 0, 0), cfg)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            analyze_deterministic(3, BellIndex(4, 0, 0), canonical_config(3))


class TestSample:
    def test_qutrit_00_distribution(self):
        shots = 1000
        recs = sample(3, BellIndex(3, 0, 0), canonical_config(3), shots, seed=11)
        assert all(r.control_outcome == 0 for r in recs)
        pairs = Counter((r.alice_outcome, r.bob_outcome) for r in recs)
        assert set(pairs) <= {(0, 1), (1, 2), (2, 0)}
        sigma = np.sqrt(shots * (1 / 3) * (2 / 3))
        for key in [(0, 1), (1, 2), (2, 0)]:
            assert abs(pairs[key] - shots / 3) <= 4 * sigma
        assert all(r.decoded == BellIndex(3, 0, 0) for r in recs)

    def test_same_seed_same_records(self):
        a = sample(4, BellIndex(4, 2, 1), canonical_config(4), 50, seed=99)
        b = sample(4, BellIndex(4, 2, 1), canonical_config(4), 50, seed=99)
        assert a == b

    def test_different_seed_different_records(self):
        a = sample(4, BellIndex(4, 2, 1), canonical_config(4), 50, seed=1)
        b = sample(4, BellIndex(4, 2, 1), canonical_config(4), 50, seed=2)
        assert a != b

    def test_d5_always_correct(self):
        recs = sample(5, BellIndex(5, 4, 0), canonical_config(5), 2000, seed=3)
        assert all(r.decoded == BellIndex(5, 4, 0) for r in recs)
        assert all(r.control_outcome == 1 for r in recs)

    def test_alice_marginal_uniform(self):
        d, shots = 5, 5000
        recs = sample(d, BellIndex(d, 1, 3), canonical_config(d), shots, seed=2024)
        counts = np.bincount([r.alice_outcome for r in recs], minlength=d)
        chi2 = float(np.sum((counts - shots / d) ** 2 / (shots / d)))
        # 99.9th percentile of chi-square with 4 degrees of freedom
        assert chi2 < 18.47

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            sample(3, BellIndex(3, 0, 0), canonical_config(3), 0, seed=1)
        with pytest.raises(ValueError):
            sample(3, BellIndex(3, 0, 0), canonical_config(3), 1, seed=-1)

    def test_serialization_byte_identical(self):
        dump = lambda: json.dumps(
            [r.to_dict() for r in sample(3, BellIndex(3, 1, 1), canonical_config(3), 20, seed=5)],
            sort_keys=True,
        ).encode()
        assert dump() == dump()


class TestConfusion:
    @pytest.mark.parametrize("d", [3, 4])
    def test_deterministic_identity(self, d):
        cm = deterministic_confusion(d, canonical_config(d))
        assert cm.is_identity()
        assert cm.accuracy == 1.0
        assert cm.off_diagonal == 0

    @pytest.mark.parametrize("d", [3, 4])
    def test_sampled_identity(self, d):
        cm = confusion(d, canonical_config(d), 100, seed=7)
        assert cm.is_identity()
        assert np.array_equal(cm.normalized(), np.eye(d * d))

    def test_sampled_reproducible(self):
        a = confusion(3, canonical_config(3), 30, seed=8).counts
        b = confusion(3, canonical_config(3), 30, seed=8).counts
        assert np.array_equal(a, b)

    def test_per_state_seed_independent_of_order(self):
        s1 = state_seed(5, BellIndex(3, 1, 2))
        s2 = state_seed(5, BellIndex(3, 1, 2))
        assert s1.generate_state(4).tolist() == s2.generate_state(4).tolist()
        assert s1.generate_state(4).tolist() != state_seed(5, BellIndex(3, 2, 1)).generate_state(4).tolist()

    def test_unshifted_bob_misdecodes(self):
        # with V_k = U_k the pair picks up only a phase, so every state reads as (i, j-1)
        d = 3
        cfg = canonical_config(d)
        wrong = SwitchConfig(d, cfg.u_ops, cfg.u_ops)
        cm = deterministic_confusion(d, wrong)
        expected = np.zeros((d * d, d * d), dtype=np.int64)
        for i in range(d):
            for j in range(d):
                expected[BellIndex(d, i, j).flat, BellIndex(d, i, (j - 1) % d).flat] = 1
        assert np.array_equal(cm.counts, expected)
        assert cm.off_diagonal == d * d
        assert cm.accuracy == 0.0

    def test_invalid_counts(self):
        with pytest.raises(ValueError):
            ConfusionMatrix(2, np.eye(4, dtype=np.int64) * 2, 3)

    @pytest.mark.parametrize("d", range(2, 11))
    def test_completeness(self, d):
        decoded = {analyze_deterministic(d, BellIndex.from_flat(d, f), canonical_config(d)).decoded for f in range(d * d)}
        assert len(decoded) == d * d


class TestIterate:
    def test_qutrit_two_rounds(self):
        res = iterate_switch(3, BellIndex(3, 1, 0), canonical_config(3), 2)
        assert res.control_outcomes == (2, 2)
        assert fidelity(res.target, bell_state(BellIndex(3, 1, 2))) >= 1 - 1e-12

    def test_ququart_one_round(self):
        res = iterate_switch(4, BellIndex(4, 0, 3), canonical_config(4), 1)
        assert res.control_outcomes == (0,)
        assert fidelity(res.target, bell_state(BellIndex(4, 0, 0))) >= 1 - 1e-12

    def test_d_rounds_return_to_start(self):
        res = iterate_switch(5, BellIndex(5, 2, 1), canonical_config(5), 5)
        assert res.control_outcomes == (3,) * 5
        assert fidelity(res.target, bell_state(BellIndex(5, 2, 1))) >= 1 - 1e-12

    def test_bad_rounds(self):
        with pytest.raises(ValueError):
            iterate_switch(3, BellIndex(3, 0, 0), canonical_config(3), 0)
