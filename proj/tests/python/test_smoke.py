# Copyright 2026 The candrank Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# ==============================================================================

import math

import pytest

import candrank

C1 = "x1 x2 x3 p1 p2 a1 a2 a3 a4 a5"
C2 = "x1 x2 x3 p1 p2 q1 q2 q3 q4 b1"
C3 = "x1 x2 x3 q1 q2 q3 q4 u1 u2 u3"
REF = "x1 q1 q2 q3 u1 u2 a1 r1 r2 r3"


def test_tokenize_and_rouge():
    assert candrank.tokenize("The cat, sat!") == ["the", "cat", "sat"]
    r = candrank.rouge_n("the cat sat", "the cat ran", 1)
    assert r["f1"] == pytest.approx(2 / 3)
    assert candrank.rouge_l("a b c d", "a c d")["recall"] == pytest.approx(1.0)
    assert candrank.composite_rouge(C1, C2, "r1") == pytest.approx(0.5)


def test_consensus_hand_example():
    scores = candrank.consensus_score([C1, C2, C3], alpha=0, variant="r1")
    assert scores == pytest.approx([0.4, 0.6, 0.5], abs=1e-12)
    assert candrank.rank(scores) == [1, 2, 0]
    weighted = candrank.consensus_score([C1, C2, C3], REF, alpha=1, variant="r1")
    assert weighted == pytest.approx([1 / 3, 8 / 15, 8 / 15], abs=1e-12)


def test_infinite_alpha_is_reference_only():
    inf = candrank.consensus_score([C1, C2, C3], REF, alpha="inf", variant="r1")
    assert inf == candrank.brio_score([C1, C2, C3], REF, variant="r1")
    with pytest.raises(candrank.CandrankError):
        candrank.consensus_score([C1, C2], alpha="inf")


def test_loss_hand_example():
    f = [-1.0, -0.9, -1.2]
    s = [0.6, 0.5, 0.4]
    assert candrank.ctr_loss(f, s, "difference", 0.1) == pytest.approx(0.11, abs=1e-12)
    assert candrank.ctr_loss_grad(f, s, "difference", 0.1) == [-1.0, 1.0, 0.0]
    assert candrank.margin(0, 2, [0.9, 0.8, 0.7], "fixed", 0.01) == pytest.approx(0.02)
    assert candrank.combined_loss(2.0, 0.11, 50.0)["total"] == pytest.approx(7.5)
    assert candrank.grad_check(f, s, "difference", 0.1) < 1e-5
    assert candrank.f_value([-2.0, -2.0, -2.0], 1.0) == pytest.approx(-2.0)


def test_toy_model_beam_and_train():
    vocab = candrank.make_vocabulary(["cat", "sat", "the"])
    model = candrank.init_model(vocab, num_buckets=2, seed=3)
    assert len(model.logits) == 2 * 5 * 4
    lp = model.sequence_logprob("the cat sat", ["cat", "</s>"])
    assert all(v < 0 for v in lp)

    cands = candrank.diverse_beam_search(model, "the cat sat", num_groups=2,
                                         num_candidates=4, max_length=4)
    assert len(cands) == 4
    assert sorted(c["group"] for c in cands) == [0, 0, 1, 1]
    for c in cands:
        assert len(c["token_logprobs"]) == len(c["text"].split())

    trained, trace = candrank.train(model, [("the cat sat", "cat sat")], epochs=2,
                                    num_groups=2, num_candidates=4, max_length=4)
    assert len(trace) == 2
    assert trace[0]["total"] == pytest.approx(trace[0]["xent"] + 50 * trace[0]["ctr"])
    again, _ = candrank.train(model, [("the cat sat", "cat sat")], epochs=2,
                              num_groups=2, num_candidates=4, max_length=4)
    assert trained == again
    assert candrank.ToyModel.from_json(trained.to_json()) == trained


def test_simulate():
    r = candrank.simulate(trials=100, pool_size=16, alpha=0.0)
    assert r["trials"] == 100
    assert r["mean_score_faithful"] > r["mean_score_hallucinated"]
    assert r["rank_correlation"] > 0
    assert math.isfinite(r["score_gap"])


def test_errors_are_reported():
    with pytest.raises(candrank.CandrankError):
        candrank.consensus_score(["only one"], alpha=0)
    with pytest.raises(candrank.CandrankError):
        candrank.ctr_loss([-1.0, -2.0], [0.1, 0.5])
    with pytest.raises(candrank.CandrankError):
        candrank.composite_rouge("a", "b", "r9")
