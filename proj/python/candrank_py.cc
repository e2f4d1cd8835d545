/* Copyright 2026 The candrank Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "candrank/consensus.h"
#include "candrank/contrastive_loss.h"
#include "candrank/diverse_beam.h"
#include "candrank/error.h"
#include "candrank/minority_sim.h"
#include "candrank/pipeline.h"
#include "candrank/text_metrics.h"
#include "candrank/toy_lm.h"

namespace py = pybind11;
using namespace pybind11::literals;

namespace candrank {
namespace {

RougeVariant variant_of(const std::string& name) {
  auto v = parse_variant(name);
  if (!v) fail(ErrorCode::kInvalidArgument, "unknown ROUGE variant '" + name + "'");
  return *v;
}

MarginSpec margin_of(const std::string& scheme, double lam) {
  auto s = parse_margin_scheme(scheme);
  if (!s) fail(ErrorCode::kInvalidArgument, "unknown margin scheme '" + scheme + "'");
  MarginSpec m{*s, lam};
  validate(m);
  return m;
}

// Accepts a number or the strings "inf"/"infinity".
Alpha alpha_of(const std::variant<double, std::string>& a) {
  if (const auto* s = std::get_if<std::string>(&a)) return Alpha::parse(*s);
  return Alpha(std::get<double>(a));
}

CandidatePool make_pool(const std::vector<std::string>& candidates,
                        const std::optional<std::string>& reference,
                        const std::string& source) {
  CandidatePool pool;
  pool.source = TokenSequence::from_text(source);
  if (reference) pool.reference = TokenSequence::from_text(*reference);
  for (const auto& c : candidates) {
    pool.candidates.push_back({TokenSequence::from_text(c), std::nullopt});
  }
  return pool;
}

py::dict rouge_dict(const RougeScore& s) {
  return py::dict("precision"_a = s.precision, "recall"_a = s.recall, "f1"_a = s.f1);
}

BeamConfig beam_config(double eta, int num_groups, int num_candidates, int max_length,
                       int min_length, double beta) {
  BeamConfig cfg;
  cfg.eta = eta;
  cfg.num_groups = num_groups;
  cfg.num_candidates = num_candidates;
  cfg.max_length = max_length;
  cfg.min_length = min_length;
  cfg.beta = beta;
  validate(cfg);
  return cfg;
}

}  // namespace
}  // namespace candrank

PYBIND11_MODULE(_candrank, m) {
  using namespace candrank;
  m.doc() = "Consensus ranking and contrastive training for summary candidates";

  py::register_exception<Error>(m, "CandrankError", PyExc_ValueError);

  m.def("tokenize", [](const std::string& text) { return tokenize(text); }, "text"_a);
  m.def(
      "rouge_n",
      [](const std::string& a, const std::string& b, int n) {
        return rouge_dict(rouge_n(TokenSequence::from_text(a), TokenSequence::from_text(b), n));
      },
      "a"_a, "b"_a, "n"_a);
  m.def(
      "rouge_l",
      [](const std::string& a, const std::string& b) {
        return rouge_dict(rouge_l(TokenSequence::from_text(a), TokenSequence::from_text(b)));
      },
      "a"_a, "b"_a);
  m.def(
      "composite_rouge",
      [](const std::string& a, const std::string& b, const std::string& variant) {
        return composite_rouge(TokenSequence::from_text(a), TokenSequence::from_text(b),
                               variant_of(variant));
      },
      "a"_a, "b"_a, "variant"_a = "harmonic_r1_r2");

  m.def(
      "consensus_score",
      [](const std::vector<std::string>& candidates, std::optional<std::string> reference,
         std::variant<double, std::string> alpha, const std::string& variant,
         const std::string& source) {
        return consensus_score(make_pool(candidates, reference, source),
                               {alpha_of(alpha), variant_of(variant)});
      },
      "candidates"_a, "reference"_a = py::none(), "alpha"_a = 31.0,
      "variant"_a = "harmonic_r1_r2", "source"_a = "");
  m.def(
      "brio_score",
      [](const std::vector<std::string>& candidates, const std::string& reference,
         const std::string& variant) {
        return brio_score(make_pool(candidates, reference, ""), variant_of(variant));
      },
      "candidates"_a, "reference"_a, "variant"_a = "harmonic_r1_r2");
  m.def(
      "rank", [](const std::vector<double>& scores) { return rank(scores).order; },
      "scores"_a, "Indices ordered by descending score, ties by index.");

  m.def(
      "f_value",
      [](const std::vector<double>& logprobs, double beta) {
        std::vector<std::string> words(logprobs.size(), "w");
        Candidate c{TokenSequence::from_tokens(std::move(words)), logprobs};
        return f_value(c, beta);
      },
      "token_logprobs"_a, "beta"_a = 1.0);
  m.def(
      "margin",
      [](std::size_t i, std::size_t j, const std::vector<double>& scores,
         const std::string& scheme, double lam) {
        return margin(i, j, scores, margin_of(scheme, lam));
      },
      "i"_a, "j"_a, "scores_ranked"_a, "scheme"_a = "difference", "lam"_a = 0.01);
  m.def(
      "ctr_loss",
      [](const std::vector<double>& f, const std::vector<double>& scores,
         const std::string& scheme, double lam) {
        return ctr_loss(f, scores, margin_of(scheme, lam));
      },
      "f"_a, "scores_ranked"_a, "scheme"_a = "difference", "lam"_a = 0.01);
  m.def(
      "ctr_loss_grad",
      [](const std::vector<double>& f, const std::vector<double>& scores,
         const std::string& scheme, double lam) {
        return ctr_loss_grad(f, scores, margin_of(scheme, lam));
      },
      "f"_a, "scores_ranked"_a, "scheme"_a = "difference", "lam"_a = 0.01);
  m.def(
      "grad_check",
      [](const std::vector<double>& f, const std::vector<double>& scores,
         const std::string& scheme, double lam, double epsilon) {
        return grad_check(f, scores, margin_of(scheme, lam), epsilon);
      },
      "f"_a, "scores_ranked"_a, "scheme"_a = "difference", "lam"_a = 0.01,
      "epsilon"_a = 1e-6);
  m.def(
      "combined_loss",
      [](double xent, double ctr, double gamma) {
        const auto l = combined_loss(xent, ctr, {gamma, 1.0});
        return py::dict("xent"_a = l.xent, "ctr"_a = l.ctr, "total"_a = l.total);
      },
      "xent"_a, "ctr"_a, "gamma"_a = 50.0);

  py::class_<ToyModelParams>(m, "ToyModel")
      .def(py::init<std::vector<std::string>, std::size_t>(), "vocabulary"_a,
           "num_buckets"_a = 1)
      .def_property_readonly("vocabulary", &ToyModelParams::vocabulary)
      .def_property_readonly("num_buckets", &ToyModelParams::num_buckets)
      .def_property(
          "logits", [](const ToyModelParams& p) { return p.logits(); },
          [](ToyModelParams& p, const std::vector<double>& v) {
            if (v.size() != p.logits().size()) {
              fail(ErrorCode::kInvalidArgument, "logits table has the wrong size");
            }
            p.logits() = v;
          })
      .def(
          "sequence_logprob",
          [](const ToyModelParams& p, const std::string& source,
             const std::vector<std::string>& tokens) {
            return sequence_logprob(p, TokenSequence::from_text(source), tokens);
          },
          "source"_a, "tokens"_a)
      .def("to_json", [](const ToyModelParams& p) { return dump_line(model_to_json(p)); })
      .def_static(
          "from_json",
          [](const std::string& text) {
            try {
              return model_from_json(nlohmann::json::parse(text));
            } catch (const nlohmann::json::parse_error& e) {
              fail(ErrorCode::kParse, e.what());
            }
          },
          "text"_a)
      .def("__eq__", [](const ToyModelParams& a, const ToyModelParams& b) { return a == b; });

  m.def(
      "make_vocabulary", [](std::vector<std::string> words) { return make_vocabulary(words); },
      "words"_a, "Prepends the sentence markers to a list of content words.");
  m.def("init_model", &init_model, "vocabulary"_a, "num_buckets"_a = 1, "seed"_a = 0);

  m.def(
      "diverse_beam_search",
      [](const ToyModelParams& params, const std::string& source, double eta, int num_groups,
         int num_candidates, int max_length, int min_length, double beta) {
        const ToyModel model(params);
        py::list out;
        for (const auto& gc :
             diverse_beam_search_detailed(model, TokenSequence::from_text(source),
                                          beam_config(eta, num_groups, num_candidates,
                                                      max_length, min_length, beta))) {
          out.append(py::dict("text"_a = gc.candidate.seq.text(),
                              "token_logprobs"_a = *gc.candidate.token_logprobs,
                              "group"_a = gc.group, "beam"_a = gc.beam,
                              "finished"_a = gc.finished, "f"_a = gc.f));
        }
        return out;
      },
      "model"_a, "source"_a, "eta"_a = 0.3, "num_groups"_a = 4, "num_candidates"_a = 32,
      "max_length"_a = 12, "min_length"_a = 1, "beta"_a = 1.0);

  m.def(
      "train",
      [](const ToyModelParams& params,
         const std::vector<std::pair<std::string, std::string>>& corpus, double learning_rate,
         int epochs, double gamma, const std::string& margin_scheme, double lam,
         std::variant<double, std::string> alpha, const std::string& variant, double eta,
         int num_groups, int num_candidates, int max_length, double beta) {
        TrainConfig cfg;
        cfg.learning_rate = learning_rate;
        cfg.epochs = epochs;
        cfg.loss = {gamma, beta};
        cfg.margin = margin_of(margin_scheme, lam);
        cfg.scoring = {alpha_of(alpha), variant_of(variant)};
        cfg.beam = beam_config(eta, num_groups, num_candidates, max_length, 1, beta);
        Corpus c;
        for (const auto& [src, ref] : corpus) {
          c.emplace_back(TokenSequence::from_text(src), TokenSequence::from_text(ref));
        }
        TrainResult r;
        {
          py::gil_scoped_release release;
          r = train(params, c, cfg);
        }
        py::list trace;
        for (const auto& e : r.trace) {
          trace.append(py::dict("xent"_a = e.xent, "ctr"_a = e.ctr, "total"_a = e.total));
        }
        return py::make_tuple(std::move(r.params), trace);
      },
      "model"_a, "corpus"_a, "learning_rate"_a = 0.001, "epochs"_a = 1, "gamma"_a = 50.0,
      "margin"_a = "difference", "lam"_a = 0.01, "alpha"_a = 31.0,
      "variant"_a = "harmonic_r1_r2", "eta"_a = 0.3, "num_groups"_a = 4,
      "num_candidates"_a = 32, "max_length"_a = 12, "beta"_a = 1.0,
      "Returns (trained model, per-epoch mean losses).");

  m.def(
      "simulate",
      [](int num_slots, int vocab_per_slot, double halluc_prob, int pool_size, int trials,
         std::variant<double, std::string> alpha, const std::string& variant,
         std::uint64_t seed) {
        SimConfig cfg;
        cfg.num_slots = num_slots;
        cfg.vocab_per_slot = vocab_per_slot;
        cfg.halluc_prob = halluc_prob;
        cfg.pool_size = pool_size;
        cfg.trials = trials;
        cfg.alpha = alpha_of(alpha);
        cfg.variant = variant_of(variant);
        cfg.seed = seed;
        SimReport r;
        {
          py::gil_scoped_release release;
          r = evaluate_conjecture(cfg);
        }
        return py::module_::import("json").attr("loads")(dump_line(to_json(r)));
      },
      "num_slots"_a = 4, "vocab_per_slot"_a = 10, "halluc_prob"_a = 0.2, "pool_size"_a = 16,
      "trials"_a = 1000, "alpha"_a = 0.0, "variant"_a = "harmonic_r1_r2", "seed"_a = 0);
}
