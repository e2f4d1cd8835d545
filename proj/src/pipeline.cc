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

#include "candrank/pipeline.h"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "candrank/error.h"

namespace candrank {

using nlohmann::json;

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kInsufficientCandidates: return "insufficient_candidates";
    case ErrorCode::kMissingReference: return "missing_reference";
    case ErrorCode::kMissingLogprobs: return "missing_logprobs";
    case ErrorCode::kKinkProximity: return "kink_proximity";
    case ErrorCode::kOutOfVocabulary: return "out_of_vocabulary";
    case ErrorCode::kDegenerateModel: return "degenerate_model";
    case ErrorCode::kParse: return "parse_error";
    case ErrorCode::kIo: return "io_error";
  }
  return "unknown";
}

namespace {

[[noreturn]] void bad_config(const std::string& what) {
  fail(ErrorCode::kInvalidArgument, "config: " + what);
}

double get_number(const json& j, const std::string& key) {
  if (!j.is_number()) bad_config("'" + key + "' must be a number");
  return j.get<double>();
}

int get_int(const json& j, const std::string& key) {
  if (!j.is_number_integer()) bad_config("'" + key + "' must be an integer");
  return j.get<int>();
}

std::string get_string(const json& j, const std::string& key) {
  if (!j.is_string()) bad_config("'" + key + "' must be a string");
  return j.get<std::string>();
}

std::vector<double> get_logprobs(const json& j, std::size_t line,
                                 const std::string& what) {
  if (!j.is_array()) {
    fail(ErrorCode::kParse,
         "line " + std::to_string(line) + ": " + what + " must be an array");
  }
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number()) {
      fail(ErrorCode::kParse, "line " + std::to_string(line) + ": " + what +
                                  " must contain only numbers");
    }
    out.push_back(v.get<double>());
  }
  return out;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open '" + path + "'");
  return in;
}

bool is_blank(const std::string& s) {
  return s.find_first_not_of(" \t\r\n") == std::string::npos;
}

json parse_line(const std::string& text, std::size_t line) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::kParse,
         "line " + std::to_string(line) + ": malformed JSON (" + e.what() + ")");
  }
}

IngestedPool parse_pool_record(const json& j, std::size_t line) {
  const std::string where = "line " + std::to_string(line);
  if (!j.is_object()) fail(ErrorCode::kParse, where + ": record must be an object");
  for (const auto& [key, _] : j.items()) {
    if (key != "source" && key != "reference" && key != "candidates" &&
        key != "reference_token_logprobs") {
      fail(ErrorCode::kParse, where + ": unknown field '" + key + "'");
    }
  }
  IngestedPool out;
  out.line = line;
  if (!j.contains("source") || !j["source"].is_string()) {
    fail(ErrorCode::kParse, where + ": 'source' must be a string");
  }
  out.pool.source = TokenSequence::from_text(j["source"].get<std::string>());
  if (j.contains("reference") && !j["reference"].is_null()) {
    if (!j["reference"].is_string()) {
      fail(ErrorCode::kParse, where + ": 'reference' must be a string");
    }
    out.pool.reference = TokenSequence::from_text(j["reference"].get<std::string>());
  }
  if (j.contains("reference_token_logprobs")) {
    if (!out.pool.reference) {
      fail(ErrorCode::kParse,
           where + ": 'reference_token_logprobs' given without 'reference'");
    }
    auto lp = get_logprobs(j["reference_token_logprobs"], line,
                           "'reference_token_logprobs'");
    if (lp.empty() || lp.size() < out.pool.reference->size()) {
      fail(ErrorCode::kParse,
           where + ": 'reference_token_logprobs' must cover every reference token");
    }
    out.reference_logprobs = std::move(lp);
  }
  if (!j.contains("candidates") || !j["candidates"].is_array()) {
    fail(ErrorCode::kParse, where + ": 'candidates' must be an array");
  }
  std::size_t index = 0;
  for (const auto& c : j["candidates"]) {
    const std::string cand = where + ", candidate " + std::to_string(index);
    if (!c.is_object() || !c.contains("text") || !c["text"].is_string()) {
      fail(ErrorCode::kParse, cand + ": needs a string 'text'");
    }
    Candidate candidate;
    candidate.seq = TokenSequence::from_text(c["text"].get<std::string>());
    if (c.contains("token_logprobs") && !c["token_logprobs"].is_null()) {
      auto lp = get_logprobs(c["token_logprobs"], line, "'token_logprobs'");
      if (lp.size() != candidate.seq.size()) {
        fail(ErrorCode::kParse,
             cand + ": " + std::to_string(lp.size()) + " token_logprobs for " +
                 std::to_string(candidate.seq.size()) + " tokens");
      }
      for (double v : lp) {
        if (!(v <= 0.0)) fail(ErrorCode::kParse, cand + ": logprob must be <= 0");
      }
      candidate.token_logprobs = std::move(lp);
    }
    out.pool.candidates.push_back(std::move(candidate));
    ++index;
  }
  return out;
}

}  // namespace

TrainConfig RunConfig::train_config() const {
  TrainConfig t;
  t.learning_rate = learning_rate;
  t.epochs = epochs;
  t.loss = loss;
  t.margin = margin;
  t.scoring = scoring();
  t.beam = beam;
  t.seed = seed;
  return t;
}

SimConfig RunConfig::sim_config() const {
  SimConfig s;
  s.num_slots = sim_num_slots;
  s.vocab_per_slot = sim_vocab_per_slot;
  s.halluc_prob = sim_halluc_prob;
  s.pool_size = sim_pool_size;
  s.trials = sim_trials;
  s.alpha = alpha;
  s.variant = variant;
  s.seed = seed;
  return s;
}

void validate(const RunConfig& cfg) {
  validate(cfg.margin);
  validate(cfg.loss);
  validate(cfg.beam);
  if (!(cfg.learning_rate >= 0.0) || !std::isfinite(cfg.learning_rate)) {
    bad_config("learning_rate must be >= 0");
  }
  if (cfg.epochs < 0) bad_config("epochs must be >= 0");
  if (cfg.num_buckets < 1) bad_config("num_buckets must be >= 1");
  if (!(cfg.epsilon > 0.0)) bad_config("epsilon must be > 0");
  if (!(cfg.gradcheck_tolerance > 0.0)) bad_config("gradcheck_tolerance must be > 0");
  validate(cfg.sim_config());
}

json to_json(const RunConfig& cfg) {
  json j;
  j["version"] = kConfigVersion;
  j["variant"] = variant_name(cfg.variant);
  if (cfg.alpha.is_infinite()) {
    j["alpha"] = "inf";
  } else {
    j["alpha"] = cfg.alpha.value();
  }
  j["margin"] = margin_scheme_name(cfg.margin.scheme);
  j["lambda"] = cfg.margin.lambda;
  j["gamma"] = cfg.loss.gamma;
  j["beta"] = cfg.loss.beta;
  j["eta"] = cfg.beam.eta;
  j["num_candidates"] = cfg.beam.num_candidates;
  j["num_groups"] = cfg.beam.num_groups;
  j["max_length"] = cfg.beam.max_length;
  j["min_length"] = cfg.beam.min_length;
  j["seed"] = cfg.seed;
  j["learning_rate"] = cfg.learning_rate;
  j["epochs"] = cfg.epochs;
  j["num_buckets"] = cfg.num_buckets;
  j["epsilon"] = cfg.epsilon;
  j["gradcheck_tolerance"] = cfg.gradcheck_tolerance;
  j["sim_num_slots"] = cfg.sim_num_slots;
  j["sim_vocab_per_slot"] = cfg.sim_vocab_per_slot;
  j["sim_halluc_prob"] = cfg.sim_halluc_prob;
  j["sim_pool_size"] = cfg.sim_pool_size;
  j["sim_trials"] = cfg.sim_trials;
  j["input"] = cfg.input;
  j["output"] = cfg.output;
  j["corpus"] = cfg.corpus;
  j["model"] = cfg.model;
  j["model_out"] = cfg.model_out;
  j["source"] = cfg.source;
  return j;
}

RunConfig config_from_json(const json& j) {
  if (!j.is_object()) bad_config("top level must be an object");
  if (!j.contains("version")) bad_config("missing 'version'");
  if (get_int(j["version"], "version") != kConfigVersion) {
    bad_config("unsupported version " + j["version"].dump());
  }
  RunConfig cfg;
  for (const auto& [key, v] : j.items()) {
    if (key == "version") {
      continue;
    } else if (key == "variant") {
      auto parsed = parse_variant(get_string(v, key));
      if (!parsed) bad_config("unknown variant '" + v.get<std::string>() + "'");
      cfg.variant = *parsed;
    } else if (key == "alpha") {
      cfg.alpha = v.is_string() ? Alpha::parse(v.get<std::string>())
                                : Alpha(get_number(v, key));
    } else if (key == "margin") {
      auto parsed = parse_margin_scheme(get_string(v, key));
      if (!parsed) bad_config("unknown margin scheme '" + v.get<std::string>() + "'");
      cfg.margin.scheme = *parsed;
    } else if (key == "lambda") {
      cfg.margin.lambda = get_number(v, key);
    } else if (key == "gamma") {
      cfg.loss.gamma = get_number(v, key);
    } else if (key == "beta") {
      // One length penalty serves both the f-value and the beam ordering.
      cfg.loss.beta = get_number(v, key);
      cfg.beam.beta = cfg.loss.beta;
    } else if (key == "eta") {
      cfg.beam.eta = get_number(v, key);
    } else if (key == "num_candidates") {
      cfg.beam.num_candidates = get_int(v, key);
    } else if (key == "num_groups") {
      cfg.beam.num_groups = get_int(v, key);
    } else if (key == "max_length") {
      cfg.beam.max_length = get_int(v, key);
    } else if (key == "min_length") {
      cfg.beam.min_length = get_int(v, key);
    } else if (key == "seed") {
      if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
        bad_config("'seed' must be a non-negative integer");
      }
      cfg.seed = v.get<std::uint64_t>();
    } else if (key == "learning_rate") {
      cfg.learning_rate = get_number(v, key);
    } else if (key == "epochs") {
      cfg.epochs = get_int(v, key);
    } else if (key == "num_buckets") {
      cfg.num_buckets = get_int(v, key);
    } else if (key == "epsilon") {
      cfg.epsilon = get_number(v, key);
    } else if (key == "gradcheck_tolerance") {
      cfg.gradcheck_tolerance = get_number(v, key);
    } else if (key == "sim_num_slots") {
      cfg.sim_num_slots = get_int(v, key);
    } else if (key == "sim_vocab_per_slot") {
      cfg.sim_vocab_per_slot = get_int(v, key);
    } else if (key == "sim_halluc_prob") {
      cfg.sim_halluc_prob = get_number(v, key);
    } else if (key == "sim_pool_size") {
      cfg.sim_pool_size = get_int(v, key);
    } else if (key == "sim_trials") {
      cfg.sim_trials = get_int(v, key);
    } else if (key == "input") {
      cfg.input = get_string(v, key);
    } else if (key == "output") {
      cfg.output = get_string(v, key);
    } else if (key == "corpus") {
      cfg.corpus = get_string(v, key);
    } else if (key == "model") {
      cfg.model = get_string(v, key);
    } else if (key == "model_out") {
      cfg.model_out = get_string(v, key);
    } else if (key == "source") {
      cfg.source = get_string(v, key);
    } else {
      bad_config("unknown key '" + key + "'");
    }
  }
  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  auto in = open_input(path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::kParse, "config '" + path + "': " + e.what());
  }
  return config_from_json(j);
}

std::vector<IngestedPool> ingest(std::istream& in) {
  std::vector<IngestedPool> pools;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (is_blank(text)) continue;
    pools.push_back(parse_pool_record(parse_line(text, line), line));
  }
  return pools;
}

std::vector<IngestedPool> ingest(const std::string& path) {
  auto in = open_input(path);
  return ingest(in);
}

json pool_to_json(const CandidatePool& pool) {
  json j;
  j["source"] = pool.source.text();
  if (pool.reference) j["reference"] = pool.reference->text();
  json cands = json::array();
  for (const auto& c : pool.candidates) {
    json cj;
    cj["text"] = c.seq.text();
    if (c.token_logprobs) cj["token_logprobs"] = *c.token_logprobs;
    cands.push_back(std::move(cj));
  }
  j["candidates"] = std::move(cands);
  return j;
}

json to_json(const LossBreakdown& loss) {
  return {{"xent", loss.xent}, {"ctr", loss.ctr}, {"total", loss.total}};
}

json to_json(const SimReport& r) {
  return {{"top1_faithful_rate", r.top1_faithful_rate},
          {"mean_score_faithful", r.mean_score_faithful},
          {"mean_score_hallucinated", r.mean_score_hallucinated},
          {"score_gap", r.score_gap},
          {"rank_correlation", r.rank_correlation},
          {"gap_defined", r.gap_defined},
          {"trials", r.trials},
          {"trials_without_faithful", r.trials_without_faithful},
          {"faithful_count", r.faithful_count},
          {"hallucinated_count", r.hallucinated_count}};
}

json model_to_json(const ToyModelParams& params) {
  return {{"format", "candrank-toy-model"},
          {"version", kModelFormatVersion},
          {"vocabulary", params.vocabulary()},
          {"num_buckets", params.num_buckets()},
          {"logits", params.logits()}};
}

ToyModelParams model_from_json(const json& j) {
  try {
    if (j.at("format").get<std::string>() != "candrank-toy-model") {
      fail(ErrorCode::kParse, "not a toy model file");
    }
    if (j.at("version").get<int>() != kModelFormatVersion) {
      fail(ErrorCode::kParse, "unsupported model format version");
    }
    ToyModelParams params(j.at("vocabulary").get<std::vector<std::string>>(),
                          j.at("num_buckets").get<std::size_t>());
    auto logits = j.at("logits").get<std::vector<double>>();
    if (logits.size() != params.logits().size()) {
      fail(ErrorCode::kParse, "model logits table has the wrong size");
    }
    params.logits() = std::move(logits);
    return params;
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, std::string("model file: ") + e.what());
  }
}

void save_model(const ToyModelParams& params, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot write '" + path + "'");
  out << dump_line(model_to_json(params)) << '\n';
}

ToyModelParams load_model(const std::string& path) {
  auto in = open_input(path);
  try {
    return model_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    fail(ErrorCode::kParse, "model '" + path + "': " + e.what());
  }
}

std::string dump_line(const json& j) { return j.dump(); }

}  // namespace candrank
