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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"

#include "candrank/error.h"
#include "candrank/pipeline.h"

namespace candrank {
namespace {

using nlohmann::json;

enum class Kind { kNumber, kInteger, kString, kAlpha };

struct FlagSpec {
  const char* key;
  Kind kind;
  const char* help;
};

// Every config key is also a flag (underscores become dashes).
constexpr FlagSpec kFlags[] = {
    {"variant", Kind::kString, "ROUGE variant: r1, r2, rl, harmonic_r1_r2, mean_r1_r2_rl"},
    {"alpha", Kind::kAlpha, "reference weight, non-negative or 'inf'"},
    {"margin", Kind::kString, "margin scheme: fixed or difference"},
    {"lambda", Kind::kNumber, "margin hyperparameter"},
    {"gamma", Kind::kNumber, "contrastive loss weight"},
    {"beta", Kind::kNumber, "length penalty exponent"},
    {"eta", Kind::kNumber, "diversity penalty"},
    {"num_candidates", Kind::kInteger, "candidates per pool (N)"},
    {"num_groups", Kind::kInteger, "beam groups (N_g)"},
    {"max_length", Kind::kInteger, "maximum decoding steps"},
    {"min_length", Kind::kInteger, "minimum content tokens before EOS"},
    {"seed", Kind::kInteger, "PRNG seed"},
    {"learning_rate", Kind::kNumber, "gradient-descent step size"},
    {"epochs", Kind::kInteger, "training epochs"},
    {"num_buckets", Kind::kInteger, "toy model source buckets"},
    {"epsilon", Kind::kNumber, "finite-difference step"},
    {"gradcheck_tolerance", Kind::kNumber, "gradcheck pass threshold"},
    {"sim_num_slots", Kind::kInteger, "simulation: fact slots per summary"},
    {"sim_vocab_per_slot", Kind::kInteger, "simulation: values per slot"},
    {"sim_halluc_prob", Kind::kNumber, "simulation: per-slot corruption probability"},
    {"sim_pool_size", Kind::kInteger, "simulation: candidates per pool"},
    {"sim_trials", Kind::kInteger, "simulation: number of trials"},
    {"input", Kind::kString, "input JSON-lines file"},
    {"output", Kind::kString, "output file (default stdout)"},
    {"corpus", Kind::kString, "training corpus JSON-lines file"},
    {"model", Kind::kString, "toy model file to load"},
    {"model_out", Kind::kString, "where to write the trained model"},
    {"source", Kind::kString, "source text for beam"},
};

json flag_value(const FlagSpec& spec, const std::string& raw) {
  switch (spec.kind) {
    case Kind::kString:
      return raw;
    case Kind::kAlpha:
      if (raw == "inf" || raw == "infinity") return raw;
      [[fallthrough]];
    case Kind::kNumber: {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(raw, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != raw.size() || raw.empty()) {
        fail(ErrorCode::kInvalidArgument,
             std::string("--") + spec.key + " expects a number, got '" + raw + "'");
      }
      return v;
    }
    case Kind::kInteger: {
      if (raw.empty() || raw.find_first_not_of("-0123456789") != std::string::npos) {
        fail(ErrorCode::kInvalidArgument,
             std::string("--") + spec.key + " expects an integer, got '" + raw + "'");
      }
      if (raw[0] == '-') return std::stoll(raw);
      return std::stoull(raw);
    }
  }
  return nullptr;
}

struct Output {
  std::string buffer;
  bool failed = false;

  void line(const json& j) {
    buffer += dump_line(j);
    buffer.push_back('\n');
  }
};

json record_header(std::size_t index, const IngestedPool& p) {
  return {{"index", index}, {"line", p.line}};
}

json error_record(json rec, const Error& e) {
  rec["error"] = {{"code", error_code_name(e.code())}, {"message", e.what()}};
  return rec;
}

// Runs fn on every pool, isolating per-record failures.
void for_each_pool(const std::vector<IngestedPool>& pools, Output& out,
                   const std::function<void(const IngestedPool&, json&)>& fn) {
  for (std::size_t i = 0; i < pools.size(); ++i) {
    json rec = record_header(i, pools[i]);
    try {
      fn(pools[i], rec);
    } catch (const Error& e) {
      rec = error_record(record_header(i, pools[i]), e);
      out.failed = true;
    }
    out.line(rec);
  }
}

std::vector<IngestedPool> require_input(const RunConfig& cfg) {
  if (cfg.input.empty()) fail(ErrorCode::kInvalidArgument, "--input is required");
  return ingest(cfg.input);
}

void cmd_score(const RunConfig& cfg, bool brio, bool with_order, Output& out) {
  const auto pools = require_input(cfg);
  for_each_pool(pools, out, [&](const IngestedPool& p, json& rec) {
    const auto scores =
        brio ? brio_score(p.pool, cfg.variant) : consensus_score(p.pool, cfg.scoring());
    rec["scores"] = scores;
    if (with_order) rec["order"] = rank(scores).order;
  });
}

void cmd_loss(const RunConfig& cfg, Output& out) {
  const auto pools = require_input(cfg);
  for_each_pool(pools, out, [&](const IngestedPool& p, json& rec) {
    std::vector<double> f;
    for (const auto& c : p.pool.candidates) {
      if (!c.token_logprobs) {
        fail(ErrorCode::kMissingLogprobs, "loss requires token_logprobs on every candidate");
      }
      f.push_back(f_value(c, cfg.loss.beta));
    }
    const auto scores = consensus_score(p.pool, cfg.scoring());
    const auto pl = pool_ctr_loss(f, scores, cfg.margin);
    double xent = 0.0;
    if (p.reference_logprobs) {
      for (double v : *p.reference_logprobs) xent -= v;
      xent /= static_cast<double>(p.reference_logprobs->size());
    }
    const auto loss = combined_loss(xent, pl.ctr, cfg.loss);
    rec["scores"] = scores;
    rec["order"] = pl.ranking.order;
    rec["f"] = f;
    rec["grad_f"] = pl.grad_f;
    rec["xent"] = loss.xent;
    rec["ctr"] = loss.ctr;
    rec["total"] = loss.total;
    rec["xent_available"] = p.reference_logprobs.has_value();
  });
}

void cmd_gradcheck(const RunConfig& cfg, Output& out) {
  const auto pools = require_input(cfg);
  for_each_pool(pools, out, [&](const IngestedPool& p, json& rec) {
    const auto scores = consensus_score(p.pool, cfg.scoring());
    const auto r = rank(scores);
    std::vector<double> f_ranked, s_ranked;
    for (std::size_t k : r.order) {
      f_ranked.push_back(f_value(p.pool.candidates[k], cfg.loss.beta));
      s_ranked.push_back(scores[k]);
    }
    const double err = grad_check(f_ranked, s_ranked, cfg.margin, cfg.epsilon);
    const bool pass = err <= cfg.gradcheck_tolerance;
    rec["max_rel_error"] = err;
    rec["pass"] = pass;
    if (!pass) out.failed = true;
  });
}

std::vector<std::string> sorted_vocabulary(const std::vector<TokenSequence>& texts) {
  std::set<std::string> words;
  for (const auto& t : texts) words.insert(t.tokens().begin(), t.tokens().end());
  return make_vocabulary({words.begin(), words.end()});
}

struct CorpusLine {
  std::size_t line;
  TokenSequence source;
  TokenSequence reference;
};

std::vector<CorpusLine> read_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open '" + path + "'");
  std::vector<CorpusLine> out;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error&) {
      fail(ErrorCode::kParse, "corpus line " + std::to_string(line) + ": malformed JSON");
    }
    if (!j.is_object() || !j.contains("source") || !j["source"].is_string() ||
        !j.contains("reference") || !j["reference"].is_string()) {
      fail(ErrorCode::kParse, "corpus line " + std::to_string(line) +
                                  ": needs string 'source' and 'reference'");
    }
    out.push_back({line, TokenSequence::from_text(j["source"].get<std::string>()),
                   TokenSequence::from_text(j["reference"].get<std::string>())});
  }
  return out;
}

void cmd_beam(const RunConfig& cfg, Output& out) {
  std::vector<CandidatePool> requests;
  if (!cfg.input.empty()) {
    for (auto& p : ingest(cfg.input)) {
      p.pool.candidates.clear();
      requests.push_back(std::move(p.pool));
    }
  }
  if (!cfg.source.empty()) {
    CandidatePool p;
    p.source = TokenSequence::from_text(cfg.source);
    requests.push_back(std::move(p));
  }
  if (requests.empty()) {
    fail(ErrorCode::kInvalidArgument, "beam needs --input or --source");
  }
  ToyModelParams params;
  if (!cfg.model.empty()) {
    params = load_model(cfg.model);
  } else {
    std::vector<TokenSequence> texts;
    for (const auto& r : requests) {
      texts.push_back(r.source);
      if (r.reference) texts.push_back(*r.reference);
    }
    params = init_model(sorted_vocabulary(texts),
                        static_cast<std::size_t>(cfg.num_buckets), cfg.seed);
  }
  const ToyModel model(params);
  for (auto& r : requests) {
    r.candidates = diverse_beam_search(model, r.source, cfg.beam);
    out.line(pool_to_json(r));
  }
}

void cmd_train(const RunConfig& cfg, Output& out) {
  if (cfg.corpus.empty()) fail(ErrorCode::kInvalidArgument, "--corpus is required");
  const auto lines = read_corpus(cfg.corpus);
  if (lines.empty()) fail(ErrorCode::kInvalidArgument, "corpus is empty");
  Corpus corpus;
  std::vector<TokenSequence> refs;
  for (const auto& l : lines) {
    corpus.emplace_back(l.source, l.reference);
    refs.push_back(l.reference);
  }
  ToyModelParams params =
      cfg.model.empty()
          ? init_model(sorted_vocabulary(refs),
                       static_cast<std::size_t>(cfg.num_buckets), cfg.seed)
          : load_model(cfg.model);
  const auto result = train(std::move(params), corpus, cfg.train_config());
  for (std::size_t e = 0; e < result.trace.size(); ++e) {
    const auto& t = result.trace[e];
    out.line({{"epoch", e}, {"xent", t.xent}, {"ctr", t.ctr}, {"total", t.total}});
  }
  if (!cfg.model_out.empty()) save_model(result.params, cfg.model_out);
}

void cmd_simulate(const RunConfig& cfg, Output& out) {
  out.line(to_json(evaluate_conjecture(cfg.sim_config())));
}

// Aggregates any JSON-lines file emitted by this tool: record and error
// counts plus count/mean/min/max of every top-level numeric field.
void cmd_report(const RunConfig& cfg, Output& out) {
  if (cfg.input.empty()) fail(ErrorCode::kInvalidArgument, "--input is required");
  std::ifstream in(cfg.input);
  if (!in) fail(ErrorCode::kIo, "cannot open '" + cfg.input + "'");
  struct Stat {
    long long count = 0;
    double sum = 0.0;
    double min = 0.0;
    double max = 0.0;
  };
  std::map<std::string, Stat> stats;
  long long records = 0, errors = 0;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error&) {
      fail(ErrorCode::kParse, "line " + std::to_string(line) + ": malformed JSON");
    }
    ++records;
    if (j.contains("error")) ++errors;
    if (!j.is_object()) continue;
    for (const auto& [key, v] : j.items()) {
      if (!v.is_number() || key == "index" || key == "line") continue;
      const double x = v.get<double>();
      auto& s = stats[key];
      if (s.count == 0) {
        s.min = s.max = x;
      } else {
        s.min = std::min(s.min, x);
        s.max = std::max(s.max, x);
      }
      s.sum += x;
      ++s.count;
    }
  }
  json fields = json::object();
  for (const auto& [key, s] : stats) {
    fields[key] = {{"count", s.count},
                   {"mean", s.sum / static_cast<double>(s.count)},
                   {"min", s.min},
                   {"max", s.max}};
  }
  out.line({{"records", records}, {"errors", errors}, {"fields", fields}});
  if (errors > 0) out.failed = true;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Consensus ranking and contrastive training for summary candidates"};
  app.require_subcommand(1, 1);
  app.fallthrough();

  std::string config_path;
  app.add_option("--config", config_path, "JSON run configuration file");
  std::map<std::string, std::string> raw;
  std::vector<std::pair<const FlagSpec*, CLI::Option*>> flag_opts;
  for (const auto& spec : kFlags) {
    std::string name = spec.key;
    std::replace(name.begin(), name.end(), '_', '-');
    flag_opts.emplace_back(&spec, app.add_option("--" + name, raw[spec.key], spec.help));
  }

  bool brio = false;
  auto* score = app.add_subcommand("score", "consensus score of every pool");
  score->add_flag("--brio", brio, "score against the reference only");
  auto* rank_cmd = app.add_subcommand("rank", "scores plus ranking of every pool");
  auto* loss = app.add_subcommand("loss", "contrastive loss of every pool");
  auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference check per pool");
  auto* beam = app.add_subcommand("beam", "diverse beam search with the toy model");
  auto* train_cmd = app.add_subcommand("train", "train the toy model");
  auto* simulate = app.add_subcommand("simulate", "hallucination minority simulation");
  auto* report = app.add_subcommand("report", "summarize a JSON-lines report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream msg, emsg;
    const int code = app.exit(e, msg, emsg);
    out << msg.str();
    err << emsg.str();
    return code == 0 ? kExitOk : kExitInputError;
  }

  RunConfig cfg;
  try {
    json merged = to_json(RunConfig{});
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) fail(ErrorCode::kIo, "cannot open config '" + config_path + "'");
      json file;
      try {
        file = json::parse(in);
      } catch (const json::parse_error& e) {
        fail(ErrorCode::kParse, "config '" + config_path + "': " + e.what());
      }
      // Validates the file on its own (version, unknown keys) first.
      config_from_json(file);
      merged.update(file);
    }
    for (const auto& [spec, opt] : flag_opts) {
      if (opt->count() > 0) merged[spec->key] = flag_value(*spec, raw[spec->key]);
    }
    cfg = config_from_json(merged);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }

  Output result;
  try {
    if (score->parsed()) {
      cmd_score(cfg, brio, false, result);
    } else if (rank_cmd->parsed()) {
      cmd_score(cfg, false, true, result);
    } else if (loss->parsed()) {
      cmd_loss(cfg, result);
    } else if (gradcheck->parsed()) {
      cmd_gradcheck(cfg, result);
    } else if (beam->parsed()) {
      cmd_beam(cfg, result);
    } else if (train_cmd->parsed()) {
      cmd_train(cfg, result);
    } else if (simulate->parsed()) {
      cmd_simulate(cfg, result);
    } else if (report->parsed()) {
      cmd_report(cfg, result);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    const bool input = e.code() == ErrorCode::kParse || e.code() == ErrorCode::kIo ||
                       e.code() == ErrorCode::kInvalidArgument;
    return input ? kExitInputError : kExitRecordFailure;
  }

  if (cfg.output.empty()) {
    out << result.buffer;
  } else {
    std::ofstream file(cfg.output, std::ios::binary);
    if (!file) {
      err << "error: cannot write '" << cfg.output << "'\n";
      return kExitInputError;
    }
    file << result.buffer;
  }
  if (result.failed) {
    err << "error: one or more records failed\n";
    return kExitRecordFailure;
  }
  return kExitOk;
}

}  // namespace candrank
