#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "scrt/decode.hpp"
#include "scrt/errors.hpp"
#include "scrt/feature_io.hpp"
#include "scrt/lm.hpp"
#include "scrt/model.hpp"
#include "scrt/model_io.hpp"
#include "scrt/run_config.hpp"
#include "scrt/streaming.hpp"
#include "scrt/synth.hpp"
#include "scrt/transducer.hpp"
#include "scrt/verify.hpp"
#include "scrt/wer.hpp"

namespace {

using nlohmann::json;

scrt::RunConfig load_run_config(const std::string& path) {
  if (path.empty()) return scrt::RunConfig{};
  return scrt::RunConfig::load(path);
}

/// Features come either from a FEAT file or from the seeded generator via
/// the form "synth:<seed>:<frames>".
scrt::Matrix load_feature_spec(const std::string& spec) {
  if (spec.rfind("synth:", 0) == 0) {
    const std::string rest = spec.substr(6);
    const auto colon = rest.find(':');
    if (colon == std::string::npos) {
      throw scrt::ConfigError("features must be a FEAT path or synth:<seed>:<frames>");
    }
    std::uint64_t seed = 0;
    std::size_t frames = 0;
    try {
      seed = std::stoull(rest.substr(0, colon));
      frames = std::stoull(rest.substr(colon + 1));
    } catch (const std::exception&) {
      throw scrt::ConfigError("malformed synthetic feature spec '" + spec + "'");
    }
    if (frames == 0) throw scrt::ConfigError("synthetic features need at least one frame");
    return scrt::synth_features(seed, frames);
  }
  return scrt::load_features(spec);
}

/// Weights come from --weights, then the config's weights path, then a
/// seeded random model built for the configured architecture.
scrt::ModelWeights resolve_model(const scrt::RunConfig& run, const std::string& weights_flag,
                                 std::size_t vocab_size) {
  const std::string path = !weights_flag.empty() ? weights_flag : run.paths.weights;
  if (!path.empty()) return scrt::load_model(path);
  scrt::ModelWeights model = scrt::make_model(run.encoder_config(), scrt::Vocab{vocab_size});
  scrt::init_uniform(model, run.seed);
  return model;
}

std::string render_tokens(const std::optional<scrt::TokenTable>& table,
                          const std::vector<int>& tokens) {
  if (table) return table->render(tokens);
  std::ostringstream os;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) os << ' ';
    os << tokens[i];
  }
  return os.str();
}

/// Greedy loop that also accumulates the log probability of every transition
/// it takes, so the CLI can report a score for the greedy mode. The token
/// choices mirror greedy_decode: per frame, argmax with the lowest class id
/// winning ties, until blank wins or the per-frame symbol cap forces blank.
std::pair<std::vector<int>, double> greedy_with_score(const scrt::TransducerScorer& scorer,
                                                      std::size_t max_symbols_per_frame) {
  std::vector<int> tokens;
  double score = 0.0;
  auto state = scorer.start();
  const std::size_t blank = scorer.num_classes() - 1;
  for (std::size_t t = 0; t < scorer.num_frames(); ++t) {
    std::size_t emitted = 0;
    while (true) {
      const auto dist = scorer.log_dist(t, state);
      std::size_t best = 0;
      for (std::size_t k = 1; k < dist.size(); ++k) {
        if (dist[k] > dist[best]) best = k;
      }
      if (best == blank || emitted >= max_symbols_per_frame) {
        score += dist[blank];
        break;
      }
      score += dist[best];
      tokens.push_back(static_cast<int>(best));
      state = scorer.advance(state, static_cast<int>(best));
      ++emitted;
    }
  }
  return {std::move(tokens), score};
}

int cmd_encode(const std::string& config_path, const std::string& features_spec,
               const std::string& out_path, const std::string& weights_path,
               const std::string& save_weights_path) {
  const scrt::RunConfig run = load_run_config(config_path);
  const scrt::ModelWeights model = resolve_model(run, weights_path, 1024);
  const scrt::Matrix feats = load_feature_spec(features_spec);
  const scrt::Matrix enc = scrt::encode_utterance(feats, model.encoder, model.config);
  scrt::save_features(enc, out_path);
  if (!save_weights_path.empty()) scrt::save_model(model, save_weights_path);
  std::cerr << "encoded " << feats.rows() << " feature frames into " << enc.rows()
            << " encoder frames (" << enc.cols() << "-dim)\n";
  return 0;
}

int cmd_decode(const std::string& config_path, const std::string& features_spec,
               const std::string& weights_path, const std::string& tokens_path,
               const std::string& lm_path, std::int64_t beam_flag, double lambda_flag,
               const std::string& id_flag) {
  const scrt::RunConfig run = load_run_config(config_path);

  std::optional<scrt::TokenTable> table;
  if (!tokens_path.empty() || !run.paths.tokens.empty()) {
    table = scrt::TokenTable::load(!tokens_path.empty() ? tokens_path : run.paths.tokens);
  }
  const std::size_t vocab_size = table ? table->size() : 1024;
  const scrt::ModelWeights model = resolve_model(run, weights_path, vocab_size);

  const scrt::Matrix feats = load_feature_spec(features_spec);
  const scrt::Matrix enc = scrt::encode_utterance(feats, model.encoder, model.config);
  const scrt::Predictor predictor(model.predictor, model.vocab);
  const scrt::Joiner joiner(model.joiner, model.vocab);

  scrt::DecodeOptions opts = run.decode;
  if (beam_flag >= 0) {
    opts.beam = static_cast<std::size_t>(beam_flag);
    if (opts.mode == "greedy") opts.mode = "beam";
  }
  if (lambda_flag >= 0.0) opts.lambda = lambda_flag;
  if (opts.beam == 0) throw scrt::ConfigError("--beam must be >= 1");

  std::unique_ptr<scrt::LmInterface> lm;
  const std::string lm_file = !lm_path.empty() ? lm_path : run.paths.lm_text;
  if (!lm_file.empty()) {
    if (!table) throw scrt::ConfigError("an LM text needs a token table (--tokens)");
    lm = std::make_unique<scrt::CountBigramLm>(scrt::CountBigramLm::from_text(lm_file, *table));
    opts.mode = "fusion";
  }
  if (opts.mode == "fusion" && !lm) {
    throw scrt::ConfigError("fusion decoding needs an LM text (--lm or paths.lm_text)");
  }

  std::vector<scrt::DecodeHyp> nbest;
  if (opts.mode == "greedy") {
    const scrt::ModelScorer scorer(enc, predictor, joiner);
    auto [tokens, score] = greedy_with_score(scorer, opts.max_symbols_per_frame);
    scrt::DecodeHyp hyp;
    hyp.tokens = std::move(tokens);
    hyp.score = score;
    hyp.acoustic = score;
    nbest.push_back(std::move(hyp));
  } else {
    const double lambda = opts.mode == "fusion" ? opts.lambda : 0.0;
    nbest = scrt::beam_decode(enc, predictor, joiner, opts.beam, opts.max_symbols_per_frame,
                              lm.get(), lambda);
  }
  if (nbest.empty()) throw scrt::StateError("decoder returned no hypotheses");

  json line;
  line["id"] = id_flag.empty() ? features_spec : id_flag;
  line["tokens"] = nbest[0].tokens;
  line["text"] = render_tokens(table, nbest[0].tokens);
  line["score"] = nbest[0].score;
  json nb = json::array();
  for (const auto& hyp : nbest) {
    nb.push_back({{"tokens", hyp.tokens},
                  {"text", render_tokens(table, hyp.tokens)},
                  {"score", hyp.score}});
  }
  line["n_best"] = nb;
  std::cout << line.dump() << "\n";
  return 0;
}

int cmd_verify(const std::string& suite) {
  const std::vector<scrt::CheckResult> results =
      suite == "all" ? scrt::run_all() : scrt::run_suite(suite);
  bool all_pass = true;
  json checks = json::array();
  for (const auto& r : results) {
    all_pass = all_pass && r.pass;
    json jc = {{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"seconds", r.seconds}};
    if (!r.detail.empty()) jc["detail"] = r.detail;
    checks.push_back(std::move(jc));
    std::ostringstream os;
    os.precision(3);
    os << (r.pass ? "PASS" : "FAIL") << ' ' << r.name << " (" << std::fixed << r.seconds
       << " s)";
    if (!r.detail.empty()) os << ": " << r.detail;
    std::cerr << os.str() << "\n";
  }
  const json report = {{"suite", suite}, {"pass", all_pass}, {"checks", checks}};
  std::cout << report.dump(2) << "\n";
  return all_pass ? 0 : 1;
}

int cmd_bench(const std::string& config_path, std::size_t segments, std::int64_t cap_flag) {
  const scrt::RunConfig run = load_run_config(config_path);
  const scrt::EncoderConfig cfg = run.encoder_config();
  const std::optional<std::size_t> cap =
      cap_flag >= 0 ? std::optional<std::size_t>{static_cast<std::size_t>(cap_flag)}
                    : cfg.memory_cap;
  const auto costs = scrt::bench_segment_costs(cfg, segments, cap);
  std::cout << "segment,key_len,micros\n";
  for (const auto& row : costs) {
    std::cout << row.segment << ',' << row.key_len << ',' << row.micros << "\n";
  }
  return 0;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw scrt::IoError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

int cmd_wer(const std::string& ref_path, const std::string& hyp_path) {
  const auto ref = scrt::split_words(read_text_file(ref_path));
  const auto hyp = scrt::split_words(read_text_file(hyp_path));
  const scrt::WerReport report = scrt::compute_wer(ref, hyp);
  const json out = {{"wer", report.wer},
                    {"substitutions", report.substitutions},
                    {"insertions", report.insertions},
                    {"deletions", report.deletions},
                    {"ref_words", report.ref_words}};
  std::cout << out.dump() << "\n";
  return 0;
}

int cmd_lookahead(const std::string& config_path) {
  const scrt::RunConfig run = load_run_config(config_path);
  const double ms = scrt::lookahead_ms(run.segmenter);
  if (ms == std::floor(ms)) {
    std::cout << static_cast<long long>(ms) << "\n";
  } else {
    std::cout << ms << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Streaming transducer inference harness"};
  app.require_subcommand(1);
  int rc = 0;

  std::string config_path, features_spec, out_path, weights_path, save_weights_path;
  std::string tokens_path, lm_path, id_flag, suite = "all", ref_path, hyp_path;
  std::int64_t beam_flag = -1, cap_flag = -1;
  double lambda_flag = -1.0;
  std::size_t segments = 20;

  CLI::App* encode = app.add_subcommand("encode", "Run the streaming encoder over features");
  encode->add_option("--config", config_path, "Run configuration JSON");
  encode->add_option("--features", features_spec, "FEAT file or synth:<seed>:<frames>")
      ->required();
  encode->add_option("--out", out_path, "Output FEAT file of encoder frames")->required();
  encode->add_option("--weights", weights_path, "SCRT weight file");
  encode->add_option("--save-weights", save_weights_path, "Write the weights that were used");
  encode->callback([&] {
    rc = cmd_encode(config_path, features_spec, out_path, weights_path, save_weights_path);
  });

  CLI::App* decode = app.add_subcommand("decode", "Decode features into token hypotheses");
  decode->add_option("--config", config_path, "Run configuration JSON");
  decode->add_option("--features", features_spec, "FEAT file or synth:<seed>:<frames>")
      ->required();
  decode->add_option("--weights", weights_path, "SCRT weight file");
  decode->add_option("--tokens", tokens_path, "Token table, one token per line");
  decode->add_option("--lm", lm_path, "LM training text for shallow fusion");
  decode->add_option("--beam", beam_flag, "Beam width (switches greedy mode to beam)");
  decode->add_option("--lambda", lambda_flag, "LM fusion weight");
  decode->add_option("--id", id_flag, "Utterance id for the JSON output");
  decode->callback([&] {
    rc = cmd_decode(config_path, features_spec, weights_path, tokens_path, lm_path, beam_flag,
                    lambda_flag, id_flag);
  });

  CLI::App* verify = app.add_subcommand("verify", "Run verification suites");
  verify->add_option("--suite", suite, "was, causality, chunking, rnnt, params, or all");
  verify->callback([&] { rc = cmd_verify(suite); });

  CLI::App* bench = app.add_subcommand("bench", "Per-segment cost table (CSV)");
  bench->add_option("--config", config_path, "Run configuration JSON");
  bench->add_option("--segments", segments, "Number of segments to process")->required();
  bench->add_option("--memory-cap", cap_flag, "Memory bank cap (overrides config)");
  bench->callback([&] { rc = cmd_bench(config_path, segments, cap_flag); });

  CLI::App* wer = app.add_subcommand("wer", "Word error rate between two text files");
  wer->add_option("--ref", ref_path, "Reference text file")->required();
  wer->add_option("--hyp", hyp_path, "Hypothesis text file")->required();
  wer->callback([&] { rc = cmd_wer(ref_path, hyp_path); });

  CLI::App* lookahead = app.add_subcommand("lookahead", "Print the configured lookahead in ms");
  lookahead->add_option("--config", config_path, "Run configuration JSON");
  lookahead->callback([&] { rc = cmd_lookahead(config_path); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const scrt::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const scrt::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 3;
  } catch (const std::out_of_range& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return rc;
}
