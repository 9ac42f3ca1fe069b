// Config-driven command-line front end. Subcommands wire the library into
// reproducible runs: loss evaluation, direct embedding optimization, view
// sweeps, batch sampling, and the self-verification gate. All outputs are
// deterministic given the config, so reruns are byte-identical.
//
// Exit codes: 0 success, 1 usage/config error, 2 bad input or output file,
// 3 numerical failure, 4 verification check failure.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "mvcl/asymptotics.hpp"
#include "mvcl/encoder.hpp"
#include "mvcl/errors.hpp"
#include "mvcl/losses.hpp"
#include "mvcl/metrics.hpp"
#include "mvcl/mve_io.hpp"
#include "mvcl/optimize.hpp"
#include "mvcl/rng.hpp"
#include "mvcl/sampling.hpp"
#include "mvcl/tensor.hpp"
#include "mvcl/verify.hpp"

namespace {

using nlohmann::json;

constexpr const char* kVersion = "1.0.0";

struct CliExit {
  int code;
  std::string message;
};

int exit_code_for(const mvcl::Error& e) {
  switch (e.code()) {
    case mvcl::ErrorCode::Diverged:
    case mvcl::ErrorCode::SvdFailure:
    case mvcl::ErrorCode::OutOfDomain:
    case mvcl::ErrorCode::ZeroProjection:
    case mvcl::ErrorCode::ZeroRow:
    case mvcl::ErrorCode::NonFinite:
      return 3;
    case mvcl::ErrorCode::BadHeader:
    case mvcl::ErrorCode::ShapeMismatch:
    case mvcl::ErrorCode::IoFailure:
      return 2;
    default:
      return 1;  // config/usage: shapes, parameters, counts, names
  }
}

std::string fmt(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

// ---- config plumbing -------------------------------------------------------

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream f(path, std::ios::binary);
  if (!f) throw CliExit{1, "cannot open config file: " + path};
  json cfg;
  try {
    cfg = json::parse(f);
  } catch (const json::exception& e) {
    throw CliExit{1, std::string("config is not valid JSON: ") + e.what()};
  }
  if (!cfg.is_object()) throw CliExit{1, "config root must be a JSON object"};
  return cfg;
}

void reject_unknown(const json& cfg,
                    std::initializer_list<const char*> allowed) {
  for (const auto& item : cfg.items()) {
    bool known = false;
    for (const char* k : allowed) known = known || item.key() == k;
    if (!known) throw CliExit{1, "unknown config key: " + item.key()};
  }
}

double get_num(const json& cfg, const char* key, double def) {
  if (!cfg.contains(key)) return def;
  if (!cfg.at(key).is_number()) {
    throw CliExit{1, std::string("config key '") + key + "' must be a number"};
  }
  return cfg.at(key).get<double>();
}

std::uint64_t get_u64(const json& cfg, const char* key, std::uint64_t def) {
  if (!cfg.contains(key)) return def;
  const json& v = cfg.at(key);
  if (!v.is_number_integer() && !v.is_number_unsigned()) {
    throw CliExit{1, std::string("config key '") + key +
                         "' must be a nonnegative integer"};
  }
  if (v.is_number_integer() && v.get<std::int64_t>() < 0) {
    throw CliExit{1, std::string("config key '") + key + "' must be >= 0"};
  }
  return v.get<std::uint64_t>();
}

std::size_t get_size(const json& cfg, const char* key, std::size_t def) {
  return static_cast<std::size_t>(get_u64(cfg, key, def));
}

std::string get_str(const json& cfg, const char* key, const std::string& def) {
  if (!cfg.contains(key)) return def;
  if (!cfg.at(key).is_string()) {
    throw CliExit{1, std::string("config key '") + key + "' must be a string"};
  }
  return cfg.at(key).get<std::string>();
}

bool get_bool(const json& cfg, const char* key, bool def) {
  if (!cfg.contains(key)) return def;
  if (!cfg.at(key).is_boolean()) {
    throw CliExit{1, std::string("config key '") + key + "' must be a boolean"};
  }
  return cfg.at(key).get<bool>();
}

// ---- output plumbing -------------------------------------------------------

void write_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw CliExit{2, "cannot open for writing: " + tmp};
    f << content;
    f.flush();
    if (!f) throw CliExit{2, "write failed: " + tmp};
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw CliExit{2, "cannot move " + tmp + " to " + path};
}

std::string provenance_comments(const json& effective_config,
                                std::uint64_t seed) {
  std::ostringstream out;
  out << "# mvcl " << kVersion << "\n";
  out << "# config: " << effective_config.dump() << "\n";
  out << "# seed: " << seed << "\n";
  return out.str();
}

json report_skeleton(const char* command, const json& effective_config,
                     std::uint64_t seed) {
  json r;
  r["artifact_version"] = kVersion;
  r["command"] = command;
  r["config"] = effective_config;
  r["seed"] = seed;
  return r;
}

void emit_report(const json& report, const std::string& out_path) {
  const std::string text = report.dump(2) + "\n";
  std::cout << text;
  if (!out_path.empty()) write_atomic(out_path, text);
}

// ---- batch acquisition -----------------------------------------------------

mvcl::ViewBatch load_input_batch(const std::string& path) {
  try {
    mvcl::ViewBatch batch = mvcl::read_batch(path);
    mvcl::require_unit_rows(batch, 1e-6);
    return batch;
  } catch (const mvcl::Error& e) {
    throw CliExit{2, std::string("bad input file ") + path + ": " + e.what()};
  }
}

// concentration key: absent or null -> i.i.d. uniform rows; a number ->
// anchored multi-view sampler with that concentration.
mvcl::ViewBatch make_batch(const json& cfg, std::size_t m, std::size_t n,
                           std::size_t d, std::uint64_t seed) {
  if (cfg.contains("concentration") && !cfg.at("concentration").is_null()) {
    mvcl::SamplerConfig sc;
    sc.m = m;
    sc.n = n;
    sc.d = d;
    sc.concentration = get_num(cfg, "concentration", 0.0);
    sc.seed = seed;
    return mvcl::sample_multiview(sc);
  }
  return mvcl::sample_uniform_sphere(m, n, d, seed);
}

json concentration_echo(const json& cfg) {
  if (cfg.contains("concentration") && !cfg.at("concentration").is_null()) {
    return json(get_num(cfg, "concentration", 0.0));
  }
  return json(nullptr);
}

std::vector<std::string> loss_names_from_config(const json& cfg) {
  std::vector<std::string> names;
  if (cfg.contains("losses")) {
    if (!cfg.at("losses").is_array()) {
      throw CliExit{1, "config key 'losses' must be an array of names"};
    }
    for (const json& v : cfg.at("losses")) {
      if (!v.is_string()) {
        throw CliExit{1, "config key 'losses' must contain strings"};
      }
      names.push_back(v.get<std::string>());
    }
  }
  if (cfg.contains("loss")) names.push_back(get_str(cfg, "loss", ""));
  return names;
}

// ---- subcommands -----------------------------------------------------------

struct GlobalFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
};

int cmd_loss(const GlobalFlags& flags) {
  json cfg = load_config(flags.config_path);
  reject_unknown(cfg, {"loss", "losses", "tau", "m", "n", "d",
                       "concentration", "seed", "input", "out"});
  const std::vector<std::string> names = loss_names_from_config(cfg);
  if (names.empty()) {
    throw CliExit{1, "config must name at least one loss ('loss' or 'losses')"};
  }
  const double tau = get_num(cfg, "tau", 0.5);
  const std::uint64_t seed =
      flags.seed ? *flags.seed : get_u64(cfg, "seed", 0);
  const std::string input = get_str(cfg, "input", "");
  const std::string out =
      !flags.out.empty() ? flags.out : get_str(cfg, "out", "");

  mvcl::ViewBatch batch =
      input.empty()
          ? make_batch(cfg, get_size(cfg, "m", 8), get_size(cfg, "n", 2),
                       get_size(cfg, "d", 8), seed)
          : load_input_batch(input);

  json echo;
  echo["losses"] = names;
  echo["tau"] = tau;
  echo["seed"] = seed;
  if (input.empty()) {
    echo["m"] = batch.m;
    echo["n"] = batch.n;
    echo["d"] = batch.d;
    echo["concentration"] = concentration_echo(cfg);
  } else {
    echo["input"] = input;
  }

  json report = report_skeleton("loss", echo, seed);
  report["results"] = json::array();
  for (const std::string& name : names) {
    const mvcl::LossSpec spec{mvcl::loss_from_name(name), tau};
    const mvcl::LossBreakdown bd = mvcl::evaluate(spec, batch);
    json r;
    r["name"] = name;
    r["loss"] = bd.total;
    r["alignment_term"] = bd.alignment_term;
    r["uniformity_term"] = bd.uniformity_term;
    r["terms_per_instance"] = bd.terms_per_instance;
    r["kernel_evals"] = bd.kernel_evals;
    report["results"].push_back(r);
  }
  emit_report(report, out);
  return 0;
}

int cmd_optimize(const GlobalFlags& flags) {
  json cfg = load_config(flags.config_path);
  reject_unknown(cfg, {"loss", "tau", "m", "n", "d", "concentration", "seed",
                       "input", "steps", "learning_rate", "momentum",
                       "tolerance_grad_norm", "log_every", "out",
                       "final_out"});
  const std::string name = get_str(cfg, "loss", "");
  if (name.empty()) throw CliExit{1, "config must name a loss"};
  const double tau = get_num(cfg, "tau", 0.5);
  const std::uint64_t seed =
      flags.seed ? *flags.seed : get_u64(cfg, "seed", 0);
  const std::string input = get_str(cfg, "input", "");
  const std::string trace_path =
      !flags.out.empty() ? flags.out : get_str(cfg, "out", "trace.csv");
  const std::string final_path = get_str(cfg, "final_out", "final.mve");

  mvcl::OptConfig oc = mvcl::default_opt_config(tau);
  oc.steps = get_size(cfg, "steps", 1000);
  oc.learning_rate = get_num(cfg, "learning_rate", oc.learning_rate);
  oc.momentum = get_num(cfg, "momentum", 0.0);
  oc.tolerance_grad_norm = get_num(cfg, "tolerance_grad_norm", 1e-8);
  oc.log_every = get_size(cfg, "log_every", 1);
  oc.seed = seed;

  const mvcl::LossSpec spec{mvcl::loss_from_name(name), tau};
  mvcl::ViewBatch init =
      input.empty()
          ? make_batch(cfg, get_size(cfg, "m", 8), get_size(cfg, "n", 2),
                       get_size(cfg, "d", 3), seed)
          : load_input_batch(input);

  json echo;
  echo["loss"] = name;
  echo["tau"] = tau;
  echo["seed"] = seed;
  echo["steps"] = oc.steps;
  echo["learning_rate"] = oc.learning_rate;
  echo["momentum"] = oc.momentum;
  echo["tolerance_grad_norm"] = oc.tolerance_grad_norm;
  echo["log_every"] = oc.log_every;
  echo["out"] = trace_path;
  echo["final_out"] = final_path;
  if (input.empty()) {
    echo["m"] = init.m;
    echo["n"] = init.n;
    echo["d"] = init.d;
    echo["concentration"] = concentration_echo(cfg);
  } else {
    echo["input"] = input;
  }

  const mvcl::OptResult res = mvcl::optimize(spec, init, oc);

  std::ostringstream csv;
  csv << provenance_comments(echo, seed);
  csv << "step,loss,alignment,uniformity,grad_norm\n";
  for (const mvcl::OptRecord& r : res.trace.records) {
    csv << r.step << ',' << fmt(r.loss) << ',' << fmt(r.alignment) << ','
        << fmt(r.uniformity) << ',' << fmt(r.grad_norm) << '\n';
  }
  write_atomic(trace_path, csv.str());
  write_atomic(final_path, mvcl::format_batch(res.final));
  json meta = report_skeleton("optimize", echo, seed);
  write_atomic(final_path + ".meta.json", meta.dump(2) + "\n");

  const mvcl::MetricReport mr = mvcl::metric_report(res.final);
  const mvcl::OptRecord& last = res.trace.records.back();
  json report = report_skeleton("optimize", echo, seed);
  report["final"] = {{"loss", last.loss},
                     {"alignment", mr.alignment},
                     {"uniformity_wi", mr.uniformity_wi},
                     {"uniformity_moment", mr.uniformity_moment},
                     {"rankme", mr.rankme},
                     {"numerical_rank", mr.numerical_rank}};
  report["steps_run"] = last.step;
  report["stopped_early"] = last.step < oc.steps;
  report["trace_path"] = trace_path;
  report["final_path"] = final_path;
  std::cout << report.dump(2) << "\n";
  return 0;
}

int cmd_sweep(const GlobalFlags& flags) {
  json cfg = load_config(flags.config_path);
  reject_unknown(cfg, {"losses", "n_values", "budget", "m", "d", "tau",
                       "steps", "learning_rate", "momentum", "seed", "seeds",
                       "out", "mode", "input_dim", "concentration"});
  std::vector<std::string> names = loss_names_from_config(cfg);
  if (names.empty()) throw CliExit{1, "sweep needs a nonempty 'losses' list"};
  if (!cfg.contains("n_values") || !cfg.at("n_values").is_array() ||
      cfg.at("n_values").empty()) {
    throw CliExit{1, "sweep needs a nonempty 'n_values' list"};
  }
  std::vector<std::size_t> n_values;
  for (const json& v : cfg.at("n_values")) {
    if (!v.is_number_integer() && !v.is_number_unsigned()) {
      throw CliExit{1, "'n_values' must contain integers"};
    }
    n_values.push_back(v.get<std::size_t>());
  }
  const double tau = get_num(cfg, "tau", 0.5);
  const std::size_t d = get_size(cfg, "d", 16);
  const std::uint64_t base_seed =
      flags.seed ? *flags.seed : get_u64(cfg, "seed", 0);
  std::vector<std::uint64_t> seeds;
  if (cfg.contains("seeds")) {
    if (!cfg.at("seeds").is_array() || cfg.at("seeds").empty()) {
      throw CliExit{1, "'seeds' must be a nonempty array"};
    }
    for (const json& v : cfg.at("seeds")) {
      seeds.push_back(v.get<std::uint64_t>());
    }
  } else {
    seeds.push_back(base_seed);
  }
  const bool budget_mode = cfg.contains("budget");
  const std::size_t budget = get_size(cfg, "budget", 0);
  const std::size_t fixed_m = get_size(cfg, "m", 32);
  const std::string out =
      !flags.out.empty() ? flags.out : get_str(cfg, "out", "sweep.csv");
  const std::string mode = get_str(cfg, "mode", "direct");
  if (mode != "direct" && mode != "encoder") {
    throw CliExit{1, "'mode' must be \"direct\" or \"encoder\""};
  }
  const bool encoder_mode = mode == "encoder";
  const std::size_t input_dim = get_size(cfg, "input_dim", 2 * d);
  const double concentration = get_num(cfg, "concentration", 5.0);

  mvcl::OptConfig oc = mvcl::default_opt_config(tau);
  oc.steps = get_size(cfg, "steps", encoder_mode ? 400 : 500);
  oc.learning_rate =
      get_num(cfg, "learning_rate", encoder_mode ? tau : oc.learning_rate);
  oc.momentum = get_num(cfg, "momentum", 0.0);
  oc.log_every = oc.steps;  // sweep keeps endpoints only

  json echo;
  echo["losses"] = names;
  echo["n_values"] = n_values;
  if (budget_mode) {
    echo["budget"] = budget;
  } else {
    echo["m"] = fixed_m;
  }
  echo["d"] = d;
  echo["tau"] = tau;
  echo["steps"] = oc.steps;
  echo["learning_rate"] = oc.learning_rate;
  echo["momentum"] = oc.momentum;
  echo["seeds"] = seeds;
  echo["out"] = out;
  echo["mode"] = mode;
  if (encoder_mode) {
    echo["input_dim"] = input_dim;
    echo["concentration"] = concentration;
  }

  std::ostringstream csv;
  csv << provenance_comments(echo, base_seed);
  csv << "loss,n,m,seed,loss_final,alignment,uniformity,rankme,"
         "numerical_rank\n";
  for (std::size_t li = 0; li < names.size(); ++li) {
    const mvcl::LossSpec spec{mvcl::loss_from_name(names[li]), tau};
    for (const std::size_t n : n_values) {
      // Fixed-budget mode trades instances for views: m = floor(budget / n).
      const std::size_t m = budget_mode ? budget / n : fixed_m;
      if (m < 2) {
        throw CliExit{1, "sweep row has m < 2 (budget too small for n)"};
      }
      for (const std::uint64_t s : seeds) {
        const std::uint64_t row_seed = mvcl::derive_stream(
            s, (static_cast<std::uint64_t>(li) << 32) | n);
        mvcl::ViewBatch final_batch(1, 1, 1);
        double loss_final = 0.0;
        if (encoder_mode) {
          // Trains a linear encoder on noisy raw views instead of moving
          // embeddings freely. Free embeddings always reach near-full rank,
          // so view-count effects on effective rank only show up through an
          // encoder bottleneck.
          const mvcl::Tensor3 inputs = mvcl::sample_multiview(
              {m, n, input_dim, concentration, row_seed});
          mvcl::LinearEncoder enc(d, input_dim);
          mvcl::Rng wrng(mvcl::derive_stream(row_seed, 1));
          const double scale =
              1.0 / std::sqrt(static_cast<double>(input_dim));
          for (double& w : enc.weights) w = wrng.gaussian() * scale;
          for (std::size_t step = 0; step < oc.steps; ++step) {
            const std::vector<double> g =
                mvcl::encoder_gradient(enc, inputs, spec);
            for (std::size_t k = 0; k < g.size(); ++k) {
              enc.weights[k] -= oc.learning_rate * g[k];
            }
          }
          final_batch = mvcl::encoder_forward(enc, inputs);
          loss_final = mvcl::evaluate(spec, final_batch).total;
        } else {
          const mvcl::ViewBatch init =
              mvcl::sample_uniform_sphere(m, n, d, row_seed);
          mvcl::OptConfig row_cfg = oc;
          row_cfg.seed = row_seed;
          const mvcl::OptResult res = mvcl::optimize(spec, init, row_cfg);
          final_batch = res.final;
          loss_final = res.trace.records.back().loss;
        }
        const mvcl::MetricReport mr = mvcl::metric_report(final_batch);
        csv << names[li] << ',' << n << ',' << m << ',' << s << ','
            << fmt(loss_final) << ',' << fmt(mr.alignment) << ','
            << fmt(mr.uniformity_moment) << ',' << fmt(mr.rankme) << ','
            << mr.numerical_rank << '\n';
      }
    }
  }
  write_atomic(out, csv.str());

  json report = report_skeleton("sweep", echo, base_seed);
  report["rows"] = names.size() * n_values.size() * seeds.size();
  report["out"] = out;
  std::cout << report.dump(2) << "\n";
  return 0;
}

int cmd_sample(const GlobalFlags& flags) {
  json cfg = load_config(flags.config_path);
  reject_unknown(cfg, {"m", "n", "d", "concentration", "seed", "out"});
  const std::uint64_t seed =
      flags.seed ? *flags.seed : get_u64(cfg, "seed", 0);
  const std::string out =
      !flags.out.empty() ? flags.out : get_str(cfg, "out", "");
  if (out.empty()) throw CliExit{1, "sample needs an output path ('out')"};
  const std::size_t m = get_size(cfg, "m", 8);
  const std::size_t n = get_size(cfg, "n", 2);
  const std::size_t dd = get_size(cfg, "d", 8);
  const mvcl::ViewBatch batch = make_batch(cfg, m, n, dd, seed);

  json echo;
  echo["m"] = m;
  echo["n"] = n;
  echo["d"] = dd;
  echo["concentration"] = concentration_echo(cfg);
  echo["seed"] = seed;
  echo["out"] = out;

  write_atomic(out, mvcl::format_batch(batch));
  json meta = report_skeleton("sample", echo, seed);
  write_atomic(out + ".meta.json", meta.dump(2) + "\n");

  json report = report_skeleton("sample", echo, seed);
  report["path"] = out;
  report["rows"] = batch.rows();
  std::cout << report.dump(2) << "\n";
  return 0;
}

int cmd_verify(const GlobalFlags& flags) {
  json cfg = load_config(flags.config_path);
  reject_unknown(cfg, {"seed", "inject_gradient_fault", "out"});
  mvcl::VerifyOptions opts;
  opts.seed = flags.seed ? *flags.seed : get_u64(cfg, "seed", 2024);
  opts.inject_gradient_fault = get_bool(cfg, "inject_gradient_fault", false);
  const std::string out =
      !flags.out.empty() ? flags.out : get_str(cfg, "out", "");

  const mvcl::VerifyReport rep = mvcl::run_verification(opts);
  std::size_t passed = 0;
  for (const mvcl::CheckResult& c : rep.checks) {
    std::cout << (c.pass ? "[ ok ] " : "[FAIL] ") << c.name
              << " measured=" << fmt(c.measured)
              << " threshold=" << fmt(c.threshold) << "\n";
    if (c.pass) ++passed;
  }
  std::cout << "verify: " << passed << "/" << rep.checks.size()
            << " checks passed\n";

  if (!out.empty()) {
    json echo;
    echo["seed"] = opts.seed;
    echo["inject_gradient_fault"] = opts.inject_gradient_fault;
    json report = report_skeleton("verify", echo, opts.seed);
    report["checks"] = json::array();
    for (const mvcl::CheckResult& c : rep.checks) {
      report["checks"].push_back({{"name", c.name},
                                  {"measured", c.measured},
                                  {"threshold", c.threshold},
                                  {"pass", c.pass}});
    }
    report["all_pass"] = rep.all_pass;
    write_atomic(out, report.dump(2) + "\n");
  }
  return rep.all_pass ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-view contrastive loss toolkit"};
  app.require_subcommand(1);

  GlobalFlags flags;
  std::uint64_t seed_value = 0;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config_path,
                    "JSON config file for this subcommand");
    sub->add_option("--seed", seed_value, "override the config seed");
    sub->add_option("--out", flags.out, "override the config output path");
  };

  CLI::App* loss = app.add_subcommand("loss", "evaluate losses on a batch");
  CLI::App* optimize =
      app.add_subcommand("optimize", "projected gradient descent on a batch");
  CLI::App* sweep =
      app.add_subcommand("sweep", "optimize across view counts, emit a table");
  CLI::App* sample = app.add_subcommand("sample", "write a sampled batch");
  CLI::App* verify =
      app.add_subcommand("verify", "run the self-verification checks");
  for (CLI::App* sub : {loss, optimize, sweep, sample, verify}) {
    add_common(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  // The bound seed_value is only assigned during parse, so the override is
  // detected afterwards via count().
  for (CLI::App* sub : {loss, optimize, sweep, sample, verify}) {
    if (sub->count("--seed") > 0) flags.seed = seed_value;
  }

  try {
    if (loss->parsed()) return cmd_loss(flags);
    if (optimize->parsed()) return cmd_optimize(flags);
    if (sweep->parsed()) return cmd_sweep(flags);
    if (sample->parsed()) return cmd_sample(flags);
    if (verify->parsed()) return cmd_verify(flags);
  } catch (const CliExit& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  } catch (const mvcl::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
