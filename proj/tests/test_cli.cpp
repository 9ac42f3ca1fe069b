#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "mvcl/losses.hpp"
#include "mvcl/mve_io.hpp"
#include "mvcl/tensor.hpp"

using json = nlohmann::json;

namespace {

struct CliResult {
  int code = -1;
  std::string output;  // stdout and stderr combined
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CliResult run_cli(const std::string& args) {
  const std::string capture = "t_cli_capture.txt";
  const std::string cmd =
      std::string(MVCL_CLI_PATH) + " " + args + " > " + capture + " 2>&1";
  const int status = std::system(cmd.c_str());
  CliResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.output = slurp(capture);
  return r;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

// non-comment lines of a provenance-stamped CSV
std::vector<std::string> csv_lines(const std::string& path) {
  std::vector<std::string> lines;
  std::istringstream in(slurp(path));
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#') lines.push_back(line);
  }
  return lines;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string field;
  while (std::getline(in, field, sep)) out.push_back(field);
  return out;
}

}  // namespace

TEST_CASE("loss command is deterministic and its counters check out") {
  json cfg;
  cfg["losses"] = {"mv-dhel", "mv-infonce", "nt-xent"};
  cfg["m"] = 6;
  cfg["n"] = 2;
  cfg["d"] = 4;
  cfg["tau"] = 0.5;
  cfg["concentration"] = 3.0;
  cfg["seed"] = 7;
  cfg["out"] = "t_cli_loss_report.json";
  write_file("t_cli_loss.json", cfg.dump());

  const CliResult first = run_cli("loss --config t_cli_loss.json");
  REQUIRE(first.code == 0);
  const std::string snapshot = slurp("t_cli_loss_report.json");
  REQUIRE(!snapshot.empty());

  const CliResult second = run_cli("loss --config t_cli_loss.json");
  REQUIRE(second.code == 0);
  CHECK(slurp("t_cli_loss_report.json") == snapshot);  // byte-identical rerun
  CHECK(first.output == second.output);

  const json report = json::parse(snapshot);
  CHECK(report.at("artifact_version") == "1.0.0");
  CHECK(report.at("command") == "loss");
  CHECK(report.at("seed") == 7);
  REQUIRE(report.at("results").size() == 3);
  for (const json& r : report.at("results")) {
    const mvcl::LossName name =
        mvcl::loss_from_name(r.at("name").get<std::string>());
    const mvcl::TermCounts tc = mvcl::term_counts(name, 6, 2);
    CHECK(r.at("kernel_evals").get<std::int64_t>() == tc.kernel_evals);
    CHECK(r.at("terms_per_instance").get<std::int64_t>() ==
          tc.terms_per_instance);
    CHECK(std::isfinite(r.at("loss").get<double>()));
  }
}

TEST_CASE("optimize command records the trace and reruns bit for bit") {
  json cfg;
  cfg["loss"] = "mv-dhel";
  cfg["m"] = 4;
  cfg["n"] = 2;
  cfg["d"] = 3;
  cfg["tau"] = 0.5;
  cfg["steps"] = 40;
  cfg["log_every"] = 10;
  cfg["tolerance_grad_norm"] = 0.0;
  cfg["seed"] = 3;
  cfg["out"] = "t_cli_trace.csv";
  cfg["final_out"] = "t_cli_final.mve";
  write_file("t_cli_opt.json", cfg.dump());

  const CliResult first = run_cli("optimize --config t_cli_opt.json");
  REQUIRE(first.code == 0);
  const std::string trace_snapshot = slurp("t_cli_trace.csv");
  const std::string final_snapshot = slurp("t_cli_final.mve");

  const std::vector<std::string> rows = csv_lines("t_cli_trace.csv");
  REQUIRE(rows.size() == 6);  // header + steps 0,10,20,30,40
  CHECK(rows[0] == "step,loss,alignment,uniformity,grad_norm");
  CHECK(split(rows[1], ',')[0] == "0");
  CHECK(split(rows[5], ',')[0] == "40");
  for (std::size_t k = 1; k < rows.size(); ++k) {
    CHECK(split(rows[k], ',').size() == 5);
  }

  const json report = json::parse(first.output);
  CHECK(report.at("steps_run") == 40);
  CHECK(report.at("stopped_early") == false);
  CHECK(report.at("final").contains("rankme"));

  // the written batch is a valid unit-row MVE file with a provenance sidecar
  const mvcl::ViewBatch final_batch = mvcl::read_batch("t_cli_final.mve");
  CHECK(final_batch.m == 4);
  CHECK(final_batch.n == 2);
  CHECK(final_batch.d == 3);
  CHECK(max_unit_norm_deviation(final_batch) < 1e-12);
  const json meta = json::parse(slurp("t_cli_final.mve.meta.json"));
  CHECK(meta.at("command") == "optimize");

  const CliResult second = run_cli("optimize --config t_cli_opt.json");
  REQUIRE(second.code == 0);
  CHECK(slurp("t_cli_trace.csv") == trace_snapshot);
  CHECK(slurp("t_cli_final.mve") == final_snapshot);
}

TEST_CASE("sweep emits one row per loss, view count, and seed") {
  json cfg;
  cfg["losses"] = {"mv-dhel", "mv-infonce"};
  cfg["n_values"] = {2, 3, 4};
  cfg["budget"] = 256;
  cfg["d"] = 4;
  cfg["tau"] = 0.5;
  cfg["steps"] = 5;
  cfg["seeds"] = {1};
  cfg["out"] = "t_cli_sweep.csv";
  write_file("t_cli_sweep.json", cfg.dump());

  const CliResult r = run_cli("sweep --config t_cli_sweep.json");
  REQUIRE(r.code == 0);
  const std::string snapshot = slurp("t_cli_sweep.csv");

  const std::vector<std::string> rows = csv_lines("t_cli_sweep.csv");
  REQUIRE(rows.size() == 7);  // header + 2 losses * 3 view counts * 1 seed
  CHECK(rows[0] ==
        "loss,n,m,seed,loss_final,alignment,uniformity,rankme,"
        "numerical_rank");
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const std::vector<std::string> f = split(rows[k], ',');
    REQUIRE(f.size() == 9);
    // fixed budget: m = floor(256 / n)
    if (f[1] == "2") CHECK(f[2] == "128");
    if (f[1] == "3") CHECK(f[2] == "85");
    if (f[1] == "4") CHECK(f[2] == "64");
  }

  const CliResult again = run_cli("sweep --config t_cli_sweep.json");
  REQUIRE(again.code == 0);
  CHECK(slurp("t_cli_sweep.csv") == snapshot);
}

TEST_CASE("sample writes unit rows with a provenance sidecar") {
  json cfg;
  cfg["m"] = 5;
  cfg["n"] = 2;
  cfg["d"] = 4;
  cfg["seed"] = 21;
  cfg["out"] = "t_cli_sample.mve";
  write_file("t_cli_sample.json", cfg.dump());

  const CliResult r = run_cli("sample --config t_cli_sample.json");
  REQUIRE(r.code == 0);
  const mvcl::ViewBatch b = mvcl::read_batch("t_cli_sample.mve");
  CHECK(b.m == 5);
  CHECK(b.n == 2);
  CHECK(b.d == 4);
  CHECK(max_unit_norm_deviation(b) < 1e-12);
  const json meta = json::parse(slurp("t_cli_sample.mve.meta.json"));
  CHECK(meta.at("command") == "sample");
  CHECK(meta.at("seed") == 21);

  // the sampled file feeds straight back into the loss command
  json loss_cfg;
  loss_cfg["loss"] = "mv-dhel";
  loss_cfg["input"] = "t_cli_sample.mve";
  write_file("t_cli_loss_input.json", loss_cfg.dump());
  CHECK(run_cli("loss --config t_cli_loss_input.json").code == 0);
}

TEST_CASE("verify gates on its checks and fault injection trips it") {
  const CliResult ok = run_cli("verify");
  CHECK(ok.code == 0);
  CHECK(ok.output.find("verify: 6/6 checks passed") != std::string::npos);
  CHECK(ok.output.find("[FAIL]") == std::string::npos);

  write_file("t_cli_fault.json", R"({"inject_gradient_fault": true})");
  const CliResult bad = run_cli("verify --config t_cli_fault.json");
  CHECK(bad.code == 4);
  CHECK(bad.output.find("[FAIL] gradient-check") != std::string::npos);
}

TEST_CASE("usage problems exit with code 1") {
  CHECK(run_cli("").code == 1);           // a subcommand is required
  CHECK(run_cli("--help").code == 0);

  write_file("t_cli_bad_key.json", R"({"loss": "mv-dhel", "taw": 0.5})");
  const CliResult unknown_key = run_cli("loss --config t_cli_bad_key.json");
  CHECK(unknown_key.code == 1);
  CHECK(unknown_key.output.find("taw") != std::string::npos);

  write_file("t_cli_bad_loss.json", R"({"loss": "simclr"})");
  CHECK(run_cli("loss --config t_cli_bad_loss.json").code == 1);

  write_file("t_cli_bad_views.json", R"({"loss": "nt-xent", "n": 3})");
  CHECK(run_cli("loss --config t_cli_bad_views.json").code == 1);

  CHECK(run_cli("loss --config t_cli_nonexistent.json").code == 1);
}

TEST_CASE("unreadable or malformed inputs exit with code 2") {
  write_file("t_cli_missing_input.json",
             R"({"loss": "mv-dhel", "input": "t_cli_no_such.mve"})");
  CHECK(run_cli("loss --config t_cli_missing_input.json").code == 2);

  write_file("t_cli_bad.mve", "mve1 2 2\n");  // header misses the dimension
  write_file("t_cli_bad_input.json",
             R"({"loss": "mv-dhel", "input": "t_cli_bad.mve"})");
  CHECK(run_cli("loss --config t_cli_bad_input.json").code == 2);

  write_file("t_cli_offsphere.mve", "mve1 1 2 2\n0.5 0.5\n1 0\n");
  write_file("t_cli_offsphere.json",
             R"({"loss": "mv-dhel", "input": "t_cli_offsphere.mve"})");
  const CliResult r = run_cli("loss --config t_cli_offsphere.json");
  CHECK(r.code == 2);
  CHECK(r.output.find("NotUnitNorm") != std::string::npos);
}

TEST_CASE("seed flag overrides the config seed") {
  json cfg;
  cfg["loss"] = "mv-dhel";
  cfg["m"] = 4;
  cfg["n"] = 2;
  cfg["d"] = 3;
  cfg["seed"] = 7;
  write_file("t_cli_seedflag.json", cfg.dump());

  const CliResult base = run_cli("loss --config t_cli_seedflag.json");
  const CliResult same = run_cli("loss --config t_cli_seedflag.json --seed 7");
  const CliResult other =
      run_cli("loss --config t_cli_seedflag.json --seed 8");
  REQUIRE(base.code == 0);
  REQUIRE(same.code == 0);
  REQUIRE(other.code == 0);
  CHECK(base.output == same.output);
  CHECK(base.output != other.output);
}
