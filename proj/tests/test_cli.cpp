#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cmv/cli.hpp"
#include "cmv/random.hpp"
#include "cmv/verblunsky.hpp"

using namespace cmv;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("cmv_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write_text(const fs::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  out << s;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  return cli_run(args, out, err);
}

json borg_config() {
  auto seq = VerblunskySequence::borg(1, ArcSpec(PI / 2, 3 * PI / 2), Matrix::Identity(1, 1));
  json cfg;
  cfg["sequence"] = json::parse(seq.to_json());
  cfg["arc"] = {PI / 2, 3 * PI / 2};
  return cfg;
}

}  // namespace

TEST_CASE("spectrum command writes deterministic outputs and passes containment") {
  auto dir_a = fresh_dir("spec_a");
  auto dir_b = fresh_dir("spec_b");
  json cfg = borg_config();
  cfg["range"] = {-64, 63};
  cfg["k0"] = 0;
  auto cfg_path = dir_a / "config.json";
  write_text(cfg_path, cfg.dump(2));
  for (const auto& d : {dir_a, dir_b})
    CHECK(run_cli({"spectrum", "--config", cfg_path.string(), "--out", d.string()}) == 0);
  for (const char* f : {"eigenangles.csv", "measure.csv", "summary.json"}) {
    CHECK(fs::exists(dir_a / f));
    CHECK(slurp(dir_a / f) == slurp(dir_b / f));
  }
  auto summary = json::parse(slurp(dir_a / "summary.json"));
  CHECK(summary.at("schema").get<int>() == 1);
  CHECK(summary.at("pass").get<bool>());
  CHECK(summary.at("results").at("containment").at("inside_fraction").get<double>() >= 0.99);
  CHECK(summary.at("results").at("unitarity_defect").get<double>() < 1e-10);
}

TEST_CASE("trace command writes a passing report for the arc family") {
  auto dir = fresh_dir("trace");
  json cfg = borg_config();
  cfg["radius"] = 0.99;
  cfg["grid_n"] = 1024;
  cfg["half_width"] = 1024;
  cfg["jmax"] = 2;
  cfg["tol"] = 1e-4;
  auto cfg_path = dir / "config.json";
  write_text(cfg_path, cfg.dump(2));
  CHECK(run_cli({"trace", "--config", cfg_path.string(), "--out", dir.string()}) == 0);
  auto report = json::parse(slurp(dir / "trace_report.json"));
  CHECK(report.at("schema").get<int>() == 1);
  CHECK(report.at("max_err").get<double>() < 1e-4);
  CHECK(slurp(dir / "xi.csv").rfind("theta,ok", 0) == 0);
  auto summary = json::parse(slurp(dir / "summary.json"));
  CHECK(summary.at("pass").get<bool>());
}

TEST_CASE("xi command reports a small synthesis residual and honors overrides") {
  auto dir = fresh_dir("xi");
  auto seq = VerblunskySequence::free_seq(2);
  json cfg;
  cfg["sequence"] = json::parse(seq.to_json());
  cfg["radius"] = 0.9;
  cfg["grid_n"] = 256;
  cfg["half_width"] = 64;
  auto cfg_path = dir / "config.json";
  write_text(cfg_path, cfg.dump(2));
  CHECK(run_cli({"xi", "--config", cfg_path.string(), "--out", dir.string()}) == 0);
  auto summary = json::parse(slurp(dir / "summary.json"));
  CHECK(summary.at("results").at("synth_residual").get<double>() < 1e-6);
  CHECK(summary.at("results").at("max_angle").get<double>() < 1e-4);

  auto dir2 = fresh_dir("xi_override");
  CHECK(run_cli({"xi", "--config", cfg_path.string(), "--out", dir2.string(), "--grid-n",
                 "128"}) == 0);
  auto summary2 = json::parse(slurp(dir2 / "summary.json"));
  CHECK(summary2.at("config").at("grid_n").get<int>() == 128);
}

TEST_CASE("reflectionless command accepts the arc family and rejects a perturbation") {
  auto dir = fresh_dir("refl");
  json cfg = borg_config();
  cfg["radius"] = 0.999;
  cfg["angles"] = 3;
  cfg["collar"] = 0.35;
  cfg["sites"] = {0, 1};
  auto cfg_path = dir / "config.json";
  write_text(cfg_path, cfg.dump(2));
  CHECK(run_cli({"reflectionless", "--config", cfg_path.string(), "--out", dir.string()}) == 0);
  auto summary = json::parse(slurp(dir / "summary.json"));
  CHECK(summary.at("pass").get<bool>());
  CHECK(summary.at("results").at("worst_pair").get<double>() < 0.05);

  auto bad = VerblunskySequence::borg(1, ArcSpec(PI / 2, 3 * PI / 2), Matrix::Identity(1, 1));
  Matrix off(1, 1);
  off(0, 0) = Complex(std::cos(PI / 4), 0.3);
  bad.set_override(0, off);
  json cfg2 = cfg;
  cfg2["sequence"] = json::parse(bad.to_json());
  auto cfg2_path = dir / "config_bad.json";
  write_text(cfg2_path, cfg2.dump(2));
  auto dir2 = fresh_dir("refl_bad");
  CHECK(run_cli({"reflectionless", "--config", cfg2_path.string(), "--out", dir2.string()}) == 1);
  auto summary2 = json::parse(slurp(dir2 / "summary.json"));
  CHECK_FALSE(summary2.at("pass").get<bool>());
  CHECK(summary2.at("results").at("worst_pair").get<double>() > 0.05);
}

TEST_CASE("resolvent check command passes on a compact window") {
  auto dir = fresh_dir("resolvent");
  Rng rng(91);
  std::vector<Matrix> window;
  for (int i = 0; i < 8; ++i) window.push_back(rng.contraction(2, 0.7));
  auto seq = VerblunskySequence::windowed(2, -3, window);
  json cfg;
  cfg["sequence"] = json::parse(seq.to_json());
  cfg["pairs"] = 5;
  cfg["k_abs_max"] = 6;
  auto cfg_path = dir / "config.json";
  write_text(cfg_path, cfg.dump(2));
  CHECK(run_cli({"resolvent-check", "--config", cfg_path.string(), "--out", dir.string(),
                 "--seed", "7"}) == 0);
  auto summary = json::parse(slurp(dir / "summary.json"));
  CHECK(summary.at("pass").get<bool>());
  CHECK(summary.at("results").at("worst").get<double>() < 1e-8);
  CHECK(summary.at("config").at("seed").get<int>() == 7);
  CHECK(summary.at("results").at("entries").size() == 10);
}

TEST_CASE("borg verify command passes for the arc family") {
  auto dir = fresh_dir("borg");
  json cfg;
  cfg["m"] = 1;
  cfg["arc"] = {PI / 2, 3 * PI / 2};
  cfg["radius"] = 0.99;
  cfg["grid_n"] = 1024;
  cfg["half_width"] = 512;
  cfg["sites"] = 128;
  cfg["ladder_range"] = 6;
  cfg["collar"] = 0.3;
  auto cfg_path = dir / "config.json";
  write_text(cfg_path, cfg.dump(2));
  CHECK(run_cli({"borg-verify", "--config", cfg_path.string(), "--out", dir.string()}) == 0);
  auto summary = json::parse(slurp(dir / "summary.json"));
  CHECK(summary.at("pass").get<bool>());
  for (const char* k : {"ladder_ok", "coeff_ok", "containment_ok", "xi_ok", "equiv_ok"})
    CHECK(summary.at("results").at(k).get<bool>());
  CHECK(summary.at("results").at("ladder_worst").get<double>() < 1e-12);
}

TEST_CASE("config and usage errors exit with code two") {
  auto dir = fresh_dir("errors");
  CHECK(run_cli({"trace", "--config", (dir / "missing.json").string()}) == 2);

  auto broken = dir / "broken.json";
  write_text(broken, "{not json");
  CHECK(run_cli({"trace", "--config", broken.string()}) == 2);

  auto empty = dir / "empty.json";
  write_text(empty, "{}");
  CHECK(run_cli({"trace", "--config", empty.string(), "--out", dir.string()}) == 2);
  CHECK(run_cli({"reflectionless", "--config", empty.string(), "--out", dir.string()}) == 2);

  CHECK(run_cli({"bogus", "--config", empty.string()}) == 2);
  CHECK(run_cli({"trace"}) == 2);

  json cfg = borg_config();
  cfg["radius"] = 1.5;  // outside the disk
  auto bad_radius = dir / "bad_radius.json";
  write_text(bad_radius, cfg.dump(2));
  CHECK(run_cli({"xi", "--config", bad_radius.string(), "--out", dir.string()}) == 2);
}

TEST_CASE("output directories are created on demand") {
  auto dir = fresh_dir("mkdirs");
  json cfg = borg_config();
  cfg["range"] = {-16, 15};
  auto cfg_path = dir / "config.json";
  write_text(cfg_path, cfg.dump(2));
  auto nested = dir / "deep" / "nested";
  CHECK(run_cli({"spectrum", "--config", cfg_path.string(), "--out", nested.string()}) == 0);
  CHECK(fs::exists(nested / "summary.json"));
}
