#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "cellhom/concurrency.hpp"
#include "cellhom/config.hpp"
#include "cellhom/report.hpp"
#include "cellhom/verification.hpp"

namespace ch = cellhom;

namespace {

ch::RationalDirection direction_of(const ch::QueryPoint& q) {
  return ch::RationalDirection(q.nu_num, q.nu_den);
}

int finish(ch::RunRecord& record, const std::string& out_dir, double wall_seconds) {
  record.wall_seconds = wall_seconds;
  ch::emit_report(record, out_dir);
  std::printf("wall_seconds = %.2f\n", wall_seconds);
  std::printf("output = %s\n", out_dir.c_str());
  if (!record.all_checks_pass()) {
    for (const auto& c : record.checks)
      if (!c.pass) std::printf("FAIL:%s:%s\n", c.name.c_str(), c.detail.c_str());
    return 2;
  }
  std::printf("result = PASS\n");
  return 0;
}

int run_estimates(const ch::ExperimentConfig& cfg, int threads) {
  auto t0 = std::chrono::steady_clock::now();
  ch::RunRecord record;
  record.version = ch::version_string();
  record.config_digest = cfg.digest();

  bool want_surface = (cfg.kind == "ghom" || cfg.kind == "table");
  bool want_volume = (cfg.kind == "fhom" || cfg.kind == "table");
  bool table_mode = (cfg.kind == "table");

  std::vector<ch::SurfaceQuery> surface_queries;
  std::vector<ch::VolumeQuery> volume_queries;
  for (const auto& q : cfg.points) {
    if (q.surface && want_surface) {
      surface_queries.push_back({q.label(), q.zeta, direction_of(q)});
    } else if (!q.surface && want_volume) {
      ch::Mat xi(static_cast<int>(q.xi_rows.size()), static_cast<int>(q.xi_rows[0].size()));
      for (size_t r = 0; r < q.xi_rows.size(); ++r)
        for (size_t c = 0; c < q.xi_rows[r].size(); ++c)
          xi.at(static_cast<int>(r), static_cast<int>(c)) = q.xi_rows[r][c];
      volume_queries.push_back({q.label(), xi});
    }
  }
  if (want_surface && !table_mode && surface_queries.empty())
    throw std::runtime_error("ghom experiment needs at least one surface query point");
  if (want_volume && !table_mode && volume_queries.empty())
    throw std::runtime_error("fhom experiment needs at least one volume query point");

  if (!surface_queries.empty()) {
    ch::SurfaceProcessSpec base;
    base.family = cfg.family_tag();
    base.zcap = cfg.zcap;
    base.medium = cfg.medium;
    base.cut = cfg.cut_options();
    base.frame = ch::make_frame(surface_queries.front().nu);
    ch::HomDensityTable table = ch::build_surface_table(base, surface_queries, cfg.schedule, cfg.n_seeds,
                                                        cfg.seed_base, cfg.strip_length, threads);
    for (const auto& e : table.entries) {
      record.series.push_back({e.label, 1, e.series});
      if (!e.series.complete)
        record.checks.push_back({"complete_" + e.label, false, "schedule truncated by the solver budget"});
      if (table_mode)
        record.checks.push_back({"bracket_" + e.label, e.within,
                                 ch::fmt_double(e.lower) + " <= " + ch::fmt_double(e.estimate) + " <= " +
                                     ch::fmt_double(e.upper)});
    }
    if (table_mode)
      record.checks.push_back({"table_symmetry", ch::table_symmetry_ok(table, surface_queries),
                               "flipped (zeta,nu) pairs bit-identical"});
  }
  if (!volume_queries.empty()) {
    ch::VolumeProcessSpec base;
    base.p = cfg.p;
    base.medium = cfg.medium;
    base.h = cfg.h;
    base.tol = cfg.tol;
    base.max_iter = cfg.max_iter;
    base.xi = volume_queries.front().xi;
    ch::HomDensityTable table =
        ch::build_volume_table(base, volume_queries, cfg.schedule, cfg.n_seeds, cfg.seed_base, threads);
    for (const auto& e : table.entries) {
      record.series.push_back({e.label, base.xi.cols, e.series});
      if (e.series.unconverged > 0)
        record.checks.push_back({"converged_" + e.label, false,
                                 std::to_string(e.series.unconverged) + " solves stopped at max_iter"});
      if (table_mode)
        record.checks.push_back({"bracket_" + e.label, e.within,
                                 ch::fmt_double(e.lower) + " <= " + ch::fmt_double(e.estimate) + " <= " +
                                     ch::fmt_double(e.upper)});
    }
  }

  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return finish(record, cfg.out_dir, wall);
}

int run_verify(const ch::ExperimentConfig& cfg, bool quick, int threads) {
  auto t0 = std::chrono::steady_clock::now();
  ch::VerifySpec spec = ch::verify_spec_from(cfg, quick);
  ch::VerifyOutput out = ch::run_structural_suite(spec, threads);

  ch::RunRecord record;
  record.version = ch::version_string();
  record.config_digest = cfg.digest();
  record.checks = out.checks;
  record.scalars = out.scalars;

  std::filesystem::create_directories(cfg.out_dir);
  for (const auto& [name, content] : out.case_files) {
    std::ofstream f(std::filesystem::path(cfg.out_dir) / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write case file " + name);
    f << content;
  }
  for (const auto& c : record.checks)
    std::printf("%-24s %s  (%s)\n", c.name.c_str(), c.pass ? "PASS" : "FAIL", c.detail.c_str());

  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return finish(record, cfg.out_dir, wall);
}

int run_calibrate(const ch::ExperimentConfig& cfg, const std::string& nu_arg, int /*threads*/) {
  auto t0 = std::chrono::steady_clock::now();
  std::vector<long long> num;
  long long den = 1;
  {
    auto slash = nu_arg.find('/');
    std::string nums = (slash == std::string::npos) ? nu_arg : nu_arg.substr(0, slash);
    if (slash != std::string::npos) den = std::stoll(nu_arg.substr(slash + 1));
    size_t pos = 0;
    while (pos < nums.size()) {
      size_t comma = nums.find(',', pos);
      if (comma == std::string::npos) comma = nums.size();
      num.push_back(std::stoll(nums.substr(pos, comma - pos)));
      pos = comma + 1;
    }
  }
  ch::RationalDirection nu(num, den);
  double kappa = ch::calibrate_metrication(cfg.cut_options(), nu, cfg.strip_length);

  ch::RunRecord record;
  record.version = ch::version_string();
  record.config_digest = cfg.digest();
  record.scalars.push_back({"nu", nu.str()});
  record.scalars.push_back({"neighborhood", cfg.neighborhood});
  record.scalars.push_back({"strip_length", std::to_string(cfg.strip_length)});
  record.scalars.push_back({"kappa", ch::fmt_double(kappa)});
  std::printf("kappa(%s, %s) = %s\n", nu.str().c_str(), cfg.neighborhood.c_str(), ch::fmt_double(kappa).c_str());

  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return finish(record, cfg.out_dir, wall);
}

int run_report(const std::string& run_dir) {
  std::filesystem::path dir(run_dir);
  std::ifstream summary(dir / "summary.txt");
  if (!summary) {
    std::fprintf(stderr, "no summary.txt under %s\n", run_dir.c_str());
    return 1;
  }
  std::cout << summary.rdbuf();
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    auto name = entry.path().filename().string();
    if (name.rfind("convergence_", 0) == 0) {
      std::printf("\n-- %s --\n", name.c_str());
      std::ifstream t(entry.path());
      std::cout << t.rdbuf();
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"homogenised density laboratory for random volume and surface energies"};
  app.require_subcommand(1);
  int threads = ch::env_parallelism();

  std::string run_config;
  auto* run_cmd = app.add_subcommand("run", "execute the experiment described by a config file");
  run_cmd->add_option("config", run_config, "config file")->required();

  bool quick = false;
  std::string verify_config, verify_out;
  auto* verify_cmd = app.add_subcommand("verify", "run the structural verification suite");
  verify_cmd->add_flag("--quick", quick, "reduced case counts");
  verify_cmd->add_option("--config", verify_config, "optional config file with overrides");
  verify_cmd->add_option("--out", verify_out, "output directory (default out-verify)");

  std::string nu_arg = "3,4/5", cal_nbr = "n4", cal_out;
  long long strip_len = 0;
  auto* cal_cmd = app.add_subcommand("calibrate", "measure the lattice metric anisotropy kappa(nu)");
  cal_cmd->add_option("--nu", nu_arg, "direction as a,b/d (default 3,4/5)");
  cal_cmd->add_option("--neighborhood", cal_nbr, "n4 or n8");
  cal_cmd->add_option("--strip-length", strip_len, "strip length (default from config)");
  cal_cmd->add_option("--out", cal_out, "output directory");

  std::string report_dir;
  auto* report_cmd = app.add_subcommand("report", "re-render the summary of a finished run");
  report_cmd->add_option("run-dir", report_dir, "directory written by a previous run")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      ch::ExperimentConfig cfg = ch::load_config(run_config);
      if (cfg.kind == "verify") return run_verify(cfg, quick, threads);
      if (cfg.kind == "calibrate") {
        std::string nu;
        for (const auto& q : cfg.points)
          if (q.surface) {
            nu.clear();
            for (size_t i = 0; i < q.nu_num.size(); ++i) nu += (i ? "," : "") + std::to_string(q.nu_num[i]);
            nu += "/" + std::to_string(q.nu_den);
            break;
          }
        return run_calibrate(cfg, nu.empty() ? nu_arg : nu, threads);
      }
      return run_estimates(cfg, threads);
    }
    if (verify_cmd->parsed()) {
      ch::ExperimentConfig cfg;
      if (!verify_config.empty()) cfg = ch::load_config(verify_config);
      cfg.out_dir = verify_out.empty() ? "out-verify" : verify_out;
      return run_verify(cfg, quick, threads);
    }
    if (cal_cmd->parsed()) {
      ch::ExperimentConfig cfg;
      cfg.neighborhood = cal_nbr;
      if (strip_len > 0) cfg.strip_length = strip_len;
      if (!cal_out.empty()) cfg.out_dir = cal_out;
      else cfg.out_dir = "out-calibrate";
      return run_calibrate(cfg, nu_arg, threads);
    }
    if (report_cmd->parsed()) return run_report(report_dir);
  } catch (const ch::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
