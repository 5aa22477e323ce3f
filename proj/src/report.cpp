#include "cellhom/report.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "cellhom/config.hpp"
#include "json.hpp"

namespace cellhom {

std::string version_string() { return "cellhom 0.1.0"; }

bool RunRecord::all_checks_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

namespace {

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}

void write_series_csv(const std::filesystem::path& dir, const SeriesRecord& rec) {
  auto out = open_out(dir / ("series_" + rec.label + ".csv"));
  out << "seed,t,value,normalized\n";
  const EstimateSeries& s = rec.series;
  for (size_t si = 0; si < s.seeds.size(); ++si)
    for (size_t ti = 0; ti < s.ts.size(); ++ti) {
      double normalized = s.values[ti][si];
      double value = normalized * std::pow(static_cast<double>(s.ts[ti]), rec.norm_exponent);
      out << s.seeds[si] << "," << s.ts[ti] << "," << fmt_double(value) << "," << fmt_double(normalized)
          << "\n";
    }
}

void write_convergence_csv(const std::filesystem::path& dir, const SeriesRecord& rec) {
  auto out = open_out(dir / ("convergence_" + rec.label + ".csv"));
  out << "t,mean,std,median\n";
  const EstimateSeries& s = rec.series;
  for (size_t ti = 0; ti < s.ts.size(); ++ti)
    out << s.ts[ti] << "," << fmt_double(s.mean[ti]) << "," << fmt_double(s.stddev[ti]) << ","
        << fmt_double(s.median[ti]) << "\n";
}

}  // namespace

void emit_report(const RunRecord& record, const std::string& dir) {
  std::filesystem::path root(dir);
  std::error_code ec;
  std::filesystem::create_directories(root, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir + ": " + ec.message());

  for (const auto& s : record.series) {
    write_series_csv(root, s);
    write_convergence_csv(root, s);
  }

  {
    auto out = open_out(root / "summary.txt");
    out << "version = " << record.version << "\n";
    char digest[32];
    std::snprintf(digest, sizeof digest, "%016llx", static_cast<unsigned long long>(record.config_digest));
    out << "config_digest = " << digest << "\n";
    for (const auto& sc : record.scalars) out << sc.name << " = " << sc.value << "\n";
    for (const auto& s : record.series) {
      out << "estimate." << s.label << " = " << fmt_double(s.series.point_estimate) << " +/- "
          << fmt_double(s.series.error_bar) << "\n";
    }
    for (const auto& c : record.checks)
      out << "check." << c.name << " = " << (c.pass ? "PASS" : "FAIL")
          << (c.detail.empty() ? "" : " (" + c.detail + ")") << "\n";
    out << "result = " << (record.all_checks_pass() ? "PASS" : "FAIL") << "\n";
  }

  {
    nlohmann::ordered_json j;
    char digest[32];
    std::snprintf(digest, sizeof digest, "%016llx", static_cast<unsigned long long>(record.config_digest));
    j["version"] = record.version;
    j["config_digest"] = digest;
    j["wall_seconds"] = record.wall_seconds;
    j["scalars"] = nlohmann::ordered_json::object();
    for (const auto& sc : record.scalars) j["scalars"][sc.name] = sc.value;
    j["series"] = nlohmann::ordered_json::array();
    for (const auto& s : record.series) {
      nlohmann::ordered_json js;
      js["label"] = s.label;
      js["point_estimate"] = s.series.point_estimate;
      js["error_bar"] = s.series.error_bar;
      js["t"] = s.series.ts;
      js["mean"] = s.series.mean;
      js["std"] = s.series.stddev;
      js["median"] = s.series.median;
      j["series"].push_back(js);
    }
    j["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : record.checks) {
      nlohmann::ordered_json jc;
      jc["name"] = c.name;
      jc["pass"] = c.pass;
      jc["detail"] = c.detail;
      j["checks"].push_back(jc);
    }
    auto out = open_out(root / "record.json");
    out << j.dump(2) << "\n";
  }
}

}  // namespace cellhom
