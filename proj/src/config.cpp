#include "cellhom/config.hpp"

#include <cctype>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

namespace cellhom {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  // Trim to the shortest representation that round-trips.
  for (int prec = 1; prec < 17; ++prec) {
    char shorter[64];
    std::snprintf(shorter, sizeof shorter, "%.*g", prec, v);
    if (std::strtod(shorter, nullptr) == v) return shorter;
  }
  return buf;
}

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

double parse_num(const std::string& s, int line, const std::string& field) {
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw ConfigError(line, field, "not a number: '" + s + "'");
  return v;
}

long long parse_int(const std::string& s, int line, const std::string& field) {
  char* end = nullptr;
  long long v = std::strtoll(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0') throw ConfigError(line, field, "not an integer: '" + s + "'");
  return v;
}

VecD parse_vec(const std::string& s, int line, const std::string& field) {
  VecD out;
  for (const auto& part : split(s, ',')) out.push_back(parse_num(part, line, field));
  return out;
}

// "3,4/5" -> numerators (3,4), denominator 5
void parse_direction(const std::string& s, int line, const std::string& field, std::vector<long long>& num,
                     long long& den) {
  auto slash = s.find('/');
  std::string nums = (slash == std::string::npos) ? s : s.substr(0, slash);
  den = (slash == std::string::npos) ? 1 : parse_int(trim(s.substr(slash + 1)), line, field);
  num.clear();
  for (const auto& part : split(nums, ',')) num.push_back(parse_int(part, line, field));
}

// point = zeta=1 nu=0,1/1     |     point = xi=1,0;0,1
QueryPoint parse_point(const std::string& s, int line) {
  QueryPoint q;
  bool has_zeta = false, has_nu = false, has_xi = false;
  std::istringstream iss(s);
  std::string tok;
  while (iss >> tok) {
    auto eq = tok.find('=');
    if (eq == std::string::npos) throw ConfigError(line, "point", "expected key=value, got '" + tok + "'");
    std::string k = tok.substr(0, eq), v = tok.substr(eq + 1);
    if (k == "zeta") {
      q.zeta = parse_vec(v, line, "point.zeta");
      has_zeta = true;
    } else if (k == "nu") {
      parse_direction(v, line, "point.nu", q.nu_num, q.nu_den);
      has_nu = true;
    } else if (k == "xi") {
      for (const auto& row : split(v, ';')) q.xi_rows.push_back(parse_vec(row, line, "point.xi"));
      has_xi = true;
    } else {
      throw ConfigError(line, "point", "unknown field '" + k + "'");
    }
  }
  if (has_xi && (has_zeta || has_nu)) throw ConfigError(line, "point", "mix of volume and surface fields");
  if (has_xi) {
    q.surface = false;
  } else if (!(has_zeta && has_nu)) {
    throw ConfigError(line, "point", "surface point needs zeta and nu");
  }
  return q;
}

struct MediumKeys {
  std::string kind = "constant";
  std::string values;
  double prob = 0.5, value = 1.0, coin = 0.5;
  long long axis = 0, period = 1;
  bool seen = false;
};

MediumSpec build_medium(const MediumKeys& mk, int line) {
  if (mk.kind == "constant") return MediumSpec::constant(mk.value);
  if (mk.kind == "iid_cells") {
    VecD vals = parse_vec(mk.values, line, "medium.values");
    if (vals.size() != 2) throw ConfigError(line, "medium.values", "iid_cells needs two values");
    return MediumSpec::iid_cells(vals[0], vals[1], mk.prob);
  }
  if (mk.kind == "laminate") {
    VecD vals = parse_vec(mk.values, line, "medium.values");
    return MediumSpec::laminate(static_cast<int>(mk.axis), mk.period, std::vector<double>(vals.begin(), vals.end()));
  }
  throw ConfigError(line, "medium.kind", "unknown kind '" + mk.kind + "'");
}

}  // namespace

CutOptions ExperimentConfig::cut_options() const {
  CutOptions opt;
  if (neighborhood == "n4")
    opt.neighborhood = Neighborhood::N4;
  else if (neighborhood == "n8")
    opt.neighborhood = Neighborhood::N8;
  else
    throw std::invalid_argument("neighborhood must be n4 or n8");
  opt.lambda_axis = lambda_axis;
  opt.lambda_diag = lambda_diag;
  opt.precision_bits = precision_bits;
  opt.ring_width = ring_width;
  return opt;
}

SurfaceFamily ExperimentConfig::family_tag() const {
  if (surface_family == "perimeter") return SurfaceFamily::Perimeter;
  if (surface_family == "amplitude") return SurfaceFamily::Amplitude;
  throw std::invalid_argument("surface family must be perimeter or amplitude");
}

std::string QueryPoint::str() const {
  std::string s = "point = ";
  if (surface) {
    s += "zeta=";
    for (size_t i = 0; i < zeta.size(); ++i) s += (i ? "," : "") + fmt_double(zeta[i]);
    s += " nu=";
    for (size_t i = 0; i < nu_num.size(); ++i) s += (i ? "," : "") + std::to_string(nu_num[i]);
    s += "/" + std::to_string(nu_den);
  } else {
    s += "xi=";
    for (size_t r = 0; r < xi_rows.size(); ++r) {
      if (r) s += ";";
      for (size_t i = 0; i < xi_rows[r].size(); ++i) s += (i ? "," : "") + fmt_double(xi_rows[r][i]);
    }
  }
  return s;
}

std::string QueryPoint::label() const {
  std::string s;
  if (surface) {
    s = "g_z";
    for (double z : zeta) s += (z < 0 ? "m" : "") + fmt_double(std::abs(z)) + "_";
    s += "nu";
    for (long long v : nu_num) s += (v < 0 ? "m" : "") + std::to_string(std::abs(v)) + "_";
    s += std::to_string(nu_den);
  } else {
    s = "f_xi";
    for (const auto& row : xi_rows)
      for (double v : row) s += "_" + std::string(v < 0 ? "m" : "") + fmt_double(std::abs(v));
  }
  for (auto& c : s)
    if (c == '.') c = 'p';
  return s;
}

namespace {
std::string medium_block(const MediumSpec& m, const std::string& prefix) {
  std::string s;
  switch (m.kind) {
    case MediumKind::Constant:
      s += prefix + "kind = constant\n";
      s += prefix + "value = " + fmt_double(m.value) + "\n";
      break;
    case MediumKind::IidCells:
      s += prefix + "kind = iid_cells\n";
      s += prefix + "values = " + fmt_double(m.values[0]) + "," + fmt_double(m.values[1]) + "\n";
      s += prefix + "prob = " + fmt_double(m.prob) + "\n";
      break;
    case MediumKind::Laminate: {
      s += prefix + "kind = laminate\n";
      s += prefix + "axis = " + std::to_string(m.axis) + "\n";
      s += prefix + "period = " + std::to_string(m.period) + "\n";
      std::string vals;
      for (size_t i = 0; i < m.values.size(); ++i) vals += (i ? "," : "") + fmt_double(m.values[i]);
      s += prefix + "values = " + vals + "\n";
      break;
    }
    case MediumKind::Mixture:
      s += prefix + "kind = mixture\n";
      s += medium_block(*m.sub_a, prefix + "a.");
      s += medium_block(*m.sub_b, prefix + "b.");
      s += prefix + "coin = " + fmt_double(m.coin_prob) + "\n";
      break;
  }
  return s;
}
}  // namespace

std::string ExperimentConfig::canonical() const {
  std::string s;
  s += "[experiment]\n";
  s += "kind = " + kind + "\n";
  s += "\n[medium]\n";
  s += medium_block(medium, "");
  s += "\n[integrand]\n";
  s += "family = " + surface_family + "\n";
  s += "p = " + fmt_double(p) + "\n";
  s += "zcap = " + fmt_double(zcap) + "\n";
  s += "\n[query]\n";
  for (const auto& q : points) s += q.str() + "\n";
  s += "\n[schedule]\n";
  std::string tl;
  for (size_t i = 0; i < schedule.size(); ++i) tl += (i ? "," : "") + std::to_string(schedule[i]);
  s += "t = " + tl + "\n";
  s += "seeds = " + std::to_string(n_seeds) + "\n";
  s += "seed_base = " + std::to_string(seed_base) + "\n";
  s += "\n[solver]\n";
  s += "h = " + fmt_double(h) + "\n";
  s += "tol = " + fmt_double(tol) + "\n";
  s += "max_iter = " + std::to_string(max_iter) + "\n";
  s += "neighborhood = " + neighborhood + "\n";
  s += "lambda_axis = " + fmt_double(lambda_axis) + "\n";
  s += "lambda_diag = " + fmt_double(lambda_diag) + "\n";
  s += "precision_bits = " + std::to_string(precision_bits) + "\n";
  s += "ring_width = " + std::to_string(ring_width) + "\n";
  s += "strip_length = " + std::to_string(strip_length) + "\n";
  s += "check_tol = " + fmt_double(check_tol) + "\n";
  s += "mincut_instances = " + std::to_string(mincut_instances) + "\n";
  s += "structural_cases = " + std::to_string(structural_cases) + "\n";
  s += "\n[output]\n";
  s += "dir = " + out_dir + "\n";
  return s;
}

uint64_t ExperimentConfig::digest() const {
  // FNV-1a over the canonical form minus the output section, which is not
  // semantically meaningful for the results.
  std::string c = canonical();
  auto cut_at = c.find("\n[output]");
  if (cut_at != std::string::npos) c.resize(cut_at);
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : c) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  cfg.points.clear();
  cfg.schedule.clear();
  MediumKeys mk, mka, mkb;
  bool mixture = false;
  int mk_line = 0;
  bool saw_schedule = false;

  std::istringstream iss(text);
  std::string raw;
  std::string section;
  int line = 0;
  while (std::getline(iss, raw)) {
    ++line;
    std::string s = trim(raw);
    if (s.empty() || s[0] == '#') continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError(line, "section", "unterminated section header");
      section = s.substr(1, s.size() - 2);
      continue;
    }
    auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(line, "line", "expected key = value");
    std::string key = trim(s.substr(0, eq));
    std::string val = trim(s.substr(eq + 1));
    std::string field = section + "." + key;

    if (section == "experiment") {
      if (key == "kind")
        cfg.kind = val;
      else
        throw ConfigError(line, field, "unknown key");
    } else if (section == "medium") {
      mk.seen = true;
      mk_line = line;
      if (key == "kind") {
        mk.kind = val;
        mixture = (val == "mixture");
      } else if (key == "values")
        mk.values = val;
      else if (key == "prob")
        mk.prob = parse_num(val, line, field);
      else if (key == "value")
        mk.value = parse_num(val, line, field);
      else if (key == "axis")
        mk.axis = parse_int(val, line, field);
      else if (key == "period")
        mk.period = parse_int(val, line, field);
      else if (key == "coin")
        mk.coin = parse_num(val, line, field);
      else if (key.rfind("a.", 0) == 0 || key.rfind("b.", 0) == 0) {
        MediumKeys& sub = (key[0] == 'a') ? mka : mkb;
        std::string subkey = key.substr(2);
        if (subkey == "kind")
          sub.kind = val;
        else if (subkey == "values")
          sub.values = val;
        else if (subkey == "prob")
          sub.prob = parse_num(val, line, field);
        else if (subkey == "value")
          sub.value = parse_num(val, line, field);
        else if (subkey == "axis")
          sub.axis = parse_int(val, line, field);
        else if (subkey == "period")
          sub.period = parse_int(val, line, field);
        else
          throw ConfigError(line, field, "unknown key");
      } else
        throw ConfigError(line, field, "unknown key");
    } else if (section == "integrand") {
      if (key == "family")
        cfg.surface_family = val;
      else if (key == "p")
        cfg.p = parse_num(val, line, field);
      else if (key == "zcap")
        cfg.zcap = parse_num(val, line, field);
      else
        throw ConfigError(line, field, "unknown key");
    } else if (section == "query") {
      if (key == "point")
        cfg.points.push_back(parse_point(val, line));
      else
        throw ConfigError(line, field, "unknown key");
    } else if (section == "schedule") {
      if (key == "t") {
        saw_schedule = true;
        for (const auto& part : split(val, ',')) cfg.schedule.push_back(parse_int(part, line, field));
      } else if (key == "seeds")
        cfg.n_seeds = static_cast<int>(parse_int(val, line, field));
      else if (key == "seed_base")
        cfg.seed_base = static_cast<uint64_t>(parse_int(val, line, field));
      else
        throw ConfigError(line, field, "unknown key");
    } else if (section == "solver") {
      if (key == "h")
        cfg.h = parse_num(val, line, field);
      else if (key == "tol")
        cfg.tol = parse_num(val, line, field);
      else if (key == "max_iter")
        cfg.max_iter = static_cast<int>(parse_int(val, line, field));
      else if (key == "neighborhood")
        cfg.neighborhood = val;
      else if (key == "lambda_axis")
        cfg.lambda_axis = parse_num(val, line, field);
      else if (key == "lambda_diag")
        cfg.lambda_diag = parse_num(val, line, field);
      else if (key == "precision_bits")
        cfg.precision_bits = static_cast<int>(parse_int(val, line, field));
      else if (key == "ring_width")
        cfg.ring_width = static_cast<int>(parse_int(val, line, field));
      else if (key == "strip_length")
        cfg.strip_length = parse_int(val, line, field);
      else if (key == "check_tol")
        cfg.check_tol = parse_num(val, line, field);
      else if (key == "mincut_instances")
        cfg.mincut_instances = static_cast<int>(parse_int(val, line, field));
      else if (key == "structural_cases")
        cfg.structural_cases = static_cast<int>(parse_int(val, line, field));
      else
        throw ConfigError(line, field, "unknown key");
    } else if (section == "output") {
      if (key == "dir")
        cfg.out_dir = val;
      else
        throw ConfigError(line, field, "unknown key");
    } else {
      throw ConfigError(line, section.empty() ? key : field, "key outside any known section");
    }
  }

  if (mk.seen) {
    if (mixture)
      cfg.medium = MediumSpec::mixture(build_medium(mka, mk_line), build_medium(mkb, mk_line), mk.coin);
    else
      cfg.medium = build_medium(mk, mk_line);
  }
  if (!saw_schedule) cfg.schedule = {8, 16, 32, 64};
  cfg.medium.validate();
  if (cfg.kind != "fhom" && cfg.kind != "ghom" && cfg.kind != "verify" && cfg.kind != "calibrate" &&
      cfg.kind != "table")
    throw ConfigError(0, "experiment.kind", "unknown experiment kind '" + cfg.kind + "'");
  for (size_t i = 0; i + 1 < cfg.schedule.size(); ++i)
    if (cfg.schedule[i] >= cfg.schedule[i + 1]) throw ConfigError(0, "schedule.t", "must be strictly increasing");
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

}  // namespace cellhom
