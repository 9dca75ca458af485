#include "floquet_pt/config_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "floquet_pt/errors.hpp"

namespace fpt {

namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::ConfigError, what); }

template <typename T>
T required(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) config_error(where + ": missing key \"" + key + "\"");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    config_error(where + ": key \"" + key + "\" has the wrong type");
  }
}

template <typename T>
void optional_key(const json& obj, const char* key, T& target) {
  if (!obj.contains(key)) return;
  try {
    target = obj.at(key).get<T>();
  } catch (const json::exception&) {
    config_error(std::string("key \"") + key + "\" has the wrong type");
  }
}

Complex parse_entry(const json& e, const std::string& where) {
  if (e.is_number()) return {e.get<double>(), 0.0};
  if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number())
    return {e[0].get<double>(), e[1].get<double>()};
  config_error(where + ": matrix entries must be numbers or [re, im] pairs");
}

std::vector<RawSeries> parse_coefficients(const json& doc) {
  std::vector<RawSeries> out;
  if (!doc.contains("coefficients")) return out;
  const json& list = doc.at("coefficients");
  if (!list.is_array()) config_error("\"coefficients\" must be an array");
  for (std::size_t c = 0; c < list.size(); ++c) {
    const std::string where = "coefficients[" + std::to_string(c) + "]";
    const json& item = list[c];
    if (!item.is_object()) config_error(where + " must be an object");
    RawSeries series;
    series.order = required<int>(item, "order", where);
    if (item.contains("harmonics")) {
      const json& hs = item.at("harmonics");
      if (!hs.is_array()) config_error(where + ".harmonics must be an array");
      for (std::size_t h = 0; h < hs.size(); ++h) {
        const std::string hw = where + ".harmonics[" + std::to_string(h) + "]";
        RawHarmonic harmonic;
        harmonic.l = required<int>(hs[h], "l", hw);
        if (!hs[h].contains("matrix") || !hs[h].at("matrix").is_array()) config_error(hw + ": missing matrix");
        for (const json& row : hs[h].at("matrix")) {
          if (!row.is_array()) config_error(hw + ": matrix rows must be arrays");
          std::vector<Complex> r;
          for (const json& e : row) r.push_back(parse_entry(e, hw));
          harmonic.matrix.push_back(std::move(r));
        }
        series.harmonics.push_back(std::move(harmonic));
      }
    }
    out.push_back(std::move(series));
  }
  return out;
}

void read_tolerances(const json& doc, AnalysisConfig& a, SpecLimits& limits, double& structure_tol) {
  if (doc.contains("tolerances")) {
    const json& t = doc.at("tolerances");
    if (!t.is_object()) config_error("\"tolerances\" must be an object");
    optional_key(t, "K", a.galerkin.K);
    optional_key(t, "eig_tol", a.galerkin.eig_tol);
    optional_key(t, "cluster_tol", a.galerkin.cluster_tol);
    optional_key(t, "certify_extra", a.galerkin.certify_extra);
    optional_key(t, "refine", a.galerkin.refine);
    optional_key(t, "ode_tol", a.monodromy.ode_tol);
    optional_key(t, "lambda_cap", a.monodromy.lambda_cap);
    optional_key(t, "unimod_tol", a.monodromy.unimod_tol);
    optional_key(t, "condition_cap", a.monodromy.condition_cap);
    optional_key(t, "segment_growth", a.monodromy.segment_growth);
    optional_key(t, "max_steps", a.monodromy.max_steps);
    optional_key(t, "t_grid", a.t_grid);
    optional_key(t, "real_tol", a.real_tol);
    optional_key(t, "cover_tol", a.cover_tol);
    optional_key(t, "gamma_frac", a.gamma_frac);
    optional_key(t, "min_slope_points", a.min_slope_points);
    optional_key(t, "structure_tol", structure_tol);
    optional_key(t, "max_frequency", limits.max_frequency);
    optional_key(t, "realness_tol", limits.realness_tol);
    if (t.contains("engine")) {
      const auto engine = parse_engine(required<std::string>(t, "engine", "tolerances"));
      if (!engine) config_error("tolerances.engine must be \"galerkin\" or \"monodromy\"");
      a.engine = *engine;
    }
  }
  if (doc.contains("calibration")) {
    const json& c = doc.at("calibration");
    if (!c.is_object()) config_error("\"calibration\" must be an object");
    optional_key(c, "c", a.calib.c);
    optional_key(c, "N_config", a.calib.n_config);
    optional_key(c, "c_delta", a.calib.c_delta);
    optional_key(c, "slope_slack", a.calib.slope_slack);
  }
  if (a.galerkin.K < 1 || !(a.galerkin.eig_tol > 0.0) || !(a.galerkin.cluster_tol > 0.0) ||
      a.galerkin.certify_extra < 0)
    config_error("Galerkin tolerances must be positive");
  if (!(a.monodromy.ode_tol > 0.0) || !(a.monodromy.unimod_tol > 0.0) || !(a.monodromy.lambda_cap > 0.0) ||
      !(a.monodromy.segment_growth > 0.0) || a.monodromy.max_steps < 1 || !(a.monodromy.condition_cap >= 1.0))
    config_error("monodromy tolerances must be positive");
  if (a.t_grid < 4 || !(a.real_tol >= 0.0) || !(a.cover_tol >= 0.0) || !(a.gamma_frac > 0.0))
    config_error("scan tolerances out of range");
  if (!(a.calib.c > 0.0) || a.calib.n_config < 1 || !(a.calib.c_delta > 0.0) || !(a.calib.slope_slack >= 0.0))
    config_error("calibration constants out of range");
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    config_error(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) config_error("the config document must be an object");
  AnalysisConfig analysis;
  SpecLimits limits;
  double structure_tol = kDefaultStructureTol;
  read_tolerances(doc, analysis, limits, structure_tol);
  const int n = required<int>(doc, "n", "config");
  const int m = required<int>(doc, "m", "config");
  double epsilon = 1.0;
  optional_key(doc, "epsilon", epsilon);
  return {build_spec(n, m, parse_coefficients(doc), epsilon, limits), analysis, limits, structure_tol};
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const RunConfig& config) {
  const auto& spec = config.spec;
  json doc;
  doc["n"] = spec.n();
  doc["m"] = spec.m();
  doc["epsilon"] = spec.epsilon();
  json coefs = json::array();
  for (const auto& s : spec.coefficients()) {
    json hs = json::array();
    for (const auto& [l, mat] : s.harmonics) {
      json rows = json::array();
      for (int r = 0; r < mat.rows(); ++r) {
        json row = json::array();
        for (int c = 0; c < mat.cols(); ++c) row.push_back(mat(r, c));
        rows.push_back(row);
      }
      hs.push_back({{"l", l}, {"matrix", rows}});
    }
    coefs.push_back({{"order", s.order}, {"harmonics", hs}});
  }
  doc["coefficients"] = coefs;
  const auto& a = config.analysis;
  doc["tolerances"] = {{"K", a.galerkin.K},
                       {"eig_tol", a.galerkin.eig_tol},
                       {"cluster_tol", a.galerkin.cluster_tol},
                       {"certify_extra", a.galerkin.certify_extra},
                       {"refine", a.galerkin.refine},
                       {"ode_tol", a.monodromy.ode_tol},
                       {"lambda_cap", a.monodromy.lambda_cap},
                       {"unimod_tol", a.monodromy.unimod_tol},
                       {"condition_cap", a.monodromy.condition_cap},
                       {"segment_growth", a.monodromy.segment_growth},
                       {"max_steps", a.monodromy.max_steps},
                       {"t_grid", a.t_grid},
                       {"real_tol", a.real_tol},
                       {"cover_tol", a.cover_tol},
                       {"gamma_frac", a.gamma_frac},
                       {"min_slope_points", a.min_slope_points},
                       {"structure_tol", config.structure_tol},
                       {"max_frequency", config.limits.max_frequency},
                       {"realness_tol", config.limits.realness_tol},
                       {"engine", to_string(a.engine)}};
  doc["calibration"] = {{"c", a.calib.c},
                        {"N_config", a.calib.n_config},
                        {"c_delta", a.calib.c_delta},
                        {"slope_slack", a.calib.slope_slack}};
  return doc.dump(2) + "\n";
}

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_field(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string csv_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += csv_field(fields[i]);
  }
  return out + "\n";
}

std::string gap_report_json(const GapReport& report) {
  // numbers go through format_real so that output is byte-stable
  auto num = [](double x) { return json::parse(std::isfinite(x) ? format_real(x) : "null"); };
  json doc;
  doc["scan_range"] = {num(report.scan_range.lo), num(report.scan_range.hi)};
  doc["grid_step"] = num(report.grid_step);
  doc["engine"] = to_string(report.engine);
  doc["grid_points"] = report.grid_points;
  doc["non_members"] = report.non_members;
  doc["coverage_fraction"] = num(report.coverage_fraction);
  doc["worst_defect"] = num(report.worst_defect);
  if (report.truncation > 0) doc["truncation_K"] = report.truncation;
  json gaps = json::array();
  for (const auto& g : report.gaps) {
    json item;
    item["interval"] = {num(g.interval.lo), num(g.interval.hi)};
    if (g.nearest_window) {
      const auto& w = *g.nearest_window;
      item["nearest_window"] = {{"center", num(w.center)}, {"half_width", num(w.half_width)},
                                {"label", to_string(w.kind)}, {"l", w.l}, {"i", w.i}, {"j", w.j}};
      item["normalized_offset"] = num(g.normalized_offset);
    } else {
      item["nearest_window"] = nullptr;
    }
    gaps.push_back(item);
  }
  doc["gaps"] = gaps;
  doc["samples_truncated"] = report.samples_truncated;
  return doc.dump(2) + "\n";
}

std::string gap_report_csv(const GapReport& report) {
  std::string out = csv_row({"lambda", "member", "defect", "witness_t"});
  for (const auto& s : report.samples)
    out += csv_row({format_real(s.lambda), s.member ? "1" : "0", format_real(s.defect),
                    s.witness_t ? format_real(*s.witness_t) : ""});
  return out;
}

}  // namespace fpt
