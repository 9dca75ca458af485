#include "floquet_pt/cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "floquet_pt/analysis.hpp"
#include "floquet_pt/config_io.hpp"
#include "floquet_pt/errors.hpp"
#include "floquet_pt/logging.hpp"
#include "floquet_pt/monodromy.hpp"
#include "floquet_pt/version.hpp"

namespace fpt::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

struct Options {
  std::string command;
  std::string config;
  std::string out_dir = "floquet-pt-out";
  int jobs = 0;
  std::optional<double> lambda_lo, lambda_hi, step, t, epsilon, h;
  std::optional<int> k, j;
  std::string engine;
  std::map<std::string, std::string> overrides;  // flag -> value as typed
};

class VerificationFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

json number(double x) { return std::isfinite(x) ? json::parse(format_real(x)) : json(format_real(x)); }

json complex_json(Complex z) { return json::array({number(z.real()), number(z.imag())}); }

json window_json(const Window& w) {
  return {{"center", number(w.center)}, {"half_width", number(w.half_width)}, {"label", to_string(w.kind)},
          {"i", w.i},  {"j", w.j},  {"l", w.l}};
}

void write_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::InvalidArgument, "cannot write " + tmp.string());
    f << content;
    if (!f) throw Error(ErrorCode::InvalidArgument, "write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

class Command {
 public:
  Command(const Options& opt, RunConfig cfg, std::ostream& out, const Logger& log)
      : opt_(opt), cfg_(std::move(cfg)), out_(out), log_(log) {}

  int dispatch() {
    const auto& c = opt_.command;
    if (c == "validate") return validate();
    if (c == "structure") return structure();
    if (c == "unperturbed") return unperturbed();
    if (c == "bloch") return bloch();
    if (c == "trace") return trace();
    if (c == "scan") return scan(false);
    if (c == "gaps") return scan(true);
    if (c == "coverage") return coverage();
    if (c == "verify") return verify();
    throw Error(ErrorCode::InvalidArgument, "unknown command " + c);
  }

  const std::map<std::string, std::string>& files() const { return files_; }
  const std::vector<std::pair<std::string, double>>& timings() const { return timings_; }

 private:
  const OperatorSpec& spec() const { return cfg_.spec; }
  SpectralStructure structure_of() const { return spectral_structure(mean_matrix(spec()), cfg_.structure_tol); }

  template <typename F>
  auto timed(const std::string& name, F&& f) {
    const auto start = Clock::now();
    auto result = f();
    timings_.emplace_back(name, std::chrono::duration<double>(Clock::now() - start).count());
    return result;
  }

  std::vector<Engine> engines() const {
    if (opt_.engine == "both") return {Engine::Galerkin, Engine::Monodromy};
    if (opt_.engine.empty()) return {cfg_.analysis.engine};
    return {*parse_engine(opt_.engine)};
  }

  double need(const std::optional<double>& v, const char* flag) const {
    if (!v) throw Error(ErrorCode::InvalidArgument, std::string("missing required flag ") + flag);
    return *v;
  }

  int validate() {
    std::string orders;
    for (const auto& s : spec().coefficients()) orders += (orders.empty() ? "P_" : ",P_") + std::to_string(s.order);
    out_ << "valid: n=" << spec().n() << " m=" << spec().m() << " epsilon=" << format_real(spec().epsilon())
         << " coefficients=" << (orders.empty() ? "none" : orders) << " max_frequency=" << spec().max_frequency()
         << "\n";
    files_["config.resolved.json"] = config_to_json(cfg_);
    return kOk;
  }

  int structure() {
    const auto st = structure_of();
    json entries = json::array();
    for (const auto& e : st.entries) {
      const int r = e.partial_multiplicities.empty() ? 0 : e.partial_multiplicities.front();
      out_ << "mu=" << (e.is_real ? format_real(e.mu.real())
                                  : format_real(e.mu.real()) + (e.mu.imag() < 0 ? "" : "+") +
                                        format_real(e.mu.imag()) + "i")
           << " m=" << e.algebraic << " l=" << e.geometric << " r=" << r << " partial=[";
      for (std::size_t p = 0; p < e.partial_multiplicities.size(); ++p)
        out_ << (p ? "," : "") << e.partial_multiplicities[p];
      out_ << "] " << (e.is_real ? "real" : "complex") << "\n";
      entries.push_back({{"mu", complex_json(e.mu)},
                         {"algebraic", e.algebraic},
                         {"geometric", e.geometric},
                         {"partial_multiplicities", e.partial_multiplicities},
                         {"is_real", e.is_real}});
    }
    const auto parity = remark1_parity(st);
    const auto c27 = check_condition_27(st);
    out_ << "s=" << st.s << " r=" << st.r << " real_odd=" << st.real_odd.size()
         << " parity_consistent=" << (parity.consistent ? "yes" : "no")
         << " condition27=" << (c27.holds ? "holds" : "fails") << "\n";
    json doc = {{"entries", entries},
                {"s", st.s},
                {"r", st.r},
                {"m", st.m},
                {"real_odd", st.real_odd},
                {"remark1", {{"m_parity", parity.m_parity},
                             {"count_real_odd", parity.count_real_odd},
                             {"consistent", parity.consistent}}},
                {"condition27", {{"holds", c27.holds}, {"diagnostic", c27.diagnostic}}}};
    if (c27.holds) doc["condition27"]["triple"] = c27.triple;
    else if (!st.real_odd.empty() && st.real_odd.size() >= 3) doc["condition27"]["assignment"] = c27.assignment;
    files_["structure.json"] = doc.dump(2) + "\n";
    return kOk;
  }

  int unperturbed() {
    const auto st = structure_of();
    const int n = spec().n();
    const int k = opt_.k.value_or(cfg_.analysis.calib.n_config);
    const int j = opt_.j.value_or(0);
    if (k < 1) throw Error(ErrorCode::IndexTooSmall, "--k must be at least 1");
    std::string csv = csv_row({"t", "k", "j", "re", "im"});
    const int T = cfg_.analysis.t_grid;
    for (int q = 0; q <= T; ++q) {
      const double t = kTwoPi * q / T;
      for (int kk = -k; kk <= k; ++kk)
        for (std::size_t jj = 0; jj < st.entries.size(); ++jj) {
          const Complex mu = mu_kj(n, st.entries[jj].mu, kk, t);
          csv += csv_row({format_real(t), std::to_string(kk), std::to_string(jj), format_real(mu.real()),
                          format_real(mu.imag())});
        }
    }
    files_["unperturbed.csv"] = csv;

    const auto& calib = cfg_.analysis.calib;
    const double eps = epsilon_k(spec(), st, k, calib);
    const double delta = delta_k(spec(), st, k, calib);
    json doc = {{"k", k}, {"j", j}, {"epsilon_k", number(eps)}, {"delta_k", number(delta)}};
    json collisions = json::array();
    if (j >= 0 && j < st.s) {
      for (const auto& w : collision_windows(st, n, k, delta, j)) collisions.push_back(window_json(w));
      const double hk = lemma1_hk(n, k, eps);
      doc["h_k"] = number(hk);
      try {
        const auto adm = admissible_t_intervals(st, n, k, j, delta + hk, calib);
        json ivs = json::array();
        for (const auto& iv : adm.intervals) ivs.push_back({number(iv.lo), number(iv.hi)});
        doc["admissible_t"] = {{"intervals", ivs}, {"measure", number(adm.measure())},
                               {"windows_disjoint", adm.windows_disjoint}};
      } catch (const Error& e) {
        doc["admissible_t"] = {{"error", e.what()}};
      }
    }
    doc["collision_windows"] = collisions;
    json gaps = json::array();
    if (st.s > 0)
      for (int l = 1; l <= k; ++l)
        for (const auto& w : gap_windows(st, n, l, cfg_.analysis.gamma_frac * std::pow(kPi * l, n - 2)))
          gaps.push_back(window_json(w));
    doc["gap_windows"] = gaps;
    if (opt_.t) {
      const auto ex = is_exceptional(st, n, k, j, *opt_.t, cfg_.analysis.galerkin.cluster_tol);
      doc["exceptional_at_t"] = {{"t", number(*opt_.t)}, {"exceptional", ex.exceptional}};
    }
    files_["windows.json"] = doc.dump(2) + "\n";
    out_ << "bands |k|<=" << k << " on " << (T + 1) << " t samples; epsilon_k=" << format_real(eps)
         << " delta_k=" << format_real(delta) << " collision_windows=" << collisions.size()
         << " gap_windows=" << gaps.size() << "\n";
    return kOk;
  }

  int bloch() {
    const double t = opt_.t.value_or(0.0);
    GalerkinConfig g = cfg_.analysis.galerkin;
    std::optional<SpectralDisk> window;
    if (opt_.lambda_hi) {
      window = SpectralDisk{{0.0, 0.0}, *opt_.lambda_hi};
      while (certified_radius(spec().n(), g.K, t) < *opt_.lambda_hi) ++g.K;
    }
    const auto set = timed("galerkin", [&] { return bloch_eigenvalues(spec(), t, g, window); });
    const auto sym = conjugate_symmetry_check(set, 1e-6);
    const auto es = engines();
    const bool with_monodromy = std::find(es.begin(), es.end(), Engine::Monodromy) != es.end();
    std::string csv = with_monodromy ? csv_row({"re", "im", "multiplicity", "monodromy_re", "monodromy_im"})
                                     : csv_row({"re", "im", "multiplicity"});
    double worst = 0.0;
    for (const auto& c : set.clusters) {
      std::vector<std::string> row = {format_real(c.value.real()), format_real(c.value.imag()),
                                      std::to_string(c.multiplicity)};
      if (with_monodromy) {
        if (std::abs(c.value) <= cfg_.analysis.monodromy.lambda_cap) {
          const Complex r = refine_bloch_root(spec(), c.value, t, cfg_.analysis.monodromy);
          worst = std::max(worst, std::abs(r - c.value));
          row.push_back(format_real(r.real()));
          row.push_back(format_real(r.imag()));
        } else {
          row.push_back("");
          row.push_back("");
        }
      }
      csv += csv_row(row);
    }
    files_["bloch.csv"] = csv;
    out_ << "t=" << format_real(t) << " K=" << set.K << " eigenvalues=" << set.total_multiplicity()
         << " clusters=" << set.clusters.size() << " conjugate_symmetric=" << (sym.symmetric ? "yes" : "no");
    if (with_monodromy) out_ << " max_engine_difference=" << format_real(worst);
    out_ << "\n";
    return kOk;
  }

  int trace() {
    const auto st = structure_of();
    const int n = spec().n();
    const BandIndex band{opt_.k.value_or(cfg_.analysis.calib.n_config), opt_.j.value_or(0)};
    const double t0 = opt_.t.value_or(1.0);
    const double eps = epsilon_k(spec(), st, band.k, cfg_.analysis.calib);
    const double h = opt_.h.value_or(lemma1_hk(n, band.k, eps));
    const auto curve = timed("trace", [&] {
      return trace_branches(spec(), st, band, t0, h, kDefaultTraceSteps, cfg_.analysis.galerkin, cfg_.analysis.calib);
    });
    std::string csv = csv_row({"t", "branch", "re", "im"});
    for (std::size_t q = 0; q < curve.t_grid.size(); ++q)
      for (std::size_t l = 0; l < curve.branches.size(); ++l)
        csv += csv_row({format_real(curve.t_grid[q]), std::to_string(l), format_real(curve.branches[l][q].real()),
                        format_real(curve.branches[l][q].imag())});
    files_["trace.csv"] = csv;
    const double target = mu_kj(n, st.entries.at(band.j).mu, band.k, t0).real();
    const auto crossings =
        branch_crossings(spec(), st, curve, target, cfg_.analysis.galerkin, cfg_.analysis.calib);
    json cross = json::array();
    for (const auto& c : crossings)
      cross.push_back({{"branch", c.branch}, {"t", number(c.t)}, {"value", complex_json(c.value)}});
    files_["trace.json"] = json{{"k", band.k}, {"j", band.j}, {"t0", number(t0)}, {"h", number(h)},
                                {"disk_radius", number(curve.disk_radius)}, {"lambda", number(target)},
                                {"crossings", cross}}
                               .dump(2) + "\n";
    out_ << "traced " << curve.branches.size() << " branches on " << curve.t_grid.size() << " t samples over ["
         << format_real(t0 - h) << ", " << format_real(t0 + h) << "]; crossings of Re mu_{k,j}(t0): " << crossings.size()
         << "\n";
    return kOk;
  }

  GapReport run_scan(Engine engine, double lo, double hi, double step) {
    AnalysisConfig a = cfg_.analysis;
    a.engine = engine;
    return timed("scan_" + to_string(engine), [&] { return scan_real_axis(spec(), lo, hi, step, a); });
  }

  int scan(bool containment) {
    const double lo = need(opt_.lambda_lo, "--lambda-lo");
    const double hi = need(opt_.lambda_hi, "--lambda-hi");
    const double step = opt_.step.value_or((hi - lo) / 1000.0);
    const auto es = engines();
    std::vector<GapReport> reports;
    for (Engine e : es) reports.push_back(run_scan(e, lo, hi, step));
    int status = kOk;
    for (const auto& r : reports) {
      const std::string suffix = es.size() > 1 ? "_" + to_string(r.engine) : "";
      files_["gaps" + suffix + ".json"] = gap_report_json(r);
      files_["scan" + suffix + ".csv"] = gap_report_csv(r);
      out_ << to_string(r.engine) << ": " << r.gaps.size() << " gap(s) in [" << format_real(lo) << ", "
           << format_real(hi) << "] step " << format_real(step) << ", coverage " << format_real(r.coverage_fraction)
           << "\n";
      for (const auto& g : r.gaps) {
        out_ << "  [" << format_real(g.interval.lo) << ", " << format_real(g.interval.hi) << "]";
        if (g.nearest_window) out_ << " nearest l=" << g.nearest_window->l;
        out_ << "\n";
      }
      if (r.samples_truncated) log_.warn("grid too large for CSV samples; scan CSV holds the header only");
    }
    if (reports.size() == 2) {
      const bool agree = engines_agree(reports[0], reports[1], step);
      out_ << "engines agree within 2*step: " << (agree ? "yes" : "no") << "\n";
      if (!agree) status = kVerificationFailed;
    }
    if (containment) {
      if (spec().n() % 2 != 0) {
        out_ << "gap containment applies to even n only\n";
      } else {
        const auto st = structure_of();
        const auto c = verify_gap_containment(reports.front(), st, spec().n(), cfg_.analysis);
        json fitted = json::object();
        for (const auto& [l, g] : c.fitted_gamma) fitted[std::to_string(l)] = number(g);
        files_["containment.json"] = json{{"all_contained", c.all_contained}, {"H", number(c.H)},
                                          {"fitted_gamma", fitted}, {"offsets_decay", c.offsets_decay},
                                          {"decay_slope", number(c.decay_slope)}, {"decay_points", c.decay_points}}
                                         .dump(2) + "\n";
        out_ << "all gaps contained: " << (c.all_contained ? "yes" : "no") << "; offset decay slope "
             << format_real(c.decay_slope) << " over " << c.decay_points << " l values\n";
        if (!c.all_contained) status = kVerificationFailed;
      }
    }
    return status;
  }

  static bool engines_agree(const GapReport& a, const GapReport& b, double step) {
    if (a.gaps.size() != b.gaps.size()) return false;
    for (std::size_t i = 0; i < a.gaps.size(); ++i)
      if (std::abs(a.gaps[i].interval.lo - b.gaps[i].interval.lo) > 2 * step ||
          std::abs(a.gaps[i].interval.hi - b.gaps[i].interval.hi) > 2 * step)
        return false;
    return true;
  }

  int coverage() {
    const double H = need(opt_.lambda_lo, "--lambda-lo");
    const double hi = need(opt_.lambda_hi, "--lambda-hi");
    const double step = opt_.step.value_or(0.5);
    AnalysisConfig a = cfg_.analysis;
    a.engine = engines().front();
    const auto res = timed("coverage", [&] { return verify_real_coverage(spec(), H, hi, step, a); });
    json reps = json::array();
    for (const auto& r : res.reports) reps.push_back(json::parse(gap_report_json(r)));
    files_["coverage.json"] = json{{"covered", res.covered}, {"worst_defect", number(res.worst_defect)},
                                   {"H_candidate", number(H)}, {"H_effective", number(res.H_effective)},
                                   {"reports", reps}}
                                  .dump(2) + "\n";
    out_ << "covered=" << (res.covered ? "true" : "false") << " H_effective=" << format_real(res.H_effective)
         << " worst_defect=" << format_real(res.worst_defect) << "\n";
    return res.covered ? kOk : kVerificationFailed;
  }

  int verify() {
    json checks = json::array();
    bool all = true;
    auto record = [&](const std::string& name, bool passed, double value, double tol) {
      checks.push_back({{"check", name}, {"passed", passed}, {"value", number(value)}, {"tolerance", number(tol)}});
      out_ << (passed ? "PASS " : "FAIL ") << name << " value=" << format_real(value) << " tol=" << format_real(tol)
           << "\n";
      all = all && passed;
    };
    const auto& g = cfg_.analysis.galerkin;
    const auto& mcfg = cfg_.analysis.monodromy;

    double sym = 0.0;
    bool sym_ok = true;
    for (double t : {0.0, 0.7, kPi, 4.0}) {
      const auto set = bloch_eigenvalues(spec(), t, g);
      const auto r = conjugate_symmetry_check(set, 1e-6);
      sym = std::max(sym, r.max_defect);
      sym_ok = sym_ok && r.symmetric;
    }
    record("conjugate_symmetry", sym_ok, sym, 1e-6);

    double liou = 0.0;
    for (double lambda : {-7.25, 0.5, 13.1, 47.9}) {
      const auto rec = fundamental_matrix(spec(), lambda, mcfg);
      liou = std::max(liou, std::abs(rec.det_M - 1.0));
    }
    record("liouville_det_M", liou <= 1e-8, liou, 1e-8);

    if ((spec().n() * spec().m()) % 2 == 0) {
      const auto d = delta_polynomial_structure(spec(), 10.7, mcfg);
      record("delta_polynomial_ends", d.defect <= 1e-6, d.defect, 1e-6);
    }

    const double t = 0.9;
    GalerkinConfig g2 = g;
    const double reach = 2000.0;
    while (certified_radius(spec().n(), g2.K, t) < reach) ++g2.K;
    const auto set = bloch_eigenvalues(spec(), t, g2, SpectralDisk{{0.0, 0.0}, reach});
    double diff = 0.0;
    for (Complex z : set.values) diff = std::max(diff, std::abs(refine_bloch_root(spec(), z, t, mcfg) - z));
    record("engine_agreement", diff <= 1e-6, diff, 1e-6);

    const auto st = structure_of();
    const auto parity = remark1_parity(st);
    record("remark1_parity", parity.consistent, parity.count_real_odd, parity.m_parity);

    if (opt_.lambda_lo && opt_.lambda_hi) {
      const double step = opt_.step.value_or((*opt_.lambda_hi - *opt_.lambda_lo) / 1000.0);
      const auto a = run_scan(Engine::Galerkin, *opt_.lambda_lo, *opt_.lambda_hi, step);
      const auto b = run_scan(Engine::Monodromy, *opt_.lambda_lo, *opt_.lambda_hi, step);
      record("scan_engine_agreement", engines_agree(a, b, step), static_cast<double>(a.gaps.size()) - b.gaps.size(),
             2 * step);
    }
    files_["verify.json"] = json{{"all_passed", all}, {"checks", checks}}.dump(2) + "\n";
    return all ? kOk : kVerificationFailed;
  }

  const Options& opt_;
  RunConfig cfg_;
  std::ostream& out_;
  const Logger& log_;
  std::map<std::string, std::string> files_;
  std::vector<std::pair<std::string, double>> timings_;
};

void apply_overrides(const Options& opt, RunConfig& cfg) {
  if (opt.epsilon) cfg.spec = cfg.spec.with_epsilon(*opt.epsilon);
  cfg.analysis.jobs = opt.jobs > 0 ? opt.jobs : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (!opt.engine.empty() && opt.engine != "both") cfg.analysis.engine = *parse_engine(opt.engine);
}

std::string manifest_json(const Options& opt, const std::vector<std::string>& args,
                          const std::vector<std::pair<std::string, double>>& timings, double total, int status,
                          const std::vector<std::string>& outputs) {
  json t = json::object();
  for (const auto& [name, secs] : timings) t[name] = number(secs);
  t["total"] = number(total);
  json doc = {{"tool", "floquet-pt"},
              {"version", kVersion},
              {"command", opt.command},
              {"config", opt.config},
              {"config_resolved", "config.resolved.json"},
              {"overrides", opt.overrides},
              {"output_directory", opt.out_dir},
              {"argv", args},
              {"outputs", outputs},
              {"exit_status", status},
              {"timings_seconds", t}};
  return doc.dump(2) + "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const Logger log(err, level_from_env());
  Options opt;
  CLI::App app{"Bloch spectra of periodic PT-symmetric matrix differential operators", "floquet-pt"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  static const char* kCommands[][2] = {
      {"validate", "check a config document"},
      {"structure", "Jordan structure of the mean coefficient C"},
      {"unperturbed", "band functions mu_{k,j}(t) and their windows"},
      {"bloch", "Bloch eigenvalues at one t"},
      {"trace", "branches near mu_{k,j} over a t interval"},
      {"scan", "real-axis membership scan"},
      {"gaps", "gap scan with window containment"},
      {"coverage", "check that [H, lambda_hi] lies in the spectrum"},
      {"verify", "invariant suite"},
  };
  for (const auto& [name, help] : kCommands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config, "config document (JSON)")->required();
    sub->add_option("--out", opt.out_dir, "output directory");
    sub->add_option("--jobs", opt.jobs, "worker threads (default: processors)");
    sub->add_option("--lambda-lo", opt.lambda_lo, "scan lower end / coverage H");
    sub->add_option("--lambda-hi", opt.lambda_hi, "scan upper end / Bloch window radius");
    sub->add_option("--step", opt.step, "grid step");
    sub->add_option("--t", opt.t, "quasimomentum t");
    sub->add_option("--k", opt.k, "band index k");
    sub->add_option("--j", opt.j, "eigenvalue index j of C");
    sub->add_option("--half-width", opt.h, "half-width of the traced t interval");
    sub->add_option("--engine", opt.engine, "galerkin, monodromy or both")
        ->check(CLI::IsMember({"galerkin", "monodromy", "both"}));
    sub->add_option("--epsilon", opt.epsilon, "homotopy weight override");
    sub->callback([&opt, sub] { opt.command = sub->get_name(); });
  }

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "floquet-pt: " << e.what() << "\n";
    return kInputError;
  }
  for (const auto* sub : app.get_subcommands())
    for (const auto* o : sub->get_options())
      if (o->count() > 0 && o->get_name() != "--config" && o->get_name() != "--help")
        opt.overrides[o->get_name()] = o->as<std::string>();

  const auto start = Clock::now();
  int status = kOk;
  std::map<std::string, std::string> files;
  std::vector<std::pair<std::string, double>> timings;
  try {
    RunConfig cfg = load_config(opt.config);
    apply_overrides(opt, cfg);
    log.info("loaded " + opt.config + ": n=" + std::to_string(cfg.spec.n()) + " m=" + std::to_string(cfg.spec.m()));
    const std::string resolved = config_to_json(cfg);
    Command cmd(opt, std::move(cfg), out, log);
    status = cmd.dispatch();
    files = cmd.files();
    files["config.resolved.json"] = resolved;
    timings = cmd.timings();
  } catch (const Error& e) {
    err << "floquet-pt: " << e.what() << "\n";
    status = is_input_error(e.code()) ? kInputError : kEngineFailure;
  } catch (const std::exception& e) {
    err << "floquet-pt: " << e.what() << "\n";
    status = kEngineFailure;
  }

  try {
    const fs::path dir(opt.out_dir);
    fs::create_directories(dir);
    std::vector<std::string> outputs;
    for (const auto& [name, content] : files) {
      write_atomic(dir / name, content);
      outputs.push_back(name);
      log.debug("wrote " + (dir / name).string());
    }
    const double total = std::chrono::duration<double>(Clock::now() - start).count();
    write_atomic(dir / "manifest.json", manifest_json(opt, args, timings, total, status, outputs));
  } catch (const std::exception& e) {
    err << "floquet-pt: cannot write outputs: " << e.what() << "\n";
    if (status == kOk) status = kInputError;
  }
  return status;
}

}  // namespace fpt::cli
