#include "floquet_pt/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>

#include "floquet_pt/errors.hpp"

namespace fpt {

std::string to_string(Engine engine) { return engine == Engine::Galerkin ? "galerkin" : "monodromy"; }

std::optional<Engine> parse_engine(std::string_view name) {
  if (name == "galerkin") return Engine::Galerkin;
  if (name == "monodromy") return Engine::Monodromy;
  return std::nullopt;
}

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body) {
  if (jobs <= 0) jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first;
  std::mutex guard;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count || failed.load()) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(guard);
        if (!first) first = std::current_exception();
        failed = true;
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& th : pool) th.join();
  if (first) std::rethrow_exception(first);
}

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(ErrorCode::InvalidArgument, "slope fit needs two points");
  const double tiny = std::numeric_limits<double>::min();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double count = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(std::max(y[i], tiny));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = count * sxx - sx * sx;
  if (denom == 0.0) throw Error(ErrorCode::InvalidArgument, "slope fit needs distinct abscissae");
  return (count * sxy - sx * sy) / denom;
}

std::size_t grid_size(double lambda_lo, double lambda_hi, double step) {
  if (!(lambda_lo < lambda_hi)) throw Error(ErrorCode::InvalidArgument, "scan needs lambda_lo < lambda_hi");
  if (!(step > 0.0)) throw Error(ErrorCode::InvalidArgument, "scan step must be positive");
  const double span = (lambda_hi - lambda_lo) / step;
  if (!(span < 1e15)) throw Error(ErrorCode::InvalidArgument, "scan grid is too fine for the range");
  return static_cast<std::size_t>(std::floor(span * (1.0 + 1e-12))) + 1;
}

std::optional<Window> nearest_gap_window(const SpectralStructure& structure, int n, double x, double gamma_frac) {
  if (structure.s == 0) return std::nullopt;
  const long guess = x > 0.0 ? std::lround(std::pow(x, 1.0 / n) / kPi) : 1;
  std::optional<Window> best;
  for (long l = std::max(1L, guess - 2); l <= guess + 2; ++l) {
    const double gamma = gamma_frac * std::pow(kPi * static_cast<double>(l), n - 2);
    for (const auto& w : gap_windows(structure, n, static_cast<int>(l), gamma))
      if (!best || std::abs(w.center - x) < std::abs(best->center - x)) best = w;
  }
  return best;
}

namespace {

Error engine_failure(const Error& e, const std::string& where) {
  if (is_input_error(e.code())) return e;
  return Error(ErrorCode::EngineFailure, where + ": " + e.what());
}

void attach_windows(GapReport& report, const OperatorSpec& spec, const AnalysisConfig& config) {
  if (report.gaps.empty()) return;
  const SpectralStructure structure = spectral_structure(mean_matrix(spec));
  for (auto& gap : report.gaps) {
    gap.nearest_window = nearest_gap_window(structure, spec.n(), gap.interval.center(), config.gamma_frac);
    if (gap.nearest_window)
      gap.normalized_offset = std::abs(gap.interval.center() - gap.nearest_window->center) /
                              std::pow(static_cast<double>(gap.nearest_window->l), spec.n() - 2);
  }
}

// ---- Galerkin engine: the real part of the spectrum as a union of band segments

struct Segment {
  double lo, hi;
  double ta, va, tb, vb;  // end samples, for the witness t
};

struct TSample {
  double t = 0.0;
  std::vector<Complex> values;  // sorted by (Re, Im)
};

// Sorted-index branches of the truncated spectrum over one period, refined
// where realness changes, then searched for extrema that fall between samples.
class BandCover {
 public:
  BandCover(const OperatorSpec& spec, int K, double radius, double step, const AnalysisConfig& config)
      : spec_(spec), K_(K), radius_(radius), step_(step), config_(config) {}

  TSample sample(double t) const {
    try {
      return {t, galerkin_spectrum(spec_, t, K_)};
    } catch (const Error& e) {
      throw engine_failure(e, "galerkin engine at t = " + std::to_string(t));
    }
  }

  // Appends the samples after a up to and including b.
  void collect(const TSample& a, const TSample& b, int depth, std::vector<TSample>& out) const {
    const TSample m = sample(0.5 * (a.t + b.t));
    bool split = false;
    if (depth < kMaxDepth && b.t - a.t > kMinWidth) {
      for (std::size_t i = 0; i < a.values.size() && !split; ++i) {
        if (!usable(a.values[i]) && !usable(m.values[i]) && !usable(b.values[i])) continue;
        const bool ra = is_real(a.values[i]), rm = is_real(m.values[i]), rb = is_real(b.values[i]);
        if (ra != rm || rm != rb) {
          split = true;
        } else if (ra) {
          const double va = a.values[i].real(), vm = m.values[i].real(), vb = b.values[i].real();
          const double excess = std::max({std::min(va, vb) - vm, vm - std::max(va, vb), 0.0});
          if (excess > tolerance(vm)) split = true;
        }
      }
    }
    if (split) {
      collect(a, m, depth + 1, out);
      collect(m, b, depth + 1, out);
      return;
    }
    out.push_back(m);
    out.push_back(b);
  }

  void segments_between(const TSample& a, const TSample& b, std::vector<Segment>& out) const {
    const bool resolved = b.t - a.t <= 4.0 * kMinWidth;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
      emit(a.t, a.values[i], b.t, b.values[i], out);
      if (!resolved) continue;
      const bool ra = is_real(a.values[i]), rb = is_real(b.values[i]);
      if (ra && !rb) bridge(a, b, i, out);
      if (rb && !ra) bridge(b, a, i, out);
    }
  }

  // Extremum of branch i bracketed by samples (lo, mid, hi), mid being a
  // sampled extremum; adds the segment from the sample to the true extremum.
  // When the branch turns complex on the way, the search stops at the
  // collision and bridges to the partner branch.
  void extremum(const TSample& lo, const TSample& mid, const TSample& hi, std::size_t i, bool maximum,
                std::vector<Segment>& out) const {
    const double sign = maximum ? 1.0 : -1.0;
    enum class State { Ok, Complex, Outside };
    struct Point {
      TSample s;
      State state;
      double f;
    };
    auto eval = [&](double t) {
      Point p{sample(t), State::Ok, 0.0};
      const Complex z = p.s.values[i];
      if (!usable(z)) p.state = State::Outside;
      else if (!is_real(z)) p.state = State::Complex;
      p.f = sign * z.real();
      return p;
    };
    constexpr double g = 0.6180339887498949;
    double a = lo.t, b = hi.t;
    Point best{mid, State::Ok, sign * mid.values[i].real()};
    Point p1 = eval(b - g * (b - a)), p2 = eval(a + g * (b - a));
    std::optional<Point> stop;
    for (int it = 0; it < kGoldenIterations; ++it) {
      if (p1.state != State::Ok) stop = p1;
      else if (p2.state != State::Ok) stop = p2;
      if (stop) break;
      if (p1.f > best.f) best = p1;
      if (p2.f > best.f) best = p2;
      if (b - a < kMinWidth || (b - a < 1e-6 && std::abs(p1.f - p2.f) < 0.01 * tolerance(best.f))) break;
      if (p1.f >= p2.f) {
        b = p2.s.t;
        p2 = std::move(p1);
        p1 = eval(b - g * (b - a));
      } else {
        a = p1.s.t;
        p1 = std::move(p2);
        p2 = eval(a + g * (b - a));
      }
    }
    if (stop && stop->state == State::Complex) {
      Point r = best, c = *stop;
      while (std::abs(c.s.t - r.s.t) > kMinWidth) {
        Point p = eval(0.5 * (r.s.t + c.s.t));
        if (p.state == State::Ok) r = std::move(p);
        else if (p.state == State::Complex) c = std::move(p);
        else break;
      }
      if (r.s.t != mid.t) emit_values(mid.t, mid.values[i].real(), r.s.t, r.s.values[i].real(), out);
      if (std::abs(c.s.t - r.s.t) <= kMinWidth) bridge(r.s, c.s, i, out);
    }
    if (best.s.t != mid.t) emit_values(mid.t, mid.values[i].real(), best.s.t, best.s.values[i].real(), out);
  }

  [[nodiscard]] bool is_real(Complex z) const {
    return std::abs(z.imag()) <= config_.real_tol * std::max(1.0, std::abs(z));
  }
  [[nodiscard]] bool usable(Complex z) const { return std::abs(z) <= radius_; }

 private:
  static constexpr int kMaxDepth = 48;
  static constexpr int kGoldenIterations = 80;
  static constexpr double kMinWidth = 1e-10;

  [[nodiscard]] double tolerance(double v) const {
    return std::max(step_ / 16.0, 16.0 * config_.cover_tol * std::max(1.0, std::abs(v)));
  }

  // Branch i is real at r and complex at c, an exceptional point in between:
  // it meets its sorted neighbour there, so the values between the two are covered.
  void bridge(const TSample& r, const TSample& c, std::size_t i, std::vector<Segment>& out) const {
    std::optional<std::size_t> partner;
    for (std::size_t k : {i - 1, i + 1}) {
      if (k >= r.values.size() || !is_real(r.values[k]) || !usable(r.values[k]) || is_real(c.values[k])) continue;
      if (!partner || std::abs(r.values[k] - r.values[i]) < std::abs(r.values[*partner] - r.values[i])) partner = k;
    }
    if (!usable(r.values[i]) || !partner) return;
    emit_values(r.t, r.values[i].real(), r.t, r.values[*partner].real(), out);
  }

  void emit(double ta, Complex za, double tb, Complex zb, std::vector<Segment>& out) const {
    if (!is_real(za) || !is_real(zb) || !usable(za) || !usable(zb)) return;
    emit_values(ta, za.real(), tb, zb.real(), out);
  }

  static void emit_values(double ta, double va, double tb, double vb, std::vector<Segment>& out) {
    if (tb < ta) {
      std::swap(ta, tb);
      std::swap(va, vb);
    }
    out.push_back({std::min(va, vb), std::max(va, vb), ta, va, tb, vb});
  }

  const OperatorSpec& spec_;
  int K_;
  double radius_;
  double step_;
  const AnalysisConfig& config_;
};

int scan_truncation(const OperatorSpec& spec, double reach, const AnalysisConfig& config) {
  int K = std::max(config.galerkin.K, minimal_truncation(spec));
  // the lowest certified radius over t in [0, 2pi] sits at t = 2pi
  while (certified_radius(spec.n(), K, kTwoPi) < 2.0 * reach) ++K;
  return K;
}

std::vector<Segment> galerkin_segments(const OperatorSpec& spec, double reach, double step,
                                       const AnalysisConfig& config, int& K_out) {
  const int K = scan_truncation(spec, reach, config);
  K_out = K;
  const double radius = certified_radius(spec.n(), K, kTwoPi);
  const BandCover cover(spec, K, radius, step, config);
  const int T = std::max(config.t_grid, 4);
  std::vector<TSample> base(T + 1);
  parallel_for(base.size(), config.jobs, [&](std::size_t q) { base[q] = cover.sample(kTwoPi * q / T); });
  std::vector<std::vector<TSample>> parts(T);
  parallel_for(parts.size(), config.jobs, [&](std::size_t q) { cover.collect(base[q], base[q + 1], 0, parts[q]); });
  std::vector<TSample> seq{base.front()};
  for (auto& p : parts)
    for (auto& smp : p) seq.push_back(std::move(smp));

  std::vector<Segment> out;
  for (std::size_t q = 0; q + 1 < seq.size(); ++q) cover.segments_between(seq[q], seq[q + 1], out);

  // sampled extrema of each real branch; the true one lies within the neighbours
  struct Job {
    std::size_t q, i;
    bool maximum;
  };
  std::vector<Job> jobs;
  const std::size_t branches = seq.front().values.size();
  for (std::size_t i = 0; i < branches; ++i)
    for (std::size_t q = 1; q + 1 < seq.size(); ++q) {
      const Complex zl = seq[q - 1].values[i], zm = seq[q].values[i], zr = seq[q + 1].values[i];
      if (!cover.is_real(zl) || !cover.is_real(zm) || !cover.is_real(zr)) continue;
      if (!cover.usable(zl) || !cover.usable(zm) || !cover.usable(zr)) continue;
      const double l = zl.real(), m = zm.real(), r = zr.real();
      if (m >= l && m >= r && (m > l || m > r)) jobs.push_back({q, i, true});
      if (m <= l && m <= r && (m < l || m < r)) jobs.push_back({q, i, false});
    }
  std::vector<std::vector<Segment>> found(jobs.size());
  parallel_for(jobs.size(), config.jobs, [&](std::size_t k) {
    const auto& jb = jobs[k];
    cover.extremum(seq[jb.q - 1], seq[jb.q], seq[jb.q + 1], jb.i, jb.maximum, found[k]);
  });
  for (auto& f : found) out.insert(out.end(), f.begin(), f.end());
  std::sort(out.begin(), out.end(), [](const Segment& x, const Segment& y) { return x.lo < y.lo; });
  return out;
}

std::vector<Interval> merge_padded(const std::vector<Segment>& segments, double cover_tol) {
  std::vector<Interval> merged;
  for (const auto& s : segments) {
    const double pad = cover_tol * std::max({1.0, std::abs(s.lo), std::abs(s.hi)});
    const Interval iv{s.lo - pad, s.hi + pad};
    if (!merged.empty() && iv.lo <= merged.back().hi) {
      merged.back().hi = std::max(merged.back().hi, iv.hi);
    } else {
      merged.push_back(iv);
    }
  }
  return merged;
}

GapReport galerkin_scan(const OperatorSpec& spec, double lo, double hi, double step, const AnalysisConfig& config) {
  const std::size_t points = grid_size(lo, hi, step);
  const long last_index = static_cast<long>(points) - 1;
  int K = 0;
  const auto segments = galerkin_segments(spec, std::max(std::abs(lo), std::abs(hi)) + step, step, config, K);
  const auto covered = merge_padded(segments, config.cover_tol);

  GapReport report;
  report.scan_range = {lo, hi};
  report.grid_step = step;
  report.engine = Engine::Galerkin;
  report.grid_points = points;
  report.truncation = K;
  auto grid = [&](long i) { return lo + static_cast<double>(i) * step; };

  // grid indices inside each covered interval; intervals without one do not split runs
  struct Hit {
    long first, last;
    std::size_t index;
  };
  std::vector<Hit> hits;
  std::size_t members = 0;
  for (std::size_t c = 0; c < covered.size(); ++c) {
    long first = static_cast<long>(std::ceil((covered[c].lo - lo) / step));
    long last = static_cast<long>(std::floor((covered[c].hi - lo) / step));
    first = std::max(first, 0L);
    last = std::min(last, last_index);
    if (first > last) continue;
    if (grid(first) < covered[c].lo) ++first;
    if (grid(last) > covered[c].hi) --last;
    if (first > last) continue;
    hits.push_back({first, last, c});
    members += static_cast<std::size_t>(last - first + 1);
  }

  auto edge_below = [&](double x) {
    // largest covered upper end strictly below x
    auto it = std::lower_bound(covered.begin(), covered.end(), x,
                               [](const Interval& iv, double v) { return iv.hi < v; });
    return it == covered.begin() ? -std::numeric_limits<double>::infinity() : std::prev(it)->hi;
  };
  auto edge_above = [&](double x) {
    auto it = std::upper_bound(covered.begin(), covered.end(), x,
                               [](double v, const Interval& iv) { return v < iv.lo; });
    return it == covered.end() ? std::numeric_limits<double>::infinity() : it->lo;
  };

  auto handle_run = [&](long first, long last) {
    if (first > last) return;
    const long length = last - first + 1;
    report.non_members += static_cast<std::size_t>(length);
    const double below = edge_below(grid(first));
    const double above = edge_above(grid(last));
    if (!report.lowest_non_member) report.lowest_non_member = grid(first);
    report.highest_non_member = grid(last);
    // worst defect in the run: the grid point nearest the middle of (below, above)
    double worst = 0.0;
    if (std::isinf(below) && std::isinf(above)) {
      worst = std::numeric_limits<double>::infinity();
    } else {
      const double mid = std::isinf(below) ? grid(first) : std::isinf(above) ? grid(last) : 0.5 * (below + above);
      long centre = std::clamp(static_cast<long>(std::llround((mid - lo) / step)), first, last);
      for (long i : {centre - 1, centre, centre + 1, first, last}) {
        if (i < first || i > last) continue;
        worst = std::max(worst, std::min(grid(i) - below, above - grid(i)));
      }
    }
    report.worst_defect = std::max(report.worst_defect, worst);
    if (length < 2) return;
    DetectedGap gap;
    gap.interval.lo = first == 0 ? lo : std::max(lo, below);
    gap.interval.hi = last == last_index ? hi : std::min(hi, above);
    report.gaps.push_back(gap);
  };
  long cursor = 0;
  for (const auto& h : hits) {
    handle_run(cursor, h.first - 1);
    cursor = h.last + 1;
  }
  handle_run(cursor, last_index);
  report.coverage_fraction = static_cast<double>(members) / static_cast<double>(points);

  if (points <= config.sample_cap) {
    // prefix maxima of segment upper ends for the witness lookup
    std::vector<double> reach(segments.size());
    double run = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < segments.size(); ++i) reach[i] = run = std::max(run, segments[i].hi);
    report.samples.reserve(points);
    for (long i = 0; i <= last_index; ++i) {
      const double x = grid(i);
      GridSample s;
      s.lambda = x;
      const double below = edge_below(x);
      const double above = edge_above(x);
      auto inside = std::upper_bound(covered.begin(), covered.end(), x,
                                     [](double v, const Interval& iv) { return v < iv.lo; });
      s.member = inside != covered.begin() && std::prev(inside)->contains(x);
      s.defect = s.member ? 0.0 : std::min(x - below, above - x);
      if (s.member) {
        long idx = static_cast<long>(std::upper_bound(segments.begin(), segments.end(), x,
                                                      [](double v, const Segment& g) { return v < g.lo; }) -
                                     segments.begin()) - 1;
        double best = std::numeric_limits<double>::infinity();
        for (; idx >= 0 && reach[idx] >= x - config.cover_tol * std::max(1.0, std::abs(x)); --idx) {
          const auto& g = segments[idx];
          const double d = std::max({g.lo - x, x - g.hi, 0.0});
          if (d < best) {
            best = d;
            const double w = g.vb != g.va ? std::clamp((x - g.va) / (g.vb - g.va), 0.0, 1.0) : 0.5;
            s.witness_t = g.ta + w * (g.tb - g.ta);
          }
          if (d == 0.0) break;
        }
      }
      report.samples.push_back(s);
    }
  } else {
    report.samples_truncated = true;
  }
  return report;
}

// ---- monodromy engine: pointwise membership

GapReport monodromy_scan(const OperatorSpec& spec, double lo, double hi, double step, const AnalysisConfig& config) {
  const std::size_t points = grid_size(lo, hi, step);
  if (points > config.max_grid_points)
    throw Error(ErrorCode::InvalidArgument, "monodromy scan grid has " + std::to_string(points) +
                                                " points, above max_grid_points");
  auto grid = [&](std::size_t i) { return lo + static_cast<double>(i) * step; };
  auto member_at = [&](double x) {
    try {
      return spectrum_membership(spec, x, config.monodromy);
    } catch (const Error& e) {
      throw engine_failure(e, "monodromy engine at lambda = " + std::to_string(x));
    }
  };
  std::vector<Membership> results(points);
  parallel_for(points, config.jobs, [&](std::size_t i) { results[i] = member_at(grid(i)); });

  GapReport report;
  report.scan_range = {lo, hi};
  report.grid_step = step;
  report.engine = Engine::Monodromy;
  report.grid_points = points;
  std::size_t members = 0;
  for (const auto& r : results) {
    members += r.member ? 1 : 0;
    report.worst_defect = std::max(report.worst_defect, r.best_defect);
  }
  report.coverage_fraction = static_cast<double>(members) / static_cast<double>(points);

  auto bisect = [&](double inside, double outside) {
    // inside is a member, outside is not; shrink to step/16
    while (std::abs(outside - inside) > step / 16.0) {
      const double mid = 0.5 * (inside + outside);
      (member_at(mid).member ? inside : outside) = mid;
    }
    return 0.5 * (inside + outside);
  };
  std::size_t i = 0;
  while (i < points) {
    if (results[i].member) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < points && !results[j + 1].member) ++j;
    report.non_members += j - i + 1;
    if (!report.lowest_non_member) report.lowest_non_member = grid(i);
    report.highest_non_member = grid(j);
    if (j > i) {
      DetectedGap gap;
      gap.interval.lo = i == 0 ? lo : bisect(grid(i - 1), grid(i));
      gap.interval.hi = j + 1 == points ? hi : bisect(grid(j + 1), grid(j));
      report.gaps.push_back(gap);
    }
    i = j + 1;
  }

  if (points <= config.sample_cap) {
    report.samples.reserve(points);
    for (std::size_t q = 0; q < points; ++q)
      report.samples.push_back({grid(q), results[q].member, results[q].best_defect, results[q].witness_t});
  } else {
    report.samples_truncated = true;
  }
  return report;
}

}  // namespace

GapReport scan_real_axis(const OperatorSpec& spec, double lambda_lo, double lambda_hi, double step,
                         const AnalysisConfig& config) {
  GapReport report = config.engine == Engine::Galerkin ? galerkin_scan(spec, lambda_lo, lambda_hi, step, config)
                                                       : monodromy_scan(spec, lambda_lo, lambda_hi, step, config);
  attach_windows(report, spec, config);
  return report;
}

GapContainment verify_gap_containment(const GapReport& report, const SpectralStructure& structure, int n,
                                      const AnalysisConfig& config, std::optional<double> H) {
  GapContainment out;
  out.H = H.value_or(report.scan_range.lo);
  std::map<int, double> offsets;
  for (const auto& gap : report.gaps) {
    if (gap.interval.lo < out.H) {
      out.contained.push_back(true);
      continue;
    }
    const auto w = nearest_gap_window(structure, n, gap.interval.center(), config.gamma_frac);
    if (!w) {
      out.contained.push_back(false);
      out.all_contained = false;
      continue;
    }
    const bool inside = w->contains(gap.interval);
    out.contained.push_back(inside);
    out.all_contained = out.all_contained && inside;
    const double fitted = std::max(std::abs(gap.interval.lo - w->center), std::abs(gap.interval.hi - w->center));
    out.fitted_gamma[w->l] = std::max(out.fitted_gamma[w->l], fitted);
    const double offset = std::abs(gap.interval.center() - w->center) / std::pow(static_cast<double>(w->l), n - 2);
    offsets[w->l] = std::max(offsets[w->l], offset);
  }
  out.decay_points = static_cast<int>(offsets.size());
  if (out.decay_points >= std::max(2, config.min_slope_points)) {
    std::vector<double> x, y;
    for (const auto& [l, off] : offsets) {
      x.push_back(l);
      y.push_back(off);
    }
    out.decay_slope = log_log_slope(x, y);
    out.offsets_decay = out.decay_slope < 0.0;
  } else {
    out.decay_slope = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

CoverageResult verify_real_coverage(const OperatorSpec& spec, double H_candidate, double lambda_hi, double step,
                                    const AnalysisConfig& config) {
  if (!(H_candidate < lambda_hi)) throw Error(ErrorCode::InvalidArgument, "coverage needs H < lambda_hi");
  CoverageResult out;
  out.reports.push_back(scan_real_axis(spec, H_candidate, lambda_hi, step, config));
  if (spec.n() % 2 == 1) out.reports.push_back(scan_real_axis(spec, -lambda_hi, -H_candidate, step, config));

  out.covered = true;
  out.H_effective = H_candidate;
  const double inf = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < out.reports.size(); ++r) {
    const auto& rep = out.reports[r];
    out.worst_defect = std::max(out.worst_defect, rep.worst_defect);
    if (rep.non_members == 0) continue;
    out.covered = false;
    // the non-member farthest from the origin decides
    const double far = r == 0 ? *rep.highest_non_member : -*rep.lowest_non_member;
    const double next = far + step;
    out.H_effective = std::max(out.H_effective, next > lambda_hi ? inf : next);
  }
  return out;
}

LocalizationResult localization_decay(const OperatorSpec& spec, int band_j, const std::vector<int>& k_list,
                                      double t_sample, const AnalysisConfig& config) {
  if (k_list.size() < 2) throw Error(ErrorCode::InvalidArgument, "localization decay needs at least two k");
  if (!std::is_sorted(k_list.begin(), k_list.end()) ||
      std::adjacent_find(k_list.begin(), k_list.end()) != k_list.end())
    throw Error(ErrorCode::InvalidArgument, "k_list must be strictly ascending");
  if (k_list.front() < config.calib.n_config)
    throw Error(ErrorCode::IndexTooSmall, "k_list starts below N = " + std::to_string(config.calib.n_config));
  const SpectralStructure structure = spectral_structure(mean_matrix(spec));
  if (band_j < 0 || band_j >= static_cast<int>(structure.entries.size()))
    throw Error(ErrorCode::InvalidArgument, "band index j out of range");
  const auto& entry = structure.entries[band_j];
  const int n = spec.n();

  LocalizationResult out;
  out.k_list = k_list;
  out.distances.resize(k_list.size());
  bool all_noise = true;
  parallel_for(k_list.size(), config.jobs, [&](std::size_t q) {
    const int k = k_list[q];
    const Complex mu = mu_kj(n, entry.mu, k, t_sample);
    const double radius = epsilon_k(spec, structure, k, config.calib);
    GalerkinConfig g = config.galerkin;
    g.K = std::max(g.K, minimal_truncation(spec));
    while (certified_radius(n, g.K, t_sample) < 2.0 * (std::abs(mu) + radius)) ++g.K;
    const auto set = bloch_eigenvalues(spec, t_sample, g, SpectralDisk{mu, radius});
    if (set.total_multiplicity() != entry.algebraic)
      throw IsolationLostError("disk around mu_{" + std::to_string(k) + "," + std::to_string(band_j) + "} holds " +
                                   std::to_string(set.total_multiplicity()) + " eigenvalues, expected " +
                                   std::to_string(entry.algebraic),
                               t_sample, set.total_multiplicity());
    double d = 0.0;
    for (Complex z : set.values) d = std::max(d, std::abs(z - mu));
    out.distances[q] = d;
  });
  for (std::size_t q = 0; q < k_list.size(); ++q) {
    const double floor = 1e-10 * std::max(1.0, std::abs(mu_kj(n, entry.mu, k_list[q], t_sample)));
    if (out.distances[q] > floor) all_noise = false;
  }

  const double r = std::max(structure.r, 1);
  bool q_vanishes = true;
  for (int k : k_list) q_vanishes = q_vanishes && compute_qk(spec, k) == 0.0;
  const int power = (n % 2 == 1 || q_vanishes) ? n - 3 : n - 2;
  out.slope_bound = power / r + config.calib.slope_slack;
  if (all_noise) {
    out.fitted_slope = 0.0;
  } else {
    std::vector<double> x(k_list.begin(), k_list.end());
    out.fitted_slope = log_log_slope(x, out.distances);
  }
  out.theorem2_consistent = static_cast<int>(k_list.size()) >= config.min_slope_points &&
                            out.fitted_slope <= out.slope_bound;
  return out;
}

DeltaPolynomial delta_polynomial_structure(const OperatorSpec& spec, double lambda, const MonodromyConfig& config) {
  const int degree = spec.n() * spec.m();
  const int samples = degree + 1;
  std::vector<Complex> values(samples);
  for (int q = 0; q < samples; ++q) values[q] = char_det(spec, lambda, kTwoPi * q / samples, config);
  auto coefficient = [&](int p) {
    Complex sum{0.0, 0.0};
    for (int q = 0; q < samples; ++q) sum += values[q] * std::polar(1.0, -kTwoPi * p * q / samples);
    return sum / static_cast<double>(samples);
  };
  DeltaPolynomial out;
  out.coeff_const = coefficient(0);
  out.coeff_leading = coefficient(degree);
  out.defect = std::max(std::abs(out.coeff_const - 1.0), std::abs(out.coeff_leading - 1.0));
  if (degree % 2 == 1)
    out.diagnostic = "n*m = " + std::to_string(degree) + " is odd: the leading coefficient is (-1)^{nm} = -1";
  return out;
}

}  // namespace fpt
