#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "algebra.hpp"
#include "distortion.hpp"
#include "finite_metric.hpp"
#include "hgroup.hpp"
#include "hlie.hpp"
#include "inversion.hpp"
#include "parallel.hpp"
#include "report.hpp"

namespace hlab::cli {

/// Exit codes: success, tooling failure, failed mathematical check.
enum ExitCode : int { kOk = 0, kUsage = 1, kCheckFailed = 2 };

/// Builtin names: H_R:n, H_C:n, H_H:n, H_O (or H_O:1), truncated_HH, degenerate_sum;
/// anything else is read as an algebra-spec JSON file.
inline HTypeAlgebra resolve_algebra(const std::string& sel) {
  if (sel == "truncated_HH") return make_truncated_quaternionic();
  if (sel == "degenerate_sum") return make_degenerate_sum();
  if (sel.size() >= 3 && sel.rfind("H_", 0) == 0 && std::string("RCHO").find(sel[2]) != std::string::npos &&
      (sel.size() == 3 || sel[3] == ':')) {
    const AlgebraKind kind = parse_kind(sel.substr(2, 1));
    int n = 1;
    if (sel.size() > 3) {
      const std::string num = sel.substr(4);
      std::size_t used = 0;
      try {
        n = std::stoi(num, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != num.size() || n < 1)
        throw std::invalid_argument("algebra: '" + sel + "' has an invalid dimension suffix");
    } else if (kind != AlgebraKind::Octonion) {
      throw std::invalid_argument("algebra: '" + sel + "' needs a dimension suffix, e.g. " + sel + ":1");
    }
    if (kind == AlgebraKind::Octonion && n != 1)
      throw std::invalid_argument("algebra: H_O exists only for n = 1, got '" + sel + "'");
    return make_heisenberg(kind, n);
  }
  if (std::filesystem::exists(sel)) return load_algebra(sel);
  throw std::invalid_argument("algebra: unknown algebra name '" + sel + "'");
}

inline std::vector<double> parse_list(const std::string& s, const char* field) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(parse_double(cell, std::string(field)));
  if (out.empty()) throw std::invalid_argument(std::string(field) + ": empty list");
  return out;
}

struct RunConfig {
  std::string algebra;
  std::uint64_t seed = 0;
  std::size_t samples = 10000;
  double tolerance = default_tolerance;
  std::string output;
  std::string format = "json";
  unsigned threads = 0;
  bool no_timestamp = false;
  std::string expect;
};

namespace detail {

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

class Runner {
 public:
  Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int run(const std::vector<std::string>& args) {
    CLI::App app{"Heisenberg-type group laboratory: algebras, gauge metrics, inversions, distortion"};
    app.require_subcommand(1);
    build(app);
    try {
      std::vector<std::string> rev(args.rbegin(), args.rend());
      app.parse(rev);
    } catch (const CLI::CallForHelp&) {
      out_ << app.help();
      return kOk;
    } catch (const CLI::CallForAllHelp&) {
      out_ << app.help("", CLI::AppFormatMode::All);
      return kOk;
    } catch (const CLI::ParseError& e) {
      err_ << "error: " << e.what() << '\n';
      return kUsage;
    }
    if (!action_) {
      err_ << "error: missing subcommand\n";
      return kUsage;
    }
    try {
      set_max_threads(cfg_.threads);
      return action_();
    } catch (const std::exception& e) {
      err_ << "error: " << e.what() << '\n';
      return kUsage;
    }
  }

 private:
  // ---- option plumbing

  void common(CLI::App* c, bool with_algebra) {
    if (with_algebra)
      c->add_option("--algebra", cfg_.algebra, "builtin name (H_C:2, H_O, truncated_HH) or spec JSON")->required();
    c->add_option("--seed", cfg_.seed, "64-bit RNG seed")->capture_default_str();
    c->add_option("--samples", cfg_.samples, "sample count")->check(CLI::PositiveNumber);
    c->add_option("--tolerance", cfg_.tolerance, "tolerance")->check(CLI::PositiveNumber);
    c->add_option("--output,-o", cfg_.output, "write to this path instead of stdout");
    c->add_option("--format", cfg_.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    c->add_option("--threads", cfg_.threads, "cap on worker threads (0 = all cores)");
    c->add_flag("--no-timestamp", cfg_.no_timestamp, "omit the timestamp from reports");
  }

  /// Registers the action of leaf `c`; `samples` is its default sample count.
  template <class F>
  void on(CLI::App* c, std::size_t samples, F&& f) {
    c->callback([this, c, samples, f = std::forward<F>(f)]() {
      if (c->count("--samples") == 0) cfg_.samples = samples;
      action_ = f;
    });
  }

  void emit(const std::string& text) {
    if (cfg_.output.empty()) {
      out_ << text;
      return;
    }
    std::ofstream f(cfg_.output, std::ios::binary);
    if (!f) throw std::runtime_error("output: cannot open '" + cfg_.output + "' for writing");
    f << text;
    if (!f) throw std::runtime_error("output: write to '" + cfg_.output + "' failed");
  }

  void emit_report(const std::string& name, json body, const HTypeAlgebra* alg) {
    json j{{"report", name}, {"seed", cfg_.seed}, {"samples", cfg_.samples}, {"tolerance", cfg_.tolerance}};
    if (alg) j["algebra"] = algebra_summary(*alg);
    if (!cfg_.no_timestamp) j["timestamp"] = utc_timestamp();
    j["result"] = std::move(body);
    emit(j.dump(2) + "\n");
  }

  int expectation(bool outcome, const char* positive, const char* negative) {
    if (cfg_.expect.empty()) return kOk;
    bool want;
    if (cfg_.expect == "pass" || cfg_.expect == positive)
      want = true;
    else if (cfg_.expect == "fail" || cfg_.expect == negative)
      want = false;
    else
      throw std::invalid_argument(std::string("expect: '") + cfg_.expect + "' is not one of pass, fail, " + positive +
                                  ", " + negative);
    if (outcome == want) return kOk;
    err_ << "check failed: expected " << (want ? positive : negative) << '\n';
    return kCheckFailed;
  }

  // ---- subcommands

  void build(CLI::App& app) {
    auto* algebra = app.add_subcommand("algebra", "normed division algebras");
    algebra->require_subcommand(1);
    {
      auto* c = algebra->add_subcommand("check", "composition law, associativity / alternativity");
      common(c, false);
      c->add_option("--kind", kind_, "R, C, H or O")->required()->check(CLI::IsMember({"R", "C", "H", "O"}));
      on(c, 100000, [this] { return algebra_check(); });
    }

    auto* lie = app.add_subcommand("lie", "Lie algebra checks");
    lie->require_subcommand(1);
    {
      auto* c = lie->add_subcommand("check-htype", "Heisenberg-type condition |J_Z X| = |Z||X|");
      common(c, true);
      c->add_option("--expect", cfg_.expect, "pass|fail|htype|not-htype");
      on(c, 10000, [this] { return lie_check_htype(); });
    }
    {
      auto* c = lie->add_subcommand("check-j2", "J^2-condition");
      common(c, true);
      c->add_option("--expect", cfg_.expect, "pass|fail|j2|not-j2");
      on(c, 10000, [this] { return lie_check_j2(); });
    }

    auto* group = app.add_subcommand("group", "group samples and gauge distances");
    group->require_subcommand(1);
    {
      auto* c = group->add_subcommand("sample", "uniform points in the coordinate box of a gauge ball");
      common(c, true);
      c->add_option("--count", count_, "number of points")->required();
      c->add_option("--radius", radius_, "gauge-ball radius")->capture_default_str();
      on(c, 1, [this] { return group_sample(); });
    }
    {
      auto* c = group->add_subcommand("distmat", "gauge distance matrix of a point CSV");
      common(c, true);
      c->add_option("--input", input_, "point-sample CSV")->required();
      on(c, 1, [this] { return group_distmat(); });
    }

    auto* invert = app.add_subcommand("invert", "the inversion sigma and two-point transporters");
    invert->require_subcommand(1);
    {
      auto* c = invert->add_subcommand("verify", "certify d(sp, sq) ||p|| ||q|| = d(p, q)");
      common(c, true);
      c->add_option("--expect", cfg_.expect, "pass|fail|exact|not-exact");
      on(c, 100000, [this] { return invert_verify(); });
    }
    {
      auto* c = invert->add_subcommand("transport", "g(x) = x', g(y) = y' on random quadruples of every branch");
      common(c, true);
      on(c, 1000, [this] { return invert_transport(); });
    }

    auto* metric = app.add_subcommand("metric", "inversion and sphericalization of finite metric spaces");
    metric->require_subcommand(1);
    for (const char* name : {"invert", "sphericalize"}) {
      const bool inv = std::string(name) == "invert";
      auto* c = metric->add_subcommand(name, inv ? "chain metric of d(x,y)/(d(x,p)d(y,p))"
                                                 : "chain metric of d(x,y)/((1+d(x,p))(1+d(y,p)))");
      common(c, false);
      c->add_option("--input", input_, "distance matrix, CSV or JSON")->required();
      c->add_option("--base", base_, "base point label or index")->required();
      c->add_option("--max-points", max_points_, "cap on the chain-metric size")->capture_default_str();
      on(c, 1, [this, inv] { return metric_transform(inv); });
    }

    auto* distort = app.add_subcommand("distort", "empirical distortion statistics");
    distort->require_subcommand(1);
    {
      auto* c = distort->add_subcommand("qm", "strong quasimobius constant between two metrics");
      common(c, false);
      c->add_option("--algebra", cfg_.algebra, "sample this group instead of reading matrices");
      c->add_option("--d-in", d_in_, "input distance matrix");
      c->add_option("--d-out", d_out_, "output distance matrix");
      c->add_option("--count", count_, "group sample size")->capture_default_str();
      c->add_option("--radius", radius_, "group sample radius")->capture_default_str();
      c->add_option("--target", target_, "sphericalize or invert")->check(CLI::IsMember({"sphericalize", "invert"}));
      c->add_option("--base", base_, "base point index for --target");
      c->add_option("--raw", raw_, "CSV of raw (t, t') pairs");
      c->add_option("--max-constant", max_constant_, "fail (exit 2) when C exceeds this or C < 1");
      on(c, 1000000, [this] { return distort_qm(); });
    }
    {
      auto* c = distort->add_subcommand("qc", "metric quasiconformality ratio H(x, r) at shrinking r");
      common(c, true);
      c->add_option("--map", map_, "sigma, identity or dilate")->check(CLI::IsMember({"sigma", "identity", "dilate"}));
      c->add_option("--dilation", dilation_, "factor for --map dilate")->capture_default_str();
      c->add_option("--center-gauge", qc_center_gauge_, "gauge of the random center point")->capture_default_str();
      c->add_option("--radii", qc_radii_, "comma-separated decreasing radii")->capture_default_str();
      on(c, 20000, [this] { return distort_qc(); });
    }
    {
      auto* c = distort->add_subcommand("regularity", "Monte-Carlo Ahlfors exponent of gauge balls");
      common(c, true);
      c->add_option("--radii", regularity_radii_, "comma-separated radii spanning at least a decade")
          ->capture_default_str();
      c->add_option("--center-gauge", regularity_center_gauge_, "gauge of the random center point (0 = identity)")
          ->capture_default_str();
      c->add_option("--max-q-error", max_q_error_, "fail (exit 2) when |Q - Q_hat| exceeds this");
      on(c, 1000000, [this] { return distort_regularity(); });
    }
  }

  int algebra_check() {
    const AlgebraKind kind = parse_kind(kind_);
    const auto r = check_algebra(kind, cfg_.samples, cfg_.seed);
    const bool ok = r.composition <= cfg_.tolerance && r.associativity <= cfg_.tolerance &&
                    r.alternativity <= cfg_.tolerance && r.imaginary_bracket <= cfg_.tolerance;
    emit_report("algebra-check",
                {{"kind", std::string(to_string(kind))},
                 {"dim", dim(kind)},
                 {"composition_residual", r.composition},
                 {"associativity_residual", kind == AlgebraKind::Octonion ? json(nullptr) : json(r.associativity)},
                 {"alternativity_residual", r.alternativity},
                 {"imaginary_bracket_residual", r.imaginary_bracket},
                 {"passes", ok}},
                nullptr);
    return ok ? kOk : kCheckFailed;
  }

  int lie_check_htype() {
    const auto alg = resolve_algebra(cfg_.algebra);
    const auto r = check_h_type(alg, cfg_.samples, cfg_.tolerance, cfg_.seed);
    emit_report("lie-check-htype", to_json(r), &alg);
    return expectation(r.is_h_type, "htype", "not-htype");
  }

  int lie_check_j2() {
    const auto alg = resolve_algebra(cfg_.algebra);
    const auto r = check_j2(alg, cfg_.samples, cfg_.tolerance, cfg_.seed);
    emit_report("lie-check-j2", to_json(r), &alg);
    return expectation(r.satisfies_j2, "j2", "not-j2");
  }

  int group_sample() {
    if (count_ < 1) throw std::invalid_argument("count: must be >= 1");
    const Group g(resolve_algebra(cfg_.algebra));
    const auto pts = g.sample_points(static_cast<std::size_t>(count_), radius_, cfg_.seed);
    if (cfg_.format == "csv") {
      std::ostringstream os;
      write_points_csv(os, g, pts);
      emit(os.str());
      return kOk;
    }
    json arr = json::array();
    for (const auto& p : pts) arr.push_back(point_json(p));
    cfg_.samples = pts.size();
    emit_report("group-sample", {{"radius", radius_}, {"points", arr}}, &g.algebra());
    return kOk;
  }

  int group_distmat() {
    const Group g(resolve_algebra(cfg_.algebra));
    std::ifstream in(input_);
    if (!in) throw std::runtime_error("input: cannot open '" + input_ + "'");
    const auto space = from_group_sample(g, read_points_csv(in, g));
    if (cfg_.format == "csv") {
      std::ostringstream os;
      write_matrix_csv(os, space.labels(), space.dist());
      emit(os.str());
      return kOk;
    }
    emit_report("group-distmat", matrix_to_json(space.labels(), space.dist()), &g.algebra());
    return kOk;
  }

  int invert_verify() {
    const Group g(resolve_algebra(cfg_.algebra));
    const auto r = verify_inversion(g, cfg_.samples, cfg_.seed, cfg_.tolerance);
    emit_report("invert-verify", to_json(r), &g.algebra());
    return expectation(r.is_exact_inversion, "exact", "not-exact");
  }

  int invert_transport() {
    const Group g(resolve_algebra(cfg_.algebra));
    Rng rng(cfg_.seed);
    auto finite = [&] { return ExtendedPoint(detail_box(g, rng)); };
    json branches = json::object();
    bool ok = true;
    struct Case {
      const char* name;
      std::function<std::array<ExtendedPoint, 4>()> draw;  // x, x', y, y'
    };
    const std::vector<Case> cases{
        {"distinct_finite", [&] { return std::array{finite(), finite(), finite(), finite()}; }},
        {"distinct_at_infinity",
         [&] {
           const int which = std::uniform_int_distribution<int>(0, 2)(rng);
           ExtendedPoint x = which == 1 ? finite() : ExtendedPoint::infinity();
           ExtendedPoint xp = which == 0 ? finite() : ExtendedPoint::infinity();
           return std::array{x, xp, finite(), finite()};
         }},
        {"coincident_finite",
         [&] {
           auto x = finite(), xp = finite();
           return std::array{x, xp, x, xp};
         }},
        {"coincident_at_infinity",
         [&] {
           const int which = std::uniform_int_distribution<int>(0, 2)(rng);
           ExtendedPoint x = which == 1 ? finite() : ExtendedPoint::infinity();
           ExtendedPoint xp = which == 0 ? finite() : ExtendedPoint::infinity();
           return std::array{x, xp, x, xp};
         }},
    };
    for (const auto& c : cases) {
      double worst = 0.0;
      for (std::size_t s = 0; s < cfg_.samples; ++s) {
        const auto q = c.draw();
        const auto t = pair_transporter(g, q[0], q[1], q[2], q[3]);
        worst = std::max({worst, extended_error(g, t(q[0]), q[1]), extended_error(g, t(q[2]), q[3])});
      }
      ok = ok && worst <= cfg_.tolerance;
      branches[c.name] = {{"max_error", worst}, {"quadruples", cfg_.samples}};
    }
    emit_report("invert-transport", {{"branches", branches}, {"passes", ok}}, &g.algebra());
    return ok ? kOk : kCheckFailed;
  }

  int metric_transform(bool inv) {
    const auto space = load_metric(input_);
    Eigen::Index base = -1;
    for (std::size_t i = 0; i < space.labels().size(); ++i)
      if (space.labels()[i] == base_) base = static_cast<Eigen::Index>(i);
    if (base < 0) {
      try {
        std::size_t used = 0;
        const long v = std::stol(base_, &used);
        if (used == base_.size()) base = v;
      } catch (const std::exception&) {
      }
    }
    if (base < 0 || base >= space.size())
      throw std::invalid_argument("base: '" + base_ + "' is neither a label nor an index of the input");
    const BasedSpace b(space, base);
    const auto q = inv ? inversion_quasimetric(b) : sphericalization_quasimetric(b);
    const auto c = chain_metric(q, max_points_);
    const auto s = check_sandwich(q, c);
    if (cfg_.format == "csv") {
      std::ostringstream os;
      write_matrix_csv(os, c.labels, c.dist);
      emit(os.str());
    } else {
      json body = matrix_to_json(c.labels, c.dist);
      body["base"] = space.labels()[base];
      body["sandwich"] = to_json(s);
      emit_report(inv ? "metric-invert" : "metric-sphericalize", body, nullptr);
    }
    return s.holds ? kOk : kCheckFailed;
  }

  int distort_qm() {
    Eigen::MatrixXd din, dout;
    std::optional<HTypeAlgebra> alg;
    if (!d_in_.empty() || !d_out_.empty()) {
      if (d_in_.empty() || d_out_.empty()) throw std::invalid_argument("d-in/d-out: both matrices are required");
      if (!cfg_.algebra.empty()) throw std::invalid_argument("algebra: give either --algebra or --d-in/--d-out");
      const auto a = load_metric(d_in_), b = load_metric(d_out_);
      if (a.labels() != b.labels()) throw std::invalid_argument("d-out: labels differ from d-in");
      din = a.dist();
      dout = b.dist();
    } else {
      if (cfg_.algebra.empty()) throw std::invalid_argument("algebra: required unless --d-in/--d-out are given");
      if (target_.empty()) throw std::invalid_argument("target: required with --algebra (sphericalize or invert)");
      if (count_ < 4) throw std::invalid_argument("count: must be >= 4");
      alg = resolve_algebra(cfg_.algebra);
      const Group g(*alg);
      const auto space = from_group_sample(g, g.sample_points(static_cast<std::size_t>(count_), radius_, cfg_.seed));
      Eigen::Index base = 0;
      if (!base_.empty()) base = std::stol(base_);
      const BasedSpace b(space, base);
      if (target_ == "sphericalize") {
        const auto c = chain_metric(sphericalization_quasimetric(b));
        din = space.dist();
        dout = c.dist.topLeftCorner(space.size(), space.size());
      } else {
        const auto c = chain_metric(inversion_quasimetric(b));
        const Eigen::Index m = space.size() - 1;
        dout = c.dist.topLeftCorner(m, m);
        din.resize(m, m);
        for (Eigen::Index i = 0, a = 0; i < space.size(); ++i) {
          if (i == base) continue;
          for (Eigen::Index j = 0, e = 0; j < space.size(); ++j) {
            if (j == base) continue;
            din(a, e++) = space.dist()(i, j);
          }
          ++a;
        }
      }
    }
    const auto r = estimate_quasimobius(din, dout, cfg_.samples, cfg_.seed, raw_.empty() ? 0 : cfg_.samples);
    if (!raw_.empty()) {
      std::ofstream f(raw_);
      if (!f) throw std::runtime_error("raw: cannot open '" + raw_ + "' for writing");
      f << "t,t_prime\n";
      for (const auto& [t, tp] : r.raw) f << format_double(t) << ',' << format_double(tp) << '\n';
    }
    json body = to_json(r);
    if (!target_.empty()) body["target"] = target_;
    emit_report("distort-qm", body, alg ? &*alg : nullptr);
    if (max_constant_ && (r.strong_constant > *max_constant_ || r.strong_constant < 1.0)) {
      err_ << "check failed: strong constant " << format_double(r.strong_constant) << " outside [1, "
           << format_double(*max_constant_) << "]\n";
      return kCheckFailed;
    }
    return kOk;
  }

  int distort_qc() {
    const Group g(resolve_algebra(cfg_.algebra));
    Rng rng(cfg_.seed);
    const GroupPoint center = g.dilate(qc_center_gauge_, g.random_unit_point(rng));
    std::function<GroupPoint(const GroupPoint&)> f;
    if (map_ == "sigma")
      f = [g](const GroupPoint& p) { return sigma(g, p); };
    else if (map_ == "dilate")
      f = [g, t = dilation_](const GroupPoint& p) { return g.dilate(t, p); };
    else
      f = [](const GroupPoint& p) { return p; };
    const auto r = estimate_qc_ratio(group_qc_setting(g, f), center, parse_list(qc_radii_, "radii"), cfg_.samples,
                                     cfg_.seed);
    json body = to_json(r);
    body["map"] = map_;
    body["center"] = point_json(center);
    emit_report("distort-qc", body, &g.algebra());
    return kOk;
  }

  int distort_regularity() {
    const Group g(resolve_algebra(cfg_.algebra));
    GroupPoint center = g.identity();
    if (regularity_center_gauge_ > 0.0) {
      Rng rng(cfg_.seed);
      center = g.dilate(regularity_center_gauge_, g.random_unit_point(rng));
    }
    const auto r = estimate_regularity(g, center, parse_list(regularity_radii_, "radii"), cfg_.samples, cfg_.seed);
    json body = to_json(r);
    body["center"] = point_json(center);
    emit_report("distort-regularity", body, &g.algebra());
    if (max_q_error_ && std::abs(r.fitted_q - r.homogeneous_dimension) > *max_q_error_) {
      err_ << "check failed: fitted Q " << format_double(r.fitted_q) << " vs " << r.homogeneous_dimension << '\n';
      return kCheckFailed;
    }
    return kOk;
  }

  static GroupPoint detail_box(const Group& g, Rng& rng) { return hlab::detail::uniform_box_point(g, rng, 1.0); }

  static double extended_error(const Group& g, const ExtendedPoint& a, const ExtendedPoint& b) {
    if (a.is_infinite() || b.is_infinite()) return a.is_infinite() == b.is_infinite() ? 0.0 : INFINITY;
    return g.gauge_dist(a.finite(), b.finite());
  }

  std::ostream& out_;
  std::ostream& err_;
  RunConfig cfg_;
  std::function<int()> action_;
  std::string kind_;
  long count_ = 300;
  double radius_ = 1.0;
  std::string input_;
  std::string base_;
  Eigen::Index max_points_ = default_max_chain_points;
  std::string d_in_, d_out_, target_, raw_;
  std::optional<double> max_constant_;
  std::string map_ = "sigma";
  double dilation_ = 2.0;
  double qc_center_gauge_ = 1.0;
  std::string qc_radii_ = "0.1,0.01,0.001";
  double regularity_center_gauge_ = 0.0;
  std::string regularity_radii_ = "0.1,0.2154,0.4642,1,2.154,4.642,10";
  std::optional<double> max_q_error_;
};

}  // namespace detail

/// Runs the command line `args` (without the program name).
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  detail::Runner r(out, err);
  return r.run(args);
}

inline int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args);
}

}  // namespace hlab::cli
