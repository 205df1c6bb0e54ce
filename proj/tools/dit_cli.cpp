// dit-cli: traces, maxima tables, visibility scans and Winter-model runs as CSV.
// Exit codes: 0 success, 2 invalid input, 3 numeric failure.

#include <CLI11.hpp>
#include <fmt/core.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli_support.hpp"
#include "dit/decomposition.hpp"
#include "dit/dit_analysis.hpp"
#include "dit/faddeeva.hpp"
#include "dit/kernels.hpp"
#include "dit/source_model.hpp"
#include "dit/winter_model.hpp"

namespace {

using namespace dit;
using namespace dit::cli;
using Meta = std::vector<std::pair<std::string, std::string>>;

constexpr const char* kVersion = "1.0.0";

struct Common {
  std::string out;
  std::string meta;
  std::string plot;
};

void add_common(CLI::App* sub, Common& c, const std::string& default_out) {
  c.out = default_out;
  sub->add_option("--out,-o", c.out, "Output file, - for stdout")->capture_default_str()->envname(env_name("out"));
  sub->add_option("--meta", c.meta, "Metadata sidecar (default: <out>.meta)")->envname(env_name("meta"));
  sub->add_option("--plot", c.plot, "Also write an SVG plot here")->envname(env_name("plot"));
}

std::string meta_path(const Common& c, const std::string& sub) {
  if (!c.meta.empty()) return c.meta;
  return c.out == "-" ? sub + ".meta" : c.out + ".meta";
}

// Resolved options of `sub`, defaults included, one key=value per line.
Meta resolved(const CLI::App* sub, int threads) {
  Meta m{{"program", "dit-cli"}, {"version", kVersion}, {"subcommand", sub->get_name()},
         {"threads", std::to_string(threads)}, {"threads_used", std::to_string(max_threads())}};
  std::istringstream is(sub->config_to_str(true, false));
  std::string line;
  while (std::getline(is, line)) {
    const auto eq = line.find('=');
    if (line.empty() || line[0] == '[' || line[0] == '#' || eq == std::string::npos) continue;
    m.emplace_back(line.substr(0, eq), line.substr(eq + 1));
  }
  return m;
}

void warn(const std::string& msg) { fmt::print(stderr, "warning: {}\n", msg); }

// ---------------------------------------------------------------- trace

struct TraceArgs {
  double k0I = -0.0015;
  double x = 1000.0;
  std::string t = "100:1200:0.2";
  bool normalized = false;
  Common common;
};

const std::vector<std::string> kTraceHeader = {"t",       "density_exact", "flux",         "density_approx",
                                                "saddle_sq", "pole_sq",     "interference", "pole_active"};

void cmd_trace(const TraceArgs& a, const CLI::App* sub, int threads) {
  const Carrier c = make_carrier(a.k0I);
  if (!std::isfinite(a.x) || a.x < 0.0) throw ValidationError("x: must be finite and >= 0");
  const auto t = parse_grid(a.t, "t");
  validate_time_grid(t);
  const double scale = a.normalized ? 1.0 / norm_constant(c) : 1.0;

  const auto rows = parallel::trace_rows(c, a.x, t, scale);
  std::size_t singular = 0;
  CsvWriter csv(a.common.out, kTraceHeader);
  for (const auto& r : rows) {
    if (r.near_singular) {
      if (singular == 0) warn(fmt::format("t = {} sits on the saddle-pole singularity; decomposition columns are nan", r.t));
      ++singular;
    }
    csv.row({r.t, r.density_exact, r.flux, r.density_approx, r.saddle_sq, r.pole_sq, r.interference,
             r.pole_active ? 1.0 : 0.0});
  }
  if (singular > 1) warn(fmt::format("{} rows near the singularity", singular));

  Meta m = resolved(sub, threads);
  m.emplace_back("rows", std::to_string(rows.size()));
  m.emplace_back("norm_constant", a.normalized ? fmt_double(1.0 / scale) : "none");
  m.emplace_back("near_singular_rows", std::to_string(singular));
  write_meta(meta_path(a.common, "trace"), m);

  if (!a.common.plot.empty()) {
    Series exact{"exact", t, {}, "black"}, approx{"saddle + pole", t, {}, "red"};
    for (const auto& r : rows) {
      exact.y.push_back(r.density_exact);
      approx.y.push_back(r.density_approx);
    }
    write_line_svg(a.common.plot, fmt::format("density at x = {}, k0I = {}", a.x, a.k0I), "t",
                   a.normalized ? "normalized density" : "density", {exact, approx}, false);
  }
}

// ---------------------------------------------------------------- maxima

struct MaximaArgs {
  double k0I = -0.0015;
  double x = 1000.0;
  int n_max = 15;
  std::string window;
  Common common;
};

void cmd_maxima(const MaximaArgs& a, const CLI::App* sub, int threads) {
  const Carrier c = make_carrier(a.k0I);
  if (!std::isfinite(a.x) || a.x < 0.0) throw ValidationError("x: must be finite and >= 0");
  if (a.n_max < 0) throw ValidationError("n-max: must be >= 0");
  TimeWindow w = maxima_window(c, a.x, a.n_max);
  if (!a.window.empty()) {
    const auto [b, e] = parse_window(a.window, "window");
    w = {b, e};
  }
  const auto rows = maxima_table(c, a.x, w, a.n_max);
  CsvWriter csv(a.common.out, {"n", "T_pred", "T_meas", "interval_pred", "interval_meas", "rel_err"});
  for (const auto& r : rows) {
    csv.row({double(r.n), r.t_predicted, r.t_measured, r.interval_predicted, r.interval_measured,
             std::abs(r.interval_measured - r.interval_predicted) / r.interval_predicted});
  }
  Meta m = resolved(sub, threads);
  m.emplace_back("window_begin", fmt_double(w.begin));
  m.emplace_back("window_end", fmt_double(w.end));
  m.emplace_back("rows", std::to_string(rows.size()));
  m.emplace_back("period", fmt_double(c.period()));
  write_meta(meta_path(a.common, "maxima"), m);

  if (!a.common.plot.empty()) {
    Series pred{"predicted", {}, {}, "black"}, meas{"measured", {}, {}, "red"};
    for (const auto& r : rows) {
      pred.x.push_back(r.n);
      pred.y.push_back(r.interval_predicted);
      meas.x.push_back(r.n);
      meas.y.push_back(r.interval_measured);
    }
    write_line_svg(a.common.plot, "intervals between maxima", "n", "T(n+1) - T(n)", {pred, meas}, false);
  }
}

// ---------------------------------------------------------------- visibility

struct VisibilityArgs {
  std::string k0I_grid = "-0.1:-0.005:0.005";
  std::string x_grid = "10:200:10";
  Common common;
};

void cmd_visibility(const VisibilityArgs& a, const CLI::App* sub, int threads) {
  const auto ks = parse_grid(a.k0I_grid, "k0I-grid");
  const auto xs = parse_grid(a.x_grid, "x-grid");
  const auto scan = visibility_scan(ks, xs);
  CsvWriter csv(a.common.out, {"k0I", "x", "delta", "t_max1", "t_min", "t_max2", "maxima_found", "ok"});
  std::size_t failed = 0;
  for (const auto& p : scan.surface) {
    if (p.error) {
      if (failed == 0) warn(fmt::format("k0I = {}, x = {}: {}", p.k0I, p.x, *p.error));
      ++failed;
    }
    csv.row({p.k0I, p.x, p.delta, p.t_max1, p.t_min, p.t_max2, double(p.maxima_found), p.error ? 0.0 : 1.0});
  }
  if (failed > 1) warn(fmt::format("{} grid points failed", failed));
  fmt::print(stderr, "best k0I={} x={} delta={}\n", fmt_double(scan.best.k0I), fmt_double(scan.best.x),
             fmt_double(scan.best.delta));

  Meta m = resolved(sub, threads);
  m.emplace_back("best_k0I", fmt_double(scan.best.k0I));
  m.emplace_back("best_x", fmt_double(scan.best.x));
  m.emplace_back("best_delta", fmt_double(scan.best.delta));
  m.emplace_back("failed_points", std::to_string(failed));
  write_meta(meta_path(a.common, "visibility"), m);

  if (!a.common.plot.empty()) {
    std::vector<double> d;
    for (const auto& p : scan.surface) d.push_back(p.delta);
    write_heatmap_svg(a.common.plot, "visibility", xs, ks, d);
  }
}

// ---------------------------------------------------------------- winter

struct WinterArgs {
  WinterConfig cfg;
  std::string wall = "infinite";
  int cells = 200;
  int refine = 1;
  std::string fit_window;
  bool no_fit = false;
  Common common;
};

void cmd_winter(WinterArgs a, const CLI::App* sub, int threads) {
  if (a.wall == "finite") a.cfg.wall = WallKind::Finite;
  else if (a.wall != "infinite") throw ValidationError("wall: expected 'infinite' or 'finite'");
  if (a.cells < 20) throw ValidationError("cells: need at least 20 cells across the well");
  if (a.refine < 1) throw ValidationError("refine: must be >= 1");
  a.cfg.dx = a.cfg.L / a.cells;
  const WinterConfig cfg = a.cfg.refined(a.refine);
  validate(cfg);
  TimeWindow window = resonance_window(cfg.x_obs, cfg.t_max);
  if (!a.fit_window.empty()) {
    const auto [b, e] = parse_window(a.fit_window, "fit-window");
    window = {b, e};
  }

  const auto tr = run_winter(cfg);
  if (tr.contaminated) warn(fmt::format("absorber leak {:.3g}: end-wall reflections may reach the trace", tr.leak));

  std::optional<SourceFit> fit;
  if (!a.no_fit) {
    try {
      fit = fit_source_model(tr, window);
    } catch (const ConvergenceError& e) {
      warn(fmt::format("source-model fit skipped: {}", e.what()));
    }
  }

  const double nan = std::nan("");
  CsvWriter csv(a.common.out, kTraceHeader);
  std::vector<double> overlay;
  for (std::size_t i = 0; i < tr.t.size(); ++i) {
    double model = nan, saddle = nan, pole = nan, inter = nan, active = nan;
    if (fit) {
      const Carrier unit = make_carrier(fit->k0I / fit->k0R);
      const auto p = make_point(unit, fit->k0R * cfg.x_obs, fit->k0R * fit->k0R * tr.t[i]);
      model = fit->scale * sample(unit, p).density;
      if (!saddle_near_singular(unit, p)) {
        const auto d = approx_density(unit, p);
        saddle = fit->scale * std::norm(d.saddle);
        pole = fit->scale * std::norm(d.pole);
        inter = fit->scale * d.interference;
        active = d.pole_active ? 1.0 : 0.0;
      }
    }
    overlay.push_back(model);
    csv.row({tr.t[i], tr.density[i], tr.flux[i], model, saddle, pole, inter, active});
  }

  Meta m = resolved(sub, threads);
  m.emplace_back("dx", fmt_double(cfg.dx));
  m.emplace_back("dt", fmt_double(cfg.dt));
  m.emplace_back("x_max", fmt_double(cfg.x_max()));
  m.emplace_back("norm_final", fmt_double(tr.norm_final));
  m.emplace_back("absorbed", fmt_double(tr.absorbed));
  m.emplace_back("max_norm_drift", fmt_double(tr.max_norm_drift));
  m.emplace_back("absorber_leak", fmt_double(tr.leak));
  m.emplace_back("fit_window", fmt::format("{}:{}", fmt_double(window.begin), fmt_double(window.end)));
  if (fit) {
    m.emplace_back("fit_k0R", fmt_double(fit->k0R));
    m.emplace_back("fit_k0I", fmt_double(fit->k0I));
    m.emplace_back("fit_scale", fmt_double(fit->scale));
    m.emplace_back("fit_residual", fmt_double(fit->residual));
    fmt::print(stderr, "fit k0R={} k0I={} residual={}\n", fmt_double(fit->k0R), fmt_double(fit->k0I),
               fmt_double(fit->residual));
  }
  write_meta(meta_path(a.common, "winter"), m);

  if (!a.common.plot.empty()) {
    std::vector<Series> s{{"Winter", tr.t, tr.density, "black"}};
    if (fit) s.push_back({"source model", tr.t, overlay, "red"});
    write_line_svg(a.common.plot, fmt::format("density at x = {}, U = {}", cfg.x_obs, cfg.U), "t", "density", s, true);
  }
}

// ---------------------------------------------------------------- faddeeva-check

struct FaddeevaArgs {
  std::string table;
  int fuzz = 10000;
  unsigned seed = 1;
  double tol = 1e-12;
  Common common;
};

double parse_field(const std::string& s, int row) {
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  // overflowing reference values (e.g. 1e+900) mark expected overflow
  if (end == begin || *end != '\0' || std::isnan(v)) {
    throw ValidationError(fmt::format("oracle table row {}: '{}' is not a number", row, s));
  }
  return v;
}

bool cmd_faddeeva_check(const FaddeevaArgs& a, const CLI::App* sub, int threads) {
  if (a.fuzz < 0) throw ValidationError("fuzz: must be >= 0");
  std::ifstream in(a.table);
  if (!in) throw ValidationError(fmt::format("table: cannot open '{}'", a.table));

  struct Row {
    Complex z, w;
    bool overflow;
  };
  std::vector<Row> rows;
  std::string line;
  for (int n = 1; std::getline(in, line); ++n) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream is(line);
    std::vector<std::string> f;
    for (std::string tok; is >> tok;) f.push_back(tok);
    if (f.size() != 4) throw ValidationError(fmt::format("oracle table row {}: expected 4 fields, got {}", n, f.size()));
    const double v[4] = {parse_field(f[0], n), parse_field(f[1], n), parse_field(f[2], n), parse_field(f[3], n)};
    if (!std::isfinite(v[0]) || !std::isfinite(v[1])) {
      throw ValidationError(fmt::format("oracle table row {}: z must be finite", n));
    }
    rows.push_back({{v[0], v[1]}, {v[2], v[3]}, !std::isfinite(v[2]) || !std::isfinite(v[3])});
  }
  if (rows.empty()) throw ValidationError("table: no data rows");

  double worst = 0.0;
  Complex worst_z;
  int overflow_rows = 0, mismatches = 0;
  for (const auto& r : rows) {
    try {
      const Complex w = wofz(r.z);
      if (r.overflow) {
        ++mismatches;
        continue;
      }
      const double e = std::abs(w - r.w) / std::abs(r.w);
      if (e > worst) {
        worst = e;
        worst_z = r.z;
      }
    } catch (const FaddeevaOverflow&) {
      r.overflow ? ++overflow_rows : ++mismatches;
    }
  }

  std::mt19937_64 rng(a.seed);
  std::uniform_real_distribution<double> radius(0.0, 20.0), angle(0.0, 2.0 * std::numbers::pi);
  int checked = 0, fuzz_failures = 0;
  for (int i = 0; i < a.fuzz; ++i) {
    // reflection w(-z) = 2 exp(-z^2) - w(z) is checked from the upper half-plane
    const Complex z0 = std::polar(radius(rng), angle(rng));
    const Complex z = z0.imag() >= 0.0 ? z0 : -z0;
    Complex wz, wm, e;
    try {
      wz = wofz(z);
      wm = wofz(-z);
      e = exp_neg_square(z);
    } catch (const FaddeevaOverflow&) {
      continue;
    }
    ++checked;
    const bool reflect = std::abs(wm - (2.0 * e - wz)) <= a.tol * std::abs(wm) + 1e-300;
    const bool conj = std::abs(wofz(std::conj(-z)) - std::conj(wz)) <= a.tol * std::abs(wz);
    if (!reflect || !conj) ++fuzz_failures;
  }

  const bool pass = worst <= a.tol && mismatches == 0 && fuzz_failures == 0;
  Meta results{{"rows", std::to_string(rows.size())},
               {"max_rel_err", fmt_double(worst)},
               {"worst_z", fmt::format("{} {}", fmt_double(worst_z.real()), fmt_double(worst_z.imag()))},
               {"overflow_rows", std::to_string(overflow_rows)},
               {"overflow_mismatches", std::to_string(mismatches)},
               {"fuzz_checked", std::to_string(checked)},
               {"fuzz_failures", std::to_string(fuzz_failures)},
               {"result", pass ? "PASS" : "FAIL"}};
  std::FILE* out = a.common.out == "-" ? stdout : std::fopen(a.common.out.c_str(), "wb");
  if (out == nullptr) throw ValidationError(fmt::format("cannot open output '{}'", a.common.out));
  for (const auto& [k, v] : results) fmt::print(out, "{}={}\n", k, v);
  if (out != stdout) std::fclose(out);

  Meta m = resolved(sub, threads);
  m.insert(m.end(), results.begin(), results.end());
  write_meta(meta_path(a.common, "faddeeva-check"), m);
  return pass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Diffraction in time from a decaying source: exact traces, maxima, visibility and Winter's model"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();
  int threads = 0;
  std::string config;
  app.add_option("--threads", threads, "Cap on OpenMP threads (0 = runtime default)")
      ->envname(env_name("threads"))
      ->check(CLI::NonNegativeNumber);
  app.add_option("--config", config, "Flat key=value file of option defaults")->envname("DIT_CONFIG");

  TraceArgs ta;
  auto* trace = app.add_subcommand("trace", "Exact density, flux and saddle/pole decomposition at fixed x");
  trace->add_option("--k0I", ta.k0I, "Imaginary part of k0 (-1 < k0I <= 0)")->capture_default_str()->envname(env_name("k0I"));
  trace->add_option("--x", ta.x, "Observation point")->capture_default_str()->envname(env_name("x"));
  trace->add_option("--t", ta.t, "Time grid start:stop:step")->capture_default_str()->envname(env_name("t"));
  trace->add_flag("--normalized", ta.normalized, "Divide by the one-particle norm")->envname(env_name("normalized"));
  add_common(trace, ta.common, "trace.csv");

  MaximaArgs ma;
  auto* maxima = app.add_subcommand("maxima", "Measured vs predicted times and intervals of density maxima");
  maxima->add_option("--k0I", ma.k0I, "Imaginary part of k0")->capture_default_str()->envname(env_name("k0I"));
  maxima->add_option("--x", ma.x, "Observation point")->capture_default_str()->envname(env_name("x"));
  maxima->add_option("--n-max", ma.n_max, "Largest maximum index")->capture_default_str()->envname(env_name("n-max"));
  maxima->add_option("--window", ma.window, "Search window begin:end (default: wide enough for n-max)")
      ->envname(env_name("window"));
  add_common(maxima, ma.common, "maxima.csv");

  VisibilityArgs va;
  auto* vis = app.add_subcommand("visibility", "Visibility Delta over a (k0I, x) grid and its argmax");
  vis->add_option("--k0I-grid", va.k0I_grid, "k0I grid start:stop:step")->capture_default_str()->envname(env_name("k0I-grid"));
  vis->add_option("--x-grid", va.x_grid, "x grid start:stop:step")->capture_default_str()->envname(env_name("x-grid"));
  add_common(vis, va.common, "visibility.csv");

  WinterArgs wa;
  auto* winter = app.add_subcommand("winter", "Decay through a delta barrier, with a fitted source-model overlay");
  winter->add_option("--U", wa.cfg.U, "Barrier strength")->capture_default_str()->envname(env_name("U"));
  winter->add_option("--wall", wa.wall, "Initial state: infinite or finite")->capture_default_str()->envname(env_name("wall"));
  winter->add_option("--V", wa.cfg.V, "Right-wall height of the finite initial well")->capture_default_str()->envname(env_name("V"));
  winter->add_option("--L", wa.cfg.L, "Well width")->capture_default_str()->envname(env_name("L"));
  winter->add_option("--x-obs", wa.cfg.x_obs, "Observation point")->capture_default_str()->envname(env_name("x-obs"));
  winter->add_option("--cells", wa.cells, "Grid cells across the well (dx = L / cells)")->capture_default_str()->envname(env_name("cells"));
  winter->add_option("--dt", wa.cfg.dt, "Time step")->capture_default_str()->envname(env_name("dt"));
  winter->add_option("--t-max", wa.cfg.t_max, "Final time")->capture_default_str()->envname(env_name("t-max"));
  winter->add_option("--margin", wa.cfg.margin, "Distance from x-obs to the absorber")->capture_default_str()->envname(env_name("margin"));
  winter->add_option("--absorber-width", wa.cfg.absorber_width, "Absorber width")->capture_default_str()->envname(env_name("absorber-width"));
  winter->add_option("--absorber-strength", wa.cfg.absorber_strength, "Absorber peak strength")
      ->capture_default_str()
      ->envname(env_name("absorber-strength"));
  winter->add_option("--record", wa.cfg.record_interval, "Output sampling interval")->capture_default_str()->envname(env_name("record"));
  winter->add_option("--refine", wa.refine, "Divide dx and dt by this factor")->capture_default_str()->envname(env_name("refine"));
  winter->add_option("--fit-window", wa.fit_window, "Fit window begin:end (default: [0.75 x-obs, t-max])")
      ->envname(env_name("fit-window"));
  winter->add_flag("--no-fit", wa.no_fit, "Skip the source-model fit")->envname(env_name("no-fit"));
  add_common(winter, wa.common, "winter.csv");

  FaddeevaArgs fa;
  auto* fad = app.add_subcommand("faddeeva-check", "Compare w(z) with an oracle table and fuzz its identities");
  fad->add_option("--table", fa.table, "Oracle table: re_z im_z re_w im_w per line")->required()->envname(env_name("table"));
  fad->add_option("--fuzz", fa.fuzz, "Random identity samples")->capture_default_str()->envname(env_name("fuzz"));
  fad->add_option("--seed", fa.seed, "Fuzz seed")->capture_default_str()->envname(env_name("seed"));
  fad->add_option("--tol", fa.tol, "Relative tolerance")->capture_default_str()->envname(env_name("tol"));
  add_common(fad, fa.common, "-");

  try {
    std::vector<std::string> args(argv, argv + argc);
    args = merge_config(args, {"trace", "maxima", "visibility", "winter", "faddeeva-check"});
    std::vector<const char*> cargs;
    for (const auto& s : args) cargs.push_back(s.c_str());
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const ValidationError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 2;
  }

  try {
    set_max_threads(threads);
    if (*trace) cmd_trace(ta, trace, threads);
    else if (*maxima) cmd_maxima(ma, maxima, threads);
    else if (*vis) cmd_visibility(va, vis, threads);
    else if (*winter) cmd_winter(wa, winter, threads);
    else if (*fad && !cmd_faddeeva_check(fa, fad, threads)) {
      fmt::print(stderr, "error: w(z) check failed\n");
      return 3;
    }
  } catch (const ValidationError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 3;
  }
  return 0;
}
