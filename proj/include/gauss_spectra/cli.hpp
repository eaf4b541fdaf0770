#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "io.hpp"
#include "special_fn.hpp"
#include "spectrum.hpp"
#include "transfer_op.hpp"
#include "verify.hpp"

namespace gauss_spectra::cli {

enum ExitCode : int { kSuccess = 0, kVerifyFailed = 1, kUsage = 2, kPartial = 3 };

struct RunConfig {
  std::string command;
  std::string kind;  // spectrum: khintchine | lyapunov
  std::vector<double> t_values{1.0};
  std::vector<double> q_values{0.0};
  int cutoff = 64;
  int collocation_order = 16;
  double tolerance = 1e-10;
  std::string format = "csv";
  std::string output;
  std::uint64_t seed = 0;
  std::optional<double> min, max;
  std::optional<int> count;
  std::string spacing = "linear";
  int jobs = 0;
  bool gnuplot = false;
  bool list = false;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline int resolve_jobs(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("GAUSS_SPECTRA_JOBS")) {
    try {
      const int v = std::stoi(env);
      if (v > 0) return v;
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

inline void validate(const RunConfig& c) {
  if (c.cutoff < 8) throw UsageError("--cutoff must be >= 8");
  if (c.collocation_order < 4) throw UsageError("--collocation-order must be >= 4");
  if (!(c.tolerance > 0.0 && c.tolerance <= 1e-4)) throw UsageError("--tolerance must lie in (0, 1e-4]");
  if (c.count && *c.count < 2) throw UsageError("--count must be >= 2");
  if (c.format != "csv" && c.format != "json") throw UsageError("--format must be csv or json");
  if (c.spacing != "linear" && c.spacing != "log") throw UsageError("--spacing must be linear or log");
  if (c.gnuplot && (c.output.empty() || c.format != "csv"))
    throw UsageError("--gnuplot needs --output with --format csv");
}

inline PressureModel model_of(const RunConfig& c) {
  return PressureModel{Alphabet::full(c.cutoff), Discretization(c.collocation_order), OperatorSettings{}};
}

// Work items evaluated by a pool of `jobs` threads; results kept in input order.
template <class F>
void parallel_for(std::size_t count, int jobs, F&& body) {
  const int workers = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(std::max(1, jobs)), count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) body(i);
    });
  for (auto& th : pool) th.join();
}

inline void emit(const io::Table& table, const RunConfig& c, std::ostream& out) {
  if (c.output.empty()) {
    if (c.format == "json")
      io::write_json(out, table);
    else
      io::write_csv(out, table);
    return;
  }
  std::ofstream file(c.output, std::ios::binary);
  if (!file) throw UsageError("cannot open output file " + c.output);
  if (c.format == "json")
    io::write_json(file, table);
  else
    io::write_csv(file, table);
}

inline std::string num(double v) { return io::format_number(v); }

inline int cmd_pressure(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto model = model_of(c);
  std::vector<PressureParams> grid;
  for (double t : c.t_values)
    for (double q : c.q_values) grid.push_back({t, q});
  for (const auto& p : grid) check_domain(p, model.alphabet, model.settings);

  io::Table table;
  table.metadata = {{"command", "pressure"},
                    {"cutoff", std::to_string(c.cutoff)},
                    {"collocation_order", std::to_string(c.collocation_order)},
                    {"tolerance", num(model.settings.tolerance)}};
  table.columns = {"t", "q", "P", "dP_dt", "dP_dq", "tail_error"};
  table.rows.resize(grid.size());
  std::vector<std::string> errors(grid.size());
  parallel_for(grid.size(), resolve_jobs(c.jobs), [&](std::size_t i) {
    try {
      const auto r = model(grid[i].t, grid[i].q);
      table.rows[i] = {grid[i].t, grid[i].q, r.value, r.dP_dt, r.dP_dq, r.tail_error_bound};
    } catch (const std::exception& e) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      table.rows[i] = {grid[i].t, grid[i].q, nan, nan, nan, nan};
      errors[i] = e.what();
    }
  });
  emit(table, c, out);
  int failed = 0;
  for (const auto& e : errors)
    if (!e.empty()) {
      err << "error: " << e << '\n';
      ++failed;
    }
  return failed ? kPartial : kSuccess;
}

inline std::vector<double> make_grid(double lo, double hi, int count, const std::string& spacing) {
  if (!(hi > lo)) throw UsageError("--max must exceed --min");
  std::vector<double> g(count);
  for (int i = 0; i < count; ++i) {
    const double f = static_cast<double>(i) / (count - 1);
    if (spacing == "log") {
      if (!(lo > 0.0)) throw UsageError("--spacing log needs --min > 0");
      g[i] = std::exp(std::log(lo) + f * (std::log(hi) - std::log(lo)));
    } else {
      g[i] = lo + f * (hi - lo);
    }
  }
  g.front() = lo;
  g.back() = hi;
  return g;
}

inline void write_gnuplot(const RunConfig& c) {
  std::ofstream script(c.output + ".gp");
  if (!script) throw UsageError("cannot write " + c.output + ".gp");
  const bool khintchine = c.kind == "khintchine";
  script << "set datafile separator ','\n"
         << "set key autotitle columnheader\n"
         << "set xlabel '" << (khintchine ? "xi" : "beta") << "'\n"
         << "set ylabel 'dimension'\n"
         << "set yrange [0:1.05]\n"
         << "plot '" << c.output << "' using 1:2 with linespoints title '" << c.kind << " spectrum'\n";
}

inline int cmd_spectrum(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const bool khintchine = c.kind == "khintchine";
  const double lo = c.min.value_or(khintchine ? 0.3 : 1.0);
  const double hi = c.max.value_or(khintchine ? 40.0 : 30.0);
  const int count = c.count.value_or(khintchine ? 60 : 50);
  const auto grid = make_grid(lo, hi, count, c.spacing);
  const auto model = model_of(c);
  SolverConfig solver;
  solver.residual_tolerance = c.tolerance;

  const bool parallel = resolve_jobs(c.jobs) >= 2;
  const auto curve = khintchine ? khintchine_curve(grid, model, solver, parallel)
                                : lyapunov_curve(grid, model, solver, parallel);
  io::Table table = io::curve_table(io::curve_records(curve, grid), {});
  table.metadata = {{"command", "spectrum"}, {"kind", c.kind}};
  for (const auto& kv : curve.metadata) table.metadata.push_back(kv);
  table.metadata.push_back({"grid", num(lo) + ".." + num(hi) + " count " + std::to_string(count) + " " + c.spacing});

  table.trailer.push_back({"solved_points", std::to_string(curve.points.size()) + "/" + std::to_string(grid.size())});
  try {
    const auto r = spectrum_shape_report(curve);
    table.trailer.push_back({"shape.peak_exponent", num(r.peak_exponent)});
    table.trailer.push_back({"shape.peak_dimension", num(r.peak_dimension)});
    table.trailer.push_back({"shape.slope_sign_changes", std::to_string(r.slope_sign_changes)});
    table.trailer.push_back({"shape.curvature_at_peak", num(r.curvature_at_peak)});
    table.trailer.push_back(
        {"shape.convexity_witness",
         r.convexity_witness ? num(r.convexity_witness->first) + ".." + num(r.convexity_witness->second) : "none"});
    table.trailer.push_back({"shape.q_sign_changes", std::to_string(r.q_sign_changes)});
    table.trailer.push_back({"shape.q_changes_at_peak", r.q_changes_at_peak() ? "yes" : "no"});
  } catch (const domain_error& e) {
    table.trailer.push_back({"shape", std::string("unavailable: ") + e.what()});
  }
  emit(table, c, out);
  if (c.gnuplot) write_gnuplot(c);
  for (const auto& f : curve.failures) err << "point " << num(f.exponent) << " failed: " << f.message << '\n';
  return 10 * curve.points.size() >= 9 * grid.size() ? kSuccess : kPartial;
}

inline int cmd_constants(const RunConfig& c, std::ostream& out) {
  struct Row {
    std::string name;
    double value;
    std::string method;
    std::string reference;
  };
  const auto series = khintchine_series();
  const auto& k = constants();
  const double dim_e2 = bounded_digit_dimension({1, 2}, Discretization(c.collocation_order));
  const std::vector<Row> rows = {
      {"xi0", series.value, "int log a1 dmu_G; series to n = 2000 plus Euler-Maclaurin tail", "0.98784905683"},
      {"K0", std::exp(series.value), "exp(xi0), geometric mean of partial quotients", "2.6854..."},
      {"lambda0", k.lambda0, "pi^2 / (6 log 2)", "2.37314..."},
      {"gamma0", k.gamma0, "2 log((1 + sqrt 5) / 2)", "0.96242365"},
      {"dimE2", dim_e2,
       "zero of t -> P(t,0) over digits {1,2}, collocation order " + std::to_string(c.collocation_order),
       "0.531280506277205141624..."},
  };
  std::ostringstream text;
  if (c.format == "json") {
    nlohmann::ordered_json doc;
    doc["metadata"] = {{"command", "constants"}, {"collocation_order", std::to_string(c.collocation_order)}};
    doc["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : rows)
      doc["rows"].push_back({{"name", r.name}, {"value", r.value}, {"method", r.method}, {"reference", r.reference}});
    text << doc.dump(2) << '\n';
  } else {
    text << "# command=constants\n# collocation_order=" << c.collocation_order << "\nname,value,method,reference\n";
    for (const auto& r : rows) text << r.name << ',' << num(r.value) << ",\"" << r.method << "\"," << r.reference << '\n';
  }
  if (c.output.empty()) {
    out << text.str();
  } else {
    std::ofstream file(c.output, std::ios::binary);
    if (!file) throw UsageError("cannot open output file " + c.output);
    file << text.str();
  }
  return kSuccess;
}

inline int cmd_verify(const RunConfig& c, std::ostream& out) {
  const auto& list = verify::criteria();
  if (c.list) {
    for (const auto& cr : list) out << cr.id << ". " << cr.name << " (limit " << cr.time_limit_seconds << " s)\n";
    return kSuccess;
  }
  verify::VerifyConfig vc;
  vc.cutoff = c.cutoff;
  vc.collocation_order = c.collocation_order;
  vc.tolerance = c.tolerance;
  vc.seed = c.seed;
  int passed = 0;
  for (const auto& cr : list) {
    const auto r = verify::run(cr, vc);
    out << verify::format(r) << '\n' << std::flush;
    passed += r.passed;
  }
  out << passed << "/" << list.size() << " criteria passed\n";
  return passed == static_cast<int>(list.size()) ? kSuccess : kVerifyFailed;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  RunConfig c;
  CLI::App app{"Pressure and dimension spectra of the Gauss continued-fraction map"};
  app.require_subcommand(1);

  const auto common = [&](CLI::App* sub) {
    sub->add_option("--cutoff", c.cutoff, "explicit digit cutoff M (>= 8)")->capture_default_str();
    sub->add_option("--collocation-order", c.collocation_order, "collocation nodes K (>= 4)")->capture_default_str();
    sub->add_option("--tolerance", c.tolerance, "spectrum residual tolerance, in (0, 1e-4]")->capture_default_str();
    sub->add_option("--format", c.format, "csv or json")->capture_default_str();
    sub->add_option("--output", c.output, "output file (default stdout)");
    sub->add_option("--seed", c.seed, "random seed")->capture_default_str();
    sub->add_option("--jobs", c.jobs, "worker threads (default GAUSS_SPECTRA_JOBS or all cores)");
  };

  auto* pressure_cmd = app.add_subcommand("pressure", "P(t,q) and its derivatives on a (t,q) grid");
  common(pressure_cmd);
  pressure_cmd->add_option("--t", c.t_values, "t values (comma separated)")->delimiter(',');
  pressure_cmd->add_option("--q", c.q_values, "q values (comma separated)")->delimiter(',');

  auto* spectrum_cmd = app.add_subcommand("spectrum", "Khintchine or Lyapunov spectrum on a grid");
  common(spectrum_cmd);
  spectrum_cmd->add_option("kind", c.kind, "khintchine or lyapunov")
      ->required()
      ->check(CLI::IsMember({"khintchine", "lyapunov"}));
  double min = 0.0, max = 0.0;
  int count = 0;
  auto* min_opt = spectrum_cmd->add_option("--min", min, "smallest exponent");
  auto* max_opt = spectrum_cmd->add_option("--max", max, "largest exponent");
  auto* count_opt = spectrum_cmd->add_option("--count", count, "grid points (>= 2)");
  spectrum_cmd->add_option("--spacing", c.spacing, "linear or log")->capture_default_str();
  spectrum_cmd->add_flag("--gnuplot", c.gnuplot, "also write <output>.gp");

  auto* constants_cmd = app.add_subcommand("constants", "xi0, lambda0, gamma0 and dim E2");
  common(constants_cmd);

  auto* verify_cmd = app.add_subcommand("verify", "run the acceptance criteria");
  common(verify_cmd);
  verify_cmd->add_flag("--list", c.list, "list the criteria without running them");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsage;
  }
  if (*min_opt) c.min = min;
  if (*max_opt) c.max = max;
  if (*count_opt) c.count = count;

  try {
    validate(c);
    if (*pressure_cmd) return cmd_pressure(c, out, err);
    if (*spectrum_cmd) {
      c.command = "spectrum";
      return cmd_spectrum(c, out, err);
    }
    if (*constants_cmd) return cmd_constants(c, out);
    return cmd_verify(c, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const domain_error& e) {
    err << "domain error: " << e.what() << '\n';
    return kUsage;
  } catch (const window_error& e) {
    err << "window error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kPartial;
  }
}

}  // namespace gauss_spectra::cli
