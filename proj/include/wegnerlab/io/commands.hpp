#pragma once

/// Subcommand drivers: each turns a RunConfig into a ResultBundle of tables,
/// structured results and plots, written to an output directory.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wegnerlab/analysis.hpp"
#include "wegnerlab/ensemble.hpp"
#include "wegnerlab/io/config.hpp"
#include "wegnerlab/io/csv.hpp"
#include "wegnerlab/io/manifest.hpp"
#include "wegnerlab/io/svg.hpp"
#include "wegnerlab/verify.hpp"

namespace wegnerlab::io {

struct ResultBundle {
  std::string command;
  RunManifest manifest;
  json config;
  std::vector<Table> tables;
  json results = json::object();
  std::vector<std::pair<std::string, std::string>> plots;  // file name, SVG text
  std::string report;                                       // human-readable summary
  int status = 0;                                           // 0 ok, 1 verification failure
};

inline ResultBundle start_bundle(const RunConfig& config, const std::string& command_line) {
  ResultBundle b;
  b.command = config.command;
  b.config = effective_config(config);
  b.manifest.config_digest = config_digest(b.config);
  b.manifest.master_seed = config.seed;
  b.manifest.timestamp = utc_timestamp();
  b.manifest.command_line = command_line;
  return b;
}

/// Writes <table>.csv, <command>.json, the SVGs, <command>.txt and
/// manifest.json. Everything except manifest.json is a pure function of the
/// effective configuration.
inline void write_bundle(const ResultBundle& b, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const std::string& name) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
    return f;
  };
  for (const auto& t : b.tables) {
    auto f = open(t.name + ".csv");
    write_csv(f, t, b.manifest.config_digest);
  }
  json doc = b.results;
  doc["manifest"] = b.manifest.stable_json();
  doc["config"] = b.config;
  open(b.command + ".json") << doc.dump(2) << '\n';
  for (const auto& [name, svg] : b.plots) open(name) << svg;
  open(b.command + ".txt") << b.report;
  json manifest = b.manifest.to_json();
  manifest["config"] = b.config;
  open("manifest.json") << manifest.dump(2) << '\n';
}

inline unsigned resolve_workers(const RunConfig& c) {
  return c.workers > 0 ? c.workers : default_worker_count();
}

inline EnsembleConfig ensemble_for(const RunConfig& c, int box_length) {
  EnsembleConfig e;
  e.master_seed = c.seed;
  e.realizations = c.realizations;
  e.model = c.model;
  e.grid = c.grid;
  e.grid.box_length = box_length;
  return e;
}

/// Averaged IDS per configured box length.
inline ResultBundle cmd_ids(RunConfig config, const std::string& command_line = {}) {
  config.command = "ids";
  auto b = start_bundle(config, command_line);
  const unsigned workers = resolve_workers(config);
  const auto energies = linspace(config.ids.energy_min, config.ids.energy_max, config.ids.points);

  Table table{"ids", {"l", "E", "N", "stderr"}, {}};
  Plot plot{"Integrated density of states", "E", "N(E)", false, false, {}};
  json curves = json::array();
  std::ostringstream report;
  for (int l : config.lengths) {
    const auto curve = averaged_ids(ensemble_for(config, l), energies, workers);
    for (std::size_t i = 0; i < energies.size(); ++i)
      table.add({std::int64_t{l}, energies[i], curve.values[i], curve.standard_error[i]});
    plot.series.push_back({"l = " + std::to_string(l), energies, curve.values, curve.standard_error, false});
    const auto lip = lipschitz_modulus(curve);
    curves.push_back({{"l", l},
                      {"realizations", curve.realizations},
                      {"seeds_digest", seeds_digest(config.seed, curve.realizations)},
                      {"N_at_energy_max", curve.values.back()},
                      {"lipschitz_modulus", lip.value},
                      {"lipschitz_window", {lip.energy_lo, lip.energy_hi}}});
    report << "l=" << l << " N(" << format_number(energies.back()) << ")=" << format_number(curve.values.back())
           << " lipschitz=" << format_number(lip.value) << '\n';
  }
  b.results["ids"] = curves;
  b.tables.push_back(std::move(table));
  b.plots.emplace_back("ids.svg", render_svg(plot));
  b.report = report.str();
  return b;
}

/// Wegner statistic over (eps, l) at the configured energy.
inline ResultBundle cmd_wegner(RunConfig config, const std::string& command_line = {}) {
  config.command = "wegner";
  auto b = start_bundle(config, command_line);
  const auto& w = config.wegner;
  const auto stat = wegner_statistic(ensemble_for(config, w.lengths.front()), w.energy, w.widths,
                                     w.lengths, resolve_workers(config));

  Table table{"wegner",
              {"E", "eps", "l", "mean", "stderr", "C_hat", "C_hat_stderr", "hit_probability",
               "hit_stderr", "slope", "R2"},
              {}};
  Plot plot{"Mean eigenvalue count in [E - eps, E)", "eps", "mean trace", true, true, {}};
  double c_min = std::numeric_limits<double>::infinity(), c_max = 0.0;
  json per_length = json::array();
  std::ostringstream report;
  for (std::size_t li = 0; li < w.lengths.size(); ++li) {
    for (std::size_t i = 0; i < w.widths.size(); ++i) {
      table.add({w.energy, w.widths[i], std::int64_t{w.lengths[li]}, stat.mean[li][i],
                 stat.standard_error[li][i], stat.c_hat[li][i], stat.c_hat_error[li][i],
                 stat.hit_probability[li][i], stat.hit_error[li][i], stat.slope[li], stat.r_squared[li]});
      if (std::isfinite(stat.c_hat[li][i])) {
        c_min = std::min(c_min, stat.c_hat[li][i]);
        c_max = std::max(c_max, stat.c_hat[li][i]);
      }
    }
    plot.series.push_back({"l = " + std::to_string(w.lengths[li]), w.widths, stat.mean[li],
                           stat.standard_error[li], true});
    per_length.push_back({{"l", w.lengths[li]},
                          {"slope", stat.slope[li]},
                          {"r_squared", stat.r_squared[li]},
                          {"dimension", stat.dimension[li]},
                          {"seeds_digest", stat.seeds_digest[li]}});
    report << "l=" << w.lengths[li] << " slope=" << format_number(stat.slope[li])
           << " R2=" << format_number(stat.r_squared[li]) << '\n';
  }
  const double ratio = c_min > 0.0 ? c_max / c_min : std::numeric_limits<double>::infinity();
  report << "C_hat range [" << format_number(c_min) << ", " << format_number(c_max)
         << "] ratio=" << format_number(ratio) << '\n';
  b.results["wegner"] = {{"energy", w.energy},
                         {"realizations", config.realizations},
                         {"lengths", per_length},
                         {"c_hat_min", c_min},
                         {"c_hat_max", c_max},
                         {"c_hat_ratio", ratio}};
  b.tables.push_back(std::move(table));
  b.plots.emplace_back("wegner.svg", render_svg(plot));
  b.report = report.str();
  return b;
}

/// Per-length outcome of the Eder / window-ratio sweep.
struct LengthSweep {
  int box_length = 0;
  std::size_t eigenvalues = 0;
  double min_derivative_sum = std::numeric_limits<double>::infinity();
  double min_window_mass = std::numeric_limits<double>::infinity();
  double min_ratio = std::numeric_limits<double>::infinity();
  std::size_t ratio_cases = 0;
  std::size_t vacuous = 0;
};

/// Eder chain and window ratios for `realizations` draws at one length.
inline LengthSweep eder_sweep(const RunConfig& config, int l, VerificationReport& eder,
                              VerificationReport& uc, unsigned workers) {
  const auto& vs = config.verify;
  EnsembleConfig e = ensemble_for(config, l);
  e.grid.bc = Boundary::dirichlet;
  e.realizations = vs.eder_realizations;
  struct Outcome {
    EderResult eder;
    VerificationReport uc;
  };
  const auto outcomes = parallel_map<Outcome>(vs.eder_realizations, workers, [&](std::size_t r) {
    const auto realization = ensemble_realization(e, r);
    Outcome out;
    out.eder = eder_lower_bound(config.model, realization, e.grid,
                                {vs.window_lo, vs.window_hi, true, true});
    out.uc.check = "unique_continuation";
    const auto op = assemble(config.model, realization, e.grid);
    const auto box = box_bounds(config.model, e.grid);
    const auto sites = box_sites(config.model, l);
    for (const auto& c : out.eder.cases) {
      const auto pair = eigenpair(op, c.energy);
      for (long k = sites.first; k <= sites.last; ++k) {
        const double kk = static_cast<double>(k);
        if (kk - 0.5 < box.first - 1e-12 || kk + 0.5 > box.second + 1e-12) continue;
        auto one = unique_continuation_check(pair, op, box, k, config.model.site.window_width, vs.c_floor);
        for (auto& rec : one.cases) rec.digest = wegnerlab::detail::case_digest(realization, e.grid, rec.digest);
        out.uc.merge(one);
      }
    }
    return out;
  });
  LengthSweep s;
  s.box_length = l;
  for (const auto& o : outcomes) {
    eder.merge(o.eder.report);
    uc.merge(o.uc);
    s.eigenvalues += o.eder.cases.size();
    s.min_derivative_sum = std::min(s.min_derivative_sum, o.eder.min_derivative_sum);
    s.min_window_mass = std::min(s.min_window_mass, o.eder.min_window_mass);
    for (const auto& c : o.uc.cases) {
      ++s.ratio_cases;
      if (c.vacuous)
        ++s.vacuous;
      else
        s.min_ratio = std::min(s.min_ratio, c.measured);
    }
  }
  return s;
}

/// Hellmann-Feynman cases: realization r, a low eigenvalue index and a box
/// site drawn from a dedicated stream; near-degenerate draws are skipped and
/// further draws are made until `hf_cases` cases ran.
inline VerificationReport hellmann_feynman_suite(const RunConfig& config, unsigned workers) {
  const auto& vs = config.verify;
  EnsembleConfig e = ensemble_for(config, vs.hf_length);
  e.grid.bc = Boundary::dirichlet;
  const auto sites = box_sites(config.model, vs.hf_length);
  const std::size_t n = static_cast<std::size_t>(e.grid.node_count());
  const double delta = vs.hf_delta * std::max(config.model.omega_plus(), 1e-300);
  VerificationReport report{"hellmann_feynman", {}, {}, {}};
  std::size_t attempted = 0;
  while (report.cases.size() < vs.hf_cases && attempted < 10 * std::max<std::size_t>(vs.hf_cases, 1)) {
    const std::size_t batch = 2 * (vs.hf_cases - report.cases.size());
    const auto runs = parallel_map<VerificationReport>(batch, workers, [&](std::size_t i) {
      const std::size_t attempt = attempted + i;
      CounterStream pick(config.seed, (std::uint64_t{1} << 62) + attempt);
      const auto index = static_cast<std::size_t>(pick.uniform() * static_cast<double>(std::min<std::size_t>(n, 40)));
      const long k = sites.first + static_cast<long>(pick.uniform() * static_cast<double>(sites.size()));
      return hellmann_feynman_check(config.model, ensemble_realization(e, attempt), e.grid, index, k,
                                    delta, vs.hf_tolerance);
    });
    attempted += batch;
    for (const auto& r : runs) {
      if (report.cases.size() >= vs.hf_cases) break;
      report.merge(r);
    }
  }
  if (report.cases.size() < vs.hf_cases)
    report.notes.push_back("only " + std::to_string(report.cases.size()) + " guarded cases after " +
                           std::to_string(attempted) + " draws");
  return report;
}

/// Bracketing over `bracketing_realizations` draws, cutting at a rotating
/// interior site, at random energies.
inline VerificationReport bracketing_suite(const RunConfig& config, unsigned workers) {
  const auto& vs = config.verify;
  EnsembleConfig e = ensemble_for(config, vs.bracketing_length);
  e.grid.bc = Boundary::dirichlet;
  const auto sites = box_sites(config.model, vs.bracketing_length);
  const auto box = box_bounds(config.model, e.grid);
  const double r = config.model.site.radius();
  const double h = e.grid.spacing();
  std::vector<long> cuts;
  for (long j = sites.first; j <= sites.last; ++j)
    if (j - r > box.first + 1.5 * h && j + r < box.second - 1.5 * h) cuts.push_back(j);
  if (cuts.empty()) throw ConfigError("no interior site admits a cut", "verify.bracketing_length");
  const auto runs = parallel_map<VerificationReport>(vs.bracketing_realizations, workers, [&](std::size_t i) {
    CounterStream draw(config.seed, (std::uint64_t{1} << 61) + i);
    std::vector<double> energies(vs.bracketing_energies);
    for (double& en : energies)
      en = vs.bracketing_energy_lo + (vs.bracketing_energy_hi - vs.bracketing_energy_lo) * draw.uniform();
    return bracketing_check(config.model, ensemble_realization(e, i), e.grid, cuts[i % cuts.size()],
                            energies, config.fault);
  });
  VerificationReport report{"bracketing", {}, {}, {}};
  for (const auto& run : runs) report.merge(run);
  return report;
}

inline void add_report_rows(Table& cases, Table& skips, const VerificationReport& r) {
  for (const auto& c : r.cases)
    cases.add({r.check, c.digest, c.measured, c.reference, c.bound, std::string(c.passed ? "pass" : "FAIL"),
               std::string(c.vacuous ? "vacuous" : "")});
  for (const auto& s : r.skipped) skips.add({r.check, s.digest, s.reason});
}

/// All four proof-ingredient checks; status 1 on any failed case.
inline ResultBundle cmd_verify(RunConfig config, const std::string& command_line = {}) {
  config.command = "verify";
  auto b = start_bundle(config, command_line);
  const unsigned workers = resolve_workers(config);
  const auto& vs = config.verify;

  std::vector<VerificationReport> reports;
  reports.push_back(hellmann_feynman_suite(config, workers));

  VerificationReport eder{"eder_lower_bound", {}, {}, {}};
  VerificationReport uc{"unique_continuation", {}, {}, {}};
  std::vector<LengthSweep> sweeps;
  for (int l : vs.lengths) sweeps.push_back(eder_sweep(config, l, eder, uc, workers));
  VerificationReport stability{"cross_length_stability", {}, {}, {}};
  auto spread = [&](auto member) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& s : sweeps) {
      lo = std::min(lo, s.*member);
      hi = std::max(hi, s.*member);
    }
    return lo > 0.0 && std::isfinite(hi) ? hi / lo : std::numeric_limits<double>::infinity();
  };
  const double eder_spread = spread(&LengthSweep::min_derivative_sum);
  const double uc_spread = spread(&LengthSweep::min_ratio);
  stability.cases.push_back({"eder:min_derivative_sum", eder_spread, 0.0, vs.stability_factor,
                             eder_spread <= vs.stability_factor, false});
  stability.cases.push_back({"unique_continuation:min_ratio", uc_spread, 0.0, vs.stability_factor,
                             uc_spread <= vs.stability_factor, false});
  for (const auto& s : sweeps) {
    const double fraction = s.ratio_cases ? static_cast<double>(s.vacuous) / static_cast<double>(s.ratio_cases) : 0.0;
    if (fraction >= 0.05)
      uc.notes.push_back("l=" + std::to_string(s.box_length) + ": vacuous fraction " +
                         format_number(fraction) + " flagged for review");
  }
  reports.push_back(std::move(eder));
  reports.push_back(std::move(uc));
  reports.push_back(std::move(stability));
  reports.push_back(bracketing_suite(config, workers));

  Table cases{"verify_cases", {"check", "case", "measured", "reference", "bound", "result", "flag"}, {}};
  Table skips{"verify_skips", {"check", "case", "reason"}, {}};
  Table summary{"verify_summary", {"check", "cases", "failures", "skipped", "min", "max"}, {}};
  Table lengths{"verify_lengths",
                {"l", "eigenvalues", "min_derivative_sum", "min_window_mass", "min_ratio", "ratio_cases", "vacuous"},
                {}};
  std::ostringstream text;
  json checks = json::array();
  bool failed = false;
  for (const auto& r : reports) {
    add_report_rows(cases, skips, r);
    const double lo = r.cases.empty() ? std::nan("") : r.min_measured();
    const double hi = r.cases.empty() ? std::nan("") : r.max_measured();
    summary.add({r.check, static_cast<std::int64_t>(r.cases.size()), static_cast<std::int64_t>(r.failures()),
                 static_cast<std::int64_t>(r.skipped.size()), lo, hi});
    checks.push_back({{"check", r.check},
                      {"cases", r.cases.size()},
                      {"failures", r.failures()},
                      {"skipped", r.skipped.size()},
                      {"min", lo},
                      {"max", hi},
                      {"notes", r.notes}});
    text << (r.passed() ? "PASS " : "FAIL ") << r.check << ": " << r.cases.size() << " cases, "
         << r.failures() << " failures, " << r.skipped.size() << " skipped, measured in ["
         << format_number(lo) << ", " << format_number(hi) << "]\n";
    for (const auto& c : r.cases)
      if (!c.passed) text << "  failing case " << c.digest << " measured=" << format_number(c.measured) << '\n';
    for (const auto& n : r.notes) text << "  note: " << n << '\n';
    failed = failed || !r.passed();
  }
  json per_length = json::array();
  for (const auto& s : sweeps) {
    lengths.add({std::int64_t{s.box_length}, static_cast<std::int64_t>(s.eigenvalues), s.min_derivative_sum,
                 s.min_window_mass, s.min_ratio, static_cast<std::int64_t>(s.ratio_cases),
                 static_cast<std::int64_t>(s.vacuous)});
    per_length.push_back({{"l", s.box_length},
                          {"eigenvalues", s.eigenvalues},
                          {"min_derivative_sum", s.min_derivative_sum},
                          {"min_window_mass", s.min_window_mass},
                          {"min_ratio", s.min_ratio},
                          {"ratio_cases", s.ratio_cases},
                          {"vacuous", s.vacuous}});
  }
  b.results["verify"] = {{"checks", checks}, {"lengths", per_length}, {"passed", !failed}};
  b.tables = {std::move(summary), std::move(cases), std::move(skips), std::move(lengths)};
  b.report = text.str();
  b.status = failed ? 1 : 0;

  Plot plot{"Lower-bound constants against box length", "l", "minimum", false, true, {}};
  Series d{"min derivative sum", {}, {}, {}, true}, q{"min window ratio", {}, {}, {}, true};
  for (const auto& s : sweeps) {
    d.x.push_back(s.box_length);
    d.y.push_back(s.min_derivative_sum);
    q.x.push_back(s.box_length);
    q.y.push_back(s.min_ratio);
  }
  plot.series = {d, q};
  b.plots.emplace_back("verify.svg", render_svg(plot));
  return b;
}

/// Stream id of the long chain used for Lyapunov exponents.
inline constexpr std::uint64_t kChainStream = std::uint64_t{1} << 60;

/// Lyapunov exponents on an energy grid and decay fits of the lowest
/// eigenstates of one box realization.
inline ResultBundle cmd_localize(RunConfig config, const std::string& command_line = {}) {
  config.command = "localize";
  auto b = start_bundle(config, command_line);
  const unsigned workers = resolve_workers(config);
  const auto& ls = config.localize;
  const double h = config.grid.spacing();

  CounterStream chain_stream(config.seed, kChainStream);
  const auto chain = chain_potential(config.model, chain_stream, ls.chain_cells, config.grid.points_per_cell);
  const auto energies = linspace(ls.energy_min, ls.energy_max, ls.points);
  const auto gamma = parallel_map<double>(energies.size(), workers, [&](std::size_t i) {
    return lyapunov_exponent(chain, energies[i], h);
  });

  Table gtable{"gamma", {"E", "gamma"}, {}};
  for (std::size_t i = 0; i < energies.size(); ++i) gtable.add({energies[i], gamma[i]});

  EnsembleConfig e = ensemble_for(config, ls.box_length);
  e.grid.bc = Boundary::dirichlet;
  const auto op = assemble(config.model, ensemble_realization(e, 0), e.grid);
  const std::size_t states = std::min<std::size_t>(ls.states, op.size());
  struct State {
    EigenPair pair;
    DecayFit fit;
    double participation = 0.0;
    double gamma = 0.0;
  };
  const auto results = parallel_map<State>(states, workers, [&](std::size_t k) {
    State s;
    s.pair = eigenpair(op, kth_eigenvalue(op, k));
    s.fit = decay_rate(s.pair, op.nodes);
    s.participation = participation_ratio(s.pair, op.spacing);
    s.gamma = lyapunov_exponent(chain, s.pair.value, h);
    s.pair.vector.clear();
    return s;
  });
  Table dtable{"decay", {"state", "E", "rate", "R2", "participation", "gamma"}, {}};
  json decay = json::array();
  Series rate{"|decay rate|", {}, {}, {}, true}, gam{"gamma(E)", {}, {}, {}, true};
  std::ostringstream report;
  for (std::size_t k = 0; k < results.size(); ++k) {
    const auto& s = results[k];
    dtable.add({static_cast<std::int64_t>(k), s.pair.value, s.fit.rate, s.fit.r_squared, s.participation, s.gamma});
    decay.push_back({{"state", k},
                     {"energy", s.pair.value},
                     {"rate", s.fit.rate},
                     {"r_squared", s.fit.r_squared},
                     {"participation", s.participation},
                     {"gamma", s.gamma},
                     {"peak_position", s.fit.peak_position}});
    rate.x.push_back(s.pair.value);
    rate.y.push_back(std::abs(s.fit.rate));
    gam.x.push_back(s.pair.value);
    gam.y.push_back(s.gamma);
    report << "state " << k << " E=" << format_number(s.pair.value) << " rate=" << format_number(s.fit.rate)
           << " R2=" << format_number(s.fit.r_squared) << " gamma=" << format_number(s.gamma) << '\n';
  }
  b.results["localize"] = {{"chain_cells", ls.chain_cells},
                           {"box_length", ls.box_length},
                           {"energies", energies},
                           {"gamma", gamma},
                           {"states", decay}};
  b.tables = {std::move(gtable), std::move(dtable)};
  b.plots.emplace_back("gamma.svg", render_svg({"Lyapunov exponent", "E", "gamma", false, false,
                                                {{"gamma", energies, gamma, {}, false}}}));
  b.plots.emplace_back("decay.svg", render_svg({"Eigenfunction decay", "E", "rate", false, false, {rate, gam}}));
  b.report = report.str();
  return b;
}

}  // namespace wegnerlab::io
