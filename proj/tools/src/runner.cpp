#include "runner.hpp"

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <future>
#include <ostream>

#include "analysis.hpp"
#include "tunnel/errors.hpp"

namespace tunnel::cli {

using nlohmann::json;
using propagator::Method;
using propagator::WaveField;
namespace tr = transmission;

namespace {

const initial_state::ExponentialSum& exp_sum(const ScenarioConfig& sc) {
  return std::get<initial_state::ExponentialSum>(sc.initial);
}

WaveField free_field(const ScenarioConfig& sc) {
  if (std::holds_alternative<initial_state::ExponentialSum>(sc.initial)) {
    return propagator::propagate_closed_free(exp_sum(sc), sc.grid);
  }
  return propagator::propagate_series(tr::TransmissionModel::free(), sc.initial, sc.grid, sc.series_order);
}

const WaveField* find_field(const std::vector<WaveField>& fields, const std::string& name) {
  for (const auto& f : fields) {
    if (f.method == name) return &f;
  }
  return nullptr;
}

bool identical(const WaveField& a, const WaveField& b) {
  return a.psi.size() == b.psi.size() &&
         std::memcmp(a.psi.data(), b.psi.data(), a.psi.size() * sizeof(cplx)) == 0 &&
         std::memcmp(a.err.data(), b.err.data(), a.err.size() * sizeof(double)) == 0;
}

void write_json(const json& doc, const std::filesystem::path& path) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error(tmp + ": cannot open for writing");
    out << doc.dump(2) << "\n";
    if (!out) throw std::runtime_error(tmp + ": write failed");
  }
  std::filesystem::rename(tmp, path);
}

json range_json(const std::optional<std::pair<double, double>>& r) {
  if (!r) return nullptr;
  return json::array({r->first, r->second});
}

}  // namespace

WaveField compute_field(const ScenarioConfig& sc, Method method) {
  switch (method) {
    case Method::kAuto:
      return propagator::propagate_auto(sc.model, sc.initial, sc.grid);
    case Method::kClosed:
      return propagator::propagate_closed(sc.model, exp_sum(sc), sc.grid);
    case Method::kSeries:
      return propagator::propagate_series(sc.model, sc.initial, sc.grid, sc.series_order);
    case Method::kBSeries:
      return propagator::propagate_b_series(sc.model, sc.initial, sc.grid, std::min(sc.series_order, 8),
                                            sc.b_series_inner);
    case Method::kAsymptotic:
      return propagator::propagate_asymptotic(sc.model, sc.initial, sc.grid, false);
    case Method::kQuadrature:
      return propagator::propagate_quadrature(sc.model, exp_sum(sc), sc.grid);
    case Method::kOracle: {
      if (!sc.oracle) throw DomainError("oracle: scenario has no oracle block");
      if (sc.model.kind() == tr::Kind::kDelta) {
        const double lambda = std::get<tr::Delta>(sc.model.params()).lambda;
        return oracle_tdse::evolve_delta_refined(*sc.oracle, lambda, sc.position, exp_sum(sc), sc.grid,
                                                 sc.delta_widths);
      }
      return oracle_tdse::evolve(*sc.oracle, exp_sum(sc), sc.grid);
    }
  }
  throw DomainError("unknown method");
}

RunResult run_scenario(const ScenarioConfig& sc_in, const RunOptions& opts) {
  ScenarioConfig sc = sc_in;
  if (opts.methods) sc.methods = *opts.methods;
  const std::filesystem::path out_dir = opts.out_dir ? *opts.out_dir : sc.output_dir;
  std::filesystem::create_directories(out_dir);
  auto log = [&](const std::string& line) {
    if (opts.log) *opts.log << line << "\n";
  };

  RunResult result;
  json report;
  report["schema_version"] = 1;
  report["scenario"] = sc.name;
  report["origin"] = sc.origin;
  report["model"] = tr::to_string(sc.model.kind());
  report["grid"] = {{"x_count", sc.grid.xs.size()}, {"t_count", sc.grid.ts.size()},
                    {"barrier_edge", sc.grid.barrier_edge}};
  std::vector<std::string> violations;

  // Methods are independent; the oracle dominates the cost.
  std::vector<std::future<WaveField>> jobs;
  for (Method m : sc.methods) {
    log("computing " + propagator::to_string(m));
    jobs.push_back(std::async(std::launch::async, [&sc, m] { return compute_field(sc, m); }));
  }
  std::vector<std::string> errors;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    try {
      result.fields.push_back(jobs[i].get());
    } catch (const std::exception& e) {
      errors.push_back(propagator::to_string(sc.methods[i]) + ": " + e.what());
    }
  }
  if (!errors.empty()) {
    report["errors"] = errors;
    report["status"] = "error";
    write_json(report, out_dir / (sc.name + "_report.json"));
    result.report = report;
    result.exit_code = kExitInvalid;
    for (const auto& e : errors) log("error: " + e);
    return result;
  }

  json methods = json::array();
  for (const auto& f : result.fields) {
    const std::string csv = sc.name + "_" + f.method + ".csv";
    propagator::write_csv(f, (out_dir / csv).string());
    double worst = 0.0;
    for (double e : f.err) worst = std::max(worst, e);
    methods.push_back({{"name", f.method}, {"csv", csv}, {"max_err_estimate", worst}, {"warnings", f.warnings}});
  }
  report["methods"] = methods;

  json comparisons = json::array();
  for (std::size_t i = 0; i < result.fields.size(); ++i) {
    for (std::size_t j = i + 1; j < result.fields.size(); ++j) {
      const auto& a = result.fields[i];
      const auto& b = result.fields[j];
      json c = {{"a", a.method}, {"b", b.method}, {"rel_l2", propagator::rel_l2(a, b)}, {"max", nullptr},
                {"pass", nullptr}};
      for (const auto& tol : sc.rel_l2) {
        if ((tol.a == a.method && tol.b == b.method) || (tol.a == b.method && tol.b == a.method)) {
          const double v = propagator::rel_l2(a, b);
          c["max"] = tol.max;
          c["pass"] = v <= tol.max;
          if (!(v <= tol.max)) violations.push_back("rel_l2(" + a.method + ", " + b.method + ") exceeds tolerance");
        }
      }
      comparisons.push_back(c);
    }
  }
  report["comparisons"] = comparisons;

  const bool need_free = sc.decay || sc.resonances || sc.short_time;
  const WaveField free = need_free ? free_field(sc) : WaveField{};

  report["decay"] = nullptr;
  if (sc.decay) {
    const auto& d = *sc.decay;
    if (const WaveField* f = find_field(result.fields, d.method)) {
      const WaveField ref =
          d.reference == "free"
              ? free
              : propagator::propagate_closed_free(
                    initial_state::ExponentialSum::constant(initial_state::derivative_at_zero(sc.initial, 0)),
                    sc.grid);
      const PowerFit fit = d.quantity == "residual" ? fit_residual_decay(*f, ref, d.t_index, d.x_from, d.x_to)
                                                    : fit_density_decay(*f, d.t_index, d.x_from, d.x_to);
      json j = {{"method", d.method}, {"quantity", d.quantity}, {"reference", d.reference},
                {"t", sc.grid.ts[d.t_index]},
                {"x_from", d.x_from}, {"x_to", d.x_to}, {"exponent", fit.exponent},
                {"points", fit.points}, {"expected_range", range_json(d.exponent_range)}, {"pass", nullptr}};
      if (d.exponent_range) {
        const bool ok = fit.exponent >= d.exponent_range->first && fit.exponent <= d.exponent_range->second;
        j["pass"] = ok;
        if (!ok) violations.push_back("decay exponent outside the expected range");
      }
      report["decay"] = j;
    }
  }

  report["resonances"] = nullptr;
  if (sc.resonances) {
    const auto& a = *sc.resonances;
    if (const WaveField* f = find_field(result.fields, a.method)) {
      const double half = std::get<tr::Rectangular>(sc.model.params()).half_width;
      json rows = json::array();
      for (const auto& row : resonance_table(*f, free, 0, half, a.orders)) {
        json j = {{"m", row.order}, {"expected", row.expected}, {"located", row.located}, {"pass", nullptr}};
        j["found"] = row.located ? json(row.found) : json(nullptr);
        j["kind"] = row.located ? json(row.maximum ? "max" : "min") : json(nullptr);
        j["deviation_cells"] = row.located ? json(row.deviation_cells) : json(nullptr);
        if (a.max_cells) {
          const bool ok = row.located && std::abs(row.deviation_cells) <= *a.max_cells;
          j["pass"] = ok;
          if (!ok) violations.push_back("resonance m=" + std::to_string(row.order) + " not within tolerance");
        }
        rows.push_back(j);
      }
      report["resonances"] = {{"method", a.method}, {"t", sc.grid.ts[0]}, {"rows", rows}};
    }
  }

  report["short_time"] = nullptr;
  if (sc.short_time) {
    const auto& a = *sc.short_time;
    if (const WaveField* f = find_field(result.fields, a.method)) {
      const double dev = short_time_deviation(*f, free);
      json j = {{"method", a.method}, {"max_deviation", dev}, {"max", nullptr}, {"pass", nullptr}};
      if (a.max) {
        j["max"] = *a.max;
        j["pass"] = dev <= *a.max;
        if (!(dev <= *a.max)) violations.push_back("short-time deviation exceeds tolerance");
      }
      report["short_time"] = j;
    }
  }

  report["smoothing"] = nullptr;
  if (sc.smoothing) {
    const auto& a = *sc.smoothing;
    if (const WaveField* sharp = find_field(result.fields, a.sharp)) {
      oracle_tdse::OracleConfig cfg = *sc.oracle;
      if (sc.model.kind() == tr::Kind::kDelta) {
        cfg.potential = oracle_tdse::delta_as_rectangle(std::get<tr::Delta>(sc.model.params()).lambda, sc.position,
                                                        sc.delta_widths.back());
      }
      json rows = json::array();
      for (const auto& rep : oracle_tdse::smoothing_validity_sweep(cfg, exp_sum(sc), sc.grid, *sharp, a.epsilons)) {
        double near = 0.0, far = INFINITY;
        std::size_t n_near = 0, n_far = 0;
        for (std::size_t i = 0; i < rep.xs.size(); ++i) {
          if (rep.xs[i] <= a.near_factor * rep.boundary) {
            near = std::max(near, rep.deviation[i]);
            ++n_near;
          } else if (rep.xs[i] >= a.far_factor * rep.boundary) {
            far = std::min(far, rep.deviation[i]);
            ++n_far;
          }
        }
        json j = {{"epsilon", rep.epsilon}, {"boundary", rep.boundary}, {"near_points", n_near},
                  {"far_points", n_far}};
        j["near_max"] = n_near ? json(near) : json(nullptr);
        j["far_min"] = n_far ? json(far) : json(nullptr);
        bool ok = true;
        if (a.near_max) ok = ok && n_near > 0 && near <= *a.near_max;
        if (a.far_ratio) ok = ok && n_near > 0 && n_far > 0 && far >= *a.far_ratio * near;
        j["pass"] = (a.near_max || a.far_ratio) ? json(ok) : json(nullptr);
        if (!ok) violations.push_back("smoothing check failed at epsilon " + std::to_string(rep.epsilon));
        rows.push_back(j);
      }
      report["smoothing"] = {{"sharp", a.sharp}, {"near_factor", a.near_factor}, {"far_factor", a.far_factor},
                             {"rows", rows}};
    }
  }

  report["determinism"] = {{"checked", opts.seed_check}, {"identical", nullptr}};
  if (opts.seed_check) {
    bool same = true;
    for (std::size_t i = 0; i < sc.methods.size(); ++i) {
      log("recomputing " + propagator::to_string(sc.methods[i]));
      same = same && identical(result.fields[i], compute_field(sc, sc.methods[i]));
    }
    report["determinism"]["identical"] = same;
    if (!same) violations.push_back("repeated run produced different output");
  }

  report["violations"] = violations;
  report["status"] = violations.empty() ? "ok" : "tolerance-violated";
  write_json(report, out_dir / (sc.name + "_report.json"));
  for (const auto& v : violations) log("violation: " + v);
  result.report = std::move(report);
  result.exit_code = violations.empty() ? kExitOk : kExitTolerance;
  return result;
}

}  // namespace tunnel::cli
