#include "scenario.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bundled.hpp"
#include "json_lines.hpp"
#include "json.hpp"
#include "tunnel/errors.hpp"

namespace tunnel::cli {

using nlohmann::json;
namespace tr = transmission;

ScenarioError::ScenarioError(const std::string& origin, int line, const std::string& message)
    : std::runtime_error(origin + ":" + std::to_string(line) + ": " + message), line_(line) {}

namespace {

int line_at_byte(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

// Typed access to the document with line-numbered failures.
class Reader {
 public:
  Reader(const json& doc, const std::string& text, std::string origin)
      : doc_(doc), lines_(text), origin_(std::move(origin)) {}

  [[noreturn]] void fail(const std::string& pointer, const std::string& message) const {
    throw ScenarioError(origin_, lines_.line_of(pointer), message);
  }

  const json& at(const std::string& pointer) const { return doc_.at(json::json_pointer(pointer)); }
  bool has(const std::string& pointer) const { return doc_.contains(json::json_pointer(pointer)); }

  const json& require(const std::string& pointer) const {
    if (!has(pointer)) {
      const auto slash = pointer.rfind('/');
      fail(pointer.substr(0, slash), "missing field \"" + pointer + "\"");
    }
    return at(pointer);
  }

  double number(const std::string& pointer) const {
    const json& v = require(pointer);
    if (!v.is_number()) fail(pointer, pointer + ": expected a number");
    return v.get<double>();
  }
  double number_or(const std::string& pointer, double fallback) const {
    return has(pointer) ? number(pointer) : fallback;
  }
  double positive(const std::string& pointer) const {
    const double v = number(pointer);
    if (!(v > 0.0)) fail(pointer, pointer + ": must be > 0");
    return v;
  }
  int integer(const std::string& pointer) const {
    const json& v = require(pointer);
    if (!v.is_number_integer()) fail(pointer, pointer + ": expected an integer");
    return v.get<int>();
  }
  std::string string(const std::string& pointer) const {
    const json& v = require(pointer);
    if (!v.is_string()) fail(pointer, pointer + ": expected a string");
    return v.get<std::string>();
  }
  std::string string_or(const std::string& pointer, const std::string& fallback) const {
    return has(pointer) ? string(pointer) : fallback;
  }
  std::size_t array_size(const std::string& pointer) const {
    const json& v = require(pointer);
    if (!v.is_array()) fail(pointer, pointer + ": expected an array");
    return v.size();
  }
  std::vector<double> numbers(const std::string& pointer) const {
    std::vector<double> out;
    const std::size_t n = array_size(pointer);
    for (std::size_t i = 0; i < n; ++i) out.push_back(number(pointer + "/" + std::to_string(i)));
    return out;
  }
  // Either an explicit array or {"from", "to", "count"} (inclusive ends).
  std::vector<double> samples(const std::string& pointer) const {
    const json& v = require(pointer);
    if (v.is_array()) return numbers(pointer);
    if (!v.is_object()) fail(pointer, pointer + ": expected an array or {from, to, count}");
    const double from = number(pointer + "/from");
    const double to = number(pointer + "/to");
    const int count = integer(pointer + "/count");
    if (count < 1) fail(pointer + "/count", "count must be >= 1");
    std::vector<double> out;
    for (int i = 0; i < count; ++i) {
      out.push_back(count == 1 ? from : from + (to - from) * i / (count - 1));
    }
    return out;
  }

 private:
  const json& doc_;
  JsonLineIndex lines_;
  std::string origin_;
};

tr::BarrierProfile read_profile(const Reader& r, const std::string& p) {
  const std::string shape = r.string(p + "/shape");
  if (shape == "constant") return tr::BarrierProfile::constant(r.positive(p + "/v0"), r.positive(p + "/length"));
  if (shape == "gaussian") {
    return tr::BarrierProfile::gaussian(r.positive(p + "/v0"), r.positive(p + "/length"), r.positive(p + "/sigma"));
  }
  if (shape == "sampled") return tr::BarrierProfile::sampled(r.numbers(p + "/values"), r.positive(p + "/length"));
  r.fail(p + "/shape", "unknown profile shape \"" + shape + "\" (constant, gaussian, sampled)");
}

void read_model(const Reader& r, ScenarioConfig& sc) {
  const std::string kind = r.string("/model/kind");
  sc.position = r.number_or("/model/position", 0.0);
  try {
    if (kind == "free") {
      sc.model = tr::TransmissionModel::free();
      sc.grid.barrier_edge = sc.position;
    } else if (kind == "delta") {
      sc.model = tr::TransmissionModel::delta(r.number("/model/lambda"));
      sc.grid.barrier_edge = sc.position;
    } else if (kind == "rectangular") {
      const double half = r.positive("/model/half_width");
      sc.model = tr::TransmissionModel::rectangular(r.positive("/model/v0"), half);
      sc.grid.barrier_edge = sc.position + 2.0 * half;
    } else if (kind == "reflectionless") {
      sc.model = tr::TransmissionModel::reflectionless(r.positive("/model/a"));
      sc.grid.barrier_edge = sc.position;
    } else if (kind == "wkb-smooth") {
      tr::BarrierProfile profile = read_profile(r, "/model/profile");
      sc.grid.barrier_edge = sc.position + profile.length;
      sc.model = tr::TransmissionModel::wkb(std::move(profile));
    } else if (kind == "tabulated") {
      const std::size_t n = r.array_size("/model/table");
      std::vector<double> k;
      std::vector<cplx> t;
      for (std::size_t i = 0; i < n; ++i) {
        const std::string row = "/model/table/" + std::to_string(i);
        const auto v = r.numbers(row);
        if (v.size() < 2 || v.size() > 3) r.fail(row, "table rows are [k, re T] or [k, re T, im T]");
        k.push_back(v[0]);
        t.emplace_back(v[1], v.size() == 3 ? v[2] : 0.0);
      }
      sc.model = tr::TransmissionModel::tabulated(tr::TransmissionTable(std::move(k), std::move(t)));
      sc.grid.barrier_edge = sc.position;
    } else {
      r.fail("/model/kind",
             "unknown model kind \"" + kind + "\" (free, delta, rectangular, wkb-smooth, reflectionless, tabulated)");
    }
  } catch (const Error& e) {
    r.fail("/model", e.what());
  }
}

void read_initial(const Reader& r, ScenarioConfig& sc) {
  if (!r.has("/initial")) return;
  const std::string type = r.string("/initial/type");
  if (type == "exp-sum") {
    const std::size_t n = r.array_size("/initial/terms");
    std::vector<initial_state::ExpTerm> terms;
    for (std::size_t i = 0; i < n; ++i) {
      const std::string row = "/initial/terms/" + std::to_string(i);
      const auto v = r.numbers(row);
      if (v.size() != 4) r.fail(row, "exp-sum terms are [c_re, c_im, mu_re, mu_im]");
      terms.push_back({cplx(v[0], v[1]), cplx(v[2], v[3])});
    }
    try {
      sc.initial = initial_state::ExponentialSum(std::move(terms));
    } catch (const Error& e) {
      r.fail("/initial/terms", e.what());
    }
  } else if (type == "boundary-derivatives") {
    const auto v = r.numbers("/initial/values");
    if (v.empty() || v.size() % 2 != 0) r.fail("/initial/values", "values are [f0_re, f0_im, f1_re, f1_im, ...]");
    initial_state::BoundaryDerivatives d;
    for (std::size_t i = 0; i < v.size(); i += 2) d.values.emplace_back(v[i], v[i + 1]);
    sc.initial = d;
  } else {
    r.fail("/initial/type", "unknown initial type \"" + type + "\" (exp-sum, boundary-derivatives)");
  }
}

oracle_tdse::OracleConfig read_oracle(const Reader& r, ScenarioConfig& sc) {
  oracle_tdse::OracleConfig c;
  const std::string p = "/oracle";
  c.x_min = r.number_or(p + "/x_min", c.x_min);
  c.x_max = r.number_or(p + "/x_max", c.x_max);
  c.dx = r.number_or(p + "/dx", c.dx);
  c.dt = r.number_or(p + "/dt", c.dt);
  c.epsilon = r.number_or(p + "/epsilon", c.epsilon);
  c.absorber_width = r.number_or(p + "/absorber_width", c.absorber_width);
  c.absorber_strength = r.number_or(p + "/absorber_strength", c.absorber_strength);
  if (r.has(p + "/absorbers")) c.absorbers = r.at(p + "/absorbers").get<bool>();
  if (r.has(p + "/delta_widths")) sc.delta_widths = r.numbers(p + "/delta_widths");
  if (sc.delta_widths.size() < 2) r.fail(p + "/delta_widths", "at least two widths required");

  switch (sc.model.kind()) {
    case tr::Kind::kFree:
    case tr::Kind::kDelta:
      break;  // delta rectangles are set per refinement step
    case tr::Kind::kRectangular: {
      const auto& m = std::get<tr::Rectangular>(sc.model.params());
      c.potential = oracle_tdse::RectPotential{m.v0, sc.position, 2.0 * m.half_width};
      break;
    }
    case tr::Kind::kReflectionless:
      c.potential = oracle_tdse::Sech2Potential{std::get<tr::Reflectionless>(sc.model.params()).a, sc.position};
      break;
    case tr::Kind::kWkbSmooth:
      c.potential = oracle_tdse::ProfilePotential{std::get<tr::WkbSmooth>(sc.model.params()).profile, sc.position};
      break;
    case tr::Kind::kTabulated:
      r.fail(p, "a tabulated model has no real-space potential for the oracle");
  }
  try {
    c.validate();
  } catch (const Error& e) {
    r.fail(p, e.what());
  }
  return c;
}

void read_analyses(const Reader& r, ScenarioConfig& sc) {
  if (r.has("/tolerances/rel_l2")) {
    const std::size_t n = r.array_size("/tolerances/rel_l2");
    for (std::size_t i = 0; i < n; ++i) {
      const std::string p = "/tolerances/rel_l2/" + std::to_string(i);
      ToleranceRelL2 t;
      t.a = r.string(p + "/a");
      t.b = r.string(p + "/b");
      t.max = r.positive(p + "/max");
      for (const auto* name : {&t.a, &t.b}) {
        try {
          const auto m = propagator::method_from_string(*name);
          if (std::find(sc.methods.begin(), sc.methods.end(), m) == sc.methods.end()) {
            r.fail(p, "tolerance refers to method \"" + *name + "\" which is not run");
          }
        } catch (const DomainError& e) {
          r.fail(p, e.what());
        }
      }
      sc.rel_l2.push_back(t);
    }
  }
  auto method_in_run = [&](const std::string& p) {
    const std::string name = r.string(p);
    try {
      const auto m = propagator::method_from_string(name);
      if (std::find(sc.methods.begin(), sc.methods.end(), m) == sc.methods.end()) {
        r.fail(p, "analysis refers to method \"" + name + "\" which is not run");
      }
    } catch (const DomainError& e) {
      r.fail(p, e.what());
    }
    return name;
  };
  auto range = [&](const std::string& p) {
    const auto v = r.numbers(p);
    if (v.size() != 2 || !(v[0] <= v[1])) r.fail(p, "expected [low, high]");
    return std::make_pair(v[0], v[1]);
  };

  if (r.has("/analysis/decay")) {
    const std::string p = "/analysis/decay";
    DecayAnalysis d;
    d.method = method_in_run(p + "/method");
    d.quantity = r.string_or(p + "/quantity", "residual");
    if (d.quantity != "residual" && d.quantity != "density") r.fail(p + "/quantity", "quantity is residual or density");
    d.reference = r.string_or(p + "/reference", "free");
    if (d.reference != "free" && d.reference != "shutter") r.fail(p + "/reference", "reference is free or shutter");
    d.t_index = static_cast<std::size_t>(r.number_or(p + "/t_index", 0));
    if (d.t_index >= sc.grid.ts.size()) r.fail(p + "/t_index", "t_index outside the time grid");
    d.x_from = r.number(p + "/x_from");
    d.x_to = r.number(p + "/x_to");
    if (!(d.x_from > 0.0 && d.x_from < d.x_to)) r.fail(p, "need 0 < x_from < x_to");
    if (r.has(p + "/exponent_range")) d.exponent_range = range(p + "/exponent_range");
    sc.decay = d;
  }
  if (r.has("/analysis/resonances")) {
    const std::string p = "/analysis/resonances";
    if (sc.model.kind() != tr::Kind::kRectangular) r.fail(p, "resonance analysis needs a rectangular model");
    ResonanceAnalysis a;
    a.method = method_in_run(p + "/method");
    if (r.has(p + "/orders")) {
      a.orders.clear();
      for (double m : r.numbers(p + "/orders")) a.orders.push_back(static_cast<int>(m));
    }
    if (r.has(p + "/max_cells")) a.max_cells = r.positive(p + "/max_cells");
    sc.resonances = a;
  }
  if (r.has("/analysis/short_time")) {
    const std::string p = "/analysis/short_time";
    ShortTimeAnalysis a;
    a.method = method_in_run(p + "/method");
    if (r.has(p + "/max")) a.max = r.positive(p + "/max");
    sc.short_time = a;
  }
  if (r.has("/analysis/smoothing")) {
    const std::string p = "/analysis/smoothing";
    if (!sc.oracle) r.fail(p, "smoothing analysis needs an oracle block");
    if (sc.grid.ts.size() != 1) r.fail("/grid/ts", "smoothing analysis needs exactly one sample time");
    SmoothingAnalysis a;
    a.sharp = method_in_run(p + "/sharp");
    a.epsilons = r.numbers(p + "/epsilons");
    if (a.epsilons.empty()) r.fail(p + "/epsilons", "at least one epsilon required");
    a.near_factor = r.number_or(p + "/near_factor", a.near_factor);
    a.far_factor = r.number_or(p + "/far_factor", a.far_factor);
    if (r.has(p + "/near_max")) a.near_max = r.positive(p + "/near_max");
    if (r.has(p + "/far_ratio")) a.far_ratio = r.positive(p + "/far_ratio");
    sc.smoothing = a;
  }
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(origin, line_at_byte(text, e.byte == 0 ? 0 : e.byte - 1), e.what());
  }
  if (!doc.is_object()) throw ScenarioError(origin, 1, "scenario must be a JSON object");
  const Reader r(doc, text, origin);

  ScenarioConfig sc;
  sc.origin = origin;
  sc.name = r.string("/name");
  sc.description = r.string_or("/description", "");
  read_model(r, sc);
  read_initial(r, sc);

  sc.grid.xs = r.samples("/grid/xs");
  sc.grid.ts = r.samples("/grid/ts");
  if (sc.grid.xs.empty()) r.fail("/grid/xs", "grid: at least one x required");
  if (sc.grid.ts.empty()) r.fail("/grid/ts", "grid: at least one t required");
  for (std::size_t i = 0; i < sc.grid.ts.size(); ++i) {
    if (!(sc.grid.ts[i] > 0.0)) {
      std::ostringstream msg;
      msg << "grid: t > 0 required (ts[" << i << "] = " << sc.grid.ts[i] << ")";
      r.fail("/grid/ts/" + std::to_string(i), msg.str());
    }
  }
  for (std::size_t i = 0; i < sc.grid.xs.size(); ++i) {
    if (!(sc.grid.xs[i] > sc.grid.barrier_edge)) {
      std::ostringstream msg;
      msg << "grid: xs[" << i << "] = " << sc.grid.xs[i] << " must lie beyond the barrier edge "
          << sc.grid.barrier_edge;
      r.fail("/grid/xs/" + std::to_string(i), msg.str());
    }
  }

  const std::size_t nm = r.array_size("/methods");
  if (nm == 0) r.fail("/methods", "at least one method required");
  for (std::size_t i = 0; i < nm; ++i) {
    const std::string p = "/methods/" + std::to_string(i);
    try {
      const auto m = propagator::method_from_string(r.string(p));
      if (std::find(sc.methods.begin(), sc.methods.end(), m) != sc.methods.end()) r.fail(p, "duplicate method");
      sc.methods.push_back(m);
    } catch (const DomainError& e) {
      r.fail(p, e.what());
    }
  }
  const bool exp_sum = std::holds_alternative<initial_state::ExponentialSum>(sc.initial);
  for (std::size_t i = 0; i < sc.methods.size(); ++i) {
    const auto m = sc.methods[i];
    const std::string p = "/methods/" + std::to_string(i);
    const bool needs_exp = m == propagator::Method::kClosed || m == propagator::Method::kQuadrature ||
                           m == propagator::Method::kOracle;
    if (needs_exp && !exp_sum) r.fail(p, propagator::to_string(m) + " needs an exp-sum initial state");
    if (m == propagator::Method::kClosed && !sc.model.is_rational()) {
      r.fail(p, "closed form exists only for free, delta and reflectionless models");
    }
  }

  sc.series_order = r.has("/series_order") ? r.integer("/series_order") : sc.series_order;
  sc.b_series_inner = r.has("/b_series_inner") ? r.integer("/b_series_inner") : sc.b_series_inner;
  if (sc.series_order < 0 || sc.series_order > 12) r.fail("/series_order", "series_order must be in [0, 12]");

  const bool wants_oracle =
      std::find(sc.methods.begin(), sc.methods.end(), propagator::Method::kOracle) != sc.methods.end();
  if (r.has("/oracle")) {
    sc.oracle = read_oracle(r, sc);
  } else if (wants_oracle) {
    r.fail("/methods", "method oracle needs an oracle block");
  }
  if (sc.oracle) {
    for (std::size_t i = 0; i < sc.grid.ts.size(); ++i) {
      const double steps = sc.grid.ts[i] / sc.oracle->dt;
      if (std::abs(steps - std::round(steps)) > 1e-6 * std::max(1.0, steps)) {
        r.fail("/grid/ts/" + std::to_string(i), "oracle: sample times must be multiples of dt");
      }
    }
    for (std::size_t i = 0; i < sc.grid.xs.size(); ++i) {
      if (sc.grid.xs[i] >= sc.oracle->x_max - sc.oracle->absorber_width) {
        r.fail("/grid/xs/" + std::to_string(i), "oracle: x lies inside the right absorber");
      }
    }
  }

  read_analyses(r, sc);
  sc.output_dir = r.string_or("/output/dir", "out/" + sc.name);
  return sc;
}

ScenarioConfig load_scenario(const std::string& path_or_name) {
  std::ifstream in(path_or_name);
  if (in) {
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), path_or_name);
  }
  if (!std::filesystem::exists(path_or_name)) {
    for (const auto& b : bundled_scenarios()) {
      if (b.name == path_or_name) return parse_scenario(std::string(b.text), "bundled:" + std::string(b.name));
    }
  }
  throw std::runtime_error(path_or_name + ": cannot open scenario file");
}

}  // namespace tunnel::cli
