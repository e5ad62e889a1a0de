#include "tunnel/oracle_tdse.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tunnel/errors.hpp"

namespace tunnel::oracle_tdse {
namespace {

constexpr cplx kI{0.0, 1.0};

double overlap(double a0, double a1, double b0, double b1) { return std::max(0.0, std::min(a1, b1) - std::max(a0, b0)); }

// Mean of V over the cell [xl, xr].
double cell_average(const Potential& pot, double xl, double xr) {
  const double h = xr - xl;
  return std::visit(
      [&](const auto& p) -> double {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, NoPotential>) {
          return 0.0;
        } else if constexpr (std::is_same_v<P, RectPotential>) {
          return p.height * overlap(xl, xr, p.start, p.start + p.width) / h;
        } else if constexpr (std::is_same_v<P, Sech2Potential>) {
          return -2.0 * p.a * (std::tanh(p.a * (xr - p.center)) - std::tanh(p.a * (xl - p.center))) / h;
        } else {
          const double a = std::max(xl, p.start);
          const double b = std::min(xr, p.start + p.profile.length);
          if (!(b > a)) return 0.0;
          // Simpson on the overlap with the profile's own support.
          constexpr int kPanels = 8;
          const double step = (b - a) / kPanels;
          double s = 0.0;
          for (int i = 0; i <= kPanels; ++i) {
            const double w = (i == 0 || i == kPanels) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            s += w * p.profile.v(a + i * step - p.start);
          }
          return s * step / 3.0 / h;
        }
      },
      pot);
}

// Incoming profile sum_j c_j exp(mu_j x - i omega_j t) with the grid's own
// dispersion relation, so that it solves the discrete free equation exactly.
struct Background {
  std::vector<cplx> c, mu, omega;

  Background(const ExponentialSum& f, double dx) {
    for (const auto& term : f.terms()) {
      c.push_back(term.c);
      mu.push_back(term.mu);
      omega.push_back(-(2.0 * std::cosh(term.mu * dx) - 2.0) / (dx * dx));
    }
  }
  cplx operator()(double x, double t) const {
    cplx s = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j) s += c[j] * std::exp(mu[j] * x - kI * omega[j] * t);
    return s;
  }
};

std::vector<std::size_t> sample_steps(const std::vector<double>& ts, double dt) {
  std::vector<std::size_t> steps;
  for (double t : ts) {
    const double n = std::round(t / dt);
    if (std::abs(n * dt - t) > 1e-9 * std::max(t, dt)) {
      std::ostringstream msg;
      msg << "oracle: sample time " << t << " is not a multiple of dt = " << dt;
      throw DomainError(msg.str());
    }
    steps.push_back(static_cast<std::size_t>(n));
  }
  return steps;
}

// Polynomial extrapolation to h = 0 (Neville) of values taken at hs.
std::vector<cplx> extrapolate_to_zero(const std::vector<double>& hs, std::vector<std::vector<cplx>> v) {
  const std::size_t n = hs.size();
  for (std::size_t level = 1; level < n; ++level) {
    for (std::size_t i = n - 1; i >= level; --i) {
      const double hi = hs[i], hl = hs[i - level];
      for (std::size_t k = 0; k < v[i].size(); ++k) {
        v[i][k] = (hl * v[i][k] - hi * v[i - 1][k]) / (hl - hi);
      }
      if (i == level) break;
    }
  }
  return v[n - 1];
}

}  // namespace

RectPotential delta_as_rectangle(double lambda, double center, double width) {
  if (!(width > 0.0)) throw DomainError("delta rectangle: width > 0 required");
  return {lambda / width, center - 0.5 * width, width};
}

void OracleConfig::validate() const {
  if (!(dx > 0.0) || !(dt > 0.0)) throw DomainError("oracle: dx > 0 and dt > 0 required");
  if (!(x_max > x_min)) throw DomainError("oracle: x_max > x_min required");
  if (!(epsilon >= 2.0 * dx)) throw DomainError("oracle: smoothing width eps >= 2 dx required");
  if (absorbers && !(absorber_width >= 10.0 * dx)) throw DomainError("oracle: absorber width >= 10 dx required");
  if (absorbers && 2.0 * absorber_width >= x_max - x_min) throw DomainError("oracle: absorbers overlap");
}

std::vector<double> discretize_potential(const OracleConfig& cfg) {
  const auto n = static_cast<std::size_t>(std::floor((cfg.x_max - cfg.x_min) / cfg.dx)) + 1;
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = cfg.x_min + static_cast<double>(i) * cfg.dx;
    v[i] = cell_average(cfg.potential, x - 0.5 * cfg.dx, x + 0.5 * cfg.dx);
  }
  return v;
}

WaveField evolve(const OracleConfig& cfg, const ExponentialSum& f, const Grid& grid, EvolveStats* stats) {
  cfg.validate();
  WaveField field(grid, "oracle");
  const double dx = cfg.dx, dt = cfg.dt;
  const std::vector<double> v = discretize_potential(cfg);
  const std::size_t n = v.size();
  for (double x : grid.xs) {
    if (x < cfg.x_min + 2 * dx || x > cfg.x_min + (n - 3) * dx) throw DomainError("oracle: sample x outside the grid");
  }
  const auto steps = sample_steps(grid.ts, dt);

  std::vector<double> xs(n), w(n, 0.0);
  std::size_t left_end = 0;  // cells [0, left_end) form the left absorber
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = cfg.x_min + static_cast<double>(i) * dx;
    if (!cfg.absorbers) continue;
    const double dl = (cfg.x_min + cfg.absorber_width) - xs[i];
    const double dr = xs[i] - (cfg.x_max - cfg.absorber_width);
    if (dl > 0.0) {
      w[i] = cfg.absorber_strength * std::pow(dl / cfg.absorber_width, 4);
      left_end = i + 1;
    } else if (dr > 0.0) {
      w[i] = cfg.absorber_strength * std::pow(dr / cfg.absorber_width, 4);
    }
  }

  const Background bg(f, dx);
  std::vector<cplx> psi(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = 0.5 * std::erfc(xs[i] / cfg.epsilon);
    psi[i] = s == 0.0 ? cplx(0.0) : bg(xs[i], 0.0) * s;
  }

  // (1 + i dt/2 A) psi^{n+1} = (1 - i dt/2 A) psi^n + dt W_L (b^n + b^{n+1})/2,
  // A = -D2 + V - iW with Dirichlet ends. The left-hand factorisation is
  // computed once.
  const cplx off = -kI * dt / (2.0 * dx * dx);
  std::vector<cplx> diag(n), cprime(n), inv(n);
  for (std::size_t i = 0; i < n; ++i) {
    diag[i] = 1.0 + kI * (dt / (dx * dx)) + kI * (0.5 * dt * v[i]) + 0.5 * dt * w[i];
  }
  inv[0] = 1.0 / diag[0];
  cprime[0] = off * inv[0];
  for (std::size_t i = 1; i < n; ++i) {
    inv[i] = 1.0 / (diag[i] - off * cprime[i - 1]);
    cprime[i] = off * inv[i];
  }
  std::vector<cplx> rdiag(n);
  for (std::size_t i = 0; i < n; ++i) rdiag[i] = 2.0 - diag[i];

  auto norm2 = [&](const std::vector<cplx>& u) {
    double s = 0.0;
    for (const auto& z : u) s += std::norm(z);
    return s * dx;
  };
  const double norm0 = norm2(psi);
  EvolveStats st;
  st.initial_norm = norm0;

  // Padded state: pad[0] and pad[n + 1] are the ghost nodes.
  std::vector<cplx> pad(n + 2, 0.0), next(n + 2, 0.0), b_now(left_end), b_next(left_end);
  std::copy(psi.begin(), psi.end(), pad.begin() + 1);
  // The incoming profile factorises into fixed spatial parts and one phase
  // per exponential term.
  const std::size_t terms = bg.c.size();
  std::vector<std::vector<cplx>> spatial(terms, std::vector<cplx>(left_end));
  for (std::size_t j = 0; j < terms; ++j)
    for (std::size_t i = 0; i < left_end; ++i) spatial[j][i] = bg.c[j] * std::exp(bg.mu[j] * xs[i]);
  auto fill_background = [&](double t, std::vector<cplx>& out) {
    std::fill(out.begin(), out.end(), cplx(0.0));
    for (std::size_t j = 0; j < terms; ++j) {
      const cplx phase = std::exp(-kI * bg.omega[j] * t);
      for (std::size_t i = 0; i < left_end; ++i) out[i] += spatial[j][i] * phase;
    }
  };
  fill_background(0.0, b_now);
  // With absorbers the left ghost node carries the incoming profile, so a
  // non-decaying f meets no artificial wall; otherwise both walls are hard.
  const bool fed_wall = cfg.absorbers;
  const double x_ghost = cfg.x_min - dx;
  pad[0] = fed_wall ? bg(x_ghost, 0.0) : cplx(0.0);
  std::size_t right_start = n;
  while (right_start > 0 && w[right_start - 1] != 0.0 && right_start - 1 >= left_end) --right_start;

  auto record = [&](std::size_t sample) {
    for (std::size_t ix = 0; ix < grid.xs.size(); ++ix) {
      const double pos = (grid.xs[ix] - cfg.x_min) / dx;
      const auto i = static_cast<std::size_t>(std::floor(pos)) + 1;  // padded index
      const double s = pos - std::floor(pos);
      // Four-point Lagrange weights on nodes i-1, i, i+1, i+2.
      const double w0 = -s * (s - 1.0) * (s - 2.0) / 6.0;
      const double w1 = (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0;
      const double w2 = -(s + 1.0) * s * (s - 2.0) / 2.0;
      const double w3 = (s + 1.0) * s * (s - 1.0) / 6.0;
      const std::size_t k = field.index(sample, ix);
      field.psi[k] = w0 * pad[i - 1] + w1 * pad[i] + w2 * pad[i + 1] + w3 * pad[i + 2];
      field.err[k] = 0.0;
    }
  };

  std::size_t sample = 0;
  std::size_t step = 0;
  while (sample < steps.size() && steps[sample] == 0) record(sample++);
  double norm_now = norm0;
  const double half_dt = 0.5 * dt;
  while (sample < steps.size()) {
    const double t_next = static_cast<double>(step + 1) * dt;
    fill_background(t_next, b_next);
    const cplx ghost_next = fed_wall ? bg(x_ghost, t_next) : cplx(0.0);
    // Right-hand side fused with the forward Thomas sweep; the ghost values
    // at both time levels enter row 0 as a boundary source.
    const cplx wall_source = -off * (pad[0] + ghost_next);
    cplx carry = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      cplx r = rdiag[i] * pad[i + 1] - off * (pad[i] + pad[i + 2]);
      if (i < left_end) r += (half_dt * w[i]) * (b_now[i] + b_next[i]);
      if (i == 0) r += off * pad[0] + wall_source;
      carry = (r - off * carry) * inv[i];
      next[i + 1] = carry;
    }
    double norm_next = std::norm(next[n]);
    for (std::size_t i = n - 1; i-- > 0;) {
      next[i + 1] -= cprime[i] * next[i + 2];
      norm_next += std::norm(next[i + 1]);
    }
    norm_next *= dx;

    // Exact discrete balance, m the midpoint state:
    // ||psi'||^2 - ||psi||^2 = dt (-2 <m, W m> + 2 Re <m, W_L bm>) + 2 Re(m_0^* s_0).
    double absorbed = 0.0, fed = 0.0;
    for (std::size_t i = 0; i < left_end; ++i) {
      const cplx m = 0.5 * (pad[i + 1] + next[i + 1]);
      absorbed += w[i] * std::norm(m);
      fed += w[i] * std::real(std::conj(m) * 0.5 * (b_now[i] + b_next[i]));
    }
    for (std::size_t i = right_start; i < n; ++i) absorbed += w[i] * std::norm(0.5 * (pad[i + 1] + next[i + 1]));
    const double wall = 2.0 * std::real(std::conj(0.5 * (pad[1] + next[1])) * wall_source);
    const double predicted = dx * (dt * (-2.0 * absorbed + 2.0 * fed) + wall);
    const double drift = std::abs((norm_next - norm_now) - predicted) / norm0;
    st.worst_norm_drift = std::max(st.worst_norm_drift, drift);
    if (!(drift <= cfg.norm_tolerance)) {
      std::ostringstream msg;
      msg << "oracle: norm balance violated by " << drift << " at step " << step + 1;
      throw InstabilityError(msg.str());
    }
    next[0] = ghost_next;
    next[n + 1] = 0.0;
    norm_now = norm_next;
    pad.swap(next);
    b_now.swap(b_next);
    ++step;
    while (sample < steps.size() && steps[sample] == step) record(sample++);
  }
  st.steps = step;
  st.final_norm = norm_now;
  if (stats) *stats = st;
  return field;
}

WaveField evolve_delta_refined(const OracleConfig& cfg, double lambda, double center, const ExponentialSum& f,
                               const Grid& grid, const std::vector<double>& widths) {
  if (widths.size() < 2) throw DomainError("delta refinement: at least two widths required");
  std::vector<std::vector<cplx>> fields;
  for (double width : widths) {
    OracleConfig c = cfg;
    c.potential = delta_as_rectangle(lambda, center, width);
    fields.push_back(evolve(c, f, grid).psi);
  }
  WaveField out(grid, "oracle");
  out.psi = extrapolate_to_zero(widths, fields);
  const std::vector<double> fewer(widths.begin() + 1, widths.end());
  const std::vector<std::vector<cplx>> fewer_fields(fields.begin() + 1, fields.end());
  const auto coarse = fewer.size() > 1 ? extrapolate_to_zero(fewer, fewer_fields) : fewer_fields.back();
  for (std::size_t i = 0; i < out.psi.size(); ++i) out.err[i] = std::abs(out.psi[i] - coarse[i]);
  return out;
}

std::vector<SmoothingReport> smoothing_validity_sweep(const OracleConfig& cfg, const ExponentialSum& f,
                                                      const Grid& grid, const WaveField& sharp,
                                                      const std::vector<double>& epsilons) {
  if (grid.ts.size() != 1) throw DomainError("smoothing sweep: exactly one sample time required");
  if (sharp.psi.size() != grid.xs.size()) throw DomainError("smoothing sweep: sharp field does not match the grid");
  std::vector<SmoothingReport> out;
  for (double eps : epsilons) {
    OracleConfig c = cfg;
    c.epsilon = eps;
    const WaveField smooth = evolve(c, f, grid);
    SmoothingReport r;
    r.epsilon = eps;
    r.t = grid.ts[0];
    r.boundary = r.t / (2.0 * eps);
    r.xs = grid.xs;
    for (std::size_t i = 0; i < grid.xs.size(); ++i) {
      r.deviation.push_back(std::abs(smooth.psi[i] - sharp.psi[i]) / std::abs(sharp.psi[i]));
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace tunnel::oracle_tdse
