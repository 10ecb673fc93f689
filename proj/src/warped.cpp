#include "hgopt/warped.h"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hgopt {

WarpFunction WarpFunction::constant(double c) {
  if (!(c > 0.0)) throw ContractViolation("warp: constant must be positive");
  return {"flat", [c](double) { return WarpValues{c, 0.0, 0.0}; }};
}

WarpFunction WarpFunction::cosh() {
  return {"cosh", [](double r) {
            const double c = std::cosh(r);
            return WarpValues{c, std::sinh(r), c};
          }};
}

WarpFunction WarpFunction::exp_r2() {
  return {"exp_r2", [](double r) {
            const double e = std::exp(r * r);
            return WarpValues{e, 2.0 * r * e, (2.0 + 4.0 * r * r) * e};
          }};
}

WarpFunction WarpFunction::t_squared() {
  return {"t2", [](double r) { return WarpValues{r * r, 2.0 * r, 2.0}; }};
}

WarpFunction WarpFunction::by_name(const std::string& name) {
  if (name == "cosh") return cosh();
  if (name == "exp_r2") return exp_r2();
  if (name == "t2") return t_squared();
  if (name == "flat") return constant(1.0);
  throw ContractViolation("unknown warp function '" + name + "'");
}

GeodesicState warped_geodesic_ode(const GeodesicState& s, const WarpFunction& warp) {
  const auto [r, theta, dr, dtheta] = s;
  (void)theta;
  const WarpValues w = warp(r);
  return {dr, dtheta, w.phi * w.dphi * dtheta * dtheta, -2.0 * (w.dphi / w.phi) * dr * dtheta};
}

namespace {

template <std::size_t N>
std::array<double, N> axpy(const std::array<double, N>& x, double a,
                           const std::array<double, N>& y) {
  std::array<double, N> out;
  for (std::size_t i = 0; i < N; ++i) out[i] = x[i] + a * y[i];
  return out;
}

// Classical fixed-step RK4 over unit time. `rhs` evaluates the derivative and
// must reject states outside the chart by throwing.
template <std::size_t N, typename Rhs>
std::array<double, N> rk4(std::array<double, N> s, int steps, Rhs rhs) {
  const double h = 1.0 / steps;
  for (int k = 0; k < steps; ++k) {
    const auto k1 = rhs(s);
    const auto k2 = rhs(axpy(s, 0.5 * h, k1));
    const auto k3 = rhs(axpy(s, 0.5 * h, k2));
    const auto k4 = rhs(axpy(s, h, k3));
    for (std::size_t i = 0; i < N; ++i) {
      s[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
  }
  for (double v : s) {
    if (!std::isfinite(v)) throw NumericalFailure("warped: geodesic integration overflowed", v);
  }
  return s;
}

}  // namespace

WarpedProduct::WarpedProduct(WarpFunction warp, Interval interval, WarpedOptions options)
    : warp_(std::move(warp)), interval_(interval), options_(options) {
  if (!(interval_.lo < interval_.hi)) throw ContractViolation("warped: empty interval");
  if (!(options_.max_arc_step > 0.0) || options_.min_steps < 1 || !(options_.shoot_tol > 0.0)) {
    throw ContractViolation("warped: invalid integrator options");
  }
  const double lo = std::max(interval_.lo, -5.0);
  const double hi = std::min(interval_.hi, 5.0);
  constexpr int kSamples = 1001;
  for (int k = 1; k < kSamples; ++k) {
    const double r = lo + (hi - lo) * k / kSamples;
    const WarpValues w = warp_(r);
    if (!(w.phi > 0.0)) throw ContractViolation("warped: phi must be positive on the interval");
    if (w.ddphi < -1e-12) throw ContractViolation("warped: phi must be convex on the interval");
  }
}

std::string WarpedProduct::name() const {
  std::ostringstream os;
  os << "warped(" << warp_.name() << ", (" << interval_.lo << ", " << interval_.hi << "))";
  return os.str();
}

int WarpedProduct::steps_for(double norm) const {
  const double needed = std::ceil(norm / options_.max_arc_step);
  return std::max(options_.min_steps, static_cast<int>(std::min(needed, 1e7)));
}

GeodesicState WarpedProduct::integrate(const GeodesicState& s, int steps) const {
  return rk4(s, steps, [this](const GeodesicState& st) {
    if (!interval_.contains(st[0])) {
      throw DomainExitError("warped: geodesic left the interval at r = " +
                            std::to_string(st[0]));
    }
    return warped_geodesic_ode(st, warp_);
  });
}

double WarpedProduct::metric_norm(double r, double vr, double vtheta) const {
  const double phi = warp_(r).phi;
  return std::sqrt(vr * vr + phi * phi * vtheta * vtheta);
}

double WarpedProduct::inner_impl(const Vector& base, const Vector& u, const Vector& v) const {
  const double phi = warp_(base(0)).phi;
  return u(0) * v(0) + phi * phi * u(1) * v(1);
}

Vector WarpedProduct::exp_impl(const Vector& base, const Vector& v) const {
  const int steps = steps_for(metric_norm(base(0), v(0), v(1)));
  const GeodesicState end = integrate({base(0), base(1), v(0), v(1)}, steps);
  return Vector{{end[0], end[1]}};
}

GeodesicFlow WarpedProduct::integrate_with_jacobian(const GeodesicState& s, int steps) const {
  // Geodesic state plus the 4x2 sensitivity of the state with respect to the
  // initial velocity, integrated with the same RK4 scheme. RK4 on the
  // augmented system yields the exact derivative of the discrete flow.
  using State = std::array<double, 12>;
  State start{};
  std::copy(s.begin(), s.end(), start.begin());
  start[4 + 2 * 2 + 0] = 1.0;  // d p / d v_r
  start[4 + 3 * 2 + 1] = 1.0;  // d q / d v_theta
  const State end = rk4(start, steps, [this](const State& st) {
    if (!interval_.contains(st[0])) {
      throw DomainExitError("warped: geodesic left the interval at r = " +
                            std::to_string(st[0]));
    }
    const WarpValues w = warp_(st[0]);
    const double p = st[2];
    const double q = st[3];
    const double a = w.phi * w.dphi;
    const double b = w.dphi / w.phi;
    const double da = w.dphi * w.dphi + w.phi * w.ddphi;
    const double db = w.ddphi / w.phi - b * b;
    State d{};
    d[0] = p;
    d[1] = q;
    d[2] = a * q * q;
    d[3] = -2.0 * b * p * q;
    for (int c = 0; c < 2; ++c) {
      const double sr = st[4 + 0 * 2 + c];
      const double sp = st[4 + 2 * 2 + c];
      const double sq = st[4 + 3 * 2 + c];
      d[4 + 0 * 2 + c] = sp;
      d[4 + 1 * 2 + c] = sq;
      d[4 + 2 * 2 + c] = da * q * q * sr + 2.0 * a * q * sq;
      d[4 + 3 * 2 + c] = -2.0 * db * p * q * sr - 2.0 * b * q * sp - 2.0 * b * p * sq;
    }
    return d;
  });
  GeodesicFlow flow;
  std::copy(end.begin(), end.begin() + 4, flow.state.begin());
  flow.jacobian << end[4], end[5], end[6], end[7];
  return flow;
}

// Damped Newton on v -> Exp_x(v) - y. Iterates first on a coarse time grid
// (cheap, converges to within the coarse discretization error) and then on
// the production grid. Returns the best iterate; *residual receives its
// residual on the production grid.
Vector WarpedProduct::shoot(const Vector& x, const Vector& y, const Vector& guess,
                            double max_norm, double* residual) const {
  const double phi_y = warp_(y(0)).phi;
  struct Eval {
    Eigen::Vector2d e;
    Eigen::Matrix2d jac;
    double res = std::numeric_limits<double>::infinity();
  };
  auto evaluate = [&](const Eigen::Vector2d& v, bool coarse) {
    const double norm = metric_norm(x(0), v(0), v(1));
    if (norm > max_norm) throw NumericalFailure("warped: shooting velocity too long", norm);
    int steps = steps_for(norm);
    if (coarse) steps = std::max(16, steps / 10);
    const GeodesicFlow flow = integrate_with_jacobian({x(0), x(1), v(0), v(1)}, steps);
    Eval ev;
    ev.e = Eigen::Vector2d(flow.state[0] - y(0), flow.state[1] - y(1));
    ev.jac = flow.jacobian;
    ev.res = std::sqrt(ev.e(0) * ev.e(0) + phi_y * phi_y * ev.e(1) * ev.e(1));
    return ev;
  };

  Eigen::Vector2d v(guess(0), guess(1));
  auto newton = [&](bool coarse, double tol_factor) {
    Eval cur;
    try {
      cur = evaluate(v, coarse);
    } catch (const Error&) {
      return cur;
    }
    for (int it = 0; it < options_.max_newton_iters; ++it) {
      if (cur.res <= tol_factor * (1.0 + metric_norm(x(0), v(0), v(1)))) break;
      const Eigen::Vector2d step = cur.jac.partialPivLu().solve(-cur.e);
      if (!step.allFinite()) break;
      bool accepted = false;
      double lambda = 1.0;
      for (int halving = 0; halving < 40; ++halving, lambda *= 0.5) {
        const Eigen::Vector2d trial = v + lambda * step;
        try {
          Eval ev = evaluate(trial, coarse);
          if (ev.res < cur.res) {
            v = trial;
            cur = ev;
            accepted = true;
            break;
          }
        } catch (const DomainExitError&) {
        } catch (const NumericalFailure&) {
        }
      }
      if (!accepted) break;
    }
    return cur;
  };

  newton(true, 1e-6);
  const Eval fine = newton(false, options_.shoot_tol);
  *residual = fine.res;
  return Vector{{v(0), v(1)}};
}

Vector WarpedProduct::log_impl(const Vector& x, const Vector& y) const {
  double residual = 0.0;
  const Vector direct = y - x;

  // Radial to the radius r_m where phi is smallest, along the fiber, radial
  // again: a path whose length bounds the geodesic distance.
  double r_min = x(0);
  double phi_min = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= 32; ++k) {
    const double r = x(0) + (static_cast<double>(k) / 32) * direct(0);
    const double phi = warp_(r).phi;
    if (phi < phi_min) {
      phi_min = phi;
      r_min = r;
    }
  }
  const double bound = std::abs(x(0) - r_min) + phi_min * std::abs(direct(1)) +
                       std::abs(y(0) - r_min);
  const double max_norm = 2.0 * bound + 1e-12;

  // Rounding floor of the endpoint coordinates, in the metric at y.
  const double eps = std::numeric_limits<double>::epsilon();
  const double floor = 4.0 * eps *
                       (std::max(std::abs(x(0)), std::abs(y(0))) +
                        warp_(y(0)).phi * std::max(std::abs(x(1)), std::abs(y(1))));
  auto converged = [&](const Vector& sol, double res) {
    return res <= options_.shoot_tol * (1.0 + metric_norm(x(0), sol(0), sol(1))) + floor;
  };

  // Clairaut-scaled guess: phi^2 theta' is constant along geodesics.
  const double phi_x = warp_(x(0)).phi;
  Vector v = shoot(x, y, Vector{{direct(0), direct(1) * (phi_min * phi_min) / (phi_x * phi_x)}},
                   max_norm, &residual);
  if (converged(v, residual)) return v;
  v = shoot(x, y, direct, max_norm, &residual);
  if (converged(v, residual)) return v;

  // Continuation along the coordinate segment from x to y.
  constexpr int kStages = 16;
  Vector guess = direct / kStages;
  for (int k = 1; k <= kStages; ++k) {
    const Vector target = x + (static_cast<double>(k) / kStages) * direct;
    v = shoot(x, target, guess, max_norm, &residual);
    guess = v * (static_cast<double>(k + 1) / k);
  }
  if (converged(v, residual)) return v;

  // Continuation in theta from the radial geodesic to (y_r, x_theta), which
  // is exact, with linear extrapolation of the solution path.
  for (int stages : {32, 256}) {
    Vector prev{{direct(0), 0.0}};
    v = prev;
    bool ok = true;
    for (int k = 1; k <= stages && ok; ++k) {
      const Vector target{{y(0), x(1) + (static_cast<double>(k) / stages) * direct(1)}};
      const Vector next_guess = k == 1 ? v : Vector(2.0 * v - prev);
      prev = v;
      v = shoot(x, target, next_guess, max_norm, &residual);
      ok = converged(v, residual);
    }
    if (ok) return v;
  }
  throw NumericalFailure("warped: log shooting did not converge", residual);
}

Vector WarpedProduct::transport_impl(const Vector& from, const Vector& v,
                                     const Vector& to) const {
  const Vector w = log_impl(from, to);
  const int steps = steps_for(metric_norm(from(0), w(0), w(1)));
  using State = std::array<double, 6>;
  const State start{from(0), from(1), w(0), w(1), v(0), v(1)};
  const State end = rk4(start, steps, [this](const State& s) {
    if (!interval_.contains(s[0])) {
      throw DomainExitError("warped: transport left the interval at r = " +
                            std::to_string(s[0]));
    }
    const WarpValues wv = warp_(s[0]);
    const double ratio = wv.dphi / wv.phi;
    return State{s[2],
                 s[3],
                 wv.phi * wv.dphi * s[3] * s[3],
                 -2.0 * ratio * s[2] * s[3],
                 wv.phi * wv.dphi * s[3] * s[5],
                 -ratio * (s[2] * s[5] + s[3] * s[4])};
  });
  return Vector{{end[4], end[5]}};
}

double WarpedProduct::membership_error(const Vector& coords) const {
  return interval_.contains(coords(0)) ? 0.0 : std::numeric_limits<double>::infinity();
}

double WarpedProduct::tangent_error(const Vector&, const Vector&) const { return 0.0; }

std::vector<Vector> WarpedProduct::tangent_basis_impl(const Vector& base) const {
  const double phi = warp_(base(0)).phi;
  return {Vector{{1.0, 0.0}}, Vector{{0.0, 1.0 / phi}}};
}

Vector WarpedProduct::origin_impl() const {
  double r0 = 0.0;
  if (!interval_.contains(0.0)) {
    if (std::isfinite(interval_.lo) && std::isfinite(interval_.hi)) {
      r0 = 0.5 * (interval_.lo + interval_.hi);
    } else if (std::isfinite(interval_.lo)) {
      r0 = interval_.lo + 1.0;
    } else {
      r0 = interval_.hi - 1.0;
    }
  }
  return Vector{{r0, 0.0}};
}

double WarpedProduct::sectional_curvature_bound(Interval region, int samples) const {
  if (!std::isfinite(region.lo) || !std::isfinite(region.hi) || region.lo > region.hi) {
    throw ContractViolation("sectional_curvature_bound: region must be a finite interval");
  }
  if (region.lo < interval_.lo || region.hi > interval_.hi) {
    throw ContractViolation("sectional_curvature_bound: region must lie inside the interval");
  }
  double bound = std::numeric_limits<double>::infinity();
  const int n = std::max(samples, 2);
  for (int k = 0; k < n; ++k) {
    const double r = region.lo + (region.hi - region.lo) * k / (n - 1);
    if (!interval_.contains(r)) continue;
    const WarpValues w = warp_(r);
    const double ratio = w.dphi / w.phi;
    bound = std::min({bound, -w.ddphi / w.phi, -ratio * ratio});
  }
  return bound + 0.0;  // normalizes -0.0 for the flat case
}

}  // namespace hgopt
