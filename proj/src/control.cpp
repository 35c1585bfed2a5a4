#include "grk/control.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

namespace grk {

namespace {

constexpr double kPi = std::numbers::pi;

void require_gamma(double gamma) {
  if (!(gamma > 0.0 && gamma < kPi / 2.0)) {
    throw std::invalid_argument("gamma must lie in (0, pi/2), got " + std::to_string(gamma));
  }
}

Eigen::Vector3d axis_of(const Eigen::Matrix3d& a) {
  return {a(2, 1), a(0, 2), a(1, 0)};
}

}  // namespace

char control_symbol(Control control) { return control == Control::X ? 'X' : 'Y'; }

Generator Generator::from_matrix(const Eigen::Matrix3d& matrix) {
  if ((matrix + matrix.transpose()).cwiseAbs().maxCoeff() > kSkewTolerance) {
    throw std::invalid_argument("generator must be skew-symmetric");
  }
  return Generator(matrix);
}

double Generator::angular_speed() const { return axis_of(m_).norm(); }

GeneratorPair generators(double gamma) {
  require_gamma(gamma);
  const double s = std::sin(gamma);
  const double c = std::cos(gamma);
  Eigen::Matrix3d x = Eigen::Matrix3d::Zero();
  x(0, 1) = s * s;
  x(0, 2) = s * c;
  x(1, 0) = -x(0, 1);
  x(2, 0) = -x(0, 2);
  Eigen::Matrix3d y = Eigen::Matrix3d::Zero();
  y(0, 1) = 1.0;
  y(1, 0) = -1.0;
  return {Generator::from_matrix(x), Generator::from_matrix(y), s, c};
}

double gamma_from_block_count(double K) {
  if (!(K > 1.0)) throw std::invalid_argument("block count K must exceed 1");
  return std::asin(1.0 / std::sqrt(K));
}

Eigen::Matrix3d bracket(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b) {
  return a * b - b * a;
}

SwitchingBasis switching_basis(const GeneratorPair& gens) {
  const Eigen::Matrix3d& x = gens.X.matrix();
  const Eigen::Matrix3d& y = gens.Y.matrix();
  SwitchingBasis f;
  f.F1 = x - y;
  f.F2 = bracket(x, y);
  f.F3 = bracket(y, f.F2);
  return f;
}

double lie_closure_residual(double gamma) {
  const GeneratorPair g = generators(gamma);
  const SwitchingBasis f = switching_basis(g);
  const Eigen::Matrix3d& x = g.X.matrix();
  const Eigen::Matrix3d& y = g.Y.matrix();
  const double s2 = g.s * g.s;
  const Eigen::Matrix3d deviations[] = {
      bracket(f.F1, x) - f.F2,      bracket(f.F1, y) - f.F2, bracket(f.F2, x) + s2 * f.F1,
      bracket(f.F2, y) + f.F3,      bracket(f.F3, x) - s2 * f.F2, bracket(f.F3, y) - f.F2,
  };
  double worst = 0.0;
  for (const auto& d : deviations) worst = std::max(worst, d.cwiseAbs().maxCoeff());
  return worst;
}

ReducedOperator rotation(const Generator& a, double t) {
  const Eigen::Matrix3d& m = a.matrix();
  const double w = a.angular_speed();
  if (w == 0.0) return ReducedOperator::identity();
  const double angle = w * t;
  const Eigen::Matrix3d r = Eigen::Matrix3d::Identity() + (std::sin(angle) / w) * m +
                            ((1.0 - std::cos(angle)) / (w * w)) * (m * m);
  return ReducedOperator::unchecked(r);
}

PhiTriple phi_arc_X(double a, double b, double gamma, double t) {
  const double s = std::sin(gamma);
  const double st = std::sin(s * t);
  return {a / s * st, a * std::cos(s * t), b + a * s * st};
}

PhiTriple phi_arc_Y(double a, double b, double t) {
  const double st = std::sin(t);
  const double ct = std::cos(t);
  return {a * st + b * (ct - 1.0), a * ct - b * st, a * st + b * ct};
}

double first_switch_X(double gamma) {
  require_gamma(gamma);
  return kPi / std::sin(gamma);
}

double first_switch_Y(double a, double b) {
  if (a == 0.0 && b == 0.0) {
    throw std::invalid_argument("degenerate reduced data (a, b) = (0, 0)");
  }
  if (a == 0.0) return 2.0 * kPi;
  double half = std::atan2(a, b);
  if (half <= 0.0) half += kPi;
  return 2.0 * half;
}

PhiTriple reduced_rhs(Control control, double gamma, const PhiTriple& phi) {
  if (control == Control::X) {
    const double s2 = std::sin(gamma) * std::sin(gamma);
    return {phi.phi2, -s2 * phi.phi1, s2 * phi.phi2};
  }
  return {phi.phi2, -phi.phi3, phi.phi2};
}

namespace {

struct PhaseState {
  Eigen::Vector3d psi;
  Eigen::Vector3d p;
};

class ExtremalIntegrator {
 public:
  ExtremalIntegrator(double gamma, double direction, const ExtremalOptions& options)
      : gens_(generators(gamma)),
        basis_(switching_basis(gens_)),
        gamma_(gamma),
        direction_(direction),
        options_(options) {}

  ExtremalTrajectory run(const PhaseState& start, double horizon) {
    ExtremalTrajectory traj;
    PhaseState cur = start;
    double t = 0.0;
    bool at_switch = false;

    PhiTriple phi = phis(cur);
    Control control;
    if (std::abs(phi.phi1) > options_.singular_tolerance) {
      control = phi.phi1 > 0.0 ? Control::X : Control::Y;
    } else if (std::abs(phi.phi2) > options_.singular_tolerance) {
      // Leaving the switching surface: the sign of dPhi/dt picks the arc.
      control = direction_ * phi.phi2 > 0.0 ? Control::X : Control::Y;
      at_switch = true;
    } else {
      traj.halted = true;
      traj.diagnostic = "Phi and phi2 vanish at t = 0; no control is selected";
      traj.samples.push_back(sample(0.0, cur, Control::X));
      return traj;
    }

    double next_sample = 0.0;
    double last_regular = -1.0;
    std::uint64_t sample_index = 0;
    while (t < horizon) {
      const double remaining = horizon - t;
      const double len = next_switch(cur, control, at_switch, remaining);
      const bool switched = len < remaining;
      const double arc_len = switched ? len : remaining;

      while (next_sample <= t + arc_len && next_sample <= horizon) {
        traj.samples.push_back(sample(next_sample, advance(cur, control, next_sample - t), control));
        last_regular = next_sample;
        next_sample = static_cast<double>(++sample_index) * options_.sample_dt;
      }

      Arc arc;
      arc.control = control;
      arc.start = t;
      arc.end = t + arc_len;
      arc.starts_at_switch = at_switch;
      arc.ends_at_switch = switched;
      traj.arcs.push_back(arc);

      cur = advance(cur, control, arc_len);
      t += arc_len;
      if (!switched) break;

      traj.switching_times.push_back(t);
      ExtremalSample at = sample(t, cur, control);
      at.control = control == Control::X ? Control::Y : Control::X;
      traj.samples.push_back(at);

      phi = phis(cur);
      if (std::abs(phi.phi2) <= options_.singular_tolerance) {
        traj.halted = true;
        traj.diagnostic = "Phi and phi2 vanish together at t = " + std::to_string(t) +
                          "; trajectory halted at a potential singular point";
        break;
      }
      control = at.control;
      at_switch = true;
    }
    if (!traj.halted && last_regular < horizon) {
      traj.samples.push_back(sample(horizon, cur, control));
    }
    std::stable_sort(traj.samples.begin(), traj.samples.end(),
                     [](const ExtremalSample& a, const ExtremalSample& b) { return a.t < b.t; });
    return traj;
  }

 private:
  PhiTriple phis(const PhaseState& st) const {
    return {st.p.dot(basis_.F1 * st.psi), st.p.dot(basis_.F2 * st.psi),
            st.p.dot(basis_.F3 * st.psi)};
  }

  double switching_function(const PhaseState& st) const {
    return st.p.dot(basis_.F1 * st.psi);
  }

  PhaseState advance(const PhaseState& st, Control control, double dt) const {
    const Eigen::Matrix3d r = rotation(gens_[control], direction_ * dt).matrix();
    return {r * st.psi, r * st.p};
  }

  ExtremalSample sample(double t, const PhaseState& st, Control control) const {
    ExtremalSample out;
    out.t = t;
    out.psi = st.psi;
    out.p = st.p;
    out.phi = phis(st);
    out.control = control;
    out.hamiltonian = std::max(st.p.dot(gens_.X.matrix() * st.psi),
                               st.p.dot(gens_.Y.matrix() * st.psi)) -
                      1.0;
    return out;
  }

  double phi_along(const PhaseState& st, Control control, double dt) const {
    return switching_function(advance(st, control, dt));
  }

  // Bisection on Phi over [lo, hi] with a sign change; returns the midpoint.
  double bisect(const PhaseState& st, Control control, double lo, double hi) const {
    double flo = phi_along(st, control, lo);
    while (hi - lo > options_.switch_tolerance) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      const double fm = phi_along(st, control, mid);
      if ((fm > 0.0) == (flo > 0.0) && fm != 0.0) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  }

  // Arc length until Phi next changes sign, or a value >= limit when it does not.
  double next_switch(const PhaseState& st, Control control, bool at_switch, double limit) const {
    const bool positive = control == Control::X;
    auto crossed = [&](double dt) {
      const double f = phi_along(st, control, dt);
      return positive ? f < 0.0 : f > 0.0;
    };

    double scan_from = 0.0;
    double predicted = limit;
    if (at_switch) {
      const PhiTriple phi = phis(st);
      // Forward-time arc data; a backward pass sees phi2 with flipped sign.
      const double a = direction_ * phi.phi2;
      predicted = control == Control::X ? first_switch_X(gamma_) : first_switch_Y(a, phi.phi3);
      scan_from = std::min(options_.scan_dt, 0.25 * predicted);
    }

    const double dt = options_.scan_dt;
    double prev = scan_from;
    const double scan_to = std::min(limit, at_switch ? predicted - scan_from : limit);
    for (double cur = prev + dt; prev < scan_to; cur = prev + dt) {
      cur = std::min(cur, scan_to);
      if (crossed(cur)) return bisect(st, control, prev, cur);
      prev = cur;
    }
    if (at_switch && predicted - scan_from < limit) {
      const double hi = std::min(predicted + scan_from, limit);
      if (crossed(hi)) return bisect(st, control, std::max(prev, 0.0), hi);
      // Grazing return: continue scanning past the prediction.
      prev = hi;
      for (double cur = hi + dt; prev < limit; cur = prev + dt) {
        cur = std::min(cur, limit);
        if (crossed(cur)) return bisect(st, control, prev, cur);
        prev = cur;
      }
    }
    return limit;
  }

  GeneratorPair gens_;
  SwitchingBasis basis_;
  double gamma_;
  double direction_;
  ExtremalOptions options_;
};

void validate_options(const ExtremalOptions& options, double horizon) {
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) {
    throw std::invalid_argument("horizon must be finite and nonnegative");
  }
  if (!(options.sample_dt > 0.0) || !(options.scan_dt > 0.0) ||
      !(options.switch_tolerance > 0.0)) {
    throw std::invalid_argument("extremal step sizes and tolerances must be positive");
  }
}

}  // namespace

ExtremalTrajectory simulate_extremal(double gamma, const ReducedState& psi0,
                                     const Eigen::Vector3d& p0, double horizon,
                                     const ExtremalOptions& options) {
  require_gamma(gamma);
  validate_options(options, horizon);
  if (p0.isZero(0.0)) throw std::invalid_argument("initial costate must be nonzero");
  ExtremalIntegrator integrator(gamma, 1.0, options);
  return integrator.run({psi0.components(), p0}, horizon);
}

ExtremalTrajectory terminal_anchored_extremal(double gamma, const ReducedState& psi_T,
                                              double horizon, const ExtremalOptions& options) {
  require_gamma(gamma);
  validate_options(options, horizon);
  if (std::abs(psi_T.u()) > 1e-12) {
    throw std::invalid_argument("terminal state must lie on the plane u = 0");
  }
  if (psi_T.target() == 0.0) {
    throw std::invalid_argument("terminal state needs a nonzero target amplitude");
  }
  const double s = std::sin(gamma);
  const double c = std::cos(gamma);
  // <p, X psi> = -lambda s c psi_t and <p, Y psi> = 0, so H = 0 fixes lambda.
  const double lambda = -1.0 / (s * c * psi_T.target());
  const Eigen::Vector3d p_T = lambda * Eigen::Vector3d::UnitZ();

  ExtremalIntegrator integrator(gamma, -1.0, options);
  ExtremalTrajectory back = integrator.run({psi_T.components(), p_T}, horizon);

  ExtremalTrajectory fwd;
  fwd.halted = back.halted;
  fwd.diagnostic = back.diagnostic;
  fwd.samples.reserve(back.samples.size());
  for (auto it = back.samples.rbegin(); it != back.samples.rend(); ++it) {
    ExtremalSample smp = *it;
    smp.t = horizon - smp.t;
    fwd.samples.push_back(smp);
  }
  // A switch sample carries the control of the later arc in backward time,
  // which is the earlier arc in forward time; restore forward labelling.
  for (std::size_t i = 0; i < fwd.samples.size(); ++i) {
    for (auto it = back.arcs.rbegin(); it != back.arcs.rend(); ++it) {
      const double start = horizon - it->end;
      const double end = horizon - it->start;
      if (fwd.samples[i].t >= start && fwd.samples[i].t < end) {
        fwd.samples[i].control = it->control;
        break;
      }
    }
  }
  for (auto it = back.switching_times.rbegin(); it != back.switching_times.rend(); ++it) {
    fwd.switching_times.push_back(horizon - *it);
  }
  for (auto it = back.arcs.rbegin(); it != back.arcs.rend(); ++it) {
    Arc arc;
    arc.control = it->control;
    arc.start = horizon - it->end;
    arc.end = horizon - it->start;
    arc.starts_at_switch = it->ends_at_switch;
    arc.ends_at_switch = it->starts_at_switch;
    fwd.arcs.push_back(arc);
  }
  return fwd;
}

CompressionReport compression_report(double gamma, double ell) {
  require_gamma(gamma);
  if (!(ell > 0.0 && ell < 2.0 * kPi)) {
    throw std::invalid_argument("Y-arc length must lie in (0, 2 pi)");
  }
  CompressionReport r;
  r.s = std::sin(gamma);
  r.ell = ell;
  r.tau_x = kPi / r.s;
  r.length_yxy = 2.0 * kPi + r.tau_x;
  r.length_xyx = 2.0 * kPi / r.s + ell;
  r.replacement_yxy = r.tau_x;
  r.replacement_xyx = ell;
  r.gap_yxy = r.length_yxy - r.replacement_yxy;
  r.gap_xyx = r.length_xyx - r.replacement_xyx;
  return r;
}

ReducedState continuum_initial_state(double gamma) {
  require_gamma(gamma);
  return ReducedState::unchecked({0.0, std::sin(gamma), std::cos(gamma)});
}

EndpointReport endpoint_checks(double gamma, double tau, int grid_points) {
  if (!(tau >= 0.0)) throw std::invalid_argument("tau must be nonnegative");
  if (grid_points < 1) throw std::invalid_argument("grid needs at least one point");
  const GeneratorPair g = generators(gamma);
  const Eigen::Vector3d psi0 = continuum_initial_state(gamma).components();

  EndpointReport r;
  r.gamma = gamma;
  r.tau = tau;
  for (int i = 0; i <= grid_points; ++i) {
    const double t = tau * static_cast<double>(i) / grid_points;
    const double uy = (rotation(g.Y, t).matrix() * psi0)[2];
    r.y_arc_u_drift = std::max(r.y_arc_u_drift, std::abs(uy - psi0[2]));
    const double ux = (rotation(g.X, t).matrix() * psi0)[2];
    r.x_arc_deviation = std::max(r.x_arc_deviation, std::abs(ux - g.c * std::cos(g.s * t)));
  }
  r.x_arc_u = (rotation(g.X, tau).matrix() * psi0)[2];
  r.x_arc_u_closed_form = g.c * std::cos(g.s * tau);
  return r;
}

}  // namespace grk
