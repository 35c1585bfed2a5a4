#pragma once

// Continuum limit of the partial-search dynamics: psi' = A psi with A switching
// between the global generator X and the local generator Y, together with the
// Pontryagin state/costate flow and the reduced switching variables
//   phi1 = <p, (X - Y) psi>,  phi2 = <p, [X,Y] psi>,  phi3 = <p, [Y,[X,Y]] psi>.

#include <string>
#include <vector>

#include <Eigen/Core>

#include "grk/reduced_model.hpp"

namespace grk {

enum class Control : std::uint8_t { X, Y };

char control_symbol(Control control);

/// Skew-symmetric 3x3 generator.
class Generator {
 public:
  static constexpr double kSkewTolerance = 1e-14;

  /// Throws std::invalid_argument unless A + A^T = 0 within tolerance.
  static Generator from_matrix(const Eigen::Matrix3d& matrix);

  const Eigen::Matrix3d& matrix() const { return m_; }
  /// Angular speed of exp(tA): the norm of the axis vector.
  double angular_speed() const;

 private:
  explicit Generator(const Eigen::Matrix3d& m) : m_(m) {}
  Eigen::Matrix3d m_;
};

struct GeneratorPair {
  Generator X;
  Generator Y;
  double s = 0.0;  // sin(gamma)
  double c = 0.0;  // cos(gamma)

  const Generator& operator[](Control control) const { return control == Control::X ? X : Y; }
};

/// Throws std::invalid_argument unless 0 < gamma < pi/2.
GeneratorPair generators(double gamma);

/// gamma with sin(gamma) = 1/sqrt(K); throws for K <= 1.
double gamma_from_block_count(double K);

Eigen::Matrix3d bracket(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b);

/// F1 = X - Y, F2 = [X,Y], F3 = [Y,[X,Y]].
struct SwitchingBasis {
  Eigen::Matrix3d F1;
  Eigen::Matrix3d F2;
  Eigen::Matrix3d F3;
};

SwitchingBasis switching_basis(const GeneratorPair& gens);

/// Largest entrywise violation over the six commutation identities
///   [F1,X] = F2, [F1,Y] = F2, [F2,X] = -s^2 F1,
///   [F2,Y] = -F3, [F3,X] = s^2 F2, [F3,Y] = F2.
double lie_closure_residual(double gamma);

/// exp(tA) by the axis-angle formula.
ReducedOperator rotation(const Generator& a, double t);

struct PhiTriple {
  double phi1 = 0.0;
  double phi2 = 0.0;
  double phi3 = 0.0;
};

/// Closed-form reduced variables along an X-arc started at (0, a, b).
PhiTriple phi_arc_X(double a, double b, double gamma, double t);
/// Closed-form reduced variables along a Y-arc started at (0, a, b).
PhiTriple phi_arc_Y(double a, double b, double t);

/// First positive zero of phi1 on an X-arc from a switching point: pi / sin(gamma).
double first_switch_X(double gamma);

/// Smallest tau in (0, 2pi] with a cos(tau/2) = b sin(tau/2); 2pi when a = 0.
/// Throws std::invalid_argument for (a, b) = (0, 0).
double first_switch_Y(double a, double b);

/// Right-hand sides of the reduced linear systems on each arc type.
PhiTriple reduced_rhs(Control control, double gamma, const PhiTriple& phi);

struct ExtremalSample {
  double t = 0.0;
  Eigen::Vector3d psi = Eigen::Vector3d::Zero();
  Eigen::Vector3d p = Eigen::Vector3d::Zero();
  PhiTriple phi;
  Control control = Control::X;
  double hamiltonian = 0.0;
};

struct Arc {
  Control control = Control::X;
  double start = 0.0;
  double end = 0.0;
  /// True when the arc starts (resp. ends) at a located zero of the switching
  /// function rather than at the trajectory boundary.
  bool starts_at_switch = false;
  bool ends_at_switch = false;

  double duration() const { return end - start; }
};

struct ExtremalOptions {
  /// Spacing of recorded samples; switching instants are always recorded.
  double sample_dt = 1e-2;
  /// Spacing of the sign scan that brackets zeros of the switching function.
  double scan_dt = 1e-3;
  /// Bisection stops when the bracket is shorter than this.
  double switch_tolerance = 1e-12;
  /// |phi2| below this at a located switch is treated as a singular point.
  double singular_tolerance = 1e-10;
};

struct ExtremalTrajectory {
  std::vector<ExtremalSample> samples;
  std::vector<double> switching_times;
  std::vector<Arc> arcs;
  bool halted = false;
  std::string diagnostic;
};

/// Integrates psi' = A psi, p' = A p (= -A^T p since A is skew) from t = 0 to
/// horizon, with A = X while Phi > 0 and A = Y while Phi < 0. Arcs are
/// advanced with closed-form rotations. Throws std::invalid_argument when p0 = 0.
ExtremalTrajectory simulate_extremal(double gamma, const ReducedState& psi0,
                                     const Eigen::Vector3d& p0, double horizon,
                                     const ExtremalOptions& options = {});

/// Extremal anchored at the terminal plane: p(T) is proportional to the u-axis
/// and scaled so that H = 0, then the system is integrated backwards over
/// `horizon`. Returned in forward time on [0, horizon]. The anchor is a
/// construction; no costate boundary condition is implied by the dynamics.
/// Throws std::invalid_argument unless psi_T lies on the plane (|u| <= 1e-12)
/// with a nonzero target component.
ExtremalTrajectory terminal_anchored_extremal(double gamma, const ReducedState& psi_T,
                                              double horizon,
                                              const ExtremalOptions& options = {});

struct CompressionReport {
  double s = 0.0;
  double ell = 0.0;
  double tau_x = 0.0;        // pi / s
  double length_yxy = 0.0;   // 2 pi + pi / s
  double length_xyx = 0.0;   // 2 pi / s + ell
  double replacement_yxy = 0.0;  // single X-arc, tau_x
  double replacement_xyx = 0.0;  // single Y-arc, ell
  double gap_yxy = 0.0;
  double gap_xyx = 0.0;
};

/// Throws std::invalid_argument unless 0 < ell < 2 pi and 0 < gamma < pi/2.
CompressionReport compression_report(double gamma, double ell);

struct EndpointReport {
  double gamma = 0.0;
  double tau = 0.0;
  /// max |<u|psi_Y(t)> - <u|psi_Y(0)>| over a grid of [0, tau]
  double y_arc_u_drift = 0.0;
  double x_arc_u = 0.0;              // <u|exp(tau X) psi0>
  double x_arc_u_closed_form = 0.0;  // cos(gamma) cos(s tau)
  double x_arc_deviation = 0.0;
};

/// Leading-order continuum initial state (0, sin gamma, cos gamma).
ReducedState continuum_initial_state(double gamma);

EndpointReport endpoint_checks(double gamma, double tau, int grid_points = 1000);

}  // namespace grk
