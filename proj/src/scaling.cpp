#include "qlev/scaling.hpp"

#include <cmath>
#include <stdexcept>

namespace qlev::scaling {

double Q_of_gamma(double gamma) {
  if (gamma <= 0) throw std::invalid_argument("Q_of_gamma: gamma must be > 0");
  return 2.0 / gamma + gamma / 2.0;
}

double relation_solve(double gamma, std::optional<double> alpha,
                      std::optional<double> beta, std::optional<double> eta) {
  int missing = int(!alpha) + int(!beta) + int(!eta);
  if (missing != 1)
    throw std::invalid_argument("relation_solve: exactly one unknown expected");
  double Q = Q_of_gamma(gamma);
  // alpha = 0 goes with beta = alpha^2 = 0 and hence eta = -1; any other eta
  // contradicts the trivial-curve convention.
  if (alpha && *alpha == 0.0 && eta && *eta != -1.0)
    throw std::invalid_argument("relation_solve: alpha = 0 requires eta = -1");
  if (!alpha) return (*beta - *eta - 1.0) / Q;
  if (!beta) return *alpha * Q + *eta + 1.0;
  return *beta - *alpha * Q - 1.0;
}

EtaCurves eta_curves(double gamma_sq) {
  if (gamma_sq <= 0.0 || gamma_sq > 4.0)
    throw std::invalid_argument("eta_curves: gamma^2 must lie in (0,4]");
  return EtaCurves{3.0 / gamma_sq - 0.5, 3.0 * gamma_sq / 16.0 - 0.5};
}

double watabiki_d(double kappa) {
  if (kappa < 0) throw std::invalid_argument("watabiki_d: kappa must be >= 0");
  return 1.0 + kappa / 4.0 + 0.25 * std::sqrt((4.0 + kappa) * (4.0 + kappa) + 16.0 * kappa);
}

double holder_exponent(double gamma, const std::vector<double>& boundary_strengths,
                       const std::vector<double>& interior_strengths) {
  double Q = Q_of_gamma(gamma);
  double beta_lower = 2.0 * std::sqrt(2.0);
  for (double g : boundary_strengths) beta_lower = std::max(beta_lower, g);
  for (double g : interior_strengths) beta_lower = std::max(beta_lower, g);
  double beta_upper = 2.0;
  for (double g : boundary_strengths) beta_upper = std::max(beta_upper, -g);
  if (beta_upper >= Q)
    throw std::domain_error("holder_exponent: boundary singularities too strong (beta* >= Q)");
  return (Q - beta_upper) / (Q + beta_lower);
}

ExponentRecord make_record(double gamma_sq, const std::string& curve) {
  ExponentRecord r;
  r.gamma = std::sqrt(gamma_sq);
  r.Q = Q_of_gamma(r.gamma);
  r.delta_bar = r.Q > 2.0 ? holder_exponent(r.gamma, {}, {}) : 0.0;
  r.curve = curve;
  if (curve == "upper") {
    r.kappa = gamma_sq;
  } else if (curve == "middle") {
    r.kappa = 16.0 / gamma_sq;
  } else if (curve == "trivial") {
    r.kappa = 0.0;
    r.alpha = 0.0;
    r.beta = 0.0;
    r.eta = -1.0;
    r.d = watabiki_d(0.0);
    return r;
  } else {
    throw std::invalid_argument("make_record: unknown curve tag");
  }
  r.alpha = -1.0 / std::sqrt(r.kappa);
  r.beta = r.alpha * r.alpha;
  r.eta = relation_solve(r.gamma, r.alpha, r.beta, std::nullopt);
  r.d = watabiki_d(r.kappa);
  return r;
}

}  // namespace qlev::scaling
