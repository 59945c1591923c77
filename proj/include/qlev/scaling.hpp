#pragma once

#include <optional>
#include <string>
#include <vector>

namespace qlev::scaling {

// Collected exponents for one (gamma^2, eta) point. Q = 2/gamma + gamma/2;
// on the upper curve kappa = gamma^2, on the middle curve kappa = 16/gamma^2;
// alpha = -1/sqrt(kappa) and beta = alpha^2 where applicable.
struct ExponentRecord {
  double gamma = 0.0;
  double kappa = 0.0;
  double Q = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double eta = 0.0;
  double d = 0.0;
  double delta_bar = 0.0;  // Holder bound without singularities, (Q-2)/(Q+2*sqrt(2))
  std::string curve;       // "upper", "middle", or "trivial"
};

double Q_of_gamma(double gamma);

// Solves alpha*Q(gamma) = beta - eta - 1 for whichever of {alpha, beta, eta}
// is absent; gamma must always be supplied. Exactly one of the three must be
// std::nullopt.
double relation_solve(double gamma, std::optional<double> alpha,
                      std::optional<double> beta, std::optional<double> eta);

struct EtaCurves {
  double upper;   // eta = 3/gamma^2 - 1/2   (kappa = gamma^2)
  double middle;  // eta = 3*gamma^2/16 - 1/2 (kappa = 16/gamma^2)
};
EtaCurves eta_curves(double gamma_sq);

// Heuristic dimension d(kappa) = 1 + kappa/4 + sqrt((4+kappa)^2 + 16 kappa)/4.
double watabiki_d(double kappa);

// Holder exponent bound for the conformal map of a disk with log
// singularities: beta_star_lower = max(2*sqrt(2), all strengths),
// beta_star_upper = max(2, -(boundary strengths)), result
// (Q - beta_star_upper) / (Q + beta_star_lower). Throws std::domain_error if
// beta_star_upper >= Q.
double holder_exponent(double gamma, const std::vector<double>& boundary_strengths,
                       const std::vector<double>& interior_strengths);

ExponentRecord make_record(double gamma_sq, const std::string& curve);

}  // namespace qlev::scaling
