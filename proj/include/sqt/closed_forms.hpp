#pragma once

#include <functional>

#include "sqt/potentials.hpp"
#include "sqt/units.hpp"

namespace sqt {

struct SquareWellClosedForm {
  SquareDoubleWell well;
  double k = 0.0;
  double kappa = 0.0;
  double k0 = 0.0;
  double hbar = 1.0;
  double mass = 1.0;

  // k must be the even ground-state root.
  static SquareWellClosedForm make(const SquareDoubleWell& w, const UnitSystem& u, double k);
};

struct SplittingPeriod {
  double delta_e;
  double period;
};

struct WkbQuantities {
  double phi = 0.0;
  double t_cl = 0.0;
  double tau_wkb = 0.0;
  double t_big_wkb = 0.0;
  double delta_e_wkb = 0.0;
  double validity = 0.0;  // max of hbar m |V'| / (2m|E-V|)^{3/2} away from turning points
};

double dsw_mean_tau(const SquareWellClosedForm& cf);
double dsw_mean_tau_high_barrier(const SquareWellClosedForm& cf);
SplittingPeriod dsw_splitting_and_period(const SquareWellClosedForm& cf);

// (2m/hbar) int_left^right dx / k(x) with k = sqrt(2m(E-V))/hbar; V(left) = V(right) = E.
double classical_period(const std::function<double(double)>& V, const UnitSystem& u, double E, double left,
                        double right);
// int_{-b}^{b} kappa dx for an even potential with V(+-b) = E.
double barrier_integral(const std::function<double(double)>& V, const UnitSystem& u, double E, double b);
WkbQuantities wkb_quantities(const RosenMorseDouble& p, const UnitSystem& u, double E, const TurningPoints& tp);

double qm_sq_ratio(double tau_qm, double tau_bar);
// 1/(pi tau_bar), in inverse internal time units.
double nu_sq(double tau_bar);

}  // namespace sqt
