#pragma once

#include <functional>
#include <memory>

#include "sqt/eigensolver.hpp"
#include "sqt/potentials.hpp"
#include "sqt/simd/drift_table.hpp"
#include "sqt/units.hpp"

namespace sqt {

enum class FieldKind { ClosedForm, GridInterpolated };

// Osmotic drift u = (hbar/2m) d ln(rho)/dx of a nodeless stationary state.
class OsmoticField {
 public:
  static OsmoticField square_well(const SquareDoubleWell& w, const UnitSystem& u, double k_even);
  static OsmoticField from_state(const BoundState& s, const UnitSystem& u);

  FieldKind kind() const { return kind_; }
  double diffusion() const { return sigma2_; }  // hbar/m
  double mass() const { return mass_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  bool hard_walls() const { return kind_ == FieldKind::ClosedForm; }

  double velocity(double x) const;
  // Cubic table for the SDE kernels; cells whose drift reaches `cap` are linear.
  simd::DriftTable drift_table(double cap) const;

 private:
  FieldKind kind_ = FieldKind::GridInterpolated;
  double sigma2_ = 1.0;
  double mass_ = 1.0;
  double lo_ = 0.0, hi_ = 0.0;
  SquareDoubleWell well_{};
  double k_ = 0.0, kappa_ = 0.0;
  std::shared_ptr<const simd::DriftTable> table_;  // grid kind: uncapped interpolant

  double du_dx(double x, int region) const;
  double u_region(double x, int region) const;
  int region_of(double x) const;
};

double osmotic_velocity(const OsmoticField& f, double x);
double instantaneous_energy(const OsmoticField& f, double x, const std::function<double(double)>& V);

}  // namespace sqt
