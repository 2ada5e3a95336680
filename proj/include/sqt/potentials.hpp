#pragma once

#include <functional>
#include <variant>

namespace sqt {

// Infinite walls at |x| = b/2, barrier of height V0 for |x| < d/2.
struct SquareDoubleWell {
  double b = 0.0;
  double d = 0.0;
  double V0 = 0.0;

  static SquareDoubleWell make(double b, double d, double V0);
  double well_width() const { return 0.5 * (b - d); }  // L
  double wall() const { return 0.5 * b; }
};

// V(x) = A tanh(|x|/d - k) - B sech^2(|x|/d - k)
struct RosenMorseDouble {
  double A = 0.0;
  double B = 0.0;
  double d = 0.0;
  double k = 0.0;

  static RosenMorseDouble make(double A, double B, double d, double k);
};

using Potential = std::variant<SquareDoubleWell, RosenMorseDouble>;

struct RmGeometry {
  double x0;  // right minimum
  double V0;  // barrier height above the minimum
  double VD;  // well depth below the asymptote A
};

struct TurningPoints {
  double b_inner;
  double c_outer;
  double energy;
};

double evaluate(const SquareDoubleWell& p, double x);
double evaluate(const RosenMorseDouble& p, double x);
double evaluate(const Potential& p, double x);
double derivative(const RosenMorseDouble& p, double x);

RmGeometry rm_derived_geometry(const RosenMorseDouble& p);

TurningPoints turning_points(const SquareDoubleWell& p, double E);
TurningPoints turning_points(const RosenMorseDouble& p, double E);

double reduced_mass(double m_h, double m_n);

std::function<double(double)> as_function(const Potential& p);

}  // namespace sqt
