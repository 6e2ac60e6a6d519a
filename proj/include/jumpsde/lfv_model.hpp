#ifndef JUMPSDE_LFV_MODEL_HPP
#define JUMPSDE_LFV_MODEL_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "jumpsde/sde_core.hpp"

namespace jumpsde {

// Relocation-event mark z = (theta, v, y, zeta, w): theta decides whether
// the event moves the particle, v is the landing offset within the unit
// ball, y the event center, zeta the move probability, w the event radius.
struct LFVMark {
  int theta = 0;
  double v = 0.0;     // in [-1, 1]
  double y = 0.0;
  double zeta = 0.0;  // in [0, 1]
  double w = 1.0;     // > 0

  bool valid() const;

  // Mark component order: theta, v, y, zeta, w.
  Mark to_mark() const { return Mark{static_cast<double>(theta), v, y, zeta, w}; }
  static LFVMark from_mark(const Mark& m) {
    return LFVMark{m[0] != 0.0 ? 1 : 0, m[1], m[2], m[3], m[4]};
  }
};

// Radius measure nu2 on (0, inf): a finite atom list plus an optional
// power density coef * w^(-1-alpha) on (support_lo, support_hi].
struct Nu2 {
  struct Atom {
    double w = 1.0;
    double mass = 1.0;
  };
  std::vector<Atom> atoms;
  bool has_density = false;
  double alpha = 0.0;
  double coef = 1.0;
  double support_lo = 0.0;
  double support_hi = 1.0;

  void validate() const;

  // \int w^p nu2(dw) over [lo, hi]; inclusion flags apply to atoms.
  // lo must be positive when the density support reaches 0.
  double power_moment(double p, double lo, double hi, bool include_lo = true,
                      bool include_hi = true) const;
  double mass(double lo, double hi, bool include_lo = true,
              bool include_hi = true) const {
    return power_moment(0.0, lo, hi, include_lo, include_hi);
  }
  // Largest radius carrying mass within [lo, hi] (0 when there is none).
  double max_radius(double lo, double hi) const;
};

// Transition measure nu1(w, .) on [0,1]. The families used here do not
// depend on w: a finite atom list plus an optional uniform component.
struct Nu1 {
  struct Atom {
    double zeta = 0.5;
    double mass = 1.0;
  };
  std::vector<Atom> atoms;
  double uniform_mass = 0.0;

  void validate() const;

  double mass(double w) const;
  // \int zeta nu1(w, dzeta)
  double zeta_moment(double w) const;
  // Draw from the normalized kernel.
  double sample(double w, PhiloxRng& rng) const;
};

struct RadiusLaw {
  Nu2 nu2;
  Nu1 nu1;
  std::string family = "custom";

  void validate() const;

  // nu2 = delta_1, nu1 = delta_{0.5}: one unit-radius event family with
  // move probability 1/2.
  static RadiusLaw atom_default();
  // nu2(dw) = w^(-1-alpha) dw on (0,1], zeta identically zeta0. With
  // alpha in (1,2) the small radii carry infinite total rate while the
  // displacement second moment stays finite.
  static RadiusLaw power_law(double alpha = 1.5, double zeta0 = 1.0);
};

// Gamma_k = D_{0,k} x [0,1] x [2^-k, 2^k] in the (y, zeta, w) components.
struct TruncationLevel {
  int k = 1;

  double y_halfwidth() const { return static_cast<double>(k); }
  double w_lo() const;
  double w_hi() const;
  bool contains(const Mark& mark) const;
  void validate() const;
};

// Displacement g0(x, z) = 1{|x - y| < w} * theta * (y + w v - x).
double lfv_g0(double x, const LFVMark& z);

// The post-jump state in relocation form: y + w v when the event moves the
// particle, x otherwise. Evaluating the landing point directly keeps the
// per-event map monotone in floating point.
double lfv_post_state(double x, const LFVMark& z);

// Finite-mass restriction of the mean measure to Gamma_k. The rate is
// 2k * \int nu1(w,[0,1]) nu2(dw) over the level's radius range; marks are
// drawn in the order w, zeta, theta, y, v.
IntensityRegion lfv_region(const TruncationLevel& level, const RadiusLaw& law);

enum class IntegralStatus { Finite, Divergent, Indeterminate };

const char* to_string(IntegralStatus status);

struct IntegrabilityEntry {
  IntegralStatus status = IntegralStatus::Indeterminate;
  double value = 0.0;

  bool finite() const { return status == IntegralStatus::Finite; }
};

// The three moment conditions on (zeta, w):
//   c31: \int zeta w^d      over [0,1] x (1,inf)  < inf
//   c32: \int zeta w^2      over [0,1] x [0,1]    < inf   (d = 1 branch;
//        w^(2+d) for d >= 2)
//   c33: \int zeta w^d      over [0,1] x (0,inf)  < inf
// Open integration ends are probed along the dyadic ladder 2^-j (and 2^j):
// the tail is declared finite when increments fall below 1e-12 relative
// tolerance or decay geometrically with ratio <= 0.9 (then summed by
// geometric extrapolation), divergent when the increment ratio stays
// >= 0.97, and indeterminate otherwise.
struct IntegrabilityReport {
  IntegrabilityEntry c31;
  IntegrabilityEntry c32;
  IntegrabilityEntry c33;
};

IntegrabilityReport check_integrability(const RadiusLaw& law, int dimension = 1);

struct CompensatorValue {
  double value = 0.0;
  // Set when some ball D_{x,w} in the level's radius range sticks out of
  // [-k, k]; the returned value is then the boundary-truncated integral.
  bool boundary_truncated = false;
};

// Centering term of the compensated integral at state x:
// \int 1{|x - y| < w} theta (y + w v - x) against the mean measure over
// Gamma_k. The y-integral is evaluated in closed form per radius, which
// makes the interior value exactly zero (the offset integrand is odd around
// x and the v-mean vanishes).
CompensatorValue lfv_compensator_drift(double x, const TruncationLevel& level,
                                       const RadiusLaw& law);

// States whose balls never leave [-k, k]: |x| <= k - max radius of the
// level. Replicates that wander outside are flagged by the experiments.
double lfv_interior_halfwidth(const TruncationLevel& level, const RadiusLaw& law);

bool lfv_path_interior(const CadlagPath& path, const TruncationLevel& level,
                       const RadiusLaw& law);

// Assembles the single-particle model at one truncation level: zero drift,
// compensated relocation kernel with its centering term (identically zero
// on the interior), and the Gamma_k intensity region. The kernel's
// monotone flag is set by running check_monotone on freshly sampled marks
// over per-mark grids spanning [y - 2w, y + 2w].
ModelSpec lfv_model_spec(const TruncationLevel& level, const RadiusLaw& law,
                         std::size_t monotone_sample = 2048,
                         std::size_t monotone_grid_points = 257);

}  // namespace jumpsde

#endif  // JUMPSDE_LFV_MODEL_HPP
