#ifndef JUMPSDE_SEMIMARTINGALE_HPP
#define JUMPSDE_SEMIMARTINGALE_HPP

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include "jumpsde/sde_core.hpp"

namespace jumpsde {

// Raised when a requested level coincides with a ledger value; the caller is
// expected to resample the level.
class LevelCollisionError : public std::invalid_argument {
 public:
  explicit LevelCollisionError(double level);
  double level() const { return level_; }

 private:
  double level_;
};

// Decomposition of (X_T - a)^+ - (X_0 - a)^+ into the Stieltjes integral
// against dX, the two jump-correction sums, and the residual, which is the
// pathwise value of (1/2) L_T^a. Engine paths have zero continuous quadratic
// variation, so the residual must vanish for every admissible level.
struct TanakaReport {
  double level = 0.0;
  double lhs = 0.0;
  double stieltjes_term = 0.0;
  double down_corrections = 0.0;  // sum of 1{X(s-) > a} (X(s) - a)^-
  double up_corrections = 0.0;    // sum of 1{X(s-) <= a} (X(s) - a)^+
  double residual = 0.0;
};

TanakaReport tanaka_residual(const CadlagPath& path, double level);

// n levels drawn uniformly from [min - 1, max + 1] of the path's ledger
// range, resampled away from exact ledger values.
std::vector<double> sample_levels(const CadlagPath& path, std::size_t n,
                                  PhiloxRng& rng);

std::vector<TanakaReport> tanaka_sweep(const CadlagPath& path,
                                       const std::vector<double>& levels);

// Continuous quadratic variation. Paths produced by the integrator are
// finite-variation (drift segments plus finitely many jumps), so this is
// identically zero; it exists as an explicit assertion point.
double continuous_qv(const CadlagPath& path);
double continuous_qv(const CadlagPath& path1, const CadlagPath& path2);

struct LocalTimeCheck {
  double qv_integral = 0.0;          // \int g(X_s) d[X,X]^c_s
  double residual_quadrature = 0.0;  // \int 2 residual(a) g(a) da
};

// Evaluates \int g(X_s) d[X,X]^c_s for bounded g and cross-checks it against
// the level-integrated Tanaka residuals on a midpoint grid over the ledger
// range widened by 1 on each side.
LocalTimeCheck local_time_integral(const CadlagPath& path,
                                   const std::function<double(double)>& g,
                                   std::size_t quad_cells = 256);

// For coupled paths driven by one stream, with X = X2 - X1:
//   sup_t | (X_t)^+ - (X_0)^+ - \int_0^t 1{X(s-) > 0} dX_s |
// plus the two correction sums, which vanish whenever the per-event state
// maps preserve order.
struct MaxIdentityReport {
  double sup_residual = 0.0;
  double down_correction_sum = 0.0;
  double up_correction_sum = 0.0;
};

MaxIdentityReport max_identity_residual(const CadlagPath& path1,
                                        const CadlagPath& path2);

struct MaxSolutionReport {
  bool is_solution = false;
  double sup_deviation = 0.0;
};

// Forms Y = X1 v X2 at every event time, re-derives the equation's right
// side with Y plugged into drift and kernels against the same stream, and
// reports the sup deviation.
MaxSolutionReport verify_max_is_solution(const CadlagPath& path1,
                                         const CadlagPath& path2,
                                         const ModelSpec& model,
                                         const EventStream& stream,
                                         double tolerance = 1e-10);

}  // namespace jumpsde

#endif  // JUMPSDE_SEMIMARTINGALE_HPP
