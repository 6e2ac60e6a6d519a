#ifndef JUMPSDE_SDE_CORE_HPP
#define JUMPSDE_SDE_CORE_HPP

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "jumpsde/point_process.hpp"

namespace jumpsde {

// Scalar drift field b(x). Affine drifts carry their coefficients so the
// integrator can use the exact closed-form flow; anything else goes through
// the fixed-substep RK4 stepper.
struct Drift {
  bool affine = true;
  double alpha = 0.0;
  double beta = 0.0;
  std::function<double(double)> fn;

  double operator()(double x) const { return affine ? alpha + beta * x : fn(x); }
  bool is_zero() const { return affine && alpha == 0.0 && beta == 0.0; }

  static Drift zero() { return Drift{}; }
  static Drift make_affine(double alpha, double beta) {
    return Drift{true, alpha, beta, nullptr};
  }
  static Drift general(std::function<double(double)> fn) {
    Drift d;
    d.affine = false;
    d.fn = std::move(fn);
    return d;
  }
};

// Flow of dx/dt = b(x) over dt >= 0. Affine drifts use the closed form;
// general drifts take classical RK4 steps of size
// substep_scale * min(dt, 1) * 2^-10.
double drift_flow(const Drift& b, double x, double dt, double substep_scale = 1.0);

enum class MonotoneFlag { Unchecked, Verified, Falsified };

const char* to_string(MonotoneFlag flag);

// Displacement map g(x,u) of one Poisson random measure, with the optional
// centering integral c(x) = \int g(x,u) mu(du) over the active region.
//
// post_state, when set, evaluates x + g(x,u) directly; kernels whose jump
// target has an exact expression (e.g. relocation to a point) should provide
// it so the per-event state map is monotone in floating point, not just in
// exact arithmetic.
struct JumpKernel {
  std::function<double(double, const Mark&)> displacement;
  std::function<double(double, const Mark&)> post_state;
  std::function<double(double)> compensator;
  // Marks the compensator as identically zero on the states the experiment
  // visits, so the effective drift keeps its closed form.
  bool compensator_is_zero = false;
  MonotoneFlag monotone = MonotoneFlag::Unchecked;

  bool defined() const { return static_cast<bool>(displacement) || static_cast<bool>(post_state); }

  // x + g(x,u)
  double apply(double x, const Mark& u) const {
    return post_state ? post_state(x, u) : x + displacement(x, u);
  }
  double jump_size(double x, const Mark& u) const {
    return displacement ? displacement(x, u) : post_state(x, u) - x;
  }
};

// Full description of the equation: drift b, compensated kernel/region
// (g0, mu0) and uncompensated kernel/region (g1, mu1).
struct ModelSpec {
  Drift drift;
  JumpKernel kernel0;
  IntensityRegion region0;
  JumpKernel kernel1;
  IntensityRegion region1;
  std::string label;

  // b(x) - c0(x): the compensated integral over a finite-mass region
  // contributes its mean as a drift correction.
  Drift effective_drift() const;

  void validate() const;
};

struct PathJump {
  double time = 0.0;
  double pre_value = 0.0;   // X(t-)
  double post_value = 0.0;  // X(t)
  Mark mark{};
  NoiseSource source = NoiseSource::Compensated0;
};

struct PathSegment {
  double start_time = 0.0;
  double start_value = 0.0;
};

// Exact piecewise record of one realized trajectory: drift segments between
// events plus the jump ledger. The ledger keeps every stream event, including
// zero-displacement ones, so coupled paths driven by one stream stay
// comparable entry by entry. Queries at ledger times return ledger values
// exactly; interior queries replay the drift flow from the segment start.
class CadlagPath {
 public:
  CadlagPath(double x0, double horizon, Drift effective_drift,
             double substep_scale, std::vector<PathJump> jumps);

  double x0() const { return x0_; }
  double horizon() const { return horizon_; }
  double terminal_value() const { return terminal_; }
  const std::vector<PathJump>& jumps() const { return jumps_; }
  const std::vector<PathSegment>& segments() const { return segments_; }
  const Drift& effective_drift() const { return drift_; }
  double substep_scale() const { return substep_scale_; }

  double value_at(double t) const;      // X(t)
  double value_before(double t) const;  // X(t-)

  double min_ledger_value() const;
  double max_ledger_value() const;

 private:
  double x0_;
  double horizon_;
  Drift drift_;
  double substep_scale_;
  std::vector<PathJump> jumps_;
  std::vector<PathSegment> segments_;
  double terminal_;
};

class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double time, double state, Mark mark);

  double time() const { return time_; }
  double state() const { return state_; }
  const Mark& mark() const { return mark_; }

 private:
  double time_;
  double state_;
  Mark mark_;
};

struct IntegrateOptions {
  double substep_scale = 1.0;
};

// Event-driven exact integration against a realized stream: between events
// the state follows the effective drift flow, at each event it jumps to
// kernel.apply(X(t-), mark). Pure in all arguments.
CadlagPath integrate(const ModelSpec& model, const EventStream& stream, double x0,
                     double horizon, const IntegrateOptions& options = {});

struct MonotoneWitness {
  Mark mark{};
  double x1 = 0.0;
  double x2 = 0.0;
  double y1 = 0.0;  // x1 + g(x1, mark)
  double y2 = 0.0;
};

struct MonotoneReport {
  MonotoneFlag flag = MonotoneFlag::Unchecked;
  std::vector<MonotoneWitness> witnesses;
  std::size_t marks_checked = 0;
  std::size_t points_checked = 0;

  bool verified() const { return flag == MonotoneFlag::Verified; }
};

// Checks that x -> x + g(x,u) is non-decreasing along the grid for every
// sampled mark. Non-finite kernel values falsify with a witness.
MonotoneReport check_monotone(const JumpKernel& kernel, std::span<const Mark> marks,
                              std::span<const double> x_grid);

// Same check against a per-mark grid (the grid builder fills `grid`, which
// must come back sorted ascending).
MonotoneReport check_monotone(
    const JumpKernel& kernel, std::span<const Mark> marks,
    const std::function<void(const Mark&, std::vector<double>&)>& grid_for_mark);

}  // namespace jumpsde

#endif  // JUMPSDE_SDE_CORE_HPP
