#include "jumpsde/sde_core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace jumpsde {

namespace {

constexpr double kSubstepCap = 0x1.0p-10;

bool finite(double x) { return std::isfinite(x); }

std::string format_diagnostic(const std::string& what, double time, double state,
                              const Mark& mark) {
  std::ostringstream os;
  os << what << " (time=" << time << ", state=" << state << ", mark=[";
  for (std::size_t i = 0; i < mark.size(); ++i) {
    if (i) os << ", ";
    os << mark[i];
  }
  os << "])";
  return os.str();
}

}  // namespace

const char* to_string(MonotoneFlag flag) {
  switch (flag) {
    case MonotoneFlag::Unchecked:
      return "unchecked";
    case MonotoneFlag::Verified:
      return "verified";
    case MonotoneFlag::Falsified:
      return "falsified";
  }
  return "unknown";
}

double drift_flow(const Drift& b, double x, double dt, double substep_scale) {
  if (!(dt >= 0.0) || !finite(dt)) {
    throw std::invalid_argument("drift_flow: dt must be finite and non-negative");
  }
  if (dt == 0.0) return x;

  double result;
  if (b.affine) {
    if (b.beta == 0.0) {
      result = x + b.alpha * dt;
    } else {
      const double bt = b.beta * dt;
      result = x * std::exp(bt) + b.alpha * std::expm1(bt) / b.beta;
    }
  } else {
    if (!(substep_scale > 0.0)) {
      throw std::invalid_argument("drift_flow: substep_scale must be positive");
    }
    const double target = substep_scale * std::min(dt, 1.0) * kSubstepCap;
    const auto steps = static_cast<std::uint64_t>(std::ceil(dt / target));
    const double h = dt / static_cast<double>(steps);
    result = x;
    for (std::uint64_t i = 0; i < steps; ++i) {
      const double k1 = b.fn(result);
      const double k2 = b.fn(result + 0.5 * h * k1);
      const double k3 = b.fn(result + 0.5 * h * k2);
      const double k4 = b.fn(result + h * k3);
      result += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  }
  if (!finite(result)) {
    throw std::runtime_error("drift_flow: non-finite state");
  }
  return result;
}

Drift ModelSpec::effective_drift() const {
  const bool compensated = region0.total_rate > 0.0 &&
                           static_cast<bool>(kernel0.compensator) &&
                           !kernel0.compensator_is_zero;
  if (!compensated) return drift;
  return Drift::general(
      [b = drift, c = kernel0.compensator](double x) { return b(x) - c(x); });
}

void ModelSpec::validate() const {
  if (!std::isfinite(region0.total_rate) || region0.total_rate < 0.0 ||
      !std::isfinite(region1.total_rate) || region1.total_rate < 0.0) {
    throw std::invalid_argument("ModelSpec: region rates must be finite and non-negative");
  }
  if (region0.total_rate > 0.0) {
    if (!kernel0.defined()) {
      throw std::invalid_argument("ModelSpec: active compensated region needs kernel0");
    }
    if (!kernel0.compensator) {
      throw std::invalid_argument(
          "ModelSpec: compensated region with positive mass needs a compensator");
    }
  }
  if (region1.total_rate > 0.0 && !kernel1.defined()) {
    throw std::invalid_argument("ModelSpec: active uncompensated region needs kernel1");
  }
  if (!drift.affine && !drift.fn) {
    throw std::invalid_argument("ModelSpec: general drift needs a callable");
  }
}

IntegrationError::IntegrationError(const std::string& what, double time,
                                   double state, Mark mark)
    : std::runtime_error(format_diagnostic(what, time, state, mark)),
      time_(time),
      state_(state),
      mark_(mark) {}

CadlagPath::CadlagPath(double x0, double horizon, Drift effective_drift,
                       double substep_scale, std::vector<PathJump> jumps)
    : x0_(x0),
      horizon_(horizon),
      drift_(std::move(effective_drift)),
      substep_scale_(substep_scale),
      jumps_(std::move(jumps)) {
  if (!finite(x0) || !finite(horizon) || horizon < 0.0) {
    throw std::invalid_argument("CadlagPath: x0 and horizon must be finite, horizon >= 0");
  }
  segments_.reserve(jumps_.size() + 1);
  segments_.push_back(PathSegment{0.0, x0_});
  double prev_time = 0.0;
  for (const auto& j : jumps_) {
    if (!(j.time >= prev_time) || j.time > horizon_) {
      throw std::invalid_argument("CadlagPath: jump times must be sorted within [0, horizon]");
    }
    if (!finite(j.pre_value) || !finite(j.post_value)) {
      throw std::invalid_argument("CadlagPath: ledger values must be finite");
    }
    prev_time = j.time;
    segments_.push_back(PathSegment{j.time, j.post_value});
  }
  const auto& last = segments_.back();
  terminal_ = drift_flow(drift_, last.start_value, horizon_ - last.start_time,
                         substep_scale_);
}

double CadlagPath::value_at(double t) const {
  if (!(t >= 0.0) || t > horizon_) {
    throw std::invalid_argument("CadlagPath::value_at: t outside [0, horizon]");
  }
  if (t == horizon_) return terminal_;
  auto it = std::upper_bound(
      jumps_.begin(), jumps_.end(), t,
      [](double value, const PathJump& j) { return value < j.time; });
  if (it == jumps_.begin()) {
    return drift_flow(drift_, x0_, t, substep_scale_);
  }
  const auto& j = *std::prev(it);
  if (j.time == t) return j.post_value;
  return drift_flow(drift_, j.post_value, t - j.time, substep_scale_);
}

double CadlagPath::value_before(double t) const {
  if (!(t >= 0.0) || t > horizon_) {
    throw std::invalid_argument("CadlagPath::value_before: t outside [0, horizon]");
  }
  auto it = std::lower_bound(
      jumps_.begin(), jumps_.end(), t,
      [](const PathJump& j, double value) { return j.time < value; });
  if (it != jumps_.end() && it->time == t) return it->pre_value;
  if (it == jumps_.begin()) {
    return drift_flow(drift_, x0_, t, substep_scale_);
  }
  const auto& j = *std::prev(it);
  return drift_flow(drift_, j.post_value, t - j.time, substep_scale_);
}

double CadlagPath::min_ledger_value() const {
  double m = std::min(x0_, terminal_);
  for (const auto& j : jumps_) m = std::min({m, j.pre_value, j.post_value});
  return m;
}

double CadlagPath::max_ledger_value() const {
  double m = std::max(x0_, terminal_);
  for (const auto& j : jumps_) m = std::max({m, j.pre_value, j.post_value});
  return m;
}

CadlagPath integrate(const ModelSpec& model, const EventStream& stream, double x0,
                     double horizon, const IntegrateOptions& options) {
  model.validate();
  if (!finite(x0)) {
    throw std::invalid_argument("integrate: x0 must be finite");
  }
  if (!finite(horizon) || horizon < 0.0) {
    throw std::invalid_argument("integrate: horizon must be finite and non-negative");
  }
  if (stream.horizon < horizon) {
    throw std::invalid_argument("integrate: stream horizon shorter than requested horizon");
  }

  const Drift eff = model.effective_drift();
  std::vector<PathJump> jumps;
  jumps.reserve(stream.size());

  double x = x0;
  double prev_time = 0.0;
  const MarkedEvent* prev_event = nullptr;
  for (const auto& event : stream.events) {
    if (event.time > horizon) break;
    if (prev_event != nullptr && event_key_less(event, *prev_event)) {
      throw std::invalid_argument("integrate: stream events out of order");
    }
    prev_event = &event;

    double pre;
    try {
      pre = drift_flow(eff, x, event.time - prev_time, options.substep_scale);
    } catch (const std::runtime_error&) {
      throw IntegrationError("integrate: drift stepper diverged", event.time, x,
                             event.mark);
    }

    const JumpKernel& kernel =
        event.source == NoiseSource::Compensated0 ? model.kernel0 : model.kernel1;
    if (!kernel.defined()) {
      throw std::invalid_argument("integrate: event from a source with no kernel");
    }
    const double post = kernel.apply(pre, event.mark);
    if (!finite(post)) {
      throw IntegrationError("integrate: kernel produced non-finite state",
                             event.time, pre, event.mark);
    }
    jumps.push_back(PathJump{event.time, pre, post, event.mark, event.source});
    x = post;
    prev_time = event.time;
  }

  try {
    return CadlagPath(x0, horizon, eff, options.substep_scale, std::move(jumps));
  } catch (const std::runtime_error& e) {
    throw IntegrationError(std::string("integrate: terminal segment failed: ") + e.what(),
                           horizon, x, Mark{});
  }
}

namespace {

MonotoneReport check_monotone_impl(
    const JumpKernel& kernel, std::span<const Mark> marks,
    const std::function<void(const Mark&, std::vector<double>&)>& grid_for_mark) {
  constexpr std::size_t kMaxWitnesses = 8;
  MonotoneReport report;
  report.flag = MonotoneFlag::Verified;

  std::vector<double> grid;
  for (const Mark& mark : marks) {
    grid_for_mark(mark, grid);
    if (grid.empty()) {
      throw std::invalid_argument("check_monotone: empty grid");
    }
    if (!std::is_sorted(grid.begin(), grid.end())) {
      throw std::invalid_argument("check_monotone: grid must be sorted ascending");
    }
    ++report.marks_checked;

    double x_prev = grid.front();
    double y_prev = kernel.apply(x_prev, mark);
    ++report.points_checked;
    if (!finite(y_prev)) {
      report.flag = MonotoneFlag::Falsified;
      report.witnesses.push_back(MonotoneWitness{mark, x_prev, x_prev, y_prev, y_prev});
    }
    for (std::size_t i = 1; i < grid.size(); ++i) {
      const double x = grid[i];
      const double y = kernel.apply(x, mark);
      ++report.points_checked;
      if (!finite(y) || y < y_prev) {
        report.flag = MonotoneFlag::Falsified;
        if (report.witnesses.size() < kMaxWitnesses) {
          report.witnesses.push_back(MonotoneWitness{mark, x_prev, x, y_prev, y});
        }
      }
      x_prev = x;
      y_prev = y;
    }
    if (report.flag == MonotoneFlag::Falsified &&
        report.witnesses.size() >= kMaxWitnesses) {
      break;
    }
  }
  return report;
}

}  // namespace

MonotoneReport check_monotone(const JumpKernel& kernel, std::span<const Mark> marks,
                              std::span<const double> x_grid) {
  if (marks.empty() || x_grid.empty()) {
    throw std::invalid_argument("check_monotone: marks and grid must be non-empty");
  }
  return check_monotone_impl(
      kernel, marks, [&x_grid](const Mark&, std::vector<double>& grid) {
        grid.assign(x_grid.begin(), x_grid.end());
      });
}

MonotoneReport check_monotone(
    const JumpKernel& kernel, std::span<const Mark> marks,
    const std::function<void(const Mark&, std::vector<double>&)>& grid_for_mark) {
  if (marks.empty() || !grid_for_mark) {
    throw std::invalid_argument("check_monotone: marks and grid builder must be non-empty");
  }
  return check_monotone_impl(kernel, marks, grid_for_mark);
}

}  // namespace jumpsde
