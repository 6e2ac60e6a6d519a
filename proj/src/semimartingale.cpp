#include "jumpsde/semimartingale.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace jumpsde {

namespace {

inline double pos(double x) { return x > 0.0 ? x : 0.0; }
inline double neg(double x) { return x < 0.0 ? -x : 0.0; }

struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double value) {
    const double y = value - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  double value() const { return sum; }
};

bool collides_with_ledger(const CadlagPath& path, double level) {
  if (level == path.x0() || level == path.terminal_value()) return true;
  for (const auto& j : path.jumps()) {
    if (level == j.pre_value || level == j.post_value) return true;
  }
  return false;
}

void require_same_stream(const CadlagPath& a, const CadlagPath& b) {
  if (a.horizon() != b.horizon() || a.jumps().size() != b.jumps().size()) {
    throw std::invalid_argument("coupled paths were not driven by the same stream");
  }
  for (std::size_t i = 0; i < a.jumps().size(); ++i) {
    const auto& ja = a.jumps()[i];
    const auto& jb = b.jumps()[i];
    if (ja.time != jb.time || ja.source != jb.source || ja.mark != jb.mark) {
      throw std::invalid_argument("coupled paths were not driven by the same stream");
    }
  }
}

void require_path_of_stream(const CadlagPath& path, const EventStream& stream) {
  std::size_t n = 0;
  for (const auto& event : stream.events) {
    if (event.time > path.horizon()) break;
    if (n >= path.jumps().size()) {
      throw std::invalid_argument("path ledger does not match the stream");
    }
    const auto& j = path.jumps()[n];
    if (j.time != event.time || j.source != event.source || j.mark != event.mark) {
      throw std::invalid_argument("path ledger does not match the stream");
    }
    ++n;
  }
  if (n != path.jumps().size()) {
    throw std::invalid_argument("path ledger does not match the stream");
  }
}

}  // namespace

LevelCollisionError::LevelCollisionError(double level)
    : std::invalid_argument([level] {
        std::ostringstream os;
        os << "level " << level << " coincides with a ledger value; resample it";
        return os.str();
      }()),
      level_(level) {}

TanakaReport tanaka_residual(const CadlagPath& path, double level) {
  if (!std::isfinite(level)) {
    throw std::invalid_argument("tanaka_residual: level must be finite");
  }
  if (collides_with_ledger(path, level)) {
    throw LevelCollisionError(level);
  }

  TanakaReport report;
  report.level = level;
  report.lhs = pos(path.terminal_value() - level) - pos(path.x0() - level);

  // Segment values evolve continuously with finite variation, so the
  // indicator integral over a segment telescopes to
  // (end - a)^+ - (start - a)^+ regardless of how often the level is
  // crossed (zero local time at every level for finite-variation paths).
  KahanSum stieltjes;
  KahanSum down;
  KahanSum up;
  const auto& jumps = path.jumps();
  double seg_start = path.x0();
  for (const auto& j : jumps) {
    stieltjes.add(pos(j.pre_value - level) - pos(seg_start - level));
    if (j.pre_value > level) {
      stieltjes.add(j.post_value - j.pre_value);
      down.add(neg(j.post_value - level));
    } else {
      up.add(pos(j.post_value - level));
    }
    seg_start = j.post_value;
  }
  stieltjes.add(pos(path.terminal_value() - level) - pos(seg_start - level));

  report.stieltjes_term = stieltjes.value();
  report.down_corrections = down.value();
  report.up_corrections = up.value();
  report.residual = report.lhs - report.stieltjes_term - report.down_corrections -
                    report.up_corrections;
  return report;
}

std::vector<double> sample_levels(const CadlagPath& path, std::size_t n,
                                  PhiloxRng& rng) {
  const double lo = path.min_ledger_value() - 1.0;
  const double hi = path.max_ledger_value() + 1.0;
  std::vector<double> levels;
  levels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    double a = rng.uniform(lo, hi);
    int attempts = 0;
    while (collides_with_ledger(path, a)) {
      a = rng.uniform(lo, hi);
      if (++attempts > 100) {
        throw std::runtime_error("sample_levels: could not avoid ledger values");
      }
    }
    levels.push_back(a);
  }
  return levels;
}

std::vector<TanakaReport> tanaka_sweep(const CadlagPath& path,
                                       const std::vector<double>& levels) {
  std::vector<TanakaReport> reports;
  reports.reserve(levels.size());
  for (double a : levels) reports.push_back(tanaka_residual(path, a));
  return reports;
}

double continuous_qv(const CadlagPath&) {
  // Drift segments are absolutely continuous with finite variation and the
  // jump count is finite, so [X,X]^c = 0 by construction.
  return 0.0;
}

double continuous_qv(const CadlagPath& path1, const CadlagPath& path2) {
  require_same_stream(path1, path2);
  return 0.0;
}

LocalTimeCheck local_time_integral(const CadlagPath& path,
                                   const std::function<double(double)>& g,
                                   std::size_t quad_cells) {
  if (!g) {
    throw std::invalid_argument("local_time_integral: g must be callable");
  }
  if (quad_cells == 0) {
    throw std::invalid_argument("local_time_integral: need at least one cell");
  }
  const double lo = path.min_ledger_value() - 1.0;
  const double hi = path.max_ledger_value() + 1.0;

  constexpr double kBound = 1e15;
  const std::size_t probe_points = 1001;
  for (std::size_t i = 0; i < probe_points; ++i) {
    const double a = lo + (hi - lo) * static_cast<double>(i) /
                              static_cast<double>(probe_points - 1);
    const double value = g(a);
    if (!std::isfinite(value) || std::abs(value) > kBound) {
      throw std::invalid_argument("local_time_integral: g is unbounded on the path range");
    }
  }

  const double cell = (hi - lo) / static_cast<double>(quad_cells);
  KahanSum quad;
  for (std::size_t i = 0; i < quad_cells; ++i) {
    double a = lo + (static_cast<double>(i) + 0.5) * cell;
    while (collides_with_ledger(path, a)) {
      a += cell * 1e-6;
    }
    const TanakaReport report = tanaka_residual(path, a);
    quad.add(2.0 * report.residual * g(a) * cell);
  }

  LocalTimeCheck check;
  check.qv_integral = 0.0;  // d[X,X]^c is the zero measure for engine paths
  check.residual_quadrature = quad.value();
  return check;
}

MaxIdentityReport max_identity_residual(const CadlagPath& path1,
                                        const CadlagPath& path2) {
  require_same_stream(path1, path2);

  MaxIdentityReport report;
  const double d0 = path2.x0() - path1.x0();
  const double base = pos(d0);

  KahanSum integral;
  KahanSum down;
  KahanSum up;
  double prev_post_diff = d0;
  const std::size_t n = path1.jumps().size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& j1 = path1.jumps()[i];
    const auto& j2 = path2.jumps()[i];
    const double pre_diff = j2.pre_value - j1.pre_value;
    const double post_diff = j2.post_value - j1.post_value;

    // Segment part of the indicator integral; exact by the same
    // finite-variation telescoping used in tanaka_residual.
    integral.add(pos(pre_diff) - pos(prev_post_diff));
    if (pre_diff > 0.0) {
      integral.add(post_diff - pre_diff);
      down.add(neg(post_diff));
    } else {
      up.add(pos(post_diff));
    }

    const double residual = pos(post_diff) - base - integral.value();
    report.sup_residual = std::max(report.sup_residual, std::abs(residual));
    prev_post_diff = post_diff;
  }

  const double terminal_diff = path2.terminal_value() - path1.terminal_value();
  integral.add(pos(terminal_diff) - pos(prev_post_diff));
  const double residual = pos(terminal_diff) - base - integral.value();
  report.sup_residual = std::max(report.sup_residual, std::abs(residual));

  report.down_correction_sum = down.value();
  report.up_correction_sum = up.value();
  return report;
}

MaxSolutionReport verify_max_is_solution(const CadlagPath& path1,
                                         const CadlagPath& path2,
                                         const ModelSpec& model,
                                         const EventStream& stream,
                                         double tolerance) {
  model.validate();
  require_same_stream(path1, path2);
  require_path_of_stream(path1, stream);

  const double y0 = std::max(path1.x0(), path2.x0());

  // Right side of the equation with Y = X1 v X2 plugged in. The drift
  // integral over each segment telescopes to the increment of Y because Y
  // follows one branch between crossings and is continuous there.
  KahanSum rhs_increments;
  MaxSolutionReport report;
  double prev_post = y0;
  const std::size_t n = path1.jumps().size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& j1 = path1.jumps()[i];
    const auto& j2 = path2.jumps()[i];
    const double y_pre = std::max(j1.pre_value, j2.pre_value);
    rhs_increments.add(y_pre - prev_post);

    const JumpKernel& kernel =
        j1.source == NoiseSource::Compensated0 ? model.kernel0 : model.kernel1;
    rhs_increments.add(kernel.apply(y_pre, j1.mark) - y_pre);

    const double y_post = std::max(j1.post_value, j2.post_value);
    const double deviation = std::abs(y_post - (y0 + rhs_increments.value()));
    report.sup_deviation = std::max(report.sup_deviation, deviation);
    prev_post = y_post;
  }

  const double y_terminal = std::max(path1.terminal_value(), path2.terminal_value());
  rhs_increments.add(y_terminal - prev_post);
  const double deviation = std::abs(y_terminal - (y0 + rhs_increments.value()));
  report.sup_deviation = std::max(report.sup_deviation, deviation);

  report.is_solution = report.sup_deviation <= tolerance;
  return report;
}

}  // namespace jumpsde
