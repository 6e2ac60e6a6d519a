#include "jumpsde/lfv_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace jumpsde {

namespace {

constexpr std::uint64_t kMonotoneCheckSeed = 0x9A3C55E17B024D6Full;

bool in_interval(double w, double lo, double hi, bool include_lo, bool include_hi) {
  if (w < lo || w > hi) return false;
  if (w == lo && !include_lo) return false;
  if (w == hi && !include_hi) return false;
  return true;
}

// \int_a^b w^(q-1) dw, a >= 0, b >= a.
double power_primitive_integral(double q, double a, double b) {
  if (b <= a) return 0.0;
  if (a == 0.0) {
    if (q <= 0.0) {
      throw std::domain_error("power integral diverges at the origin");
    }
    return std::pow(b, q) / q;
  }
  if (q == 0.0) return std::log(b / a);
  return (std::pow(b, q) - std::pow(a, q)) / q;
}

double adaptive_simpson_rec(const std::function<double(double)>& f, double a,
                            double b, double fa, double fm, double fb,
                            double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol) {
  if (b <= a) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  if (!std::isfinite(whole)) {
    throw std::runtime_error("adaptive_simpson: non-finite integrand");
  }
  return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, 40);
}

}  // namespace

bool LFVMark::valid() const {
  return (theta == 0 || theta == 1) && std::isfinite(v) && v >= -1.0 && v <= 1.0 &&
         std::isfinite(y) && std::isfinite(zeta) && zeta >= 0.0 && zeta <= 1.0 &&
         std::isfinite(w) && w > 0.0;
}

void Nu2::validate() const {
  for (const auto& atom : atoms) {
    if (!std::isfinite(atom.w) || atom.w <= 0.0 || !std::isfinite(atom.mass) ||
        atom.mass < 0.0) {
      throw std::invalid_argument("Nu2: atoms need positive radius and non-negative mass");
    }
  }
  if (has_density) {
    if (!std::isfinite(alpha) || !std::isfinite(coef) || coef < 0.0) {
      throw std::invalid_argument("Nu2: density needs finite alpha and non-negative coef");
    }
    if (!(support_lo >= 0.0) || !(support_hi > support_lo) ||
        !std::isfinite(support_hi)) {
      throw std::invalid_argument("Nu2: density support must satisfy 0 <= lo < hi < inf");
    }
  }
}

double Nu2::power_moment(double p, double lo, double hi, bool include_lo,
                         bool include_hi) const {
  if (!(lo >= 0.0) || !(hi >= lo)) {
    throw std::invalid_argument("Nu2::power_moment: need 0 <= lo <= hi");
  }
  double total = 0.0;
  for (const auto& atom : atoms) {
    if (in_interval(atom.w, lo, hi, include_lo, include_hi)) {
      total += atom.mass * std::pow(atom.w, p);
    }
  }
  if (has_density && coef > 0.0) {
    const double a = std::max(lo, support_lo);
    const double b = std::min(hi, support_hi);
    if (b > a) {
      total += coef * power_primitive_integral(p - alpha, a, b);
    }
  }
  return total;
}

double Nu2::max_radius(double lo, double hi) const {
  double m = 0.0;
  for (const auto& atom : atoms) {
    if (atom.mass > 0.0 && atom.w >= lo && atom.w <= hi) m = std::max(m, atom.w);
  }
  if (has_density && coef > 0.0) {
    const double a = std::max(lo, support_lo);
    const double b = std::min(hi, support_hi);
    if (b > a) m = std::max(m, b);
  }
  return m;
}

void Nu1::validate() const {
  for (const auto& atom : atoms) {
    if (!std::isfinite(atom.zeta) || atom.zeta < 0.0 || atom.zeta > 1.0 ||
        !std::isfinite(atom.mass) || atom.mass < 0.0) {
      throw std::invalid_argument("Nu1: atoms need zeta in [0,1] and non-negative mass");
    }
  }
  if (!std::isfinite(uniform_mass) || uniform_mass < 0.0) {
    throw std::invalid_argument("Nu1: uniform component mass must be non-negative");
  }
}

double Nu1::mass(double) const {
  double total = uniform_mass;
  for (const auto& atom : atoms) total += atom.mass;
  return total;
}

double Nu1::zeta_moment(double) const {
  double total = 0.5 * uniform_mass;
  for (const auto& atom : atoms) total += atom.zeta * atom.mass;
  return total;
}

double Nu1::sample(double w, PhiloxRng& rng) const {
  const double total = mass(w);
  if (!(total > 0.0)) {
    throw std::invalid_argument("Nu1::sample: kernel has zero mass");
  }
  double u = rng.next_double() * total;
  for (const auto& atom : atoms) {
    if (u < atom.mass) return atom.zeta;
    u -= atom.mass;
  }
  if (uniform_mass > 0.0) return rng.next_double();
  return atoms.back().zeta;
}

void RadiusLaw::validate() const {
  nu2.validate();
  nu1.validate();
}

RadiusLaw RadiusLaw::atom_default() {
  RadiusLaw law;
  law.nu2.atoms = {Nu2::Atom{1.0, 1.0}};
  law.nu1.atoms = {Nu1::Atom{0.5, 1.0}};
  law.family = "atom";
  return law;
}

RadiusLaw RadiusLaw::power_law(double alpha, double zeta0) {
  if (!std::isfinite(alpha)) {
    throw std::invalid_argument("power_law: alpha must be finite");
  }
  if (!(zeta0 >= 0.0) || !(zeta0 <= 1.0)) {
    throw std::invalid_argument("power_law: zeta0 must lie in [0,1]");
  }
  RadiusLaw law;
  law.nu2.has_density = true;
  law.nu2.alpha = alpha;
  law.nu2.coef = 1.0;
  law.nu2.support_lo = 0.0;
  law.nu2.support_hi = 1.0;
  law.nu1.atoms = {Nu1::Atom{zeta0, 1.0}};
  law.family = "power";
  return law;
}

void TruncationLevel::validate() const {
  if (k < 1 || k > 62) {
    throw std::invalid_argument("TruncationLevel: k must lie in [1, 62]");
  }
}

double TruncationLevel::w_lo() const { return std::ldexp(1.0, -k); }
double TruncationLevel::w_hi() const { return std::ldexp(1.0, k); }

bool TruncationLevel::contains(const Mark& mark) const {
  const double y = mark[2];
  const double w = mark[4];
  return std::abs(y) <= y_halfwidth() && w >= w_lo() && w <= w_hi();
}

double lfv_g0(double x, const LFVMark& z) {
  if (z.theta == 0 || !(std::abs(x - z.y) < z.w)) return 0.0;
  return z.y + z.w * z.v - x;
}

double lfv_post_state(double x, const LFVMark& z) {
  if (z.theta == 0 || !(std::abs(x - z.y) < z.w)) return x;
  return z.y + z.w * z.v;
}

IntensityRegion lfv_region(const TruncationLevel& level, const RadiusLaw& law) {
  level.validate();
  law.validate();

  const double wlo = level.w_lo();
  const double whi = level.w_hi();
  const double kernel_mass = law.nu1.mass(wlo);
  const double radius_mass = law.nu2.mass(wlo, whi);
  const double rate = 2.0 * level.y_halfwidth() * kernel_mass * radius_mass;
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw std::invalid_argument("lfv_region: level carries zero or non-finite mass");
  }

  struct WeightedAtom {
    double w;
    double weight;
  };
  std::vector<WeightedAtom> atoms;
  double atom_weight = 0.0;
  for (const auto& atom : law.nu2.atoms) {
    if (atom.mass > 0.0 && atom.w >= wlo && atom.w <= whi) {
      atoms.push_back(WeightedAtom{atom.w, atom.mass});
      atom_weight += atom.mass;
    }
  }

  double dens_a = 0.0, dens_b = 0.0, dens_mass = 0.0;
  double pow_a = 0.0, pow_b = 0.0;
  const double alpha = law.nu2.alpha;
  if (law.nu2.has_density && law.nu2.coef > 0.0) {
    dens_a = std::max(wlo, law.nu2.support_lo);
    dens_b = std::min(whi, law.nu2.support_hi);
    if (dens_b > dens_a) {
      dens_mass = law.nu2.coef * power_primitive_integral(-alpha, dens_a, dens_b);
      if (alpha != 0.0) {
        pow_a = std::pow(dens_a, -alpha);
        pow_b = std::pow(dens_b, -alpha);
      }
    }
  }
  const double total_weight = atom_weight + dens_mass;

  IntensityRegion region;
  region.total_rate = rate;
  region.mark_dim = 5;
  region.region_descriptor = "gamma" + std::to_string(level.k) + ":" + law.family;
  region.mark_sampler = [atoms, atom_weight, total_weight, dens_a, dens_b, alpha,
                         pow_a, pow_b, nu1 = law.nu1,
                         half = level.y_halfwidth()](PhiloxRng& rng) -> Mark {
    double w = 0.0;
    double u = rng.next_double() * total_weight;
    if (u < atom_weight) {
      for (const auto& atom : atoms) {
        if (u < atom.weight) {
          w = atom.w;
          break;
        }
        u -= atom.weight;
      }
      if (w == 0.0) w = atoms.back().w;
    } else {
      const double q = (u - atom_weight) / (total_weight - atom_weight);
      if (alpha == 0.0) {
        w = dens_a * std::pow(dens_b / dens_a, q);
      } else {
        w = std::pow(pow_a - q * (pow_a - pow_b), -1.0 / alpha);
      }
    }
    LFVMark z;
    z.w = w;
    z.zeta = nu1.sample(w, rng);
    z.theta = rng.next_double() < z.zeta ? 1 : 0;
    z.y = rng.uniform(-half, half);
    z.v = rng.uniform(-1.0, 1.0);
    return z.to_mark();
  };
  return region;
}

const char* to_string(IntegralStatus status) {
  switch (status) {
    case IntegralStatus::Finite:
      return "finite";
    case IntegralStatus::Divergent:
      return "divergent";
    case IntegralStatus::Indeterminate:
      return "indeterminate";
  }
  return "unknown";
}

namespace {

// Density tail over (0, b] probed along 2^-j; see the header's rule.
IntegrabilityEntry dyadic_tail(const Nu2& nu2, double q, double b) {
  constexpr int kMaxLevel = 64;
  constexpr double kTol = 1e-12;

  int j = 1;
  while (std::ldexp(1.0, -j) >= b && j < kMaxLevel) ++j;

  double prev_sum = 0.0;
  std::vector<double> increments;
  int settled = 0;
  for (; j <= kMaxLevel; ++j) {
    const double lo = std::min(std::ldexp(1.0, -j), b);
    const double sum = nu2.coef * power_primitive_integral(q, lo, b);
    const double delta = sum - prev_sum;
    increments.push_back(delta);
    if (std::abs(delta) <= kTol * std::max(1.0, std::abs(sum))) {
      if (++settled >= 3) {
        return IntegrabilityEntry{IntegralStatus::Finite, sum};
      }
    } else {
      settled = 0;
    }
    prev_sum = sum;
  }

  double ratio = 0.0;
  int counted = 0;
  for (std::size_t i = increments.size() - 4; i < increments.size(); ++i) {
    if (increments[i - 1] > 0.0) {
      ratio += increments[i] / increments[i - 1];
      ++counted;
    }
  }
  if (counted == 0) {
    return IntegrabilityEntry{IntegralStatus::Finite, prev_sum};
  }
  ratio /= static_cast<double>(counted);
  if (ratio >= 0.97) {
    return IntegrabilityEntry{IntegralStatus::Divergent, prev_sum};
  }
  if (ratio <= 0.9) {
    const double tail = increments.back() * ratio / (1.0 - ratio);
    return IntegrabilityEntry{IntegralStatus::Finite, prev_sum + tail};
  }
  return IntegrabilityEntry{IntegralStatus::Indeterminate, prev_sum};
}

IntegrabilityEntry weighted_moment(const RadiusLaw& law, double p, double lo,
                                   double hi, bool include_lo, bool include_hi) {
  const double zmom = law.nu1.zeta_moment(lo);
  if (zmom == 0.0) {
    return IntegrabilityEntry{IntegralStatus::Finite, 0.0};
  }

  double atom_part = 0.0;
  for (const auto& atom : law.nu2.atoms) {
    if (in_interval(atom.w, lo, hi, include_lo, include_hi)) {
      atom_part += atom.mass * std::pow(atom.w, p);
    }
  }

  IntegrabilityEntry density{IntegralStatus::Finite, 0.0};
  if (law.nu2.has_density && law.nu2.coef > 0.0) {
    const double a = std::max(lo, law.nu2.support_lo);
    const double b = std::min(hi, law.nu2.support_hi);
    if (b > a) {
      const double q = p - law.nu2.alpha;
      if (a > 0.0) {
        density.value = law.nu2.coef * power_primitive_integral(q, a, b);
      } else {
        density = dyadic_tail(law.nu2, q, b);
      }
    }
  }

  return IntegrabilityEntry{density.status, zmom * (atom_part + density.value)};
}

}  // namespace

IntegrabilityReport check_integrability(const RadiusLaw& law, int dimension) {
  law.validate();
  if (dimension < 1) {
    throw std::invalid_argument("check_integrability: dimension must be >= 1");
  }
  const double d = static_cast<double>(dimension);
  const double small_power = dimension == 1 ? 2.0 : 2.0 + d;
  const double inf = std::numeric_limits<double>::infinity();

  IntegrabilityReport report;
  report.c31 = weighted_moment(law, d, 1.0, inf, false, true);
  report.c32 = weighted_moment(law, small_power, 0.0, 1.0, true, true);
  report.c33 = weighted_moment(law, d, 0.0, inf, false, true);
  return report;
}

CompensatorValue lfv_compensator_drift(double x, const TruncationLevel& level,
                                       const RadiusLaw& law) {
  level.validate();
  law.validate();
  if (!std::isfinite(x)) {
    throw std::invalid_argument("lfv_compensator_drift: x must be finite");
  }

  const double half = level.y_halfwidth();
  const double wlo = level.w_lo();
  const double whi = level.w_hi();

  // \int_{D_{x,w} cap [-k,k]} (y - x) dy; the w v term integrates to zero
  // because the v-mean vanishes on the symmetric clipped interval.
  const auto clipped_offset_integral = [x, half](double w) {
    const double ylo = std::max(x - w, -half);
    const double yhi = std::min(x + w, half);
    if (yhi <= ylo) return 0.0;
    const double dhi = yhi - x;
    const double dlo = ylo - x;
    return 0.5 * (dhi * dhi - dlo * dlo);
  };

  double value = 0.0;
  for (const auto& atom : law.nu2.atoms) {
    if (atom.mass > 0.0 && atom.w >= wlo && atom.w <= whi) {
      value += atom.mass * law.nu1.zeta_moment(atom.w) * clipped_offset_integral(atom.w);
    }
  }

  if (law.nu2.has_density && law.nu2.coef > 0.0) {
    const double a = std::max(wlo, law.nu2.support_lo);
    const double b = std::min(whi, law.nu2.support_hi);
    if (b > a) {
      const auto integrand = [&](double w) {
        return law.nu2.coef * std::pow(w, -1.0 - law.nu2.alpha) *
               law.nu1.zeta_moment(w) * clipped_offset_integral(w);
      };
      // Clipping switches on at w = k - x and w = k + x.
      std::vector<double> nodes{a, b};
      for (double kink : {half - x, half + x}) {
        if (kink > a && kink < b) nodes.push_back(kink);
      }
      std::sort(nodes.begin(), nodes.end());
      for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        value += adaptive_simpson(integrand, nodes[i], nodes[i + 1], 1e-13);
      }
    }
  }

  const double wmax = law.nu2.max_radius(wlo, whi);
  CompensatorValue result;
  result.value = value;
  result.boundary_truncated = wmax > half - std::abs(x);
  return result;
}

double lfv_interior_halfwidth(const TruncationLevel& level, const RadiusLaw& law) {
  return level.y_halfwidth() - law.nu2.max_radius(level.w_lo(), level.w_hi());
}

bool lfv_path_interior(const CadlagPath& path, const TruncationLevel& level,
                       const RadiusLaw& law) {
  const double halfwidth = lfv_interior_halfwidth(level, law);
  if (std::abs(path.x0()) > halfwidth) return false;
  if (std::abs(path.terminal_value()) > halfwidth) return false;
  for (const auto& j : path.jumps()) {
    if (std::abs(j.pre_value) > halfwidth || std::abs(j.post_value) > halfwidth) {
      return false;
    }
  }
  return true;
}

ModelSpec lfv_model_spec(const TruncationLevel& level, const RadiusLaw& law,
                         std::size_t monotone_sample,
                         std::size_t monotone_grid_points) {
  if (monotone_sample == 0 || monotone_grid_points < 2) {
    throw std::invalid_argument("lfv_model_spec: need marks and at least two grid points");
  }

  ModelSpec model;
  model.drift = Drift::zero();
  model.region0 = lfv_region(level, law);
  model.kernel0.displacement = [](double x, const Mark& m) {
    return lfv_g0(x, LFVMark::from_mark(m));
  };
  model.kernel0.post_state = [](double x, const Mark& m) {
    return lfv_post_state(x, LFVMark::from_mark(m));
  };
  model.kernel0.compensator = [level, law](double x) {
    return lfv_compensator_drift(x, level, law).value;
  };
  model.kernel0.compensator_is_zero = true;
  model.label = "lfv-" + law.family + "-k" + std::to_string(level.k);

  PhiloxRng rng(derive_seed(kMonotoneCheckSeed, static_cast<std::uint64_t>(level.k),
                            StreamRole::Auxiliary));
  std::vector<Mark> marks(monotone_sample);
  for (auto& mark : marks) mark = model.region0.mark_sampler(rng);

  const auto grid_for_mark = [n = monotone_grid_points](const Mark& mark,
                                                        std::vector<double>& grid) {
    const LFVMark z = LFVMark::from_mark(mark);
    const double lo = z.y - 2.0 * z.w;
    const double hi = z.y + 2.0 * z.w;
    grid.resize(n);
    const double step = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
      grid[i] = lo + step * static_cast<double>(i);
    }
    grid.back() = hi;
  };
  const MonotoneReport report = check_monotone(model.kernel0, marks, grid_for_mark);
  model.kernel0.monotone = report.flag;
  return model;
}

}  // namespace jumpsde
