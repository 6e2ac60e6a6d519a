#ifndef JUMPSDE_POINT_PROCESS_HPP
#define JUMPSDE_POINT_PROCESS_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "jumpsde/rng.hpp"

namespace jumpsde {

// Marks are fixed-capacity tuples of doubles; the meaning of the components
// is model specific (a scalar jump size uses component 0, the relocation
// model uses all five). Unused components stay zero.
using Mark = std::array<double, 5>;

inline Mark scalar_mark(double u) { return Mark{u, 0.0, 0.0, 0.0, 0.0}; }

enum class NoiseSource : std::uint8_t { Compensated0 = 0, Uncompensated1 = 1 };

const char* to_string(NoiseSource source);

struct MarkedEvent {
  double time = 0.0;
  Mark mark{};
  NoiseSource source = NoiseSource::Compensated0;
  // Position within the stream that sampled the event; together with
  // (time, source) it gives every event a unique, stable sort key.
  std::uint32_t insertion_index = 0;
};

// (time, source, insertion_index) lexicographic order.
bool event_key_less(const MarkedEvent& a, const MarkedEvent& b);

// A finite-mass restriction of a characteristic measure. total_rate is the
// measure's mass on the region; mark_sampler draws marks from the measure
// restricted to the region and normalized.
struct IntensityRegion {
  double total_rate = 0.0;
  int mark_dim = 1;
  std::function<Mark(PhiloxRng&)> mark_sampler;
  std::string region_descriptor;
};

struct EventStream {
  double horizon = 0.0;
  int mark_dim = 1;
  std::vector<MarkedEvent> events;

  bool empty() const { return events.empty(); }
  std::size_t size() const { return events.size(); }
};

// Homogeneous Poisson realization on (0, horizon]: the count is
// Poisson(total_rate * horizon), times are iid uniform, marks iid from the
// region's sampler. Deterministic in the seed. A zero-mass region yields an
// empty stream.
EventStream sample_stream(const IntensityRegion& region, double horizon,
                          const SeedSpec& seed);
EventStream sample_stream(const IntensityRegion& region, double horizon,
                          const SeedSpec& seed, NoiseSource source);

// Sorted superposition of two independent realizations. Horizons (and mark
// dimensions, unless one side is empty) must match; ties are broken by
// (source, insertion_index).
EventStream merge_streams(const EventStream& s1, const EventStream& s2);

// Order-preserving subsequence of events whose mark satisfies the predicate.
EventStream filter_stream(const EventStream& s,
                          const std::function<bool(const Mark&)>& predicate);

}  // namespace jumpsde

#endif  // JUMPSDE_POINT_PROCESS_HPP
