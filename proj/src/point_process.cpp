#include "jumpsde/point_process.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace jumpsde {

const char* to_string(NoiseSource source) {
  return source == NoiseSource::Compensated0 ? "compensated0" : "uncompensated1";
}

bool event_key_less(const MarkedEvent& a, const MarkedEvent& b) {
  if (a.time != b.time) return a.time < b.time;
  if (a.source != b.source) return a.source < b.source;
  return a.insertion_index < b.insertion_index;
}

EventStream sample_stream(const IntensityRegion& region, double horizon,
                          const SeedSpec& seed) {
  const NoiseSource source = seed.stream_role == StreamRole::Noise1
                                 ? NoiseSource::Uncompensated1
                                 : NoiseSource::Compensated0;
  return sample_stream(region, horizon, seed, source);
}

EventStream sample_stream(const IntensityRegion& region, double horizon,
                          const SeedSpec& seed, NoiseSource source) {
  if (!std::isfinite(region.total_rate) || region.total_rate < 0.0) {
    throw std::invalid_argument("sample_stream: total_rate must be finite and non-negative");
  }
  if (!std::isfinite(horizon) || horizon <= 0.0) {
    throw std::invalid_argument("sample_stream: horizon must be finite and positive");
  }

  EventStream stream;
  stream.horizon = horizon;
  stream.mark_dim = region.mark_dim;

  const double mean = region.total_rate * horizon;
  if (mean == 0.0) return stream;
  if (!region.mark_sampler) {
    throw std::invalid_argument("sample_stream: region with positive mass needs a mark_sampler");
  }

  PhiloxRng rng(seed);
  const std::uint64_t count = rng.poisson(mean);

  std::vector<double> times(count);
  for (auto& t : times) {
    // 1 - U maps [0,1) onto (0, horizon].
    t = horizon * (1.0 - rng.next_double());
  }
  std::sort(times.begin(), times.end());

  stream.events.resize(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    stream.events[i].time = times[i];
    stream.events[i].mark = region.mark_sampler(rng);
    stream.events[i].source = source;
    stream.events[i].insertion_index = static_cast<std::uint32_t>(i);
  }
  return stream;
}

EventStream merge_streams(const EventStream& s1, const EventStream& s2) {
  if (s1.horizon != s2.horizon) {
    throw std::invalid_argument("merge_streams: horizons differ");
  }
  if (!s1.empty() && !s2.empty() && s1.mark_dim != s2.mark_dim) {
    throw std::invalid_argument("merge_streams: mark dimensions differ");
  }

  EventStream merged;
  merged.horizon = s1.horizon;
  merged.mark_dim = s1.empty() ? s2.mark_dim : s1.mark_dim;
  merged.events.resize(s1.size() + s2.size());
  std::merge(s1.events.begin(), s1.events.end(), s2.events.begin(),
             s2.events.end(), merged.events.begin(), event_key_less);
  return merged;
}

EventStream filter_stream(const EventStream& s,
                          const std::function<bool(const Mark&)>& predicate) {
  if (!predicate) {
    throw std::invalid_argument("filter_stream: predicate must be callable");
  }
  EventStream out;
  out.horizon = s.horizon;
  out.mark_dim = s.mark_dim;
  out.events.reserve(s.size());
  std::copy_if(s.events.begin(), s.events.end(), std::back_inserter(out.events),
               [&](const MarkedEvent& e) { return predicate(e.mark); });
  return out;
}

}  // namespace jumpsde
