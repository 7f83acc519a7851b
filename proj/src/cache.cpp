#include "lae2/cache.hpp"

#include <cassert>
#include <cstdio>
#include <ostream>

namespace lae2 {

CacheState::CacheState(std::int32_t capacity) : capacity_(capacity) {
  if (capacity < 1) throw std::invalid_argument("cache capacity must be >= 1");
  members_.reserve(static_cast<std::size_t>(capacity));
  entries_.reserve(static_cast<std::size_t>(capacity) * 2);
}

std::int64_t CacheState::inserted_at(ContentId id) const {
  const auto it = entries_.find(id);
  if (it == entries_.end()) throw std::out_of_range("content not cached");
  return it->second.inserted_at;
}

std::int64_t CacheState::last_access(ContentId id) const {
  const auto it = entries_.find(id);
  if (it == entries_.end()) throw std::out_of_range("content not cached");
  return it->second.last_access;
}

void CacheState::insert(ContentId id, std::int64_t t) {
  if (full()) throw std::logic_error("insert into full cache");
  if (contains(id)) throw std::logic_error("insert of already cached content");
  entries_.emplace(id, Entry{t, t, static_cast<std::int32_t>(members_.size())});
  members_.push_back(id);
}

void CacheState::touch(ContentId id, std::int64_t t) {
  const auto it = entries_.find(id);
  if (it == entries_.end()) throw std::logic_error("touch of non-cached content");
  it->second.last_access = t;
}

void CacheState::erase(ContentId id) {
  const auto it = entries_.find(id);
  if (it == entries_.end()) throw std::logic_error("erase of non-cached content");
  const std::int32_t slot = it->second.slot;
  const ContentId moved = members_.back();
  members_[slot] = moved;
  members_.pop_back();
  if (moved != id) entries_.at(moved).slot = slot;
  entries_.erase(it);
}

namespace {

// Hit/miss ring over the last `window` requests.
class HitWindow {
 public:
  explicit HitWindow(std::int64_t window) : ring_(static_cast<std::size_t>(window), 0) {}

  void push(bool hit) {
    const std::size_t slot = static_cast<std::size_t>(count_ % static_cast<std::int64_t>(ring_.size()));
    if (count_ >= static_cast<std::int64_t>(ring_.size())) hits_ -= ring_[slot];
    ring_[slot] = hit ? 1 : 0;
    hits_ += ring_[slot];
    ++count_;
  }

  double rate() const {
    const std::int64_t denom = std::min(count_, static_cast<std::int64_t>(ring_.size()));
    return denom == 0 ? 0.0 : static_cast<double>(hits_) / static_cast<double>(denom);
  }

 private:
  std::vector<char> ring_;
  std::int64_t hits_ = 0;
  std::int64_t count_ = 0;
};

}  // namespace

SimulationResult simulate(const Trace& trace, std::int32_t capacity, Policy& policy,
                          const SimulationOptions& opts) {
  if (opts.metrics_window < 1 || opts.metrics_stride < 1) {
    throw std::invalid_argument("metrics window and stride must be >= 1");
  }
  CacheState cache(capacity);
  SimulationResult result;
  MetricsSeries& metrics = result.metrics;
  metrics.window = opts.metrics_window;
  metrics.stride = opts.metrics_stride;
  HitWindow window(opts.metrics_window);

  const std::int64_t total = trace.length();
  for (std::int64_t t = 0; t < total; ++t) {
    const ContentId content = trace.requests[static_cast<std::size_t>(t)];
    policy.on_request(t, content, cache);

    const bool hit = cache.contains(content);
    if (hit) {
      cache.touch(content, t);
      ++metrics.total_hits;
    } else if (!cache.full()) {
      cache.insert(content, t);
    } else {
      const ContentId victim = policy.choose_eviction(t, content, cache);
      if (!cache.contains(victim)) {
        throw ContractViolation("policy '" + policy.name() + "' returned non-cached eviction victim " +
                                std::to_string(victim) + " at timeslot " + std::to_string(t));
      }
      cache.erase(victim);
      policy.on_eviction(t, victim);
      result.eviction_log.emplace_back(t, victim);
      cache.insert(content, t);
    }
    assert(cache.size() <= capacity);

    ++metrics.total_requests;
    window.push(hit);
    const bool on_stride = (t + 1) % opts.metrics_stride == 0;
    if (on_stride || t + 1 == total) {
      metrics.samples.push_back(
          {t, static_cast<double>(metrics.total_hits) / static_cast<double>(t + 1), window.rate()});
    }
  }
  return result;
}

double hit_rate(const MetricsSeries& metrics) {
  if (metrics.total_requests < 1) throw std::domain_error("hit rate undefined for an empty series");
  return static_cast<double>(metrics.total_hits) / static_cast<double>(metrics.total_requests);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void write_metrics_csv(std::ostream& out, const MetricsSeries& metrics, std::string_view comment) {
  if (!comment.empty()) out << "# " << comment << '\n';
  out << "t,cumulative_hit_rate,windowed_hit_rate\n";
  for (const MetricsSample& s : metrics.samples) {
    out << s.t << ',' << format_double(s.cumulative_hit_rate) << ','
        << format_double(s.windowed_hit_rate) << '\n';
  }
}

}  // namespace lae2
