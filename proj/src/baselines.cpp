#include "lae2/baselines.hpp"

#include <limits>
#include <stdexcept>
#include <tuple>

namespace lae2 {

ContentId fifo_victim(const CacheState& cache) {
  ContentId victim = -1;
  std::int64_t oldest = std::numeric_limits<std::int64_t>::max();
  for (const ContentId id : cache.contents()) {
    const std::int64_t inserted = cache.inserted_at(id);
    if (inserted < oldest || (inserted == oldest && id < victim)) {
      oldest = inserted;
      victim = id;
    }
  }
  return victim;
}

ContentId FifoPolicy::choose_eviction(std::int64_t, ContentId, const CacheState& cache) {
  return fifo_victim(cache);
}

KLruPolicy::KLruPolicy(KLruConfig cfg) : cfg_(cfg) {
  if (cfg_.k_hits < 1) throw std::invalid_argument("k-lru: k_hits must be >= 1");
}

std::string KLruPolicy::name() const { return "klru" + std::to_string(cfg_.k_hits); }

void KLruPolicy::on_request(std::int64_t t, ContentId content, const CacheState&) {
  auto& times = history_[content];
  times.push_back(t);
  if (static_cast<std::int32_t>(times.size()) > cfg_.k_hits) times.pop_front();
}

ContentId KLruPolicy::choose_eviction(std::int64_t, ContentId, const CacheState& cache) {
  // Rank key: (has full k-hit history, k-th most recent access, id). Partial
  // histories sort before full ones so under-observed contents go first.
  ContentId victim = -1;
  bool victim_full = true;
  std::int64_t victim_key = std::numeric_limits<std::int64_t>::max();
  for (const ContentId id : cache.contents()) {
    const auto it = history_.find(id);
    // Every cached id was requested at insertion, so history always exists.
    const auto& times = it->second;
    const bool full_history = static_cast<std::int32_t>(times.size()) >= cfg_.k_hits;
    const std::int64_t key = times.front();
    if (victim == -1 || std::tuple(full_history, key, id) < std::tuple(victim_full, victim_key, victim)) {
      victim = id;
      victim_full = full_history;
      victim_key = key;
    }
  }
  return victim;
}

LfuPolicy::LfuPolicy(LfuConfig cfg) : cfg_(cfg) {
  if (cfg_.window < 0) throw std::invalid_argument("lfu: window must be >= 1 or 0 for all-time");
  if (cfg_.window > 0) ring_.assign(static_cast<std::size_t>(cfg_.window), -1);
}

std::string LfuPolicy::name() const {
  return cfg_.window == 0 ? "lfu" : "lfu_w" + std::to_string(cfg_.window);
}

void LfuPolicy::on_request(std::int64_t, ContentId content, const CacheState&) {
  if (cfg_.window > 0) {
    const std::size_t slot = static_cast<std::size_t>(seen_ % cfg_.window);
    if (seen_ >= cfg_.window) {
      const ContentId old = ring_[slot];
      const auto it = counts_.find(old);
      if (--it->second == 0) counts_.erase(it);
    }
    ring_[slot] = content;
  }
  ++counts_[content];
  ++seen_;
}

std::int64_t LfuPolicy::frequency(ContentId id) const {
  const auto it = counts_.find(id);
  return it == counts_.end() ? 0 : it->second;
}

ContentId LfuPolicy::choose_eviction(std::int64_t, ContentId, const CacheState& cache) {
  ContentId victim = -1;
  std::int64_t victim_count = 0;
  std::int64_t victim_access = 0;
  for (const ContentId id : cache.contents()) {
    const std::int64_t count = frequency(id);
    const std::int64_t access = cache.last_access(id);
    if (victim == -1 ||
        std::tuple(count, access, id) < std::tuple(victim_count, victim_access, victim)) {
      victim = id;
      victim_count = count;
      victim_access = access;
    }
  }
  return victim;
}

}  // namespace lae2
