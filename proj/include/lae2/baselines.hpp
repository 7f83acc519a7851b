#pragma once

#include <cstdint>
#include <deque>
#include <unordered_map>
#include <vector>

#include "lae2/cache.hpp"

namespace lae2 {

// Frequency counted over the most recent `window` requests; 0 counts over the
// full past.
struct LfuConfig {
  std::int64_t window = 0;
};

// Rank cached contents by their k_hits-th most recent access; k_hits = 1 is
// plain LRU.
struct KLruConfig {
  std::int32_t k_hits = 1;
};

// Evicts the cached id with the smallest insertion timeslot.
ContentId fifo_victim(const CacheState& cache);

class FifoPolicy : public Policy {
 public:
  std::string name() const override { return "fifo"; }
  ContentId choose_eviction(std::int64_t t, ContentId incoming, const CacheState& cache) override;
};

// Evicts the cached id whose k_hits-th most recent access is oldest. Ids with
// fewer than k_hits recorded accesses rank older than all fully observed ids
// and are ordered among themselves by their oldest available access.
class KLruPolicy : public Policy {
 public:
  explicit KLruPolicy(KLruConfig cfg);
  std::string name() const override;
  void on_request(std::int64_t t, ContentId content, const CacheState& cache) override;
  ContentId choose_eviction(std::int64_t t, ContentId incoming, const CacheState& cache) override;

 private:
  KLruConfig cfg_;
  std::unordered_map<ContentId, std::deque<std::int64_t>> history_;  // last k_hits access times
};

// Evicts the cached id requested the fewest times in the configured window.
// Ties break by least-recent access, then smallest id.
class LfuPolicy : public Policy {
 public:
  explicit LfuPolicy(LfuConfig cfg);
  std::string name() const override;
  void on_request(std::int64_t t, ContentId content, const CacheState& cache) override;
  ContentId choose_eviction(std::int64_t t, ContentId incoming, const CacheState& cache) override;

  std::int64_t frequency(ContentId id) const;

 private:
  LfuConfig cfg_;
  std::unordered_map<ContentId, std::int64_t> counts_;
  std::vector<ContentId> ring_;  // last `window` request ids, windowed mode only
  std::int64_t seen_ = 0;
};

}  // namespace lae2
