#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lae2/trace.hpp"

namespace lae2 {

// The set of at-most-K cached contents plus per-content bookkeeping. The
// engine owns the only mutable reference; policies receive it as a read-only
// view (const&).
class CacheState {
 public:
  explicit CacheState(std::int32_t capacity);

  std::int32_t capacity() const { return capacity_; }
  std::int32_t size() const { return static_cast<std::int32_t>(members_.size()); }
  bool full() const { return size() == capacity_; }
  bool contains(ContentId id) const { return entries_.find(id) != entries_.end(); }
  std::int64_t inserted_at(ContentId id) const;
  std::int64_t last_access(ContentId id) const;

  // Membership in a deterministic, history-defined order. Policies must not
  // attach meaning to the order itself; it exists so scans are reproducible.
  const std::vector<ContentId>& contents() const { return members_; }

  // Engine-side mutators.
  void insert(ContentId id, std::int64_t t);
  void touch(ContentId id, std::int64_t t);
  void erase(ContentId id);

 private:
  struct Entry {
    std::int64_t inserted_at;
    std::int64_t last_access;
    std::int32_t slot;  // index into members_
  };
  std::int32_t capacity_;
  std::vector<ContentId> members_;
  std::unordered_map<ContentId, Entry> entries_;
};

struct PolicyDecision {
  enum class Kind { Hit, MissInsert, MissEvict };
  Kind kind = Kind::Hit;
  ContentId evicted = -1;  // valid only for MissEvict
};

// Common surface for the rule-based policies, the oracle and LA-E2.
// on_request fires for every request before the engine resolves it;
// choose_eviction fires only on full-cache misses and must return a currently
// cached id; on_eviction reports the applied eviction.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string name() const = 0;
  virtual void on_request(std::int64_t t, ContentId content, const CacheState& cache) {
    (void)t;
    (void)content;
    (void)cache;
  }
  virtual ContentId choose_eviction(std::int64_t t, ContentId incoming, const CacheState& cache) = 0;
  virtual void on_eviction(std::int64_t t, ContentId evicted) {
    (void)t;
    (void)evicted;
  }
};

class ContractViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MetricsSample {
  std::int64_t t = 0;
  double cumulative_hit_rate = 0.0;
  double windowed_hit_rate = 0.0;
};

struct MetricsSeries {
  std::int64_t total_requests = 0;
  std::int64_t total_hits = 0;
  std::int64_t window = 1000;
  std::int64_t stride = 100;
  std::vector<MetricsSample> samples;
};

struct SimulationOptions {
  std::int64_t metrics_window = 1000;
  std::int64_t metrics_stride = 100;
};

struct SimulationResult {
  MetricsSeries metrics;
  std::vector<std::pair<std::int64_t, ContentId>> eviction_log;  // (t, e_t)
};

// Processes requests in order: hit -> count; miss with spare room -> insert
// (compulsory miss); miss with full cache -> evict the policy's choice, then
// insert. The incoming content is always admitted after an eviction.
// Throws ContractViolation naming t if the policy returns a non-cached id.
SimulationResult simulate(const Trace& trace, std::int32_t capacity, Policy& policy,
                          const SimulationOptions& opts = {});

// total_hits / total_requests; throws on an empty series.
double hit_rate(const MetricsSeries& metrics);

// CSV with columns (t, cumulative_hit_rate, windowed_hit_rate). The comment
// line, when non-empty, is emitted first as `# <comment>`.
void write_metrics_csv(std::ostream& out, const MetricsSeries& metrics,
                       std::string_view comment = {});

// Fixed-format float used by every CSV writer so re-runs are byte-identical.
std::string format_double(double v);

}  // namespace lae2
