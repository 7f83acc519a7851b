#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace lae2 {

// Contents are indexed 0..N-1 within a catalog of N items.
using ContentId = std::int32_t;

// One content demand at a discrete timeslot.
struct Request {
  std::int64_t timeslot = 0;
  ContentId content = 0;
};

// An ordered request sequence. Timeslots run 0..T-1, so the content demanded
// at timeslot t is simply requests[t].
struct Trace {
  std::int32_t catalog_size = 0;  // N; valid ids are [0, N)
  std::vector<ContentId> requests;

  std::int64_t length() const { return static_cast<std::int64_t>(requests.size()); }
  Request at(std::int64_t t) const { return {t, requests[static_cast<std::size_t>(t)]}; }
};

// Zipf(alpha) workload over a rank-to-id permutation of the catalog. When
// shift_period > 0, every shift_period requests the top ceil(shift_fraction*N)
// ranks are swapped with ranks drawn uniformly (without replacement) from the
// bottom half of the catalog, so genuinely new hot contents appear.
struct SyntheticSpec {
  std::int32_t catalog_size = 0;
  std::int64_t length = 0;
  double zipf_exponent = 1.0;
  std::int64_t shift_period = 0;  // 0 disables shifts
  double shift_fraction = 0.0;
  std::uint64_t rng_seed = 0;
};

class TraceParseError : public std::runtime_error {
 public:
  TraceParseError(const std::string& what, std::int64_t line)
      : std::runtime_error(what), line_(line) {}
  std::int64_t line() const { return line_; }

 private:
  std::int64_t line_;
};

class TraceValidationError : public std::runtime_error {
 public:
  TraceValidationError(const std::string& what, std::int64_t line)
      : std::runtime_error(what), line_(line) {}
  std::int64_t line() const { return line_; }

 private:
  std::int64_t line_;
};

// Trace file format: UTF-8 text, line 1 is `N=<catalog_size>`, every further
// non-comment line is one decimal content id in [0, N). Lines starting with
// `#` are ignored.
Trace load_trace(const std::filesystem::path& path);
Trace read_trace(std::istream& in, const std::string& name = "<stream>");
void write_trace(const Trace& trace, const std::filesystem::path& path);
void write_trace(const Trace& trace, std::ostream& out);

// pmf over ranks 1..n: entry r-1 is r^-alpha / sum_{j=1..n} j^-alpha.
std::vector<double> zipf_pmf(double alpha, std::int32_t n);

// Deterministic for a fixed spec: all randomness flows through one generator
// seeded with spec.rng_seed.
Trace generate_synthetic(const SyntheticSpec& spec);

}  // namespace lae2
