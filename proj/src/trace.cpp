#include "lae2/trace.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace lae2 {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_i64(std::string_view s, std::int64_t& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

// [0,1) from the top 53 bits; avoids stdlib distributions so that traces are
// reproducible across toolchains.
double next_double(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Unbiased integer in [0, bound).
std::uint64_t next_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = rng();
    if (r >= threshold) return r % bound;
  }
}

// Swap the top ceil(frac*N) ranks with distinct ranks from the bottom half.
void apply_shift(std::vector<ContentId>& perm, std::mt19937_64& rng, double frac,
                 std::vector<std::int32_t>& pool) {
  const auto n = static_cast<std::int32_t>(perm.size());
  const std::int32_t lo = n / 2;
  auto m = static_cast<std::int32_t>(std::ceil(frac * n));
  m = std::min(m, n - lo);  // cannot draw more distinct ranks than the bottom half holds
  if (m <= 0) return;
  pool.resize(static_cast<std::size_t>(n - lo));
  std::iota(pool.begin(), pool.end(), lo);
  for (std::int32_t j = 0; j < m; ++j) {
    const auto u = static_cast<std::int32_t>(next_below(rng, pool.size() - static_cast<std::size_t>(j)));
    std::swap(pool[j], pool[j + u]);
    std::swap(perm[j], perm[pool[j]]);
  }
}

}  // namespace

Trace read_trace(std::istream& in, const std::string& name) {
  Trace trace;
  std::string raw;
  std::int64_t lineno = 0;
  bool saw_header = false;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (!saw_header) {
      std::int64_t n = 0;
      if (!line.starts_with("N=") || !parse_i64(line.substr(2), n) || n <= 0) {
        throw TraceParseError(name + ": line " + std::to_string(lineno) +
                                  ": expected header N=<catalog_size>",
                              lineno);
      }
      trace.catalog_size = static_cast<std::int32_t>(n);
      saw_header = true;
      continue;
    }
    std::int64_t id = 0;
    if (!parse_i64(line, id)) {
      throw TraceParseError(name + ": line " + std::to_string(lineno) + ": malformed content id '" +
                                std::string(line) + "'",
                            lineno);
    }
    if (id < 0 || id >= trace.catalog_size) {
      throw TraceValidationError(name + ": line " + std::to_string(lineno) + ": content id " +
                                     std::to_string(id) + " outside catalog [0, " +
                                     std::to_string(trace.catalog_size) + ")",
                                 lineno);
    }
    trace.requests.push_back(static_cast<ContentId>(id));
  }
  if (!saw_header) throw TraceParseError(name + ": missing N=<catalog_size> header", 1);
  return trace;
}

Trace load_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace file: " + path.string());
  return read_trace(in, path.string());
}

void write_trace(const Trace& trace, std::ostream& out) {
  out << "N=" << trace.catalog_size << '\n';
  for (const ContentId id : trace.requests) out << id << '\n';
}

void write_trace(const Trace& trace, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open trace file for writing: " + path.string());
  write_trace(trace, out);
}

std::vector<double> zipf_pmf(double alpha, std::int32_t n) {
  if (alpha < 0.0 || n < 1) throw std::invalid_argument("zipf_pmf: need alpha >= 0 and n >= 1");
  std::vector<double> pmf(static_cast<std::size_t>(n));
  double norm = 0.0;
  for (std::int32_t r = 1; r <= n; ++r) {
    const double w = std::pow(static_cast<double>(r), -alpha);
    pmf[r - 1] = w;
    norm += w;
  }
  for (double& p : pmf) p /= norm;
  return pmf;
}

Trace generate_synthetic(const SyntheticSpec& spec) {
  if (spec.catalog_size < 1) throw std::invalid_argument("generate_synthetic: catalog_size must be positive");
  if (spec.length < 0) throw std::invalid_argument("generate_synthetic: length must be non-negative");
  if (spec.zipf_exponent < 0.0) throw std::invalid_argument("generate_synthetic: zipf_exponent must be >= 0");
  if (spec.shift_fraction < 0.0 || spec.shift_fraction > 1.0) {
    throw std::invalid_argument("generate_synthetic: shift_fraction must be in [0,1]");
  }
  if (spec.shift_period < 0 || (spec.shift_period > 0 && spec.shift_period > spec.length)) {
    throw std::invalid_argument("generate_synthetic: shift_period must be in [1, length] when present");
  }

  const std::int32_t n = spec.catalog_size;
  std::vector<double> cum = zipf_pmf(spec.zipf_exponent, n);
  std::partial_sum(cum.begin(), cum.end(), cum.begin());

  std::vector<ContentId> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);

  std::mt19937_64 rng(spec.rng_seed);
  std::vector<std::int32_t> pool;

  Trace trace;
  trace.catalog_size = n;
  trace.requests.reserve(static_cast<std::size_t>(spec.length));
  for (std::int64_t t = 0; t < spec.length; ++t) {
    if (spec.shift_period > 0 && t > 0 && t % spec.shift_period == 0) {
      apply_shift(perm, rng, spec.shift_fraction, pool);
    }
    const double u = next_double(rng);
    auto idx = static_cast<std::int32_t>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
    idx = std::min(idx, n - 1);
    trace.requests.push_back(perm[idx]);
  }
  return trace;
}

}  // namespace lae2
