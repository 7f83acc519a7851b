#pragma once

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "lae2/cache.hpp"
#include "lae2/lstm.hpp"
#include "lae2/trace.hpp"

namespace lae2 {

struct LstmPredictorConfig {
  std::int32_t layers = 1;        // 3 at paper scale
  std::int32_t hidden_units = 32; // 128 at paper scale
  std::int32_t input_window = 8;
  double learning_rate = 0.1;
  std::int32_t epochs_per_update = 2;
  std::int32_t vocab_cap = 5000;
  std::int32_t batch_size = 32;
  double grad_clip = 5.0;
  std::uint64_t seed = 1;
  bool parallel = false;
};

struct PredictorConfig {
  enum class Kind { DecayedFrequency, Lstm };
  Kind kind = Kind::DecayedFrequency;
  std::int64_t update_interval = 1000;  // retrain every n requests
  std::int64_t history_window = 1000;   // requests fed to each update
  std::int32_t top_k = 10;
  double decay = 1.0;  // DecayedFrequency: per-step weight on older requests
  LstmPredictorConfig lstm;
};

// scores[i] estimates the probability that the next request is content i.
struct PopularityForecast {
  std::vector<double> scores;
};

struct LossSample {
  std::int64_t update_index = 0;
  double mean_loss = 0.0;
};

// Popularity estimator updated on coarse timescales: observe() ingests every
// request and retrains each update_interval-th one; forecast() returns the
// frozen snapshot computed at the last update boundary (uniform before the
// first update).
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual std::string name() const = 0;
  virtual void observe(std::int64_t t, ContentId content) = 0;
  virtual const PopularityForecast& forecast() const = 0;
  virtual std::int64_t update_count() const = 0;
  virtual std::int64_t failed_updates() const { return 0; }
  virtual std::span<const LossSample> loss_log() const { return {}; }
  virtual std::string describe() const = 0;
};

class DecayedFrequencyPredictor : public Predictor {
 public:
  DecayedFrequencyPredictor(const PredictorConfig& cfg, std::int32_t catalog_size);
  std::string name() const override { return "decayed_frequency"; }
  void observe(std::int64_t t, ContentId content) override;
  const PopularityForecast& forecast() const override { return forecast_; }
  std::int64_t update_count() const override { return updates_; }
  std::string describe() const override;

 private:
  void recompute();

  PredictorConfig cfg_;
  std::int32_t catalog_;
  std::deque<ContentId> history_;
  PopularityForecast forecast_;
  std::int64_t seen_ = 0;
  std::int64_t updates_ = 0;
};

class LstmPredictor : public Predictor {
 public:
  LstmPredictor(const PredictorConfig& cfg, std::int32_t catalog_size);
  std::string name() const override { return "lstm"; }
  void observe(std::int64_t t, ContentId content) override;
  const PopularityForecast& forecast() const override { return forecast_; }
  std::int64_t update_count() const override { return updates_; }
  std::int64_t failed_updates() const override { return failed_updates_; }
  std::span<const LossSample> loss_log() const override { return loss_log_; }
  std::string describe() const override;

  const LstmModel& model() const { return model_; }

  // Mean cross-entropy of the frozen model over all complete windows of a
  // request sequence.
  double evaluate(std::span<const ContentId> requests) const;

 private:
  std::int32_t to_vocab(ContentId id) const;
  void train_update();

  PredictorConfig cfg_;
  std::int32_t catalog_;
  std::int32_t vocab_;
  LstmModel model_;
  std::deque<ContentId> history_;
  PopularityForecast forecast_;
  std::vector<LossSample> loss_log_;
  std::mt19937_64 rng_;
  std::int64_t seen_ = 0;
  std::int64_t updates_ = 0;
  std::int64_t failed_updates_ = 0;
};

std::unique_ptr<Predictor> make_predictor(const PredictorConfig& cfg, std::int32_t catalog_size);

// The min(k, cache size) cached ids with the smallest forecast scores, in
// ascending score order; ties break toward the smaller id.
std::vector<ContentId> topk_candidates(const PopularityForecast& forecast, const CacheState& cache,
                                       std::int32_t k);

// CSV with columns (update_index, mean_loss).
void write_loss_csv(std::ostream& out, std::span<const LossSample> log, std::string_view comment = {});

}  // namespace lae2
