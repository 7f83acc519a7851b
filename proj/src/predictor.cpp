#include "lae2/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace lae2 {

namespace {

void validate_common(const PredictorConfig& cfg, std::int32_t catalog) {
  if (catalog < 1) throw std::invalid_argument("predictor: catalog size must be positive");
  if (cfg.update_interval < 1) throw std::invalid_argument("predictor: update_interval must be >= 1");
  if (cfg.history_window < 1) throw std::invalid_argument("predictor: history_window must be >= 1");
  if (cfg.top_k < 1) throw std::invalid_argument("predictor: top_k must be >= 1");
}

PopularityForecast uniform_forecast(std::int32_t catalog) {
  PopularityForecast f;
  f.scores.assign(static_cast<std::size_t>(catalog), 1.0 / static_cast<double>(catalog));
  return f;
}

}  // namespace

DecayedFrequencyPredictor::DecayedFrequencyPredictor(const PredictorConfig& cfg, std::int32_t catalog_size)
    : cfg_(cfg), catalog_(catalog_size) {
  validate_common(cfg, catalog_size);
  if (cfg.decay <= 0.0 || cfg.decay > 1.0) {
    throw std::invalid_argument("predictor: decay must be in (0, 1]");
  }
  forecast_ = uniform_forecast(catalog_);
}

void DecayedFrequencyPredictor::observe(std::int64_t, ContentId content) {
  if (content < 0 || content >= catalog_) throw std::invalid_argument("predictor: id outside catalog");
  history_.push_back(content);
  if (static_cast<std::int64_t>(history_.size()) > cfg_.history_window) history_.pop_front();
  if (++seen_ % cfg_.update_interval == 0) recompute();
}

void DecayedFrequencyPredictor::recompute() {
  std::vector<double> counts(static_cast<std::size_t>(catalog_), 0.0);
  // age 0 = most recent observation
  double weight = 1.0;
  double total = 0.0;
  for (auto it = history_.rbegin(); it != history_.rend(); ++it) {
    counts[static_cast<std::size_t>(*it)] += weight;
    total += weight;
    weight *= cfg_.decay;
  }
  if (total <= 0.0) {
    forecast_ = uniform_forecast(catalog_);
  } else {
    for (double& c : counts) c /= total;
    forecast_.scores = std::move(counts);
  }
  ++updates_;
}

std::string DecayedFrequencyPredictor::describe() const {
  std::ostringstream out;
  out << "kind=decayed_frequency update_interval=" << cfg_.update_interval
      << " history_window=" << cfg_.history_window << " decay=" << format_double(cfg_.decay)
      << " updates=" << updates_;
  return out.str();
}

LstmPredictor::LstmPredictor(const PredictorConfig& cfg, std::int32_t catalog_size)
    : cfg_(cfg),
      catalog_(catalog_size),
      vocab_(std::min(catalog_size, cfg.lstm.vocab_cap) + (catalog_size > cfg.lstm.vocab_cap ? 1 : 0)),
      model_(LstmModel::Config{cfg.lstm.layers, cfg.lstm.hidden_units, vocab_, catalog_size,
                               cfg.lstm.input_window, cfg.lstm.seed, cfg.lstm.parallel}),
      rng_(cfg.lstm.seed ^ 0x9e3779b97f4a7c15ull) {
  validate_common(cfg, catalog_size);
  const auto& l = cfg.lstm;
  if (l.vocab_cap < 1 || l.epochs_per_update < 1 || l.batch_size < 1 || l.learning_rate <= 0.0 ||
      l.grad_clip <= 0.0) {
    throw std::invalid_argument("predictor: invalid lstm configuration");
  }
  forecast_ = uniform_forecast(catalog_);
}

std::int32_t LstmPredictor::to_vocab(ContentId id) const {
  return id < cfg_.lstm.vocab_cap ? id : cfg_.lstm.vocab_cap;  // out-of-vocabulary bucket
}

void LstmPredictor::observe(std::int64_t, ContentId content) {
  if (content < 0 || content >= catalog_) throw std::invalid_argument("predictor: id outside catalog");
  history_.push_back(content);
  if (static_cast<std::int64_t>(history_.size()) > cfg_.history_window) history_.pop_front();
  if (++seen_ % cfg_.update_interval == 0) train_update();
}

void LstmPredictor::train_update() {
  const std::int32_t window = cfg_.lstm.input_window;
  const auto history_len = static_cast<std::int64_t>(history_.size());
  if (history_len < window + 1) return;  // not enough observations yet

  std::vector<std::int32_t> seq(history_.size());
  std::transform(history_.begin(), history_.end(), seq.begin(),
                 [this](ContentId id) { return to_vocab(id); });
  std::vector<ContentId> targets(history_.begin(), history_.end());

  std::vector<std::int64_t> starts(static_cast<std::size_t>(history_len - window));
  std::iota(starts.begin(), starts.end(), 0);

  const std::vector<double> snapshot = model_.params();
  std::vector<double> grad(model_.param_count(), 0.0);
  LstmModel::Workspace ws;

  double loss_sum = 0.0;
  std::int64_t loss_count = 0;
  bool finite = true;

  for (std::int32_t epoch = 0; epoch < cfg_.lstm.epochs_per_update && finite; ++epoch) {
    // Fisher-Yates with the predictor's own generator keeps runs reproducible.
    for (std::size_t i = starts.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(rng_() % i);
      std::swap(starts[i - 1], starts[j]);
    }
    for (std::size_t at = 0; at < starts.size() && finite; at += cfg_.lstm.batch_size) {
      const std::size_t batch_end = std::min(starts.size(), at + cfg_.lstm.batch_size);
      const auto batch = static_cast<double>(batch_end - at);
      std::fill(grad.begin(), grad.end(), 0.0);
      double batch_loss = 0.0;
      for (std::size_t b = at; b < batch_end; ++b) {
        const std::int64_t s = starts[b];
        batch_loss += model_.loss_and_grad(
            std::span<const std::int32_t>(seq.data() + s, static_cast<std::size_t>(window)),
            targets[static_cast<std::size_t>(s + window)], grad, ws);
      }
      batch_loss /= batch;
      double norm_sq = 0.0;
      for (double& g : grad) {
        g /= batch;
        norm_sq += g * g;
      }
      if (!std::isfinite(batch_loss) || !std::isfinite(norm_sq)) {
        finite = false;
        break;
      }
      const double norm = std::sqrt(norm_sq);
      const double scale = norm > cfg_.lstm.grad_clip ? cfg_.lstm.grad_clip / norm : 1.0;
      model_.apply_update(grad, cfg_.lstm.learning_rate * scale);
      loss_sum += batch_loss * batch;
      loss_count += static_cast<std::int64_t>(batch_end - at);
    }
  }

  if (!finite) {
    // abort the update, keep the previous model and forecast
    model_.params() = snapshot;
    ++failed_updates_;
    return;
  }

  ++updates_;
  loss_log_.push_back({updates_, loss_sum / static_cast<double>(loss_count)});
  const std::size_t tail = seq.size() - static_cast<std::size_t>(window);
  forecast_.scores = model_.forward(
      std::span<const std::int32_t>(seq.data() + tail, static_cast<std::size_t>(window)));
}

double LstmPredictor::evaluate(std::span<const ContentId> requests) const {
  const std::int32_t window = cfg_.lstm.input_window;
  if (static_cast<std::int64_t>(requests.size()) < window + 1) {
    throw std::invalid_argument("predictor: evaluation sequence shorter than one window");
  }
  std::vector<std::int32_t> seq(requests.size());
  std::transform(requests.begin(), requests.end(), seq.begin(),
                 [this](ContentId id) { return to_vocab(id); });
  LstmModel::Workspace ws;
  double loss_sum = 0.0;
  std::int64_t count = 0;
  for (std::size_t s = 0; s + static_cast<std::size_t>(window) < requests.size(); ++s) {
    loss_sum += model_.loss(
        std::span<const std::int32_t>(seq.data() + s, static_cast<std::size_t>(window)),
        requests[s + static_cast<std::size_t>(window)], ws);
    ++count;
  }
  return loss_sum / static_cast<double>(count);
}

std::string LstmPredictor::describe() const {
  std::ostringstream out;
  out << "kind=lstm update_interval=" << cfg_.update_interval
      << " history_window=" << cfg_.history_window << " layers=" << cfg_.lstm.layers
      << " hidden_units=" << cfg_.lstm.hidden_units << " input_window=" << cfg_.lstm.input_window
      << " learning_rate=" << format_double(cfg_.lstm.learning_rate)
      << " epochs_per_update=" << cfg_.lstm.epochs_per_update << " vocab_cap=" << cfg_.lstm.vocab_cap
      << " seed=" << cfg_.lstm.seed << " updates=" << updates_ << " failed_updates=" << failed_updates_;
  return out.str();
}

std::unique_ptr<Predictor> make_predictor(const PredictorConfig& cfg, std::int32_t catalog_size) {
  switch (cfg.kind) {
    case PredictorConfig::Kind::DecayedFrequency:
      return std::make_unique<DecayedFrequencyPredictor>(cfg, catalog_size);
    case PredictorConfig::Kind::Lstm:
      return std::make_unique<LstmPredictor>(cfg, catalog_size);
  }
  throw std::logic_error("predictor: unknown kind");
}

std::vector<ContentId> topk_candidates(const PopularityForecast& forecast, const CacheState& cache,
                                       std::int32_t k) {
  if (k < 1) throw std::invalid_argument("topk_candidates: k must be >= 1");
  if (cache.size() == 0) throw std::invalid_argument("topk_candidates: cache is empty");
  std::vector<ContentId> ids = cache.contents();
  std::sort(ids.begin(), ids.end(), [&forecast](ContentId a, ContentId b) {
    const double sa = forecast.scores[static_cast<std::size_t>(a)];
    const double sb = forecast.scores[static_cast<std::size_t>(b)];
    return sa != sb ? sa < sb : a < b;
  });
  ids.resize(std::min<std::size_t>(ids.size(), static_cast<std::size_t>(k)));
  return ids;
}

void write_loss_csv(std::ostream& out, std::span<const LossSample> log, std::string_view comment) {
  if (!comment.empty()) out << "# " << comment << '\n';
  out << "update_index,mean_loss\n";
  for (const LossSample& s : log) {
    out << s.update_index << ',' << format_double(s.mean_loss) << '\n';
  }
}

}  // namespace lae2
