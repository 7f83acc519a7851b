#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "lae2/trace.hpp"

namespace lae2 {

// Multi-layer LSTM next-request model built on the kernels module. The input
// is a window of vocabulary-mapped content ids; the output is a softmax
// distribution over the full catalog.
//
// All parameters live in one contiguous vector so gradients can be checked
// element-by-element against finite differences. Layout:
//   [ embedding (vocab x H) |
//     per layer: W (4H x 2H, gate rows packed i,f,g,o over [x; h_prev]), b (4H) |
//     W_out (catalog x H) | b_out (catalog) ]
class LstmModel {
 public:
  struct Config {
    std::int32_t layers = 1;
    std::int32_t hidden = 32;
    std::int32_t vocab = 0;    // input embedding rows
    std::int32_t catalog = 0;  // output logits
    std::int32_t input_window = 8;
    std::uint64_t seed = 1;
    bool parallel = false;  // OpenMP kernels
  };

  // Reusable per-call buffers; owning one per training loop avoids reallocating
  // activations for every window.
  struct Workspace {
    std::vector<double> z, gates, c, tanh_c, h;
    std::vector<double> probs, dlogits;
    std::vector<double> dh_ext, da, dz, dh_carry, dc_carry, dc;
  };

  explicit LstmModel(const Config& cfg);

  const Config& config() const { return cfg_; }
  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }
  std::size_t param_count() const { return params_.size(); }

  // Softmax popularity over the catalog after consuming the window left to
  // right. Window entries must be vocabulary-mapped ids in [0, vocab).
  std::vector<double> forward(std::span<const std::int32_t> window) const;

  // Cross-entropy of the next-request target; forward pass only.
  double loss(std::span<const std::int32_t> window, ContentId target, Workspace& ws) const;

  // Adds this sample's parameter gradients into `grad` (same layout/length as
  // params()) and returns the sample loss.
  double loss_and_grad(std::span<const std::int32_t> window, ContentId target,
                       std::span<double> grad, Workspace& ws) const;

  // params -= lr * grad
  void apply_update(std::span<const double> grad, double lr);

  // Flat binary checkpoint: magic, dims, then row-major parameters.
  void save(const std::filesystem::path& path) const;
  static LstmModel load(const std::filesystem::path& path);

 private:
  struct Offsets {
    std::size_t embedding = 0;
    std::vector<std::size_t> layer_w, layer_b;
    std::size_t w_out = 0, b_out = 0, total = 0;
  };

  void forward_window(std::span<const std::int32_t> window, Workspace& ws) const;

  Config cfg_;
  Offsets off_;
  std::vector<double> params_;
};

}  // namespace lae2
