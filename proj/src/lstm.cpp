#include "lae2/lstm.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <stdexcept>

#include "lae2/kernels.hpp"

namespace lae2 {

namespace {

constexpr char kMagic[8] = {'L', 'A', 'E', '2', 'L', 'S', 'T', 'M'};
constexpr std::uint32_t kVersion = 1;

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

double uniform_signed(std::mt19937_64& rng, double scale) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0,1)
  return (2.0 * u - 1.0) * scale;
}

}  // namespace

LstmModel::LstmModel(const Config& cfg) : cfg_(cfg) {
  if (cfg.layers < 1 || cfg.hidden < 1 || cfg.vocab < 1 || cfg.catalog < 1 || cfg.input_window < 1) {
    throw std::invalid_argument("lstm: all dimensions must be positive");
  }
  const std::size_t h = static_cast<std::size_t>(cfg.hidden);
  off_.embedding = 0;
  std::size_t at = static_cast<std::size_t>(cfg.vocab) * h;
  off_.layer_w.resize(static_cast<std::size_t>(cfg.layers));
  off_.layer_b.resize(static_cast<std::size_t>(cfg.layers));
  for (std::int32_t l = 0; l < cfg.layers; ++l) {
    off_.layer_w[l] = at;
    at += 4 * h * 2 * h;
    off_.layer_b[l] = at;
    at += 4 * h;
  }
  off_.w_out = at;
  at += static_cast<std::size_t>(cfg.catalog) * h;
  off_.b_out = at;
  at += static_cast<std::size_t>(cfg.catalog);
  off_.total = at;

  params_.assign(off_.total, 0.0);
  std::mt19937_64 rng(cfg.seed);
  const double scale = 0.08;
  for (std::size_t i = 0; i < off_.layer_w[0]; ++i) params_[i] = uniform_signed(rng, scale);
  for (std::int32_t l = 0; l < cfg.layers; ++l) {
    for (std::size_t i = off_.layer_w[l]; i < off_.layer_b[l]; ++i) params_[i] = uniform_signed(rng, scale);
    // biases start at zero except the forget gate, which opens the memory path
    double* b = params_.data() + off_.layer_b[l];
    for (std::size_t i = h; i < 2 * h; ++i) b[i] = 1.0;
  }
  for (std::size_t i = off_.w_out; i < off_.b_out; ++i) params_[i] = uniform_signed(rng, scale);
}

void LstmModel::forward_window(std::span<const std::int32_t> window, Workspace& ws) const {
  const auto steps = static_cast<std::int32_t>(window.size());
  if (steps != cfg_.input_window) throw std::invalid_argument("lstm: window length mismatch");
  const std::size_t h = static_cast<std::size_t>(cfg_.hidden);
  const std::size_t layers = static_cast<std::size_t>(cfg_.layers);
  const std::size_t w = static_cast<std::size_t>(steps);

  ws.z.assign(layers * w * 2 * h, 0.0);
  ws.gates.assign(layers * w * 4 * h, 0.0);
  ws.c.assign(layers * w * h, 0.0);
  ws.tanh_c.assign(layers * w * h, 0.0);
  ws.h.assign(layers * w * h, 0.0);

  for (std::size_t s = 0; s < w; ++s) {
    const std::int32_t id = window[s];
    if (id < 0 || id >= cfg_.vocab) throw std::invalid_argument("lstm: id outside vocabulary");
    const double* x = params_.data() + off_.embedding + static_cast<std::size_t>(id) * h;
    for (std::size_t l = 0; l < layers; ++l) {
      double* z = ws.z.data() + (l * w + s) * 2 * h;
      const double* h_prev = s > 0 ? ws.h.data() + (l * w + s - 1) * h : nullptr;
      std::memcpy(z, x, h * sizeof(double));
      if (h_prev) {
        std::memcpy(z + h, h_prev, h * sizeof(double));
      } else {
        std::memset(z + h, 0, h * sizeof(double));
      }

      double* gates = ws.gates.data() + (l * w + s) * 4 * h;
      kernels::matvec(params_.data() + off_.layer_w[l], z, params_.data() + off_.layer_b[l], gates,
                      4 * cfg_.hidden, 2 * cfg_.hidden, cfg_.parallel);
      double* c = ws.c.data() + (l * w + s) * h;
      double* tc = ws.tanh_c.data() + (l * w + s) * h;
      double* hv = ws.h.data() + (l * w + s) * h;
      const double* c_prev = s > 0 ? ws.c.data() + (l * w + s - 1) * h : nullptr;
      for (std::size_t j = 0; j < h; ++j) {
        const double gi = sigmoid(gates[j]);
        const double gf = sigmoid(gates[h + j]);
        const double gg = std::tanh(gates[2 * h + j]);
        const double go = sigmoid(gates[3 * h + j]);
        gates[j] = gi;
        gates[h + j] = gf;
        gates[2 * h + j] = gg;
        gates[3 * h + j] = go;
        c[j] = gf * (c_prev ? c_prev[j] : 0.0) + gi * gg;
        tc[j] = std::tanh(c[j]);
        hv[j] = go * tc[j];
      }
      x = hv;  // input of the next layer up
    }
  }

  // output projection from the top layer's last hidden state
  const double* h_top = ws.h.data() + ((layers - 1) * w + (w - 1)) * h;
  ws.probs.assign(static_cast<std::size_t>(cfg_.catalog), 0.0);
  kernels::matvec(params_.data() + off_.w_out, h_top, params_.data() + off_.b_out, ws.probs.data(),
                  cfg_.catalog, cfg_.hidden, cfg_.parallel);
  kernels::softmax_inplace(ws.probs.data(), cfg_.catalog);
}

std::vector<double> LstmModel::forward(std::span<const std::int32_t> window) const {
  Workspace ws;
  forward_window(window, ws);
  return ws.probs;
}

double LstmModel::loss(std::span<const std::int32_t> window, ContentId target, Workspace& ws) const {
  if (target < 0 || target >= cfg_.catalog) throw std::invalid_argument("lstm: target outside catalog");
  forward_window(window, ws);
  const double p = std::max(ws.probs[static_cast<std::size_t>(target)], 1e-300);
  return -std::log(p);
}

double LstmModel::loss_and_grad(std::span<const std::int32_t> window, ContentId target,
                                std::span<double> grad, Workspace& ws) const {
  if (grad.size() != params_.size()) throw std::invalid_argument("lstm: gradient buffer size mismatch");
  const double loss_value = loss(window, target, ws);

  const std::size_t h = static_cast<std::size_t>(cfg_.hidden);
  const std::size_t layers = static_cast<std::size_t>(cfg_.layers);
  const std::size_t w = static_cast<std::size_t>(cfg_.input_window);

  ws.dlogits = ws.probs;
  ws.dlogits[static_cast<std::size_t>(target)] -= 1.0;

  // dh_ext[l][s]: gradient arriving at layer l's hidden state from above
  // (the layer above's input path, or the output head for the top layer).
  ws.dh_ext.assign(layers * w * h, 0.0);
  const double* h_top = ws.h.data() + ((layers - 1) * w + (w - 1)) * h;
  kernels::outer_acc(grad.data() + off_.w_out, ws.dlogits.data(), h_top, cfg_.catalog, cfg_.hidden,
                     cfg_.parallel);
  for (std::size_t i = 0; i < static_cast<std::size_t>(cfg_.catalog); ++i) {
    grad[off_.b_out + i] += ws.dlogits[i];
  }
  kernels::matvec_transpose_acc(params_.data() + off_.w_out, ws.dlogits.data(),
                                ws.dh_ext.data() + ((layers - 1) * w + (w - 1)) * h, cfg_.catalog,
                                cfg_.hidden, cfg_.parallel);

  ws.da.assign(4 * h, 0.0);
  ws.dz.assign(2 * h, 0.0);
  ws.dh_carry.assign(h, 0.0);
  ws.dc_carry.assign(h, 0.0);
  ws.dc.assign(h, 0.0);

  for (std::size_t li = layers; li-- > 0;) {
    std::fill(ws.dh_carry.begin(), ws.dh_carry.end(), 0.0);
    std::fill(ws.dc_carry.begin(), ws.dc_carry.end(), 0.0);
    for (std::size_t s = w; s-- > 0;) {
      const double* gates = ws.gates.data() + (li * w + s) * 4 * h;
      const double* tc = ws.tanh_c.data() + (li * w + s) * h;
      const double* c_prev = s > 0 ? ws.c.data() + (li * w + s - 1) * h : nullptr;
      const double* dh_ext = ws.dh_ext.data() + (li * w + s) * h;

      for (std::size_t j = 0; j < h; ++j) {
        const double gi = gates[j];
        const double gf = gates[h + j];
        const double gg = gates[2 * h + j];
        const double go = gates[3 * h + j];
        const double dh = dh_ext[j] + ws.dh_carry[j];
        const double dout = dh * tc[j];
        const double dcj = ws.dc_carry[j] + dh * go * (1.0 - tc[j] * tc[j]);
        const double din = dcj * gg;
        const double dfor = dcj * (c_prev ? c_prev[j] : 0.0);
        const double dcan = dcj * gi;
        ws.dc_carry[j] = dcj * gf;
        ws.da[j] = din * gi * (1.0 - gi);
        ws.da[h + j] = dfor * gf * (1.0 - gf);
        ws.da[2 * h + j] = dcan * (1.0 - gg * gg);
        ws.da[3 * h + j] = dout * go * (1.0 - go);
      }

      const double* z = ws.z.data() + (li * w + s) * 2 * h;
      kernels::outer_acc(grad.data() + off_.layer_w[li], ws.da.data(), z, 4 * cfg_.hidden,
                         2 * cfg_.hidden, cfg_.parallel);
      for (std::size_t j = 0; j < 4 * h; ++j) grad[off_.layer_b[li] + j] += ws.da[j];

      std::fill(ws.dz.begin(), ws.dz.end(), 0.0);
      kernels::matvec_transpose_acc(params_.data() + off_.layer_w[li], ws.da.data(), ws.dz.data(),
                                    4 * cfg_.hidden, 2 * cfg_.hidden, cfg_.parallel);
      // first half flows to the input below, second half to h_{s-1}
      if (li > 0) {
        double* below = ws.dh_ext.data() + ((li - 1) * w + s) * h;
        for (std::size_t j = 0; j < h; ++j) below[j] += ws.dz[j];
      } else {
        const std::size_t row = static_cast<std::size_t>(window[s]) * h;
        for (std::size_t j = 0; j < h; ++j) grad[off_.embedding + row + j] += ws.dz[j];
      }
      std::memcpy(ws.dh_carry.data(), ws.dz.data() + h, h * sizeof(double));
    }
  }
  return loss_value;
}

void LstmModel::apply_update(std::span<const double> grad, double lr) {
  if (grad.size() != params_.size()) throw std::invalid_argument("lstm: gradient buffer size mismatch");
  for (std::size_t i = 0; i < params_.size(); ++i) params_[i] -= lr * grad[i];
}

void LstmModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open checkpoint for writing: " + path.string());
  out.write(kMagic, sizeof(kMagic));
  auto put_u32 = [&](std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), sizeof(v)); };
  auto put_i32 = [&](std::int32_t v) { out.write(reinterpret_cast<const char*>(&v), sizeof(v)); };
  put_u32(kVersion);
  put_i32(cfg_.layers);
  put_i32(cfg_.hidden);
  put_i32(cfg_.vocab);
  put_i32(cfg_.catalog);
  put_i32(cfg_.input_window);
  out.write(reinterpret_cast<const char*>(&cfg_.seed), sizeof(cfg_.seed));
  out.write(reinterpret_cast<const char*>(params_.data()),
            static_cast<std::streamsize>(params_.size() * sizeof(double)));
  if (!out) throw std::runtime_error("checkpoint write failed: " + path.string());
}

LstmModel LstmModel::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path.string());
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error("bad checkpoint magic: " + path.string());
  }
  std::uint32_t version = 0;
  in.read(reinterpret_cast<char*>(&version), sizeof(version));
  if (version != kVersion) throw std::runtime_error("unsupported checkpoint version");
  Config cfg;
  auto get_i32 = [&](std::int32_t& v) { in.read(reinterpret_cast<char*>(&v), sizeof(v)); };
  get_i32(cfg.layers);
  get_i32(cfg.hidden);
  get_i32(cfg.vocab);
  get_i32(cfg.catalog);
  get_i32(cfg.input_window);
  in.read(reinterpret_cast<char*>(&cfg.seed), sizeof(cfg.seed));
  if (!in) throw std::runtime_error("truncated checkpoint header: " + path.string());
  LstmModel model(cfg);
  in.read(reinterpret_cast<char*>(model.params_.data()),
          static_cast<std::streamsize>(model.params_.size() * sizeof(double)));
  if (!in) throw std::runtime_error("truncated checkpoint parameters: " + path.string());
  return model;
}

}  // namespace lae2
