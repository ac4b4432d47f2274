#include "impact/neuralnet.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "impact/rng.hpp"

namespace impact::nn {

namespace {

// col(c * k + j, b * l_out + t) = in(c, b * l_in + t * stride + j - padding)
Matrix im2col(const Matrix& in, int channels, int examples, int l_in, int k, int stride,
              int padding, int l_out) {
  Matrix col = Matrix::Zero(static_cast<Eigen::Index>(channels) * k,
                            static_cast<Eigen::Index>(examples) * l_out);
  for (int c = 0; c < channels; ++c) {
    const double* src_row = in.row(c).data();
    for (int j = 0; j < k; ++j) {
      double* dst_row = col.row(c * k + j).data();
      // valid t: 0 <= t * stride + j - padding < l_in
      const int t_lo = std::max(0, (padding - j + stride - 1) / stride);
      const int reach = l_in - 1 - j + padding;
      const int t_hi = reach < 0 ? 0 : std::min(l_out, reach / stride + 1);
      for (int b = 0; b < examples; ++b) {
        const double* src = src_row + static_cast<std::ptrdiff_t>(b) * l_in + j - padding;
        double* dst = dst_row + static_cast<std::ptrdiff_t>(b) * l_out;
        for (int t = t_lo; t < t_hi; ++t) dst[t] = src[t * stride];
      }
    }
  }
  return col;
}

// Adjoint of im2col: scatter-adds columns back onto (channels x examples * l_in).
Matrix col2im(const Matrix& col, int channels, int examples, int l_in, int k, int stride,
              int padding, int l_out) {
  Matrix out = Matrix::Zero(channels, static_cast<Eigen::Index>(examples) * l_in);
  for (int c = 0; c < channels; ++c) {
    double* dst_row = out.row(c).data();
    for (int j = 0; j < k; ++j) {
      const double* src_row = col.row(c * k + j).data();
      const int t_lo = std::max(0, (padding - j + stride - 1) / stride);
      const int reach = l_in - 1 - j + padding;
      const int t_hi = reach < 0 ? 0 : std::min(l_out, reach / stride + 1);
      for (int b = 0; b < examples; ++b) {
        double* dst = dst_row + static_cast<std::ptrdiff_t>(b) * l_in + j - padding;
        const double* src = src_row + static_cast<std::ptrdiff_t>(b) * l_out;
        for (int t = t_lo; t < t_hi; ++t) dst[t * stride] += src[t];
      }
    }
  }
  return out;
}

int examples_in(const Matrix& m, int channels, int length, const char* what) {
  if (m.rows() != channels || length <= 0 || m.cols() % length != 0) {
    throw std::invalid_argument(fmt::format("{}: expected {} x (n * {}), got {} x {}", what,
                                            channels, length, m.rows(), m.cols()));
  }
  return static_cast<int>(m.cols() / length);
}

void check_geometry(int in_ch, int out_ch, int k, int stride, int padding) {
  if (in_ch < 1 || out_ch < 1 || k < 1 || stride < 1 || padding < 0) {
    throw std::invalid_argument(fmt::format(
        "invalid layer geometry in={} out={} k={} stride={} padding={}", in_ch, out_ch, k, stride,
        padding));
  }
}

}  // namespace

Conv1dLayer::Conv1dLayer(int in, int out, int kernel, int s, int pad)
    : in_ch(in), out_ch(out), k(kernel), stride(s), padding(pad) {
  check_geometry(in_ch, out_ch, k, stride, padding);
  weights = Matrix::Zero(out_ch, static_cast<Eigen::Index>(in_ch) * k);
  bias = Vector::Zero(out_ch);
}

int Conv1dLayer::output_length(int length_in) const {
  const int span = length_in + 2 * padding - k;
  if (length_in < 1 || span < 0) {
    throw std::invalid_argument(
        fmt::format("conv input length {} too short for k={} padding={}", length_in, k, padding));
  }
  return span / stride + 1;
}

TConv1dLayer::TConv1dLayer(int in, int out, int kernel, int s, int pad, int out_pad)
    : in_ch(in), out_ch(out), k(kernel), stride(s), padding(pad), output_padding(out_pad) {
  check_geometry(in_ch, out_ch, k, stride, padding);
  if (output_padding < 0 || output_padding >= stride) {
    throw std::invalid_argument("output_padding must lie in [0, stride)");
  }
  weights = Matrix::Zero(in_ch, static_cast<Eigen::Index>(out_ch) * k);
  bias = Vector::Zero(out_ch);
}

int TConv1dLayer::output_length(int length_in) const {
  const int len = (length_in - 1) * stride - 2 * padding + k + output_padding;
  if (length_in < 1 || len < 1) {
    throw std::invalid_argument(fmt::format("tconv input length {} gives empty output", length_in));
  }
  return len;
}

Matrix conv1d_forward(const Conv1dLayer& layer, const Matrix& input, int length_in) {
  const int n = examples_in(input, layer.in_ch, length_in, "conv1d_forward");
  const int l_out = layer.output_length(length_in);
  const Matrix col =
      im2col(input, layer.in_ch, n, length_in, layer.k, layer.stride, layer.padding, l_out);
  Matrix out = layer.weights * col;
  out.colwise() += layer.bias;
  return out;
}

LayerGrads<Conv1dLayer> conv1d_backward(const Conv1dLayer& layer, const Matrix& input,
                                        int length_in, const Matrix& grad_out) {
  const int n = examples_in(input, layer.in_ch, length_in, "conv1d_backward");
  const int l_out = layer.output_length(length_in);
  examples_in(grad_out, layer.out_ch, l_out, "conv1d_backward grad");
  if (grad_out.cols() != static_cast<Eigen::Index>(n) * l_out) {
    throw std::invalid_argument("conv1d_backward: batch size mismatch");
  }
  const Matrix col =
      im2col(input, layer.in_ch, n, length_in, layer.k, layer.stride, layer.padding, l_out);
  LayerGrads<Conv1dLayer> g;
  g.weights.noalias() = grad_out * col.transpose();
  g.bias = grad_out.rowwise().sum();
  const Matrix dcol = layer.weights.transpose() * grad_out;
  g.input = col2im(dcol, layer.in_ch, n, length_in, layer.k, layer.stride, layer.padding, l_out);
  return g;
}

// The transposed layer maps length_in -> l_out; viewed from its output side it
// is a convolution l_out -> length_in with the same stride and padding.
Matrix tconv1d_forward(const TConv1dLayer& layer, const Matrix& input, int length_in) {
  const int n = examples_in(input, layer.in_ch, length_in, "tconv1d_forward");
  const int l_out = layer.output_length(length_in);
  const Matrix dcol = layer.weights.transpose() * input;
  Matrix out = col2im(dcol, layer.out_ch, n, l_out, layer.k, layer.stride, layer.padding, length_in);
  out.colwise() += layer.bias;
  return out;
}

LayerGrads<TConv1dLayer> tconv1d_backward(const TConv1dLayer& layer, const Matrix& input,
                                          int length_in, const Matrix& grad_out) {
  const int n = examples_in(input, layer.in_ch, length_in, "tconv1d_backward");
  const int l_out = layer.output_length(length_in);
  examples_in(grad_out, layer.out_ch, l_out, "tconv1d_backward grad");
  if (grad_out.cols() != static_cast<Eigen::Index>(n) * l_out) {
    throw std::invalid_argument("tconv1d_backward: batch size mismatch");
  }
  const Matrix col =
      im2col(grad_out, layer.out_ch, n, l_out, layer.k, layer.stride, layer.padding, length_in);
  LayerGrads<TConv1dLayer> g;
  g.input.noalias() = layer.weights * col;
  g.weights.noalias() = input * col.transpose();
  g.bias = grad_out.rowwise().sum();
  return g;
}

DenoiserNetwork make_network(const ChannelPlan& plan, int kernel_size, int window, int stride) {
  for (int c : plan) {
    if (c < 1) throw std::invalid_argument("channel counts must be positive");
  }
  if (kernel_size < 1) throw std::invalid_argument("kernel size must be positive");
  DenoiserNetwork net;
  net.window = window;
  net.kernel_size = kernel_size;
  net.channel_plan = plan;
  const int padding = (kernel_size - 1) / 2;

  std::array<int, 4> lengths{window, 0, 0, 0};
  int in_ch = 1;
  for (std::size_t i = 0; i < 3; ++i) {
    net.encoder[i] = Conv1dLayer(in_ch, plan[i], kernel_size, stride, padding);
    lengths[i + 1] = net.encoder[i].output_length(lengths[i]);
    in_ch = plan[i];
  }
  for (std::size_t i = 0; i < 3; ++i) {
    const std::size_t mirror = 2 - i;  // decoder stage i restores lengths[mirror]
    const int out_ch = mirror == 0 ? 1 : plan[mirror - 1];
    const int bare = (lengths[mirror + 1] - 1) * stride - 2 * padding + kernel_size;
    const int out_pad = lengths[mirror] - bare;
    if (out_pad < 0 || out_pad >= stride) {
      throw std::invalid_argument(fmt::format(
          "window {} with k={} cannot be restored by the decoder", window, kernel_size));
    }
    net.decoder[i] = TConv1dLayer(plan[mirror], out_ch, kernel_size, stride, padding, out_pad);
  }
  return net;
}

void initialize(DenoiserNetwork& net, std::uint64_t seed) {
  Rng rng(splitmix64(seed));
  const auto fill = [&rng](Matrix& w, Vector& b, int fan_in) {
    const double bound = std::sqrt(1.0 / fan_in);
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = rng.uniform(-bound, bound);
    b.setZero();
  };
  for (auto& l : net.encoder) fill(l.weights, l.bias, l.in_ch * l.k);
  for (auto& l : net.decoder) fill(l.weights, l.bias, l.in_ch * l.k);
}

ForwardCache forward_cached(const DenoiserNetwork& net, const Matrix& input) {
  examples_in(input, 1, net.window, "network_forward");
  ForwardCache cache;
  Matrix x = input;
  int len = net.window;
  for (std::size_t i = 0; i < 6; ++i) {
    cache.lengths[i] = len;
    Matrix y;
    if (i < 3) {
      y = conv1d_forward(net.encoder[i], x, len);
      len = net.encoder[i].output_length(len);
    } else {
      y = tconv1d_forward(net.decoder[i - 3], x, len);
      len = net.decoder[i - 3].output_length(len);
    }
    cache.layer_inputs[i] = std::move(x);
    if (i < 5) y = y.cwiseMax(0.0);
    x = std::move(y);
  }
  cache.output = std::move(x);
  return cache;
}

Matrix network_forward(const DenoiserNetwork& net, const Matrix& input) {
  return forward_cached(net, input).output;
}

Series network_forward(const DenoiserNetwork& net, const Series& window) {
  if (window.size() != static_cast<std::size_t>(net.window)) {
    throw std::invalid_argument(
        fmt::format("network expects {} samples, got {}", net.window, window.size()));
  }
  const Matrix in = Eigen::Map<const Matrix>(window.data(), 1, net.window);
  const Matrix out = network_forward(net, in);
  return Series(out.data(), out.data() + out.size());
}

NetworkGrads network_backward(const DenoiserNetwork& net, const ForwardCache& cache,
                              const Matrix& grad_output) {
  NetworkGrads grads;
  Matrix g = grad_output;
  for (int i = 5; i >= 0; --i) {
    const auto idx = static_cast<std::size_t>(i);
    if (i < 5) {
      // ReLU: this layer's output is the next layer's (post-activation) input.
      const Matrix& act = cache.layer_inputs[idx + 1];
      g = (act.array() > 0.0).select(g, 0.0);
    }
    if (i >= 3) {
      auto lg = tconv1d_backward(net.decoder[idx - 3], cache.layer_inputs[idx], cache.lengths[idx], g);
      g = std::move(lg.input);
      lg.input.resize(0, 0);
      grads.decoder[idx - 3] = std::move(lg);
    } else {
      auto lg = conv1d_backward(net.encoder[idx], cache.layer_inputs[idx], cache.lengths[idx], g);
      g = std::move(lg.input);
      lg.input.resize(0, 0);
      grads.encoder[idx] = std::move(lg);
    }
  }
  return grads;
}

double kernel_sum_squares(const DenoiserNetwork& net) {
  double s = 0;
  for (const auto& l : net.encoder) s += l.weights.squaredNorm();
  for (const auto& l : net.decoder) s += l.weights.squaredNorm();
  return s;
}

double loss(const Matrix& pred, const Matrix& target, const DenoiserNetwork& net, double l2) {
  if (pred.rows() != target.rows() || pred.cols() != target.cols()) {
    throw std::invalid_argument("loss: prediction and target shapes differ");
  }
  const double mse = (pred - target).squaredNorm() / static_cast<double>(pred.size());
  return l2 == 0.0 ? mse : mse + l2 * kernel_sum_squares(net);
}

std::size_t parameter_count(const DenoiserNetwork& net) {
  std::size_t n = 0;
  for (const auto& l : net.encoder) n += static_cast<std::size_t>(l.weights.size() + l.bias.size());
  for (const auto& l : net.decoder) n += static_cast<std::size_t>(l.weights.size() + l.bias.size());
  return n;
}

namespace {

template <class Fn>
void for_each_block(DenoiserNetwork& net, Fn&& fn) {
  for (auto& l : net.encoder) {
    fn(l.weights.data(), l.weights.size());
    fn(l.bias.data(), l.bias.size());
  }
  for (auto& l : net.decoder) {
    fn(l.weights.data(), l.weights.size());
    fn(l.bias.data(), l.bias.size());
  }
}

}  // namespace

std::vector<double> get_parameters(const DenoiserNetwork& net) {
  std::vector<double> flat;
  flat.reserve(parameter_count(net));
  for_each_block(const_cast<DenoiserNetwork&>(net), [&flat](double* p, Eigen::Index n) {
    flat.insert(flat.end(), p, p + n);
  });
  return flat;
}

void set_parameters(DenoiserNetwork& net, std::span<const double> flat) {
  if (flat.size() != parameter_count(net)) {
    throw std::invalid_argument("set_parameters: size mismatch");
  }
  std::size_t off = 0;
  for_each_block(net, [&](double* p, Eigen::Index n) {
    std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(off), n, p);
    off += static_cast<std::size_t>(n);
  });
}

std::vector<double> flatten_gradients(const NetworkGrads& grads) {
  std::vector<double> flat;
  const auto append = [&flat](const auto& m) { flat.insert(flat.end(), m.data(), m.data() + m.size()); };
  for (const auto& g : grads.encoder) {
    append(g.weights);
    append(g.bias);
  }
  for (const auto& g : grads.decoder) {
    append(g.weights);
    append(g.bias);
  }
  return flat;
}

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& st, double lr) {
  if (params.size() != grads.size() || params.size() != st.m.size() || st.v.size() != st.m.size()) {
    throw std::invalid_argument("adam_step: parameter, gradient and state sizes differ");
  }
  ++st.step;
  const double c1 = 1.0 - std::pow(st.beta1, static_cast<double>(st.step));
  const double c2 = 1.0 - std::pow(st.beta2, static_cast<double>(st.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    st.m[i] = st.beta1 * st.m[i] + (1.0 - st.beta1) * g;
    st.v[i] = st.beta2 * st.v[i] + (1.0 - st.beta2) * g * g;
    const double m_hat = st.m[i] / c1;
    const double v_hat = st.v[i] / c2;
    params[i] -= lr * m_hat / (std::sqrt(v_hat) + st.epsilon);
  }
}

std::string_view strategy_name(Strategy s) {
  return s == Strategy::Direct ? "direct" : "noise_residual";
}

Strategy strategy_from_name(std::string_view name) {
  if (name == "direct") return Strategy::Direct;
  if (name == "noise_residual") return Strategy::NoiseResidual;
  throw std::invalid_argument("unknown strategy: " + std::string(name));
}

void TrainingConfig::validate() const {
  if (!(lr0 > 0.0)) throw std::invalid_argument("lr0 must be positive");
  if (epochs < 1) throw std::invalid_argument("epochs must be at least 1");
  if (!(l2 >= 0.0)) throw std::invalid_argument("l2 must be non-negative");
  if (kernel_size < 1) throw std::invalid_argument("kernel_size must be positive");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be positive");
  if (!(lr_decay > 0.0) || lr_decay_every < 1) throw std::invalid_argument("invalid lr decay");
  if (early_stop_patience < 0) throw std::invalid_argument("patience must be non-negative");
  for (int c : channel_plan) {
    if (c < 1) throw std::invalid_argument("channel counts must be positive");
  }
}

double TrainingConfig::learning_rate(int epoch) const {
  return lr0 * std::pow(lr_decay, static_cast<double>(epoch / lr_decay_every));
}

namespace {

struct PackedExamples {
  Matrix input;
  Matrix target;
  int count = 0;
};

PackedExamples pack(const std::vector<sigproc::WindowedExample>& examples, int window) {
  PackedExamples p;
  p.count = static_cast<int>(examples.size());
  p.input.resize(1, static_cast<Eigen::Index>(p.count) * window);
  p.target.resize(1, static_cast<Eigen::Index>(p.count) * window);
  for (int i = 0; i < p.count; ++i) {
    const auto& e = examples[static_cast<std::size_t>(i)];
    if (e.input.size() != static_cast<std::size_t>(window) ||
        e.target.size() != static_cast<std::size_t>(window)) {
      throw std::invalid_argument(fmt::format("training example {} is not {} samples", i, window));
    }
    std::copy(e.input.begin(), e.input.end(), p.input.data() + static_cast<std::ptrdiff_t>(i) * window);
    std::copy(e.target.begin(), e.target.end(), p.target.data() + static_cast<std::ptrdiff_t>(i) * window);
  }
  return p;
}

double mean_window_rmse(const Matrix& pred, const Matrix& target, int window) {
  const auto n = pred.cols() / window;
  double sum = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto d = pred.middleCols(i * window, window) - target.middleCols(i * window, window);
    sum += std::sqrt(d.squaredNorm() / window);
  }
  return sum / static_cast<double>(n);
}

}  // namespace

double validation_rmse(const DenoiserNetwork& net,
                       const std::vector<sigproc::WindowedExample>& examples) {
  if (examples.empty()) throw std::invalid_argument("validation_rmse: no examples");
  const PackedExamples p = pack(examples, net.window);
  return mean_window_rmse(network_forward(net, p.input), p.target, net.window);
}

TrainResult train(const std::vector<sigproc::WindowedExample>& train_set,
                  const std::vector<sigproc::WindowedExample>& val_set, const TrainingConfig& cfg) {
  cfg.validate();
  if (train_set.empty()) throw std::invalid_argument("train: empty training set");
  if (val_set.empty()) throw std::invalid_argument("train: empty validation set");

  DenoiserNetwork net = make_network(cfg.channel_plan, cfg.kernel_size, static_cast<int>(sigproc::kWindow));
  initialize(net, cfg.seed);
  const int window = net.window;
  const PackedExamples tr = pack(train_set, window);
  const PackedExamples va = pack(val_set, window);

  std::vector<double> params = get_parameters(net);
  AdamState adam(params.size());
  Rng shuffle_rng(splitmix64(cfg.seed ^ 0x53485546464C45ULL));
  std::vector<int> order(static_cast<std::size_t>(tr.count));
  std::iota(order.begin(), order.end(), 0);

  TrainResult result;
  result.best_val_rmse = std::numeric_limits<double>::infinity();
  int since_best = 0;
  Matrix batch_in, batch_target;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr = cfg.learning_rate(epoch);
    shuffle_rng.shuffle(std::span<int>(order));
    double loss_sum = 0;

    for (int start = 0; start < tr.count; start += cfg.batch_size) {
      const int n = std::min(cfg.batch_size, tr.count - start);
      batch_in.resize(1, static_cast<Eigen::Index>(n) * window);
      batch_target.resize(1, static_cast<Eigen::Index>(n) * window);
      for (int b = 0; b < n; ++b) {
        const auto src = static_cast<Eigen::Index>(order[static_cast<std::size_t>(start + b)]) * window;
        batch_in.middleCols(static_cast<Eigen::Index>(b) * window, window) = tr.input.middleCols(src, window);
        batch_target.middleCols(static_cast<Eigen::Index>(b) * window, window) =
            tr.target.middleCols(src, window);
      }

      const ForwardCache cache = forward_cached(net, batch_in);
      const double batch_loss = loss(cache.output, batch_target, net, cfg.l2);
      if (!std::isfinite(batch_loss)) {
        throw std::runtime_error(fmt::format(
            "non-finite training loss at epoch {} (batch starting at example {}, lr {})", epoch + 1,
            start, lr));
      }
      loss_sum += batch_loss * n;

      const Matrix grad_out =
          (cache.output - batch_target) * (2.0 / static_cast<double>(batch_in.size()));
      NetworkGrads grads = network_backward(net, cache, grad_out);
      if (cfg.l2 > 0.0) {
        for (std::size_t i = 0; i < 3; ++i) {
          grads.encoder[i].weights += (2.0 * cfg.l2) * net.encoder[i].weights;
          grads.decoder[i].weights += (2.0 * cfg.l2) * net.decoder[i].weights;
        }
      }
      const std::vector<double> flat_grads = flatten_gradients(grads);
      adam_step(params, flat_grads, adam, lr);
      set_parameters(net, params);
    }

    EpochRecord rec;
    rec.epoch = epoch + 1;
    rec.learning_rate = lr;
    rec.train_loss = loss_sum / tr.count;
    rec.val_rmse = mean_window_rmse(network_forward(net, va.input), va.target, window);
    if (!std::isfinite(rec.val_rmse)) {
      throw std::runtime_error(fmt::format("non-finite validation RMSE at epoch {}", epoch + 1));
    }
    result.history.push_back(rec);

    if (rec.val_rmse < result.best_val_rmse) {
      result.best_val_rmse = rec.val_rmse;
      result.best_epoch = rec.epoch;
      result.network = net;
      since_best = 0;
    } else if (++since_best >= cfg.early_stop_patience) {
      result.stopped_early = true;
      break;
    }
  }
  return result;
}

}  // namespace impact::nn
