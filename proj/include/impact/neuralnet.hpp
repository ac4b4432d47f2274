#pragma once

// 1D convolution / transposed convolution layers with exact backpropagation,
// the six-layer fully convolutional denoiser, ADAM and the training loop.
//
// Activations are batched as (channels x n * length) row-major matrices:
// example b occupies columns [b * length, (b + 1) * length).

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "impact/sigproc.hpp"

namespace impact::nn {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Cross-correlation layer. weights is out_ch x (in_ch * k), i.e. the
/// row-major [out_ch][in_ch][k] kernel.
struct Conv1dLayer {
  int in_ch = 1;
  int out_ch = 1;
  int k = 1;
  int stride = 1;
  int padding = 0;
  Matrix weights;
  Vector bias;

  Conv1dLayer() = default;
  Conv1dLayer(int in_ch, int out_ch, int k, int stride = 1, int padding = 0);

  /// floor((length_in + 2 padding - k) / stride) + 1; throws if < 1.
  int output_length(int length_in) const;
};

/// Transposed convolution, the adjoint of Conv1dLayer. weights is
/// in_ch x (out_ch * k), i.e. the row-major [in_ch][out_ch][k] kernel, so a
/// TConv1dLayer(b, a, ...) sharing weights with a Conv1dLayer(a, b, ...) is
/// its exact adjoint.
struct TConv1dLayer {
  int in_ch = 1;
  int out_ch = 1;
  int k = 1;
  int stride = 1;
  int padding = 0;
  int output_padding = 0;
  Matrix weights;
  Vector bias;

  TConv1dLayer() = default;
  TConv1dLayer(int in_ch, int out_ch, int k, int stride = 1, int padding = 0,
               int output_padding = 0);

  /// (length_in - 1) * stride - 2 padding + k + output_padding; throws if < 1.
  int output_length(int length_in) const;
};

template <class Layer>
struct LayerGrads {
  Matrix input;
  Matrix weights;
  Vector bias;
};

Matrix conv1d_forward(const Conv1dLayer& layer, const Matrix& input, int length_in);
LayerGrads<Conv1dLayer> conv1d_backward(const Conv1dLayer& layer, const Matrix& input,
                                        int length_in, const Matrix& grad_out);

Matrix tconv1d_forward(const TConv1dLayer& layer, const Matrix& input, int length_in);
LayerGrads<TConv1dLayer> tconv1d_backward(const TConv1dLayer& layer, const Matrix& input,
                                          int length_in, const Matrix& grad_out);

using ChannelPlan = std::array<int, 3>;

/// Three stride-2 convolutions followed by three stride-2 transposed
/// convolutions with mirrored channels. ReLU after every layer but the last.
struct DenoiserNetwork {
  int window = 100;
  int kernel_size = 10;
  ChannelPlan channel_plan{16, 32, 64};
  std::array<Conv1dLayer, 3> encoder;
  std::array<TConv1dLayer, 3> decoder;
};

/// Builds a zero-initialized network. Padding is (k - 1) / 2 and the decoder
/// output paddings are chosen so every decoder stage restores the length of
/// the matching encoder input (100 -> 50 -> 25 -> 12 -> 25 -> 50 -> 100 for
/// k = 10).
DenoiserNetwork make_network(const ChannelPlan& plan, int kernel_size, int window = 100,
                             int stride = 2);

/// Kernels uniform in +-sqrt(1 / (in_ch * k)) per layer, biases zero.
void initialize(DenoiserNetwork& net, std::uint64_t seed);

/// Input is 1 x (n * window); returns 1 x (n * window).
Matrix network_forward(const DenoiserNetwork& net, const Matrix& input);
Series network_forward(const DenoiserNetwork& net, const Series& window);

struct ForwardCache {
  std::array<Matrix, 6> layer_inputs;  ///< post-activation input of each layer
  std::array<int, 6> lengths{};        ///< per-example length of each layer input
  Matrix output;
};

ForwardCache forward_cached(const DenoiserNetwork& net, const Matrix& input);

struct NetworkGrads {
  std::array<LayerGrads<Conv1dLayer>, 3> encoder;
  std::array<LayerGrads<TConv1dLayer>, 3> decoder;
};

NetworkGrads network_backward(const DenoiserNetwork& net, const ForwardCache& cache,
                              const Matrix& grad_output);

/// Sum of squared kernel weights (biases excluded).
double kernel_sum_squares(const DenoiserNetwork& net);

/// Mean squared error over every sample plus l2 * sum of squared kernel weights.
double loss(const Matrix& pred, const Matrix& target, const DenoiserNetwork& net, double l2);

/// Flat parameter layout: per layer (encoder then decoder) weights, then bias.
std::size_t parameter_count(const DenoiserNetwork& net);
std::vector<double> get_parameters(const DenoiserNetwork& net);
void set_parameters(DenoiserNetwork& net, std::span<const double> flat);
std::vector<double> flatten_gradients(const NetworkGrads& grads);

struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  long step = 0;
  std::vector<double> m;
  std::vector<double> v;

  explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}
};

/// One bias-corrected ADAM update in place.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               double lr);

enum class Strategy { Direct, NoiseResidual };

std::string_view strategy_name(Strategy s);
Strategy strategy_from_name(std::string_view name);

struct TrainingConfig {
  Strategy strategy = Strategy::Direct;
  double lr0 = 0.005;
  int epochs = 500;
  double l2 = 0.001;
  int kernel_size = 10;
  ChannelPlan channel_plan{16, 32, 64};
  int batch_size = 32;
  double lr_decay = 0.9;
  int lr_decay_every = 50;
  int early_stop_patience = 50;
  std::uint64_t seed = 0;

  void validate() const;
  /// lr0 * lr_decay ^ floor(epoch / lr_decay_every) for a 0-based epoch.
  double learning_rate(int epoch) const;
};

struct EpochRecord {
  int epoch = 0;          ///< 1-based
  double learning_rate = 0;
  double train_loss = 0;  ///< example-weighted mean of the pre-update minibatch losses
  double val_rmse = 0;    ///< mean over validation windows of the per-window RMSE
};

struct TrainResult {
  DenoiserNetwork network;  ///< weights from the best validation epoch
  std::vector<EpochRecord> history;
  int best_epoch = 0;
  double best_val_rmse = 0;
  bool stopped_early = false;
};

/// Mean over windows of the per-window RMSE between net(input) and target.
double validation_rmse(const DenoiserNetwork& net, const std::vector<sigproc::WindowedExample>& examples);

/// Minibatch ADAM with step decay and early stopping on validation RMSE.
/// Stops once early_stop_patience consecutive epochs fail to improve on the
/// best validation RMSE (patience 0 stops at the first such epoch).
TrainResult train(const std::vector<sigproc::WindowedExample>& train_set,
                  const std::vector<sigproc::WindowedExample>& val_set, const TrainingConfig& cfg);

}  // namespace impact::nn
