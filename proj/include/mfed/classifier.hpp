#pragma once

// Eating-gesture CNN: Conv-Pool-Conv-Pool-Flatten-Dense-Dense with a single
// sigmoid output. Input is an N x 3 x 1 accelerometer window.
//
//   conv1 2x2 valid, ReLU     N x 3 x 1   -> (N-1) x 2 x F1
//   maxpool 2x1 stride 2      (N-1) x 2   -> floor((N-1)/2) x 2
//   conv2 2x2 valid, ReLU                 -> (P1-1) x 1 x F2
//   maxpool 2x1 stride 2                  -> floor((P1-1)/2) x 1
//   flatten, dense(D) ReLU, dense(D) ReLU, dense(1) sigmoid

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mfed/signal.hpp"

namespace mfed::cnn {

inline constexpr int kWeightsVersion = 1;

struct Tensor3 {
  int h = 0;
  int w = 0;
  int c = 0;
  std::vector<double> data;  // row-major [h][w][c]

  Tensor3() = default;
  Tensor3(int h_, int w_, int c_) : h(h_), w(w_), c(c_), data(static_cast<std::size_t>(h_) * w_ * c_, 0.0) {}

  double& at(int i, int j, int k) { return data[(static_cast<std::size_t>(i) * w + j) * c + k]; }
  double at(int i, int j, int k) const { return data[(static_cast<std::size_t>(i) * w + j) * c + k]; }
};

/// 2x2 kernels over C channels; kernel element (f, di, dj, ch) lives at
/// ((f * 2 + di) * 2 + dj) * C + ch.
struct ConvLayer {
  int filters = 0;
  int channels = 0;
  std::vector<double> kernels;
  std::vector<double> biases;

  double& k(int f, int di, int dj, int ch) { return kernels[((static_cast<std::size_t>(f) * 2 + di) * 2 + dj) * channels + ch]; }
  double k(int f, int di, int dj, int ch) const {
    return kernels[((static_cast<std::size_t>(f) * 2 + di) * 2 + dj) * channels + ch];
  }
};

/// Row-major (inputs x outputs) matrix plus biases.
struct DenseLayer {
  int inputs = 0;
  int outputs = 0;
  std::vector<double> weights;
  std::vector<double> biases;
};

struct ModelMeta {
  int n = 150;  // window rows
  double rate = 25.0;
  int conv1_filters = 32;
  int conv2_filters = 64;
  int dense_units = 100;
  int version = kWeightsVersion;
};

struct ModelWeights {
  ModelMeta meta;
  ConvLayer conv1;
  ConvLayer conv2;
  DenseLayer dense1;
  DenseLayer dense2;
  DenseLayer out;

  /// Correctly shaped, all zeros.
  static ModelWeights zeros(const ModelMeta& meta);
  /// Uniform in +-sqrt(6 / fan_in), biases zero.
  static ModelWeights random(const ModelMeta& meta, std::uint64_t seed);

  /// Throws ShapeError if any array disagrees with meta.
  void validate_shapes() const;
  bool all_finite() const;

  friend bool operator==(const ModelWeights&, const ModelWeights&);
};

/// Per-layer output shapes for a window of n rows.
struct ShapeTrace {
  int input_h, conv1_h, pool1_h, conv2_h, pool2_h;
  int conv1_w, conv2_w;
  int flatten_dim;
};
ShapeTrace shape_trace(int n, int conv2_filters = 64);
int flatten_dim(int n, int conv2_filters = 64);
/// Smallest n whose second pooling output is non-empty.
inline constexpr int kMinWindowRows = 7;

Tensor3 conv2d_valid(const Tensor3& input, const ConvLayer& layer);
Tensor3 relu(Tensor3 t);
Tensor3 maxpool_time(const Tensor3& t);
Tensor3 window_tensor(const GestureWindow& window);

/// Probability that the window is an eating gesture.
double forward(const ModelWeights& weights, const GestureWindow& window);
double forward(const ModelWeights& weights, const Tensor3& input);

enum class Decision { EatingGesture, NonEating };

/// Inclusive threshold: probability >= threshold is an eating gesture.
Decision decide(double probability, double threshold);
Decision classify(const ModelWeights& weights, const GestureWindow& window, double threshold = 0.5);

/// Nearest-annotation distance d: d <= 2 Positive, 2 < d <= 4 Ambiguous,
/// otherwise Negative. Annotations must be sorted.
GestureLabel label_poi(Seconds poi_t, const std::vector<Seconds>& annotations);

// --- training -------------------------------------------------------------

struct LabeledWindow {
  GestureWindow window;
  GestureLabel label = GestureLabel::Negative;
  std::string source;  // participant / session
};

struct TrainConfig {
  int epochs = 50;
  double learning_rate = 0.01;
  int batch_size = 16;
  std::uint64_t seed = 1;
  double decision_threshold = 0.5;
  /// Layer sizes and rate recorded in the weights; n is taken from the data.
  ModelMeta architecture;

  void validate() const;
};

/// Binary cross-entropy of one example and the gradient of it with respect
/// to every parameter (accumulated into `grad`, which must be shaped like
/// `weights`).
double loss_and_gradient(const ModelWeights& weights, const Tensor3& input, double target, ModelWeights& grad);
double loss(const ModelWeights& weights, const Tensor3& input, double target);

using EpochLogger = std::function<void(int epoch, double mean_loss)>;

/// Mini-batch SGD on binary cross-entropy. Ambiguous windows are dropped.
/// Deterministic for a given seed. Throws InsufficientData when either class
/// is empty after dropping.
ModelWeights train(const std::vector<LabeledWindow>& data, const TrainConfig& cfg, const EpochLogger& log = {});

/// Fraction of non-ambiguous windows classified correctly.
double accuracy(const ModelWeights& weights, const std::vector<LabeledWindow>& data, double threshold = 0.5);

// --- persistence ----------------------------------------------------------

void save_weights(const ModelWeights& weights, const std::string& path);
ModelWeights load_weights(const std::string& path);
std::string weights_to_json(const ModelWeights& weights);
ModelWeights weights_from_json(const std::string& text);

}  // namespace mfed::cnn
