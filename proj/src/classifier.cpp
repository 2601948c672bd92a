#include "mfed/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "mfed/error.hpp"

namespace mfed::cnn {

namespace {

ConvLayer make_conv(int filters, int channels) {
  ConvLayer l;
  l.filters = filters;
  l.channels = channels;
  l.kernels.assign(static_cast<std::size_t>(filters) * 4 * channels, 0.0);
  l.biases.assign(static_cast<std::size_t>(filters), 0.0);
  return l;
}

DenseLayer make_dense(int inputs, int outputs) {
  DenseLayer l;
  l.inputs = inputs;
  l.outputs = outputs;
  l.weights.assign(static_cast<std::size_t>(inputs) * outputs, 0.0);
  l.biases.assign(static_cast<std::size_t>(outputs), 0.0);
  return l;
}

// Visits every parameter array in a fixed order. Works for const and
// non-const weights.
template <typename W, typename F>
void for_each_array(W& w, F&& f) {
  f(w.conv1.kernels);
  f(w.conv1.biases);
  f(w.conv2.kernels);
  f(w.conv2.biases);
  f(w.dense1.weights);
  f(w.dense1.biases);
  f(w.dense2.weights);
  f(w.dense2.biases);
  f(w.out.weights);
  f(w.out.biases);
}

std::vector<double> dense_forward(const DenseLayer& l, const std::vector<double>& x) {
  std::vector<double> y(l.biases);
  const double* w = l.weights.data();
  for (int i = 0; i < l.inputs; ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    const double* row = w + static_cast<std::size_t>(i) * l.outputs;
    for (int o = 0; o < l.outputs; ++o) y[o] += xi * row[o];
  }
  return y;
}

void relu_inplace(std::vector<double>& v) {
  for (auto& x : v) x = x > 0.0 ? x : 0.0;
}

double sigmoid(double z) {
  if (z >= 0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

/// Max-pool that also remembers which of the two rows won (0 or 1).
Tensor3 maxpool_time_idx(const Tensor3& t, std::vector<unsigned char>* which) {
  Tensor3 out(t.h / 2, t.w, t.c);
  if (which) which->assign(out.data.size(), 0);
  for (int i = 0; i < out.h; ++i) {
    for (int j = 0; j < t.w; ++j) {
      for (int k = 0; k < t.c; ++k) {
        const double a = t.at(2 * i, j, k);
        const double b = t.at(2 * i + 1, j, k);
        const bool second = b > a;
        out.at(i, j, k) = second ? b : a;
        if (which) (*which)[(static_cast<std::size_t>(i) * t.w + j) * t.c + k] = second ? 1 : 0;
      }
    }
  }
  return out;
}

struct ForwardCache {
  Tensor3 input;
  Tensor3 z1, a1, p1;
  std::vector<unsigned char> w1;
  Tensor3 z2, a2, p2;
  std::vector<unsigned char> w2;
  std::vector<double> h1pre, h1, h2pre, h2;
  double logit = 0.0;
};

void check_input(const ModelWeights& weights, const Tensor3& input) {
  if (input.h != weights.meta.n || input.w != 3 || input.c != 1) {
    throw ShapeError("window is " + std::to_string(input.h) + "x" + std::to_string(input.w) + "x" +
                     std::to_string(input.c) + ", model expects " + std::to_string(weights.meta.n) + "x3x1");
  }
}

void run_forward(const ModelWeights& weights, const Tensor3& input, ForwardCache& c) {
  check_input(weights, input);
  c.input = input;
  c.z1 = conv2d_valid(input, weights.conv1);
  c.a1 = relu(c.z1);
  c.p1 = maxpool_time_idx(c.a1, &c.w1);
  c.z2 = conv2d_valid(c.p1, weights.conv2);
  c.a2 = relu(c.z2);
  c.p2 = maxpool_time_idx(c.a2, &c.w2);
  c.h1pre = dense_forward(weights.dense1, c.p2.data);
  c.h1 = c.h1pre;
  relu_inplace(c.h1);
  c.h2pre = dense_forward(weights.dense2, c.h1);
  c.h2 = c.h2pre;
  relu_inplace(c.h2);
  c.logit = dense_forward(weights.out, c.h2)[0];
}

/// Accumulates dense-layer parameter gradients; returns d(loss)/d(input).
std::vector<double> dense_backward(const DenseLayer& l, const std::vector<double>& x, const std::vector<double>& dy,
                                   DenseLayer& g) {
  std::vector<double> dx(static_cast<std::size_t>(l.inputs), 0.0);
  for (int o = 0; o < l.outputs; ++o) g.biases[o] += dy[o];
  for (int i = 0; i < l.inputs; ++i) {
    const double* row = l.weights.data() + static_cast<std::size_t>(i) * l.outputs;
    double* grow = g.weights.data() + static_cast<std::size_t>(i) * l.outputs;
    const double xi = x[i];
    double acc = 0.0;
    for (int o = 0; o < l.outputs; ++o) {
      grow[o] += xi * dy[o];
      acc += row[o] * dy[o];
    }
    dx[i] = acc;
  }
  return dx;
}

Tensor3 maxpool_backward(const Tensor3& d_out, const std::vector<unsigned char>& which, int in_h) {
  Tensor3 d_in(in_h, d_out.w, d_out.c);
  for (int i = 0; i < d_out.h; ++i) {
    for (int j = 0; j < d_out.w; ++j) {
      for (int k = 0; k < d_out.c; ++k) {
        const auto idx = (static_cast<std::size_t>(i) * d_out.w + j) * d_out.c + k;
        d_in.at(2 * i + which[idx], j, k) += d_out.data[idx];
      }
    }
  }
  return d_in;
}

/// Accumulates kernel/bias gradients. Returns d(loss)/d(input) when asked.
Tensor3 conv_backward(const ConvLayer& l, const Tensor3& input, const Tensor3& d_out, ConvLayer& g, bool want_input) {
  Tensor3 d_in;
  if (want_input) d_in = Tensor3(input.h, input.w, input.c);
  const int C = l.channels;
  for (int i = 0; i < d_out.h; ++i) {
    for (int j = 0; j < d_out.w; ++j) {
      for (int f = 0; f < l.filters; ++f) {
        const double gz = d_out.at(i, j, f);
        if (gz == 0.0) continue;
        g.biases[f] += gz;
        for (int di = 0; di < 2; ++di) {
          for (int dj = 0; dj < 2; ++dj) {
            const double* x = &input.data[(static_cast<std::size_t>(i + di) * input.w + j + dj) * C];
            const std::size_t kofs = ((static_cast<std::size_t>(f) * 2 + di) * 2 + dj) * C;
            double* gk = &g.kernels[kofs];
            for (int ch = 0; ch < C; ++ch) gk[ch] += gz * x[ch];
            if (want_input) {
              const double* kk = &l.kernels[kofs];
              double* dx = &d_in.data[(static_cast<std::size_t>(i + di) * input.w + j + dj) * C];
              for (int ch = 0; ch < C; ++ch) dx[ch] += gz * kk[ch];
            }
          }
        }
      }
    }
  }
  return d_in;
}

void relu_backward_inplace(Tensor3& d, const Tensor3& pre) {
  for (std::size_t i = 0; i < d.data.size(); ++i) {
    if (!(pre.data[i] > 0.0)) d.data[i] = 0.0;
  }
}

void relu_backward_inplace(std::vector<double>& d, const std::vector<double>& pre) {
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!(pre[i] > 0.0)) d[i] = 0.0;
  }
}

}  // namespace

// --- shapes and weights ---------------------------------------------------

ShapeTrace shape_trace(int n, int conv2_filters) {
  ShapeTrace s{};
  s.input_h = n;
  s.conv1_h = n - 1;
  s.conv1_w = 2;
  s.pool1_h = s.conv1_h / 2;
  s.conv2_h = s.pool1_h - 1;
  s.conv2_w = 1;
  s.pool2_h = s.conv2_h / 2;
  s.flatten_dim = s.pool2_h * s.conv2_w * conv2_filters;
  return s;
}

int flatten_dim(int n, int conv2_filters) {
  if (n < kMinWindowRows) throw ShapeError("window of " + std::to_string(n) + " rows is too short for the network");
  return shape_trace(n, conv2_filters).flatten_dim;
}

ModelWeights ModelWeights::zeros(const ModelMeta& meta) {
  if (meta.conv1_filters < 1 || meta.conv2_filters < 1 || meta.dense_units < 1) {
    throw ShapeError("layer sizes must be positive");
  }
  ModelWeights w;
  w.meta = meta;
  w.conv1 = make_conv(meta.conv1_filters, 1);
  w.conv2 = make_conv(meta.conv2_filters, meta.conv1_filters);
  w.dense1 = make_dense(flatten_dim(meta.n, meta.conv2_filters), meta.dense_units);
  w.dense2 = make_dense(meta.dense_units, meta.dense_units);
  w.out = make_dense(meta.dense_units, 1);
  return w;
}

ModelWeights ModelWeights::random(const ModelMeta& meta, std::uint64_t seed) {
  ModelWeights w = zeros(meta);
  std::mt19937_64 rng(seed);
  auto fill = [&rng](std::vector<double>& v, int fan_in) {
    const double limit = std::sqrt(6.0 / fan_in);
    std::uniform_real_distribution<double> u(-limit, limit);
    for (auto& x : v) x = u(rng);
  };
  fill(w.conv1.kernels, 4 * w.conv1.channels);
  fill(w.conv2.kernels, 4 * w.conv2.channels);
  fill(w.dense1.weights, w.dense1.inputs);
  fill(w.dense2.weights, w.dense2.inputs);
  fill(w.out.weights, w.out.inputs);
  return w;
}

void ModelWeights::validate_shapes() const {
  const auto expect = zeros(meta);
  auto check_conv = [](const char* name, const ConvLayer& got, const ConvLayer& want) {
    if (got.filters != want.filters || got.channels != want.channels || got.kernels.size() != want.kernels.size() ||
        got.biases.size() != want.biases.size()) {
      throw ShapeError(std::string(name) + ": expected " + std::to_string(want.filters) + " filters over " +
                       std::to_string(want.channels) + " channels, found " + std::to_string(got.filters) + " over " +
                       std::to_string(got.channels));
    }
  };
  auto check_dense = [](const char* name, const DenseLayer& got, const DenseLayer& want) {
    if (got.inputs != want.inputs || got.outputs != want.outputs || got.weights.size() != want.weights.size() ||
        got.biases.size() != want.biases.size()) {
      throw ShapeError(std::string(name) + ": expected " + std::to_string(want.inputs) + "x" +
                       std::to_string(want.outputs) + ", found " + std::to_string(got.inputs) + "x" +
                       std::to_string(got.outputs));
    }
  };
  check_conv("conv1", conv1, expect.conv1);
  check_conv("conv2", conv2, expect.conv2);
  check_dense("dense1", dense1, expect.dense1);
  check_dense("dense2", dense2, expect.dense2);
  check_dense("out", out, expect.out);
}

bool ModelWeights::all_finite() const {
  bool ok = true;
  for_each_array(*this, [&ok](const std::vector<double>& v) {
    ok = ok && std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
  });
  return ok;
}

bool operator==(const ModelWeights& a, const ModelWeights& b) {
  auto conv_eq = [](const ConvLayer& x, const ConvLayer& y) {
    return x.filters == y.filters && x.channels == y.channels && x.kernels == y.kernels && x.biases == y.biases;
  };
  auto dense_eq = [](const DenseLayer& x, const DenseLayer& y) {
    return x.inputs == y.inputs && x.outputs == y.outputs && x.weights == y.weights && x.biases == y.biases;
  };
  return a.meta.n == b.meta.n && a.meta.rate == b.meta.rate && a.meta.conv1_filters == b.meta.conv1_filters &&
         a.meta.conv2_filters == b.meta.conv2_filters && a.meta.dense_units == b.meta.dense_units &&
         a.meta.version == b.meta.version && conv_eq(a.conv1, b.conv1) && conv_eq(a.conv2, b.conv2) &&
         dense_eq(a.dense1, b.dense1) && dense_eq(a.dense2, b.dense2) && dense_eq(a.out, b.out);
}

// --- layers ---------------------------------------------------------------

Tensor3 conv2d_valid(const Tensor3& input, const ConvLayer& layer) {
  if (input.c != layer.channels) {
    throw ShapeError("conv input has " + std::to_string(input.c) + " channels, kernels expect " +
                     std::to_string(layer.channels));
  }
  if (input.h < 2 || input.w < 2) throw ShapeError("conv input must be at least 2x2");
  Tensor3 out(input.h - 1, input.w - 1, layer.filters);
  const int C = layer.channels;
  for (int i = 0; i < out.h; ++i) {
    for (int j = 0; j < out.w; ++j) {
      const double* x00 = &input.data[(static_cast<std::size_t>(i) * input.w + j) * C];
      const double* x01 = x00 + C;
      const double* x10 = &input.data[(static_cast<std::size_t>(i + 1) * input.w + j) * C];
      const double* x11 = x10 + C;
      for (int f = 0; f < layer.filters; ++f) {
        const double* k = &layer.kernels[static_cast<std::size_t>(f) * 4 * C];
        double acc = layer.biases[f];
        for (int ch = 0; ch < C; ++ch) {
          acc += x00[ch] * k[ch] + x01[ch] * k[C + ch] + x10[ch] * k[2 * C + ch] + x11[ch] * k[3 * C + ch];
        }
        out.at(i, j, f) = acc;
      }
    }
  }
  return out;
}

Tensor3 relu(Tensor3 t) {
  for (auto& x : t.data) x = x > 0.0 ? x : 0.0;
  return t;
}

Tensor3 maxpool_time(const Tensor3& t) { return maxpool_time_idx(t, nullptr); }

Tensor3 window_tensor(const GestureWindow& window) {
  Tensor3 t(static_cast<int>(window.rows), 3, 1);
  t.data = window.samples;
  return t;
}

double forward(const ModelWeights& weights, const Tensor3& input) {
  ForwardCache c;
  run_forward(weights, input, c);
  return sigmoid(c.logit);
}

double forward(const ModelWeights& weights, const GestureWindow& window) {
  return forward(weights, window_tensor(window));
}

Decision decide(double probability, double threshold) {
  return probability >= threshold ? Decision::EatingGesture : Decision::NonEating;
}

Decision classify(const ModelWeights& weights, const GestureWindow& window, double threshold) {
  return decide(forward(weights, window), threshold);
}

GestureLabel label_poi(Seconds poi_t, const std::vector<Seconds>& annotations) {
  if (annotations.empty()) return GestureLabel::Negative;
  auto it = std::lower_bound(annotations.begin(), annotations.end(), poi_t);
  double d = std::numeric_limits<double>::infinity();
  if (it != annotations.end()) d = std::min(d, *it - poi_t);
  if (it != annotations.begin()) d = std::min(d, poi_t - *std::prev(it));
  if (d <= 2.0) return GestureLabel::Positive;
  if (d <= 4.0) return GestureLabel::Ambiguous;
  return GestureLabel::Negative;
}

// --- training -------------------------------------------------------------

void TrainConfig::validate() const {
  if (epochs < 0) throw ConfigError("epochs must be >= 0");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (!(decision_threshold > 0.0 && decision_threshold < 1.0)) {
    throw ConfigError("decision_threshold must be in (0, 1)");
  }
}

double loss_and_gradient(const ModelWeights& weights, const Tensor3& input, double target, ModelWeights& grad) {
  ForwardCache c;
  run_forward(weights, input, c);
  const double z = c.logit;
  // BCE on the logit: y * softplus(-z) + (1 - y) * softplus(z)
  const double value = target * softplus(-z) + (1.0 - target) * softplus(z);

  const std::vector<double> dlogit{sigmoid(z) - target};
  auto dh2 = dense_backward(weights.out, c.h2, dlogit, grad.out);
  relu_backward_inplace(dh2, c.h2pre);
  auto dh1 = dense_backward(weights.dense2, c.h1, dh2, grad.dense2);
  relu_backward_inplace(dh1, c.h1pre);
  auto dflat = dense_backward(weights.dense1, c.p2.data, dh1, grad.dense1);

  Tensor3 dp2(c.p2.h, c.p2.w, c.p2.c);
  dp2.data = std::move(dflat);
  Tensor3 da2 = maxpool_backward(dp2, c.w2, c.a2.h);
  relu_backward_inplace(da2, c.z2);
  Tensor3 dp1 = conv_backward(weights.conv2, c.p1, da2, grad.conv2, true);
  Tensor3 da1 = maxpool_backward(dp1, c.w1, c.a1.h);
  relu_backward_inplace(da1, c.z1);
  conv_backward(weights.conv1, c.input, da1, grad.conv1, false);
  return value;
}

double loss(const ModelWeights& weights, const Tensor3& input, double target) {
  ForwardCache c;
  run_forward(weights, input, c);
  return target * softplus(-c.logit) + (1.0 - target) * softplus(c.logit);
}

ModelWeights train(const std::vector<LabeledWindow>& data, const TrainConfig& cfg, const EpochLogger& log) {
  cfg.validate();
  std::vector<const LabeledWindow*> usable;
  std::size_t pos = 0, neg = 0;
  for (const auto& d : data) {
    if (d.label == GestureLabel::Ambiguous) continue;
    usable.push_back(&d);
    (d.label == GestureLabel::Positive ? pos : neg)++;
  }
  if (pos == 0 || neg == 0) {
    throw InsufficientData("training needs both classes after dropping ambiguous windows (positive=" +
                           std::to_string(pos) + ", negative=" + std::to_string(neg) + ")");
  }

  ModelMeta meta = cfg.architecture;
  meta.n = static_cast<int>(usable.front()->window.rows);
  std::vector<Tensor3> inputs;
  std::vector<double> targets;
  inputs.reserve(usable.size());
  for (const auto* d : usable) {
    if (static_cast<int>(d->window.rows) != meta.n) throw ShapeError("training windows differ in length");
    inputs.push_back(window_tensor(d->window));
    targets.push_back(d->label == GestureLabel::Positive ? 1.0 : 0.0);
  }

  ModelWeights weights = ModelWeights::random(meta, cfg.seed);
  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> order(inputs.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      ModelWeights grad = ModelWeights::zeros(weights.meta);
      for (std::size_t k = start; k < end; ++k) {
        epoch_loss += loss_and_gradient(weights, inputs[order[k]], targets[order[k]], grad);
      }
      const double step = cfg.learning_rate / static_cast<double>(end - start);
      std::vector<std::vector<double>*> params, grads;
      for_each_array(weights, [&params](std::vector<double>& v) { params.push_back(&v); });
      for_each_array(grad, [&grads](std::vector<double>& v) { grads.push_back(&v); });
      for (std::size_t a = 0; a < params.size(); ++a) {
        auto& p = *params[a];
        const auto& g = *grads[a];
        for (std::size_t i = 0; i < p.size(); ++i) p[i] -= step * g[i];
      }
    }
    if (log) log(epoch, epoch_loss / static_cast<double>(order.size()));
  }
  return weights;
}

double accuracy(const ModelWeights& weights, const std::vector<LabeledWindow>& data, double threshold) {
  std::size_t total = 0, correct = 0;
  for (const auto& d : data) {
    if (d.label == GestureLabel::Ambiguous) continue;
    ++total;
    const bool predicted = classify(weights, d.window, threshold) == Decision::EatingGesture;
    if (predicted == (d.label == GestureLabel::Positive)) ++correct;
  }
  return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

}  // namespace mfed::cnn
