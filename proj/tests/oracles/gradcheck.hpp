#pragma once

// Central finite differences against the analytic gradient. Parameters whose
// one-sided slopes disagree sit on a ReLU / max-pool kink within eps and are
// counted separately instead of compared.

#include <algorithm>
#include <cmath>
#include <vector>

#include "mfed/classifier.hpp"

namespace oracle {

inline std::vector<std::vector<double>*> param_arrays(mfed::cnn::ModelWeights& w) {
  return {&w.conv1.kernels, &w.conv1.biases, &w.conv2.kernels, &w.conv2.biases, &w.dense1.weights,
          &w.dense1.biases, &w.dense2.weights, &w.dense2.biases, &w.out.weights,    &w.out.biases};
}

struct GradCheck {
  std::size_t checked = 0;
  std::size_t kinks = 0;
  double max_rel_err = 0.0;
};

inline GradCheck gradcheck(const mfed::cnn::ModelWeights& weights, const mfed::cnn::Tensor3& x, double target,
                           double eps, std::size_t stride) {
  auto grad = mfed::cnn::ModelWeights::zeros(weights.meta);
  mfed::cnn::loss_and_gradient(weights, x, target, grad);
  auto w = weights;
  auto params = param_arrays(w);
  auto grads = param_arrays(grad);
  const double base = mfed::cnn::loss(w, x, target);

  GradCheck out;
  for (std::size_t a = 0; a < params.size(); ++a) {
    auto& p = *params[a];
    for (std::size_t i = a % stride; i < p.size(); i += stride) {
      const double keep = p[i];
      p[i] = keep + eps;
      const double up = mfed::cnn::loss(w, x, target);
      p[i] = keep - eps;
      const double down = mfed::cnn::loss(w, x, target);
      p[i] = keep;
      const double right = (up - base) / eps;
      const double left = (base - down) / eps;
      const double numeric = (up - down) / (2 * eps);
      const double analytic = (*grads[a])[i];
      const double scale = std::max({std::abs(numeric), std::abs(analytic), 1e-7});
      if (std::abs(right - left) > 1e-2 * std::max({std::abs(right), std::abs(left), 1e-7}) + 1e-6) {
        ++out.kinks;
        continue;
      }
      ++out.checked;
      out.max_rel_err = std::max(out.max_rel_err, std::abs(numeric - analytic) / scale);
    }
  }
  return out;
}

}  // namespace oracle
