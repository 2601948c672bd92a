#pragma once

// Straight-line reference forward pass over nested vectors, read directly
// from the documented weight layout.

#include <algorithm>
#include <cmath>
#include <vector>

#include "mfed/classifier.hpp"

namespace oracle {

using Grid = std::vector<std::vector<std::vector<long double>>>;  // [h][w][c]

inline Grid conv(const Grid& in, const mfed::cnn::ConvLayer& L) {
  const std::size_t H = in.size(), W = in[0].size(), C = in[0][0].size();
  Grid out(H - 1, std::vector<std::vector<long double>>(W - 1, std::vector<long double>(L.filters)));
  for (std::size_t i = 0; i + 1 < H; ++i)
    for (std::size_t j = 0; j + 1 < W; ++j)
      for (int f = 0; f < L.filters; ++f) {
        long double acc = L.biases[f];
        for (int di = 0; di < 2; ++di)
          for (int dj = 0; dj < 2; ++dj)
            for (std::size_t ch = 0; ch < C; ++ch) {
              const std::size_t k = ((static_cast<std::size_t>(f) * 2 + di) * 2 + dj) * C + ch;
              acc += in[i + di][j + dj][ch] * L.kernels[k];
            }
        out[i][j][f] = std::max<long double>(acc, 0);  // ReLU
      }
  return out;
}

inline Grid pool(const Grid& in) {
  Grid out(in.size() / 2, std::vector<std::vector<long double>>(in[0].size(), std::vector<long double>(in[0][0].size())));
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t j = 0; j < in[0].size(); ++j)
      for (std::size_t c = 0; c < in[0][0].size(); ++c) out[i][j][c] = std::max(in[2 * i][j][c], in[2 * i + 1][j][c]);
  return out;
}

inline std::vector<long double> dense(const std::vector<long double>& x, const mfed::cnn::DenseLayer& L, bool relu) {
  std::vector<long double> y(L.outputs);
  for (int o = 0; o < L.outputs; ++o) {
    long double acc = L.biases[o];
    for (int i = 0; i < L.inputs; ++i) acc += x[i] * L.weights[static_cast<std::size_t>(i) * L.outputs + o];
    y[o] = relu ? std::max<long double>(acc, 0) : acc;
  }
  return y;
}

inline double forward(const mfed::cnn::ModelWeights& w, const mfed::GestureWindow& win) {
  Grid x(win.rows, std::vector<std::vector<long double>>(3, std::vector<long double>(1)));
  for (std::size_t r = 0; r < win.rows; ++r)
    for (int a = 0; a < 3; ++a) x[r][a][0] = win.samples[r * 3 + a];
  const Grid p2 = pool(conv(pool(conv(x, w.conv1)), w.conv2));
  std::vector<long double> flat;
  for (const auto& row : p2)
    for (const auto& col : row)
      for (long double v : col) flat.push_back(v);
  const auto h1 = dense(flat, w.dense1, true);
  const auto h2 = dense(h1, w.dense2, true);
  const long double z = dense(h2, w.out, false)[0];
  return static_cast<double>(1.0L / (1.0L + std::exp(-z)));
}

}  // namespace oracle
