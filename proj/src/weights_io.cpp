// Weights file: a JSON document, see docs/formats.md.

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "mfed/classifier.hpp"
#include "mfed/error.hpp"

namespace mfed::cnn {

using nlohmann::ordered_json;

namespace {

ordered_json conv_to_json(const ConvLayer& l) {
  ordered_json filters = ordered_json::array();
  for (int f = 0; f < l.filters; ++f) {
    ordered_json rows = ordered_json::array();
    for (int di = 0; di < 2; ++di) {
      ordered_json cols = ordered_json::array();
      for (int dj = 0; dj < 2; ++dj) {
        ordered_json chans = ordered_json::array();
        for (int ch = 0; ch < l.channels; ++ch) chans.push_back(l.k(f, di, dj, ch));
        cols.push_back(std::move(chans));
      }
      rows.push_back(std::move(cols));
    }
    filters.push_back(std::move(rows));
  }
  return {{"filters", std::move(filters)}, {"biases", l.biases}};
}

ordered_json dense_to_json(const DenseLayer& l) {
  ordered_json rows = ordered_json::array();
  for (int i = 0; i < l.inputs; ++i) {
    auto first = l.weights.begin() + static_cast<std::ptrdiff_t>(i) * l.outputs;
    rows.push_back(std::vector<double>(first, first + l.outputs));
  }
  return {{"weights", std::move(rows)}, {"biases", l.biases}};
}

const ordered_json& field(const ordered_json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw FormatError(where + ": missing field '" + key + "'");
  return j.at(key);
}

void expect_array(const ordered_json& j, std::size_t size, const std::string& where) {
  if (!j.is_array()) throw FormatError(where + ": expected an array");
  if (j.size() != size) {
    throw FormatError(where + ": expected " + std::to_string(size) + " entries, found " + std::to_string(j.size()));
  }
}

double number(const ordered_json& j, const std::string& where) {
  if (!j.is_number()) throw FormatError(where + ": expected a number");
  return j.get<double>();
}

void conv_from_json(const ordered_json& j, ConvLayer& l, const std::string& name) {
  const auto& filters = field(j, "filters", name);
  expect_array(filters, static_cast<std::size_t>(l.filters), name + ".filters");
  for (int f = 0; f < l.filters; ++f) {
    const auto& rows = filters[static_cast<std::size_t>(f)];
    expect_array(rows, 2, name + ".filters[" + std::to_string(f) + "]");
    for (int di = 0; di < 2; ++di) {
      const auto& cols = rows[static_cast<std::size_t>(di)];
      expect_array(cols, 2, name + ".filters[" + std::to_string(f) + "][" + std::to_string(di) + "]");
      for (int dj = 0; dj < 2; ++dj) {
        const auto& chans = cols[static_cast<std::size_t>(dj)];
        expect_array(chans, static_cast<std::size_t>(l.channels), name + " kernel channels");
        for (int ch = 0; ch < l.channels; ++ch) l.k(f, di, dj, ch) = number(chans[static_cast<std::size_t>(ch)], name);
      }
    }
  }
  const auto& biases = field(j, "biases", name);
  expect_array(biases, l.biases.size(), name + ".biases");
  for (std::size_t i = 0; i < l.biases.size(); ++i) l.biases[i] = number(biases[i], name + ".biases");
}

void dense_from_json(const ordered_json& j, DenseLayer& l, const std::string& name) {
  const auto& rows = field(j, "weights", name);
  expect_array(rows, static_cast<std::size_t>(l.inputs), name + ".weights");
  for (int i = 0; i < l.inputs; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    expect_array(row, static_cast<std::size_t>(l.outputs), name + ".weights[" + std::to_string(i) + "]");
    for (int o = 0; o < l.outputs; ++o) {
      l.weights[static_cast<std::size_t>(i) * l.outputs + o] = number(row[static_cast<std::size_t>(o)], name);
    }
  }
  const auto& biases = field(j, "biases", name);
  expect_array(biases, l.biases.size(), name + ".biases");
  for (std::size_t i = 0; i < l.biases.size(); ++i) l.biases[i] = number(biases[i], name + ".biases");
}

int int_field(const ordered_json& j, const char* key) {
  const auto& v = field(j, key, "meta");
  if (!v.is_number_integer()) throw FormatError(std::string("meta.") + key + ": expected an integer");
  return v.get<int>();
}

}  // namespace

std::string weights_to_json(const ModelWeights& w) {
  ordered_json doc;
  doc["version"] = w.meta.version;
  doc["meta"] = {{"n", w.meta.n},
                 {"rate", w.meta.rate},
                 {"conv1_filters", w.meta.conv1_filters},
                 {"conv2_filters", w.meta.conv2_filters},
                 {"dense_units", w.meta.dense_units}};
  doc["conv1"] = conv_to_json(w.conv1);
  doc["conv2"] = conv_to_json(w.conv2);
  doc["dense1"] = dense_to_json(w.dense1);
  doc["dense2"] = dense_to_json(w.dense2);
  doc["out"] = dense_to_json(w.out);
  return doc.dump();
}

ModelWeights weights_from_json(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("weights file is not valid JSON: ") + e.what());
  }
  const auto& version = field(doc, "version", "weights");
  if (!version.is_number_integer() || version.get<int>() != kWeightsVersion) {
    throw FormatError("unsupported weights version " + version.dump() + " (supported: " +
                      std::to_string(kWeightsVersion) + ")");
  }
  const auto& m = field(doc, "meta", "weights");
  ModelMeta meta;
  meta.n = int_field(m, "n");
  meta.rate = number(field(m, "rate", "meta"), "meta.rate");
  meta.conv1_filters = int_field(m, "conv1_filters");
  meta.conv2_filters = int_field(m, "conv2_filters");
  meta.dense_units = int_field(m, "dense_units");
  meta.version = kWeightsVersion;

  ModelWeights w;
  try {
    w = ModelWeights::zeros(meta);
  } catch (const ShapeError& e) {
    throw FormatError(std::string("weights meta is inconsistent: ") + e.what());
  }
  conv_from_json(field(doc, "conv1", "weights"), w.conv1, "conv1");
  conv_from_json(field(doc, "conv2", "weights"), w.conv2, "conv2");
  dense_from_json(field(doc, "dense1", "weights"), w.dense1, "dense1");
  dense_from_json(field(doc, "dense2", "weights"), w.dense2, "dense2");
  dense_from_json(field(doc, "out", "weights"), w.out, "out");
  if (!w.all_finite()) throw FormatError("weights contain non-finite values");
  return w;
}

void save_weights(const ModelWeights& weights, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open " + path + " for writing");
  out << weights_to_json(weights) << '\n';
  if (!out) throw FormatError("failed writing " + path);
}

ModelWeights load_weights(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open weights file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return weights_from_json(ss.str());
}

}  // namespace mfed::cnn
