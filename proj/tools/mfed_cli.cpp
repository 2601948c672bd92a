// mfed: command-line front end for detection, training, evaluation and the
// home simulator.

#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mfed/classifier.hpp"
#include "mfed/error.hpp"
#include "mfed/evaluation.hpp"
#include "mfed/events.hpp"
#include "mfed/sim_config.hpp"
#include "mfed/simulator.hpp"
#include "mfed/trace_io.hpp"

namespace {

using namespace mfed;

struct DetectorFlags {
  double rate = 25.0;
  double x_th = -3.0;
  double v_th = 1.0;
  double threshold = 0.5;

  void add(CLI::App* cmd, bool with_thresholds = true) {
    cmd->add_option("--rate", rate, "Sampling rate in Hz")->capture_default_str();
    if (with_thresholds) {
      cmd->add_option("--xth", x_th, "X acceleration threshold (m/s^2)")->capture_default_str();
      cmd->add_option("--vth", v_th, "Summed variance threshold")->capture_default_str();
    }
  }

  DetectorConfig config() const {
    DetectorConfig c;
    c.x_th = x_th;
    c.v_th = v_th;
    return c;
  }
};

// Writes to --out when given, stdout otherwise.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw FormatError("cannot write '" + path + "'");
    }
  }
  std::ostream& get() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::optional<cnn::ModelWeights> maybe_weights(const std::string& path) {
  if (path.empty()) return std::nullopt;
  return cnn::load_weights(path);
}

AccelSeries read_checked_trace(const std::string& path, double rate) {
  AccelSeries s = load_trace(path, rate);
  validate_rate(s);
  return s;
}

void print_metrics_csv(std::ostream& out, const Metrics& m) {
  out << "tp,fp,fn,precision,recall,f1\n"
      << m.tp << ',' << m.fp << ',' << m.fn << ',' << m.precision << ',' << m.recall << ',' << m.f1 << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Family eating detection: PoI detection, CNN gestures, eating events and EMA simulation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "mfed 1.0.0");

  DetectorFlags det;
  std::string trace, annotations, weights, out, config, gt_out, participant = "p0";
  double tolerance = 4.0;

  // detect
  auto* detect = app.add_subcommand("detect", "Detect eating events in a trace; writes JSONL");
  detect->add_option("--trace", trace, "Trace CSV (t_ms,ax,ay,az)")->required();
  det.add(detect);
  detect->add_option("--weights", weights, "CNN weights JSON; without it every PoI counts as a gesture");
  detect->add_option("--threshold", det.threshold, "CNN decision threshold")->capture_default_str();
  detect->add_option("--participant", participant, "Participant id written to the output")->capture_default_str();
  detect->add_option("--out", out, "Output JSONL (default stdout)");

  // train
  std::vector<std::string> traces, annots;
  cnn::TrainConfig tc;
  auto* train = app.add_subcommand("train", "Train the gesture CNN on annotated traces");
  train->add_option("--trace", traces, "Trace CSV; repeat for several")->required();
  train->add_option("--annotations", annots, "Annotation CSV per trace, same order")->required();
  det.add(train);
  train->add_option("--epochs", tc.epochs, "Training epochs")->capture_default_str();
  train->add_option("--lr", tc.learning_rate, "SGD learning rate")->capture_default_str();
  train->add_option("--batch", tc.batch_size, "Minibatch size")->capture_default_str();
  train->add_option("--seed", tc.seed, "Initialization and shuffle seed")->capture_default_str();
  train->add_option("--out", out, "Weights JSON to write")->required();

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Match detected gestures to annotations; prints metrics CSV");
  evaluate->add_option("--trace", trace, "Trace CSV (t_ms,ax,ay,az)")->required();
  evaluate->add_option("--annotations", annotations, "Annotation CSV (t_ms)")->required();
  det.add(evaluate);
  evaluate->add_option("--weights", weights, "CNN weights JSON; without it every PoI counts as a gesture");
  evaluate->add_option("--threshold", det.threshold, "CNN decision threshold")->capture_default_str();
  evaluate->add_option("--tolerance", tolerance, "Match tolerance in seconds")->capture_default_str();
  evaluate->add_option("--out", out, "Output CSV (default stdout)");

  // sweep
  std::vector<double> xs{-1, -2, -3, -4, -5}, vs{0, 1, 2, 3};
  auto* sweep = app.add_subcommand("sweep", "PoI rate and metrics over a grid of thresholds; writes CSV");
  sweep->add_option("--trace", trace, "Trace CSV (t_ms,ax,ay,az)")->required();
  sweep->add_option("--annotations", annotations, "Annotation CSV (t_ms)")->required();
  det.add(sweep, false);
  sweep->add_option("--xth", xs, "Comma-separated x_th values")->delimiter(',')->capture_default_str();
  sweep->add_option("--vth", vs, "Comma-separated v_th values")->delimiter(',')->capture_default_str();
  sweep->add_option("--weights", weights, "CNN weights JSON; without it every PoI counts as a gesture");
  sweep->add_option("--threshold", det.threshold, "CNN decision threshold")->capture_default_str();
  sweep->add_option("--tolerance", tolerance, "Match tolerance in seconds")->capture_default_str();
  sweep->add_option("--out", out, "Output CSV (default stdout)");

  // poi-rate
  auto* rate = app.add_subcommand("poi-rate", "PoIs per minute and the ratio to sliding-window segmenters");
  rate->add_option("--trace", trace, "Trace CSV (t_ms,ax,ay,az)")->required();
  det.add(rate);
  rate->add_option("--out", out, "Output CSV (default stdout)");

  // simulate
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  auto* simulate = app.add_subcommand("simulate", "Run the home simulator; writes JSONL");
  simulate->add_option("--config", config, "Home config JSON")->required();
  simulate->add_option("--seed", seed, "Overrides MFED_SEED and the config seed");
  simulate->add_option("--out", out, "Event log JSONL (default stdout)");
  simulate->add_option("--gt-out", gt_out, "Ground-truth CSV");
  simulate->add_option("--threads", threads, "Worker threads for multi-home configs (0: all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*detect) {
      const auto series = read_checked_trace(trace, det.rate);
      const auto w = maybe_weights(weights);
      const auto found = detect_gestures(series, det.config(), w ? &*w : nullptr, det.threshold);
      Output o(out);
      for (const auto& e : detect_events(found.gestures, participant)) {
        nlohmann::ordered_json j;
        j["kind"] = "eating_event";
        j["participant"] = e.participant_id;
        j["start_ms"] = to_ms(e.start);
        j["end_ms"] = to_ms(e.end);
        auto g = nlohmann::ordered_json::array();
        for (Seconds t : e.gestures()) g.push_back(to_ms(t));
        j["gestures"] = g;
        o.get() << j.dump() << '\n';
      }
    } else if (*train) {
      if (traces.size() != annots.size()) {
        std::cerr << "train: give one --annotations per --trace\n";
        return 1;
      }
      const DetectorConfig cfg = det.config();
      std::vector<cnn::LabeledWindow> data;
      for (std::size_t i = 0; i < traces.size(); ++i) {
        const auto series = read_checked_trace(traces[i], det.rate);
        const auto part = labeled_windows(series, load_annotations(annots[i]), cfg, traces[i]);
        data.insert(data.end(), part.begin(), part.end());
      }
      tc.architecture.n = static_cast<int>(window_rows(det.rate, cfg.window_len));
      tc.architecture.rate = det.rate;
      const auto model = cnn::train(data, tc, [](int epoch, double loss) {
        std::cerr << "epoch " << epoch << " loss " << std::setprecision(6) << loss << '\n';
      });
      cnn::save_weights(model, out);
      std::cerr << "training accuracy " << cnn::accuracy(model, data, tc.decision_threshold) << '\n';
    } else if (*evaluate) {
      const auto series = read_checked_trace(trace, det.rate);
      const auto ann = load_annotations(annotations);
      const auto w = maybe_weights(weights);
      const auto found = detect_gestures(series, det.config(), w ? &*w : nullptr, det.threshold);
      Output o(out);
      print_metrics_csv(o.get(), match_gestures(found.gestures, ann, tolerance));
    } else if (*sweep) {
      const auto series = read_checked_trace(trace, det.rate);
      const auto ann = load_annotations(annotations);
      const auto w = maybe_weights(weights);
      const auto rows = threshold_sweep(series, ann, xs, vs, w ? &*w : nullptr, DetectorConfig{}, tolerance,
                                        det.threshold);
      Output o(out);
      write_sweep_csv(o.get(), rows);
    } else if (*rate) {
      const auto series = read_checked_trace(trace, det.rate);
      const auto cfg = det.config();
      const auto pois = detect_pois_raw(series, cfg);
      const auto r = PoiRateReport::from_count(pois.size(), series.duration());
      Output o(out);
      o.get() << "pois,duration_s,pois_per_minute,ratio_vs_sliding_3s,ratio_vs_sliding_100ms\n"
              << pois.size() << ',' << series.duration() << ',' << r.pois_per_minute << ',' << r.ratio_vs_sliding_3s
              << ',' << r.ratio_vs_sliding_100ms << '\n';
    } else if (*simulate) {
      auto homes = sim::load_home_configs(config);
      const auto env_seed = sim::seed_from_env();
      for (auto& h : homes) {
        if (seed) {
          h.seed = *seed;
        } else if (env_seed) {
          h.seed = *env_seed;
        }
      }
      const auto results = sim::run_simulations(homes, threads);
      {
        Output o(out);
        sim::write_log(o.get(), results);
      }
      std::string gt_path = gt_out;
      if (gt_path.empty() && homes.size() == 1 && homes.front().ground_truth_out) gt_path = *homes.front().ground_truth_out;
      if (!gt_path.empty()) {
        Output g(gt_path);
        sim::write_ground_truth_csv(g.get(), results);
      }
    }
  } catch (const mfed::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
