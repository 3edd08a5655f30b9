// netae command line driver: one subcommand per pipeline stage, emitting the
// plot-ready artifacts (schema.json, model.json, loss.csv, errors.csv,
// sweep.csv, roc.csv, andrews.csv, report.json) into a run directory.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "netae/andrews.hpp"
#include "netae/checksum.hpp"
#include "netae/dataset.hpp"
#include "netae/detector.hpp"
#include "netae/errors.hpp"
#include "netae/evaluation.hpp"
#include "netae/io.hpp"
#include "netae/model.hpp"
#include "netae/naive_bayes.hpp"
#include "netae/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace netae;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

struct RunConfig {
  std::string train_path;
  std::string test_path;
  std::string out_dir = "run";
  std::string schema_path;      // defaults to <out>/schema.json
  std::string model_path;       // defaults to <out>/model.json
  std::string attack_map_path;  // empty = builtin table
  std::uint64_t seed = 1;
  int epochs = 100;
  int batch_size = 32;
  double learning_rate = 0.0001;
  double validation_fraction = 0.1;
  int threads = 0;
  int grid_points = 512;
  std::string objective = "balanced";
  double threshold = -1.0;  // <0 = take it from <out>/threshold.json
  int resolution = 101;
  int max_rows = 500;
};

json config_to_json(const RunConfig& cfg) {
  return json{{"train", cfg.train_path},
              {"test", cfg.test_path},
              {"out", cfg.out_dir},
              {"schema", cfg.schema_path},
              {"model", cfg.model_path},
              {"attack_map", cfg.attack_map_path},
              {"seed", cfg.seed},
              {"epochs", cfg.epochs},
              {"batch_size", cfg.batch_size},
              {"learning_rate", cfg.learning_rate},
              {"validation_fraction", cfg.validation_fraction},
              {"threads", cfg.threads},
              {"grid_points", cfg.grid_points},
              {"objective", cfg.objective},
              {"threshold", cfg.threshold},
              {"resolution", cfg.resolution},
              {"max_rows", cfg.max_rows}};
}

void config_from_json(const std::string& path, RunConfig& cfg) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw DataError("config " + path + ": invalid json: " + e.what());
  }
  auto get = [&doc](const char* key, auto& into) {
    if (doc.contains(key) && !doc.at(key).is_null()) {
      doc.at(key).get_to(into);
    }
  };
  get("train", cfg.train_path);
  get("test", cfg.test_path);
  get("out", cfg.out_dir);
  get("schema", cfg.schema_path);
  get("model", cfg.model_path);
  get("attack_map", cfg.attack_map_path);
  get("seed", cfg.seed);
  get("epochs", cfg.epochs);
  get("batch_size", cfg.batch_size);
  get("learning_rate", cfg.learning_rate);
  get("validation_fraction", cfg.validation_fraction);
  get("threads", cfg.threads);
  get("grid_points", cfg.grid_points);
  get("objective", cfg.objective);
  get("threshold", cfg.threshold);
  get("resolution", cfg.resolution);
  get("max_rows", cfg.max_rows);
}

std::string join_path(const std::string& dir, const char* name) {
  return (fs::path(dir) / name).string();
}

AttackClassMap load_attack_map(const RunConfig& cfg) {
  return cfg.attack_map_path.empty() ? AttackClassMap::builtin()
                                     : AttackClassMap::from_csv(cfg.attack_map_path);
}

std::string resolved_schema_path(const RunConfig& cfg) {
  return cfg.schema_path.empty() ? join_path(cfg.out_dir, "schema.json") : cfg.schema_path;
}

std::string resolved_model_path(const RunConfig& cfg) {
  return cfg.model_path.empty() ? join_path(cfg.out_dir, "model.json") : cfg.model_path;
}

TrainConfig trainer_config(const RunConfig& cfg) {
  TrainConfig tc;
  tc.learning_rate = cfg.learning_rate;
  tc.batch_size = cfg.batch_size;
  tc.epochs = cfg.epochs;
  tc.validation_fraction = cfg.validation_fraction;
  tc.seed = cfg.seed;
  tc.threads = cfg.threads;
  return tc;
}

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v * 100.0);
  return buf;
}

int cmd_schema(const RunConfig& cfg) {
  if (cfg.train_path.empty()) throw DataError("schema: --train is required");
  const auto records = parse_nslkdd(cfg.train_path);
  const auto schema = build_schema(records);
  const auto path = resolved_schema_path(cfg);
  save_schema(path, schema);
  std::cout << "records " << records.size() << "\n"
            << "protocol_vocab " << schema.protocol_vocab.size() << "\n"
            << "service_vocab " << schema.service_vocab.size() << "\n"
            << "flag_vocab " << schema.flag_vocab.size() << "\n"
            << "encoded_dim " << schema.encoded_dim() << "\n"
            << "schema " << path << "\n";
  return kExitOk;
}

int cmd_encode(const RunConfig& cfg, const std::string& input, const std::string& out_file) {
  const auto schema = load_schema(resolved_schema_path(cfg));
  const auto map = load_attack_map(cfg);
  const auto records = parse_nslkdd(input);
  const auto samples = encode_all(records, schema, map);
  write_encoded_csv(out_file, samples);
  std::cout << "encoded " << samples.size() << " rows, width " << schema.encoded_dim() + 1
            << " -> " << out_file << "\n";
  if (map.unknown_count() > 0) {
    std::cerr << "warning: " << map.unknown_count() << " unknown attack names mapped to "
              << class_display(map.unknown_class) << "\n";
  }
  return kExitOk;
}

int cmd_train(const RunConfig& cfg) {
  if (cfg.train_path.empty()) throw DataError("train: --train is required");
  const auto schema_path = resolved_schema_path(cfg);
  FeatureSchema schema;
  if (fs::exists(schema_path)) {
    schema = load_schema(schema_path);
  } else {
    std::cerr << "schema " << schema_path << " not found, building it from the training file\n";
    schema = build_schema(parse_nslkdd(cfg.train_path));
    save_schema(schema_path, schema);
  }
  const auto map = load_attack_map(cfg);
  const auto records = parse_nslkdd(cfg.train_path);
  std::vector<EncodedSample> normals;
  for (const auto& rec : records) {
    auto sample = encode(rec, schema, map);
    if (sample.cls == TrafficClass::Normal) normals.push_back(std::move(sample));
  }
  std::cerr << "training on " << normals.size() << " normal records of " << records.size()
            << " total\n";

  ModelShape shape = ModelShape::standard();
  shape.input_dim = schema.encoded_dim();

  const auto started = std::chrono::steady_clock::now();
  const TrainResult result = train(normals, trainer_config(cfg), shape);
  const auto seconds =
      std::chrono::duration_cast<std::chrono::seconds>(std::chrono::steady_clock::now() - started);

  Checkpoint ckpt;
  ckpt.params = result.params;
  ckpt.schema_checksum = schema_checksum(schema);
  ckpt.history = result.history;
  const auto model_path = resolved_model_path(cfg);
  save_checkpoint(model_path, ckpt);
  write_loss_csv(join_path(cfg.out_dir, "loss.csv"), result.history);

  std::cout << "epochs " << result.history.size() << "\n"
            << "first_epoch_train_loss " << format_double(result.history.front().train_loss) << "\n"
            << "final_train_loss " << format_double(result.history.back().train_loss) << "\n"
            << "final_validation_loss " << format_double(result.history.back().validation_loss)
            << "\n"
            << "train_seconds " << seconds.count() << "\n"
            << "model " << model_path << "\n";
  return kExitOk;
}

int cmd_threshold(const RunConfig& cfg) {
  if (cfg.train_path.empty()) throw DataError("threshold: --train is required");
  const auto schema = load_schema(resolved_schema_path(cfg));
  const auto ckpt = load_checkpoint(resolved_model_path(cfg), schema_checksum(schema));
  const auto map = load_attack_map(cfg);
  const auto records = parse_nslkdd(cfg.train_path);
  const auto samples = encode_all(records, schema, map);
  const auto errors = score_all(ckpt.params, samples, cfg.threads);
  write_errors_csv(join_path(cfg.out_dir, "errors.csv"), errors);

  const auto grid = default_grid(errors, cfg.grid_points);
  const auto objective = objective_from_name(cfg.objective);
  const auto report = threshold_report(errors, grid, objective);
  write_sweep_csv(join_path(cfg.out_dir, "sweep.csv"), report.sweep);

  json doc{{"format", "netae.threshold"},
           {"version", 1},
           {"threshold", report.threshold},
           {"objective", cfg.objective},
           {"grid_points", static_cast<int>(grid.size())},
           {"grid_lo", grid.front()},
           {"grid_hi", grid.back()},
           {"train_checksum", file_checksum(cfg.train_path)},
           {"rates_at_threshold", json::object()}};
  for (int c = 0; c < kClassCount; ++c) {
    doc["rates_at_threshold"][class_key(static_cast<TrafficClass>(c))] =
        report.at_threshold.rate[static_cast<std::size_t>(c)];
  }
  atomic_write_file(join_path(cfg.out_dir, "threshold.json"), doc.dump(2) + "\n");

  std::cout << "threshold " << format_double(report.threshold) << "\n";
  for (int c = 0; c < kClassCount; ++c) {
    std::cout << "rate_" << class_key(static_cast<TrafficClass>(c)) << " "
              << pct(report.at_threshold.rate[static_cast<std::size_t>(c)]) << "\n";
  }
  return kExitOk;
}

double resolve_threshold(const RunConfig& cfg) {
  if (cfg.threshold >= 0.0) return cfg.threshold;
  const auto path = join_path(cfg.out_dir, "threshold.json");
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw DataError("threshold file " + path + ": invalid json: " + e.what());
  }
  return doc.at("threshold").get<double>();
}

int cmd_eval(const RunConfig& cfg) {
  if (cfg.test_path.empty()) throw DataError("eval: --test is required");
  const auto schema = load_schema(resolved_schema_path(cfg));
  const auto model_path = resolved_model_path(cfg);
  const auto ckpt = load_checkpoint(model_path, schema_checksum(schema));
  const auto map = load_attack_map(cfg);
  const double tau = resolve_threshold(cfg);

  const auto records = parse_nslkdd(cfg.test_path);
  const auto samples = encode_all(records, schema, map);
  const auto errors = score_all(ckpt.params, samples, cfg.threads);
  write_errors_csv(join_path(cfg.out_dir, "errors_test.csv"), errors);

  std::vector<Binary> predictions;
  std::vector<TrafficClass> truth;
  predictions.reserve(errors.size());
  truth.reserve(errors.size());
  for (const auto& rec : errors) {
    predictions.push_back(classify(rec.error, tau));
    truth.push_back(rec.cls);
  }
  const auto cm = confusion(predictions, truth);
  const auto m = metrics(cm);
  const auto rates = detection_rates(errors, tau);
  const auto curve = roc_curve(errors);
  const double area = auc(curve);
  write_roc_csv(join_path(cfg.out_dir, "roc.csv"), curve);

  std::array<std::uint64_t, kClassCount> counts{};
  for (const auto& rec : errors) ++counts[static_cast<std::size_t>(rec.cls)];

  json doc{{"format", "netae.report"},
           {"version", 1},
           {"threshold", tau},
           {"confusion", {{"tp", cm.tp}, {"tn", cm.tn}, {"fp", cm.fp}, {"fn", cm.fn}}},
           {"metrics",
            {{"precision", m.precision},
             {"recall", m.recall},
             {"f_score", m.f_score},
             {"accuracy", m.accuracy},
             {"degenerate", m.degenerate}}},
           {"auc", area},
           {"per_class_detection", json::object()},
           {"per_class_counts", json::object()},
           {"metadata",
            {{"seed", cfg.seed},
             {"config", config_to_json(cfg)},
             {"config_checksum", hex_u64(fnv1a64(config_to_json(cfg).dump()))},
             {"schema_checksum", schema_checksum(schema)},
             {"model_file", model_path},
             {"dataset_checksums", {{"test", file_checksum(cfg.test_path)}}},
             {"unknown_attack_names", map.unknown_count()}}}};
  for (int c = 0; c < kClassCount; ++c) {
    const auto key = class_key(static_cast<TrafficClass>(c));
    doc["per_class_detection"][key] = rates[static_cast<std::size_t>(c)];
    doc["per_class_counts"][key] = counts[static_cast<std::size_t>(c)];
  }
  if (!cfg.train_path.empty() && fs::exists(cfg.train_path)) {
    doc["metadata"]["dataset_checksums"]["train"] = file_checksum(cfg.train_path);
  }
  atomic_write_file(join_path(cfg.out_dir, "report.json"), doc.dump(2) + "\n");

  std::cout << "threshold " << format_double(tau) << "\n"
            << "tp " << cm.tp << "  fn " << cm.fn << "\n"
            << "fp " << cm.fp << "  tn " << cm.tn << "\n"
            << "precision " << pct(m.precision) << "\n"
            << "recall " << pct(m.recall) << "\n"
            << "f_score " << pct(m.f_score) << "\n"
            << "accuracy " << pct(m.accuracy) << "\n"
            << "auc " << format_double(area) << "\n";
  for (int c = 0; c < kClassCount; ++c) {
    std::cout << "detection_" << class_key(static_cast<TrafficClass>(c)) << " "
              << pct(rates[static_cast<std::size_t>(c)]) << "\n";
  }
  return kExitOk;
}

int cmd_baseline(const RunConfig& cfg) {
  if (cfg.train_path.empty() || cfg.test_path.empty()) {
    throw DataError("baseline: --train and --test are required");
  }
  const auto schema = load_schema(resolved_schema_path(cfg));
  const auto map = load_attack_map(cfg);
  const auto train_samples = encode_all(parse_nslkdd(cfg.train_path), schema, map);
  const auto test_samples = encode_all(parse_nslkdd(cfg.test_path), schema, map);

  const auto model = nb_train(train_samples, kNumericFeatures);
  atomic_write_file(join_path(cfg.out_dir, "nb_model.json"), nb_to_json(model));

  std::vector<Binary> predictions;
  std::vector<TrafficClass> truth;
  for (const auto& s : test_samples) {
    predictions.push_back(nb_predict(model, s));
    truth.push_back(s.cls);
  }
  const auto cm = confusion(predictions, truth);
  const auto m = metrics(cm);

  json doc{{"format", "netae.nb_report"},
           {"version", 1},
           {"confusion", {{"tp", cm.tp}, {"tn", cm.tn}, {"fp", cm.fp}, {"fn", cm.fn}}},
           {"metrics",
            {{"precision", m.precision},
             {"recall", m.recall},
             {"f_score", m.f_score},
             {"accuracy", m.accuracy},
             {"degenerate", m.degenerate}}},
           {"metadata",
            {{"train_checksum", file_checksum(cfg.train_path)},
             {"test_checksum", file_checksum(cfg.test_path)},
             {"schema_checksum", schema_checksum(schema)}}}};
  atomic_write_file(join_path(cfg.out_dir, "nb_report.json"), doc.dump(2) + "\n");

  std::cout << "nb_precision " << pct(m.precision) << "\n"
            << "nb_recall " << pct(m.recall) << "\n"
            << "nb_f_score " << pct(m.f_score) << "\n"
            << "nb_accuracy " << pct(m.accuracy) << "\n";
  return kExitOk;
}

int cmd_andrews(const RunConfig& cfg, const std::string& input) {
  const auto schema = load_schema(resolved_schema_path(cfg));
  const auto map = load_attack_map(cfg);
  const auto samples = encode_all(parse_nslkdd(input), schema, map);
  const auto curve = andrews_samples(samples, cfg.resolution, cfg.max_rows, cfg.seed);
  write_andrews_csv(join_path(cfg.out_dir, "andrews.csv"), curve);
  std::cout << "andrews_rows " << curve.size() << "\n";
  return kExitOk;
}

int cmd_run(const RunConfig& cfg) {
  if (cfg.train_path.empty() || cfg.test_path.empty()) {
    throw DataError("run: --train and --test are required");
  }
  int rc = cmd_schema(cfg);
  if (rc != kExitOk) return rc;
  if ((rc = cmd_train(cfg)) != kExitOk) return rc;
  if ((rc = cmd_threshold(cfg)) != kExitOk) return rc;
  if ((rc = cmd_eval(cfg)) != kExitOk) return rc;
  if ((rc = cmd_baseline(cfg)) != kExitOk) return rc;
  return cmd_andrews(cfg, cfg.train_path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LSTM-autoencoder anomaly detection for NSL-KDD traffic"};
  app.require_subcommand(1);

  RunConfig cfg;

  // --config is applied before flag parsing so explicit flags win
  std::string config_path;
  for (int i = 1; i < argc - 1; ++i) {
    if (std::string(argv[i]) == "--config") config_path = argv[i + 1];
  }
  try {
    if (!config_path.empty()) config_from_json(config_path, cfg);
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }

  std::string encode_input, encode_out, andrews_input;

  auto add_common = [&](CLI::App* sub, bool with_train_opts) {
    sub->add_option("--config", config_path, "json config file; flags override it");
    sub->add_option("--out", cfg.out_dir, "output directory");
    sub->add_option("--schema", cfg.schema_path, "schema file (default <out>/schema.json)");
    sub->add_option("--attack-map", cfg.attack_map_path, "attack name -> class csv");
    sub->add_option("--seed", cfg.seed, "rng seed");
    sub->add_option("--threads", cfg.threads, "worker threads, 0 = hardware");
    if (with_train_opts) {
      sub->add_option("--epochs", cfg.epochs, "training epochs");
      sub->add_option("--batch-size", cfg.batch_size, "mini-batch size");
      sub->add_option("--learning-rate", cfg.learning_rate, "adam learning rate");
      sub->add_option("--validation-fraction", cfg.validation_fraction,
                      "fraction of normals held out for the validation curve");
    }
  };

  auto* schema_cmd = app.add_subcommand("schema", "learn the feature schema from a training file");
  schema_cmd->add_option("--train", cfg.train_path, "NSL-KDD training file");
  add_common(schema_cmd, false);

  auto* encode_cmd = app.add_subcommand("encode", "emit the encoded feature matrix for a file");
  encode_cmd->add_option("--input", encode_input, "NSL-KDD file to encode")->required();
  encode_cmd->add_option("--out-file", encode_out, "destination csv")->required();
  add_common(encode_cmd, false);

  auto* train_cmd = app.add_subcommand("train", "train the autoencoder on normal traffic");
  train_cmd->add_option("--train", cfg.train_path, "NSL-KDD training file");
  train_cmd->add_option("--model", cfg.model_path, "model file (default <out>/model.json)");
  add_common(train_cmd, true);

  auto* threshold_cmd =
      app.add_subcommand("threshold", "score training errors, sweep and select the threshold");
  threshold_cmd->add_option("--train", cfg.train_path, "NSL-KDD training file");
  threshold_cmd->add_option("--model", cfg.model_path, "model file (default <out>/model.json)");
  threshold_cmd->add_option("--grid-points", cfg.grid_points, "threshold grid size");
  threshold_cmd->add_option("--objective", cfg.objective, "selection objective (balanced)");
  add_common(threshold_cmd, false);

  auto* eval_cmd = app.add_subcommand("eval", "evaluate a frozen model + threshold on a test file");
  eval_cmd->add_option("--test", cfg.test_path, "NSL-KDD test file");
  eval_cmd->add_option("--train", cfg.train_path, "training file (for checksum metadata only)");
  eval_cmd->add_option("--model", cfg.model_path, "model file (default <out>/model.json)");
  eval_cmd->add_option("--threshold", cfg.threshold,
                       "decision threshold (default: <out>/threshold.json)");
  add_common(eval_cmd, false);

  auto* baseline_cmd =
      app.add_subcommand("baseline", "train and evaluate the naive bayes baseline");
  baseline_cmd->add_option("--train", cfg.train_path, "NSL-KDD training file");
  baseline_cmd->add_option("--test", cfg.test_path, "NSL-KDD test file");
  add_common(baseline_cmd, false);

  auto* andrews_cmd = app.add_subcommand("andrews", "emit andrews-curve samples for a file");
  andrews_cmd->add_option("--input", andrews_input, "NSL-KDD file")->required();
  andrews_cmd->add_option("--resolution", cfg.resolution, "points per curve");
  andrews_cmd->add_option("--max-rows", cfg.max_rows, "records to subsample");
  add_common(andrews_cmd, false);

  auto* run_cmd = app.add_subcommand(
      "run", "full pipeline: schema, train, threshold, eval, baseline, andrews");
  run_cmd->add_option("--train", cfg.train_path, "NSL-KDD training file");
  run_cmd->add_option("--test", cfg.test_path, "NSL-KDD test file");
  run_cmd->add_option("--model", cfg.model_path, "model file (default <out>/model.json)");
  run_cmd->add_option("--grid-points", cfg.grid_points, "threshold grid size");
  run_cmd->add_option("--objective", cfg.objective, "selection objective (balanced)");
  run_cmd->add_option("--threshold", cfg.threshold, "override the selected threshold");
  run_cmd->add_option("--resolution", cfg.resolution, "andrews points per curve");
  run_cmd->add_option("--max-rows", cfg.max_rows, "andrews records to subsample");
  add_common(run_cmd, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    fs::create_directories(cfg.out_dir);
    if (schema_cmd->parsed()) return cmd_schema(cfg);
    if (encode_cmd->parsed()) return cmd_encode(cfg, encode_input, encode_out);
    if (train_cmd->parsed()) return cmd_train(cfg);
    if (threshold_cmd->parsed()) return cmd_threshold(cfg);
    if (eval_cmd->parsed()) return cmd_eval(cfg);
    if (baseline_cmd->parsed()) return cmd_baseline(cfg);
    if (andrews_cmd->parsed()) return cmd_andrews(cfg, andrews_input);
    if (run_cmd->parsed()) return cmd_run(cfg);
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
