// python bindings for the main pipeline operations

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "netae/andrews.hpp"
#include "netae/dataset.hpp"
#include "netae/detector.hpp"
#include "netae/errors.hpp"
#include "netae/evaluation.hpp"
#include "netae/io.hpp"
#include "netae/model.hpp"
#include "netae/naive_bayes.hpp"
#include "netae/trainer.hpp"

namespace py = pybind11;
using namespace netae;

PYBIND11_MODULE(_core, m) {
  m.doc() = "LSTM-autoencoder anomaly detection for NSL-KDD traffic";

  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  py::enum_<TrafficClass>(m, "TrafficClass")
      .value("NORMAL", TrafficClass::Normal)
      .value("DOS", TrafficClass::Dos)
      .value("PROBE", TrafficClass::Probe)
      .value("R2L", TrafficClass::R2L)
      .value("U2R", TrafficClass::U2R);
  m.def("is_attack", &is_attack, py::arg("cls"));
  m.def("class_key", &class_key, py::arg("cls"));

  py::class_<RawRecord>(m, "RawRecord")
      .def_readonly("numeric", &RawRecord::numeric)
      .def_readonly("protocol", &RawRecord::protocol)
      .def_readonly("service", &RawRecord::service)
      .def_readonly("flag", &RawRecord::flag)
      .def_readonly("attack_name", &RawRecord::attack_name)
      .def_readonly("difficulty", &RawRecord::difficulty);

  m.def("parse_nslkdd", &parse_nslkdd, py::arg("path"),
        "parse an NSL-KDD csv file into records");

  py::class_<AttackClassMap>(m, "AttackClassMap")
      .def_static("builtin", &AttackClassMap::builtin)
      .def_static("from_csv", &AttackClassMap::from_csv, py::arg("path"))
      .def("classify", &AttackClassMap::classify, py::arg("attack_name"))
      .def_property_readonly("unknown_count", &AttackClassMap::unknown_count);

  py::class_<FeatureSchema>(m, "FeatureSchema")
      .def_readonly("protocol_vocab", &FeatureSchema::protocol_vocab)
      .def_readonly("service_vocab", &FeatureSchema::service_vocab)
      .def_readonly("flag_vocab", &FeatureSchema::flag_vocab)
      .def_property_readonly("numeric_min",
                             [](const FeatureSchema& s) {
                               return std::vector<double>(s.numeric_min.begin(), s.numeric_min.end());
                             })
      .def_property_readonly("numeric_max",
                             [](const FeatureSchema& s) {
                               return std::vector<double>(s.numeric_max.begin(), s.numeric_max.end());
                             })
      .def_property_readonly("encoded_dim", &FeatureSchema::encoded_dim);

  m.def("build_schema", &build_schema, py::arg("train_records"));
  m.def("save_schema", &save_schema, py::arg("path"), py::arg("schema"));
  m.def("load_schema", &load_schema, py::arg("path"));

  py::class_<EncodedSample>(m, "EncodedSample")
      .def(py::init([](Vector features, TrafficClass cls) {
             return EncodedSample{std::move(features), cls};
           }),
           py::arg("features"), py::arg("cls") = TrafficClass::Normal)
      .def_readonly("features", &EncodedSample::features)
      .def_readonly("cls", &EncodedSample::cls);

  m.def("encode", &encode, py::arg("record"), py::arg("schema"), py::arg("attack_map"));
  m.def("encode_all", &encode_all, py::arg("records"), py::arg("schema"), py::arg("attack_map"));

  py::class_<ModelShape>(m, "ModelShape")
      .def(py::init([](int input_dim, std::vector<int> encoder_dims) {
             return ModelShape{input_dim, std::move(encoder_dims)};
           }),
           py::arg("input_dim"), py::arg("encoder_dims"))
      .def_static("standard", &ModelShape::standard)
      .def_readonly("input_dim", &ModelShape::input_dim)
      .def_readonly("encoder_dims", &ModelShape::encoder_dims);

  py::class_<ModelParams>(m, "ModelParams")
      .def_readonly("shape", &ModelParams::shape)
      .def_readonly("seed", &ModelParams::seed)
      .def("__eq__", [](const ModelParams& a, const ModelParams& b) { return a == b; });

  m.def("init_params", &init_params, py::arg("shape"), py::arg("seed"));
  m.def(
      "forward",
      [](const Vector& x, const ModelParams& params) {
        const auto out = forward(x, params);
        return py::make_tuple(out.x_hat, out.z);
      },
      py::arg("x"), py::arg("params"), "returns (x_hat, z)");
  m.def("save_model",
        [](const std::string& path, const ModelParams& params, const std::string& schema_ck) {
          save_checkpoint(path, Checkpoint{params, schema_ck, std::nullopt, std::nullopt});
        },
        py::arg("path"), py::arg("params"), py::arg("schema_checksum") = "");
  m.def("load_model",
        [](const std::string& path, const std::string& expected_ck) {
          return load_checkpoint(path, expected_ck).params;
        },
        py::arg("path"), py::arg("expected_schema_checksum") = "");
  m.def("schema_checksum", &schema_checksum, py::arg("schema"));

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("learning_rate", &TrainConfig::learning_rate)
      .def_readwrite("batch_size", &TrainConfig::batch_size)
      .def_readwrite("epochs", &TrainConfig::epochs)
      .def_readwrite("validation_fraction", &TrainConfig::validation_fraction)
      .def_readwrite("seed", &TrainConfig::seed)
      .def_readwrite("adam_beta1", &TrainConfig::adam_beta1)
      .def_readwrite("adam_beta2", &TrainConfig::adam_beta2)
      .def_readwrite("adam_epsilon", &TrainConfig::adam_epsilon)
      .def_readwrite("threads", &TrainConfig::threads);

  m.def(
      "train",
      [](const std::vector<EncodedSample>& normals, const TrainConfig& cfg,
         const ModelShape& shape) {
        const auto result = train(normals, cfg, shape);
        std::vector<std::pair<double, double>> history;
        for (const auto& e : result.history) history.emplace_back(e.train_loss, e.validation_loss);
        return py::make_tuple(result.params, history);
      },
      py::arg("normal_samples"), py::arg("config") = TrainConfig{},
      py::arg("shape") = ModelShape::standard(),
      "train on normal traffic, returns (params, [(train_loss, val_loss), ...])");

  py::class_<ErrorRecord>(m, "ErrorRecord")
      .def(py::init([](double error, TrafficClass cls) { return ErrorRecord{error, cls}; }),
           py::arg("error"), py::arg("cls"))
      .def_readonly("error", &ErrorRecord::error)
      .def_readonly("cls", &ErrorRecord::cls);

  m.def("reconstruction_error", &reconstruction_error, py::arg("model"), py::arg("sample"));
  m.def("score_all", &score_all, py::arg("model"), py::arg("samples"), py::arg("threads") = 0);
  m.def("classify",
        [](double error, double threshold) {
          return classify(error, threshold) == Binary::Attack ? "attack" : "normal";
        },
        py::arg("error"), py::arg("threshold"));
  m.def("mse", &mse, py::arg("a"), py::arg("b"));
  m.def("default_grid", &default_grid, py::arg("errors"), py::arg("points") = 512);
  m.def("sweep_thresholds",
        [](const std::vector<ErrorRecord>& errors, const std::vector<double>& grid) {
          py::list out;
          for (const auto& row : sweep_thresholds(errors, grid)) {
            py::dict entry;
            entry["threshold"] = row.threshold;
            for (int c = 0; c < kClassCount; ++c) {
              entry[class_key(static_cast<TrafficClass>(c))] =
                  row.rate[static_cast<std::size_t>(c)];
            }
            out.append(entry);
          }
          return out;
        },
        py::arg("errors"), py::arg("grid"));
  m.def("select_threshold",
        [](const std::vector<ErrorRecord>& errors, const std::vector<double>& grid) {
          return select_threshold(errors, grid);
        },
        py::arg("train_errors"), py::arg("grid"));
  m.def("detection_rates",
        [](const std::vector<ErrorRecord>& errors, double threshold) {
          const auto rates = detection_rates(errors, threshold);
          py::dict out;
          for (int c = 0; c < kClassCount; ++c) {
            out[class_key(static_cast<TrafficClass>(c))] = rates[static_cast<std::size_t>(c)];
          }
          return out;
        },
        py::arg("errors"), py::arg("threshold"));

  m.def(
      "evaluate",
      [](const std::vector<ErrorRecord>& errors, double threshold) {
        std::vector<Binary> predictions;
        std::vector<TrafficClass> truth;
        for (const auto& rec : errors) {
          predictions.push_back(classify(rec.error, threshold));
          truth.push_back(rec.cls);
        }
        const auto cm = confusion(predictions, truth);
        const auto met = metrics(cm);
        py::dict out;
        out["tp"] = cm.tp;
        out["tn"] = cm.tn;
        out["fp"] = cm.fp;
        out["fn"] = cm.fn;
        out["precision"] = met.precision;
        out["recall"] = met.recall;
        out["f_score"] = met.f_score;
        out["accuracy"] = met.accuracy;
        out["auc"] = auc(roc_curve(errors));
        return out;
      },
      py::arg("errors"), py::arg("threshold"),
      "confusion counts, precision/recall/f/accuracy and auc at one threshold");

  m.def("roc_curve",
        [](const std::vector<ErrorRecord>& errors) {
          const auto curve = roc_curve(errors);
          std::vector<std::pair<double, double>> points;
          for (const auto& p : curve.points) points.emplace_back(p.fpr, p.tpr);
          return points;
        },
        py::arg("errors"));
  m.def("auc",
        [](const std::vector<std::pair<double, double>>& points) {
          RocCurve curve;
          for (const auto& [fpr, tpr] : points) curve.points.push_back({fpr, tpr});
          return auc(curve);
        },
        py::arg("points"));

  py::class_<NaiveBayesModel>(m, "NaiveBayesModel")
      .def_readonly("numeric_dim", &NaiveBayesModel::numeric_dim)
      .def_readonly("prior", &NaiveBayesModel::prior);
  m.def("nb_train", &nb_train, py::arg("samples"), py::arg("numeric_dim") = kNumericFeatures,
        py::arg("variance_floor") = 1e-9);
  m.def("nb_predict",
        [](const NaiveBayesModel& model, const EncodedSample& sample) {
          return nb_predict(model, sample) == Binary::Attack ? "attack" : "normal";
        },
        py::arg("model"), py::arg("sample"));

  m.def("andrews_value", &andrews_value, py::arg("features"), py::arg("t"));
  m.def("andrews_samples",
        [](const std::vector<EncodedSample>& samples, int resolution, int max_rows,
           std::uint64_t seed) {
          std::vector<std::tuple<double, double, TrafficClass>> out;
          for (const auto& s : andrews_samples(samples, resolution, max_rows, seed)) {
            out.emplace_back(s.t, s.value, s.cls);
          }
          return out;
        },
        py::arg("samples"), py::arg("resolution") = 101, py::arg("max_rows") = 500,
        py::arg("seed") = 1);
}
