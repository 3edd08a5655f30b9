#include "netae/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "netae/checksum.hpp"
#include "netae/errors.hpp"

#include "json.hpp"

namespace netae {

using nlohmann::json;

void atomic_write_file(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
  }
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write file: " + tmp.string());
    out << content;
    if (!out) throw DataError("short write: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw DataError("cannot rename " + tmp.string() + " -> " + path + ": " + ec.message());
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw NumericError("format_double failed");
  return std::string(buf, ptr);
}

// --- schema ---

namespace {

json vocab_to_json(const std::vector<std::string>& vocab) { return json(vocab); }

void check_vocab(const std::vector<std::string>& vocab, const char* name) {
  if (!std::is_sorted(vocab.begin(), vocab.end())) {
    throw DataError(std::string("schema: ") + name + " vocabulary is not sorted");
  }
  if (std::adjacent_find(vocab.begin(), vocab.end()) != vocab.end()) {
    throw DataError(std::string("schema: ") + name + " vocabulary has duplicates");
  }
}

}  // namespace

std::string schema_to_json(const FeatureSchema& schema) {
  json doc;
  doc["format"] = "netae.schema";
  doc["version"] = 1;
  doc["numeric_count"] = kNumericFeatures;
  doc["numeric_min"] = schema.numeric_min;
  doc["numeric_max"] = schema.numeric_max;
  doc["protocol_vocab"] = vocab_to_json(schema.protocol_vocab);
  doc["service_vocab"] = vocab_to_json(schema.service_vocab);
  doc["flag_vocab"] = vocab_to_json(schema.flag_vocab);
  doc["encoded_dim"] = schema.encoded_dim();
  json classes;
  for (int c = 0; c < kClassCount; ++c) {
    classes[class_key(static_cast<TrafficClass>(c))] = c;
  }
  doc["class_index"] = classes;
  return doc.dump(2) + "\n";
}

FeatureSchema schema_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("schema: invalid json: ") + e.what());
  }
  if (doc.value("format", "") != "netae.schema" || doc.value("version", 0) != 1) {
    throw DataError("schema: unsupported format/version");
  }
  if (doc.value("numeric_count", -1) != kNumericFeatures) {
    throw DataError("schema: unexpected numeric_count");
  }
  FeatureSchema schema;
  const auto mins = doc.at("numeric_min").get<std::vector<double>>();
  const auto maxs = doc.at("numeric_max").get<std::vector<double>>();
  if (mins.size() != kNumericFeatures || maxs.size() != kNumericFeatures) {
    throw DataError("schema: numeric extrema arrays have wrong length");
  }
  std::copy(mins.begin(), mins.end(), schema.numeric_min.begin());
  std::copy(maxs.begin(), maxs.end(), schema.numeric_max.begin());
  for (int i = 0; i < kNumericFeatures; ++i) {
    if (schema.numeric_min[static_cast<std::size_t>(i)] > schema.numeric_max[static_cast<std::size_t>(i)]) {
      throw DataError("schema: numeric_min > numeric_max at column " + std::to_string(i));
    }
  }
  schema.protocol_vocab = doc.at("protocol_vocab").get<std::vector<std::string>>();
  schema.service_vocab = doc.at("service_vocab").get<std::vector<std::string>>();
  schema.flag_vocab = doc.at("flag_vocab").get<std::vector<std::string>>();
  check_vocab(schema.protocol_vocab, "protocol");
  check_vocab(schema.service_vocab, "service");
  check_vocab(schema.flag_vocab, "flag");
  if (doc.at("encoded_dim").get<int>() != schema.encoded_dim()) {
    throw DataError("schema: stored encoded_dim does not match vocabularies");
  }
  return schema;
}

void save_schema(const std::string& path, const FeatureSchema& schema) {
  atomic_write_file(path, schema_to_json(schema));
}

FeatureSchema load_schema(const std::string& path) { return schema_from_json(read_file(path)); }

std::string schema_checksum(const FeatureSchema& schema) {
  return hex_u64(fnv1a64(schema_to_json(schema)));
}

// --- model / checkpoint ---

namespace {

json gate_to_json(const GateParams& gate) {
  return json{{"w_x", gate.w_x.data}, {"w_h", gate.w_h.data}, {"b", gate.b}};
}

void gate_from_json(const json& doc, int hidden_dim, int input_dim, GateParams& gate) {
  gate.w_x.rows = hidden_dim;
  gate.w_x.cols = input_dim;
  gate.w_x.data = doc.at("w_x").get<std::vector<double>>();
  gate.w_h.rows = hidden_dim;
  gate.w_h.cols = hidden_dim;
  gate.w_h.data = doc.at("w_h").get<std::vector<double>>();
  gate.b = doc.at("b").get<std::vector<double>>();
  const auto hd = static_cast<std::size_t>(hidden_dim);
  if (gate.w_x.data.size() != hd * static_cast<std::size_t>(input_dim) ||
      gate.w_h.data.size() != hd * hd || gate.b.size() != hd) {
    throw DataError("model: gate tensor has wrong length");
  }
}

json layer_to_json(const LstmLayerParams& layer) {
  return json{{"input_dim", layer.input_dim},
              {"hidden_dim", layer.hidden_dim},
              {"gates",
               json{{"input", gate_to_json(layer.input)},
                    {"forget", gate_to_json(layer.forget)},
                    {"cell", gate_to_json(layer.cell)},
                    {"output", gate_to_json(layer.output)}}}};
}

void layer_from_json(const json& doc, LstmLayerParams& layer) {
  const int input_dim = doc.at("input_dim").get<int>();
  const int hidden_dim = doc.at("hidden_dim").get<int>();
  if (layer.input_dim != input_dim || layer.hidden_dim != hidden_dim) {
    throw DataError("model: layer dimensions do not match the declared shape");
  }
  const auto& gates = doc.at("gates");
  gate_from_json(gates.at("input"), hidden_dim, input_dim, layer.input);
  gate_from_json(gates.at("forget"), hidden_dim, input_dim, layer.forget);
  gate_from_json(gates.at("cell"), hidden_dim, input_dim, layer.cell);
  gate_from_json(gates.at("output"), hidden_dim, input_dim, layer.output);
}

std::vector<double> flatten_params(const ModelParams& params) {
  std::vector<double> flat;
  flat.reserve(param_count(params));
  for (const auto* t : tensor_list(params)) flat.insert(flat.end(), t->begin(), t->end());
  return flat;
}

void unflatten_params(const std::vector<double>& flat, ModelParams& params) {
  if (flat.size() != param_count(params)) {
    throw DataError("model: flat parameter array has wrong length");
  }
  std::size_t pos = 0;
  for (auto* t : tensor_list(params)) {
    std::copy(flat.begin() + static_cast<long>(pos), flat.begin() + static_cast<long>(pos + t->size()),
              t->begin());
    pos += t->size();
  }
}

}  // namespace

std::string checkpoint_to_json(const Checkpoint& ckpt) {
  json doc;
  doc["format"] = "netae.model";
  doc["version"] = 1;
  doc["schema_checksum"] = ckpt.schema_checksum;
  doc["shape"] = {{"input_dim", ckpt.params.shape.input_dim},
                  {"encoder_dims", ckpt.params.shape.encoder_dims}};
  doc["seed"] = ckpt.params.seed;
  json encoder = json::array();
  for (const auto& layer : ckpt.params.encoder) encoder.push_back(layer_to_json(layer));
  json decoder = json::array();
  for (const auto& layer : ckpt.params.decoder) decoder.push_back(layer_to_json(layer));
  doc["encoder"] = std::move(encoder);
  doc["decoder"] = std::move(decoder);
  doc["output"] = {{"w", ckpt.params.output.w.data}, {"b", ckpt.params.output.b}};
  if (ckpt.adam) {
    doc["adam"] = {{"t", ckpt.adam->t},
                   {"m", flatten_params(ckpt.adam->m)},
                   {"v", flatten_params(ckpt.adam->v)}};
  }
  if (ckpt.history) {
    json hist = json::array();
    for (const auto& e : *ckpt.history) hist.push_back({e.train_loss, e.validation_loss});
    doc["loss_history"] = std::move(hist);
  }
  return doc.dump(2) + "\n";
}

Checkpoint checkpoint_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("model: invalid json: ") + e.what());
  }
  if (doc.value("format", "") != "netae.model" || doc.value("version", 0) != 1) {
    throw DataError("model: unsupported format/version");
  }
  ModelShape shape;
  shape.input_dim = doc.at("shape").at("input_dim").get<int>();
  shape.encoder_dims = doc.at("shape").at("encoder_dims").get<std::vector<int>>();

  Checkpoint ckpt;
  ckpt.schema_checksum = doc.value("schema_checksum", "");
  ckpt.params = zero_params(shape);
  ckpt.params.seed = doc.value("seed", std::uint64_t{0});
  const auto& encoder = doc.at("encoder");
  const auto& decoder = doc.at("decoder");
  if (encoder.size() != ckpt.params.encoder.size() || decoder.size() != ckpt.params.decoder.size()) {
    throw DataError("model: layer count does not match the declared shape");
  }
  for (std::size_t l = 0; l < encoder.size(); ++l) {
    layer_from_json(encoder[l], ckpt.params.encoder[l]);
  }
  for (std::size_t l = 0; l < decoder.size(); ++l) {
    layer_from_json(decoder[l], ckpt.params.decoder[l]);
  }
  ckpt.params.output.w.data = doc.at("output").at("w").get<std::vector<double>>();
  ckpt.params.output.b = doc.at("output").at("b").get<std::vector<double>>();
  if (ckpt.params.output.w.data.size() !=
          static_cast<std::size_t>(ckpt.params.output.w.rows) * ckpt.params.output.w.cols ||
      ckpt.params.output.b.size() != static_cast<std::size_t>(shape.input_dim)) {
    throw DataError("model: output layer tensors have wrong length");
  }

  if (doc.contains("adam")) {
    AdamState adam = AdamState::init(ckpt.params);
    adam.t = doc.at("adam").at("t").get<long>();
    unflatten_params(doc.at("adam").at("m").get<std::vector<double>>(), adam.m);
    unflatten_params(doc.at("adam").at("v").get<std::vector<double>>(), adam.v);
    ckpt.adam = std::move(adam);
  }
  if (doc.contains("loss_history")) {
    LossHistory history;
    for (const auto& row : doc.at("loss_history")) {
      history.push_back({row.at(0).get<double>(), row.at(1).get<double>()});
    }
    ckpt.history = std::move(history);
  }
  return ckpt;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  atomic_write_file(path, checkpoint_to_json(ckpt));
}

Checkpoint load_checkpoint(const std::string& path, const std::string& expected_schema_checksum) {
  Checkpoint ckpt = checkpoint_from_json(read_file(path));
  if (!expected_schema_checksum.empty() && ckpt.schema_checksum != expected_schema_checksum) {
    throw DataError("model " + path + " was trained against a different schema (checksum " +
                    ckpt.schema_checksum + ", expected " + expected_schema_checksum + ")");
  }
  return ckpt;
}

// --- csv artifacts ---

void write_loss_csv(const std::string& path, const LossHistory& history) {
  std::string out = "epoch,train_loss,validation_loss\n";
  for (std::size_t e = 0; e < history.size(); ++e) {
    out += std::to_string(e + 1);
    out += ',';
    out += format_double(history[e].train_loss);
    out += ',';
    out += format_double(history[e].validation_loss);
    out += '\n';
  }
  atomic_write_file(path, out);
}

void write_errors_csv(const std::string& path, const std::vector<ErrorRecord>& errors) {
  std::string out = "sample_index,class,error\n";
  for (std::size_t i = 0; i < errors.size(); ++i) {
    out += std::to_string(i);
    out += ',';
    out += class_key(errors[i].cls);
    out += ',';
    out += format_double(errors[i].error);
    out += '\n';
  }
  atomic_write_file(path, out);
}

void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& sweep) {
  std::string out = "threshold,rate_normal,rate_dos,rate_probe,rate_r2l,rate_u2r\n";
  for (const auto& row : sweep) {
    out += format_double(row.threshold);
    for (int c = 0; c < kClassCount; ++c) {
      out += ',';
      out += format_double(row.rate[static_cast<std::size_t>(c)]);
    }
    out += '\n';
  }
  atomic_write_file(path, out);
}

void write_roc_csv(const std::string& path, const RocCurve& curve) {
  std::string out = "fpr,tpr\n";
  for (const auto& p : curve.points) {
    out += format_double(p.fpr);
    out += ',';
    out += format_double(p.tpr);
    out += '\n';
  }
  atomic_write_file(path, out);
}

void write_andrews_csv(const std::string& path, const std::vector<AndrewsSample>& samples) {
  std::string out = "t,value,class\n";
  for (const auto& s : samples) {
    out += format_double(s.t);
    out += ',';
    out += format_double(s.value);
    out += ',';
    out += class_key(s.cls);
    out += '\n';
  }
  atomic_write_file(path, out);
}

void write_encoded_csv(const std::string& path, const std::vector<EncodedSample>& samples) {
  std::string out;
  for (const auto& s : samples) {
    for (const double v : s.features) {
      out += format_double(v);
      out += ',';
    }
    out += std::to_string(static_cast<int>(s.cls));
    out += '\n';
  }
  atomic_write_file(path, out);
}

}  // namespace netae
