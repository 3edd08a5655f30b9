#include "netae/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>

#include "netae/errors.hpp"

namespace netae {

const char* class_key(TrafficClass c) {
  switch (c) {
    case TrafficClass::Normal: return "normal";
    case TrafficClass::Dos: return "dos";
    case TrafficClass::Probe: return "probe";
    case TrafficClass::R2L: return "r2l";
    case TrafficClass::U2R: return "u2r";
  }
  return "?";
}

const char* class_display(TrafficClass c) {
  switch (c) {
    case TrafficClass::Normal: return "Normal";
    case TrafficClass::Dos: return "DoS";
    case TrafficClass::Probe: return "Probe";
    case TrafficClass::R2L: return "R2L";
    case TrafficClass::U2R: return "U2R";
  }
  return "?";
}

TrafficClass class_from_key(const std::string& key) {
  for (int i = 0; i < kClassCount; ++i) {
    auto c = static_cast<TrafficClass>(i);
    if (key == class_key(c)) return c;
  }
  throw DataError("unknown traffic class key: " + key);
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_numeric_field(const std::string& field, std::size_t line_no, int column) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw DataError("line " + std::to_string(line_no) + ": field " + std::to_string(column + 1) +
                    " ('" + field + "') is not a finite number");
  }
  return value;
}

}  // namespace

RawRecord parse_nslkdd_line(const std::string& line, std::size_t line_no) {
  const auto fields = split_csv(line);
  if (fields.size() != kFieldsPerRow) {
    throw DataError("line " + std::to_string(line_no) + ": expected " +
                    std::to_string(kFieldsPerRow) + " fields, got " +
                    std::to_string(fields.size()));
  }
  RawRecord rec;
  rec.numeric[0] = parse_numeric_field(fields[0], line_no, 0);
  rec.protocol = fields[1];
  rec.service = fields[2];
  rec.flag = fields[3];
  for (int i = 4; i <= 40; ++i) {
    rec.numeric[static_cast<std::size_t>(i - 3)] = parse_numeric_field(fields[i], line_no, i);
  }
  rec.attack_name = fields[41];
  if (rec.attack_name.empty()) {
    throw DataError("line " + std::to_string(line_no) + ": empty attack label");
  }
  rec.difficulty = static_cast<int>(parse_numeric_field(fields[42], line_no, 42));
  return rec;
}

std::vector<RawRecord> parse_nslkdd(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset file: " + path);
  std::vector<RawRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    records.push_back(parse_nslkdd_line(line, line_no));
  }
  if (records.empty()) throw DataError("empty dataset file: " + path);
  return records;
}

AttackClassMap AttackClassMap::builtin() {
  // NSL-KDD label table: the 22 training attacks plus the 17 that appear only
  // in KDDTest+, grouped into the four attack families.
  static const std::pair<const char*, TrafficClass> kTable[] = {
      {"normal", TrafficClass::Normal},
      // dos
      {"apache2", TrafficClass::Dos},
      {"back", TrafficClass::Dos},
      {"land", TrafficClass::Dos},
      {"mailbomb", TrafficClass::Dos},
      {"neptune", TrafficClass::Dos},
      {"pod", TrafficClass::Dos},
      {"processtable", TrafficClass::Dos},
      {"smurf", TrafficClass::Dos},
      {"teardrop", TrafficClass::Dos},
      {"udpstorm", TrafficClass::Dos},
      {"worm", TrafficClass::Dos},
      // probe
      {"ipsweep", TrafficClass::Probe},
      {"mscan", TrafficClass::Probe},
      {"nmap", TrafficClass::Probe},
      {"portsweep", TrafficClass::Probe},
      {"saint", TrafficClass::Probe},
      {"satan", TrafficClass::Probe},
      // r2l
      {"ftp_write", TrafficClass::R2L},
      {"guess_passwd", TrafficClass::R2L},
      {"httptunnel", TrafficClass::R2L},
      {"imap", TrafficClass::R2L},
      {"multihop", TrafficClass::R2L},
      {"named", TrafficClass::R2L},
      {"phf", TrafficClass::R2L},
      {"sendmail", TrafficClass::R2L},
      {"snmpgetattack", TrafficClass::R2L},
      {"snmpguess", TrafficClass::R2L},
      {"spy", TrafficClass::R2L},
      {"warezclient", TrafficClass::R2L},
      {"warezmaster", TrafficClass::R2L},
      {"xlock", TrafficClass::R2L},
      {"xsnoop", TrafficClass::R2L},
      // u2r
      {"buffer_overflow", TrafficClass::U2R},
      {"loadmodule", TrafficClass::U2R},
      {"perl", TrafficClass::U2R},
      {"ps", TrafficClass::U2R},
      {"rootkit", TrafficClass::U2R},
      {"sqlattack", TrafficClass::U2R},
      {"xterm", TrafficClass::U2R},
  };
  AttackClassMap map;
  for (const auto& [name, cls] : kTable) map.table_.emplace(name, cls);
  return map;
}

AttackClassMap AttackClassMap::from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open attack class map: " + path);
  AttackClassMap map;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw DataError("attack class map line " + std::to_string(line_no) +
                      ": expected 'name,class'");
    }
    const std::string name = line.substr(0, comma);
    const std::string cls = line.substr(comma + 1);
    if (!map.table_.emplace(name, class_from_key(cls)).second) {
      throw DataError("attack class map line " + std::to_string(line_no) + ": duplicate name '" +
                      name + "'");
    }
  }
  if (map.table_.empty()) throw DataError("empty attack class map: " + path);
  return map;
}

TrafficClass AttackClassMap::classify(const std::string& attack_name) const {
  auto it = table_.find(attack_name);
  if (it != table_.end()) return it->second;
  unknown_count_.fetch_add(1, std::memory_order_relaxed);
  return unknown_class;
}

TrafficClass map_attack_label(const std::string& attack_name, const AttackClassMap& map) {
  if (attack_name.empty()) throw DataError("map_attack_label: empty attack name");
  return map.classify(attack_name);
}

FeatureSchema build_schema(const std::vector<RawRecord>& train) {
  if (train.empty()) throw DataError("build_schema: empty training split");
  std::set<std::string> protocols, services, flags;
  FeatureSchema schema;
  schema.numeric_min = train.front().numeric;
  schema.numeric_max = train.front().numeric;
  for (const auto& rec : train) {
    protocols.insert(rec.protocol);
    services.insert(rec.service);
    flags.insert(rec.flag);
    for (int i = 0; i < kNumericFeatures; ++i) {
      schema.numeric_min[static_cast<std::size_t>(i)] =
          std::min(schema.numeric_min[static_cast<std::size_t>(i)], rec.numeric[static_cast<std::size_t>(i)]);
      schema.numeric_max[static_cast<std::size_t>(i)] =
          std::max(schema.numeric_max[static_cast<std::size_t>(i)], rec.numeric[static_cast<std::size_t>(i)]);
    }
  }
  schema.protocol_vocab.assign(protocols.begin(), protocols.end());
  schema.service_vocab.assign(services.begin(), services.end());
  schema.flag_vocab.assign(flags.begin(), flags.end());
  return schema;
}

namespace {

void one_hot(const std::string& token, const std::vector<std::string>& vocab, double* block) {
  // sorted vocabulary; token absent (unseen at test time) leaves the block all zero
  auto it = std::lower_bound(vocab.begin(), vocab.end(), token);
  if (it != vocab.end() && *it == token) {
    block[std::distance(vocab.begin(), it)] = 1.0;
  }
}

}  // namespace

EncodedSample encode(const RawRecord& record, const FeatureSchema& schema,
                     const AttackClassMap& map) {
  EncodedSample sample;
  sample.features.assign(static_cast<std::size_t>(schema.encoded_dim()), 0.0);
  for (int i = 0; i < kNumericFeatures; ++i) {
    const double lo = schema.numeric_min[static_cast<std::size_t>(i)];
    const double hi = schema.numeric_max[static_cast<std::size_t>(i)];
    double scaled = 0.0;
    if (hi > lo) {
      scaled = (record.numeric[static_cast<std::size_t>(i)] - lo) / (hi - lo);
      // test-time values outside the training range are clamped
      scaled = std::clamp(scaled, 0.0, 1.0);
    }
    sample.features[static_cast<std::size_t>(i)] = scaled;
  }
  one_hot(record.protocol, schema.protocol_vocab, sample.features.data() + schema.protocol_offset());
  one_hot(record.service, schema.service_vocab, sample.features.data() + schema.service_offset());
  one_hot(record.flag, schema.flag_vocab, sample.features.data() + schema.flag_offset());
  sample.cls = map.classify(record.attack_name);
  return sample;
}

std::vector<EncodedSample> encode_all(const std::vector<RawRecord>& records,
                                      const FeatureSchema& schema, const AttackClassMap& map) {
  std::vector<EncodedSample> out;
  out.reserve(records.size());
  for (const auto& rec : records) out.push_back(encode(rec, schema, map));
  return out;
}

}  // namespace netae
