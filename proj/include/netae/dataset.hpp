#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "netae/linalg.hpp"

namespace netae {

// NSL-KDD rows carry 41 features: 38 numeric plus protocol_type, service and
// flag at columns 2..4, followed by the attack name and a difficulty score.
inline constexpr int kNumericFeatures = 38;
inline constexpr int kFieldsPerRow = 43;

enum class TrafficClass { Normal = 0, Dos = 1, Probe = 2, R2L = 3, U2R = 4 };
inline constexpr int kClassCount = 5;

inline bool is_attack(TrafficClass c) { return c != TrafficClass::Normal; }

// stable lowercase names used in CSV/JSON artifacts: normal dos probe r2l u2r
const char* class_key(TrafficClass c);
// display names matching the usual NSL-KDD tables: Normal DoS Probe R2L U2R
const char* class_display(TrafficClass c);
TrafficClass class_from_key(const std::string& key);

struct RawRecord {
  std::array<double, kNumericFeatures> numeric{};  // file order, duration first
  std::string protocol;
  std::string service;
  std::string flag;
  std::string attack_name;
  int difficulty = 0;  // parsed, never used downstream
};

// strict parser: exactly 43 comma-separated fields per row, finite numerics,
// errors name the offending 1-based line
std::vector<RawRecord> parse_nslkdd(const std::string& path);
RawRecord parse_nslkdd_line(const std::string& line, std::size_t line_no);

// attack-name -> traffic-class table. The canonical table ships with the repo
// as data/attack_classes.csv; builtin() is a compiled-in copy of the same
// table so the library works without file plumbing. Names not in the table
// are counted and mapped to `unknown_class` (they are attacks by construction:
// only "normal" labels normal traffic).
class AttackClassMap {
 public:
  static AttackClassMap builtin();
  static AttackClassMap from_csv(const std::string& path);

  TrafficClass classify(const std::string& attack_name) const;

  const std::map<std::string, TrafficClass>& table() const { return table_; }
  std::uint64_t unknown_count() const { return unknown_count_.load(); }
  void reset_unknown_count() { unknown_count_.store(0); }

  TrafficClass unknown_class = TrafficClass::Dos;

  AttackClassMap(const AttackClassMap& other)
      : unknown_class(other.unknown_class), table_(other.table_), unknown_count_(0) {}
  AttackClassMap& operator=(const AttackClassMap& other) {
    unknown_class = other.unknown_class;
    table_ = other.table_;
    return *this;
  }

 private:
  AttackClassMap() = default;
  std::map<std::string, TrafficClass> table_;
  mutable std::atomic<std::uint64_t> unknown_count_{0};
};

TrafficClass map_attack_label(const std::string& attack_name, const AttackClassMap& map);

// categorical vocabularies and numeric extrema learned from the training split
struct FeatureSchema {
  std::vector<std::string> protocol_vocab;  // sorted, duplicate-free
  std::vector<std::string> service_vocab;
  std::vector<std::string> flag_vocab;
  std::array<double, kNumericFeatures> numeric_min{};
  std::array<double, kNumericFeatures> numeric_max{};

  int encoded_dim() const {
    return kNumericFeatures + static_cast<int>(protocol_vocab.size() + service_vocab.size() +
                                               flag_vocab.size());
  }

  // encoded layout: [numeric 0..37][protocol][service][flag]
  int protocol_offset() const { return kNumericFeatures; }
  int service_offset() const { return protocol_offset() + static_cast<int>(protocol_vocab.size()); }
  int flag_offset() const { return service_offset() + static_cast<int>(service_vocab.size()); }

  bool operator==(const FeatureSchema&) const = default;
};

FeatureSchema build_schema(const std::vector<RawRecord>& train);

struct EncodedSample {
  Vector features;  // encoded_dim components, each in [0,1]
  TrafficClass cls = TrafficClass::Normal;
};

EncodedSample encode(const RawRecord& record, const FeatureSchema& schema,
                     const AttackClassMap& map);
std::vector<EncodedSample> encode_all(const std::vector<RawRecord>& records,
                                      const FeatureSchema& schema, const AttackClassMap& map);

}  // namespace netae
