#pragma once

#include <optional>
#include <string>
#include <vector>

#include "netae/andrews.hpp"
#include "netae/dataset.hpp"
#include "netae/detector.hpp"
#include "netae/evaluation.hpp"
#include "netae/model.hpp"
#include "netae/trainer.hpp"

namespace netae {

// write-temp-then-rename so readers never observe a partial file
void atomic_write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

// --- schema, versioned json ---
std::string schema_to_json(const FeatureSchema& schema);
FeatureSchema schema_from_json(const std::string& text);
void save_schema(const std::string& path, const FeatureSchema& schema);
FeatureSchema load_schema(const std::string& path);

// checksum stamped into model files so model/schema mismatches are caught at load
std::string schema_checksum(const FeatureSchema& schema);

// --- model / checkpoint, versioned json ---
// adam state and loss history are optional sections of the same document
struct Checkpoint {
  ModelParams params;
  std::string schema_checksum;
  std::optional<AdamState> adam;
  std::optional<LossHistory> history;
};

std::string checkpoint_to_json(const Checkpoint& ckpt);
Checkpoint checkpoint_from_json(const std::string& text);
void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
// expected_schema_checksum, when non-empty, must match the stored one
Checkpoint load_checkpoint(const std::string& path, const std::string& expected_schema_checksum = "");

// --- csv artifacts ---
void write_loss_csv(const std::string& path, const LossHistory& history);
void write_errors_csv(const std::string& path, const std::vector<ErrorRecord>& errors);
void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& sweep);
void write_roc_csv(const std::string& path, const RocCurve& curve);
void write_andrews_csv(const std::string& path, const std::vector<AndrewsSample>& samples);
void write_encoded_csv(const std::string& path, const std::vector<EncodedSample>& samples);

std::string format_double(double v);  // shortest round-trip decimal form

}  // namespace netae
