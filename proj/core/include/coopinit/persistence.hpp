#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "coopinit/errors.hpp"
#include "coopinit/nn.hpp"
#include "coopinit/stage.hpp"

namespace coopinit {

// One metric row of a training run.
struct RunRecord {
  std::uint64_t consumed = 0;
  std::string stage;
  double d_loss = 0.0;
  double g_loss = 0.0;
  int modes_covered = 0;
  double hq_fraction = 0.0;
  double energy_distance = 0.0;
  std::uint64_t wall_ms = 0;
};

inline constexpr const char* kMetricsCsvHeader =
    "consumed,stage,d_loss,g_loss,modes_covered,hq_fraction,energy_distance,"
    "wall_ms";

// Real-valued fields are rendered with 9 significant digits.
std::string to_csv_row(const RunRecord& r);
RunRecord parse_csv_row(const std::string& line);

// Append-only sink; rows must be strictly increasing in `consumed`.
class MetricSink {
 public:
  virtual ~MetricSink() = default;
  void append(const RunRecord& r);
  std::uint64_t last_consumed() const { return last_consumed_; }

 protected:
  virtual void write(const RunRecord& r) = 0;

 private:
  bool any_ = false;
  std::uint64_t last_consumed_ = 0;
};

class CsvMetricSink : public MetricSink {
 public:
  explicit CsvMetricSink(const std::filesystem::path& path);

 protected:
  void write(const RunRecord& r) override;

 private:
  std::ofstream out_;
  bool header_written_ = false;
};

class MemoryMetricSink : public MetricSink {
 public:
  const std::vector<RunRecord>& rows() const { return rows_; }

 protected:
  void write(const RunRecord& r) override { rows_.push_back(r); }

 private:
  std::vector<RunRecord> rows_;
};

std::vector<RunRecord> read_metrics_csv(const std::filesystem::path& path);

// Full training state blob. Round trips bitwise: loading a checkpoint and
// continuing a run reproduces the uninterrupted run exactly.
struct Checkpoint {
  std::uint32_t format_version = 1;
  std::string config_text;  // canonical run-config JSON
  Eigen::VectorXd theta;
  Eigen::VectorXd phi;
  AdamState adam_d;
  AdamState adam_g;
  std::uint64_t consumed = 0;
  TrainStage stage = TrainStage::kCooperative;
  std::string rng_state;
};

inline constexpr std::uint32_t kCheckpointFormatVersion = 1;

// Binary format: magic, u32 version, then length-prefixed sections with
// doubles stored as little-endian IEEE-754.
void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace coopinit
