#include "coopinit/persistence.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <sstream>

namespace coopinit {

namespace {

std::string fmt9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace

std::string to_csv_row(const RunRecord& r) {
  std::ostringstream os;
  os << r.consumed << ',' << r.stage << ',' << fmt9(r.d_loss) << ','
     << fmt9(r.g_loss) << ',' << r.modes_covered << ',' << fmt9(r.hq_fraction)
     << ',' << fmt9(r.energy_distance) << ',' << r.wall_ms;
  return os.str();
}

RunRecord parse_csv_row(const std::string& line) {
  const std::vector<std::string> f = split_csv(line);
  if (f.size() != 8) {
    throw FormatError("metrics row has " + std::to_string(f.size()) +
                      " fields, expected 8: " + line);
  }
  RunRecord r;
  try {
    r.consumed = std::stoull(f[0]);
    r.stage = f[1];
    r.d_loss = std::stod(f[2]);
    r.g_loss = std::stod(f[3]);
    r.modes_covered = std::stoi(f[4]);
    r.hq_fraction = std::stod(f[5]);
    r.energy_distance = std::stod(f[6]);
    r.wall_ms = std::stoull(f[7]);
  } catch (const std::exception&) {
    throw FormatError("unparseable metrics row: " + line);
  }
  return r;
}

void MetricSink::append(const RunRecord& r) {
  if (any_ && r.consumed <= last_consumed_) {
    throw ContractError("MetricSink: consumed must be strictly increasing (" +
                        std::to_string(r.consumed) + " after " +
                        std::to_string(last_consumed_) + ")");
  }
  write(r);
  any_ = true;
  last_consumed_ = r.consumed;
}

CsvMetricSink::CsvMetricSink(const std::filesystem::path& path)
    : out_(path, std::ios::out | std::ios::trunc) {
  if (!out_) {
    throw FormatError("CsvMetricSink: cannot open " + path.string());
  }
}

void CsvMetricSink::write(const RunRecord& r) {
  if (!header_written_) {
    out_ << kMetricsCsvHeader << '\n';
    header_written_ = true;
  }
  out_ << to_csv_row(r) << '\n';
  out_.flush();
}

std::vector<RunRecord> read_metrics_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open metrics file " + path.string());
  std::string line;
  if (!std::getline(in, line)) {
    throw FormatError("empty metrics file " + path.string());
  }
  if (line != kMetricsCsvHeader) {
    throw FormatError("unexpected metrics header: " + line);
  }
  std::vector<RunRecord> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    rows.push_back(parse_csv_row(line));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Checkpoint binary encoding.

namespace {

constexpr char kMagic[8] = {'C', 'O', 'O', 'P', 'C', 'K', 'P', 'T'};

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(char((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(char((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double v) {
  put_u64(out, std::bit_cast<std::uint64_t>(v));
}

void put_bytes(std::string& out, const std::string& bytes) {
  put_u64(out, bytes.size());
  out += bytes;
}

void put_vec(std::string& out, const Eigen::VectorXd& v) {
  put_u64(out, static_cast<std::uint64_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) put_f64(out, v[i]);
}

void put_adam(std::string& out, const AdamState& a) {
  put_vec(out, a.m);
  put_vec(out, a.v);
  put_u64(out, static_cast<std::uint64_t>(a.step_count));
  put_f64(out, a.lr);
  put_f64(out, a.beta1);
  put_f64(out, a.beta2);
  put_f64(out, a.eps);
}

class Reader {
 public:
  Reader(const std::string& data, std::string origin)
      : data_(data), origin_(std::move(origin)) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= std::uint32_t(std::uint8_t(data_[pos_ + i])) << (8 * i);
    }
    pos_ += 4;
    return v;
  }

  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= std::uint64_t(std::uint8_t(data_[pos_ + i])) << (8 * i);
    }
    pos_ += 8;
    return v;
  }

  double f64() { return std::bit_cast<double>(u64()); }

  std::string bytes() {
    const std::uint64_t len = u64();
    need(len);
    std::string s = data_.substr(pos_, len);
    pos_ += len;
    return s;
  }

  Eigen::VectorXd vec() {
    const std::uint64_t len = u64();
    need(len * 8);
    Eigen::VectorXd v(static_cast<Eigen::Index>(len));
    for (std::uint64_t i = 0; i < len; ++i) v[static_cast<Eigen::Index>(i)] = f64();
    return v;
  }

  AdamState adam() {
    AdamState a;
    a.m = vec();
    a.v = vec();
    a.step_count = static_cast<std::int64_t>(u64());
    a.lr = f64();
    a.beta1 = f64();
    a.beta2 = f64();
    a.eps = f64();
    return a;
  }

  void raw(char* dst, std::size_t n) {
    need(n);
    std::memcpy(dst, data_.data() + pos_, n);
    pos_ += n;
  }

  bool exhausted() const { return pos_ == data_.size(); }

 private:
  void need(std::uint64_t n) const {
    if (pos_ + n > data_.size()) {
      throw FormatError("corrupt checkpoint (truncated or bad length prefix): " +
                        origin_);
    }
  }

  const std::string& data_;
  std::string origin_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_checkpoint(const Checkpoint& ckpt,
                     const std::filesystem::path& path) {
  std::string out;
  out.append(kMagic, sizeof kMagic);
  put_u32(out, ckpt.format_version);
  put_bytes(out, ckpt.config_text);
  put_vec(out, ckpt.theta);
  put_vec(out, ckpt.phi);
  put_adam(out, ckpt.adam_d);
  put_adam(out, ckpt.adam_g);
  put_u64(out, ckpt.consumed);
  out.push_back(char(static_cast<std::uint8_t>(ckpt.stage)));
  put_bytes(out, ckpt.rng_state);

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw FormatError("cannot open checkpoint for writing: " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw FormatError("write failed for checkpoint: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw FormatError("cannot open checkpoint: " + path.string());
  std::ostringstream buf;
  buf << f.rdbuf();
  const std::string data = buf.str();

  Reader r(data, path.string());
  char magic[8];
  r.raw(magic, sizeof magic);
  if (std::memcmp(magic, kMagic, sizeof magic) != 0) {
    throw FormatError("not a checkpoint file: " + path.string());
  }
  Checkpoint ckpt;
  ckpt.format_version = r.u32();
  if (ckpt.format_version != kCheckpointFormatVersion) {
    throw FormatError("unsupported checkpoint version " +
                      std::to_string(ckpt.format_version) + " (expected " +
                      std::to_string(kCheckpointFormatVersion) + ")");
  }
  ckpt.config_text = r.bytes();
  ckpt.theta = r.vec();
  ckpt.phi = r.vec();
  ckpt.adam_d = r.adam();
  ckpt.adam_g = r.adam();
  ckpt.consumed = r.u64();
  char stage_byte;
  r.raw(&stage_byte, 1);
  if (std::uint8_t(stage_byte) > 2) {
    throw FormatError("corrupt checkpoint stage byte: " + path.string());
  }
  ckpt.stage = static_cast<TrainStage>(std::uint8_t(stage_byte));
  ckpt.rng_state = r.bytes();
  if (!r.exhausted()) {
    throw FormatError("trailing bytes in checkpoint: " + path.string());
  }
  return ckpt;
}

}  // namespace coopinit
