#include "sparsetree/records.hpp"

#include <fstream>
#include <iomanip>
#include <stdexcept>

namespace sparsetree {

RecordWriter::RecordWriter(std::ostream& out, nlohmann::json config)
    : out_(out), config_(std::move(config)) {}

void RecordWriter::write(std::string_view record_type, nlohmann::json payload) {
  nlohmann::json record;
  record["record_type"] = std::string(record_type);
  record["config"] = config_;
  record["payload"] = std::move(payload);
  out_ << record.dump() << '\n';
  ++written_;
}

void CsvTable::write(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n' << std::setprecision(17);
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
}

std::filesystem::path metadata_path(const std::filesystem::path& records_path) {
  auto p = records_path;
  p += ".meta.json";
  return p;
}

void write_metadata(const std::filesystem::path& records_path, const nlohmann::json& metadata) {
  std::ofstream out(metadata_path(records_path));
  if (!out) throw std::runtime_error("cannot write metadata for " + records_path.string());
  out << metadata.dump(2) << '\n';
}

}  // namespace sparsetree
