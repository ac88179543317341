#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace sparsetree {

/// JSON-lines writer. Every line is {"record_type", "config", "payload"} with the resolved
/// configuration embedded, so each record stands on its own. Output is a pure function of
/// the records written: no timestamps or host details.
class RecordWriter {
 public:
  RecordWriter(std::ostream& out, nlohmann::json config);

  void write(std::string_view record_type, nlohmann::json payload);
  std::size_t written() const { return written_; }

 private:
  std::ostream& out_;
  nlohmann::json config_;
  std::size_t written_ = 0;
};

/// Plot-ready table: header row plus rows of numbers, comma separated.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  void write(const std::filesystem::path& path) const;
};

/// Run metadata (timestamps, wall time, worker count) goes to a sidecar file next to the
/// records so that the records themselves stay byte-reproducible.
void write_metadata(const std::filesystem::path& records_path, const nlohmann::json& metadata);
std::filesystem::path metadata_path(const std::filesystem::path& records_path);

}  // namespace sparsetree
