#pragma once

#include "kmslab/grid.hpp"

#include "json.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace kmslab::cli {

/// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

/// Shortest decimal that round-trips, or "nan"/"inf"/"-inf".
std::string format_double(double x);

/// Quotes a CSV cell when it contains a comma, quote, or line break.
std::string csv_cell(const std::string& s);

class CsvTable {
public:
  explicit CsvTable(std::vector<std::string> header);
  CsvTable& row(std::vector<std::string> cells);
  std::string str() const;

private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Writes files under <outdir>/<label> and records their digests. Files listed
/// by a manifest already in that directory are removed first.
class ArtifactWriter {
public:
  ArtifactWriter(const std::filesystem::path& outdir, const std::string& label);

  const std::filesystem::path& run_dir() const { return dir_; }
  const std::string& label() const { return label_; }

  void write_text(const std::string& relative, const std::string& content);
  void write_json(const std::string& relative, const nlohmann::ordered_json& j);
  void write_csv(const std::string& relative, const CsvTable& table);
  void write_field(const std::string& relative, const Field& field);

  /// Writes manifest.json; returns its path.
  std::filesystem::path finalize(const nlohmann::ordered_json& config_echo,
                                 const std::string& command, int exit_code);

  const std::vector<std::pair<std::string, std::string>>& files() const { return files_; }

private:
  std::filesystem::path dir_;
  std::string label_;
  std::vector<std::pair<std::string, std::string>> files_;  ///< (relative path, digest)
};

/// JSON with non-finite numbers mapped to null and the rest untouched.
nlohmann::ordered_json number_json(double x);

} // namespace kmslab::cli
