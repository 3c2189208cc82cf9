#include "kmslab/cli/artifacts.hpp"

#include "kmslab/discrete.hpp"
#include "kmslab/error.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>

#ifndef KMSLAB_VERSION
#define KMSLAB_VERSION "0.0.0"
#endif

namespace kmslab::cli {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256: digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 0xF]);
  }
  return out;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

CsvTable& CsvTable::row(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) throw InvalidArgument("CsvTable: row width mismatch");
  rows_.push_back(std::move(cells));
  return *this;
}

std::string CsvTable::str() const {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out.push_back(',');
      out += csv_cell(cells[i]);
    }
    out.push_back('\n');
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

Json number_json(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

ArtifactWriter::ArtifactWriter(const fs::path& outdir, const std::string& label)
    : dir_(outdir / label), label_(label) {
  if (label.empty() || label.find('/') != std::string::npos || label == "." || label == "..") {
    throw ConfigError("run label must be a plain non-empty name");
  }
  const auto manifest = dir_ / "manifest.json";
  if (fs::exists(manifest)) {
    std::ifstream in(manifest);
    try {
      const auto old = Json::parse(in);
      for (const auto& f : old.at("files")) {
        const fs::path rel = f.at("path").get<std::string>();
        if (rel.is_relative() && rel.lexically_normal().string().rfind("..", 0) != 0) {
          fs::remove(dir_ / rel);
        }
      }
    } catch (const std::exception&) {
      // unreadable manifest: leave the directory contents alone
    }
    fs::remove(manifest);
  }
  fs::create_directories(dir_);
}

void ArtifactWriter::write_text(const std::string& relative, const std::string& content) {
  const fs::path target = dir_ / relative;
  fs::create_directories(target.parent_path());
  std::ofstream out(target, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + target.string());
  out << content;
  out.close();
  if (!out) throw Error("write failed for " + target.string());
  auto it = std::find_if(files_.begin(), files_.end(),
                         [&](const auto& f) { return f.first == relative; });
  if (it != files_.end()) {
    it->second = sha256_hex(content);
  } else {
    files_.emplace_back(relative, sha256_hex(content));
  }
}

void ArtifactWriter::write_json(const std::string& relative, const Json& j) {
  write_text(relative, j.dump(2) + "\n");
}

void ArtifactWriter::write_csv(const std::string& relative, const CsvTable& table) {
  write_text(relative, table.str());
}

void ArtifactWriter::write_field(const std::string& relative, const Field& field) {
  std::ostringstream os;
  write_field_csv(field, os);
  write_text(relative, os.str());
}

fs::path ArtifactWriter::finalize(const Json& config_echo, const std::string& command,
                                  int exit_code) {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm);

  Json files = Json::array();
  for (const auto& [path, digest] : files_) files.push_back({{"path", path}, {"sha256", digest}});
  Json manifest = {{"label", label_},
                   {"command", command},
                   {"timestamp", stamp},
                   {"version", KMSLAB_VERSION},
                   {"exit_code", exit_code},
                   {"config", config_echo},
                   {"files", files}};
  const auto path = dir_ / "manifest.json";
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << manifest.dump(2) << "\n";
  return path;
}

} // namespace kmslab::cli
