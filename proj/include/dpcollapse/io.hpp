#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace dpcollapse::io {

using Json = nlohmann::json;

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

/// Scientific notation with 17 significant digits, independent of the locale.
std::string format_double(double x);
std::string to_csv(const Table& table);
/// Inverse of to_csv for numeric tables.
Table parse_csv(const std::string& text);

std::string sha256_hex(const std::string& content);

/// Writes via a temporary file in the same directory and an atomic rename.
/// Throws IoError on failure.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

/// Pretty-printed, sorted keys, trailing newline.
std::string to_json_text(const Json& j);

struct OutputRecord {
  std::string path;  ///< relative to the output directory
  std::string sha256;
};

struct RunManifest {
  std::string command;
  std::vector<std::string> argv;
  Json parameters = Json::object();
  std::uint64_t seed = 0;
  std::string tool_version;
  std::vector<OutputRecord> outputs;
  double wall_time = 0.0;
  int exit_code = 0;

  Json to_json() const;
  static RunManifest from_json(const Json& j);
};

/// Output directory from DPC_OUT_DIR, falling back to the current directory.
std::filesystem::path default_output_dir();

/// Collects emitted files for a manifest.
class Emitter {
 public:
  explicit Emitter(std::filesystem::path dir);

  const std::filesystem::path& dir() const { return dir_; }
  void emit(const Table& table, const std::string& name);
  void emit(const Json& j, const std::string& name);
  void emit_text(const std::string& text, const std::string& name);
  const std::vector<OutputRecord>& outputs() const { return outputs_; }
  /// Written last, and not itself listed among the outputs.
  void write_manifest(RunManifest manifest, const std::string& name);

 private:
  std::filesystem::path dir_;
  std::vector<OutputRecord> outputs_;
};

}  // namespace dpcollapse::io
