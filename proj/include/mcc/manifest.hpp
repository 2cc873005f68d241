#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace mcc {

inline constexpr const char* kArtifactVersion = "1.0.0";

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& p);
std::string utc_timestamp();

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct FileDigest {
  std::string path;  // relative to the output directory for outputs
  std::string sha256;
};

struct RunManifest {
  std::string experiment;
  std::string config_path;
  std::string config_sha256;
  std::string artifact_version = kArtifactVersion;
  std::uint64_t seed = 0;
  std::string started_utc;
  std::string finished_utc;
  std::vector<FileDigest> inputs;
  std::vector<FileDigest> outputs;
  std::vector<CheckResult> checks;
  std::string error;  // set when the run aborted

  bool pass() const;
  int exit_code() const;
};

void write_manifest(const std::filesystem::path& out_dir, const RunManifest& m);
RunManifest read_manifest(const std::filesystem::path& manifest_json);
// Every listed output exists under out_dir and matches its digest.
bool verify_manifest_outputs(const std::filesystem::path& out_dir, const RunManifest& m, std::string* problem = nullptr);

}  // namespace mcc
