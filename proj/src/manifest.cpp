#include "mcc/manifest.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <json.hpp>

#include "mcc/error.hpp"
#include "mcc/io.hpp"

namespace mcc {

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 digest failed");
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

std::string sha256_file(const std::filesystem::path& p) { return sha256_hex(read_text(p)); }

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

bool RunManifest::pass() const {
  if (!error.empty() || checks.empty()) return false;
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

int RunManifest::exit_code() const { return pass() ? 0 : 1; }

namespace {

nlohmann::json digests(const std::vector<FileDigest>& v) {
  auto a = nlohmann::json::array();
  for (const auto& d : v) a.push_back({{"path", d.path}, {"sha256", d.sha256}});
  return a;
}

}  // namespace

void write_manifest(const std::filesystem::path& out_dir, const RunManifest& m) {
  nlohmann::json j;
  j["experiment"] = m.experiment;
  j["artifact_version"] = m.artifact_version;
  j["config_path"] = m.config_path;
  j["config_sha256"] = m.config_sha256;
  j["seed"] = m.seed;
  j["started_utc"] = m.started_utc;
  j["finished_utc"] = m.finished_utc;
  j["inputs"] = digests(m.inputs);
  j["outputs"] = digests(m.outputs);
  auto checks = nlohmann::json::array();
  for (const auto& c : m.checks) checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  j["checks"] = checks;
  if (!m.error.empty()) j["error"] = m.error;
  j["pass"] = m.pass();
  j["exit_code"] = m.exit_code();
  write_text(out_dir / "manifest.json", j.dump(2) + "\n");
}

RunManifest read_manifest(const std::filesystem::path& p) {
  const auto j = nlohmann::json::parse(read_text(p));
  RunManifest m;
  m.experiment = j.at("experiment");
  m.artifact_version = j.at("artifact_version");
  m.config_path = j.at("config_path");
  m.config_sha256 = j.at("config_sha256");
  m.seed = j.at("seed");
  m.started_utc = j.at("started_utc");
  m.finished_utc = j.at("finished_utc");
  for (const auto& d : j.at("inputs")) m.inputs.push_back({d.at("path"), d.at("sha256")});
  for (const auto& d : j.at("outputs")) m.outputs.push_back({d.at("path"), d.at("sha256")});
  for (const auto& c : j.at("checks")) m.checks.push_back({c.at("name"), c.at("pass"), c.at("detail")});
  if (j.contains("error")) m.error = j.at("error");
  return m;
}

bool verify_manifest_outputs(const std::filesystem::path& out_dir, const RunManifest& m, std::string* problem) {
  for (const auto& d : m.outputs) {
    const auto p = out_dir / d.path;
    if (!std::filesystem::exists(p)) {
      if (problem) *problem = "missing output " + d.path;
      return false;
    }
    if (sha256_file(p) != d.sha256) {
      if (problem) *problem = "digest mismatch for " + d.path;
      return false;
    }
  }
  return true;
}

}  // namespace mcc
