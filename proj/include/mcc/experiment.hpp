#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include "mcc/config.hpp"
#include "mcc/manifest.hpp"

namespace mcc {

struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> replications;
  std::optional<std::filesystem::path> output_dir;
};

void apply_overrides(ExperimentConfig& c, const RunOverrides& o);

// A module error tagged with the experiment and the stage that raised it.
class ExperimentError : public Error {
 public:
  using Error::Error;
};

// Writes reports, CSV sidecars and manifest.json into c.output_dir. The returned
// manifest's exit_code() is 0 iff every configured check passed. Module errors
// are recorded in the manifest and rethrown as ExperimentError.
RunManifest run_experiment(const ExperimentConfig& c);

}  // namespace mcc
