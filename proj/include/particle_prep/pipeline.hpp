#pragma once

#include "particle_prep/builtin.hpp"
#include "particle_prep/common.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

namespace pprep {

/// Flat key=value configuration with dotted section prefixes. Lines starting
/// with '#' and blank lines are ignored.
class ConfigMap {
 public:
  static ConfigMap parse(std::istream& in, const std::string& source_name = "<config>");
  static ConfigMap load(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::optional<std::string> get(const std::string& key) const;
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

/// Fully resolved pipeline settings.
struct PipelineConfig {
  std::filesystem::path input_path;
  std::string input_format = "auto";
  std::string builtin_name;
  BuiltinParams builtin_params;
  std::optional<Box> domain;  ///< unset: geometry bounds padded by 4 l_c
  double lc = 0.0;
  double dx = 0.0;
  bool clean = false;
  int clean_max_passes = 20;
  double clean_eps = 0.0;  ///< 0 selects 0.75 l_f
  bool confinement = true;
  double confinement_eps = 0.0;  ///< 0 selects 0.75 l_f
  int iterations = 1000;
  double p0 = 1.0;
  double dt_max = 1.0;
  std::filesystem::path output_dir = "out";
  int threads = 0;

  /// Validates and resolves a key map. l_c defaults to 4 dx and dx to l_c / 4
  /// when only one of them is given. Raises ConfigError.
  static PipelineConfig from_map(const ConfigMap& map);
  /// Every key with its resolved value, one "key=value" line each.
  void write(std::ostream& out) const;
};

enum class PipelineMode { Full, CleanOnly };

/// Load, build the field, optionally clean, compute the completion field, seed
/// and relax, writing artifacts into the output directory. Returns the process
/// exit code: 0 ok, 2 config, 3 I/O, 4 geometry, 5 cleaning incomplete
/// (artifacts are still written). Progress and warnings go to `log`, errors to
/// `err`.
int run_pipeline(const PipelineConfig& config, PipelineMode mode, std::ostream& log, std::ostream& err);

}  // namespace pprep
