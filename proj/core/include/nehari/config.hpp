#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nehari/conditions.hpp"
#include "nehari/grid.hpp"
#include "nehari/nonlinearity.hpp"
#include "nehari/solver.hpp"

namespace nehari {

// Line-oriented `key = value` configuration with one level of [section]
// grouping, `#` comments, and strict key checking by the typed loader.
class ConfigFile {
 public:
  struct Entry {
    std::string key;
    std::string value;
    int line = 0;
  };
  struct Section {
    std::string name;
    std::vector<Entry> entries;
  };

  static ConfigFile parse_file(const std::string& path);
  static ConfigFile parse_string(const std::string& text,
                                 const std::string& origin = "<string>");

  const std::vector<Section>& sections() const noexcept { return sections_; }
  const std::string* find(const std::string& section, const std::string& key) const;
  void set(const std::string& section, const std::string& key, const std::string& value);

  // Sorted `section.key = value` serialization; the digest is the 64-bit
  // FNV-1a hash of it in hex, taken after any command-line overrides so two
  // runs with the same effective configuration share a digest.  The output
  // section is excluded: the destination directory is not part of a run's
  // identity.
  std::string canonical() const;
  std::string digest() const;

 private:
  std::vector<Section> sections_;
  std::string origin_;
};

// Fully validated run parameters: the domain, the nonlinearity family, and
// every tolerance a subcommand may need, with documented defaults.
struct RunConfig {
  // [domain]
  int dim = 1;
  std::array<double, 3> lengths{3.14159265358979323846, 3.14159265358979323846,
                                3.14159265358979323846};
  std::array<int, 3> nodes{511, 0, 0};

  // [nonlinearity]
  std::string family = "smooth-saturation";  // or strong-resonance
  std::string alpha_expr = "0";
  std::string eta_expr = "2";
  double c = 1.0;  // strong-resonance resonance strength

  // [solver]
  SolveOptions solve;
  double deflation_sigma = 1.0;
  double distinct_rel_distance = 0.1;
  double distinct_rel_level = 1e-4;

  // [sampling]
  std::uint64_t seed = 0;
  int random_starts = 12;
  int deflated_rounds = 6;
  int tau_samples = 8;
  int tau_m_samples = 64;
  int trials = 1000;  // property battery trials per suite

  // [spectrum]
  int spectrum_count = 6;
  std::string spectrum_weight = "eta";  // alpha | eta | eta-alpha | expression
  double eigs_residual_tol = 1e-8;

  // [output]
  std::string out_dir = "out";

  // Loader with strict section/key validation; throws ConfigError with the
  // offending location on unknown keys or malformed values.
  static RunConfig load(const ConfigFile& file);

  std::shared_ptr<const Grid> make_grid() const;
  std::shared_ptr<const Nonlinearity> make_nonlinearity() const;
  MultiplicityOptions multiplicity_options() const;
  ConditionOptions condition_options() const;
};

}  // namespace nehari
