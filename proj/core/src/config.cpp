#include "nehari/config.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace nehari {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

[[noreturn]] void fail(const std::string& origin, int line, const std::string& msg) {
  throw ConfigError(origin + ":" + std::to_string(line) + ": " + msg);
}

}  // namespace

ConfigFile ConfigFile::parse_string(const std::string& text, const std::string& origin) {
  ConfigFile cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  Section* current = nullptr;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        fail(origin, lineno, "unterminated section header '" + line + "'");
      const std::string name = trim(line.substr(1, line.size() - 2));
      if (name.empty()) fail(origin, lineno, "empty section name");
      cfg.sections_.push_back(Section{name, {}});
      current = &cfg.sections_.back();
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      fail(origin, lineno, "expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(origin, lineno, "empty key");
    if (value.empty()) fail(origin, lineno, "empty value for key '" + key + "'");
    if (!current)
      fail(origin, lineno, "key '" + key + "' appears before any [section]");
    for (const Entry& e : current->entries)
      if (e.key == key)
        fail(origin, lineno, "duplicate key '" + key + "' in section [" + current->name + "]");
    current->entries.push_back(Entry{key, value, lineno});
  }
  // Duplicate section headers are merged errors, too: one section, one block.
  std::set<std::string> seen;
  for (const Section& s : cfg.sections_)
    if (!seen.insert(s.name).second)
      throw ConfigError(origin + ": duplicate section [" + s.name + "]");
  return cfg;
}

ConfigFile ConfigFile::parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str(), path);
}

const std::string* ConfigFile::find(const std::string& section, const std::string& key) const {
  for (const Section& s : sections_) {
    if (s.name != section) continue;
    for (const Entry& e : s.entries)
      if (e.key == key) return &e.value;
  }
  return nullptr;
}

void ConfigFile::set(const std::string& section, const std::string& key,
                     const std::string& value) {
  for (Section& s : sections_) {
    if (s.name != section) continue;
    for (Entry& e : s.entries) {
      if (e.key == key) {
        e.value = value;
        return;
      }
    }
    s.entries.push_back(Entry{key, value, 0});
    return;
  }
  sections_.push_back(Section{section, {Entry{key, value, 0}}});
}

std::string ConfigFile::canonical() const {
  std::map<std::string, std::map<std::string, std::string>> sorted;
  for (const Section& s : sections_) {
    // Where a report is written must not change its identity: the output
    // section is invisible to the canonical form and hence to the digest.
    if (s.name == "output") continue;
    for (const Entry& e : s.entries) sorted[s.name][e.key] = e.value;
  }
  std::string out;
  for (const auto& [sec, entries] : sorted)
    for (const auto& [key, value] : entries)
      out += sec + "." + key + " = " + value + "\n";
  return out;
}

std::string ConfigFile::digest() const {
  const std::string text = canonical();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

namespace {

// Typed readers over ConfigFile with strict unknown-key detection: every key
// that the loader consumes is recorded, and leftovers raise ConfigError.
class Reader {
 public:
  explicit Reader(const ConfigFile& file) : file_(file) {}

  bool has(const std::string& sec, const std::string& key) {
    mark(sec, key);
    return file_.find(sec, key) != nullptr;
  }

  std::string get_string(const std::string& sec, const std::string& key,
                         const std::string& fallback) {
    mark(sec, key);
    const std::string* v = file_.find(sec, key);
    return v ? *v : fallback;
  }

  double get_double(const std::string& sec, const std::string& key, double fallback) {
    mark(sec, key);
    const std::string* v = file_.find(sec, key);
    if (!v) return fallback;
    return parse_double(sec, key, *v);
  }

  int get_int(const std::string& sec, const std::string& key, int fallback) {
    mark(sec, key);
    const std::string* v = file_.find(sec, key);
    if (!v) return fallback;
    return parse_int(sec, key, *v);
  }

  std::uint64_t get_u64(const std::string& sec, const std::string& key,
                        std::uint64_t fallback) {
    mark(sec, key);
    const std::string* v = file_.find(sec, key);
    if (!v) return fallback;
    errno = 0;
    char* end = nullptr;
    const unsigned long long r = std::strtoull(v->c_str(), &end, 0);
    if (errno != 0 || end == v->c_str() || *end != '\0')
      bad_value(sec, key, *v, "an unsigned 64-bit integer");
    return static_cast<std::uint64_t>(r);
  }

  std::vector<double> get_doubles(const std::string& sec, const std::string& key) {
    mark(sec, key);
    const std::string* v = file_.find(sec, key);
    std::vector<double> out;
    if (!v) return out;
    for (const std::string& tok : split_list(*v))
      out.push_back(parse_double(sec, key, tok));
    return out;
  }

  std::vector<int> get_ints(const std::string& sec, const std::string& key) {
    mark(sec, key);
    const std::string* v = file_.find(sec, key);
    std::vector<int> out;
    if (!v) return out;
    for (const std::string& tok : split_list(*v))
      out.push_back(parse_int(sec, key, tok));
    return out;
  }

  void finish() const {
    for (const ConfigFile::Section& s : file_.sections()) {
      for (const ConfigFile::Entry& e : s.entries) {
        const std::string full = s.name + "." + e.key;
        if (!used_.count(full))
          throw ConfigError("line " + std::to_string(e.line) + ": unknown key '" +
                            e.key + "' in section [" + s.name + "]");
      }
    }
  }

 private:
  void mark(const std::string& sec, const std::string& key) { used_.insert(sec + "." + key); }

  static std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
      if (ch == ',' || std::isspace(static_cast<unsigned char>(ch))) {
        if (!cur.empty()) out.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(ch);
      }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
  }

  double parse_double(const std::string& sec, const std::string& key,
                      const std::string& v) {
    errno = 0;
    char* end = nullptr;
    const double r = std::strtod(v.c_str(), &end);
    if (errno != 0 || end == v.c_str() || *end != '\0')
      bad_value(sec, key, v, "a real number");
    return r;
  }

  int parse_int(const std::string& sec, const std::string& key, const std::string& v) {
    errno = 0;
    char* end = nullptr;
    const long r = std::strtol(v.c_str(), &end, 0);
    if (errno != 0 || end == v.c_str() || *end != '\0' || r < -2147483647L ||
        r > 2147483647L)
      bad_value(sec, key, v, "an integer");
    return static_cast<int>(r);
  }

  [[noreturn]] void bad_value(const std::string& sec, const std::string& key,
                              const std::string& v, const std::string& want) {
    throw ConfigError("key '" + sec + "." + key + "': expected " + want + ", got '" +
                      v + "'");
  }

  const ConfigFile& file_;
  std::set<std::string> used_;
};

void require_positive(const char* what, double v) {
  if (!(v > 0.0))
    throw ConfigError(std::string("'") + what + "' must be positive, got " +
                      std::to_string(v));
}

}  // namespace

RunConfig RunConfig::load(const ConfigFile& file) {
  RunConfig rc;
  Reader r(file);

  rc.dim = r.get_int("domain", "dim", rc.dim);
  if (rc.dim < 1 || rc.dim > 3)
    throw ConfigError("'domain.dim' must be 1, 2, or 3, got " + std::to_string(rc.dim));
  const std::vector<double> lengths = r.get_doubles("domain", "lengths");
  if (!lengths.empty()) {
    if (static_cast<int>(lengths.size()) != rc.dim)
      throw ConfigError("'domain.lengths' needs exactly " + std::to_string(rc.dim) +
                        " entries");
    for (int a = 0; a < rc.dim; ++a) {
      require_positive("domain.lengths", lengths[static_cast<std::size_t>(a)]);
      rc.lengths[static_cast<std::size_t>(a)] = lengths[static_cast<std::size_t>(a)];
    }
  }
  const std::vector<int> nodes = r.get_ints("domain", "nodes");
  if (!nodes.empty()) {
    if (static_cast<int>(nodes.size()) != 1 && static_cast<int>(nodes.size()) != rc.dim)
      throw ConfigError("'domain.nodes' needs 1 or " + std::to_string(rc.dim) +
                        " entries");
    for (int a = 0; a < rc.dim; ++a) {
      const int n = nodes[static_cast<std::size_t>(std::min<int>(
          a, static_cast<int>(nodes.size()) - 1))];
      if (n < 1) throw ConfigError("'domain.nodes' entries must be >= 1");
      rc.nodes[static_cast<std::size_t>(a)] = n;
    }
  } else if (rc.dim > 1) {
    throw ConfigError("'domain.nodes' is required for dim > 1");
  }

  rc.family = r.get_string("nonlinearity", "family", rc.family);
  if (rc.family != "smooth-saturation" && rc.family != "strong-resonance")
    throw ConfigError("'nonlinearity.family' must be smooth-saturation or "
                      "strong-resonance, got '" + rc.family + "'");
  rc.alpha_expr = r.get_string("nonlinearity", "alpha", rc.alpha_expr);
  rc.eta_expr = r.get_string("nonlinearity", "eta", rc.eta_expr);
  rc.c = r.get_double("nonlinearity", "c", rc.c);
  if (rc.family == "strong-resonance") {
    require_positive("nonlinearity.c", rc.c);
    if (r.has("nonlinearity", "alpha"))
      throw ConfigError("'nonlinearity.alpha' is determined by eta - c for the "
                        "strong-resonance family; remove it");
  }

  rc.solve.grad_tol = r.get_double("solver", "grad_tol", rc.solve.grad_tol);
  rc.solve.max_iterations = r.get_int("solver", "max_iterations", rc.solve.max_iterations);
  rc.solve.armijo_init = r.get_double("solver", "step_init", rc.solve.armijo_init);
  rc.solve.armijo_factor = r.get_double("solver", "step_factor", rc.solve.armijo_factor);
  rc.solve.armijo_c1 = r.get_double("solver", "sufficient_decrease", rc.solve.armijo_c1);
  rc.solve.boundary_floor_factor =
      r.get_double("solver", "boundary_floor", rc.solve.boundary_floor_factor);
  rc.solve.sign_threshold_rel =
      r.get_double("solver", "sign_threshold", rc.solve.sign_threshold_rel);
  rc.deflation_sigma = r.get_double("solver", "deflation_sigma", rc.deflation_sigma);
  rc.distinct_rel_distance =
      r.get_double("solver", "distinct_rel_distance", rc.distinct_rel_distance);
  rc.distinct_rel_level =
      r.get_double("solver", "distinct_rel_level", rc.distinct_rel_level);
  require_positive("solver.grad_tol", rc.solve.grad_tol);
  require_positive("solver.step_init", rc.solve.armijo_init);
  require_positive("solver.sufficient_decrease", rc.solve.armijo_c1);
  require_positive("solver.boundary_floor", rc.solve.boundary_floor_factor);
  require_positive("solver.deflation_sigma", rc.deflation_sigma);
  require_positive("solver.distinct_rel_distance", rc.distinct_rel_distance);
  require_positive("solver.distinct_rel_level", rc.distinct_rel_level);
  if (rc.solve.max_iterations < 1)
    throw ConfigError("'solver.max_iterations' must be >= 1");
  if (!(rc.solve.armijo_factor > 0.0 && rc.solve.armijo_factor < 1.0))
    throw ConfigError("'solver.step_factor' must lie in (0, 1)");

  rc.seed = r.get_u64("sampling", "seed", rc.seed);
  rc.random_starts = r.get_int("sampling", "random_starts", rc.random_starts);
  rc.deflated_rounds = r.get_int("sampling", "deflated_rounds", rc.deflated_rounds);
  rc.tau_samples = r.get_int("sampling", "tau_samples", rc.tau_samples);
  rc.tau_m_samples = r.get_int("sampling", "tau_m_samples", rc.tau_m_samples);
  rc.trials = r.get_int("sampling", "trials", rc.trials);
  if (rc.random_starts < 0 || rc.deflated_rounds < 0 || rc.tau_samples < 0 ||
      rc.tau_m_samples < 0 || rc.trials < 1)
    throw ConfigError("[sampling] counts must be nonnegative (trials >= 1)");

  rc.spectrum_count = r.get_int("spectrum", "count", rc.spectrum_count);
  rc.spectrum_weight = r.get_string("spectrum", "weight", rc.spectrum_weight);
  rc.eigs_residual_tol = r.get_double("spectrum", "residual_tol", rc.eigs_residual_tol);
  if (rc.spectrum_count < 1) throw ConfigError("'spectrum.count' must be >= 1");
  require_positive("spectrum.residual_tol", rc.eigs_residual_tol);

  rc.out_dir = r.get_string("output", "directory", rc.out_dir);

  r.finish();
  return rc;
}

std::shared_ptr<const Grid> RunConfig::make_grid() const {
  switch (dim) {
    case 1:
      return std::make_shared<Grid>(Grid::interval(lengths[0], nodes[0]));
    case 2:
      return std::make_shared<Grid>(Grid::box(lengths[0], lengths[1], nodes[0], nodes[1]));
    default:
      return std::make_shared<Grid>(
          Grid::box(lengths[0], lengths[1], lengths[2], nodes[0], nodes[1], nodes[2]));
  }
}

std::shared_ptr<const Nonlinearity> RunConfig::make_nonlinearity() const {
  auto weight = [](const std::string& text) {
    return Weight::expression(text);
  };
  try {
    if (family == "strong-resonance")
      return std::shared_ptr<const Nonlinearity>(
          std::make_shared<StrongResonance>(weight(eta_expr), c));
    return std::shared_ptr<const Nonlinearity>(
        std::make_shared<SmoothSaturation>(weight(alpha_expr), weight(eta_expr)));
  } catch (const ExprError& e) {
    throw ConfigError(std::string("bad weight expression: ") + e.what());
  }
}

MultiplicityOptions RunConfig::multiplicity_options() const {
  MultiplicityOptions mo;
  mo.random_starts = random_starts;
  mo.deflated_rounds = deflated_rounds;
  mo.deflation_sigma = deflation_sigma;
  mo.distinct_rel_distance = distinct_rel_distance;
  mo.distinct_rel_level = distinct_rel_level;
  mo.solve = solve;
  mo.solve.seed = seed;
  return mo;
}

ConditionOptions RunConfig::condition_options() const {
  ConditionOptions co;
  co.eigs.residual_tol = eigs_residual_tol;
  co.tau_samples = tau_samples;
  co.tau_m_samples = tau_m_samples;
  co.boundary_floor_factor = solve.boundary_floor_factor;
  co.seed = seed;
  return co;
}

}  // namespace nehari
