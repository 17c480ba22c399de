#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "nehari/conditions.hpp"
#include "nehari/solver.hpp"

namespace nehari {

inline constexpr const char* kSchemaVersion = "1.0";

// Minimal JSON value with insertion-ordered objects and deterministic
// formatting: reals print with 17 significant digits, +/- infinity encode as
// the strings "inf"/"-inf", NaN encodes as null.  Reports therefore diff
// byte-for-byte across runs with equal inputs.
class Json {
 public:
  Json() : kind_(Kind::null_v) {}

  static Json null() { return Json(); }
  static Json boolean(bool b);
  static Json integer(std::int64_t v);
  static Json real(double v);  // extended-real encoding
  static Json str(std::string s);
  static Json array();
  static Json object();

  bool is_object() const noexcept { return kind_ == Kind::object_v; }
  bool is_array() const noexcept { return kind_ == Kind::array_v; }

  Json& set(const std::string& key, Json value);  // object append/overwrite
  Json& push(Json value);                         // array append

  std::string dump(int indent = 2) const;

 private:
  enum class Kind { null_v, bool_v, int_v, real_v, string_v, array_v, object_v };

  void write(std::string& out, int indent, int depth) const;

  Kind kind_;
  bool bool_ = false;
  std::int64_t int_ = 0;
  double real_ = 0.0;
  std::string string_;
  std::vector<Json> items_;
  std::vector<std::pair<std::string, Json>> members_;
};

// Formats v with 17 significant digits (shortest %g form); used by both the
// JSON writer and the CSV dumps.
std::string format_real(double v);

Json to_json(const SolveReport& r);
Json to_json(const MultiplicityReport& r);
Json to_json(const ConditionReport& r);
Json to_json(const SpectrumResult& r);
Json to_json(const F1Report& r);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace nehari
