#include "nehari/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace nehari {

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf);
}

Json Json::boolean(bool b) {
  Json j;
  j.kind_ = Kind::bool_v;
  j.bool_ = b;
  return j;
}

Json Json::integer(std::int64_t v) {
  Json j;
  j.kind_ = Kind::int_v;
  j.int_ = v;
  return j;
}

Json Json::real(double v) {
  if (std::isnan(v)) return null();
  if (std::isinf(v)) return str(v > 0 ? "inf" : "-inf");
  Json j;
  j.kind_ = Kind::real_v;
  j.real_ = v;
  return j;
}

Json Json::str(std::string s) {
  Json j;
  j.kind_ = Kind::string_v;
  j.string_ = std::move(s);
  return j;
}

Json Json::array() {
  Json j;
  j.kind_ = Kind::array_v;
  return j;
}

Json Json::object() {
  Json j;
  j.kind_ = Kind::object_v;
  return j;
}

Json& Json::set(const std::string& key, Json value) {
  for (auto& [k, v] : members_) {
    if (k == key) {
      v = std::move(value);
      return *this;
    }
  }
  members_.emplace_back(key, std::move(value));
  return *this;
}

Json& Json::push(Json value) {
  items_.push_back(std::move(value));
  return *this;
}

namespace {

void escape_to(std::string& out, const std::string& s) {
  out.push_back('"');
  for (unsigned char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (ch < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", ch);
          out += buf;
        } else {
          out.push_back(static_cast<char>(ch));
        }
    }
  }
  out.push_back('"');
}

void pad(std::string& out, int indent, int depth) {
  if (indent <= 0) return;
  out.push_back('\n');
  out.append(static_cast<std::size_t>(indent * depth), ' ');
}

}  // namespace

void Json::write(std::string& out, int indent, int depth) const {
  switch (kind_) {
    case Kind::null_v:
      out += "null";
      break;
    case Kind::bool_v:
      out += bool_ ? "true" : "false";
      break;
    case Kind::int_v:
      out += std::to_string(int_);
      break;
    case Kind::real_v:
      out += format_real(real_);
      break;
    case Kind::string_v:
      escape_to(out, string_);
      break;
    case Kind::array_v: {
      if (items_.empty()) {
        out += "[]";
        return;
      }
      out.push_back('[');
      for (std::size_t i = 0; i < items_.size(); ++i) {
        if (i) out.push_back(',');
        pad(out, indent, depth + 1);
        items_[i].write(out, indent, depth + 1);
      }
      pad(out, indent, depth);
      out.push_back(']');
      break;
    }
    case Kind::object_v: {
      if (members_.empty()) {
        out += "{}";
        return;
      }
      out.push_back('{');
      for (std::size_t i = 0; i < members_.size(); ++i) {
        if (i) out.push_back(',');
        pad(out, indent, depth + 1);
        escape_to(out, members_[i].first);
        out += ": ";
        members_[i].second.write(out, indent, depth + 1);
      }
      pad(out, indent, depth);
      out.push_back('}');
      break;
    }
  }
}

std::string Json::dump(int indent) const {
  std::string out;
  write(out, indent, 0);
  out.push_back('\n');
  return out;
}

Json to_json(const SolveReport& r) {
  Json j = Json::object();
  j.set("status", Json::str(to_string(r.status)));
  j.set("level", Json::real(r.level));
  j.set("residual", Json::real(r.residual));
  j.set("psi_grad_norm", Json::real(r.psi_grad_norm));
  j.set("iterations", Json::integer(r.iterations));
  j.set("t_final", Json::real(r.t_final));
  j.set("sign_verdict", Json::str(r.sign_verdict));
  j.set("boundary_margin_min", Json::real(r.boundary_margin_min));
  j.set("beta_support_estimate", Json::real(r.beta_support_estimate));
  return j;
}

Json to_json(const MultiplicityReport& r) {
  Json j = Json::object();
  j.set("target_pairs", Json::integer(r.target_pairs));
  j.set("distinct_count", Json::integer(r.distinct_count));
  Json sols = Json::array();
  for (const FoundSolution& s : r.solutions) {
    Json e = Json::object();
    e.set("level", Json::real(s.level));
    e.set("residual", Json::real(s.residual));
    e.set("sign", Json::str(s.sign));
    if (s.sign_changes >= 0) e.set("sign_changes", Json::integer(s.sign_changes));
    sols.push(std::move(e));
  }
  j.set("solutions", std::move(sols));
  j.set("pairing_note", Json::str(r.pairing_note));
  Json notes = Json::array();
  for (const std::string& n : r.notes) notes.push(Json::str(n));
  j.set("notes", std::move(notes));
  return j;
}

Json to_json(const ConditionReport& r) {
  Json j = Json::object();
  j.set("verdict_f2", Json::str(to_string(r.verdict_f2)));
  j.set("verdict_beta", Json::str(to_string(r.verdict_beta)));
  j.set("verdict_beta_m", Json::str(to_string(r.verdict_beta_m)));
  j.set("m", Json::integer(r.m));
  j.set("s_m", Json::integer(r.s_m));
  j.set("lambda1_eta", Json::real(r.lambda1_eta));
  j.set("lambda_m_eta", Json::real(r.lambda_m_eta));
  j.set("lambda_next_eta", Json::real(r.lambda_next_eta));
  j.set("lambda1_alpha", Json::real(r.lambda1_alpha));
  j.set("lambda1_eta_minus_alpha", Json::real(r.lambda1_eta_minus_alpha));
  j.set("tau_estimate", Json::real(r.tau_estimate));
  j.set("tau_m_estimate", Json::real(r.tau_m_estimate));
  j.set("sobolev_S", Json::real(r.sobolev_S));
  j.set("eta_sup", Json::real(r.eta_sup));
  j.set("essinf_beta", Json::real(r.essinf_beta));
  j.set("rhs_beta", Json::real(r.rhs_beta));
  j.set("rhs_beta_m", Json::real(r.rhs_beta_m));
  j.set("support_lower_bound", Json::real(r.support_lower_bound));
  j.set("level_gap_rhs", Json::real(r.level_gap_rhs));
  j.set("ground_level", Json::real(r.ground_level));
  j.set("level_gap", Json::str(to_string(r.level_gap)));
  Json notes = Json::array();
  for (const std::string& n : r.notes) notes.push(Json::str(n));
  j.set("notes", std::move(notes));
  return j;
}

Json to_json(const SpectrumResult& r) {
  Json j = Json::object();
  j.set("theta_identically_zero", Json::boolean(r.theta_identically_zero));
  Json vals = Json::array();
  for (const EigenPair& p : r.pairs) vals.push(Json::real(p.lambda));
  j.set("eigenvalues", std::move(vals));
  Json clusters = Json::array();
  for (const EigenCluster& c : r.clusters) {
    Json e = Json::object();
    e.set("lambda", Json::real(c.lambda));
    e.set("multiplicity", Json::integer(c.multiplicity));
    clusters.push(std::move(e));
  }
  j.set("clusters", std::move(clusters));
  j.set("s_m", Json::integer(r.s_m));
  Json warnings = Json::array();
  for (const std::string& w : r.warnings) warnings.push(Json::str(w));
  j.set("warnings", std::move(warnings));
  return j;
}

Json to_json(const F1Report& r) {
  Json j = Json::object();
  j.set("passed", Json::boolean(r.passed));
  j.set("checks", Json::integer(r.checks));
  Json fails = Json::array();
  for (const F1Witness& w : r.failures) {
    Json e = Json::object();
    Json x = Json::array();
    for (double xi : w.x) x.push(Json::real(xi));
    e.set("x", std::move(x));
    e.set("t1", Json::real(w.t1));
    e.set("t2", Json::real(w.t2));
    e.set("what", Json::str(w.what));
    fails.push(std::move(e));
  }
  j.set("failures", std::move(fails));
  return j;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << content;
  out.flush();
  if (!out) throw Error("failed writing '" + path + "'");
}

}  // namespace nehari
