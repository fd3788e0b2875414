#include "gsis/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "gsis/error.hpp"

namespace gsis::io {

namespace {

void write_number(std::string& out, double v) {
  if (!std::isfinite(v)) {
    out += "null";
    return;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

void dump_into(std::string& out, const Json& j, int indent) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  const std::string close(static_cast<std::size_t>(indent), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad;
        out += Json(it.key()).dump();
        out += ": ";
        dump_into(out, it.value(), indent + 2);
      }
      out += "\n" + close + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      bool flat = true;
      for (const auto& v : j) flat = flat && !v.is_structured();
      if (flat) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          dump_into(out, j[i], indent);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        dump_into(out, j[i], indent + 2);
      }
      out += "\n" + close + "]";
      return;
    }
    case Json::value_t::number_float:
      write_number(out, j.get<double>());
      return;
    default:
      out += j.dump();
      return;
  }
}

[[noreturn]] void parse_error(const std::string& what) { throw Error(ErrorKind::Parse, what); }

const Json& field(const Json& j, const char* name) {
  if (!j.is_object()) parse_error(std::string("expected an object holding \"") + name + "\"");
  auto it = j.find(name);
  if (it == j.end()) parse_error(std::string("missing field \"") + name + "\"");
  return *it;
}

double number(const Json& j, const char* what) {
  if (j.is_null()) return std::numeric_limits<double>::infinity();
  if (!j.is_number()) parse_error(std::string("\"") + what + "\" must be a number");
  return j.get<double>();
}

int integer(const Json& j, const char* what) {
  if (!j.is_number_integer()) parse_error(std::string("\"") + what + "\" must be an integer");
  return j.get<int>();
}

std::vector<double> numbers(const Json& j, const char* what) {
  if (!j.is_array()) parse_error(std::string("\"") + what + "\" must be an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) out.push_back(number(v, what));
  return out;
}

Json complex_json(cplx z) { return Json::array({z.real(), z.imag()}); }

cplx complex_from(const Json& j, const char* what) {
  if (!j.is_array() || j.size() != 2) {
    parse_error(std::string("\"") + what + "\" entries must be [re, im] pairs");
  }
  return {number(j[0], what), number(j[1], what)};
}

// Library validation failures inside a document are parse failures of that
// document.
template <class F>
auto guarded(F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Parse) throw;
    throw Error(ErrorKind::Parse, e.what());
  }
}

}  // namespace

std::string dump(const Json& j) {
  std::string out;
  dump_into(out, j, 0);
  out += "\n";
  return out;
}

Json parse(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, e.what());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

Json to_json(const GaussianSignal& s) {
  Json coeffs = Json::array();
  for (const cplx& z : s.coeffs()) coeffs.push_back(complex_json(z));
  return Json{{"lambda", s.lambda()}, {"beta", s.beta()}, {"k_min", s.k_min()}, {"coeffs", coeffs}};
}

GaussianSignal signal_from_json(const Json& j) {
  const double lambda = number(field(j, "lambda"), "lambda");
  const double beta = number(field(j, "beta"), "beta");
  const int k_min = integer(field(j, "k_min"), "k_min");
  const Json& cj = field(j, "coeffs");
  if (!cj.is_array()) parse_error("\"coeffs\" must be an array");
  std::vector<cplx> c;
  for (const auto& v : cj) c.push_back(complex_from(v, "coeffs"));
  return guarded([&] {
    if (c.empty()) return GaussianSignal::zero(lambda, beta);
    return GaussianSignal(lambda, beta, k_min, std::move(c));
  });
}

Json to_json(const SampleSet& s) {
  Json pts = Json::array();
  for (const auto& p : s.points) {
    pts.push_back(Json{{"gamma", p.gamma}, {"mag_f", p.mag_f}, {"mag_df", p.mag_df}});
  }
  return Json{{"points", pts}};
}

SampleSet samples_from_json(const Json& j) {
  const Json& pts = field(j, "points");
  if (!pts.is_array()) parse_error("\"points\" must be an array");
  SampleSet s;
  for (const auto& p : pts) {
    s.points.push_back({number(field(p, "gamma"), "gamma"), number(field(p, "mag_f"), "mag_f"),
                        number(field(p, "mag_df"), "mag_df")});
  }
  guarded([&] {
    s.validate();
    return 0;
  });
  return s;
}

Json to_json(const AutocorrData& d) {
  return Json{{"m_min", d.m_min}, {"A", d.A}, {"B", d.B}, {"lambda", d.lambda}, {"beta", d.beta}};
}

AutocorrData autocorr_from_json(const Json& j) {
  AutocorrData d;
  d.m_min = integer(field(j, "m_min"), "m_min");
  d.A = numbers(field(j, "A"), "A");
  d.B = numbers(field(j, "B"), "B");
  d.lambda = number(field(j, "lambda"), "lambda");
  d.beta = number(field(j, "beta"), "beta");
  return d;
}

Json to_json(const RecoveryResult& r) {
  Json trace = Json::array();
  for (const auto& s : r.branch_trace) {
    trace.push_back(Json{{"k", s.k}, {"formula", s.formula}, {"residual", s.residual}});
  }
  return Json{{"signal", to_json(r.signal)},
              {"pivot_index", r.pivot_index ? Json(*r.pivot_index) : Json(nullptr)},
              {"max_residual", r.max_residual},
              {"condition_A", r.condition_A},
              {"condition_B", r.condition_B},
              {"branch_trace", trace}};
}

RecoveryResult recovery_from_json(const Json& j) {
  RecoveryResult r;
  r.signal = signal_from_json(field(j, "signal"));
  const Json& p = field(j, "pivot_index");
  if (!p.is_null()) r.pivot_index = integer(p, "pivot_index");
  r.max_residual = number(field(j, "max_residual"), "max_residual");
  r.condition_A = number(field(j, "condition_A"), "condition_A");
  r.condition_B = number(field(j, "condition_B"), "condition_B");
  const Json& trace = field(j, "branch_trace");
  if (!trace.is_array()) parse_error("\"branch_trace\" must be an array");
  for (const auto& s : trace) {
    const Json& f = field(s, "formula");
    if (!f.is_string()) parse_error("\"formula\" must be a string");
    r.branch_trace.push_back({integer(field(s, "k"), "k"), f.get<std::string>(),
                              number(field(s, "residual"), "residual")});
  }
  return r;
}

Json to_json(const EquivalenceReport& e) {
  return Json{{"distance", e.distance},
              {"phase", complex_json(e.phase)},
              {"conjugated", e.conjugated},
              {"aligned", to_json(e.aligned)}};
}

EquivalenceReport equivalence_from_json(const Json& j) {
  EquivalenceReport e;
  e.distance = number(field(j, "distance"), "distance");
  e.phase = complex_from(field(j, "phase"), "phase");
  const Json& c = field(j, "conjugated");
  if (!c.is_boolean()) parse_error("\"conjugated\" must be a boolean");
  e.conjugated = c.get<bool>();
  if (j.contains("aligned")) e.aligned = signal_from_json(j["aligned"]);
  return e;
}

}  // namespace gsis::io
