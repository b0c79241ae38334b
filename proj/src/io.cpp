#include "palm/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

namespace palm {

using nlohmann::json;

namespace {

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += "; ";
    out += p;
  }
  return out;
}

json matrix_json(const Matrix& M) {
  json rows = json::array();
  for (Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_json(const Vector& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

class Reader {
 public:
  explicit Reader(const json& j) : j_(j) {}

  Index dim(const char* key) {
    if (!j_.contains(key)) {
      errors.push_back(std::string("missing field \"") + key + "\"");
      return 0;
    }
    const json& v = j_.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      errors.push_back(std::string("field \"") + key + "\" must be a non-negative integer");
      return 0;
    }
    return static_cast<Index>(v.get<long long>());
  }

  // `cols` is used when the matrix has no rows.
  Matrix matrix(const char* key, Index cols) {
    if (!j_.contains(key)) {
      errors.push_back(std::string("missing field \"") + key + "\"");
      return Matrix(0, cols);
    }
    const json& v = j_.at(key);
    if (!v.is_array()) {
      errors.push_back(std::string("field \"") + key + "\" must be an array of rows");
      return Matrix(0, cols);
    }
    const Index rows = static_cast<Index>(v.size());
    if (rows > 0 && v[0].is_array()) cols = static_cast<Index>(v[0].size());
    Matrix M = Matrix::Zero(rows, cols);
    for (Index i = 0; i < rows; ++i) {
      const json& row = v[static_cast<std::size_t>(i)];
      if (!row.is_array()) {
        errors.push_back(std::string(key) + " row " + std::to_string(i) + " is not an array");
        continue;
      }
      if (static_cast<Index>(row.size()) != cols) {
        errors.push_back(std::string(key) + " row " + std::to_string(i) + " has " +
                         std::to_string(row.size()) + " entries, expected " + std::to_string(cols));
        continue;
      }
      for (Index c = 0; c < cols; ++c) {
        const json& x = row[static_cast<std::size_t>(c)];
        if (!x.is_number()) {
          errors.push_back(std::string(key) + "[" + std::to_string(i) + "][" + std::to_string(c) +
                           "] is not a number");
          continue;
        }
        M(i, c) = x.get<double>();
      }
    }
    return M;
  }

  Vector vector(const char* key) {
    if (!j_.contains(key)) {
      errors.push_back(std::string("missing field \"") + key + "\"");
      return Vector(0);
    }
    const json& v = j_.at(key);
    if (!v.is_array()) {
      errors.push_back(std::string("field \"") + key + "\" must be an array");
      return Vector(0);
    }
    Vector out = Vector::Zero(static_cast<Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) {
        errors.push_back(std::string(key) + "[" + std::to_string(i) + "] is not a number");
        continue;
      }
      out(static_cast<Index>(i)) = v[i].get<double>();
    }
    return out;
  }

  std::vector<std::string> errors;

 private:
  const json& j_;
};

std::string trim(std::string s) {
  auto ws = [](unsigned char c) { return std::isspace(c) != 0; };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), ws));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), ws).base(), s.end());
  return s;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

bool parse_number(const std::string& text, double& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  const char* first = t.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), out);
  return ec == std::errc() && ptr == t.data() + t.size() && std::isfinite(out);
}

}  // namespace

InputError::InputError(std::vector<std::string> violations)
    : std::runtime_error(join(violations)), violations_(std::move(violations)) {}

json instance_to_json(const BilevelInstance& inst) {
  json j;
  j["name"] = inst.name;
  j["m"] = inst.m;
  j["n"] = inst.n;
  j["p"] = inst.p;
  j["r"] = inst.r;
  j["C"] = matrix_json(inst.C);
  j["b"] = vector_json(inst.b);
  j["e"] = vector_json(inst.e);
  j["P"] = matrix_json(inst.P);
  j["x0"] = vector_json(inst.x0);
  j["cu"] = vector_json(inst.cu);
  j["d"] = vector_json(inst.d);
  j["Au"] = matrix_json(inst.Au);
  j["B"] = matrix_json(inst.B);
  j["a"] = vector_json(inst.a);
  return j;
}

BilevelInstance instance_from_json(const json& j) {
  if (!j.is_object()) throw InputError({"instance must be a JSON object"});
  Reader rd(j);
  BilevelInstance inst;
  if (j.contains("name")) {
    if (j.at("name").is_string())
      inst.name = j.at("name").get<std::string>();
    else
      rd.errors.emplace_back("field \"name\" must be a string");
  }
  inst.m = rd.dim("m");
  inst.n = rd.dim("n");
  inst.p = rd.dim("p");
  inst.r = rd.dim("r");
  inst.C = rd.matrix("C", inst.n);
  inst.b = rd.vector("b");
  inst.e = rd.vector("e");
  inst.P = rd.matrix("P", inst.r);
  inst.x0 = rd.vector("x0");
  inst.cu = rd.vector("cu");
  inst.d = rd.vector("d");
  inst.Au = rd.matrix("Au", inst.r);
  inst.B = rd.matrix("B", inst.n);
  inst.a = rd.vector("a");

  std::vector<std::string> errors = std::move(rd.errors);
  for (auto& v : validate(inst)) errors.push_back(std::move(v));
  if (!errors.empty()) throw InputError(std::move(errors));
  return inst;
}

BilevelInstance parse_instance(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    // e.byte is 1-based and points just past the offending character.
    const std::size_t at = e.byte > 0 ? std::min<std::size_t>(e.byte - 1, text.size()) : 0;
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < at; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw InputError({"JSON parse error at line " + std::to_string(line) + ", column " +
                      std::to_string(col) + ": " + e.what()});
  }
  return instance_from_json(j);
}

BilevelInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError({"cannot open instance file '" + path + "'"});
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_instance(ss.str());
}

std::string dump_instance(const BilevelInstance& inst) { return instance_to_json(inst).dump(2) + "\n"; }

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trace_csv_header(Index r, Index n) {
  std::string h = "outer_i,inner_j,mu,gap,dx_inf,upper_obj";
  for (Index q = 0; q < r; ++q) h += ",u" + std::to_string(q);
  for (Index q = 0; q < n; ++q) h += ",y" + std::to_string(q);
  return h;
}

void write_trace_csv(std::ostream& os, const std::vector<TraceRecord>& trace, Index r, Index n) {
  os << trace_csv_header(r, n) << "\n";
  for (const auto& rec : trace) {
    os << rec.outer_i << "," << rec.inner_j << "," << format_double(rec.mu) << ","
       << format_double(rec.gap) << "," << format_double(rec.dx_inf) << ","
       << format_double(rec.upper_objective);
    for (Index q = 0; q < r; ++q) os << "," << format_double(rec.u_bar(q));
    for (Index q = 0; q < n; ++q) os << "," << format_double(rec.y_bar(q));
    os << "\n";
  }
}

GridSpec parse_grid(const std::string& text, Index r) {
  std::vector<std::string> errors;
  std::vector<std::optional<GridAxis>> axes(static_cast<std::size_t>(r));
  for (const auto& raw : split(text, ',')) {
    const std::string item = trim(raw);
    const auto eq = item.find('=');
    if (item.size() < 2 || item[0] != 'u' || eq == std::string::npos) {
      errors.push_back("grid entry '" + item + "' is not of the form u<i>=...");
      continue;
    }
    const std::string idx_text = item.substr(1, eq - 1);
    long idx = -1;
    const auto [ptr, ec] = std::from_chars(idx_text.data(), idx_text.data() + idx_text.size(), idx);
    if (ec != std::errc() || ptr != idx_text.data() + idx_text.size() || idx < 0) {
      errors.push_back("grid entry '" + item + "' has a bad coordinate index");
      continue;
    }
    if (idx >= r) {
      errors.push_back("grid coordinate u" + std::to_string(idx) + " out of range (r=" +
                       std::to_string(r) + ")");
      continue;
    }
    auto& slot = axes[static_cast<std::size_t>(idx)];
    if (slot) {
      errors.push_back("grid coordinate u" + std::to_string(idx) + " given twice");
      continue;
    }
    std::string value = trim(item.substr(eq + 1));
    std::string lower = value;
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "free") {
      slot = GridFree{};
    } else if (value.find(':') != std::string::npos) {
      const auto parts = split(value, ':');
      GridRange rg;
      if (parts.size() != 3 || !parse_number(parts[0], rg.lo) || !parse_number(parts[1], rg.hi) ||
          !parse_number(parts[2], rg.step)) {
        errors.push_back("grid entry '" + item + "' is not lo:hi:step");
        continue;
      }
      if (!(rg.step > 0.0) || rg.lo > rg.hi) {
        errors.push_back("grid entry '" + item + "' needs step > 0 and lo <= hi");
        continue;
      }
      slot = rg;
    } else {
      GridFixed fx;
      if (!parse_number(value, fx.value)) {
        errors.push_back("grid entry '" + item + "' has a bad value");
        continue;
      }
      slot = fx;
    }
  }
  GridSpec spec;
  for (Index q = 0; q < r; ++q) {
    const auto& slot = axes[static_cast<std::size_t>(q)];
    if (!slot) {
      errors.push_back("grid coordinate u" + std::to_string(q) + " not specified");
      continue;
    }
    spec.axes.push_back(*slot);
  }
  if (!errors.empty()) throw InputError(std::move(errors));
  return spec;
}

Vector parse_vector(const std::string& text) {
  const auto parts = split(text, ',');
  Vector out(static_cast<Index>(parts.size()));
  std::vector<std::string> errors;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    double v = 0.0;
    if (!parse_number(parts[i], v)) errors.push_back("'" + trim(parts[i]) + "' is not a number");
    out(static_cast<Index>(i)) = v;
  }
  if (!errors.empty()) throw InputError(std::move(errors));
  return out;
}

}  // namespace palm
