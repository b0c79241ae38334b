#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "palm/algorithm.hpp"
#include "palm/model.hpp"
#include "palm/oracle.hpp"

namespace palm {

/// Malformed instance or grid text. `violations` lists every problem found.
class InputError : public std::runtime_error {
 public:
  explicit InputError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

/// Instance <-> JSON. Matrices are arrays of rows; P has m*n rows in
/// column-major vec order. Shape problems are collected, not thrown one by one.
nlohmann::json instance_to_json(const BilevelInstance& inst);
BilevelInstance instance_from_json(const nlohmann::json& j);

/// Parses text; JSON syntax errors are reported with line and column.
BilevelInstance parse_instance(const std::string& text);
BilevelInstance load_instance(const std::string& path);
std::string dump_instance(const BilevelInstance& inst);

/// `outer_i,inner_j,mu,gap,dx_inf,upper_obj,u0..u{r-1},y0..y{n-1}`
std::string trace_csv_header(Index r, Index n);
void write_trace_csv(std::ostream& os, const std::vector<TraceRecord>& trace, Index r, Index n);

/// Comma-separated `u<i>=<lo>:<hi>:<step>`, `u<i>=<value>` or `u<i>=free`.
/// Every coordinate 0..r-1 must appear exactly once.
GridSpec parse_grid(const std::string& text, Index r);

/// Comma-separated list of numbers.
Vector parse_vector(const std::string& text);

/// printf-style %.17g.
std::string format_double(double v);

}  // namespace palm
