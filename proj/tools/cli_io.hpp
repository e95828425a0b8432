#pragma once
// File formats and error classes for the command-line tool.
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "latinv/bvp.hpp"
#include "latinv/parallelogram.hpp"

namespace latinv::cli {

// Exit statuses. Anything not listed maps to 1.
enum Exit : int {
  kOk = 0,
  kUnexpected = 1,
  kParse = 2,          // command line, missing files, malformed JSON or CSV
  kAdmissibility = 3,  // energy or regularity assumptions fail at a named stage
  kBudget = 4,         // a step or quadrature budget ran out
  kCheck = 5,          // a requested verification did not meet its tolerance
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class AdmissibilityError : public std::runtime_error {
 public:
  AdmissibilityError(std::string stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

nlohmann::json read_json(const std::filesystem::path& p);
// Writes with two-space indentation and a trailing newline; "-" means stdout.
void write_json(const std::filesystem::path& p, const nlohmann::json& j);
void write_text(const std::filesystem::path& p, const std::string& s);

std::string vertex_label(const VertexId& v);  // "j:n1:n2"
VertexId parse_vertex_label(const std::string& s);
VertexId vertex_from_json(const nlohmann::json& j);  // [j, n1, n2] or {"j","n1","n2"}

// D-N matrix CSV: header row of boundary vertex labels, then one row per
// boundary vertex in the same order, values printed to round-trip in binary128.
std::string dn_map_csv(const DNMap<quad>& dn);
DNMap<quad> read_dn_map_csv(const std::filesystem::path& p, const quad& lambda, Convention conv);

// Region file: {"parallelogram": N} or {"lattice": kind, "omega": [[j,n1,n2], ...]}.
struct RegionInput {
  std::shared_ptr<const LatticeGraph> graph;
  Region region;
  std::optional<HexParallelogram> par;
};
RegionInput read_region(const std::filesystem::path& p);

}  // namespace latinv::cli
