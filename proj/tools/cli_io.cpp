#include "cli_io.hpp"

#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace latinv::cli {

namespace fs = std::filesystem;

nlohmann::json read_json(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw ParseError("cannot open " + p.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(p.string() + ": " + e.what());
  }
}

void write_text(const fs::path& p, const std::string& s) {
  if (p == "-") {
    std::cout << s;
    return;
  }
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ParseError("cannot write " + p.string());
  out << s;
}

void write_json(const fs::path& p, const nlohmann::json& j) { write_text(p, j.dump(2) + "\n"); }

std::string vertex_label(const VertexId& v) {
  return std::to_string(v.j) + ":" + std::to_string(v.n1) + ":" + std::to_string(v.n2);
}

VertexId parse_vertex_label(const std::string& s) {
  VertexId v;
  char c1 = 0, c2 = 0;
  std::istringstream in(s);
  if (!(in >> v.j >> c1 >> v.n1 >> c2 >> v.n2) || c1 != ':' || c2 != ':')
    throw ParseError("bad vertex label '" + s + "'");
  return v;
}

VertexId vertex_from_json(const nlohmann::json& j) {
  if (j.is_array() && j.size() == 3) return {j[0].get<int>(), j[1].get<int>(), j[2].get<int>()};
  if (j.is_object()) return {j.at("j").get<int>(), j.at("n1").get<int>(), j.at("n2").get<int>()};
  throw ParseError("vertex must be [j, n1, n2]");
}

std::string dn_map_csv(const DNMap<quad>& dn) {
  std::string s;
  for (std::size_t k = 0; k < dn.boundary.size(); ++k) s += (k ? "," : "") + vertex_label(dn.boundary[k]);
  s += '\n';
  for (Eigen::Index i = 0; i < dn.m.rows(); ++i) {
    for (Eigen::Index j = 0; j < dn.m.cols(); ++j) s += (j ? "," : "") + to_text(dn.m(i, j));
    s += '\n';
  }
  return s;
}

namespace {
std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    out.push_back(cell);
  }
  return out;
}
}  // namespace

DNMap<quad> read_dn_map_csv(const fs::path& p, const quad& lambda, Convention conv) {
  std::ifstream in(p);
  if (!in) throw ParseError("cannot open " + p.string());
  std::string line;
  if (!std::getline(in, line)) throw ParseError(p.string() + ": empty file");
  DNMap<quad> dn;
  dn.lambda = lambda;
  dn.convention = conv;
  dn.rule = default_rule(conv);
  for (const std::string& c : split(line)) dn.boundary.push_back(parse_vertex_label(c));
  const auto m = static_cast<Eigen::Index>(dn.boundary.size());
  if (std::set<VertexId>(dn.boundary.begin(), dn.boundary.end()).size() != dn.boundary.size())
    throw ParseError(p.string() + ": repeated boundary vertex in header");
  dn.m.resize(m, m);
  Eigen::Index row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (row >= m || static_cast<Eigen::Index>(cells.size()) != m)
      throw ParseError(p.string() + ": matrix is not " + std::to_string(m) + " x " + std::to_string(m));
    for (Eigen::Index j = 0; j < m; ++j) {
      try {
        dn.m(row, j) = from_text<quad>(cells[j]);
      } catch (const std::exception&) {
        throw ParseError(p.string() + ": bad number '" + cells[j] + "'");
      }
    }
    ++row;
  }
  if (row != m) throw ParseError(p.string() + ": expected " + std::to_string(m) + " rows, found " + std::to_string(row));
  return dn;
}

RegionInput read_region(const fs::path& p) {
  const nlohmann::json j = read_json(p);
  RegionInput out;
  try {
    if (j.contains("parallelogram")) {
      out.par = build_parallelogram(j.at("parallelogram").get<int>());
      out.graph = out.par->graph;
      out.region = out.par->region;
      return out;
    }
    const LatticeKind kind = lattice_kind_from_string(j.at("lattice").get<std::string>());
    std::vector<VertexId> omega;
    for (const auto& v : j.at("omega")) omega.push_back(vertex_from_json(v));
    if (omega.empty()) throw ParseError(p.string() + ": empty omega");
    std::set<VertexId> closure(omega.begin(), omega.end());
    for (const VertexId& v : omega)
      for (const VertexId& w : lattice_neighbors(kind, v)) closure.insert(w);
    auto g = std::make_shared<LatticeGraph>(induced_subgraph(kind, {closure.begin(), closure.end()}));
    out.region = close_region(*g, omega);
    out.graph = g;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(p.string() + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(p.string() + ": " + e.what());
  }
  return out;
}

}  // namespace latinv::cli
