// latinv: command-line front end. Each subcommand reads its inputs, writes
// its artifacts, and emits a JSON report (to --report, or stdout) while human
// progress goes to stderr.
#include <omp.h>

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cli_io.hpp"
#include "latinv/acceptance.hpp"
#include "latinv/defect_probe.hpp"
#include "latinv/network.hpp"
#include "latinv/reconstruction.hpp"
#include "latinv/scattering.hpp"
#include "latinv/spectral.hpp"

namespace fs = std::filesystem;
using namespace latinv;
using namespace latinv::cli;
using nlohmann::json;

namespace {

struct Common {
  std::string report;  // empty: stdout
};

void emit_report(const Common& c, const CLI::App& sub, json j) {
  j["command"] = sub.get_name();
  j["config"] = sub.config_to_str(false, false);
  write_json(c.report.empty() ? fs::path("-") : fs::path(c.report), j);
}

Convention convention_from(const std::string& s) {
  if (s == "modified") return Convention::Modified;
  if (s == "standard") return Convention::Standard;
  throw ParseError("convention must be 'modified' or 'standard'");
}

scattering::Potential read_potential(const std::string& path) {
  try {
    return scattering::potential_from_json(read_json(path));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(path + ": " + e.what());
  }
}

// ---------------------------------------------------------------- lattice

struct LatticeArgs {
  std::string kind = "hex";
  std::vector<int> window{-3, 3, -3, 3};
  std::string out, omega;
};

int run_lattice(const LatticeArgs& a, const Common& c, const CLI::App& sub) {
  if (a.window.size() != 4) throw ParseError("--window takes n1_min n1_max n2_min n2_max");
  const LatticeGraph g =
      build_lattice(lattice_kind_from_string(a.kind), {a.window[0], a.window[1], a.window[2], a.window[3]});
  g.check_invariants();
  json rep{{"lattice", a.kind}, {"vertices", g.size()}, {"edges", g.num_edges()}};
  if (!a.omega.empty()) {
    const RegionInput r = read_region(a.omega);
    rep["region"] = {{"interior", r.region.interior.size()}, {"boundary", r.region.boundary.size()}};
  }
  if (!a.out.empty()) write_json(a.out, graph_to_json(g));
  emit_report(c, sub, rep);
  return kOk;
}

// ---------------------------------------------------------------- spectral

struct FermiArgs {
  std::string lattice = "hex";
  double lambda = 0.5;
  int n = 256;
  int branch = -1;
  std::string out;
};

int run_fermi(const FermiArgs& a, const Common& c, const CLI::App& sub) {
  using namespace spectral;
  const Periodic p = periodic_from_string(a.lattice);
  int branch = a.branch;
  if (branch < 0)
    for (const Branch& b : branches(p))
      if (!b.flat && branch_level(p, b.index, a.lambda)) {
        branch = b.index;
        break;
      }
  if (branch < 0) throw AdmissibilityError("Fermi sampling", "no dispersive band reaches lambda");
  FermiSample s;
  try {
    s = fermi_sample(p, a.lambda, branch, a.n);
  } catch (const ThresholdError& e) {
    throw AdmissibilityError("Fermi sampling", e.what());
  } catch (const std::domain_error& e) {
    throw AdmissibilityError("Fermi sampling", e.what());
  }
  std::ostringstream csv;
  csv.precision(17);
  csv << "component,x1,x2,weight,curvature\n";
  json comps = json::array();
  for (std::size_t k = 0; k < s.components.size(); ++k) {
    const FermiCurve& fc = s.components[k];
    for (std::size_t i = 0; i < fc.points.size(); ++i)
      csv << k << ',' << fc.points[i][0] << ',' << fc.points[i][1] << ',' << fc.weight[i] << ',' << fc.curvature[i]
          << '\n';
    comps.push_back({{"points", fc.points.size()}, {"length", fc.length}, {"residual", fc.residual},
                     {"spacing_error", fc.spacing_error}});
  }
  if (!a.out.empty()) write_text(a.out, csv.str());
  emit_report(c, sub,
              {{"lattice", to_string(p)}, {"lambda", a.lambda}, {"branch", branch}, {"components", comps},
               {"tol", {{"residual", 1e-10}, {"spacing", 1e-6}}}});
  return kOk;
}

struct WindowArgs {
  std::string lattice = "hex";
  bool certify = false;
};

int run_windows(const WindowArgs& a, const Common& c, const CLI::App& sub) {
  using namespace spectral;
  const Periodic p = periodic_from_string(a.lattice);
  const ConvexWindowTable t = convex_windows(p, a.certify);
  json ws = json::array();
  for (const Window& w : t.windows)
    ws.push_back({{"lo", w.lo}, {"hi", w.hi}, {"excluded", w.excluded}, {"text", w.text},
                  {"epsilon_qualified", w.epsilon_qualified}, {"certified_epsilon", w.certified_epsilon}});
  emit_report(c, sub, {{"lattice", to_string(p)}, {"windows", ws}, {"thresholds", threshold_energies(p)}});
  return kOk;
}

// ---------------------------------------------------------------- bvp

struct DnArgs {
  std::string region, potential, convention = "modified", out;
  double lambda = 0.3;
};

int run_dnmap(const DnArgs& a, const Common& c, const CLI::App& sub) {
  const RegionInput r = read_region(a.region);
  const Convention conv = convention_from(a.convention);
  scattering::Potential V;
  if (!a.potential.empty()) V = read_potential(a.potential);
  std::vector<quad> v(r.region.interior.size(), quad(0));
  for (std::size_t k = 0; k < r.region.interior.size(); ++k) v[k] = quad(V.at(r.graph->vertices[r.region.interior[k]]));
  for (const VertexId& s : V.sites) {
    const int i = r.graph->index_of(s);
    if (i < 0 || !r.region.is_interior(i)) throw ParseError("potential site " + vertex_label(s) + " is not interior");
  }
  const quad lambda(a.lambda);
  const Potential<quad> pot = Potential<quad>::from_v(v, lambda);
  const RegularityReport reg = is_regular(assemble(r.region, pot, conv));
  if (!reg.regular)
    throw AdmissibilityError("Dirichlet regularity", "relative smallest singular value " + std::to_string(reg.ratio));
  const DNMap<quad> dn = dn_map(r.region, pot, lambda, conv);
  double asym = 0.0;
  for (Eigen::Index i = 0; i < dn.m.rows(); ++i)
    for (Eigen::Index j = 0; j < dn.m.cols(); ++j)
      asym = std::max(asym, to_double(scalar_abs(quad(dn.m(i, j) - dn.m(j, i)))));
  if (!a.out.empty()) write_text(a.out, dn_map_csv(dn));
  emit_report(c, sub,
              {{"convention", to_string(conv)},
               {"lambda", a.lambda},
               {"interior", r.region.interior.size()},
               {"boundary", r.region.boundary.size()},
               {"regularity_ratio", reg.ratio},
               {"regularity_threshold", 1e-10},
               {"max_asymmetry", asym}});
  return kOk;
}

// ---------------------------------------------------------------- reconstruct

struct ReconArgs {
  std::string dnmap, out, truth;
  double lambda = 0.3;
  int N = 4;
  double pattern_tol = 1e-6;
};

int run_reconstruct(const ReconArgs& a, const Common& c, const CLI::App& sub) {
  const HexParallelogram par = build_parallelogram(a.N);
  const quad lambda(a.lambda);
  const DNMap<quad> dn = read_dn_map_csv(a.dnmap, lambda, Convention::Modified);
  if (dn.boundary.size() != par.region.boundary.size())
    throw ParseError("D-N map has " + std::to_string(dn.boundary.size()) + " boundary vertices, the N = " +
                     std::to_string(a.N) + " parallelogram has " + std::to_string(par.region.boundary.size()));
  ReconstructionOptions opt;
  opt.pattern_tol = a.pattern_tol;
  ReconstructionResult<quad> res;
  try {
    res = reconstruct_potential(par, dn, lambda, opt);
  } catch (const ReconstructionError& e) {
    throw AdmissibilityError("reconstruction", e.what());
  }
  for (const std::string& line : res.log) std::cerr << line << '\n';
  json sites = json::array(), q = json::array();
  for (std::size_t k = 0; k < par.region.interior.size(); ++k) {
    const VertexId& v = par.graph->vertices[par.region.interior[k]];
    sites.push_back({{"j", v.j}, {"n1", v.n1}, {"n2", v.n2}, {"value", to_double(res.v[k])}});
    q.push_back(to_text(res.q[k]));
  }
  if (!a.out.empty()) write_json(a.out, {{"lambda", a.lambda}, {"sites", sites}, {"q", q}});
  json rep{{"N", a.N},
           {"lambda", a.lambda},
           {"probes_run", res.probes_run},
           {"probes_skipped", res.probes_skipped},
           {"general_extractions", res.general_extractions},
           {"rotation_consistency", res.rotation_consistency},
           {"tol", {{"pattern", a.pattern_tol}}}};
  int status = kOk;
  if (!a.truth.empty()) {
    const scattering::Potential T = read_potential(a.truth);
    double err = 0.0;
    for (std::size_t k = 0; k < par.region.interior.size(); ++k)
      err = std::max(err, std::abs(to_double(res.v[k]) - T.at(par.graph->vertices[par.region.interior[k]])));
    rep["max_error"] = err;
    rep["tol"]["max_error"] = 1e-7;
    if (!(err < 1e-7)) status = kCheck;
  }
  emit_report(c, sub, rep);
  return status;
}

// ---------------------------------------------------------------- network

struct NetArgs {
  std::string in, out;
  bool check_dn = false;
  bool critical = false;
  int max_steps = 10'000;
};

int run_reduce(const NetArgs& a, const Common& c, const CLI::App& sub) {
  network::ConductanceNetwork net;
  try {
    net = network::network_from_json(read_json(a.in));
    net.validate();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(a.in + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(a.in + ": " + e.what());
  }
  network::ReduceOptions opt;
  opt.check_dn = a.check_dn;
  opt.max_steps = a.max_steps;
  const network::ReductionResult red = network::reduce(net, opt);
  json steps = json::array();
  for (const auto& s : red.steps)
    steps.push_back({{"kind", network::to_string(s.transform.kind)}, {"vertices", s.vertices}, {"edges", s.edges},
                     {"arcs", s.arcs.count}, {"dn_change", s.dn_change}});
  json rep{{"vertices_before", net.num_vertices}, {"edges_before", net.edges.size()},
           {"vertices_after", red.net.num_vertices}, {"edges_after", red.net.edges.size()},
           {"complete", red.complete}, {"steps", steps}};
  int status = kOk;
  if (a.check_dn) {
    const double d = network::relative_difference(network::dn_map_res(net), network::dn_map_res(red.net));
    rep["dn_difference"] = d;
    rep["dn_tol"] = 1e-12;
    if (!(d < 1e-12)) status = kCheck;
  }
  if (a.critical) {
    const auto cr = network::is_critical(red.net, static_cast<int>(red.net.boundary.size()));
    rep["critical"] = network::to_string(cr.verdict);
    rep["critical_reason"] = cr.reason;
    if (cr.verdict == network::Tri::Unknown) status = std::max(status, static_cast<int>(kBudget));
  }
  if (!a.out.empty()) write_json(a.out, network::to_json(red.net));
  emit_report(c, sub, rep);
  if (!red.complete) throw BudgetError("reduction stopped after " + std::to_string(a.max_steps) + " steps");
  return status;
}

// ---------------------------------------------------------------- probe

struct ProbeArgs {
  int N = 6;
  std::string defect, dn_free, out, emit_dn;
  std::vector<std::string> dn_def, views;
  double lambda = 0.3;
  double tol = 1e-8;
};

defect::View parse_view(const std::string& s) {
  defect::View v;
  char c1 = 0, c2 = 0;
  std::istringstream in(s);
  if (!(in >> v.rotation >> c1 >> v.shift.a >> c2 >> v.shift.b) || c1 != ':' || c2 != ':')
    throw ParseError("view must be rotation:a:b, got '" + s + "'");
  return v;
}

json hull_json(const defect::HullResult& h, double lambda, double tol) {
  json dirs = json::array();
  for (const auto& d : h.directions)
    dirs.push_back({{"direction", defect::direction_name(d.direction)}, {"found", d.found}, {"level", d.level},
                    {"margin", d.report.margin}, {"max_equal", d.report.max_equal},
                    {"first_difference", d.report.first_difference}});
  json hs = json::array();
  if (h.complete)
    for (const auto& s : h.hull.half_spaces()) hs.push_back({s.i, s.j, s.k, s.sign});
  json levels = json::object();
  for (int d = 0; d < 6; ++d)
    if (h.directions.size() == 6 && h.directions[d].found) levels[defect::direction_name(d)] = h.hull.h[d];
  return {{"complete", h.complete}, {"lambda", lambda},   {"levels", levels}, {"half_spaces", hs},
          {"directions", dirs},     {"tol", {{"equal", tol}, {"margin", 1e-3}}}};
}

int run_probe(const ProbeArgs& a, const Common& c, const CLI::App& sub) {
  using namespace defect;
  const HexParallelogram par = build_parallelogram(a.N);
  DetectOptions opt;
  opt.tol = a.tol;
  json rep;
  if (!a.defect.empty()) {
    const json j = read_json(a.defect);
    Defect d;
    try {
      for (const auto& comp : j.at("components")) {
        std::vector<Eis> cells;
        for (const auto& cell : comp) cells.push_back(hex::cell_center(cell.at(0).get<int>(), cell.at(1).get<int>()));
        d.components.push_back(cells);
      }
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(a.defect + ": " + e.what());
    }
    try {
      check_separated(d);
      build_defect_region(par, d);
    } catch (const DefectPlacementError& e) {
      throw AdmissibilityError("defect placement", e.what());
    }
    const ProbeRun run = probe_defect(par, d, opt);
    if (run.views.empty()) throw AdmissibilityError("energy", "no energy in the retry list is admissible");
    rep = hull_json(run.hull, run.lambda, a.tol);
    rep["rejected_energies"] = run.rejected;
    json views = json::array();
    for (const View& v : run.views) views.push_back(std::to_string(v.rotation) + ":" + std::to_string(v.shift.a) + ":" + std::to_string(v.shift.b));
    rep["views"] = views;
    rep["geometric_hull_match"] = run.hull.complete && run.hull.hull == geometric_hull(d.cells());
    if (!a.emit_dn.empty()) {
      fs::create_directories(a.emit_dn);
      write_text(fs::path(a.emit_dn) / "dn_free.csv", dn_map_csv(free_dn_map(par, run.lambda)));
      for (std::size_t k = 0; k < run.views.size(); ++k) {
        const DefectRegion dr = build_defect_region(par, transform(d, run.views[k]));
        write_text(fs::path(a.emit_dn) / ("dn_def_" + std::to_string(k) + ".csv"),
                   dn_map_csv(defect_dn_map(par, dr, run.lambda)));
      }
    }
  } else {
    if (a.dn_free.empty() || a.dn_def.empty()) throw ParseError("probe needs --defect, or --dn-free and --dn-def");
    if (!a.views.empty() && a.views.size() != a.dn_def.size())
      throw ParseError("give one --view per --dn-def");
    const quad lambda(a.lambda);
    const DNMap<quad> free_dn = align_to(par, read_dn_map_csv(a.dn_free, lambda, Convention::Modified));
    std::vector<ViewData> views;
    for (std::size_t k = 0; k < a.dn_def.size(); ++k)
      views.push_back({a.views.empty() ? View{} : parse_view(a.views[k]),
                       align_to(par, read_dn_map_csv(a.dn_def[k], lambda, Convention::Modified))});
    rep = hull_json(convex_hull_of_defect(par, free_dn, views, opt), a.lambda, a.tol);
  }
  if (!a.out.empty()) write_json(a.out, rep);
  emit_report(c, sub, rep);
  return kOk;
}

// ---------------------------------------------------------------- smatrix

struct SArgs {
  std::string lattice = "hex", potential, cache, s_out;
  double lambda = 0.6;
  int fermi_n = 128;
  std::vector<int> hexagon;  // interior = hexagon cell (n1, n2); default: support of V
  bool serial = false;
};

int run_smatrix(const SArgs& a, const Common& c, const CLI::App& sub) {
  using namespace scattering;
  const LatticeKind kind = lattice_kind_from_string(a.lattice);
  const scattering::Potential V = read_potential(a.potential);
  GreenOptions go;
  go.parallel = !a.serial;

  std::optional<GreenTable> table;
  if (!a.cache.empty() && fs::exists(a.cache)) {
    try {
      GreenTable t = GreenTable::from_json(read_json(a.cache));
      if (t.lattice().kind == kind && t.lambda() == a.lambda && t.options().quad_tol == go.quad_tol) {
        table.emplace(std::move(t));
        std::cerr << "green cache: " << table->size() << " entries from " << a.cache << '\n';
      } else {
        std::cerr << "green cache: key mismatch, ignoring " << a.cache << '\n';
      }
    } catch (const std::exception& e) {
      throw ParseError(a.cache + ": " + e.what());
    }
  }
  if (!table) table.emplace(kind, a.lambda, go);
  GreenTable& G = *table;

  try {
    check_admissible(G.lattice(), a.lambda, go);
  } catch (const spectral::ThresholdError& e) {
    throw AdmissibilityError("energy", e.what());
  } catch (const std::domain_error& e) {
    throw AdmissibilityError("energy", e.what());
  }

  std::vector<VertexId> interior = V.sites;
  if (!a.hexagon.empty()) {
    if (a.hexagon.size() != 2 || kind != LatticeKind::Hexagonal) throw ParseError("--hexagon takes n1 n2 on the hexagonal lattice");
    interior = hexagon_vertices(a.hexagon[0], a.hexagon[1]);
  }
  if (interior.empty()) throw ParseError("empty potential: pass --hexagon to fix the interface");
  const Interface I = make_interface(kind, interior);

  Amplitude amp;
  AmplitudeIdentityReport id;
  double recip = 0.0;
  try {
    amp = scattering_amplitude(G, V, a.fermi_n);
    recip = reciprocity_defect(G, V, amp.grid);
    id = verify_amplitude_identity(G, I, V, a.fermi_n);
  } catch (const ResonanceError& e) {
    throw AdmissibilityError("resolvent", e.what());
  } catch (const SingularBoundaryError& e) {
    throw AdmissibilityError("boundary density", e.what());
  } catch (const spectral::ThresholdError& e) {
    throw AdmissibilityError("Fermi sampling", e.what());
  } catch (const QuadratureBudgetError& e) {
    throw BudgetError(e.what());
  }
  if (!a.cache.empty()) write_json(a.cache, G.to_json());
  if (!a.s_out.empty()) {
    std::ostringstream csv;
    csv.precision(17);
    csv << "row,col,x1_row,x2_row,x1_col,x2_col,re,im\n";
    for (Eigen::Index i = 0; i < amp.S.rows(); ++i)
      for (Eigen::Index j = 0; j < amp.S.cols(); ++j)
        csv << i << ',' << j << ',' << amp.grid.x[i][0] << ',' << amp.grid.x[i][1] << ',' << amp.grid.x[j][0] << ','
            << amp.grid.x[j][1] << ',' << amp.S(i, j).real() << ',' << amp.S(i, j).imag() << '\n';
    write_text(a.s_out, csv.str());
  }
  json rep{{"lattice", a.lattice},
           {"lambda", a.lambda},
           {"fermi_n", a.fermi_n},
           {"samples", amp.grid.x.size()},
           {"sigma_size", I.sigma.size()},
           {"unitarity", amp.unitarity},
           {"unitarity_tol", 1e-3},
           {"reciprocity_defect", recip},
           {"identity", to_json(id)},
           {"identity_tol", 1e-3},
           {"green_max_error", G.max_error()},
           {"green_entries", G.size()}};
  emit_report(c, sub, rep);
  if (!id.stage.empty()) throw AdmissibilityError("amplitude identity", id.stage);
  return (id.residual < 1e-3 && amp.unitarity < 1e-3) ? kOk : kCheck;
}

// ---------------------------------------------------------------- selftest

struct SelfArgs {
  std::vector<int> which;
  bool serial = false;
};

int run_selftest(const SelfArgs& a, const Common& c, const CLI::App& sub) {
  acceptance::Options opt;
  opt.parallel = !a.serial;
  const auto rs = acceptance::run(opt, a.which, [](const std::string& line) { std::cerr << line << std::endl; });
  json arr = json::array();
  for (const auto& r : rs)
    arr.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"unattainable", r.unattainable},
                   {"summary", r.summary}, {"seconds", r.seconds}, {"data", r.data}});
  emit_report(c, sub, {{"criteria", arr}, {"all_pass", acceptance::all_pass(rs)}});
  return acceptance::all_pass(rs) ? kOk : kCheck;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inverse problems on perturbed periodic lattices"};
  app.set_config("--config", "", "TOML or INI file with option values");
  app.require_subcommand(0, 1);
  app.fallthrough();
  Common common;
  int threads = 0;
  app.add_option("--report", common.report, "JSON report path (default: stdout)");
  app.add_option("--threads", threads, "OpenMP thread count")->check(CLI::NonNegativeNumber);

  LatticeArgs la;
  auto* lat = app.add_subcommand("lattice", "Build a lattice window and report its size");
  lat->add_option("--kind", la.kind, "hex, square or triangular");
  lat->add_option("--window", la.window, "n1_min n1_max n2_min n2_max")->expected(4);
  lat->add_option("--omega", la.omega, "region file to close inside the lattice");
  lat->add_option("--out", la.out, "graph JSON");

  auto* spectral_cmd = app.add_subcommand("spectral", "Fermi curves and convexity windows");
  spectral_cmd->require_subcommand(1);
  FermiArgs fa;
  auto* fermi = spectral_cmd->add_subcommand("fermi", "Sample a Fermi curve to CSV");
  fermi->add_option("--lattice", fa.lattice);
  fermi->add_option("--lambda", fa.lambda)->required();
  fermi->add_option("--n", fa.n, "points per component")->check(CLI::PositiveNumber);
  fermi->add_option("--branch", fa.branch, "band branch (default: first dispersive band at lambda)");
  fermi->add_option("--out", fa.out, "CSV of component,x1,x2,weight,curvature");
  WindowArgs wa;
  auto* win = spectral_cmd->add_subcommand("windows", "Energy windows with strictly convex Fermi curves");
  win->add_option("--lattice", wa.lattice);
  win->add_flag("--certify", wa.certify, "bisect the epsilon-qualified windows");

  auto* bvp = app.add_subcommand("bvp", "Interior boundary value problems");
  bvp->require_subcommand(1);
  DnArgs da;
  auto* dnm = bvp->add_subcommand("dnmap", "D-N map of a region to CSV");
  dnm->add_option("--region", da.region)->required()->check(CLI::ExistingFile);
  dnm->add_option("--potential", da.potential)->check(CLI::ExistingFile);
  dnm->add_option("--lambda", da.lambda);
  dnm->add_option("--convention", da.convention, "modified or standard");
  dnm->add_option("--out", da.out, "CSV path");

  ReconArgs ra;
  auto* rec = app.add_subcommand("reconstruct", "Recover the potential of a parallelogram from its D-N map");
  rec->add_option("--dnmap", ra.dnmap)->required()->check(CLI::ExistingFile);
  rec->add_option("--lambda", ra.lambda);
  rec->add_option("--N", ra.N)->check(CLI::PositiveNumber);
  rec->add_option("--pattern-tol", ra.pattern_tol);
  rec->add_option("--out", ra.out, "potential JSON");
  rec->add_option("--truth", ra.truth, "potential JSON to compare against")->check(CLI::ExistingFile);

  auto* netc = app.add_subcommand("network", "Resistor networks");
  netc->require_subcommand(1);
  NetArgs na;
  auto* red = netc->add_subcommand("reduce", "Reduce a network by elementary transforms");
  red->add_option("--in", na.in)->required()->check(CLI::ExistingFile);
  red->add_option("--out", na.out);
  red->add_flag("--check-dn", na.check_dn, "compare response matrices before and after");
  red->add_flag("--critical", na.critical, "test the result for criticality");
  red->add_option("--max-steps", na.max_steps);

  ProbeArgs pa;
  auto* prb = app.add_subcommand("probe", "Hexagonal hull of a defect from D-N data");
  prb->add_option("--parallelogram", pa.N)->check(CLI::PositiveNumber);
  prb->add_option("--defect", pa.defect, "defect JSON; builds both D-N maps internally")->check(CLI::ExistingFile);
  prb->add_option("--dn-free", pa.dn_free)->check(CLI::ExistingFile);
  prb->add_option("--dn-def", pa.dn_def, "one per view")->check(CLI::ExistingFile);
  prb->add_option("--view", pa.views, "rotation:a:b for each --dn-def");
  prb->add_option("--lambda", pa.lambda);
  prb->add_option("--tol", pa.tol, "equality tolerance relative to the probe data");
  prb->add_option("--out", pa.out, "hull JSON");
  prb->add_option("--emit-dn", pa.emit_dn, "directory for the D-N maps used (with --defect)");

  SArgs sa;
  auto* sm = app.add_subcommand("smatrix", "Scattering amplitude and its D-N map identity");
  sm->add_option("--lattice", sa.lattice);
  sm->add_option("--potential", sa.potential)->required()->check(CLI::ExistingFile);
  sm->add_option("--lambda", sa.lambda);
  sm->add_option("--fermi-n", sa.fermi_n)->check(CLI::PositiveNumber);
  sm->add_option("--hexagon", sa.hexagon, "interior = hexagon cell n1 n2")->expected(2);
  sm->add_option("--cache", sa.cache, "Green kernel cache JSON");
  sm->add_option("--s-out", sa.s_out, "CSV of the S matrix");
  sm->add_flag("--serial", sa.serial);

  SelfArgs sf;
  auto* st = app.add_subcommand("selftest", "Run the acceptance criteria");
  st->add_option("criteria", sf.which, "criterion numbers (default: all)");
  st->add_flag("--serial", sf.serial);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kParse;
  }
  if (argc == 1) {
    std::cout << app.help();
    return kParse;
  }
  if (threads > 0) omp_set_num_threads(threads);

  try {
    if (*lat) return run_lattice(la, common, *lat);
    if (*fermi) return run_fermi(fa, common, *fermi);
    if (*win) return run_windows(wa, common, *win);
    if (*dnm) return run_dnmap(da, common, *dnm);
    if (*rec) return run_reconstruct(ra, common, *rec);
    if (*red) return run_reduce(na, common, *red);
    if (*prb) return run_probe(pa, common, *prb);
    if (*sm) return run_smatrix(sa, common, *sm);
    if (*st) return run_selftest(sf, common, *st);
    std::cout << app.help();
    return kParse;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kParse;
  } catch (const AdmissibilityError& e) {
    std::cerr << "not admissible at stage '" << e.stage() << "': " << e.what() << '\n';
    return kAdmissibility;
  } catch (const RegularityError& e) {
    std::cerr << "not admissible at stage 'Dirichlet regularity': " << e.what() << '\n';
    return kAdmissibility;
  } catch (const spectral::ThresholdError& e) {
    std::cerr << "not admissible at stage 'energy': " << e.what() << '\n';
    return kAdmissibility;
  } catch (const scattering::QuadratureBudgetError& e) {
    std::cerr << "budget exhausted: " << e.what() << '\n';
    return kBudget;
  } catch (const BudgetError& e) {
    std::cerr << "budget exhausted: " << e.what() << '\n';
    return kBudget;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUnexpected;
  }
}
