#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "latinv/scattering.hpp"

namespace latinv::scattering {

namespace {

constexpr double kPi = std::numbers::pi;

double spectral_norm(const Eigen::MatrixXcd& M) {
  if (M.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Eigen::MatrixXcd>(M).singularValues()(0);
}

double min_singular(const Eigen::MatrixXcd& M) {
  const auto sv = Eigen::JacobiSVD<Eigen::MatrixXcd>(M).singularValues();
  return sv(sv.size() - 1) / sv(0);
}

std::vector<VertexId> merge(std::vector<VertexId> a, const std::vector<VertexId>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

Eigen::VectorXcd potential_values(const Potential& V) {
  Eigen::VectorXcd v(V.sites.size());
  for (std::size_t k = 0; k < V.sites.size(); ++k) v[k] = V.values[k];
  return v;
}

// Stage-tagged rethrow so failures name the step that raised them.
template <class F>
auto stage(const char* name, F&& f) {
  try {
    return f();
  } catch (const spectral::ThresholdError& e) {
    throw spectral::ThresholdError(std::string(name) + ": " + e.what(), e.distance());
  } catch (const ResonanceError& e) {
    throw ResonanceError(std::string(name) + ": " + e.what());
  } catch (const SingularBoundaryError& e) {
    throw SingularBoundaryError(std::string(name) + ": " + e.what());
  } catch (const QuadratureBudgetError& e) {
    throw QuadratureBudgetError(std::string(name) + ": " + e.what());
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string(name) + ": " + e.what());
  }
}

// Frobenius norm of W^(1/2) M W^(-1/2), the operator on h_lambda.
double weighted_norm(const FermiGrid& F, const Eigen::MatrixXcd& M) {
  Eigen::ArrayXd w(F.weight.size());
  for (std::size_t k = 0; k < F.weight.size(); ++k) w[k] = std::sqrt(F.weight[k]);
  Eigen::MatrixXcd X = M;
  for (int r = 0; r < X.rows(); ++r)
    for (int c = 0; c < X.cols(); ++c) X(r, c) *= w[r] / w[c];
  return X.norm();
}

}  // namespace

double Potential::at(const VertexId& v) const {
  for (std::size_t k = 0; k < sites.size(); ++k)
    if (sites[k] == v) return values[k];
  return 0.0;
}

nlohmann::json to_json(const Potential& V) {
  nlohmann::json j = nlohmann::json::array();
  for (std::size_t k = 0; k < V.sites.size(); ++k)
    j.push_back({{"j", V.sites[k].j}, {"n1", V.sites[k].n1}, {"n2", V.sites[k].n2}, {"value", V.values[k]}});
  return j;
}

Potential potential_from_json(const nlohmann::json& j) {
  Potential V;
  const auto& list = j.is_object() ? j.at("sites") : j;
  for (const auto& e : list) {
    V.sites.push_back({e.at("j").get<int>(), e.at("n1").get<int>(), e.at("n2").get<int>()});
    V.values.push_back(e.at("value").get<double>());
  }
  std::set<VertexId> seen(V.sites.begin(), V.sites.end());
  if (seen.size() != V.sites.size()) throw std::invalid_argument("potential lists a site twice");
  return V;
}

Eigen::MatrixXcd perturbed_resolvent(GreenTable& G, const Potential& V, const std::vector<VertexId>& rows,
                                     const std::vector<VertexId>& cols, int sign) {
  const Eigen::MatrixXcd Grc = G.block(rows, cols, sign);
  if (V.sites.empty()) return Grc;
  const Eigen::MatrixXcd Grs = G.block(rows, V.sites, sign);
  const Eigen::MatrixXcd Gsc = G.block(V.sites, cols, sign);
  const Eigen::MatrixXcd Gss = G.block(V.sites, V.sites, sign);
  const Eigen::VectorXcd v = potential_values(V);
  const Eigen::MatrixXcd K =
      Eigen::MatrixXcd::Identity(V.sites.size(), V.sites.size()) + Gss * v.asDiagonal();
  if (min_singular(K) < 1e-12)
    throw ResonanceError("1 + R0 V is singular at lambda = " + std::to_string(G.lambda()));
  const Eigen::MatrixXcd X = K.partialPivLu().solve(Gsc);
  return Grc - Grs * v.asDiagonal() * X;
}

double resolvent_equation_residual(GreenTable& G, const Potential& V, const std::vector<VertexId>& at,
                                   const std::vector<VertexId>& cols) {
  const LatticeKind kind = G.lattice().kind;
  std::vector<VertexId> rows = at;
  for (const VertexId& a : at) rows = merge(rows, lattice_neighbors(kind, a));
  const Eigen::MatrixXcd R = perturbed_resolvent(G, V, rows, cols);
  auto row = [&](const VertexId& v) {
    return static_cast<int>(std::lower_bound(rows.begin(), rows.end(), v) - rows.begin());
  };
  const double inv_deg = 1.0 / G.lattice().degree;
  double worst = 0.0;
  for (const VertexId& a : at)
    for (std::size_t c = 0; c < cols.size(); ++c) {
      cd s = (V.at(a) - G.lambda()) * R(row(a), c);
      for (const VertexId& b : lattice_neighbors(kind, a)) s -= inv_deg * R(row(b), c);
      if (a == cols[c]) s -= 1.0;
      worst = std::max(worst, std::abs(s));
    }
  return worst;
}

std::vector<VertexId> hexagon_vertices(int n1, int n2) {
  std::vector<VertexId> out;
  for (const Eis& e : hex::cell_corners(hex::cell_center(n1, n2))) out.push_back(hex::from_eis(e));
  std::sort(out.begin(), out.end());
  return out;
}

Interface make_interface(LatticeKind kind, const std::vector<VertexId>& interior) {
  Interface I;
  I.kind = kind;
  I.degree = lattice_degree(kind);
  I.interior = merge(interior, {});
  if (I.interior.empty()) throw std::invalid_argument("empty interior set");
  const std::set<VertexId> in(I.interior.begin(), I.interior.end());
  std::set<VertexId> sig;
  for (const VertexId& a : I.interior)
    for (const VertexId& b : lattice_neighbors(kind, a))
      if (!in.count(b)) sig.insert(b);
  I.sigma.assign(sig.begin(), sig.end());
  std::set<VertexId> outer;
  for (const VertexId& s : I.sigma) {
    int di = 0, de = 0;
    for (const VertexId& b : lattice_neighbors(kind, s)) {
      if (in.count(b)) ++di;
      else if (!sig.count(b)) ++de, outer.insert(b);
    }
    if (de == 0) throw std::invalid_argument("a Sigma vertex has no exterior neighbour");
    I.deg_int.push_back(di);
    I.deg_ext.push_back(de);
  }
  I.outer.assign(outer.begin(), outer.end());
  return I;
}

ExteriorSolution exterior_dirichlet(GreenTable& G, const std::vector<VertexId>& sigma, const Eigen::VectorXcd& f,
                                    const std::vector<VertexId>& at, int sign) {
  const Eigen::MatrixXcd Gss = G.block(sigma, sigma, sign);
  if (min_singular(Gss) < 1e-12) throw SingularBoundaryError("boundary Green matrix is singular");
  ExteriorSolution sol;
  sol.psi = Gss.partialPivLu().solve(f);
  sol.u = G.block(at, sigma, sign) * sol.psi;
  return sol;
}

Eigen::MatrixXcd exterior_dn_map(GreenTable& G, const Interface& I, int sign) {
  const int m = static_cast<int>(I.sigma.size());
  const Eigen::MatrixXcd Gss = G.block(I.sigma, I.sigma, sign);
  if (min_singular(Gss) < 1e-12) throw SingularBoundaryError("boundary Green matrix is singular");
  const Eigen::MatrixXcd U = G.block(I.outer, I.sigma, sign) * Gss.partialPivLu().inverse();
  const std::set<VertexId> sig(I.sigma.begin(), I.sigma.end());
  Eigen::MatrixXcd L = Eigen::MatrixXcd::Zero(m, m);
  for (int s = 0; s < m; ++s)
    for (const VertexId& b : lattice_neighbors(I.kind, I.sigma[s])) {
      auto it = std::lower_bound(I.outer.begin(), I.outer.end(), b);
      if (it == I.outer.end() || !(*it == b)) continue;
      L.row(s) += U.row(it - I.outer.begin()) / double(I.deg_ext[s]);
    }
  return L;
}

Eigen::MatrixXcd interior_dn_map(const Interface& I, const Potential& V, double lambda) {
  const int n = static_cast<int>(I.interior.size()), m = static_cast<int>(I.sigma.size());
  auto pos = [](const std::vector<VertexId>& list, const VertexId& v) {
    auto it = std::lower_bound(list.begin(), list.end(), v);
    return (it != list.end() && *it == v) ? static_cast<int>(it - list.begin()) : -1;
  };
  for (const VertexId& s : V.sites)
    if (pos(I.interior, s) < 0) throw std::invalid_argument("potential site outside the interior set");
  const double inv_deg = 1.0 / I.degree;
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n), N = Eigen::MatrixXd::Zero(n, m);
  for (int a = 0; a < n; ++a) {
    K(a, a) = V.at(I.interior[a]) - lambda;
    for (const VertexId& b : lattice_neighbors(I.kind, I.interior[a])) {
      if (int k = pos(I.interior, b); k >= 0) K(a, k) -= inv_deg;
      else N(a, pos(I.sigma, b)) += inv_deg;
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(K);
  if (svd.singularValues()(n - 1) < 1e-10 * svd.singularValues()(0))
    throw std::domain_error("lambda is a Dirichlet eigenvalue of the interior problem");
  const Eigen::MatrixXd U = K.fullPivLu().solve(N);
  Eigen::MatrixXcd L = Eigen::MatrixXcd::Zero(m, m);
  for (int s = 0; s < m; ++s)
    for (const VertexId& b : lattice_neighbors(I.kind, I.sigma[s]))
      if (int k = pos(I.interior, b); k >= 0) L.row(s) -= U.row(k).cast<cd>() / double(I.deg_int[s]);
  return L;
}

namespace {
// M_int Lambda_int - M_ext Lambda_ext - S_Sigma - lambda.
Eigen::MatrixXcd assemble_B(const Interface& I, const Eigen::MatrixXcd& Lint, const Eigen::MatrixXcd& Lext,
                            double lambda) {
  const int m = static_cast<int>(I.sigma.size());
  const double d = I.degree;
  Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(m, m);
  for (int s = 0; s < m; ++s) {
    B.row(s) += (I.deg_int[s] / d) * Lint.row(s) - (I.deg_ext[s] / d) * Lext.row(s);
    B(s, s) -= lambda;
    for (const VertexId& b : lattice_neighbors(I.kind, I.sigma[s])) {
      auto it = std::lower_bound(I.sigma.begin(), I.sigma.end(), b);
      if (it != I.sigma.end() && *it == b) B(s, it - I.sigma.begin()) -= 1.0 / d;
    }
  }
  return B;
}
}  // namespace

LayerOperators layer_operators(GreenTable& G, const Interface& I, const Potential& V) {
  LayerOperators L;
  L.sigma = I.sigma;
  const int m = static_cast<int>(I.sigma.size());
  const Eigen::MatrixXcd Id = Eigen::MatrixXcd::Identity(m, m);
  L.M_plus = stage("M_Sigma", [&] { return perturbed_resolvent(G, V, I.sigma, I.sigma, +1); });
  L.M_minus = stage("M_Sigma", [&] { return perturbed_resolvent(G, V, I.sigma, I.sigma, -1); });
  if (min_singular(L.M_plus) < 1e-12) throw std::runtime_error("B_Sigma: M_Sigma is not invertible");
  L.B_plus = L.M_plus.inverse();
  L.B_minus = L.M_minus.inverse();
  const Eigen::MatrixXcd Lint = stage("interior D-N map", [&] { return interior_dn_map(I, V, G.lambda()); });
  const Eigen::MatrixXcd Lp = stage("exterior D-N map", [&] { return exterior_dn_map(G, I, +1); });
  const Eigen::MatrixXcd Lm = stage("exterior D-N map", [&] { return exterior_dn_map(G, I, -1); });
  L.B_assembled_plus = assemble_B(I, Lint, Lp, G.lambda());
  L.B_assembled_minus = assemble_B(I, Lint, Lm, G.lambda());
  L.layer_identity = spectral_norm(L.M_plus * L.B_assembled_plus - Id);
  L.layer_identity_minus = spectral_norm(L.M_minus * L.B_assembled_minus - Id);
  L.adjoint = spectral_norm(L.M_minus.adjoint() - L.M_plus) / spectral_norm(L.M_plus);
  L.routes = spectral_norm(L.B_plus - L.B_assembled_plus) / spectral_norm(L.B_plus);
  L.cross = spectral_norm(L.M_plus * L.B_assembled_minus.adjoint() - Id);
  return L;
}

FermiGrid fermi_grid(const FreeLattice& L, double lambda, int count) {
  FermiGrid F;
  F.lambda = lambda;
  F.per_component = count;
  int comp = 0;
  for (const spectral::Branch& b : spectral::branches(L.periodic)) {
    if (b.flat || !spectral::branch_level(L.periodic, b.index, lambda)) continue;
    const spectral::FermiSample fs = spectral::fermi_sample(L.periodic, lambda, b.index, count);
    for (const spectral::FermiCurve& c : fs.components) {
      const double step = c.length / c.points.size();
      for (std::size_t k = 0; k < c.points.size(); ++k) {
        const auto& x = c.points[k];
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(free_symbol(L, x[0], x[1]));
        int best = 0;
        for (int e = 1; e < es.eigenvalues().size(); ++e)
          if (std::abs(es.eigenvalues()[e] - lambda) < std::abs(es.eigenvalues()[best] - lambda)) best = e;
        if (std::abs(es.eigenvalues()[best] - lambda) > 1e-8)
          throw std::logic_error("Fermi sample is not on the level set of the symbol");
        F.x.push_back(x);
        F.weight.push_back(step * c.weight[k]);
        F.a.push_back(es.eigenvectors().col(best));
        F.component.push_back(comp);
      }
      ++comp;
    }
  }
  if (F.x.empty()) throw std::domain_error("empty Fermi level set");
  return F;
}

Eigen::MatrixXcd fermi_trace(const FreeLattice& L, const FermiGrid& F, const std::vector<VertexId>& vs) {
  const double c = std::sqrt(double(L.degree)) / (2 * kPi);
  Eigen::MatrixXcd T(F.x.size(), vs.size());
  for (std::size_t k = 0; k < F.x.size(); ++k)
    for (std::size_t b = 0; b < vs.size(); ++b)
      T(k, b) = c * std::conj(F.a[k][vs[b].j - 1]) *
                std::polar(1.0, -(vs[b].n1 * F.x[k][0] + vs[b].n2 * F.x[k][1]));
  return T;
}

Eigen::MatrixXcd fermi_adjoint(const FreeLattice& L, const FermiGrid& F, const std::vector<VertexId>& vs) {
  Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(F.weight.data(), F.weight.size());
  return fermi_trace(L, F, vs).adjoint() * w.asDiagonal() / double(L.degree);
}

double unitarity_defect(const FermiGrid& F, const Eigen::MatrixXcd& S) {
  const int n = static_cast<int>(F.weight.size());
  Eigen::MatrixXcd X = S;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) X(r, c) *= std::sqrt(F.weight[r] / F.weight[c]);
  return spectral_norm(X.adjoint() * X - Eigen::MatrixXcd::Identity(n, n));
}

namespace {
// T = V - V R V on supp V.
Eigen::MatrixXcd t_matrix(GreenTable& G, const Potential& V) {
  const Eigen::VectorXcd v = potential_values(V);
  const Eigen::MatrixXcd R = perturbed_resolvent(G, V, V.sites, V.sites);
  return Eigen::MatrixXcd(v.asDiagonal()) - v.asDiagonal() * R * v.asDiagonal();
}

Eigen::MatrixXcd amplitude_matrix(GreenTable& G, const Potential& V, const FermiGrid& F) {
  const int n = static_cast<int>(F.x.size());
  if (V.sites.empty()) return Eigen::MatrixXcd::Zero(n, n);
  return fermi_trace(G.lattice(), F, V.sites) * t_matrix(G, V) * fermi_adjoint(G.lattice(), F, V.sites);
}
}  // namespace

Amplitude scattering_amplitude(GreenTable& G, const Potential& V, int count) {
  Amplitude out;
  out.grid = stage("Fermi sampling", [&] { return fermi_grid(G.lattice(), G.lambda(), count); });
  out.A = stage("amplitude", [&] { return amplitude_matrix(G, V, out.grid); });
  const int n = static_cast<int>(out.grid.x.size());
  out.S = Eigen::MatrixXcd::Identity(n, n) - cd(0, 2 * kPi) * out.A;
  out.unitarity = unitarity_defect(out.grid, out.S);
  return out;
}

double spectral_density_check(GreenTable& G, const FermiGrid& F, const std::vector<VertexId>& vs) {
  const Eigen::MatrixXcd Gp = G.block(vs, vs, +1), Gm = G.block(vs, vs, -1);
  const Eigen::MatrixXcd im = (Gp - Gm) / cd(0, 2);
  const Eigen::MatrixXcd dens = kPi * fermi_adjoint(G.lattice(), F, vs) * fermi_trace(G.lattice(), F, vs);
  return (im - dens).cwiseAbs().maxCoeff() / im.cwiseAbs().maxCoeff();
}

double reciprocity_defect(GreenTable& G, const Potential& V, const FermiGrid& F) {
  if (V.sites.empty()) return 0.0;
  const Eigen::MatrixXcd Fv = fermi_trace(G.lattice(), F, V.sites);
  const Eigen::MatrixXcd T = t_matrix(G, V);
  const Eigen::MatrixXcd K = Fv * T * Fv.adjoint();                       // kernel at (x', x)
  const Eigen::MatrixXcd Kr = Fv.conjugate() * T * Fv.transpose();        // kernel at (-x, -x')
  return (K - Kr.transpose()).cwiseAbs().maxCoeff() / K.cwiseAbs().maxCoeff();
}

AmplitudeIdentityReport verify_amplitude_identity(GreenTable& G, const Interface& I, const Potential& V, int count) {
  AmplitudeIdentityReport rep;
  try {
    const FreeLattice& L = G.lattice();
    const FermiGrid F = stage("Fermi sampling", [&] { return fermi_grid(L, G.lambda(), count); });
    rep.samples = static_cast<int>(F.x.size());
    const LayerOperators lay = layer_operators(G, I, V);
    const Eigen::MatrixXcd Fs = fermi_trace(L, F, I.sigma), Fs_adj = fermi_adjoint(L, F, I.sigma);
    const Eigen::MatrixXcd r_plus = stage("boundary density", [&] {
      const Eigen::MatrixXcd Gss = G.block(I.sigma, I.sigma, +1);
      return Eigen::MatrixXcd(Gss.partialPivLu().inverse());
    });
    const Eigen::MatrixXcd r_minus = r_plus.conjugate();
    const Eigen::MatrixXcd A = stage("amplitude", [&] { return amplitude_matrix(G, V, F); });

    // F(+) on functions carried by Sigma: F0 (1 - V R(lambda + i0)).
    Eigen::MatrixXcd Fplus = Fs;
    if (!V.sites.empty()) {
      const Eigen::MatrixXcd Rvs = perturbed_resolvent(G, V, V.sites, I.sigma, +1);
      Fplus -= fermi_trace(L, F, V.sites) * potential_values(V).asDiagonal() * Rvs;
    }
    const Eigen::MatrixXcd A_ext = Fplus * lay.B_assembled_plus * Fs_adj;
    const Eigen::MatrixXcd I_plus = Fs * r_plus;
    const Eigen::MatrixXcd I_minus_adj = r_minus.adjoint() * Fs_adj;
    const Eigen::MatrixXcd A_ext2 = I_plus * Fs_adj;
    const Eigen::MatrixXcd lhs = A_ext - A;
    const Eigen::MatrixXcd rhs = I_plus * lay.B_assembled_plus.inverse() * I_minus_adj;
    rep.lhs_norm = weighted_norm(F, lhs);
    rep.residual = weighted_norm(F, lhs - rhs) / rep.lhs_norm;
    rep.ext_routes = weighted_norm(F, A_ext - A_ext2) / weighted_norm(F, A_ext2);
    rep.green_error = G.max_error();
  } catch (const QuadratureBudgetError&) {
    throw;
  } catch (const std::exception& e) {
    rep.stage = e.what();
  }
  return rep;
}

DifferenceIdentityReport verify_difference_identity(GreenTable& G, const Interface& I, const Potential& V1, const Potential& V2,
                               int count) {
  const FreeLattice& L = G.lattice();
  const FermiGrid F = fermi_grid(L, G.lambda(), count);
  const Eigen::MatrixXcd A1 = amplitude_matrix(G, V1, F), A2 = amplitude_matrix(G, V2, F);
  const Eigen::MatrixXcd Fs = fermi_trace(L, F, I.sigma), Fs_adj = fermi_adjoint(L, F, I.sigma);
  const Eigen::MatrixXcd r_plus = G.block(I.sigma, I.sigma, +1).partialPivLu().inverse();
  const Eigen::MatrixXcd I_plus = Fs * r_plus, I_minus_adj = r_plus.conjugate().adjoint() * Fs_adj;
  const Eigen::MatrixXcd Lint1 = interior_dn_map(I, V1, G.lambda()), Lint2 = interior_dn_map(I, V2, G.lambda());
  const Eigen::MatrixXcd Lext = exterior_dn_map(G, I, +1);
  const Eigen::MatrixXcd B1 = assemble_B(I, Lint1, Lext, G.lambda()), B2 = assemble_B(I, Lint2, Lext, G.lambda());
  Eigen::VectorXcd mint(I.sigma.size());
  for (std::size_t s = 0; s < I.sigma.size(); ++s) mint[s] = I.deg_int[s] / double(I.degree);
  const Eigen::MatrixXcd rhs =
      I_plus * B2.inverse() * mint.asDiagonal() * (Lint2 - Lint1) * B1.inverse() * I_minus_adj;
  const Eigen::MatrixXcd via = I_plus * (B1.inverse() - B2.inverse()) * I_minus_adj;
  const Eigen::MatrixXcd lhs = A2 - A1;
  DifferenceIdentityReport rep;
  const double scale = weighted_norm(F, lhs);
  rep.residual = weighted_norm(F, lhs - rhs) / scale;
  rep.via_identity = weighted_norm(F, lhs - via) / scale;
  return rep;
}

nlohmann::json to_json(const AmplitudeIdentityReport& r) {
  return {{"samples", r.samples},       {"residual", r.residual},   {"ext_routes", r.ext_routes},
          {"lhs_norm", r.lhs_norm},     {"green_error", r.green_error}, {"stage", r.stage}};
}

}  // namespace latinv::scattering
