#include <Eigen/Sparse>
#include <Eigen/UmfPackSupport>
#include <cmath>
#include <stdexcept>

#include "latinv/scattering.hpp"

namespace latinv::scattering {

std::vector<cd> window_green(LatticeKind kind, double lambda, const VertexId& source,
                             const std::vector<VertexId>& targets, const WindowOptions& opt) {
  const FreeLattice L = free_lattice(kind);
  const int h = opt.half_width, side = 2 * h + 1, s = L.sublattices;
  const long n = static_cast<long>(side) * side * s;
  auto inside = [&](int n1, int n2) { return std::abs(n1) <= h && std::abs(n2) <= h; };
  auto index = [&](int j, int n1, int n2) { return (static_cast<long>(n1 + h) * side + (n2 + h)) * s + j; };
  for (const VertexId& t : targets)
    if (!inside(t.n1 - source.n1, t.n2 - source.n2) ||
        std::max(std::abs(t.n1 - source.n1), std::abs(t.n2 - source.n2)) > h - opt.absorb)
      throw std::invalid_argument("window target inside the absorbing layer");

  std::vector<std::vector<cd>> cols(targets.size());
  for (double eps : opt.eps) {
    const cd z(lambda, eps);
    std::vector<Eigen::Triplet<cd, long>> trip;
    trip.reserve(n * (1 + L.hops.size() / s));
    for (int n1 = -h; n1 <= h; ++n1)
      for (int n2 = -h; n2 <= h; ++n2) {
        const int depth = std::max(std::abs(n1), std::abs(n2)) - (h - opt.absorb);
        const double layer = depth > 0 ? opt.eta * std::pow(double(depth) / opt.absorb, 2) : 0.0;
        for (int j = 0; j < s; ++j) trip.emplace_back(index(j, n1, n2), index(j, n1, n2), -z - cd(0, layer));
        for (const Hop& hop : L.hops)
          if (inside(n1 + hop.k1, n2 + hop.k2))
            trip.emplace_back(index(hop.i, n1, n2), index(hop.j, n1 + hop.k1, n2 + hop.k2), -1.0 / L.degree);
      }
    Eigen::SparseMatrix<cd, Eigen::ColMajor, long> A(n, n);
    A.setFromTriplets(trip.begin(), trip.end());
    Eigen::UmfPackLU<Eigen::SparseMatrix<cd, Eigen::ColMajor, long>> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success) throw std::runtime_error("window factorization failed");
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n);
    rhs[index(source.j - 1, 0, 0)] = 1.0;
    const Eigen::VectorXcd x = lu.solve(rhs);
    for (std::size_t t = 0; t < targets.size(); ++t)
      cols[t].push_back(x[index(targets[t].j - 1, targets[t].n1 - source.n1, targets[t].n2 - source.n2)]);
  }
  std::vector<cd> out;
  for (const auto& c : cols) out.push_back(extrapolate_to_zero(opt.eps, c));
  return out;
}

}  // namespace latinv::scattering
