#pragma once
// Scattering side for potential perturbations of the square, triangular and
// hexagonal lattices: the free Green's function at lambda + i0, the perturbed
// resolvent, exterior Dirichlet problems through the boundary integral
// equation, the single-layer operator M_Sigma and its inverse B_Sigma, the
// scattering amplitude on a sampled Fermi curve, and the identity linking
// the amplitude to the interior D-N map.
//
// Conventions. H0 = -Delta with Delta the neighbour average, so the spectrum
// is [-1, 1]. A vertex (j, n) carries sublattice j (1-based) and cell n. The
// free kernel is
//   G(a, b; z) = (2 pi)^-2 \int [(S(x) - z)^-1]_{j_a j_b} e^{i (n_a - n_b) x} dx,
//   S(x)_{ij} = -(1/deg) sum over hops (i, 0) -> (j, k) of e^{i k x}.
// The Fermi trace of a function f is
//   (F0 f)(x) = sqrt(deg) / (2 pi) sum_b conj(a_{j_b}(x)) e^{-i n_b x} f(b)
// with a(x) the unit eigenvector of S(x) for the band through lambda. With
// this normalization F0^* F0 equals the spectral density delta(H0 - lambda),
// which ties Im G to the Fermi samples and keeps S = 1 - 2 pi i A unitary.
#include <Eigen/Dense>
#include <complex>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "latinv/lattice_core.hpp"
#include "latinv/spectral.hpp"

namespace latinv::scattering {

using cd = std::complex<double>;

struct Hop {
  int i = 0, j = 0;  // 0-based sublattices
  int k1 = 0, k2 = 0;
};

struct FreeLattice {
  LatticeKind kind = LatticeKind::Square;
  spectral::Periodic periodic = spectral::Periodic::Square;
  int sublattices = 1;
  int degree = 4;
  std::vector<Hop> hops;  // read off lattice_neighbors
};
// Square, triangular or hexagonal; anything else throws std::invalid_argument.
FreeLattice free_lattice(LatticeKind kind);
Eigen::MatrixXcd free_symbol(const FreeLattice& L, double x1, double x2);

// G(a, b) depends on (j_a, j_b, n_a - n_b) only.
struct GreenKey {
  int i = 0, j = 0, d1 = 0, d2 = 0;
  friend bool operator==(const GreenKey&, const GreenKey&) = default;
  friend auto operator<=>(const GreenKey&, const GreenKey&) = default;
};
GreenKey green_key(const VertexId& a, const VertexId& b);
// G(i, j; d) = G(j, i; -d); the canonical key is the smaller of the two.
GreenKey canonical(const GreenKey& k);

struct GreenOptions {
  std::vector<double> eps_ladder = default_ladder();
  double quad_tol = 1e-12;       // absolute, per epsilon level and key
  int max_intervals = 20000;
  double threshold_tol = 1e-2;   // refuse energies this close to T0
  bool parallel = true;
  static std::vector<double> default_ladder();  // 1e-2 * 2^-k, k = 0..7
};

struct GreenValue {
  cd value{};               // extrapolated to epsilon = 0
  double error = 0.0;       // |full extrapolant - extrapolant without the smallest epsilon|
  std::vector<cd> ladder;   // G(lambda + i eps_k)
};

// Raised when adaptive quadrature runs out of subintervals before meeting
// its tolerance.
class QuadratureBudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Kernel at z = lambda + i eps for every key: the x2 integral in closed form
// by residues, the x1 integral by adaptive Gauss-Kronrod on a mesh shared by
// all keys. `intervals` receives the number of subintervals used.
std::vector<cd> green_at(const FreeLattice& L, cd z, const std::vector<GreenKey>& keys, double tol,
                         int max_intervals, int* intervals = nullptr);

// Extrapolated values over the epsilon ladder. The parallel variant spreads
// the ladder levels over OpenMP threads; both give identical numbers.
std::vector<GreenValue> green_batch(const FreeLattice& L, double lambda, const std::vector<GreenKey>& keys,
                                    const GreenOptions& opt = {});
std::vector<GreenValue> green_batch_serial(const FreeLattice& L, double lambda, const std::vector<GreenKey>& keys,
                                           const GreenOptions& opt = {});

// Throws spectral::ThresholdError when lambda is within opt.threshold_tol of
// a threshold energy.
void check_admissible(const FreeLattice& L, double lambda, const GreenOptions& opt);

GreenValue free_green(LatticeKind kind, double lambda, const VertexId& a, const VertexId& b,
                      const GreenOptions& opt = {});

// Neville extrapolation of (eps_k, v_k) to eps = 0.
cd extrapolate_to_zero(const std::vector<double>& eps, const std::vector<cd>& values);

// Truncated-resolvent oracle: (H0 - lambda - i eps) on the cell window
// |n1|, |n2| <= half_width, with a complex absorbing layer -i eta (d/W)^2 on
// the outer W cells (d the depth into the layer), solved by sparse LU for the
// column of `source` and extrapolated over `eps` to eps = 0.
struct WindowOptions {
  int half_width = 200;
  int absorb = 100;
  double eta = 0.1;
  std::vector<double> eps{1e-3, 2e-3, 3e-3, 4e-3};
};
std::vector<cd> window_green(LatticeKind kind, double lambda, const VertexId& source,
                             const std::vector<VertexId>& targets, const WindowOptions& opt = {});

// Cache of extrapolated kernel values for one lattice and energy. Missing
// keys are filled in batches by `require`; lookups of absent keys throw.
class GreenTable {
 public:
  GreenTable(LatticeKind kind, double lambda, GreenOptions opt = {});
  const FreeLattice& lattice() const { return lattice_; }
  double lambda() const { return lambda_; }
  const GreenOptions& options() const { return opt_; }

  void require(const std::vector<VertexId>& rows, const std::vector<VertexId>& cols);
  cd operator()(const VertexId& a, const VertexId& b) const;  // lambda + i0
  cd minus(const VertexId& a, const VertexId& b) const { return std::conj((*this)(a, b)); }
  // rows x cols block at lambda + i0 (sign +1) or lambda - i0 (sign -1).
  Eigen::MatrixXcd block(const std::vector<VertexId>& rows, const std::vector<VertexId>& cols, int sign = +1);
  double max_error() const;
  std::size_t size() const { return values_.size(); }

  nlohmann::json to_json() const;
  static GreenTable from_json(const nlohmann::json& j);

 private:
  FreeLattice lattice_;
  double lambda_;
  GreenOptions opt_;
  std::map<GreenKey, GreenValue> values_;
};

// Finitely supported real potential.
struct Potential {
  std::vector<VertexId> sites;
  std::vector<double> values;
  double at(const VertexId& v) const;
};
nlohmann::json to_json(const Potential& V);
Potential potential_from_json(const nlohmann::json& j);

class ResonanceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// R(lambda + i0) = R0 - R0 V (1 + R0 V)^-1 R0 on rows x cols (sign -1 gives
// lambda - i0). Throws ResonanceError when 1 + R0 V is numerically singular.
Eigen::MatrixXcd perturbed_resolvent(GreenTable& G, const Potential& V, const std::vector<VertexId>& rows,
                                     const std::vector<VertexId>& cols, int sign = +1);

// (H - lambda) applied to the columns of R on `at`, minus the identity. The
// rows of R must cover `at` and all their neighbours.
double resolvent_equation_residual(GreenTable& G, const Potential& V, const std::vector<VertexId>& at,
                                   const std::vector<VertexId>& cols);

// Interior set, the interface Sigma = its outer vertex boundary, and the
// exterior neighbours of Sigma.
struct Interface {
  LatticeKind kind = LatticeKind::Hexagonal;
  std::vector<VertexId> interior;
  std::vector<VertexId> sigma;
  std::vector<VertexId> outer;      // exterior vertices adjacent to Sigma
  std::vector<int> deg_int, deg_ext;  // per Sigma vertex
  int degree = 3;
};
// Throws std::invalid_argument when a Sigma vertex has no exterior neighbour.
Interface make_interface(LatticeKind kind, const std::vector<VertexId>& interior);
// The six vertices of the hexagon cell (n1, n2); Sigma is their six outward neighbours.
std::vector<VertexId> hexagon_vertices(int n1, int n2);

class SingularBoundaryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Outgoing (sign +1) or incoming solution of (-Delta - lambda) u = 0 off
// Sigma with u = f on Sigma: solve R0 psi = f on Sigma, then u = R0 psi.
struct ExteriorSolution {
  Eigen::VectorXcd psi;   // density on Sigma
  Eigen::VectorXcd u;     // values on the requested vertices
};
ExteriorSolution exterior_dirichlet(GreenTable& G, const std::vector<VertexId>& sigma, const Eigen::VectorXcd& f,
                                    const std::vector<VertexId>& at, int sign = +1);

// Lambda_ext f = (1/deg_ext) sum of u_ext over exterior neighbours, and the
// interior map Lambda_int f = d_nu u_int for (-Delta + V - lambda) u = 0 on
// the interior set.
Eigen::MatrixXcd exterior_dn_map(GreenTable& G, const Interface& I, int sign = +1);
Eigen::MatrixXcd interior_dn_map(const Interface& I, const Potential& V, double lambda);

struct LayerOperators {
  std::vector<VertexId> sigma;
  Eigen::MatrixXcd M_plus, M_minus;        // perturbed resolvent on Sigma
  Eigen::MatrixXcd B_plus, B_minus;        // inverses
  Eigen::MatrixXcd B_assembled_plus, B_assembled_minus;
  double layer_identity = 0.0;        // |M+ B_assembled+ - 1| (spectral norm)
  double layer_identity_minus = 0.0;
  double adjoint = 0.0;        // |(M-)^* - M+| / |M+|
  double routes = 0.0;         // |B by inversion - B assembled| / |B|
  double cross = 0.0;          // |M+ (B-)^* - 1|
};
// The potential must live on the interior set.
LayerOperators layer_operators(GreenTable& G, const Interface& I, const Potential& V);

// Fermi samples with quadrature weights for the h_lambda inner product.
struct FermiGrid {
  double lambda = 0.0;
  std::vector<spectral::Point> x;
  std::vector<double> weight;          // arc spacing / |grad lambda_j|
  std::vector<Eigen::VectorXcd> a;     // eigenvector of S(x) at eigenvalue lambda
  std::vector<int> component;
  int per_component = 0;
};
FermiGrid fermi_grid(const FreeLattice& L, double lambda, int count);

// Rows: samples; columns: vertices.
Eigen::MatrixXcd fermi_trace(const FreeLattice& L, const FermiGrid& F, const std::vector<VertexId>& vs);
// F0^* as a matrix from sample values to vertex values (degree-weighted l2).
Eigen::MatrixXcd fermi_adjoint(const FreeLattice& L, const FermiGrid& F, const std::vector<VertexId>& vs);

struct Amplitude {
  FermiGrid grid;
  Eigen::MatrixXcd A;   // acts on sample values
  Eigen::MatrixXcd S;   // 1 - 2 pi i A
  double unitarity = 0.0;  // spectral norm of S^* S - 1 in the weighted inner product
};
// A = F0 (V - V R V) F0^*, evaluated on supp V.
Amplitude scattering_amplitude(GreenTable& G, const Potential& V, int count);
double unitarity_defect(const FermiGrid& F, const Eigen::MatrixXcd& S);

// Relative error of the spectral density identity Im G(a, b) = pi (F0^* F0)(a, b).
double spectral_density_check(GreenTable& G, const FermiGrid& F, const std::vector<VertexId>& vs);

// max |A(x', x) - A(-x, -x')| / max |A| with eigenvectors at -x taken as the
// conjugates of those at x.
double reciprocity_defect(GreenTable& G, const Potential& V, const FermiGrid& F);

struct AmplitudeIdentityReport {
  int samples = 0;
  double residual = 0.0;          // |(A_ext - A) - I+ M+ I-^*| / |A_ext - A|
  double ext_routes = 0.0;        // A_ext via F(+) B+ against I+ F0^*
  double lhs_norm = 0.0;
  double green_error = 0.0;       // largest extrapolation error estimate in the table
  std::string stage;              // failing stage, empty on success
};
AmplitudeIdentityReport verify_amplitude_identity(GreenTable& G, const Interface& I, const Potential& V, int count);

struct DifferenceIdentityReport {
  double residual = 0.0;     // |A2 - A1 - I+ B2^-1 M_int (Lint2 - Lint1) B1^-1 I-^*| / |A2 - A1|
  double via_identity = 0.0;  // same difference through two right sides of the amplitude identity
};
DifferenceIdentityReport verify_difference_identity(GreenTable& G, const Interface& I, const Potential& V1, const Potential& V2, int count);

nlohmann::json to_json(const AmplitudeIdentityReport& r);

}  // namespace latinv::scattering
