#pragma once
// Fourier symbols of the periodic Laplacians, characteristic polynomials,
// Fermi-curve tracing on the two-torus, curvature, and convexity windows.
#include <Eigen/Dense>
#include <array>
#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace latinv::spectral {

enum class Periodic { Square, Triangular, Hexagonal, Kagome, Graphite, Subdivision, Ladder };

std::string to_string(Periodic p);
Periodic periodic_from_string(const std::string& s);
const std::vector<Periodic>& all_periodic();

using Point = std::array<double, 2>;

double a2(const Point& x);  // cos x1 + cos x2
double b2(const Point& x);  // cos x1 + cos x2 + cos(x1 - x2)

// Lattices whose characteristic polynomial depends on x through a2 (true)
// or through b2 (false).
bool uses_a2(Periodic p);
double level_variable(Periodic p, const Point& x);
Point level_variable_gradient(Periodic p, const Point& x);
// Critical values of a2 or b2 on the torus; level sets through them carry
// points with vanishing gradient.
std::vector<double> critical_levels(Periodic p);

// Closed-form characteristic polynomials in two dimensions.
double char_poly(Periodic p, const Point& x, double lambda);

// H0(x) for the lattices generated in lattice_core.
bool has_symbol(Periodic p);
Eigen::MatrixXcd symbol(Periodic p, const Point& x);
double char_poly_from_symbol(Periodic p, const Point& x, double lambda);
// Eigenvalues of H0(x) in ascending order, with eigenvectors in columns
// (gauge: largest-magnitude component real positive).
std::pair<Eigen::VectorXd, Eigen::MatrixXcd> symbol_eigen(Periodic p, const Point& x);

// Each lattice's spectrum is a union of branches lambda = phi(z) with z the
// level variable; flat branches carry no Fermi curve.
struct Branch {
  int index;
  bool flat;
  double flat_value;
};
std::vector<Branch> branches(Periodic p);
double branch_value(Periodic p, int branch, double z);
double branch_derivative(Periodic p, int branch, double z);
// Level z solving phi(z) = lambda on this branch, if it lies in the range of z.
std::optional<double> branch_level(Periodic p, int branch, double lambda);
// Sorted band values at x (all branches, flat ones included).
std::vector<double> bands(Periodic p, const Point& x);
double band_function(Periodic p, int branch, const Point& x);
Point band_gradient(Periodic p, int branch, const Point& x);

class ThresholdError : public std::runtime_error {
 public:
  ThresholdError(const std::string& what, double distance)
      : std::runtime_error(what), distance_(distance) {}
  double distance() const { return distance_; }

 private:
  double distance_;
};

struct FermiCurve {
  int branch;
  std::vector<Point> points;   // arc-length uniform, counterclockwise about the gradient
  std::vector<double> weight;  // 1 / |grad lambda_j|
  std::vector<Point> tangent;
  std::vector<Point> normal;   // unit gradient of the band function
  std::vector<double> curvature;
  double length = 0.0;
  double spacing_error = 0.0;  // max deviation of step arc length from length/count
  double residual = 0.0;       // max |lambda_j(x) - lambda|
};

struct FermiSample {
  double lambda;
  int branch;
  std::vector<FermiCurve> components;
};

// Traces every component of {lambda_j = lambda}. Throws ThresholdError when
// lambda is within `threshold_tol` of a critical level, and std::domain_error
// when the level set is empty.
FermiSample fermi_sample(Periodic p, double lambda, int branch, int count, double threshold_tol = 1e-9);

// Signed curvature of the level curve of the band function through x, from
// central differences with step h.
double level_curvature(Periodic p, int branch, const Point& x, double h = 1e-5);

struct CurvatureProfile {
  double lambda;
  bool degenerate = false;  // threshold hit or vanishing curvature somewhere
  bool strictly_convex = true;
  double min_abs_curvature = 0.0;
  int components = 0;
  std::string note;
};
// Samples every nonempty branch at `count` points per component and reports
// whether every component has curvature of one strict sign.
CurvatureProfile curvature_profile(Periodic p, double lambda, int count, double zero_tol = 1e-7);
// Parallel and serial variants of the per-point curvature evaluation.
std::vector<double> curvature_at(Periodic p, int branch, const std::vector<Point>& xs, bool parallel);

struct Window {
  double lo, hi;                // open interval
  std::vector<double> excluded; // points removed from the interval
  bool epsilon_qualified = false;
  double anchor = 0.0;          // endpoint the small-epsilon window hangs off
  int side = 0;                 // -1: (anchor - eps, anchor), +1: (anchor, anchor + eps), 0: both
  double max_eps = 0.0;         // search range for certification
  double certified_epsilon = 0.0;
  std::string text;
};
struct ConvexWindowTable {
  Periodic lattice;
  std::vector<Window> windows;
};
// Windows as listed for each lattice; epsilon-qualified entries carry
// `certified_epsilon` filled in by bisection when `certify` is set.
ConvexWindowTable convex_windows(Periodic p, bool certify = true);
double certify_epsilon(Periodic p, double anchor, int side, double max_eps, double tol = 1e-4);
// Energies where some branch level hits a critical level (or a flat band).
std::vector<double> threshold_energies(Periodic p);
// Energies strictly inside a window, away from thresholds and excluded points.
std::vector<double> window_energies(Periodic p, const Window& w, int count);

}  // namespace latinv::spectral
