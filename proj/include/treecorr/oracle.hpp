#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "treecorr/battery.hpp"
#include "treecorr/models.hpp"
#include "treecorr/pmf.hpp"
#include "treecorr/simplex.hpp"

namespace treecorr {

/// The lattice {0..cap}^dim in lexicographic order (coordinate 1 slowest).
struct TruncatedGrid {
  int dim = 1;
  int cap = 0;

  std::size_t points() const;
  std::vector<int> point(std::size_t index) const;
  std::size_t index(std::span<const int> x) const;
};

enum class CertificateVerdict { kCertified, kViolated, kInconclusive };
const char* verdict_name(CertificateVerdict v);

template <typename Scalar>
struct LpCertificate {
  TruncatedGrid grid;
  bool monotone = false;
  Scalar value{};            // certified: lower bound on min (p_Y - p_X)' Phi; violated: attained value
  std::vector<Scalar> phi;   // optimizing Phi, grid order
  Scalar defect_x{};         // 1 - captured grid mass of X
  Scalar defect_y{};
  Scalar threshold{};        // tolerance + defect_x + defect_y
  CertificateVerdict verdict = CertificateVerdict::kInconclusive;
  std::size_t iterations = 0;
  std::vector<std::string> notes;
};

struct OracleOptions {
  std::optional<int> cap;       // default: tail policy
  bool monotone = false;        // add Phi(x + e_i) >= Phi(x)
  double tolerance = 1e-9;
  double max_defect = 1e-3;     // DegenerateMass above this
  double tail = 1e-10;          // grid and component tail targets
  double drop = 1e-12;          // float mode: objective entries below drop * max are zeroed
  std::uint64_t budget = default_budget();
  lp::Options lp;
};

/// Smallest cap with sum_i P(X_i > cap) below `tail` for both vectors
/// (Poisson marginals are Poisson; binomial marginals are bounded).
int grid_cap(const Model& x, const Model& y, double tail = 1e-10);

/// Local second differences (and monotone steps) as rows of D, so feasibility is D Phi >= 0.
template <typename Scalar>
Matrix<Scalar> local_constraints(const TruncatedGrid& grid, bool monotone);

/// Solves min (p_Y - p_X)' Phi over supermodular Phi with |Phi| <= 1 through the
/// equivalent problem v* = -min_{lambda >= 0} |c - D' lambda|_1. The multipliers
/// bound v* from below; Phi is recovered from the duals and re-verified.
LpCertificate<double> certify(const Model& x, const Model& y, const OracleOptions& options = {});
/// Exact rational variant (binomial only, small grids).
LpCertificate<Rational> certify_exact(const Model& x, const Model& y, const OracleOptions& options = {});

struct BatteryEstimate {
  std::string function;
  double estimate = 0;  // E[Phi(Y)] - E[Phi(X)]
  double standard_error = 0;
  bool flagged = false;  // estimate < -5 SE
};

/// Independent streams for X (stream 0) and Y (stream 1).
std::vector<BatteryEstimate> battery_estimate(const Model& x, const Model& y,
                                              const std::vector<SupermodularFunction>& battery, std::size_t n,
                                              std::uint64_t seed);

/// From given draws; `paired` treats row r of xs and ys as one coupled draw.
std::vector<BatteryEstimate> battery_estimate_samples(const Matrix<double>& xs, const Matrix<double>& ys,
                                                      const std::vector<SupermodularFunction>& battery,
                                                      bool paired);

}  // namespace treecorr
