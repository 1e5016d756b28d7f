#include "treecorr/oracle.hpp"

#include <cmath>

#include "treecorr/simplex.hpp"

namespace treecorr {

std::size_t TruncatedGrid::points() const {
  std::size_t out = 1;
  for (int i = 0; i < dim; ++i) out *= static_cast<std::size_t>(cap + 1);
  return out;
}

std::vector<int> TruncatedGrid::point(std::size_t index) const {
  std::vector<int> x(static_cast<std::size_t>(dim));
  for (int i = dim - 1; i >= 0; --i) {
    x[static_cast<std::size_t>(i)] = static_cast<int>(index % static_cast<std::size_t>(cap + 1));
    index /= static_cast<std::size_t>(cap + 1);
  }
  return x;
}

std::size_t TruncatedGrid::index(std::span<const int> x) const {
  std::size_t out = 0;
  for (int i = 0; i < dim; ++i) out = out * static_cast<std::size_t>(cap + 1) + static_cast<std::size_t>(x[i]);
  return out;
}

const char* verdict_name(CertificateVerdict v) {
  switch (v) {
    case CertificateVerdict::kCertified: return "certified";
    case CertificateVerdict::kViolated: return "violated";
    case CertificateVerdict::kInconclusive: return "inconclusive";
  }
  return "unknown";
}

namespace {

double to_double_any(const Rational& r) { return to_double(r); }
double to_double_any(double v) { return v; }

void require_lattice(const Model& m) {
  const Family f = family_of(m);
  if (f != Family::kBinomial && f != Family::kPoisson)
    throw UnsupportedFamily(std::string("the lattice oracle does not handle the ") + family_name(f) + " family");
}

int model_cap(const Model& m, double tail) {
  const auto moments = exact_moments(m);
  if (const auto* b = std::get_if<BinomialModel>(&m)) {
    const auto members = membership(b->tree);
    int cap = 0;
    for (int i = 1; i <= b->tree.dim(); ++i) {
      std::int64_t total = 0;
      for (const Pair& p : members.row(i)) total += b->counts[pair_index(b->tree.dim(), p)];
      cap = std::max(cap, static_cast<int>(total));
    }
    return cap;
  }
  const int d = dim_of(m);
  for (int cap = 0;; ++cap) {
    double sum = 0;
    for (int i = 0; i < d; ++i) sum += poisson_tail(to_double(moments.means(i)), cap);
    if (sum < tail) return cap;
  }
}

}  // namespace

int grid_cap(const Model& x, const Model& y, double tail) {
  require_lattice(x);
  require_lattice(y);
  return std::max(model_cap(x, tail), model_cap(y, tail));
}

template <typename Scalar>
Matrix<Scalar> local_constraints(const TruncatedGrid& grid, bool monotone) {
  const int d = grid.dim;
  const int m = grid.cap;
  std::vector<std::vector<std::pair<std::size_t, int>>> rows;
  for (std::size_t n = 0; n < grid.points(); ++n) {
    auto x = grid.point(n);
    for (int i = 0; i < d; ++i) {
      if (x[static_cast<std::size_t>(i)] >= m) continue;
      auto xi = x;
      ++xi[static_cast<std::size_t>(i)];
      if (monotone) rows.push_back({{grid.index(xi), 1}, {n, -1}});
      for (int j = i + 1; j < d; ++j) {
        if (x[static_cast<std::size_t>(j)] >= m) continue;
        auto xj = x;
        ++xj[static_cast<std::size_t>(j)];
        auto xij = xi;
        ++xij[static_cast<std::size_t>(j)];
        rows.push_back({{grid.index(xij), 1}, {n, 1}, {grid.index(xi), -1}, {grid.index(xj), -1}});
      }
    }
  }
  Matrix<Scalar> out = Matrix<Scalar>::Zero(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(grid.points()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (const auto& [col, v] : rows[r]) out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col)) += Scalar(v);
  return out;
}

template Matrix<double> local_constraints<double>(const TruncatedGrid&, bool);
template Matrix<Rational> local_constraints<Rational>(const TruncatedGrid&, bool);

namespace {

template <typename Scalar>
std::vector<Scalar> grid_masses(const TruncatedPmf<Scalar>& pmf, const TruncatedGrid& grid) {
  std::vector<Scalar> out(grid.points());
  for (std::size_t n = 0; n < out.size(); ++n) {
    const auto x = grid.point(n);
    out[n] = pmf.at(x);
  }
  return out;
}

template <typename Scalar>
LpCertificate<Scalar> run(const Model& x, const Model& y, const OracleOptions& options) {
  require_lattice(x);
  require_lattice(y);
  if (dim_of(x) != dim_of(y)) throw DimensionError("oracle needs vectors of equal dimension");

  LpCertificate<Scalar> cert;
  cert.monotone = options.monotone;
  cert.grid = TruncatedGrid{dim_of(x), options.cap ? *options.cap : grid_cap(x, y, options.tail)};
  if (cert.grid.cap < 0) throw InvalidArgument("grid cap must be nonnegative");
  const std::size_t n = cert.grid.points();
  if (static_cast<double>(n) * static_cast<double>(n) > static_cast<double>(options.budget))
    throw BudgetExceeded("grid of " + std::to_string(n) + " points exceeds the oracle budget");

  const auto px = exact_truncated_pmf<Scalar>(x, component_caps(x, options.tail), options.budget);
  const auto py = exact_truncated_pmf<Scalar>(y, component_caps(y, options.tail), options.budget);
  const auto gx = grid_masses(px, cert.grid);
  const auto gy = grid_masses(py, cert.grid);
  Scalar mass_x(0), mass_y(0);
  for (std::size_t i = 0; i < n; ++i) {
    mass_x += gx[i];
    mass_y += gy[i];
  }
  cert.defect_x = Scalar(1) - mass_x;
  cert.defect_y = Scalar(1) - mass_y;
  if constexpr (!ScalarTraits<Scalar>::kExact) {
    cert.defect_x = std::max(cert.defect_x, 0.0);
    cert.defect_y = std::max(cert.defect_y, 0.0);
  }
  const double worst = std::max(to_double_any(cert.defect_x), to_double_any(cert.defect_y));
  if (worst > options.max_defect)
    throw DegenerateMass("grid captures too little mass (defect " + std::to_string(worst) + "); raise the cap");

  const Matrix<Scalar> dmat = local_constraints<Scalar>(cert.grid, options.monotone);
  const auto nd = static_cast<Eigen::Index>(dmat.rows());
  const auto nn = static_cast<Eigen::Index>(n);
  lp::Problem<Scalar> problem;
  problem.a = Matrix<Scalar>::Zero(nn, nd + 2 * nn);
  problem.a.leftCols(nd) = dmat.transpose();
  for (Eigen::Index i = 0; i < nn; ++i) {
    problem.a(i, nd + i) = Scalar(1);
    problem.a(i, nd + nn + i) = Scalar(-1);
  }
  problem.c = Vector<Scalar>::Zero(nd + 2 * nn);
  problem.c.tail(2 * nn).setConstant(Scalar(1));
  Vector<Scalar> objective(nn);
  for (Eigen::Index i = 0; i < nn; ++i)
    objective(i) = gy[static_cast<std::size_t>(i)] - gx[static_cast<std::size_t>(i)];
  // Float mode: normalize and drop negligible entries; |Phi| <= 1 bounds the
  // change in the optimum by the dropped mass, which joins the threshold.
  Scalar scale(1);
  Scalar dropped(0);
  problem.b = objective;
  if constexpr (!ScalarTraits<Scalar>::kExact) {
    const double top = objective.cwiseAbs().maxCoeff();
    if (top > 0) scale = top;
    for (Eigen::Index i = 0; i < nn; ++i) {
      if (std::abs(objective(i)) < options.drop * top) {
        dropped += std::abs(objective(i));
        problem.b(i) = 0;
      } else {
        problem.b(i) = objective(i) / scale;
      }
    }
  }
  problem.sense.assign(n, lp::Sense::kEqual);

  lp::Options lp_options = options.lp;
  if constexpr (!ScalarTraits<Scalar>::kExact) lp_options.check_gap = false;
  lp_options.max_entries = std::max<std::uint64_t>(options.budget, 1'000'000);
  const auto solution = lp::solve(problem, lp_options);
  cert.iterations = solution.iterations;
  cert.value = -solution.value * scale;
  cert.phi.resize(n);
  for (std::size_t i = 0; i < n; ++i) cert.phi[i] = -solution.duals(static_cast<Eigen::Index>(i));

  // Certified needs lambda >= 0 with |c - D' lambda|_1 within the threshold (a lower
  // bound on v*); violated needs a verified Phi below minus the threshold.
  Vector<Scalar> lambda = solution.x.head(nd) * scale;
  for (Eigen::Index r = 0; r < nd; ++r)
    if (lambda(r) < 0) lambda(r) = Scalar(0);
  const Vector<Scalar> residual = objective - dmat.transpose() * lambda;
  using std::abs;
  Scalar lower(0);
  for (Eigen::Index i = 0; i < nn; ++i) lower -= abs(residual(i));

  const Vector<Scalar> phi = Eigen::Map<const Vector<Scalar>>(cert.phi.data(), nn);
  const Vector<Scalar> slack = dmat * phi;
  const Scalar attained = objective.dot(phi);
  bool phi_ok = true;
  if constexpr (ScalarTraits<Scalar>::kExact) {
    for (const auto& v : cert.phi) phi_ok = phi_ok && abs(v) <= 1;
    for (Eigen::Index r = 0; r < slack.size(); ++r) phi_ok = phi_ok && slack(r) >= 0;
    phi_ok = phi_ok && attained == cert.value && lower == cert.value;
    cert.threshold = cert.defect_x + cert.defect_y;
  } else {
    const double tol = 1e-8;
    for (double v : cert.phi) phi_ok = phi_ok && std::abs(v) <= 1 + tol;
    if (slack.size() > 0) phi_ok = phi_ok && slack.minCoeff() >= -tol;
    cert.threshold = options.tolerance + cert.defect_x + cert.defect_y;
  }
  if (lower >= -cert.threshold) {
    cert.verdict = CertificateVerdict::kCertified;
    cert.value = lower;
  } else if (phi_ok && attained < -cert.threshold) {
    cert.verdict = CertificateVerdict::kViolated;
    cert.value = attained;
  } else {
    cert.verdict = CertificateVerdict::kInconclusive;
    cert.notes.push_back("neither the multipliers nor the recovered test function settle the sign");
  }
  if (!phi_ok) cert.notes.push_back("recovered test function failed re-verification");
  return cert;
}

}  // namespace

LpCertificate<double> certify(const Model& x, const Model& y, const OracleOptions& options) {
  return run<double>(x, y, options);
}

LpCertificate<Rational> certify_exact(const Model& x, const Model& y, const OracleOptions& options) {
  return run<Rational>(x, y, options);
}

std::vector<BatteryEstimate> battery_estimate_samples(const Matrix<double>& xs, const Matrix<double>& ys,
                                                      const std::vector<SupermodularFunction>& battery,
                                                      bool paired) {
  if (xs.cols() != ys.cols()) throw DimensionError("sample blocks have different dimensions");
  if (paired && xs.rows() != ys.rows()) throw DimensionError("paired estimate needs equal sample counts");
  const auto d = static_cast<std::size_t>(xs.cols());
  std::vector<BatteryEstimate> out;
  std::vector<double> row(d);
  auto values = [&](const Matrix<double>& s, const SupermodularFunction& f) {
    Vector<double> v(s.rows());
    for (Eigen::Index r = 0; r < s.rows(); ++r) {
      for (std::size_t i = 0; i < d; ++i) row[i] = s(r, static_cast<Eigen::Index>(i));
      v(r) = f(std::span<const double>(row));
    }
    return v;
  };
  auto variance = [](const Vector<double>& v) {
    const double mean = v.mean();
    return (v.array() - mean).square().sum() / static_cast<double>(std::max<Eigen::Index>(v.size() - 1, 1));
  };
  for (const auto& f : battery) {
    const Vector<double> vx = values(xs, f);
    const Vector<double> vy = values(ys, f);
    BatteryEstimate e;
    e.function = f.name();
    e.estimate = vy.mean() - vx.mean();
    if (paired) {
      e.standard_error = std::sqrt(variance(vy - vx) / static_cast<double>(vx.size()));
    } else {
      e.standard_error = std::sqrt(variance(vx) / static_cast<double>(vx.size()) +
                                   variance(vy) / static_cast<double>(vy.size()));
    }
    e.flagged = e.estimate < -5 * e.standard_error;
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<BatteryEstimate> battery_estimate(const Model& x, const Model& y,
                                              const std::vector<SupermodularFunction>& battery, std::size_t n,
                                              std::uint64_t seed) {
  const Matrix<double> xs = sample(x, n, seed, 0);
  const Matrix<double> ys = sample(y, n, seed, 1);
  return battery_estimate_samples(xs, ys, battery, false);
}

}  // namespace treecorr
