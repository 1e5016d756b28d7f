#include "treecorr/models.hpp"

#include <cmath>

namespace treecorr {

Family family_of(const Model& model) {
  return std::visit(
      [](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, BinomialModel>) return Family::kBinomial;
        else if constexpr (std::is_same_v<T, PoissonModel>) return Family::kPoisson;
        else if constexpr (std::is_same_v<T, GaussianModel>) return Family::kGaussian;
        else return Family::kGamma;
      },
      model);
}

const DependencyTree& tree_of(const Model& model) {
  return std::visit([](const auto& m) -> const DependencyTree& { return m.tree; }, model);
}

int dim_of(const Model& model) { return tree_of(model).dim(); }

VarianceDecomposition<Rational> decomposition(const Model& model) {
  const DependencyTree& tree = tree_of(model);
  auto out = VarianceDecomposition<Rational>::zero(tree.dim());
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        for (std::size_t c = 0; c < tree.size(); ++c) {
          const auto i = static_cast<Eigen::Index>(c);
          if constexpr (std::is_same_v<T, BinomialModel>) out.sigma2(i) = m.p * (1 - m.p) * m.counts[c];
          else if constexpr (std::is_same_v<T, PoissonModel>) out.sigma2(i) = m.intensities(i);
          else if constexpr (std::is_same_v<T, GaussianModel>) out.sigma2(i) = m.variances(i);
          else out.sigma2(i) = m.shapes(i) * m.theta * m.theta;
        }
      },
      model);
  return out;
}

Vector<Rational> component_means(const Model& model) {
  const DependencyTree& tree = tree_of(model);
  Vector<Rational> out(static_cast<Eigen::Index>(tree.size()));
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        for (std::size_t c = 0; c < tree.size(); ++c) {
          const auto i = static_cast<Eigen::Index>(c);
          if constexpr (std::is_same_v<T, BinomialModel>) out(i) = m.p * m.counts[c];
          else if constexpr (std::is_same_v<T, PoissonModel>) out(i) = m.intensities(i);
          else if constexpr (std::is_same_v<T, GaussianModel>) out(i) = m.component_means(i);
          else out(i) = m.shapes(i) * m.theta;
        }
      },
      model);
  return out;
}

Moments<Rational> exact_moments(const Model& model) {
  const Matrix<Rational> m = incidence_matrix<Rational>(tree_of(model));
  const Vector<Rational> sigma2 = decomposition(model).sigma2;
  Moments<Rational> out;
  out.means = m.transpose() * component_means(model);
  out.covariance = m.transpose() * sigma2.asDiagonal() * m;
  return out;
}

Model construct(const DependencyTree& tree, const CovarianceSpec<Rational>& cov, Family family,
                const FamilyParams& params) {
  const auto dec = invert_covariance(tree, cov);
  auto report = feasibility(dec, family, params);
  if (!report.feasible) throw InfeasibleDecomposition(std::move(report));

  Model model = [&]() -> Model {
    switch (family) {
      case Family::kBinomial: {
        std::vector<std::int64_t> counts(tree.size());
        for (std::size_t c = 0; c < counts.size(); ++c)
          counts[c] = static_cast<std::int64_t>(round_nearest(report.parameters(static_cast<Eigen::Index>(c))));
        return BinomialModel{tree, params.p, std::move(counts)};
      }
      case Family::kPoisson:
        return PoissonModel{tree, report.parameters};
      case Family::kGaussian: {
        Vector<Rational> means = Vector<Rational>::Zero(static_cast<Eigen::Index>(tree.size()));
        if (cov.means) {
          if (cov.means->size() != tree.dim()) throw DimensionError("means length does not match dimension");
          for (int i = 1; i <= tree.dim(); ++i)
            means(static_cast<Eigen::Index>(pair_index(tree.dim(), Pair{i, i}))) = (*cov.means)(i - 1);
        }
        return GaussianModel{tree, report.parameters, std::move(means)};
      }
      case Family::kGamma:
        return GammaModel{tree, params.theta, report.parameters};
    }
    throw UnsupportedFamily("unknown family");
  }();

  if (cov.means && family != Family::kGaussian) {
    const auto moments = exact_moments(model);
    if (cov.means->size() != tree.dim()) throw DimensionError("means length does not match dimension");
    for (int i = 0; i < tree.dim(); ++i)
      if (moments.means(i) != (*cov.means)(i))
        throw MeanMismatch("target mean of X" + std::to_string(i + 1) + " is " + to_string((*cov.means)(i)) +
                           " but the " + family_name(family) + " construction forces " +
                           to_string(moments.means(i)));
  }
  return model;
}

Engine make_engine(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Engine(seq);
}

ComponentSampler::ComponentSampler(const Model& model) {
  const std::size_t size = tree_of(model).size();
  kinds_.resize(size, Kind::kZero);
  slot_.resize(size, 0);
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        for (std::size_t c = 0; c < size; ++c) {
          const auto i = static_cast<Eigen::Index>(c);
          if constexpr (std::is_same_v<T, BinomialModel>) {
            if (m.counts[c] < 0) throw InvalidArgument("negative binomial count");
            if (m.counts[c] == 0 || m.p == 0) continue;
            kinds_[c] = Kind::kBinomial;
            slot_[c] = binomial_.size();
            binomial_.emplace_back(m.counts[c], to_double(m.p));
          } else if constexpr (std::is_same_v<T, PoissonModel>) {
            if (m.intensities(i) < 0) throw InvalidArgument("negative Poisson intensity");
            if (m.intensities(i) == 0) continue;
            kinds_[c] = Kind::kPoisson;
            slot_[c] = poisson_.size();
            poisson_.emplace_back(to_double(m.intensities(i)));
          } else if constexpr (std::is_same_v<T, GaussianModel>) {
            if (m.variances(i) < 0) throw InvalidArgument("negative Gaussian variance");
            kinds_[c] = Kind::kNormal;
            slot_[c] = normal_.size();
            normal_.emplace_back(to_double(m.component_means(i)), std::sqrt(to_double(m.variances(i))));
          } else {
            if (m.shapes(i) < 0) throw InvalidArgument("negative gamma shape");
            if (m.shapes(i) == 0) continue;
            kinds_[c] = Kind::kGamma;
            slot_[c] = gamma_.size();
            gamma_.emplace_back(to_double(m.shapes(i)), to_double(m.theta));
          }
        }
      },
      model);
}

void ComponentSampler::draw(Engine& engine, double* out) {
  for (std::size_t c = 0; c < kinds_.size(); ++c) {
    switch (kinds_[c]) {
      case Kind::kZero: out[c] = 0.0; break;
      case Kind::kBinomial: out[c] = static_cast<double>(binomial_[slot_[c]](engine)); break;
      case Kind::kPoisson: out[c] = static_cast<double>(poisson_[slot_[c]](engine)); break;
      case Kind::kNormal: out[c] = normal_[slot_[c]](engine); break;
      case Kind::kGamma: out[c] = gamma_[slot_[c]](engine); break;
    }
  }
}

Matrix<double> sample(const Model& model, std::size_t n, std::uint64_t seed, std::uint64_t stream) {
  if (n < 1) throw InvalidArgument("sample count must be at least 1");
  const DependencyTree& tree = tree_of(model);
  const Matrix<double> m = incidence_matrix<double>(tree);
  ComponentSampler sampler(model);
  Engine engine = make_engine(seed, stream);

  constexpr std::size_t kChunk = 4096;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> w(kChunk, m.rows());
  Matrix<double> out(static_cast<Eigen::Index>(n), tree.dim());
  for (std::size_t start = 0; start < n; start += kChunk) {
    const auto rows = static_cast<Eigen::Index>(std::min(kChunk, n - start));
    for (Eigen::Index r = 0; r < rows; ++r) sampler.draw(engine, w.row(r).data());
    out.middleRows(static_cast<Eigen::Index>(start), rows).noalias() = w.topRows(rows) * m;
  }
  return out;
}

CltBridge clt_bridge(const GaussianModel& target, std::int64_t n, const Rational& p) {
  if (n < 1) throw InvalidArgument("bridge size n must be at least 1");
  if (p <= 0 || p >= 1) throw InvalidArgument("bridge p must lie in (0, 1)");
  const Rational pq = p * (1 - p);
  const auto& tree = target.tree;

  FeasibilityReport report;
  report.family = Family::kBinomial;
  report.params.p = p;
  std::vector<std::int64_t> counts(tree.size());
  for (std::size_t c = 0; c < tree.size(); ++c) {
    const Rational& s = target.variances(static_cast<Eigen::Index>(c));
    if (s < 0) report.negative.emplace_back(tree.pair(c), s);
    counts[c] = static_cast<std::int64_t>(round_nearest(Rational(n) * s / pq));
  }
  if (!report.negative.empty()) throw InfeasibleDecomposition(std::move(report));

  CltBridge bridge{BinomialModel{tree, p, std::move(counts)}, n, {}, {}};
  bridge.offset = exact_moments(Model(bridge.binomial)).means;
  const Matrix<Rational> m = incidence_matrix<Rational>(tree);
  bridge.target_means = m.transpose() * target.component_means;
  return bridge;
}

Moments<Rational> bridge_moments(const CltBridge& bridge) {
  auto moments = exact_moments(Model(bridge.binomial));
  moments.means = bridge.target_means;
  moments.covariance /= Rational(bridge.n);
  return moments;
}

Rational bridge_error_bound(const CltBridge& bridge) {
  const Rational& p = bridge.binomial.p;
  return Rational(static_cast<std::int64_t>(bridge.binomial.counts.size())) * p * (1 - p) / (2 * Rational(bridge.n));
}

Matrix<double> sample_bridge(const CltBridge& bridge, std::size_t n_samples, std::uint64_t seed,
                             std::uint64_t stream) {
  Matrix<double> x = sample(Model(bridge.binomial), n_samples, seed, stream);
  const double scale = 1.0 / std::sqrt(static_cast<double>(bridge.n));
  for (Eigen::Index i = 0; i < x.cols(); ++i) {
    const double shift = to_double(bridge.offset(i));
    const double mean = to_double(bridge.target_means(i));
    x.col(i) = ((x.col(i).array() - shift) * scale + mean).matrix();
  }
  return x;
}

}  // namespace treecorr
