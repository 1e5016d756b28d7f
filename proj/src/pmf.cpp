#include "treecorr/pmf.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>

namespace treecorr {

std::uint64_t default_budget() {
  if (const char* env = std::getenv("TREECORR_BUDGET")) {
    char* end = nullptr;
    const double value = std::strtod(env, &end);
    if (end != env && value >= 1) return static_cast<std::uint64_t>(value);
  }
  return 100'000'000;
}

std::vector<Rational> binomial_pmf(std::int64_t count, const Rational& p, int cap) {
  if (count < 0) throw InvalidArgument("negative binomial count");
  const Rational q = 1 - p;
  std::vector<Rational> out(static_cast<std::size_t>(cap) + 1, Rational(0));
  // P(t) = C(n,t) p^t q^(n-t), built from t = 0 upward.
  Rational qn(1);
  for (std::int64_t i = 0; i < count; ++i) qn *= q;
  if (q != 0) {
    Rational term = qn;
    for (int t = 0; t <= cap && t <= count; ++t) {
      out[static_cast<std::size_t>(t)] = term;
      term = term * Rational(count - t) / Rational(t + 1) * p / q;
    }
  } else if (count <= cap) {
    out[static_cast<std::size_t>(count)] = 1;
  }
  return out;
}

std::vector<double> poisson_pmf(double lambda, int cap) {
  if (lambda < 0) throw InvalidArgument("negative Poisson intensity");
  std::vector<double> out(static_cast<std::size_t>(cap) + 1, 0.0);
  double term = std::exp(-lambda);
  for (int t = 0; t <= cap; ++t) {
    out[static_cast<std::size_t>(t)] = term;
    term *= lambda / (t + 1);
  }
  return out;
}

double poisson_tail(double lambda, int m) {
  if (lambda == 0) return 0.0;
  // Direct summation of the upper terms avoids cancellation in 1 - cdf.
  double log_term = -lambda + (m + 1) * std::log(lambda) - std::lgamma(m + 2.0);
  double term = std::exp(log_term);
  double sum = 0.0;
  for (int t = m + 1; term > 0; ++t) {
    sum += term;
    term *= lambda / (t + 1);
    if (t > lambda && term < sum * 1e-18) break;
  }
  return sum;
}

std::vector<int> component_caps(const Model& model, double total_tail) {
  const std::size_t size = tree_of(model).size();
  const double per_component = total_tail / static_cast<double>(size);
  std::vector<int> caps(size, 0);
  if (const auto* b = std::get_if<BinomialModel>(&model)) {
    for (std::size_t c = 0; c < size; ++c) caps[c] = static_cast<int>(b->counts[c]);
    return caps;
  }
  if (const auto* m = std::get_if<PoissonModel>(&model)) {
    for (std::size_t c = 0; c < size; ++c) {
      const double lambda = to_double(m->intensities(static_cast<Eigen::Index>(c)));
      int cap = 0;
      while (poisson_tail(lambda, cap) >= per_component) ++cap;
      caps[c] = cap;
    }
    return caps;
  }
  throw UnsupportedFamily(std::string("no lattice pmf for the ") + family_name(family_of(model)) + " family");
}

namespace {

template <typename Scalar>
std::vector<Scalar> marginal(const Model& model, std::size_t c, int cap) {
  if (const auto* b = std::get_if<BinomialModel>(&model)) {
    auto exact = binomial_pmf(b->counts[c], b->p, cap);
    if constexpr (std::is_same_v<Scalar, Rational>) {
      return exact;
    } else {
      std::vector<double> out(exact.size());
      for (std::size_t t = 0; t < exact.size(); ++t) out[t] = to_double(exact[t]);
      return out;
    }
  }
  if (const auto* m = std::get_if<PoissonModel>(&model)) {
    if constexpr (std::is_same_v<Scalar, Rational>) {
      throw UnsupportedFamily("Poisson probabilities are irrational; use floating-point mode");
    } else {
      return poisson_pmf(to_double(m->intensities(static_cast<Eigen::Index>(c))), cap);
    }
  }
  throw UnsupportedFamily(std::string("no lattice pmf for the ") + family_name(family_of(model)) + " family");
}

template <typename Scalar>
TruncatedPmf<Scalar> enumerate(const Model& model, std::optional<std::vector<int>> caps, std::uint64_t budget) {
  const DependencyTree& tree = tree_of(model);
  const int d = tree.dim();
  if (!caps) caps = component_caps(model);
  if (caps->size() != tree.size()) throw DimensionError("one cap per component required");

  std::vector<std::vector<Scalar>> q(tree.size());
  for (std::size_t c = 0; c < tree.size(); ++c) {
    if ((*caps)[c] < 0) throw InvalidArgument("negative component cap");
    q[c] = marginal<Scalar>(model, c, (*caps)[c]);
  }

  TruncatedPmf<Scalar> out;
  out.dim = d;
  out.extent.assign(static_cast<std::size_t>(d), 0);
  for (std::size_t c = 0; c < tree.size(); ++c)
    for (int i : tree.node(c).members()) out.extent[static_cast<std::size_t>(i - 1)] += (*caps)[c];

  std::vector<std::size_t> stride(static_cast<std::size_t>(d), 1);
  double box = 1;
  for (int i = d - 1; i >= 0; --i) {
    if (i + 1 < d) stride[i] = stride[i + 1] * static_cast<std::size_t>(out.extent[i + 1] + 1);
    box *= out.extent[i] + 1;
  }
  if (box > static_cast<double>(budget))
    throw BudgetExceeded("pmf box of " + std::to_string(static_cast<std::uint64_t>(box)) + " points exceeds budget " +
                         std::to_string(budget));

  std::vector<Scalar> cur(static_cast<std::size_t>(box), Scalar(0));
  std::vector<Scalar> next(cur.size(), Scalar(0));
  cur[0] = Scalar(1);
  std::vector<int> active(static_cast<std::size_t>(d), 0);
  std::uint64_t work = 0;

  for (std::size_t c = 0; c < tree.size(); ++c) {
    const int cap = (*caps)[c];
    std::size_t shift = 0;
    for (int i : tree.node(c).members()) shift += stride[static_cast<std::size_t>(i - 1)];

    std::uint64_t points = 1;
    for (int a : active) points *= static_cast<std::uint64_t>(a + 1);
    work += points * static_cast<std::uint64_t>(cap + 1);
    if (work > budget)
      throw BudgetExceeded("pmf enumeration needs more than " + std::to_string(budget) + " updates");

    std::fill(next.begin(), next.end(), Scalar(0));
    std::vector<int> x(static_cast<std::size_t>(d), 0);
    for (std::uint64_t n = 0; n < points; ++n) {
      std::size_t at = 0;
      for (int i = 0; i < d; ++i) at += stride[i] * static_cast<std::size_t>(x[i]);
      const Scalar& w = cur[at];
      if (w != Scalar(0))
        for (int t = 0; t <= cap; ++t)
          if (q[c][static_cast<std::size_t>(t)] != Scalar(0)) next[at + shift * static_cast<std::size_t>(t)] += w * q[c][static_cast<std::size_t>(t)];
      for (int i = d - 1; i >= 0; --i) {
        if (++x[i] <= active[i]) break;
        x[i] = 0;
      }
    }
    std::swap(cur, next);
    for (int i : tree.node(c).members()) active[static_cast<std::size_t>(i - 1)] += cap;
  }

  out.captured = Scalar(1);
  for (std::size_t c = 0; c < tree.size(); ++c) {
    Scalar total(0);
    for (const auto& v : q[c]) total += v;
    out.captured *= total;
  }
  out.mass = std::move(cur);
  return out;
}

}  // namespace

TruncatedPmf<Rational> exact_truncated_pmf_rational(const Model& model, std::optional<std::vector<int>> caps,
                                                    std::uint64_t budget) {
  return enumerate<Rational>(model, std::move(caps), budget);
}

TruncatedPmf<double> exact_truncated_pmf_double(const Model& model, std::optional<std::vector<int>> caps,
                                                std::uint64_t budget) {
  return enumerate<double>(model, std::move(caps), budget);
}

}  // namespace treecorr
