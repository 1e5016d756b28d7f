#include "treecorr/ordering.hpp"

namespace treecorr {

BinomialCoupling couple_binomial_increment(const BinomialModel& b, Pair pair) {
  const DependencyTree& tree = b.tree;
  if (pair.is_leaf()) throw CouplingUnavailable("coupling needs an internal node (k < l)");
  const std::size_t at = pair_index(tree.dim(), pair);
  const auto links = tree.links(at);
  if (b.counts[at] < 1)
    throw CouplingUnavailable("count at (" + pair.to_string() + ") is " + std::to_string(b.counts[at]) +
                              ", need at least 1");
  if (!links.grandchild.is_empty()) {
    if (!links.grandchild_node)
      throw CouplingUnavailable("grandchild " + links.grandchild.to_string() + " of (" + pair.to_string() +
                                ") is not a node");
    if (b.counts[*links.grandchild_node] < 1)
      throw CouplingUnavailable("count at grandchild (" + tree.pair(*links.grandchild_node).to_string() +
                                ") is zero");
  }

  BinomialModel a = b;
  a.counts[at] -= 1;
  a.counts[links.child_k] += 1;
  a.counts[links.child_l] += 1;
  if (links.grandchild_node) a.counts[*links.grandchild_node] -= 1;
  return BinomialCoupling{std::move(a), b, pair, links};
}

Matrix<double> sample_coupled(const BinomialCoupling& coupling, std::size_t n, std::uint64_t seed,
                              std::uint64_t stream) {
  if (n < 1) throw InvalidArgument("sample count must be at least 1");
  const auto& tree = coupling.b.tree;
  const std::size_t at = pair_index(tree.dim(), coupling.pair);
  const auto& links = coupling.links;

  // Shared base draws; U and V are added on top.
  BinomialModel base = coupling.a;
  base.counts[links.child_k] = coupling.b.counts[links.child_k];
  base.counts[links.child_l] = coupling.b.counts[links.child_l];
  ComponentSampler sampler{Model(base)};
  Engine engine = make_engine(seed, stream);
  std::bernoulli_distribution bernoulli(to_double(coupling.b.p));

  const Matrix<double> m = incidence_matrix<double>(tree);
  const auto size = static_cast<Eigen::Index>(tree.size());
  const int d = tree.dim();
  Vector<double> w(size), wa(size), wb(size);
  Matrix<double> out(static_cast<Eigen::Index>(n), 2 * d);
  for (std::size_t r = 0; r < n; ++r) {
    sampler.draw(engine, w.data());
    const double u = bernoulli(engine) ? 1.0 : 0.0;
    const double v = bernoulli(engine) ? 1.0 : 0.0;
    wa = w;
    wb = w;
    wb(static_cast<Eigen::Index>(at)) += u;
    wa(static_cast<Eigen::Index>(links.child_k)) += u;
    wa(static_cast<Eigen::Index>(links.child_l)) += v;
    if (links.grandchild_node) wb(static_cast<Eigen::Index>(*links.grandchild_node)) += v;
    const auto row = static_cast<Eigen::Index>(r);
    out.row(row).head(d) = wa.transpose() * m;
    out.row(row).tail(d) = wb.transpose() * m;
  }
  return out;
}

std::pair<Rational, Rational> four_atom_expectations(const SupermodularFunction& phi, Pair pair, const Rational& p) {
  const int d = phi.dim();
  if (pair.is_leaf() || pair.l > d || pair.k < 1) throw IndexError("four-atom reduction needs 1 <= k < l <= d");
  const Rational q = 1 - p;
  Rational left(0), right(0);
  for (int u = 0; u <= 1; ++u)
    for (int v = 0; v <= 1; ++v) {
      const Rational weight = (u ? p : q) * (v ? p : q);
      std::vector<Rational> z(static_cast<std::size_t>(d), Rational(u + v));
      z[static_cast<std::size_t>(pair.k - 1)] = u;
      z[static_cast<std::size_t>(pair.l - 1)] = u;
      left += weight * phi(z);
      z[static_cast<std::size_t>(pair.l - 1)] = v;
      right += weight * phi(z);
    }
  return {left, right};
}

}  // namespace treecorr
