#include "treecorr/battery.hpp"

#include <cmath>
#include <sstream>

#include "treecorr/errors.hpp"

namespace treecorr {

namespace {

void check_index(int dim, int i) {
  if (i < 1 || i > dim) throw IndexError("battery index " + std::to_string(i) + " outside [1, " + std::to_string(dim) + "]");
}

template <typename Scalar>
Scalar outer_value(const ConvexOfSum& f, const Scalar& s, const Scalar& shift) {
  switch (f.outer) {
    case Outer::kSquare: return s * s;
    case Outer::kExpCapped: {
      Scalar term(1);
      Scalar sum(1);
      for (int r = 1; r <= 6; ++r) {
        term = term * s / Scalar(r);
        sum += term;
      }
      return sum;
    }
    case Outer::kPositivePart: {
      const Scalar t = s - shift;
      if (t <= Scalar(0)) return Scalar(0);
      Scalar out(1);
      for (int r = 0; r < f.power; ++r) out *= t;
      return out;
    }
  }
  return Scalar(0);
}

const char* outer_name(Outer o) {
  switch (o) {
    case Outer::kSquare: return "square";
    case Outer::kExpCapped: return "exp6";
    case Outer::kPositivePart: return "pospart";
  }
  return "?";
}

}  // namespace

SupermodularFunction::SupermodularFunction(int dim, Form form) : dim_(dim), form_(std::move(form)) {
  if (dim < 1) throw DimensionError("battery dimension must be positive");
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, OrthantIndicator>) {
          for (const auto& [i, t] : f.thresholds) check_index(dim, i);
        } else if constexpr (std::is_same_v<T, ConvexOfSum>) {
          if (static_cast<int>(f.coefficients.size()) != dim) throw DimensionError("one coefficient per coordinate");
          for (const auto& c : f.coefficients)
            if (c < 0) throw InvalidArgument("convex-of-sum coefficients must be nonnegative");
          if (f.outer == Outer::kPositivePart && f.power < 1) throw InvalidArgument("positive-part power must be >= 1");
        } else if constexpr (std::is_same_v<T, PairMin> || std::is_same_v<T, PairProduct>) {
          check_index(dim, f.i);
          check_index(dim, f.j);
        } else {
          for (const auto& [w, g] : f.terms) {
            if (w < 0) throw InvalidArgument("mixture weights must be nonnegative");
            if (!g || g->dim() != dim) throw DimensionError("mixture member has the wrong dimension");
          }
        }
      },
      form_);
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, OrthantIndicator>) {
          for (const auto& [i, t] : f.thresholds) numeric_.push_back(to_double(t));
        } else if constexpr (std::is_same_v<T, ConvexOfSum>) {
          for (const auto& c : f.coefficients) numeric_.push_back(to_double(c));
          numeric_.push_back(to_double(f.shift));
        } else if constexpr (std::is_same_v<T, Mixture>) {
          for (const auto& [w, g] : f.terms) numeric_.push_back(to_double(w));
        }
      },
      form_);
}

std::string SupermodularFunction::name() const {
  std::ostringstream out;
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, OrthantIndicator>) {
          out << "orthant(";
          for (std::size_t n = 0; n < f.thresholds.size(); ++n)
            out << (n ? " " : "") << "x" << f.thresholds[n].first << ">=" << to_string(f.thresholds[n].second);
          out << ")";
        } else if constexpr (std::is_same_v<T, ConvexOfSum>) {
          out << outer_name(f.outer);
          if (f.outer == Outer::kPositivePart) out << "[" << to_string(f.shift) << "^" << f.power << "]";
          out << "(";
          bool first = true;
          for (std::size_t i = 0; i < f.coefficients.size(); ++i) {
            if (f.coefficients[i] == 0) continue;
            out << (first ? "" : "+");
            if (f.coefficients[i] != 1) out << to_string(f.coefficients[i]) << "*";
            out << "x" << i + 1;
            first = false;
          }
          out << ")";
        } else if constexpr (std::is_same_v<T, PairMin>) {
          out << "min(x" << f.i << ",x" << f.j << ")";
        } else if constexpr (std::is_same_v<T, PairProduct>) {
          out << "x" << f.i << "*x" << f.j;
        } else {
          out << "mix{";
          for (std::size_t n = 0; n < f.terms.size(); ++n)
            out << (n ? " + " : "") << to_string(f.terms[n].first) << "*" << f.terms[n].second->name();
          out << "}";
        }
      },
      form_);
  return out.str();
}

bool SupermodularFunction::nondecreasing() const {
  return std::visit(
      [](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Mixture>) {
          for (const auto& [w, g] : f.terms)
            if (w != 0 && !g->nondecreasing()) return false;
          return true;
        } else {
          return true;
        }
      },
      form_);
}

template <typename Scalar>
Scalar SupermodularFunction::evaluate(std::span<const Scalar> x) const {
  if (static_cast<int>(x.size()) != dim_) throw DimensionError("battery function evaluated at the wrong dimension");
  auto param = [&](std::size_t n, const Rational& exact) -> Scalar {
    if constexpr (std::is_same_v<Scalar, Rational>) return exact;
    else return numeric_[n];
  };
  return std::visit(
      [&](const auto& f) -> Scalar {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, OrthantIndicator>) {
          for (std::size_t n = 0; n < f.thresholds.size(); ++n) {
            const auto& [i, t] = f.thresholds[n];
            if (x[static_cast<std::size_t>(i - 1)] < param(n, t)) return Scalar(0);
          }
          return Scalar(1);
        } else if constexpr (std::is_same_v<T, ConvexOfSum>) {
          Scalar s(0);
          for (std::size_t i = 0; i < f.coefficients.size(); ++i) s += param(i, f.coefficients[i]) * x[i];
          return outer_value(f, s, param(f.coefficients.size(), f.shift));
        } else if constexpr (std::is_same_v<T, PairMin>) {
          return std::min(x[static_cast<std::size_t>(f.i - 1)], x[static_cast<std::size_t>(f.j - 1)]);
        } else if constexpr (std::is_same_v<T, PairProduct>) {
          return x[static_cast<std::size_t>(f.i - 1)] * x[static_cast<std::size_t>(f.j - 1)];
        } else {
          Scalar out(0);
          for (std::size_t n = 0; n < f.terms.size(); ++n)
            out += param(n, f.terms[n].first) * f.terms[n].second->template evaluate<Scalar>(x);
          return out;
        }
      },
      form_);
}

Rational SupermodularFunction::operator()(std::span<const Rational> x) const { return evaluate<Rational>(x); }
double SupermodularFunction::operator()(std::span<const double> x) const { return evaluate<double>(x); }

Rational SupermodularFunction::at_vertex(const Vertex& v) const {
  if (v.dim() != dim_) throw DimensionError("vertex dimension does not match battery function");
  std::vector<Rational> x(static_cast<std::size_t>(dim_), Rational(0));
  for (int i : v.members()) x[static_cast<std::size_t>(i - 1)] = 1;
  return evaluate<Rational>(x);
}

std::vector<SupermodularFunction> standard_battery(int dim) {
  std::vector<SupermodularFunction> out;
  const auto ones = std::vector<Rational>(static_cast<std::size_t>(dim), Rational(1));
  for (int i = 1; i <= dim; ++i)
    for (int j = i + 1; j <= dim; ++j) {
      out.emplace_back(dim, PairProduct{i, j});
      out.emplace_back(dim, PairMin{i, j});
      out.emplace_back(dim, OrthantIndicator{{{i, Rational(1)}, {j, Rational(1)}}});
      std::vector<Rational> c(static_cast<std::size_t>(dim), Rational(0));
      c[static_cast<std::size_t>(i - 1)] = c[static_cast<std::size_t>(j - 1)] = 1;
      out.emplace_back(dim, ConvexOfSum{c, Outer::kSquare, Rational(0), 1});
      out.emplace_back(dim, ConvexOfSum{c, Outer::kPositivePart, Rational(1), 1});
    }
  if (dim != 2) out.emplace_back(dim, ConvexOfSum{ones, Outer::kSquare, Rational(0), 1});
  out.emplace_back(dim, ConvexOfSum{ones, Outer::kExpCapped, Rational(0), 1});
  out.emplace_back(dim, ConvexOfSum{ones, Outer::kPositivePart, Rational(2), 2});
  return out;
}

namespace {

Rational random_rational(Engine& engine, int max_num, int den) {
  std::uniform_int_distribution<int> num(0, max_num);
  return Rational(num(engine), den);
}

SupermodularFunction random_member(int dim, Engine& engine, int max_threshold, int depth) {
  std::uniform_int_distribution<int> kind(0, depth > 0 ? 4 : 3);
  std::uniform_int_distribution<int> index(1, dim);
  switch (kind(engine)) {
    case 0: {
      OrthantIndicator f;
      std::uniform_int_distribution<int> t(0, max_threshold);
      for (int i = 1; i <= dim; ++i)
        if (std::bernoulli_distribution(0.6)(engine)) f.thresholds.emplace_back(i, Rational(t(engine)));
      return SupermodularFunction(dim, f);
    }
    case 1: {
      ConvexOfSum f;
      for (int i = 0; i < dim; ++i) f.coefficients.push_back(random_rational(engine, 4, 4));
      const int outer = std::uniform_int_distribution<int>(0, 2)(engine);
      f.outer = static_cast<Outer>(outer);
      if (f.outer == Outer::kExpCapped)
        for (auto& c : f.coefficients) c /= 4;
      f.shift = random_rational(engine, 2 * max_threshold, 2);
      f.power = std::uniform_int_distribution<int>(1, 3)(engine);
      return SupermodularFunction(dim, f);
    }
    case 2: {
      if (dim == 1) return SupermodularFunction(dim, PairMin{1, 1});
      const int i = index(engine);
      int j = index(engine);
      while (j == i) j = index(engine);
      return SupermodularFunction(dim, PairMin{i, j});
    }
    case 3: {
      if (dim == 1) return SupermodularFunction(dim, PairProduct{1, 1});
      const int i = index(engine);
      int j = index(engine);
      while (j == i) j = index(engine);
      return SupermodularFunction(dim, PairProduct{i, j});
    }
    default: {
      Mixture m;
      const int terms = std::uniform_int_distribution<int>(2, 3)(engine);
      for (int n = 0; n < terms; ++n)
        m.terms.emplace_back(random_rational(engine, 4, 4) + Rational(1, 4),
                             std::make_shared<const SupermodularFunction>(
                                 random_member(dim, engine, max_threshold, depth - 1)));
      return SupermodularFunction(dim, m);
    }
  }
}

}  // namespace

std::vector<SupermodularFunction> make_battery(int dim, Engine& engine, int random_count, int max_threshold) {
  auto out = standard_battery(dim);
  for (int n = 0; n < random_count; ++n) out.push_back(random_member(dim, engine, max_threshold, 1));
  return out;
}

std::optional<SupermodularityDefect> self_test(const SupermodularFunction& f, Engine& engine, int pairs, int range,
                                               bool nonnegative_only) {
  std::uniform_int_distribution<int> coord(nonnegative_only ? 0 : -range, range);
  const auto d = static_cast<std::size_t>(f.dim());
  std::vector<Rational> x(d), y(d), lo(d), hi(d);
  for (int n = 0; n < pairs; ++n) {
    for (std::size_t i = 0; i < d; ++i) {
      x[i] = coord(engine);
      y[i] = coord(engine);
      lo[i] = std::min(x[i], y[i]);
      hi[i] = std::max(x[i], y[i]);
    }
    const Rational gap = f(hi) + f(lo) - f(x) - f(y);
    if (gap < 0) return SupermodularityDefect{x, y, gap};
    if (nonnegative_only && f.nondecreasing()) {
      const Rational rise = f(hi) - f(x);
      if (rise < 0) return SupermodularityDefect{x, hi, rise};
    }
  }
  return std::nullopt;
}

}  // namespace treecorr
