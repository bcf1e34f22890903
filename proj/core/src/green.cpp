#include "rwre/green.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <string>

#include "rwre/errors.hpp"

namespace rwre {

namespace {

constexpr double kMinRcond = 1e-13;

}  // namespace

double OccupancyTable::visits_at(const Point& x) const {
  const long i = volume.index_of(x);
  return i < 0 ? 0.0 : visits[static_cast<std::size_t>(i)];
}

double OccupancyTable::exit_mass() const {
  double total = 0.0;
  for (const auto& [site, p] : exit_law) total += p;
  return total;
}

OccupancyTable occupancy(const Environment& env, const FiniteVolume& volume, const Point& start,
                         const OccupancyOptions& options) {
  const long s = volume.index_of(start);
  if (s < 0) throw ConfigError("occupancy: start " + format_point(start, volume.dim()) +
                               " is not in the volume");
  const std::size_t n = volume.size();
  if (n > options.max_sites)
    throw SolverError("occupancy: volume of " + std::to_string(n) + " sites exceeds cap " +
                      std::to_string(options.max_sites));

  const auto& sites = volume.sites();
  std::vector<TransitionVector> omega;
  omega.reserve(n);
  for (const auto& x : sites) omega.push_back(env.at(x));

  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n),
                                                static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < omega[i].offsets.size(); ++k) {
      const long t = volume.index_of(sites[i] + omega[i].offsets[k]);
      if (t >= 0) a(static_cast<Eigen::Index>(i), t) -= omega[i].probs[k];
    }

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  const double rcond = lu.rcond();
  if (!(rcond > kMinRcond))
    throw SolverError("occupancy: I - P_U is numerically singular (rcond " +
                      std::to_string(rcond) + ")");

  OccupancyTable table{volume, start, {}, {}, 0.0, 0.0, {}, {}, {}};
  table.visits.resize(n);
  Eigen::MatrixXd inverse;
  if (options.full) {
    inverse = lu.inverse();
    for (std::size_t i = 0; i < n; ++i)
      table.visits[i] = inverse(s, static_cast<Eigen::Index>(i));
  } else {
    // Row s of (I - P)^{-1}: solve (I - P)^T v = e_s.
    Eigen::VectorXd e = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    e(s) = 1.0;
    const Eigen::VectorXd v = lu.transpose().solve(e);
    for (std::size_t i = 0; i < n; ++i) table.visits[i] = v(static_cast<Eigen::Index>(i));
  }

  std::map<Point, double> exits;
  for (std::size_t i = 0; i < n; ++i) {
    table.expected_exit_time += table.visits[i];
    for (std::size_t k = 0; k < omega[i].offsets.size(); ++k) {
      const Point y = sites[i] + omega[i].offsets[k];
      if (!volume.contains(y) && omega[i].probs[k] > 0.0)
        exits[y] += table.visits[i] * omega[i].probs[k];
    }
  }
  table.exit_law.assign(exits.begin(), exits.end());
  for (const auto& [b, p] : table.exit_law) table.expected_exit_projection += p * dot(b, options.ell);

  if (options.full) {
    table.visit_prob.resize(n);
    table.escape.resize(n);
    table.escape_step_probs.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      const double gxx = inverse(ii, ii);
      table.visit_prob[i] = inverse(s, ii) / gxx;
      for (std::size_t k = 0; k < omega[i].offsets.size(); ++k) {
        const long t = volume.index_of(sites[i] + omega[i].offsets[k]);
        const double esc = t < 0 ? 1.0 : 1.0 - inverse(t, ii) / gxx;
        table.escape[i].push_back(esc);
        table.escape_step_probs[i].push_back(omega[i].probs[k]);
      }
    }
  }
  return table;
}

double exponential_moment(const Environment& env, double lambda, const FiniteVolume& volume,
                          const Point& start, const Vec& ell) {
  if (!(lambda > 0.0)) throw ConfigError("exponential_moment: lambda must be > 0");
  OccupancyOptions options;
  options.ell = ell;
  const auto table = occupancy(env, volume, start, options);
  double total = 0.0;
  for (std::size_t i = 0; i < volume.size(); ++i)
    total += table.visits[i] * std::exp(-lambda * dot(volume.sites()[i], ell));
  return total;
}

struct Green1D::Impl {
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  Eigen::Index n = 0;
};

namespace {

// I - P restricted to [lo, hi] (skipping `removed` if inside), as a sparse
// matrix; also returns the probability of jumping onto `removed` per row.
Eigen::SparseMatrix<double> killed_generator(const Environment& env, Coord lo, Coord hi,
                                             const Coord* removed,
                                             Eigen::VectorXd* mass_to_removed) {
  const auto n = static_cast<Eigen::Index>(hi - lo + 1);
  auto index = [&](Coord x) -> Eigen::Index {
    if (x < lo || x > hi) return -1;
    if (removed) {
      if (x == *removed) return -1;
      return static_cast<Eigen::Index>(x > *removed ? x - lo - 1 : x - lo);
    }
    return static_cast<Eigen::Index>(x - lo);
  };
  const Eigen::Index size = removed ? n - 1 : n;
  std::vector<Eigen::Triplet<double>> entries;
  if (mass_to_removed) *mass_to_removed = Eigen::VectorXd::Zero(size);
  for (Coord x = lo; x <= hi; ++x) {
    const Eigen::Index row = index(x);
    if (row < 0) continue;
    entries.emplace_back(row, row, 1.0);
    const auto v = env.at(Point(x));
    for (std::size_t k = 0; k < v.offsets.size(); ++k) {
      const Coord y = x + v.offsets[k][0];
      if (removed && y == *removed) {
        if (mass_to_removed) (*mass_to_removed)(row) += v.probs[k];
        continue;
      }
      const Eigen::Index col = index(y);
      if (col >= 0) entries.emplace_back(row, col, -v.probs[k]);
    }
  }
  Eigen::SparseMatrix<double> a(size, size);
  a.setFromTriplets(entries.begin(), entries.end());
  a.makeCompressed();
  return a;
}

void require_1d(const Environment& env, const char* what) {
  if (env.dim() != 1) throw ConfigError(std::string(what) + ": model must be one-dimensional");
}

TruncatedValue doubling(Coord i, Coord j, const TruncationPolicy& policy, const char* what,
                        const std::function<double(Coord, Coord)>& solve) {
  if (policy.initial_pad < 1 || !(policy.tolerance > 0.0))
    throw ConfigError(std::string(what) + ": invalid truncation policy");
  Coord pad = policy.initial_pad;
  Coord lo = std::min(i, j) - pad, hi = std::max(i, j) + pad;
  double previous = solve(lo, hi);
  while (true) {
    const Coord next = 2 * pad;
    if (next > policy.max_pad)
      throw ConvergenceError(std::string(what) + ": window padding exceeded " +
                             std::to_string(policy.max_pad) + " before stabilising");
    lo = std::min(i, j) - next;
    hi = std::max(i, j) + next;
    const double value = solve(lo, hi);
    const double diff = std::abs(value - previous);
    pad = next;
    if (diff < policy.tolerance) return TruncatedValue{value, diff, lo, hi};
    previous = value;
  }
}

}  // namespace

Green1D::Green1D(const Environment& env, Coord lo, Coord hi)
    : impl_(std::make_unique<Impl>()), lo_(lo), hi_(hi) {
  require_1d(env, "green_1d");
  if (hi < lo) throw ConfigError("green_1d: empty window");
  const auto a = killed_generator(env, lo, hi, nullptr, nullptr);
  impl_->n = a.rows();
  impl_->lu.analyzePattern(a);
  impl_->lu.factorize(a);
  if (impl_->lu.info() != Eigen::Success)
    throw SolverError("green_1d: factorization failed on window [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "]");
}

Green1D::~Green1D() = default;
Green1D::Green1D(Green1D&&) noexcept = default;
Green1D& Green1D::operator=(Green1D&&) noexcept = default;

std::vector<double> Green1D::column(Coord j) const {
  if (j < lo_ || j > hi_) throw ConfigError("green_1d: target outside window");
  Eigen::VectorXd e = Eigen::VectorXd::Zero(impl_->n);
  e(static_cast<Eigen::Index>(j - lo_)) = 1.0;
  const Eigen::VectorXd x = impl_->lu.solve(e);
  return {x.data(), x.data() + x.size()};
}

double Green1D::value(Coord i, Coord j) const {
  if (i < lo_ || i > hi_) throw ConfigError("green_1d: start outside window");
  return column(j)[static_cast<std::size_t>(i - lo_)];
}

TruncatedValue green_1d(const Environment& env, Coord i, Coord j,
                        const TruncationPolicy& policy) {
  require_1d(env, "green_1d");
  return doubling(i, j, policy, "green_1d",
                  [&](Coord lo, Coord hi) { return Green1D(env, lo, hi).value(i, j); });
}

TruncatedValue hitting_probability_1d(const Environment& env, Coord i, Coord j,
                                      const TruncationPolicy& policy) {
  require_1d(env, "hitting_probability_1d");
  if (i == j) return TruncatedValue{1.0, 0.0, i, i};
  return doubling(i, j, policy, "hitting_probability_1d", [&](Coord lo, Coord hi) {
    Eigen::VectorXd rhs;
    const auto a = killed_generator(env, lo, hi, &j, &rhs);
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.analyzePattern(a);
    lu.factorize(a);
    if (lu.info() != Eigen::Success) throw SolverError("hitting_probability_1d: factorization failed");
    const Eigen::VectorXd h = lu.solve(rhs);
    const Coord row = i > j ? i - lo - 1 : i - lo;
    return h(static_cast<Eigen::Index>(row));
  });
}

}  // namespace rwre
