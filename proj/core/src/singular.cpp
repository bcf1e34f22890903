#include "rwre/singular.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rwre/errors.hpp"
#include "rwre/lattice.hpp"

namespace rwre {

namespace {

// A mixture component: fixed arrows (0 = east, 1 = north) on some sites, fair
// coins elsewhere.
using Constraint = std::map<Point, int>;
using Mixture = std::map<Constraint, double>;

Mixture view_law(int n, int k) {
  Mixture out;
  const double w = std::ldexp(1.0, -n);
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
    std::vector<Point> xs{Point(0, 0)};
    for (int m = 0; m < n; ++m)
      xs.push_back(xs.back() + ((bits >> m) & 1 ? Point(0, 1) : Point(1, 0)));
    Constraint c;
    for (int m = std::max(0, n - k); m < n; ++m)
      c[xs[static_cast<std::size_t>(m)] - xs.back()] = static_cast<int>((bits >> m) & 1);
    out[c] += w;
  }
  return out;
}

// Signed mixture component: fixed arrows per ordered site (-1 when free).
struct Component {
  std::vector<signed char> arrow;
  double weight = 0.0;
};

// L1 norm of a signed mixture of "fixed arrows here, fair coins elsewhere"
// measures, by depth-first splitting on the ordered sites. Components with
// identical remaining constraints are merged first, so equal mixtures cancel
// without any splitting.
class SignedL1 {
 public:
  SignedL1(std::size_t sites, std::size_t cap) : sites_(sites), cap_(cap) {}

  double run(std::vector<Component> comps) { return search(0, std::move(comps)); }
  std::size_t nodes() const { return nodes_; }

 private:
  double search(std::size_t s, std::vector<Component> comps) {
    if (++nodes_ > cap_)
      throw EnumerationCapExceeded("singular check: more than " + std::to_string(cap_) +
                                   " search nodes");
    std::map<std::vector<signed char>, double> merged;
    for (auto& c : comps)
      merged[std::vector<signed char>(c.arrow.begin() + static_cast<long>(s), c.arrow.end())] +=
          c.weight;
    comps.clear();
    bool constrained = false;
    double total_weight = 0.0;
    for (auto& [rest, w] : merged) {
      if (w == 0.0) continue;
      total_weight += w;
      for (signed char a : rest) constrained = constrained || a >= 0;
      Component c;
      c.arrow.assign(s, -1);
      c.arrow.insert(c.arrow.end(), rest.begin(), rest.end());
      c.weight = w;
      comps.push_back(std::move(c));
    }
    if (comps.empty()) return 0.0;
    if (!constrained || s >= sites_) return std::abs(total_weight);
    double total = 0.0;
    for (int arrow = 0; arrow < 2; ++arrow) {
      std::vector<Component> next;
      for (const auto& c : comps) {
        if (c.arrow[s] < 0) {
          next.push_back(c);
          next.back().weight *= 0.5;
        } else if (c.arrow[s] == arrow) {
          next.push_back(c);
        }
      }
      if (!next.empty()) total += search(s + 1, std::move(next));
    }
    return total;
  }

  std::size_t sites_;
  std::size_t cap_;
  std::size_t nodes_ = 0;
};

double tv_between(const Mixture& mu, const Mixture& nu, std::size_t cap, std::size_t& sites,
                  std::size_t& nodes) {
  std::map<Point, std::size_t> order;
  for (const auto* m : {&mu, &nu})
    for (const auto& [c, w] : *m)
      for (const auto& [site, a] : c) order.emplace(site, 0);
  std::size_t i = 0;
  for (auto& [site, idx] : order) idx = i++;
  std::vector<Component> comps;
  for (const auto* m : {&mu, &nu})
    for (const auto& [c, w] : *m) {
      Component comp;
      comp.arrow.assign(order.size(), -1);
      comp.weight = m == &mu ? w : -w;
      for (const auto& [site, a] : c) comp.arrow[order.at(site)] = static_cast<signed char>(a);
      comps.push_back(std::move(comp));
    }
  SignedL1 search(order.size(), cap);
  const double l1 = search.run(std::move(comps));
  sites = order.size();
  nodes = search.nodes();
  return 0.5 * l1;
}

// Under the restricted view, a configuration c of arrows on levels 1..k has
// probability 2^-|S| N(c), N the number of level-k sites whose arrow path
// reaches the origin. Those sites form an interval whose length moves by
// -1, 0, 0, +1 per level (each end arrow a fair coin) and sticks at 0.
double tv_against_environment(int k) {
  std::vector<double> law(static_cast<std::size_t>(k) + 2, 0.0);
  law[1] = 1.0;
  for (int level = 0; level < k; ++level) {
    std::vector<double> next(law.size() + 1, 0.0);
    next[0] += law[0];
    for (std::size_t n = 1; n < law.size(); ++n) {
      next[n - 1] += 0.25 * law[n];
      next[n] += 0.5 * law[n];
      next[n + 1] += 0.25 * law[n];
    }
    law = std::move(next);
  }
  double mean_abs = 0.0;
  for (std::size_t n = 0; n < law.size(); ++n)
    mean_abs += law[n] * std::abs(static_cast<double>(n) - 1.0);
  return 0.5 * mean_abs;
}

}  // namespace

SingularReport singular_restriction_check(int n, int k, std::size_t node_cap) {
  if (k < 0 || k > n || n > 20)
    throw ConfigError("singular check: need 0 <= k <= n <= 20");
  SingularReport report;
  report.n = n;
  report.k = k;
  const Mixture at_n = view_law(n, k);
  const Mixture at_k = view_law(k, k);

  report.tv_n_vs_k = tv_between(at_n, at_k, node_cap, report.constrained_sites, report.nodes);
  report.tv_n_vs_environment = tv_against_environment(k);
  return report;
}

}  // namespace rwre
