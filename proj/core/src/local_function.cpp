#include "rwre/local_function.hpp"

#include <set>
#include <sstream>

#include "rwre/errors.hpp"

namespace rwre {

struct LocalFunction::Node {
  enum class Kind { Constant, Transition, Drift, Indicator, Product } kind;
  double c = 0.0;
  Point y, e;
  int axis = 0;
  double lo = 0.0, hi = 0.0;
  std::vector<LocalFunction> factors;
};

LocalFunction LocalFunction::constant(double c) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Constant;
  n->c = c;
  return LocalFunction(n);
}

LocalFunction LocalFunction::transition(const Point& y, const Point& e) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Transition;
  n->y = y;
  n->e = e;
  return LocalFunction(n);
}

LocalFunction LocalFunction::drift_component(const Point& y, int axis) {
  if (axis < 0 || axis >= kMaxDim) throw ConfigError("drift component: axis out of range");
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Drift;
  n->y = y;
  n->axis = axis;
  return LocalFunction(n);
}

LocalFunction LocalFunction::indicator(const Point& y, const Point& e, double lo, double hi) {
  if (hi < lo) throw ConfigError("indicator: empty interval");
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Indicator;
  n->y = y;
  n->e = e;
  n->lo = lo;
  n->hi = hi;
  return LocalFunction(n);
}

LocalFunction LocalFunction::product(std::vector<LocalFunction> factors) {
  if (factors.empty()) throw ConfigError("product: no factors");
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Product;
  n->factors = std::move(factors);
  return LocalFunction(n);
}

double LocalFunction::operator()(const Environment& env, const Point& origin) const {
  const Node& n = *node_;
  switch (n.kind) {
    case Node::Kind::Constant:
      return n.c;
    case Node::Kind::Transition:
      return env.at(origin + n.y).prob(n.e);
    case Node::Kind::Drift:
      return env.drift_at(origin + n.y)[static_cast<std::size_t>(n.axis)];
    case Node::Kind::Indicator: {
      const double p = env.at(origin + n.y).prob(n.e);
      return p >= n.lo && p <= n.hi ? 1.0 : 0.0;
    }
    case Node::Kind::Product: {
      double out = 1.0;
      for (const auto& f : n.factors) out *= f(env, origin);
      return out;
    }
  }
  return 0.0;
}

std::vector<Point> LocalFunction::window() const {
  const Node& n = *node_;
  switch (n.kind) {
    case Node::Kind::Constant:
      return {};
    case Node::Kind::Product: {
      std::set<Point> all;
      for (const auto& f : n.factors)
        for (const auto& p : f.window()) all.insert(p);
      return {all.begin(), all.end()};
    }
    default:
      return {n.y};
  }
}

std::string LocalFunction::name(int dim) const {
  const Node& n = *node_;
  std::ostringstream os;
  switch (n.kind) {
    case Node::Kind::Constant:
      os << "constant(" << n.c << ")";
      break;
    case Node::Kind::Transition:
      os << "transition(" << format_point(n.y, dim) << ";" << format_point(n.e, dim) << ")";
      break;
    case Node::Kind::Drift:
      os << "drift(" << format_point(n.y, dim) << ";" << n.axis << ")";
      break;
    case Node::Kind::Indicator:
      os << "indicator(" << format_point(n.y, dim) << ";" << format_point(n.e, dim) << ";" << n.lo
         << ";" << n.hi << ")";
      break;
    case Node::Kind::Product:
      os << "product(";
      for (std::size_t i = 0; i < n.factors.size(); ++i)
        os << (i ? "," : "") << n.factors[i].name(dim);
      os << ")";
      break;
  }
  return os.str();
}

}  // namespace rwre
