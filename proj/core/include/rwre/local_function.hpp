#pragma once

#include <memory>
#include <string>
#include <vector>

#include "rwre/environment.hpp"
#include "rwre/lattice.hpp"

namespace rwre {

/// Bounded function of the environment seen from a site, depending only on
/// finitely many sites (its window). Built from a small catalog.
class LocalFunction {
 public:
  static LocalFunction constant(double c);
  /// pi_{y, y+e} of the recentred environment.
  static LocalFunction transition(const Point& y, const Point& e);
  /// Coordinate `axis` of the drift at y.
  static LocalFunction drift_component(const Point& y, int axis);
  /// 1(lo <= pi_{y, y+e} <= hi).
  static LocalFunction indicator(const Point& y, const Point& e, double lo, double hi);
  static LocalFunction product(std::vector<LocalFunction> factors);

  /// f(T^origin omega).
  double operator()(const Environment& env, const Point& origin) const;
  double operator()(const Environment& env) const { return (*this)(env, Point{}); }

  /// Sites the value depends on, relative to the origin.
  std::vector<Point> window() const;
  std::string name(int dim) const;

  struct Node;

 private:
  explicit LocalFunction(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

}  // namespace rwre
