#include "polystokes/problem.hpp"

#include "polystokes/error.hpp"

#include <cmath>
#include <numbers>

namespace polystokes {

namespace {

using std::numbers::pi;

Point vec2(double a, double b) {
  Point p(2);
  p << a, b;
  return p;
}

Point vec3(double a, double b, double c) {
  Point p(3);
  p << a, b, c;
  return p;
}

ProblemData example1() {
  ProblemData pd;
  pd.name = "ex1";
  pd.dim = 2;
  pd.velocity = [](const Point& x) { return vec2(std::sin(pi * x(1)), std::cos(pi * x(0))); };
  pd.velocity_gradient = [](const Point& x) {
    Tensor g(2, 2);
    g << 0.0, pi * std::cos(pi * x(1)), -pi * std::sin(pi * x(0)), 0.0;
    return g;
  };
  pd.pressure = [](const Point& x) { return std::sin(2.0 * pi * x(1)); };
  pd.forcing = [](const Point& x) {
    return vec2(pi * pi * std::sin(pi * x(1)), pi * pi * std::cos(pi * x(0)) + 2.0 * pi * std::cos(2.0 * pi * x(1)));
  };
  pd.boundary = pd.velocity;
  return pd;
}

// With X = x - x^2, Y = y - y^2 and X' = 1 - 2x, Y' = 1 - 2y:
// u = (-512 X^2 Y Y', 512 X X' Y^2).
ProblemData example2() {
  ProblemData pd;
  pd.name = "ex2";
  pd.dim = 2;
  pd.velocity = [](const Point& x) {
    const double X = x(0) - x(0) * x(0);
    const double Y = x(1) - x(1) * x(1);
    const double Xp = 1.0 - 2.0 * x(0);
    const double Yp = 1.0 - 2.0 * x(1);
    return vec2(-512.0 * X * X * Y * Yp, 512.0 * X * Xp * Y * Y);
  };
  pd.velocity_gradient = [](const Point& x) {
    const double X = x(0) - x(0) * x(0);
    const double Y = x(1) - x(1) * x(1);
    const double Xp = 1.0 - 2.0 * x(0);
    const double Yp = 1.0 - 2.0 * x(1);
    Tensor g(2, 2);
    g << -1024.0 * X * Xp * Y * Yp, -512.0 * X * X * (Yp * Yp - 2.0 * Y),
        512.0 * (Xp * Xp - 2.0 * X) * Y * Y, 1024.0 * X * Xp * Y * Yp;
    return g;
  };
  pd.pressure = [](const Point& x) { return x(0) + x(1) - 1.0; };
  pd.forcing = [](const Point& x) {
    const double X = x(0) - x(0) * x(0);
    const double Y = x(1) - x(1) * x(1);
    const double Xp = 1.0 - 2.0 * x(0);
    const double Yp = 1.0 - 2.0 * x(1);
    const double f1 = 512.0 * ((2.0 * Xp * Xp - 4.0 * X) * Y * Yp - 6.0 * X * X * Yp) + 1.0;
    const double f2 = -512.0 * (-6.0 * Xp * Y * Y + X * Xp * (2.0 * Yp * Yp - 4.0 * Y)) + 1.0;
    return vec2(f1, f2);
  };
  pd.boundary = [](const Point&) { return vec2(0.0, 0.0); };
  pd.homogeneous = true;
  pd.velocity_degree = 7;
  pd.pressure_degree = 1;
  pd.forcing_degree = 5;
  return pd;
}

ProblemData example3() {
  ProblemData pd;
  pd.name = "ex3";
  pd.dim = 3;
  pd.velocity = [](const Point& x) { return vec3(std::pow(x(1), 4), x(2) * x(2), x(0) * x(0)); };
  pd.velocity_gradient = [](const Point& x) {
    Tensor g = Tensor::Zero(3, 3);
    g(0, 1) = 4.0 * x(1) * x(1) * x(1);
    g(1, 2) = 2.0 * x(2);
    g(2, 0) = 2.0 * x(0);
    return g;
  };
  pd.pressure = [](const Point& x) { return x(0) - 0.5; };
  pd.forcing = [](const Point& x) { return vec3(1.0 - 12.0 * x(1) * x(1), -2.0, -2.0); };
  pd.boundary = pd.velocity;
  pd.velocity_degree = 4;
  pd.pressure_degree = 1;
  pd.forcing_degree = 2;
  return pd;
}

ProblemData polynomial2() {
  ProblemData pd;
  pd.name = "poly2";
  pd.dim = 2;
  pd.velocity = [](const Point& x) { return vec2(x(1) * x(1), x(0) * x(0)); };
  pd.velocity_gradient = [](const Point& x) {
    Tensor g(2, 2);
    g << 0.0, 2.0 * x(1), 2.0 * x(0), 0.0;
    return g;
  };
  pd.pressure = [](const Point& x) { return x(0) + x(1) - 1.0; };
  pd.forcing = [](const Point&) { return vec2(-1.0, -1.0); };
  pd.boundary = pd.velocity;
  pd.velocity_degree = 2;
  pd.pressure_degree = 1;
  pd.forcing_degree = 0;
  return pd;
}

ProblemData zero_problem(int dim) {
  ProblemData pd;
  pd.name = dim == 2 ? "zero" : "zero3";
  pd.dim = dim;
  pd.velocity = [dim](const Point&) { return Point(Point::Zero(dim)); };
  pd.velocity_gradient = [dim](const Point&) { return Tensor(Tensor::Zero(dim, dim)); };
  pd.pressure = [](const Point&) { return 0.0; };
  pd.forcing = pd.velocity;
  pd.boundary = pd.velocity;
  pd.homogeneous = true;
  pd.velocity_degree = 0;
  pd.pressure_degree = 0;
  pd.forcing_degree = 0;
  return pd;
}

}  // namespace

std::vector<std::string> builtin_problem_names() { return {"ex1", "ex2", "ex3", "poly2", "zero", "zero3"}; }

ProblemData builtin_problem(std::string_view name) {
  if (name == "ex1") return example1();
  if (name == "ex2") return example2();
  if (name == "ex3") return example3();
  if (name == "poly2") return polynomial2();
  if (name == "zero") return zero_problem(2);
  if (name == "zero3") return zero_problem(3);
  throw ConfigError("unknown problem '" + std::string(name) + "' (expected ex1, ex2, ex3, poly2, zero or zero3)");
}

}  // namespace polystokes
