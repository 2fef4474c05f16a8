#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace noneq::quad {

// 21-point Gauss-Kronrod rule on [-1, 1]. Nodes are listed from the outside in; the
// 10-point Gauss rule uses the odd-indexed Kronrod nodes (1, 3, ..., 9).
inline constexpr double kronrod_nodes[11] = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
inline constexpr double kronrod_weights[11] = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208745027204, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr double gauss_weights[5] = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Tolerance {
  double rel = 1e-8;
  double abs = 1e-11;
  int max_subdivisions = 2000;
};

struct Result {
  Eigen::VectorXd value;
  Eigen::VectorXd error;      // summed per-component error estimate
  Eigen::VectorXd tolerance;  // per-component target the error was compared against
  int panels = 0;
  int evaluations = 0;
  bool converged = false;
  Eigen::Index worst = 0;  // component with the largest error/tolerance ratio
};

struct Panel {
  double a, b;
  Eigen::VectorXd value;
  Eigen::VectorXd error;
  Eigen::VectorXd magnitude;  // integral of |f|, for the roundoff floor
};

/// One Gauss-Kronrod panel of a vector integrand f(x) -> Eigen::VectorXd.
template <class F>
Panel gk21(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  Eigen::VectorXd fc = f(c);
  Eigen::VectorXd kron = kronrod_weights[10] * fc;
  Eigen::VectorXd gauss = Eigen::VectorXd::Zero(fc.size());
  Eigen::VectorXd mag = kronrod_weights[10] * fc.cwiseAbs();
  for (int j = 0; j < 10; ++j) {
    const double dx = h * kronrod_nodes[j];
    Eigen::VectorXd f1 = f(c - dx);
    Eigen::VectorXd f2 = f(c + dx);
    kron += kronrod_weights[j] * (f1 + f2);
    mag += kronrod_weights[j] * (f1.cwiseAbs() + f2.cwiseAbs());
    if (j % 2 == 1) gauss += gauss_weights[j / 2] * (f1 + f2);
  }
  Panel p{a, b, h * kron, (h * (kron - gauss)).cwiseAbs(), std::abs(h) * mag};
  return p;
}

/// Globally adaptive vector quadrature over the consecutive intervals of `breaks`.
///
/// Every component must satisfy error <= max(abs, rel * |value|, 50 eps * int |f|). At each
/// step the component furthest from its target is located and the panel contributing most
/// to its error is bisected. Totals are summed in panel order, so the result is
/// independent of the refinement history's floating-point noise.
template <class F>
Result integrate(F&& f, const std::vector<double>& breaks, const Tolerance& tol) {
  int calls = 0;
  auto g = [&](double x) -> Eigen::VectorXd {
    ++calls;
    return f(x);
  };
  std::vector<Panel> panels;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (breaks[i + 1] > breaks[i]) panels.push_back(gk21(g, breaks[i], breaks[i + 1]));
  }
  Result res;
  if (panels.empty()) return res;
  const Eigen::Index n = panels.front().value.size();
  const double eps = std::numeric_limits<double>::epsilon();

  Eigen::VectorXd value, error, mag, target;
  auto recompute = [&] {
    value.setZero(n);
    error.setZero(n);
    mag.setZero(n);
    for (const auto& p : panels) {
      value += p.value;
      error += p.error;
      mag += p.magnitude;
    }
  };
  auto check = [&](Eigen::Index& worst) {
    target = (tol.rel * value.cwiseAbs()).cwiseMax(50 * eps * mag).cwiseMax(tol.abs);
    return error.cwiseQuotient(target).maxCoeff(&worst);
  };

  recompute();
  for (;;) {
    Eigen::Index worst;
    if (check(worst) <= 1.0) {
      // running sums drift; confirm on exact ordered totals before accepting
      recompute();
      if (check(worst) <= 1.0) {
        res.converged = true;
        res.worst = worst;
        break;
      }
    }
    res.worst = worst;
    if (static_cast<int>(panels.size()) >= tol.max_subdivisions) break;

    std::size_t pick = 0;
    for (std::size_t i = 1; i < panels.size(); ++i) {
      if (panels[i].error(worst) > panels[pick].error(worst)) pick = i;
    }
    const double a = panels[pick].a, b = panels[pick].b, m = 0.5 * (a + b);
    if (!(m > a && m < b)) break;  // panel too narrow to split further
    Panel left = gk21(g, a, m);
    Panel right = gk21(g, m, b);
    value += left.value + right.value - panels[pick].value;
    error += left.error + right.error - panels[pick].error;
    mag += left.magnitude + right.magnitude - panels[pick].magnitude;
    panels[pick] = std::move(left);
    panels.insert(panels.begin() + pick + 1, std::move(right));
  }
  recompute();
  res.value = value;
  res.error = error;
  res.tolerance = (tol.rel * value.cwiseAbs()).cwiseMax(50 * eps * mag).cwiseMax(tol.abs);
  res.panels = static_cast<int>(panels.size());
  res.evaluations = calls;
  return res;
}

}  // namespace noneq::quad
