#include "cgeom/generator.hpp"

#include "cgeom/core.hpp"

#include <cmath>
#include <sstream>
#include <utility>

namespace cgeom {

namespace {

bool is_minus_one(double alpha) { return alpha == -1.0; }
bool is_plus_one(double alpha) { return alpha == 1.0; }

double alpha_value(double alpha, double x) {
  if (is_minus_one(alpha)) {
    return -std::log(x);
  }
  if (is_plus_one(alpha)) {
    if (x == 0.0) {
      return 1.0;
    }
    return x * std::log(x) - x + 1.0;
  }
  const double c = 4.0 / (1.0 - alpha * alpha);
  const double k = 0.5 * (alpha + 1.0);
  if (x > 0.0 && std::isfinite(x)) {
    return -c * std::expm1(k * std::log(x));
  }
  return c * (1.0 - std::pow(x, k));
}

double alpha_derivative(double alpha, double x) {
  if (is_minus_one(alpha)) {
    return -1.0 / x;
  }
  if (is_plus_one(alpha)) {
    return std::log(x);
  }
  return -(2.0 / (1.0 - alpha)) * std::pow(x, 0.5 * (alpha - 1.0));
}

}  // namespace

Generator Generator::alpha_divergence(double alpha) {
  if (!std::isfinite(alpha)) {
    throw InvalidArgument("alpha must be finite");
  }
  Generator g;
  g.eval_ = [alpha](double x) { return alpha_value(alpha, x); };
  g.deriv_ = [alpha](double x) { return alpha_derivative(alpha, x); };
  g.fpp1_ = 1.0;
  g.kind_ = Kind::alpha;
  g.alpha_ = alpha;
  g.curvature_ = Curvature::convex;
  std::ostringstream os;
  os << "f_alpha(" << alpha << ")";
  g.name_ = os.str();
  return g;
}

Generator Generator::alpha_information(double alpha) {
  Generator g = alpha_divergence(alpha).negated();
  std::ostringstream os;
  os << "I_alpha(" << alpha << ")";
  g.name_ = os.str();
  return g;
}

Generator Generator::custom(std::string name, std::function<double(double)> eval,
                            std::function<double(double)> derivative,
                            double second_derivative_at_one, Curvature curvature) {
  if (!eval || !derivative) {
    throw InvalidArgument("custom generator needs both eval and derivative");
  }
  const double at_one = eval(1.0);
  if (!(std::abs(at_one) <= 1e-12)) {
    std::ostringstream os;
    os << "generator '" << name << "' must satisfy f(1) = 0, got " << at_one;
    throw InvalidArgument(os.str());
  }
  if (!spot_check_curvature(eval, curvature)) {
    throw InvalidArgument("generator '" + name + "' fails the sampled " +
                          (curvature == Curvature::convex ? "convexity" : "concavity") + " check");
  }
  Generator g;
  g.eval_ = std::move(eval);
  g.deriv_ = std::move(derivative);
  g.fpp1_ = second_derivative_at_one;
  g.kind_ = Kind::custom;
  g.curvature_ = curvature;
  g.name_ = std::move(name);
  return g;
}

double Generator::metric_scale() const noexcept { return std::abs(fpp1_); }

Generator Generator::scaled(double eta) const {
  if (!(eta > 0.0)) {
    throw InvalidArgument("generator scale must be positive");
  }
  Generator g = *this;
  g.eval_ = [f = eval_, eta](double x) { return eta * f(x); };
  g.deriv_ = [d = deriv_, eta](double x) { return eta * d(x); };
  g.fpp1_ = eta * fpp1_;
  std::ostringstream os;
  os << eta << "*" << name_;
  g.name_ = os.str();
  return g;
}

Generator Generator::negated() const {
  Generator g = *this;
  g.eval_ = [f = eval_](double x) { return -f(x); };
  g.deriv_ = [d = deriv_](double x) { return -d(x); };
  g.fpp1_ = -fpp1_;
  g.curvature_ = curvature_ == Curvature::convex ? Curvature::concave : Curvature::convex;
  g.name_ = "-" + name_;
  return g;
}

bool spot_check_curvature(const std::function<double(double)>& f, Curvature curvature) {
  constexpr int kPoints = 41;
  const double sign = curvature == Curvature::convex ? 1.0 : -1.0;
  int checked = 0;
  for (int i = 0; i < kPoints; ++i) {
    const double x = std::pow(10.0, -2.0 + 4.0 * i / (kPoints - 1));
    const double h = 0.05 * x;
    const double second = f(x + h) + f(x - h) - 2.0 * f(x);
    if (!std::isfinite(second)) {
      continue;
    }
    ++checked;
    if (!(sign * second > 0.0)) {
      return false;
    }
  }
  return checked > 0;
}

}  // namespace cgeom
