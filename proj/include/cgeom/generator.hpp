#pragma once

#include <functional>
#include <optional>
#include <string>

namespace cgeom {

enum class Curvature { convex, concave };

/// A divergence or information generator f with f(1) = 0.
///
/// Convex generators define f-divergences D_f(p||q) = sum_s p_s f(q_s / p_s).
/// Concave generators define f-information I_f(s; p) = f(1 / p_s); the concave
/// generator -f induces the divergence D_{-f}.
///
/// The built-in alpha family is
///   f_alpha(x) = 4 / (1 - alpha^2) * (1 - x^((alpha + 1) / 2))
/// with exact limit branches -log x at alpha = -1 and x log x - x + 1 at
/// alpha = +1 (the latter differs from the limit only by a multiple of x - 1,
/// which does not change divergences between distributions).
class Generator {
 public:
  enum class Kind { alpha, custom };

  /// Convex generator f_alpha of the alpha-divergence.
  static Generator alpha_divergence(double alpha);
  /// Concave generator -f_alpha of alpha-information.
  static Generator alpha_information(double alpha);
  /// Arbitrary generator. Throws InvalidArgument if |f(1)| > 1e-12 or if a
  /// sampled second-difference check contradicts the declared curvature.
  static Generator custom(std::string name, std::function<double(double)> eval,
                          std::function<double(double)> derivative, double second_derivative_at_one,
                          Curvature curvature);

  double operator()(double x) const { return eval_(x); }
  double derivative(double x) const { return deriv_(x); }
  double second_derivative_at_one() const noexcept { return fpp1_; }
  /// Scale eta = |f''(1)| of the Fisher-Rao tensor induced by the generator's divergence.
  double metric_scale() const noexcept;

  Kind kind() const noexcept { return kind_; }
  std::optional<double> alpha() const noexcept { return alpha_; }
  Curvature curvature() const noexcept { return curvature_; }
  const std::string& name() const noexcept { return name_; }

  /// eta * f; keeps the kind tag.
  Generator scaled(double eta) const;
  /// -f with the opposite curvature.
  Generator negated() const;

 private:
  Generator() = default;

  std::function<double(double)> eval_;
  std::function<double(double)> deriv_;
  double fpp1_ = 0.0;
  Kind kind_ = Kind::custom;
  std::optional<double> alpha_;
  Curvature curvature_ = Curvature::convex;
  std::string name_;
};

/// Sampled strict-curvature check: second differences on a log-spaced grid over
/// [1e-3, 1e3] must all have the sign implied by `curvature`.
bool spot_check_curvature(const std::function<double(double)>& f, Curvature curvature);

}  // namespace cgeom
