#include "cgeom/geometry.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace cgeom {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kClampFloor = 1e-12;

void require_same_size(const Vector& a, const Vector& b, const char* what) {
  if (a.size() != b.size()) {
    std::ostringstream os;
    os << what << ": dimension mismatch (" << a.size() << " vs " << b.size() << ")";
    throw InvalidArgument(os.str());
  }
}

void require_non_negative(const Vector& v, const char* what) {
  if (!v.allFinite() || (v.size() > 0 && v.minCoeff() < 0.0)) {
    throw InvalidArgument(std::string(what) + ": weights must be finite and non-negative");
  }
}

// One summand of the positive-measure alpha-divergence before the 4/(1-alpha^2)
// scale, written as (1-e) a + e b - a^(1-e) b^e with e = (1+alpha)/2. The two
// branches keep the cancellation benign near alpha = -1 and alpha = +1.
double alpha_term(double a, double b, double e) {
  if (e <= 0.5) {
    const double l = std::log(b / a);
    return a * (e * std::expm1(l) - std::expm1(e * l));
  }
  const double d = 1.0 - e;
  const double l = std::log(a / b);
  return b * (d * std::expm1(l) - std::expm1(d * l));
}

Vector clamp_or_check(const Vector& v, bool clamp, double order) {
  if (order <= -1.0) {
    return v;
  }
  if (clamp) {
    return v.cwiseMax(kClampFloor);
  }
  if (v.minCoeff() <= 0.0) {
    throw InvalidArgument("geodesic endpoint has a zero weight; order > -1 needs strictly positive "
                          "endpoints (set clamp to lift them)");
  }
  return v;
}

struct RawCurve {
  Vector value;
  Vector velocity;
};

RawCurve raw_curve(const Vector& p, const Vector& q, double order, double t) {
  RawCurve c;
  if (order == -1.0) {
    c.value = (1.0 - t) * p + t * q;
    c.velocity = q - p;
  } else if (order == 1.0) {
    const Vector log_ratio = (q.array().log() - p.array().log()).matrix();
    c.value = ((1.0 - t) * p.array().log() + t * q.array().log()).exp().matrix();
    c.velocity = c.value.cwiseProduct(log_ratio);
  } else {
    const double k = 0.5 * (1.0 - order);
    const Eigen::ArrayXd pk = p.array().pow(k);
    const Eigen::ArrayXd qk = q.array().pow(k);
    const Eigen::ArrayXd affine = (1.0 - t) * pk + t * qk;
    c.value = affine.pow(1.0 / k).matrix();
    c.velocity = ((1.0 / k) * affine.pow(1.0 / k - 1.0) * (qk - pk)).matrix();
  }
  return c;
}

}  // namespace

double kl_divergence(const Vector& p, const Vector& q) {
  require_same_size(p, q, "kl_divergence");
  require_non_negative(p, "kl_divergence");
  require_non_negative(q, "kl_divergence");
  double total = 0.0;
  for (Index i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) {
      total += q[i];
    } else if (q[i] == 0.0) {
      return kInf;
    } else {
      total += p[i] * std::log(p[i] / q[i]) - p[i] + q[i];
    }
  }
  return total;
}

double alpha_divergence(const Vector& p, const Vector& q, double alpha) {
  require_same_size(p, q, "alpha_divergence");
  require_non_negative(p, "alpha_divergence");
  require_non_negative(q, "alpha_divergence");
  if (!std::isfinite(alpha)) {
    throw InvalidArgument("alpha_divergence: alpha must be finite");
  }
  if (alpha == -1.0) {
    return kl_divergence(p, q);
  }
  if (alpha == 1.0) {
    return kl_divergence(q, p);
  }
  const double e = 0.5 * (1.0 + alpha);
  const double scale = 1.0 / (e * (1.0 - e));
  double total = 0.0;
  for (Index i = 0; i < p.size(); ++i) {
    const double a = p[i];
    const double b = q[i];
    if (a == 0.0 && b == 0.0) {
      continue;
    }
    if (a == 0.0) {
      if (alpha >= 1.0) {
        return kInf;
      }
      total += e * b;
    } else if (b == 0.0) {
      if (alpha <= -1.0) {
        return kInf;
      }
      total += (1.0 - e) * a;
    } else {
      total += alpha_term(a, b, e);
    }
  }
  return scale * total;
}

double f_divergence(const Vector& p, const Vector& q, const Generator& f) {
  require_same_size(p, q, "f_divergence");
  require_non_negative(p, "f_divergence");
  require_non_negative(q, "f_divergence");
  double total = 0.0;
  for (Index i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) {
      if (q[i] == 0.0) {
        continue;
      }
      std::ostringstream os;
      os << "f_divergence: p[" << i << "] = 0 where q > 0";
      throw InvalidArgument(os.str());
    }
    const double value = f(q[i] / p[i]);
    if (std::isinf(value) && value > 0.0) {
      return kInf;
    }
    total += p[i] * value;
  }
  return total;
}

double renyi_divergence(const Vector& p, const Vector& q, double lambda) {
  require_same_size(p, q, "renyi_divergence");
  require_non_negative(p, "renyi_divergence");
  require_non_negative(q, "renyi_divergence");
  if (lambda == 1.0) {
    double total = 0.0;
    for (Index i = 0; i < p.size(); ++i) {
      if (p[i] == 0.0) {
        continue;
      }
      if (q[i] == 0.0) {
        return kInf;
      }
      total += p[i] * std::log(p[i] / q[i]);
    }
    return total;
  }
  double sum = 0.0;
  for (Index i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) {
      continue;
    }
    if (q[i] == 0.0) {
      if (lambda > 1.0) {
        return kInf;
      }
      continue;
    }
    sum += std::pow(p[i], lambda) * std::pow(q[i], 1.0 - lambda);
  }
  const double value = std::log(sum) / (lambda - 1.0);
  return std::isnan(value) ? kInf : value;
}

Vector geodesic_eval(const GeodesicSpec& spec, double t) {
  require_same_size(spec.p, spec.q, "geodesic_eval");
  require_non_negative(spec.p, "geodesic_eval");
  require_non_negative(spec.q, "geodesic_eval");
  if (!(t >= 0.0 && t <= 1.0)) {
    throw InvalidArgument("geodesic_eval: t must lie in [0, 1]");
  }
  const Vector p = clamp_or_check(spec.p, spec.clamp, spec.order);
  const Vector q = clamp_or_check(spec.q, spec.clamp, spec.order);
  Vector value;
  if (t == 0.0) {
    value = p;
  } else if (t == 1.0) {
    value = q;
  } else {
    value = raw_curve(p, q, spec.order, t).value;
  }
  if (spec.normalized) {
    value /= value.sum();
  }
  return value;
}

Vector geodesic_velocity(const GeodesicSpec& spec, double t) {
  require_same_size(spec.p, spec.q, "geodesic_velocity");
  require_non_negative(spec.p, "geodesic_velocity");
  require_non_negative(spec.q, "geodesic_velocity");
  const Vector p = clamp_or_check(spec.p, spec.clamp, spec.order);
  const Vector q = clamp_or_check(spec.q, spec.clamp, spec.order);
  const RawCurve c = raw_curve(p, q, spec.order, t);
  if (!spec.normalized) {
    return c.velocity;
  }
  const double mass = c.value.sum();
  const double mass_rate = c.velocity.sum();
  return c.velocity / mass - c.value * (mass_rate / (mass * mass));
}

double fisher_rao_inner(const Vector& q, const Vector& v, const Vector& w) {
  require_same_size(q, v, "fisher_rao_inner");
  require_same_size(q, w, "fisher_rao_inner");
  if (!(q.minCoeff() > 0.0)) {
    throw InvalidArgument("fisher_rao_inner: base point must be strictly positive");
  }
  return (v.array() * w.array() / q.array()).sum();
}

Vector divergence_gradient(const Vector& p, const Vector& q, const Generator& f) {
  require_same_size(p, q, "divergence_gradient");
  if (!(p.minCoeff() > 0.0) || !(q.minCoeff() > 0.0)) {
    throw InvalidArgument("divergence_gradient: p and q must be strictly positive");
  }
  Vector g(q.size());
  for (Index i = 0; i < q.size(); ++i) {
    g[i] = q[i] * f.derivative(q[i] / p[i]);
  }
  return g;
}

Vector numeric_metric_gradient(const std::function<double(const Vector&)>& func, const Vector& q,
                               double step) {
  Vector g(q.size());
  Vector x = q;
  for (Index i = 0; i < q.size(); ++i) {
    const double h = std::min(step, 0.5 * q[i]);
    x[i] = q[i] + h;
    const double up = func(x);
    x[i] = q[i] - h;
    const double down = func(x);
    x[i] = q[i];
    g[i] = q[i] * (up - down) / (2.0 * h);
  }
  return g;
}

double geodetic_alignment(const Vector& p, const Vector& q, const Vector& gradient, double alpha) {
  require_same_size(p, q, "geodetic_alignment");
  require_same_size(q, gradient, "geodetic_alignment");
  if (!(p.minCoeff() > 0.0) || !(q.minCoeff() > 0.0)) {
    throw InvalidArgument("geodetic_alignment: p and q must be interior");
  }
  const GeodesicSpec spec{q, p, alpha, false, false};
  const Vector velocity = geodesic_velocity(spec, 0.0);
  const double mass = q.sum();
  auto tangent = [&](const Vector& v) -> Vector { return v - q * (v.sum() / mass); };
  const Vector a = tangent(gradient);
  const Vector b = tangent(velocity);
  const double na = std::sqrt(fisher_rao_inner(q, a, a));
  const double nb = std::sqrt(fisher_rao_inner(q, b, b));
  const double scale = std::sqrt(fisher_rao_inner(q, velocity, velocity));
  if (!(nb > 1e-14 * std::max(1.0, scale)) || (p - q).cwiseAbs().maxCoeff() == 0.0) {
    throw InvalidArgument("geodetic_alignment: zero geodesic velocity (p == q)");
  }
  if (na == 0.0) {
    return 0.0;
  }
  return fisher_rao_inner(q, a, b) / (na * nb);
}

double geodetic_alignment(const Vector& p, const Vector& q, const Generator& f, double alpha) {
  return geodetic_alignment(p, q, divergence_gradient(p, q, f), alpha);
}

}  // namespace cgeom
