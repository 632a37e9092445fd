#include "frameflow/manifold.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "frameflow/errors.hpp"

namespace frameflow {

double Christoffel::max_abs_difference(const Christoffel& other) const {
  double worst = 0.0;
  for (int k = 0; k < n_; ++k)
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) worst = std::max(worst, std::abs((*this)(k, i, j) - other(k, i, j)));
  return worst;
}

Chart Chart::euclidean(int n) {
  if (n < 2 || n > kMaxDim) throw ConfigError("euclidean chart dimension must be in [2, " + std::to_string(kMaxDim) + "]");
  Chart c;
  c.kind_ = Kind::euclidean;
  c.name_ = "euclidean:" + std::to_string(n);
  c.n_ = n;
  c.origin_ = Vec::Zero(n);
  return c;
}

Chart Chart::hyperbolic2() {
  Chart c;
  c.kind_ = Kind::hyperbolic2;
  c.name_ = "hyperbolic2";
  c.n_ = 2;
  c.origin_ = Vec::Zero(2);
  c.origin_(1) = 1.0;
  return c;
}

Chart Chart::custom(std::string name, int n, MetricField metric, DomainPredicate in_domain, Vec origin,
                    ChristoffelField christoffel, DistanceFunction distance) {
  if (n < 2 || n > kMaxDim) throw ConfigError("custom chart dimension out of range");
  if (!metric) throw ConfigError("custom chart needs a metric field");
  if (origin.size() != n) throw ConfigError("custom chart origin has wrong dimension");
  Chart c;
  c.kind_ = Kind::custom;
  c.name_ = std::move(name);
  c.n_ = n;
  c.origin_ = std::move(origin);
  c.metric_ = std::move(metric);
  c.in_domain_ = std::move(in_domain);
  c.distance_ = std::move(distance);
  if (christoffel) {
    c.christoffel_ = std::move(christoffel);
  } else {
    c.christoffel_ = [m = c.metric_](const Vec& x) { return numeric_christoffel(m, x); };
  }
  if (!c.in_domain(c.origin_)) throw ConfigError("custom chart origin lies outside its domain");
  return c;
}

bool Chart::in_domain(const Vec& x) const {
  if (x.size() != n_ || !x.allFinite()) return false;
  switch (kind_) {
    case Kind::euclidean:
      return true;
    case Kind::hyperbolic2:
      return x(1) > 0.0;
    case Kind::custom:
      return !in_domain_ || in_domain_(x);
  }
  return false;
}

void Chart::require_domain(const Vec& x) const {
  if (!in_domain(x)) throw DomainError(x, "point outside the domain of chart " + name_);
}

Mat Chart::metric(const Vec& x) const {
  require_domain(x);
  switch (kind_) {
    case Kind::euclidean:
      return Mat::Identity(n_, n_);
    case Kind::hyperbolic2:
      return Mat::Identity(2, 2) / (x(1) * x(1));
    case Kind::custom:
      return metric_(x);
  }
  return {};
}

Christoffel Chart::christoffel(const Vec& x) const {
  require_domain(x);
  Christoffel gamma(n_);
  switch (kind_) {
    case Kind::euclidean:
      break;
    case Kind::hyperbolic2: {
      const double inv = 1.0 / x(1);
      gamma(0, 0, 1) = -inv;
      gamma(0, 1, 0) = -inv;
      gamma(1, 1, 1) = -inv;
      gamma(1, 0, 0) = inv;
      break;
    }
    case Kind::custom:
      gamma = christoffel_(x);
      break;
  }
  return gamma;
}

Mat Chart::connection(const Vec& x, const Vec& v) const {
  switch (kind_) {
    case Kind::euclidean:
      return Mat::Zero(n_, n_);
    case Kind::hyperbolic2: {
      require_domain(x);
      const double inv = 1.0 / x(1);
      Mat m(2, 2);
      m << -v(1) * inv, -v(0) * inv, v(0) * inv, -v(1) * inv;
      return m;
    }
    case Kind::custom: {
      const Christoffel gamma = christoffel(x);
      Mat m = Mat::Zero(n_, n_);
      for (int k = 0; k < n_; ++k)
        for (int j = 0; j < n_; ++j)
          for (int i = 0; i < n_; ++i) m(k, j) += v(i) * gamma(k, i, j);
      return m;
    }
  }
  return {};
}

double Chart::distance(const Vec& p, const Vec& q) const {
  switch (kind_) {
    case Kind::euclidean:
      return (p - q).norm();
    case Kind::hyperbolic2:
      return hyperbolic_distance(p, q);
    case Kind::custom:
      if (!distance_) throw ConfigError("chart " + name_ + " has no model distance");
      return distance_(p, q);
  }
  return 0.0;
}

void ChartRegistry::add(Chart chart) {
  if (chart.kind() != Chart::Kind::custom) throw ConfigError("only custom charts can be registered");
  std::string key = chart.name();
  custom_.insert_or_assign(std::move(key), std::move(chart));
}

const Chart* ChartRegistry::find(std::string_view name) const {
  const auto it = custom_.find(name);
  return it == custom_.end() ? nullptr : &it->second;
}

std::shared_ptr<const Chart> resolve_chart(std::string_view name, const ChartRegistry* registry) {
  if (name == "hyperbolic2") return std::make_shared<const Chart>(Chart::hyperbolic2());
  constexpr std::string_view kEuclid = "euclidean:";
  if (name.starts_with(kEuclid)) {
    const std::string digits(name.substr(kEuclid.size()));
    std::size_t used = 0;
    int n = 0;
    try {
      n = std::stoi(digits, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (digits.empty() || used != digits.size()) throw ConfigError("bad euclidean dimension in '" + std::string(name) + "'");
    return std::make_shared<const Chart>(Chart::euclidean(n));
  }
  constexpr std::string_view kCustom = "custom:";
  if (name.starts_with(kCustom) || name == "custom") {
    const std::string_view id = name == "custom" ? std::string_view{} : name.substr(kCustom.size());
    if (registry != nullptr) {
      if (const Chart* c = registry->find(id)) return std::make_shared<const Chart>(*c);
    }
    throw ConfigError("custom chart '" + std::string(id) + "' is not registered");
  }
  throw ConfigError("unknown manifold '" + std::string(name) + "' (expected euclidean:<n>, hyperbolic2 or custom:<name>)");
}

Christoffel numeric_christoffel(const MetricField& metric, const Vec& x, double h_fd) {
  const int n = static_cast<int>(x.size());
  const double h = h_fd * std::max(1.0, x.norm());
  std::array<Mat, kMaxDim> dg;
  for (int l = 0; l < n; ++l) {
    Vec xp = x, xm = x;
    xp(l) += h;
    xm(l) -= h;
    dg[static_cast<std::size_t>(l)] = (metric(xp) - metric(xm)) / (2.0 * h);
  }
  const Mat g = metric(x);
  Eigen::LDLT<Mat> ldlt(g);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || ldlt.vectorD().minCoeff() <= 0.0) {
    throw DomainError(x, "metric is singular or not positive definite");
  }
  const Mat ginv = ldlt.solve(Mat::Identity(n, n));
  Christoffel gamma(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        double s = 0.0;
        for (int l = 0; l < n; ++l) {
          const auto& di = dg[static_cast<std::size_t>(i)];
          const auto& dj = dg[static_cast<std::size_t>(j)];
          const auto& dl = dg[static_cast<std::size_t>(l)];
          s += ginv(k, l) * (di(j, l) + dj(i, l) - dl(i, j));
        }
        gamma(k, i, j) = 0.5 * s;
        gamma(k, j, i) = 0.5 * s;
      }
    }
  }
  return gamma;
}

double frame_defect(const Chart& chart, const FramePoint& fp) {
  const Mat g = chart.metric(fp.x);
  return max_abs(fp.u.transpose() * g * fp.u - Mat::Identity(fp.u.cols(), fp.u.cols()));
}

double speed_defect(const Chart& chart, const Vec& x, const Vec& v) {
  return std::abs(std::sqrt(v.dot(chart.metric(x) * v)) - 1.0);
}

HorizontalVelocity horizontal_velocity(const Chart& chart, const FramePoint& fp, const Vec& e) {
  HorizontalVelocity out;
  out.v = fp.u * e;
  out.udot = -chart.connection(fp.x, out.v) * fp.u;
  return out;
}

Mat gram_schmidt_metric(const Chart& chart, const Vec& x, const Mat& u) {
  const Mat g = chart.metric(x);
  const int cols = static_cast<int>(u.cols());
  // gu holds G * out.col(m) for the columns already finished.
  Mat gu(u.rows(), cols);
  double scale = 0.0;
  for (int l = 0; l < cols; ++l) scale = std::max(scale, u.col(l).dot(g.lazyProduct(u.col(l))));
  Mat out = u;
  for (int l = 0; l < cols; ++l) {
    Vec col = out.col(l);
    for (int m = 0; m < l; ++m) col -= gu.col(m).dot(col) * out.col(m);
    const Vec gcol = g.lazyProduct(col);
    const double norm2 = col.dot(gcol);
    if (!(norm2 > 1e-24 * scale)) throw std::invalid_argument("frame is rank-deficient");
    const double inv = 1.0 / std::sqrt(norm2);
    out.col(l) = inv * col;
    gu.col(l) = inv * gcol;
  }
  return out;
}

double hyperbolic_distance(const Vec& p, const Vec& q) {
  if (!(p(1) > 0.0) || !(q(1) > 0.0)) throw DomainError(p(1) > 0.0 ? q : p, "hyperbolic distance needs x2 > 0");
  return 2.0 * std::asinh((p - q).norm() / (2.0 * std::sqrt(p(1) * q(1))));
}

}  // namespace frameflow
