#include "refinery/dist.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "refinery/errors.hpp"

namespace refinery {

namespace {

double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace

const char* dist_kind_name(DistSpec::Kind kind) {
  switch (kind) {
    case DistSpec::Kind::point: return "point";
    case DistSpec::Kind::two_point: return "two-point";
    case DistSpec::Kind::uniform: return "uniform";
    case DistSpec::Kind::gaussian: return "gaussian";
  }
  return "?";
}

DistSpec DistSpec::point(double v) {
  DistSpec d;
  d.kind = Kind::point;
  d.value = v;
  return d;
}

DistSpec DistSpec::two_point(double lo, double hi, double p_hi) {
  DistSpec d;
  d.kind = Kind::two_point;
  d.lo = lo;
  d.hi = hi;
  d.p_hi = p_hi;
  return d;
}

DistSpec DistSpec::two_point_sym(double a, double p_plus) {
  return two_point(-a, a, p_plus);
}

DistSpec DistSpec::uniform(double lo, double hi) {
  DistSpec d;
  d.kind = Kind::uniform;
  d.lo = lo;
  d.hi = hi;
  return d;
}

DistSpec DistSpec::gaussian(double mean, double sd, double lo, double hi) {
  DistSpec d;
  d.kind = Kind::gaussian;
  d.mean_param = mean;
  d.sd = sd;
  d.lo = lo;
  d.hi = hi;
  return d;
}

void DistSpec::validate() const {
  switch (kind) {
    case Kind::point:
      require(std::isfinite(value), Errc::bad_argument, "point value must be finite");
      break;
    case Kind::two_point:
      require(std::isfinite(lo) && std::isfinite(hi), Errc::bad_argument,
              "two-point values must be finite");
      require(lo <= hi, Errc::bad_argument, "two-point lo must not exceed hi");
      require(p_hi >= 0.0 && p_hi <= 1.0, Errc::bad_argument,
              "two-point probability must lie in [0,1]");
      break;
    case Kind::uniform:
      require(std::isfinite(lo) && std::isfinite(hi) && lo < hi, Errc::bad_argument,
              "uniform bounds must be finite with lo < hi");
      break;
    case Kind::gaussian:
      require(std::isfinite(mean_param) && std::isfinite(sd) && sd > 0.0,
              Errc::bad_argument, "gaussian needs finite mean and sd > 0");
      require(lo < hi, Errc::bad_argument, "gaussian truncation needs lo < hi");
      break;
  }
}

double DistSpec::sample(RngStream& stream) const {
  switch (kind) {
    case Kind::point:
      return value;
    case Kind::two_point:
      return stream.bernoulli(p_hi) ? hi : lo;
    case Kind::uniform:
      return stream.uniform(lo, hi);
    case Kind::gaussian: {
      for (int attempt = 0; attempt < 10000; ++attempt) {
        const double z = mean_param + sd * stream.normal();
        if (z >= lo && z <= hi) return z;
      }
      fail(Errc::degenerate_mass, "gaussian truncation window rejected 10000 draws");
    }
  }
  fail(Errc::internal, "unreachable distribution kind");
}

double DistSpec::mean() const {
  switch (kind) {
    case Kind::point:
      return value;
    case Kind::two_point:
      return p_hi * hi + (1.0 - p_hi) * lo;
    case Kind::uniform:
      return 0.5 * (lo + hi);
    case Kind::gaussian: {
      if (!std::isfinite(lo) && !std::isfinite(hi)) return mean_param;
      const double a = (lo - mean_param) / sd;
      const double b = (hi - mean_param) / sd;
      const double pa = std::isfinite(a) ? normal_pdf(a) : 0.0;
      const double pb = std::isfinite(b) ? normal_pdf(b) : 0.0;
      const double ca = std::isfinite(a) ? normal_cdf(a) : 0.0;
      const double cb = std::isfinite(b) ? normal_cdf(b) : 1.0;
      const double z = cb - ca;
      require(z > 0.0, Errc::degenerate_mass, "empty gaussian truncation window");
      return mean_param + sd * (pa - pb) / z;
    }
  }
  fail(Errc::internal, "unreachable distribution kind");
}

bool DistSpec::finite_support() const {
  return kind == Kind::point || kind == Kind::two_point;
}

double DistSpec::support_lo() const {
  return kind == Kind::point ? value : lo;
}

double DistSpec::support_hi() const {
  return kind == Kind::point ? value : hi;
}

bool DistSpec::degenerate() const {
  if (kind == Kind::point) return true;
  if (kind == Kind::two_point) return lo == hi || p_hi == 0.0 || p_hi == 1.0;
  return false;
}

std::string DistSpec::describe() const {
  std::ostringstream out;
  out << dist_kind_name(kind) << "(";
  switch (kind) {
    case Kind::point: out << value; break;
    case Kind::two_point: out << lo << "," << hi << ";p_hi=" << p_hi; break;
    case Kind::uniform: out << lo << "," << hi; break;
    case Kind::gaussian:
      out << mean_param << "," << sd;
      if (std::isfinite(lo) || std::isfinite(hi)) out << ";trunc[" << lo << "," << hi << "]";
      break;
  }
  out << ")";
  return out.str();
}

}  // namespace refinery
