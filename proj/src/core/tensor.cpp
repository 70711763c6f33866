#include "wavekit/tensor.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace wavekit {

std::string Dims::str() const {
  std::ostringstream os;
  os << height << "x" << width << "x" << channels;
  return os.str();
}

namespace {

void require_positive(const Dims& d) {
  if (d.height == 0 || d.width == 0 || d.channels == 0) {
    throw FieldError("field dimensions must be positive, got " + d.str());
  }
}

void require_same(const Dims& a, const Dims& b, const char* op) {
  if (!(a == b)) {
    throw FieldError(std::string(op) + ": dimension mismatch " + a.str() + " vs " + b.str());
  }
}

}  // namespace

FeatureField::FeatureField(Dims dims) : dims_(dims) {
  require_positive(dims_);
  data_.assign(dims_.size(), 0.0);
}

FeatureField::FeatureField(Dims dims, std::vector<double> data)
    : dims_(dims), data_(std::move(data)) {
  require_positive(dims_);
  if (data_.size() != dims_.size()) {
    throw FieldError("field " + dims_.str() + " expects " + std::to_string(dims_.size()) +
                     " values, got " + std::to_string(data_.size()));
  }
  check_finite();
}

void FeatureField::check_finite(const char* what) const {
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (!std::isfinite(data_[i])) {
      const std::size_t plane = dims_.plane();
      std::ostringstream os;
      os << what << ": non-finite value at index " << i << " (c=" << i / plane
         << ", y=" << (i % plane) / dims_.width << ", x=" << i % dims_.width << ")";
      throw FieldError(os.str());
    }
  }
}

FeatureField& FeatureField::operator+=(const FeatureField& other) {
  require_same(dims_, other.dims_, "operator+=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

FeatureField& FeatureField::operator-=(const FeatureField& other) {
  require_same(dims_, other.dims_, "operator-=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

FeatureField& FeatureField::operator*=(double scale) {
  for (double& v : data_) v *= scale;
  return *this;
}

FeatureField operator+(FeatureField a, const FeatureField& b) { return a += b; }
FeatureField operator-(FeatureField a, const FeatureField& b) { return a -= b; }
FeatureField operator*(double s, FeatureField a) { return a *= s; }

SpectralField::SpectralField(Dims dims) : dims_(dims) {
  require_positive(dims_);
  data_.assign(dims_.size(), value_type{0.0, 0.0});
}

FeatureField random_field(std::uint64_t seed, std::size_t height, std::size_t width,
                          std::size_t channels) {
  FeatureField f(height, width, channels);
  std::mt19937_64 gen(seed);
  for (double& v : f.data()) {
    const double unit = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    v = 2.0 * unit - 1.0;
  }
  return f;
}

double max_abs_diff(const FeatureField& a, const FeatureField& b) {
  require_same(a.dims(), b.dims(), "max_abs_diff");
  double m = 0.0;
  auto da = a.data();
  auto db = b.data();
  for (std::size_t i = 0; i < da.size(); ++i) m = std::max(m, std::abs(da[i] - db[i]));
  return m;
}

double l2_norm(const FeatureField& a) {
  double s = 0.0;
  for (double v : a.data()) s += v * v;
  return std::sqrt(s);
}

double dot(const FeatureField& a, const FeatureField& b) {
  require_same(a.dims(), b.dims(), "dot");
  double s = 0.0;
  auto da = a.data();
  auto db = b.data();
  for (std::size_t i = 0; i < da.size(); ++i) s += da[i] * db[i];
  return s;
}

}  // namespace wavekit
