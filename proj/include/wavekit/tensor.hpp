#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wavekit {

/// Shape of an H×W×C field. Storage is channel-outermost, then row-major:
/// index = c·H·W + y·W + x.
struct Dims {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 0;

  std::size_t plane() const noexcept { return height * width; }
  std::size_t size() const noexcept { return height * width * channels; }
  std::string str() const;

  friend bool operator==(const Dims&, const Dims&) = default;
};

/// Raised when a field fails a finiteness or shape check.
class FieldError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Real-valued H×W×C tensor (64-bit).
class FeatureField {
 public:
  FeatureField() = default;
  /// Zero-filled field; every dimension must be positive.
  explicit FeatureField(Dims dims);
  FeatureField(std::size_t height, std::size_t width, std::size_t channels)
      : FeatureField(Dims{height, width, channels}) {}
  /// Takes ownership of `data`; rejects length mismatch and non-finite values.
  FeatureField(Dims dims, std::vector<double> data);

  const Dims& dims() const noexcept { return dims_; }
  std::size_t height() const noexcept { return dims_.height; }
  std::size_t width() const noexcept { return dims_.width; }
  std::size_t channels() const noexcept { return dims_.channels; }
  std::size_t size() const noexcept { return data_.size(); }

  double& at(std::size_t c, std::size_t y, std::size_t x) {
    return data_[(c * dims_.height + y) * dims_.width + x];
  }
  double at(std::size_t c, std::size_t y, std::size_t x) const {
    return data_[(c * dims_.height + y) * dims_.width + x];
  }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }
  std::span<double> channel(std::size_t c) {
    return std::span<double>(data_).subspan(c * dims_.plane(), dims_.plane());
  }
  std::span<const double> channel(std::size_t c) const {
    return std::span<const double>(data_).subspan(c * dims_.plane(), dims_.plane());
  }

  /// Throws FieldError naming the first non-finite index.
  void check_finite(const char* what = "field") const;

  FeatureField& operator+=(const FeatureField& other);
  FeatureField& operator-=(const FeatureField& other);
  FeatureField& operator*=(double scale);

 private:
  Dims dims_{};
  std::vector<double> data_;
};

FeatureField operator+(FeatureField a, const FeatureField& b);
FeatureField operator-(FeatureField a, const FeatureField& b);
FeatureField operator*(double s, FeatureField a);

/// Complex H×W×C tensor of per-channel 2D transform coefficients. Same layout
/// as FeatureField. Forward transforms are unnormalized; inverses carry 1/(H·W).
class SpectralField {
 public:
  using value_type = std::complex<double>;

  SpectralField() = default;
  explicit SpectralField(Dims dims);

  const Dims& dims() const noexcept { return dims_; }
  std::size_t height() const noexcept { return dims_.height; }
  std::size_t width() const noexcept { return dims_.width; }
  std::size_t channels() const noexcept { return dims_.channels; }
  std::size_t size() const noexcept { return data_.size(); }

  value_type& at(std::size_t c, std::size_t y, std::size_t x) {
    return data_[(c * dims_.height + y) * dims_.width + x];
  }
  const value_type& at(std::size_t c, std::size_t y, std::size_t x) const {
    return data_[(c * dims_.height + y) * dims_.width + x];
  }

  std::span<value_type> data() noexcept { return data_; }
  std::span<const value_type> data() const noexcept { return data_; }
  std::span<value_type> channel(std::size_t c) {
    return std::span<value_type>(data_).subspan(c * dims_.plane(), dims_.plane());
  }
  std::span<const value_type> channel(std::size_t c) const {
    return std::span<const value_type>(data_).subspan(c * dims_.plane(), dims_.plane());
  }

 private:
  Dims dims_{};
  std::vector<value_type> data_;
};

/// Deterministic field with entries uniform in [-1, 1). The generator is
/// mt19937_64 with an explicit 53-bit mantissa mapping, so the output is
/// identical on every platform.
FeatureField random_field(std::uint64_t seed, std::size_t height, std::size_t width,
                          std::size_t channels);

double max_abs_diff(const FeatureField& a, const FeatureField& b);
double l2_norm(const FeatureField& a);
double dot(const FeatureField& a, const FeatureField& b);

}  // namespace wavekit
