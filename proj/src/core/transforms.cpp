#include "wavekit/transforms.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <tuple>

namespace wavekit {
namespace {

enum class PlanKind { kForward, kBackward, kSine };

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
};
using PlanHandle = std::unique_ptr<fftw_plan_s, PlanDeleter>;

// FFTW's planner is not reentrant; execution through the new-array API is.
// Plans are created once per (kind, shape) under the lock and reused.
class PlanCache {
 public:
  fftw_plan get(PlanKind kind, const Dims& d) {
    const Key key{kind, d.height, d.width, d.channels};
    std::lock_guard lock(mutex_);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second.get();
    fftw_plan plan = make(kind, d);
    if (plan == nullptr) throw std::runtime_error("fftw planning failed for " + d.str());
    plans_.emplace(key, PlanHandle(plan));
    return plan;
  }

 private:
  using Key = std::tuple<PlanKind, std::size_t, std::size_t, std::size_t>;

  static fftw_plan make(PlanKind kind, const Dims& d) {
    const int n[2] = {static_cast<int>(d.height), static_cast<int>(d.width)};
    const int howmany = static_cast<int>(d.channels);
    const int dist = static_cast<int>(d.plane());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    if (kind == PlanKind::kSine) {
      double* buf = fftw_alloc_real(d.size());
      const fftw_r2r_kind kinds[2] = {FFTW_RODFT00, FFTW_RODFT00};
      fftw_plan p = fftw_plan_many_r2r(2, n, howmany, buf, nullptr, 1, dist, buf, nullptr, 1,
                                       dist, kinds, flags);
      fftw_free(buf);
      return p;
    }
    fftw_complex* buf = fftw_alloc_complex(d.size());
    const int sign = kind == PlanKind::kForward ? FFTW_FORWARD : FFTW_BACKWARD;
    fftw_plan p = fftw_plan_many_dft(2, n, howmany, buf, nullptr, 1, dist, buf, nullptr, 1,
                                     dist, sign, flags);
    fftw_free(buf);
    return p;
  }

  std::mutex mutex_;
  std::map<Key, PlanHandle> plans_;
};

PlanCache& plans() {
  static PlanCache cache;
  return cache;
}

fftw_complex* as_fftw(std::span<std::complex<double>> s) {
  return reinterpret_cast<fftw_complex*>(s.data());
}

void run_complex(PlanKind kind, SpectralField& buf) {
  fftw_plan p = plans().get(kind, buf.dims());
  fftw_execute_dft(p, as_fftw(buf.data()), as_fftw(buf.data()));
}

void require_dirichlet_grid(const Dims& d, const char* op) {
  if (d.height < 2 || d.width < 2) {
    throw FieldError(std::string(op) + ": Dirichlet interior grid must be at least 2x2, got " +
                     d.str());
  }
}

}  // namespace

SpectralField fft2(const FeatureField& field) {
  field.check_finite("fft2 input");
  SpectralField out(field.dims());
  auto src = field.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = {src[i], 0.0};
  run_complex(PlanKind::kForward, out);
  return out;
}

SpectralField ifft2_complex(const SpectralField& spectral) {
  SpectralField out = spectral;
  run_complex(PlanKind::kBackward, out);
  const double scale = 1.0 / static_cast<double>(spectral.dims().plane());
  for (auto& v : out.data()) v *= scale;
  return out;
}

FeatureField ifft2(const SpectralField& spectral, double* max_imag) {
  const SpectralField inv = ifft2_complex(spectral);
  FeatureField out(spectral.dims());
  auto src = inv.data();
  auto dst = out.data();
  double worst = 0.0;
  std::size_t worst_at = 0;
  for (std::size_t i = 0; i < src.size(); ++i) {
    dst[i] = src[i].real();
    const double im = std::abs(src[i].imag());
    if (!(im <= worst)) {
      worst = im;
      worst_at = i;
    }
  }
  if (max_imag != nullptr) *max_imag = worst;
  if (!(worst < kRealnessTolerance)) {
    std::ostringstream os;
    os << "ifft2: imaginary residue " << worst << " at index " << worst_at
       << " exceeds tolerance; spectrum is not conjugate-symmetric";
    throw RealnessError(os.str());
  }
  out.check_finite("ifft2 output");
  return out;
}

FeatureField dst2(const FeatureField& field) {
  require_dirichlet_grid(field.dims(), "dst2");
  field.check_finite("dst2 input");
  FeatureField out = field;
  fftw_plan p = plans().get(PlanKind::kSine, out.dims());
  fftw_execute_r2r(p, out.data().data(), out.data().data());
  // RODFT00 in 2D yields 4·Σ f·sin·sin; the amplitude carries 4/((H+1)(W+1)).
  const double scale = 1.0 / (static_cast<double>(field.height() + 1) *
                              static_cast<double>(field.width() + 1));
  out *= scale;
  return out;
}

FeatureField idst2(const FeatureField& coefficients) {
  require_dirichlet_grid(coefficients.dims(), "idst2");
  coefficients.check_finite("idst2 input");
  FeatureField out = coefficients;
  fftw_plan p = plans().get(PlanKind::kSine, out.dims());
  fftw_execute_r2r(p, out.data().data(), out.data().data());
  out *= 0.25;
  return out;
}

}  // namespace wavekit
