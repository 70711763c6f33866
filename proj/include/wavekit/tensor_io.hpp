#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "wavekit/tensor.hpp"

namespace wavekit {

// WFT1 layout: "WFT1" | u32 dtype (1 = real64) | u32 rank (3) | u32 C, H, W |
// C·H·W little-endian float64 values. No padding, no footer.

enum class TensorIoErrorKind { kIo, kBadMagic, kTruncated, kDtypeMismatch, kBadHeader };

class TensorIoError : public std::runtime_error {
 public:
  TensorIoError(TensorIoErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  TensorIoErrorKind kind() const noexcept { return kind_; }

 private:
  TensorIoErrorKind kind_;
};

inline constexpr std::uint32_t kDtypeReal64 = 1;

std::vector<std::uint8_t> encode_tensor(const FeatureField& field);
FeatureField decode_tensor(const std::vector<std::uint8_t>& bytes);

void save_tensor(const FeatureField& field, const std::filesystem::path& path);
FeatureField load_tensor(const std::filesystem::path& path);

}  // namespace wavekit
