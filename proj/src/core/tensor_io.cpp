#include "wavekit/tensor_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace wavekit {
namespace {

constexpr char kMagic[4] = {'W', 'F', 'T', '1'};
constexpr std::size_t kHeaderBytes = 4 + 5 * 4;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f64(std::vector<std::uint8_t>& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

double get_f64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return std::bit_cast<double>(v);
}

}  // namespace

std::vector<std::uint8_t> encode_tensor(const FeatureField& field) {
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + 8 * field.size());
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  put_u32(out, kDtypeReal64);
  put_u32(out, 3);
  put_u32(out, static_cast<std::uint32_t>(field.channels()));
  put_u32(out, static_cast<std::uint32_t>(field.height()));
  put_u32(out, static_cast<std::uint32_t>(field.width()));
  for (double v : field.data()) put_f64(out, v);
  return out;
}

FeatureField decode_tensor(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw TensorIoError(TensorIoErrorKind::kBadMagic, "bad magic: expected \"WFT1\"");
  }
  if (bytes.size() < kHeaderBytes) {
    throw TensorIoError(TensorIoErrorKind::kTruncated, "truncated payload: header incomplete");
  }
  const std::uint8_t* p = bytes.data() + 4;
  const std::uint32_t dtype = get_u32(p);
  if (dtype != kDtypeReal64) {
    throw TensorIoError(TensorIoErrorKind::kDtypeMismatch,
                        "dtype mismatch: expected 1 (real64), got " + std::to_string(dtype));
  }
  const std::uint32_t rank = get_u32(p + 4);
  if (rank != 3) {
    throw TensorIoError(TensorIoErrorKind::kBadHeader,
                        "unsupported rank " + std::to_string(rank) + " (expected 3)");
  }
  const Dims dims{get_u32(p + 12), get_u32(p + 16), get_u32(p + 8)};
  if (dims.size() == 0) {
    throw TensorIoError(TensorIoErrorKind::kBadHeader, "zero-sized dimension in header");
  }
  const std::size_t payload = bytes.size() - kHeaderBytes;
  if (payload < 8 * dims.size()) {
    throw TensorIoError(TensorIoErrorKind::kTruncated,
                        "truncated payload: " + dims.str() + " needs " +
                            std::to_string(dims.size()) + " values, file carries " +
                            std::to_string(payload / 8));
  }
  if (payload > 8 * dims.size()) {
    throw TensorIoError(TensorIoErrorKind::kBadHeader, "trailing bytes after payload");
  }
  std::vector<double> data(dims.size());
  const std::uint8_t* q = bytes.data() + kHeaderBytes;
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = get_f64(q + 8 * i);
  return FeatureField(dims, std::move(data));
}

void save_tensor(const FeatureField& field, const std::filesystem::path& path) {
  const auto bytes = encode_tensor(field);
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw TensorIoError(TensorIoErrorKind::kIo, "cannot open " + path.string());
  os.write(reinterpret_cast<const char*>(bytes.data()),
           static_cast<std::streamsize>(bytes.size()));
  if (!os) throw TensorIoError(TensorIoErrorKind::kIo, "write failed: " + path.string());
}

FeatureField load_tensor(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw TensorIoError(TensorIoErrorKind::kIo, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)),
                                  std::istreambuf_iterator<char>());
  return decode_tensor(bytes);
}

}  // namespace wavekit
