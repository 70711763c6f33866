#include "wavekit/cli/csv.hpp"

#include <charconv>
#include <stdexcept>

#include "wavekit/version.hpp"

namespace wavekit::cli {

std::string fmt(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::string& command,
                     const nlohmann::json& config, std::uint64_t seed,
                     const std::vector<std::string>& columns)
    : path_(path), out_(path), columns_(columns.size()) {
  if (!out_) throw std::runtime_error("cannot write " + path.string());
  out_ << "# tool: wavekit " << kVersion << '\n'
       << "# command: " << command << '\n'
       << "# seed: " << seed << '\n'
       << "# config: " << config.dump() << '\n';
  row(columns);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) {
    throw std::logic_error("csv " + path_.string() + ": row has " + std::to_string(cells.size()) +
                           " cells, header has " + std::to_string(columns_));
  }
  for (const auto& c : cells) {
    if (c.find_first_of(",\n") != std::string::npos) {
      throw std::logic_error("csv " + path_.string() + ": cell '" + c + "' contains a separator");
    }
  }
  for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
  out_ << '\n';
  out_.flush();
  if (!out_) throw std::runtime_error("write failed: " + path_.string());
}

}  // namespace wavekit::cli
