#include "barcodelab/report.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>

#include <fmt/format.h>

#include "barcodelab/error.hpp"

namespace barcodelab {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return "0";  // folds -0
  return fmt::format("{:.12g}", value);
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) {
      throw Error(ErrorCode::IOError,
                  "cannot create directory " + path.parent_path().string() + ": " + ec.message());
    }
  }
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IOError, "cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorCode::IOError, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::IOError, "cannot move output into " + path.string() + ": " + ec.message());
}

std::filesystem::path resolve_output_dir(const std::filesystem::path* flag,
                                         const std::filesystem::path* config) {
  if (flag != nullptr && !flag->empty()) return *flag;
  if (config != nullptr && !config->empty()) return *config;
  if (const char* env = std::getenv("BARCODELAB_OUT"); env != nullptr && *env != '\0') {
    return env;
  }
  return std::filesystem::current_path();
}

}  // namespace barcodelab
