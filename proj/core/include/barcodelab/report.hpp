#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace barcodelab {

/// Decimal text with 12 significant digits, '.' separator; "inf", "-inf", "nan".
std::string format_number(double value);

/// Writes `content` atomically enough for batch use (temp file + rename).
/// Throws IOError.
void write_text_file(const std::filesystem::path& path, std::string_view content);

/// Resolves the output directory: explicit flag, then config, then the
/// BARCODELAB_OUT environment variable, then the working directory.
std::filesystem::path resolve_output_dir(const std::filesystem::path* flag,
                                         const std::filesystem::path* config);

}  // namespace barcodelab
