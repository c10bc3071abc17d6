#pragma once

// Small file helpers shared by the writers: stable hashing, header lines and
// output directories.

#include <string>
#include <string_view>

namespace lamhb {

/// 64-bit FNV-1a of the bytes, as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);

/// `# lamhb v1; kind=<kind>; config=<hash>` plus `; created=<UTC ISO time>`
/// when `timestamp` is set.
std::string csv_header(const std::string& kind, const std::string& config_hash, bool timestamp);

/// Creates the directory (and parents); throws IoError on failure.
void ensure_directory(const std::string& path);

/// Writes `content` to `path` atomically enough for our purposes (temp file + rename).
void write_text_file(const std::string& path, const std::string& content);

std::string read_text_file(const std::string& path);

/// printf("%.17g") formatting used by every CSV writer.
std::string fmt_double(double v);

}  // namespace lamhb
