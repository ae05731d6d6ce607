#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>

namespace afroasr::io {

std::string read_file(const std::filesystem::path& path);

/// Calls `fn(line_number, line)` for every line; numbering starts at 1.
/// A trailing '\r' is dropped so CRLF files parse the same as LF.
void for_each_line(const std::filesystem::path& path,
                   const std::function<void(std::size_t, std::string_view)>& fn);

/// Writes to a sibling temp file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

bool is_blank(std::string_view s);

}  // namespace afroasr::io
