#pragma once

#include <string>
#include <string_view>

namespace gpduo::io {

// Writes to <path>.tmp.<pid> then renames over path.
void atomic_write(const std::string& path, std::string_view bytes);

std::string read_file(const std::string& path);

}  // namespace gpduo::io
