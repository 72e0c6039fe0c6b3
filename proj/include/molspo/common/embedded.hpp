#pragma once

#include <string_view>

namespace molspo {

/// Contents of a data file compiled into the library, by file name.
std::string_view embedded_file(std::string_view name);

}  // namespace molspo
