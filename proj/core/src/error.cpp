#include "recipfm/error.hpp"

#include <fmt/core.h>

namespace recipfm {

ParseError::ParseError(const std::string& what, std::size_t offset)
    : Error(fmt::format("{} at offset {}", what, offset)), offset_(offset) {}

}  // namespace recipfm
