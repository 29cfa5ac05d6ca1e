#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gravnet {

// Bad magic, bad version, truncation. Carries the byte offset at which the
// file stopped making sense.
class FormatError : public std::runtime_error {
public:
    FormatError(const std::string& what, std::size_t byte_offset)
        : std::runtime_error(what + " (at byte offset " + std::to_string(byte_offset) + ")"),
          offset_(byte_offset) {}

    std::size_t byte_offset() const { return offset_; }

private:
    std::size_t offset_;
};

} // namespace gravnet
