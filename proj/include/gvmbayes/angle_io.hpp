#pragma once

#include <optional>
#include <string>
#include <variant>

#include "gvmbayes/inference.hpp"

namespace gvm {

enum class AngleUnit { radians, degrees };

struct AngleFileSpec {
    std::string path;
    AngleUnit unit = AngleUnit::radians;
    /// Column by header name or zero-based index.
    std::variant<std::size_t, std::string> column = std::size_t{0};
    /// Unset: a header is assumed when the first row's angle field is not a number.
    std::optional<bool> header;
};

/// Reads one angle column from a comma-separated file. Throws IoError when
/// the file cannot be read and ParseError on an empty file, a missing column
/// or a non-finite value.
Sample read_angles(const AngleFileSpec& spec);
Sample parse_angles(const std::string& text, const AngleFileSpec& spec);

}  // namespace gvm
