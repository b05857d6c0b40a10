#pragma once

#include <string>
#include <string_view>

#include "json.hpp"

namespace ideoaudit {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

/// Canonical JSON: object keys sorted by UTF-8 bytes, no insignificant
/// whitespace, integral floats written as integers, everything else in the
/// shortest round-trip form. Two structurally equal documents always give the
/// same bytes.
std::string canonical_dump(const Json& value);

/// Lowercase hex SHA-256 of arbitrary bytes.
std::string sha256_hex(std::string_view bytes);

/// sha256_hex(canonical_dump(value)).
inline std::string canonical_digest(const Json& value) { return sha256_hex(canonical_dump(value)); }

/// Reads a whole file as bytes. Throws Error if it cannot be opened.
std::string read_file(const std::string& path);

/// Writes bytes to a file, creating parent directories. Throws ArtifactExists
/// when `exclusive` and the file already exists.
void write_file(const std::string& path, std::string_view bytes, bool exclusive = false);

}  // namespace ideoaudit
