#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ideoaudit::text {

/// Full Unicode case folding of UTF-8 text.
std::string casefold(std::string_view utf8);

/// Casefold, trim, collapse whitespace runs, and strip leading/trailing
/// punctuation (general category P). May return an empty string.
std::string canonical_key(std::string_view utf8);

/// Segments on Unicode word boundaries, casefolds every segment, and keeps
/// only segments containing at least one letter or digit.
std::vector<std::string> word_tokens(std::string_view utf8);

/// Trims ASCII and Unicode whitespace from both ends.
std::string trim(std::string_view utf8);

}  // namespace ideoaudit::text
