#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ctm::text {

// Splits on Unicode White_Space code points. Invalid UTF-8 bytes are kept
// as part of the surrounding token.
std::vector<std::string> split_whitespace(std::string_view s);

// Unicode simple lowercase mapping (C.UTF-8 rules).
std::string to_lower(std::string_view s);

// Drops leading and trailing Unicode punctuation. May return "".
std::string strip_punctuation(std::string_view s);

// The normalization pipeline used for vocabulary and BoW: lowercase,
// whitespace split, punctuation strip, empty tokens dropped.
std::vector<std::string> normalize_tokens(std::string_view s);

std::string trim(std::string_view s);

std::size_t code_point_count(std::string_view s);

}  // namespace ctm::text
