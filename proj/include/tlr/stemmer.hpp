#pragma once

#include <string>

namespace tlr {

/// Porter's suffix-stripping algorithm for English. Input must be lowercase ASCII.
std::string porter_stem(const std::string& word);

/// Snowball Italian stemmer. Input must be lowercase UTF-8; accented vowels
/// are handled, anything outside the Italian alphabet passes through untouched.
std::string italian_stem(const std::string& word);

}  // namespace tlr
