#pragma once

#include <string>
#include <string_view>

namespace wdflow {

// Porter (1980) suffix-stripping stemmer, original rule set. Expects a single
// lowercase token; bytes outside a-z are treated as consonants.
std::string porter_stem(std::string_view word);

}  // namespace wdflow
