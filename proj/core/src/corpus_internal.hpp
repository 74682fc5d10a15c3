#pragma once

#include "wdflow/corpus.hpp"

namespace wdflow::detail {

// Throws Error(kStrictViolation) listing every strict-only diagnostic.
void enforce_strict_mode(const Corpus& corpus, const LoadOptions& opts);

}  // namespace wdflow::detail
