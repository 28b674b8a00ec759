#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mvp/pipeline/corpus.hpp"

namespace mvp::pipeline {

/// Small list-processing functions with matching one-line descriptions,
/// drawn from a fixed set of templates and word pools. The description
/// reuses the function's verb and identifier names. Deterministic in `seed`.
std::vector<Sample> synthetic_corpus(std::size_t count, std::uint64_t seed);

}  // namespace mvp::pipeline
