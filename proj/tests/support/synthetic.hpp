#pragma once

#include <cstdint>
#include <string>

namespace stylus::testing {

struct SyntheticOptions {
    std::uint64_t seed = 7;
    int min_tokens = 150;
    int max_tokens = 300;
    bool table_of_contents = true;
    bool duplicate_70 = false;
    int skip_paper = 0;       // leave one paper out
    int repeat_paper = 0;     // emit one paper twice
};

/// Gutenberg-style ebook with 85 papers whose word use depends on the
/// authorship table: Hamilton leans on "upon" and "while", Madison on
/// "whilst", "on" and "by". Disputed papers follow the Madison profile and
/// joint papers mix both.
std::string synthetic_ebook(const SyntheticOptions& options = {});

}  // namespace stylus::testing
