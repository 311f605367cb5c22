#pragma once

// JSONL wire format, one UTF-8 record per line:
//   {"id": "...", "spans": [["tok", ...], ...], "supporting": [1, 4], "label": ...}
// Augmented records additionally carry "source_id", "kept_indices" and, for
// beta modes, "pi".

#include <stdexcept>
#include <string>
#include <string_view>

#include "spandrop/types.hpp"

namespace spandrop {

class JsonlError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Serializes one example as a single line (no trailing newline).
std::string to_json_line(const SequenceExample& ex);

// Parses one line. Throws JsonlError on malformed input; does not run
// validate_example (callers decide how strict to be).
SequenceExample parse_example(std::string_view line);

}  // namespace spandrop
