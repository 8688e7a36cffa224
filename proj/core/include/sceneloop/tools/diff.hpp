#pragma once

#include "sceneloop/util/error.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace sceneloop::tools {

// The two-block edit a generator attaches to each program:
//   -: [removed lines]
//   +: [added lines]
struct CodeDiff {
    std::vector<std::string> removals;
    std::vector<std::string> additions;
    bool operator==(const CodeDiff&) const = default;
};

class DiffFormatError : public Error {
public:
    using Error::Error;
};

class ApplyError : public Error {
public:
    explicit ApplyError(std::string line);
    const std::string& line() const { return line_; }

private:
    std::string line_;
};

// A block is `X: []`, `X: [line]`, or `X: [` / lines / `]`. The closing
// bracket may also end the last content line.
CodeDiff parse_code_diff(std::string_view text);
std::string format_code_diff(const CodeDiff& diff);

// Each removal deletes its first match (compared with trailing whitespace
// trimmed); additions go in at the first removal's position, or at the end.
std::string apply_diff(std::string_view previous, const CodeDiff& diff);

// A diff with apply_diff(before, make_diff(before, after)) == after.
CodeDiff make_diff(std::string_view before, std::string_view after);

} // namespace sceneloop::tools
