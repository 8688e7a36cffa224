#include "sceneloop/tools/diff.hpp"

#include "sceneloop/util/text.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <optional>

namespace sceneloop::tools {

using text::rtrim;
using text::trim;

ApplyError::ApplyError(std::string line)
    : Error(fmt::format("removal line not found in the previous program: \"{}\"", line)), line_(std::move(line)) {}

namespace {

bool is_header(std::string_view line, char sign) {
    const auto t = trim(line);
    return t.size() >= 2 && t[0] == sign && t[1] == ':';
}

// Lines of one block; `first` is the remainder of the header line after "X:".
std::vector<std::string> block_lines(char sign, std::string_view first, const std::vector<std::string>& body) {
    const auto head = trim(first);
    if (head.empty() || head.front() != '[')
        throw DiffFormatError(fmt::format("'{}:' must be followed by '['", sign));
    std::string_view rest = rtrim(head.substr(1));

    std::vector<std::string> lines;
    if (body.empty()) {
        if (rest.empty() || rest.back() != ']') throw DiffFormatError(fmt::format("'{}: [' block is not closed", sign));
        rest.remove_suffix(1);
        if (!rest.empty()) lines.emplace_back(rest);
        return lines;
    }
    if (!rest.empty()) lines.emplace_back(rest);
    lines.insert(lines.end(), body.begin(), body.end());
    // Trailing blank lines before the close are layout, not content.
    while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
    if (lines.empty()) throw DiffFormatError(fmt::format("'{}: [' block is not closed", sign));
    if (trim(lines.back()) == "]") {
        lines.pop_back();
        return lines;
    }
    std::string_view last = rtrim(lines.back());
    if (last.empty() || last.back() != ']') throw DiffFormatError(fmt::format("'{}: [' block is not closed", sign));
    last.remove_suffix(1);
    lines.back() = std::string(last);
    return lines;
}

} // namespace

CodeDiff parse_code_diff(std::string_view text) {
    if (text.find("```") != std::string_view::npos) throw DiffFormatError("markdown fences are not allowed in code_diff");
    std::vector<std::string> lines = text::split_lines(text);
    for (auto& l : lines)
        if (!l.empty() && l.back() == '\r') l.pop_back();

    size_t begin = 0, end = lines.size();
    while (begin < end && trim(lines[begin]).empty()) ++begin;
    while (end > begin && trim(lines[end - 1]).empty()) --end;
    if (begin == end) throw DiffFormatError("code_diff is empty; expected '-: [...]' then '+: [...]'");

    if (is_header(lines[begin], '+')) throw DiffFormatError("additions block comes before the removals block");
    if (!is_header(lines[begin], '-'))
        throw DiffFormatError(fmt::format("expected '-: [' at the start of code_diff, found \"{}\"",
                                          std::string(trim(lines[begin])).substr(0, 60)));

    size_t plus = end;
    for (size_t i = begin + 1; i < end; ++i) {
        if (is_header(lines[i], '+')) {
            plus = i;
            break;
        }
    }
    if (plus == end) {
        // A second removals block after the first is also an ordering error.
        throw DiffFormatError("missing '+: [...]' additions block");
    }
    for (size_t i = plus + 1; i < end; ++i)
        if (is_header(lines[i], '-')) throw DiffFormatError("removals block appears after the additions block");

    auto header_rest = [](const std::string& l) { return std::string_view(l).substr(l.find(':') + 1); };
    CodeDiff diff;
    diff.removals = block_lines('-', header_rest(lines[begin]),
                                std::vector<std::string>(lines.begin() + begin + 1, lines.begin() + plus));
    diff.additions = block_lines('+', header_rest(lines[plus]),
                                 std::vector<std::string>(lines.begin() + plus + 1, lines.begin() + end));
    return diff;
}

std::string format_code_diff(const CodeDiff& diff) {
    auto block = [](char sign, const std::vector<std::string>& lines) {
        if (lines.empty()) return fmt::format("{}: []", sign);
        std::string out = fmt::format("{}: [\n", sign);
        for (const auto& l : lines) out += l + "\n";
        return out + "]";
    };
    return block('-', diff.removals) + "\n" + block('+', diff.additions);
}

std::string apply_diff(std::string_view previous, const CodeDiff& diff) {
    std::vector<std::string> lines = text::split_lines(previous);
    std::optional<size_t> insert_at;
    for (const std::string& removal : diff.removals) {
        const auto target = rtrim(removal);
        auto it = std::find_if(lines.begin(), lines.end(), [&](const std::string& l) { return rtrim(l) == target; });
        if (it == lines.end()) throw ApplyError(removal);
        const size_t idx = static_cast<size_t>(it - lines.begin());
        lines.erase(it);
        if (!insert_at) insert_at = idx;
        else if (idx < *insert_at) --*insert_at;
    }
    const size_t at = insert_at.value_or(lines.size());
    lines.insert(lines.begin() + static_cast<std::ptrdiff_t>(at), diff.additions.begin(), diff.additions.end());
    // Keep the previous program's final-newline convention; new programs get one.
    std::string out = text::join_lines(lines);
    if (!out.empty() && (previous.empty() || previous.back() == '\n')) out += '\n';
    return out;
}

CodeDiff make_diff(std::string_view before, std::string_view after) {
    const std::vector<std::string> a = text::split_lines(before);
    const std::vector<std::string> b = text::split_lines(after);

    size_t prefix = 0;
    while (prefix < a.size() && prefix < b.size() && a[prefix] == b[prefix]) ++prefix;
    size_t suffix = 0;
    while (suffix < a.size() - prefix && suffix < b.size() - prefix &&
           a[a.size() - 1 - suffix] == b[b.size() - 1 - suffix])
        ++suffix;

    size_t start = prefix;
    size_t a_end = a.size() - suffix;
    size_t b_end = b.size() - suffix;
    if (start == a_end && start == b_end) return {};
    if (start == a_end && suffix > 0) {
        // Pure insertion mid-file: anchor it by replacing the following line.
        ++a_end;
        ++b_end;
    }
    // First-match removal must hit the intended lines, so no removed line may
    // also occur before the block.
    auto clashes = [&] {
        for (size_t i = start; i < a_end; ++i)
            for (size_t j = 0; j < start; ++j)
                if (rtrim(a[i]) == rtrim(a[j])) return true;
        return false;
    };
    while (start > 0 && clashes()) --start;

    CodeDiff d;
    d.removals.assign(a.begin() + start, a.begin() + a_end);
    d.additions.assign(b.begin() + start, b.begin() + b_end);
    return d;
}

} // namespace sceneloop::tools
