#include <doctest.h>

#include "sceneloop/tools/diff.hpp"
#include "sceneloop/util/text.hpp"

#include <fmt/format.h>

#include <random>

using namespace sceneloop::tools;

namespace {

std::string random_line(std::mt19937& rng) {
    static const char* verbs[] = {"add_primitive", "set_transform", "set_material", "add_light", "delete"};
    std::uniform_int_distribution<int> pick(0, 4), num(-20, 20), name(0, 5);
    return fmt::format("{} name=\"o{}\" location=({},{},{})", verbs[pick(rng)], name(rng), num(rng), num(rng) / 4.0,
                       num(rng));
}

std::vector<std::string> random_program(std::mt19937& rng, int n) {
    std::vector<std::string> lines;
    for (int i = 0; i < n; ++i) lines.push_back(random_line(rng));
    return lines;
}

std::string join(const std::vector<std::string>& lines) {
    std::string s;
    for (const auto& l : lines) s += l + "\n";
    return s;
}

// Random line-level edit: deletions, replacements, insertions anywhere.
std::vector<std::string> mutate(std::mt19937& rng, std::vector<std::string> lines) {
    std::uniform_int_distribution<int> ops(1, 4);
    const int n = ops(rng);
    for (int k = 0; k < n; ++k) {
        std::uniform_int_distribution<int> kind(0, 2);
        std::uniform_int_distribution<size_t> pos(0, lines.size());
        const size_t p = pos(rng);
        switch (kind(rng)) {
        case 0:
            if (p < lines.size()) lines.erase(lines.begin() + static_cast<long>(p));
            break;
        case 1:
            if (p < lines.size()) lines[p] = random_line(rng);
            break;
        default:
            lines.insert(lines.begin() + static_cast<long>(p), random_line(rng));
        }
    }
    return lines;
}

} // namespace

TEST_CASE("from-scratch diff: empty removal block") {
    auto d = parse_code_diff("-: []\n+: [add_primitive name=\"c\" shape=\"cube\"]");
    CHECK(d.removals.empty());
    REQUIRE(d.additions.size() == 1);
    CHECK(d.additions[0] == "add_primitive name=\"c\" shape=\"cube\"");
}

TEST_CASE("multi-line blocks") {
    auto d = parse_code_diff("-: [\nold one\nold two\n]\n+: [\nnew one\nnew two]\n");
    CHECK(d.removals == std::vector<std::string>{"old one", "old two"});
    CHECK(d.additions == std::vector<std::string>{"new one", "new two"});
}

TEST_CASE("rejects additions listed before removals") {
    CHECK_THROWS_AS(parse_code_diff("+: [x]\n-: [y]"), DiffFormatError);
    CHECK_THROWS_AS(parse_code_diff("-: [y]\n+: [x]\n-: [z]"), DiffFormatError);
}

TEST_CASE("rejects a from-scratch diff without the empty removal block") {
    CHECK_THROWS_AS(parse_code_diff("+: [add_camera name=\"c\"]"), DiffFormatError);
    CHECK_THROWS_AS(parse_code_diff("add_camera name=\"c\""), DiffFormatError);
    CHECK_THROWS_AS(parse_code_diff("-: []"), DiffFormatError);
}

TEST_CASE("rejects markdown fences") {
    CHECK_THROWS_AS(parse_code_diff("```\n-: []\n+: [x]\n```"), DiffFormatError);
    CHECK_THROWS_AS(parse_code_diff("-: []\n+: [\n```python\nx\n```\n]"), DiffFormatError);
}

TEST_CASE("apply deletes the first match and inserts at its position") {
    const std::string before = "a\nb\nc\nb\n";
    CHECK(apply_diff(before, CodeDiff{{"b"}, {"X", "Y"}}) == "a\nX\nY\nc\nb\n");
    CHECK(apply_diff(before, CodeDiff{{}, {"z"}}) == "a\nb\nc\nb\nz\n");
    CHECK(apply_diff("a  \nb\n", CodeDiff{{"a"}, {}}) == "b\n");
    CHECK_THROWS_AS(apply_diff(before, CodeDiff{{"q"}, {}}), ApplyError);
}

TEST_CASE("format/parse round trip") {
    for (const CodeDiff& d : {CodeDiff{}, CodeDiff{{}, {"x"}}, CodeDiff{{"a", "b"}, {"c"}}, CodeDiff{{"a"}, {}}}) {
        CHECK(parse_code_diff(format_code_diff(d)) == d);
    }
    CHECK(format_code_diff(CodeDiff{{}, {"x"}}) == "-: []\n+: [\nx\n]");
}

TEST_CASE("property: apply(before, parse(format(make_diff(before, after)))) == after, 1000 cases") {
    std::mt19937 rng(1234);
    int failures = 0;
    for (int i = 0; i < 1000; ++i) {
        std::uniform_int_distribution<int> len(0, 14);
        const auto before_lines = random_program(rng, len(rng));
        const auto after_lines = mutate(rng, before_lines);
        const std::string before = join(before_lines), after = join(after_lines);
        const CodeDiff d = make_diff(before, after);
        const CodeDiff reparsed = parse_code_diff(format_code_diff(d));
        if (!(reparsed == d) || apply_diff(before, reparsed) != after) {
            if (++failures <= 3) MESSAGE("case " << i << "\nbefore:\n" << before << "after:\n" << after);
        }
    }
    CHECK(failures == 0);
}
