#pragma once

#include "sceneloop/util/error.hpp"

#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace sceneloop::scene {

// A DSL argument value: quoted string, number, boolean, or numeric tuple.
using Value = std::variant<std::string, double, bool, std::vector<double>>;

struct Argument {
    std::string key;
    Value value;
    bool operator==(const Argument&) const = default;
};

struct Statement {
    int line = 0;  // 1-based
    std::string verb;
    std::vector<Argument> args;
    std::string text;  // source line as written (comment stripped, trimmed)

    const Argument* find(std::string_view key) const;
    // Equality over (line, verb, args); `text` is presentation only.
    bool operator==(const Statement& o) const { return line == o.line && verb == o.verb && args == o.args; }
};

struct Program {
    std::string source;
    std::vector<Statement> statements;

    // Canonical one-line-per-statement rendering; parse_program(to_canonical())
    // yields the same verbs and arguments.
    std::string to_canonical() const;
};

class ParseError : public Error {
public:
    ParseError(int line, int column, std::string expected);
    int line() const { return line_; }
    int column() const { return column_; }
    const std::string& expected() const { return expected_; }

private:
    int line_;
    int column_;
    std::string expected_;
};

// The verbs the interpreter understands.
const std::vector<std::string_view>& known_verbs();

// One statement per line: `verb key=value ...`; `#` starts a comment outside
// strings; blank lines are ignored.
Program parse_program(std::string_view text);

std::string format_value(const Value& v);
std::string format_statement(const Statement& s);

} // namespace sceneloop::scene
