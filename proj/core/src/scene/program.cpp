#include "sceneloop/scene/program.hpp"

#include "sceneloop/util/text.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fmt/format.h>

namespace sceneloop::scene {

const Argument* Statement::find(std::string_view key) const {
    auto it = std::find_if(args.begin(), args.end(), [&](const Argument& a) { return a.key == key; });
    return it == args.end() ? nullptr : &*it;
}

ParseError::ParseError(int line, int column, std::string expected)
    : Error(fmt::format("parse error at line {}, column {}: expected {}", line, column, expected)),
      line_(line), column_(column), expected_(std::move(expected)) {}

const std::vector<std::string_view>& known_verbs() {
    static const std::vector<std::string_view> verbs = {
        "add_primitive", "add_mesh",      "add_light",      "add_camera",   "set_active_camera", "set_material",
        "set_transform", "set_visibility", "set_keyframe", "set_background", "delete",
    };
    return verbs;
}

namespace {

bool ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }
bool blank(char c) { return c == ' ' || c == '\t' || c == '\r'; }

class LineParser {
public:
    LineParser(std::string_view line, int line_no) : s_(line), line_(line_no) {}

    // Returns false for blank/comment-only lines.
    bool parse(Statement& out) {
        skip_blank();
        if (at_end_or_comment()) return false;
        out.line = line_;
        out.verb = identifier("verb");
        if (std::find(known_verbs().begin(), known_verbs().end(), out.verb) == known_verbs().end()) {
            fail_at(verb_col_, fmt::format("known verb (got '{}')", out.verb));
        }
        while (true) {
            const size_t before = pos_;
            skip_blank();
            if (at_end_or_comment()) break;
            if (pos_ == before) fail("whitespace before argument");
            Argument arg;
            const size_t key_col = pos_;
            arg.key = identifier("argument key");
            if (out.find(arg.key)) fail_at(key_col, fmt::format("unique argument key ('{}' repeated)", arg.key));
            if (peek() != '=') fail("'=' after argument key");
            ++pos_;
            arg.value = value();
            out.args.push_back(std::move(arg));
        }
        out.text = std::string(text::trim(s_.substr(0, pos_)));
        return true;
    }

private:
    char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
    bool at_end_or_comment() const { return pos_ >= s_.size() || s_[pos_] == '#'; }
    void skip_blank() {
        while (pos_ < s_.size() && blank(s_[pos_])) ++pos_;
    }

    [[noreturn]] void fail(const std::string& expected) const { fail_at(pos_, expected); }
    [[noreturn]] void fail_at(size_t pos, const std::string& expected) const {
        throw ParseError(line_, static_cast<int>(pos) + 1, expected);
    }

    std::string identifier(const char* what) {
        if (!ident_start(peek())) fail(what);
        if (std::string_view(what) == "verb") verb_col_ = pos_;
        const size_t start = pos_;
        while (ident_char(peek())) ++pos_;
        return std::string(s_.substr(start, pos_ - start));
    }

    Value value() {
        const char c = peek();
        if (c == '"') return quoted();
        if (c == '(') return tuple();
        if (c == '-' || c == '+' || c == '.' || (c >= '0' && c <= '9')) return number();
        if (ident_start(c)) {
            const size_t start = pos_;
            while (ident_char(peek())) ++pos_;
            const auto word = s_.substr(start, pos_ - start);
            if (word == "true") return true;
            if (word == "false") return false;
            fail_at(start, "value (string, number, boolean, or tuple)");
        }
        fail("value (string, number, boolean, or tuple)");
    }

    std::string quoted() {
        ++pos_;
        std::string out;
        while (true) {
            if (pos_ >= s_.size()) fail("closing '\"'");
            const char c = s_[pos_++];
            if (c == '"') break;
            if (c == '\\') {
                if (pos_ >= s_.size()) fail("escape sequence");
                const char e = s_[pos_++];
                switch (e) {
                case '"': out += '"'; break;
                case '\\': out += '\\'; break;
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                default: fail_at(pos_ - 1, "escape sequence (\\\", \\\\, \\n, \\t)");
                }
            } else {
                out += c;
            }
        }
        return out;
    }

    double number() {
        const size_t start = pos_;
        if (peek() == '+') ++pos_;
        const char* first = s_.data() + pos_;
        const char* last = s_.data() + s_.size();
        double v = 0;
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr == first) fail_at(start, "number");
        if (!std::isfinite(v)) fail_at(start, "finite number");
        pos_ = static_cast<size_t>(ptr - s_.data());
        if (pos_ < s_.size() && !blank(s_[pos_]) && s_[pos_] != '#' && s_[pos_] != ',' && s_[pos_] != ')') {
            fail("delimiter after number");
        }
        return v;
    }

    std::vector<double> tuple() {
        ++pos_;
        std::vector<double> out;
        skip_blank();
        if (peek() == ')') fail("number in tuple");
        while (true) {
            skip_blank();
            out.push_back(number());
            skip_blank();
            if (peek() == ',') {
                ++pos_;
                continue;
            }
            if (peek() == ')') {
                ++pos_;
                break;
            }
            fail("',' or ')' in tuple");
        }
        return out;
    }

    std::string_view s_;
    int line_;
    size_t pos_ = 0;
    size_t verb_col_ = 0;
};

} // namespace

Program parse_program(std::string_view text) {
    Program program;
    program.source = std::string(text);
    int line_no = 0;
    for (const std::string& line : text::split_lines(text)) {
        ++line_no;
        Statement st;
        LineParser parser(line, line_no);
        if (parser.parse(st)) program.statements.push_back(std::move(st));
    }
    return program;
}

std::string format_value(const Value& v) {
    return std::visit(
        [](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, std::string>) {
                std::string out = "\"";
                for (char c : x) {
                    switch (c) {
                    case '"': out += "\\\""; break;
                    case '\\': out += "\\\\"; break;
                    case '\n': out += "\\n"; break;
                    case '\t': out += "\\t"; break;
                    default: out += c;
                    }
                }
                return out + "\"";
            } else if constexpr (std::is_same_v<T, double>) {
                return text::shortest_double(x);
            } else if constexpr (std::is_same_v<T, bool>) {
                return x ? "true" : "false";
            } else {
                std::string out = "(";
                for (size_t i = 0; i < x.size(); ++i) {
                    if (i) out += ",";
                    out += text::shortest_double(x[i]);
                }
                return out + ")";
            }
        },
        v);
}

std::string format_statement(const Statement& s) {
    std::string out = s.verb;
    for (const auto& a : s.args) out += " " + a.key + "=" + format_value(a.value);
    return out;
}

std::string Program::to_canonical() const {
    std::vector<std::string> lines;
    lines.reserve(statements.size());
    for (const auto& s : statements) lines.push_back(format_statement(s));
    return text::join_lines(lines);
}

} // namespace sceneloop::scene
