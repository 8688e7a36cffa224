#include <doctest.h>

#include "sceneloop/scene/program.hpp"

using namespace sceneloop::scene;

TEST_CASE("single statement with string, tuple arguments") {
    auto p = parse_program("add_primitive name=\"c\" shape=\"cube\" location=(0,0,0.5)");
    REQUIRE(p.statements.size() == 1);
    const auto& st = p.statements[0];
    CHECK(st.line == 1);
    CHECK(st.verb == "add_primitive");
    REQUIRE(st.args.size() == 3);
    CHECK(std::get<std::string>(st.args[0].value) == "c");
    CHECK(std::get<std::vector<double>>(st.args[2].value) == std::vector<double>{0, 0, 0.5});
}

TEST_CASE("missing value is a parse error on line 1") {
    try {
        parse_program("add_primitive name=");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 1);
    }
}

TEST_CASE("comments and blank lines keep line numbers") {
    auto p = parse_program("# header\n\nadd_camera name=\"cam\"  # trailing\n   \nset_background ambient=0.2\n");
    REQUIRE(p.statements.size() == 2);
    CHECK(p.statements[0].line == 3);
    CHECK(p.statements[1].line == 5);
    CHECK(p.statements[0].text == "add_camera name=\"cam\"");
}

TEST_CASE("hash inside a string is not a comment") {
    auto p = parse_program("add_camera name=\"a#b\"");
    CHECK(std::get<std::string>(p.statements[0].args[0].value) == "a#b");
}

TEST_CASE("booleans and negative numbers") {
    auto p = parse_program("set_visibility name=\"x\" visible=false\nset_transform name=\"x\" location=(-1,2.5e-1,-3)");
    CHECK(std::get<bool>(p.statements[0].args[1].value) == false);
    CHECK(std::get<std::vector<double>>(p.statements[1].args[1].value) == std::vector<double>{-1, 0.25, -3});
}

TEST_CASE("unknown verb reports its column") {
    try {
        parse_program("add_primitive name=\"a\" shape=\"cube\"\n  explode name=\"a\"");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
        CHECK(e.column() == 3);
    }
}

TEST_CASE("duplicate keys and unterminated strings are rejected") {
    CHECK_THROWS_AS(parse_program("add_camera name=\"a\" name=\"b\""), ParseError);
    CHECK_THROWS_AS(parse_program("add_camera name=\"a"), ParseError);
    CHECK_THROWS_AS(parse_program("add_camera location=(1,2"), ParseError);
    CHECK_THROWS_AS(parse_program("add_camera 3=4"), ParseError);
}

TEST_CASE("canonical form re-parses to the same statements") {
    const char* src =
        "add_primitive   name=\"c\"  shape=\"cube\" location=( 0 , 0 , 0.5 )\n"
        "\n"
        "add_light kind=\"sun\" direction=(0,0,-1) energy=3  # key\n"
        "set_visibility name=\"c\" visible=true\n";
    auto a = parse_program(src);
    auto b = parse_program(a.to_canonical());
    REQUIRE(a.statements.size() == b.statements.size());
    for (size_t i = 0; i < a.statements.size(); ++i) {
        CHECK(a.statements[i].verb == b.statements[i].verb);
        CHECK(a.statements[i].args == b.statements[i].args);
    }
}
