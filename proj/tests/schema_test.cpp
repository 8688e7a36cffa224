#include <doctest.h>

#include "sceneloop/tools/registry.hpp"
#include "support.hpp"

#include <fstream>

using namespace sceneloop::tools;
using nlohmann::json;

namespace {

json load_golden() {
    std::ifstream in(testing::data_path("golden_tool_schemas.json"));
    return json::parse(in);
}

// Reduces an exported function spec to the structural fields the golden file
// records: names, types, enums, item types and required lists.
json structural(const json& spec) {
    const json& fn = spec.at("function");
    json props = json::object();
    for (const auto& [name, p] : fn.at("parameters").at("properties").items()) {
        json q = {{"type", p.at("type")}};
        if (p.contains("enum")) q["enum"] = p.at("enum");
        if (p.contains("items")) q["items"] = {{"type", p.at("items").at("type")}};
        props[name] = q;
    }
    return {{"name", fn.at("name")}, {"properties", props}, {"required", fn.at("parameters").at("required")}};
}

} // namespace

TEST_CASE("exported schemas match the golden structure field for field") {
    const json golden = load_golden();
    const json exported = export_schemas();
    for (const char* phase : {"generation", "verification"}) {
        CAPTURE(phase);
        const auto& g = golden.at(phase);
        const auto& e = exported.at(phase);
        REQUIRE(g.size() == e.size());
        for (size_t i = 0; i < g.size(); ++i) {
            CAPTURE(g[i].at("name").get<std::string>());
            CHECK(structural(e[i]) == g[i]);
        }
    }
}

TEST_CASE("property order follows the declaration order") {
    const json spec = find_tool(Phase::generation, "execute_code")->to_json();
    std::vector<std::string> keys;
    for (const auto& [k, v] : spec["function"]["parameters"]["properties"].items()) keys.push_back(k);
    // nlohmann::json objects are sorted; the ParamSpec list keeps declaration order
    std::vector<std::string> declared;
    for (const auto& p : find_tool(Phase::generation, "execute_code")->params) declared.push_back(p.name);
    CHECK(declared == std::vector<std::string>{"thought", "code_diff", "code"});
}

TEST_CASE("every tool and parameter has a description") {
    for (Phase ph : {Phase::generation, Phase::verification}) {
        for (const auto& t : tool_specs(ph)) {
            CHECK_FALSE(t.description.empty());
            for (const auto& p : t.params) {
                CHECK_FALSE(p.description.empty());
                if (p.type == "array") CHECK_FALSE(p.item_description.empty());
            }
        }
    }
}

TEST_CASE("phase_schemas restricts by name") {
    auto only = phase_schemas(Phase::verification, {"end_process"});
    REQUIRE(only.size() == 1);
    CHECK(only[0]["function"]["name"] == "end_process");
    CHECK(phase_schemas(Phase::generation).size() == 5);
    CHECK(find_tool(Phase::generation, "investigate") == nullptr);
}
