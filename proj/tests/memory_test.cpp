#include <doctest.h>

#include "sceneloop/memory/assemble.hpp"
#include "support.hpp"

#include <random>

using namespace sceneloop;
using memory::ContextMemory;
using memory::RoundRecord;

namespace {

void add_round(ContextMemory& m, bool success) {
    RoundRecord& r = m.open_round();
    r.program = "add_primitive name=\"c" + std::to_string(r.index) + "\" shape=\"cube\"";
    r.exec.success = success;
    r.exec.text = success ? "ok" : "Execution failed at line 1: boom";
    if (success) r.exec.renders.push_back(testing::solid(8, 8, 10, 20, 30));
    r.feedback = {"diff " + std::to_string(r.index), "fix " + std::to_string(r.index)};
    m.record_warning(tools::Phase::generation, "w");
    m.commit_round();
}

std::size_t context_chars(const std::vector<backend::ChatMessage>& msgs) {
    std::size_t n = 0;
    for (const auto& m : msgs) n += m.text().size();
    return n;
}

} // namespace

TEST_CASE("property: the window retains exactly the last L rounds, context is O(L)") {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> nd(0, 200), ld(1, 16);
    for (int trial = 0; trial < 200; ++trial) {
        const int N = nd(rng), L = ld(rng);
        ContextMemory m(L);
        m.pinned().task = "task";
        std::size_t max_chars = 0, max_msgs = 0;
        for (int i = 0; i < N; ++i) {
            add_round(m, i % 3 != 0);
            const auto ctx = memory::assemble_generator_context(m);
            max_chars = std::max(max_chars, context_chars(ctx));
            max_msgs = std::max(max_msgs, ctx.size());
        }
        std::vector<int> got;
        for (const auto& r : m.rounds()) got.push_back(r.index);
        std::vector<int> want;
        for (int i = std::max(0, N - L); i < N; ++i) want.push_back(i);
        REQUIRE(got == want);
        CHECK(m.next_index() == N);
        // one block per retained round plus a fixed header
        CHECK(max_msgs <= static_cast<std::size_t>(L) + 3);
        if (N > 0) {
            const auto ctx = memory::assemble_generator_context(m);
            CHECK(memory::assemble_generator_context(m).size() == 2 + m.rounds().size());
            CHECK(context_chars(ctx) <= max_chars);
        }
    }
}

TEST_CASE("context size does not grow past the window") {
    ContextMemory m(4);
    m.pinned().task = "task";
    for (int i = 0; i < 4; ++i) add_round(m, true);
    const auto at_window = context_chars(memory::assemble_generator_context(m));
    for (int i = 0; i < 200; ++i) add_round(m, true);
    // indices gain digits, everything else is the same size
    CHECK(context_chars(memory::assemble_generator_context(m)) <= at_window + 4 * 4 * 3);
}

TEST_CASE("default window is 12") {
    ContextMemory m;
    CHECK(m.window() == 12);
    for (int i = 0; i < 30; ++i) add_round(m, true);
    CHECK(m.rounds().size() == 12);
    CHECK(m.rounds().front().index == 18);
}

TEST_CASE("pinned content survives eviction") {
    ContextMemory m(1);
    m.pinned().task = "build a red cube";
    m.pinned().plan = tools::Plan{"overall", "steps"};
    m.pinned().targets.push_back(testing::solid(4, 4, 255, 0, 0));
    for (int i = 0; i < 5; ++i) add_round(m, true);
    const auto ctx = memory::assemble_generator_context(m);
    std::string all;
    for (const auto& msg : ctx) all += msg.text() + "\n";
    CHECK(all.find("build a red cube") != std::string::npos);
    CHECK(all.find("overall") != std::string::npos);
    CHECK(backend::count_images(ctx) == 2);  // target + the one retained render
}

TEST_CASE("image cap keeps the newest renders and leaves placeholders") {
    ContextMemory m(10, 3);
    m.pinned().task = "t";
    for (int i = 0; i < 8; ++i) add_round(m, true);
    const auto ctx = memory::assemble_generator_context(m);
    CHECK(backend::count_images(ctx) == 3);
    std::string all;
    for (const auto& msg : ctx) all += msg.text();
    CHECK(all.find("Render of round 4 omitted") != std::string::npos);
    CHECK(all.find("Render of round 5 omitted") == std::string::npos);
}

TEST_CASE("round indices must be contiguous") {
    ContextMemory m(3);
    RoundRecord r;
    r.index = 1;
    CHECK_THROWS_AS(m.append_round(r), memory::IndexError);
    r.index = 0;
    m.append_round(r);
    CHECK(m.next_index() == 1);
    CHECK_THROWS_AS(m.commit_round(), memory::StateError);
    m.open_round();
    CHECK_THROWS_AS(m.open_round(), memory::StateError);
}

TEST_CASE("verifier context requires a successful round and shows its renders") {
    ContextMemory m(3);
    m.pinned().task = "t";
    for (int i = 0; i < 5; ++i) add_round(m, true);
    RoundRecord& cur = m.open_round();
    cur.exec.success = false;
    CHECK_THROWS_AS(memory::assemble_verifier_context(m, cur), memory::PreconditionError);
    cur.exec.success = true;
    cur.exec.renders.push_back(testing::solid(8, 8, 1, 2, 3));
    cur.program = "CURRENT";
    const auto ctx = memory::assemble_verifier_context(m, cur);
    std::string all;
    for (const auto& msg : ctx) all += msg.text();
    CHECK(all.find("CURRENT") != std::string::npos);
    CHECK(all.find("c4") != std::string::npos);
    CHECK(all.find("c3") != std::string::npos);
    CHECK(all.find("c2") == std::string::npos);  // window-1 = 2 previous editions
}

TEST_CASE("json round trip keeps rounds, events and images") {
    ContextMemory m(2, 5);
    m.pinned().task = "t";
    m.pinned().targets.push_back(testing::solid(3, 2, 9, 8, 7));
    for (int i = 0; i < 4; ++i) add_round(m, i != 1);
    const auto j = m.to_json();
    const auto back = ContextMemory::from_json(j);
    CHECK(back.to_json() == j);
    CHECK(back.rounds().size() == 2);
    CHECK(back.next_index() == 4);
    CHECK(back.pinned().targets[0] == m.pinned().targets[0]);
    CHECK(back.rounds().back().exec.renders[0] == m.rounds().back().exec.renders[0]);
}
