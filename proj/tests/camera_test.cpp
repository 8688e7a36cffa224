#include <doctest.h>

#include "sceneloop/engine/embedded_engine.hpp"
#include "sceneloop/scene/render.hpp"
#include "sceneloop/tools/tools.hpp"

#include <fmt/format.h>

#include <random>

using namespace sceneloop;
using scene::CameraPose;
using scene::Vec3;

namespace {

double pose_gap(const CameraPose& a, const CameraPose& b) {
    return std::max((a.location - b.location).cwiseAbs().maxCoeff(),
                    (a.rotation_euler - b.rotation_euler).cwiseAbs().maxCoeff());
}

CameraPose some_pose() {
    CameraPose p;
    p.location = {3.2, -4.1, 2.7};
    p.rotation_euler = scene::look_at_euler(p.location, {0.3, 0.2, 0.1});
    return p;
}

} // namespace

TEST_CASE("zoom in then out is the identity") {
    const Vec3 focus(0.3, 0.2, 0.1);
    const CameraPose p = some_pose();
    CHECK(pose_gap(tools::camera::zoom(tools::camera::zoom(p, focus, "in"), focus, "out"), p) < 1e-9);
    CHECK(pose_gap(tools::camera::zoom(tools::camera::zoom(p, focus, "out"), focus, "in"), p) < 1e-9);
    const double d0 = (p.location - focus).norm();
    CHECK((tools::camera::zoom(p, focus, "in").location - focus).norm() == doctest::Approx(0.8 * d0));
    CHECK((tools::camera::zoom(p, focus, "out").location - focus).norm() == doctest::Approx(1.25 * d0));
}

TEST_CASE("opposite moves cancel") {
    for (auto [a, b] : {std::pair{"left", "right"}, {"up", "down"}, {"in", "out"}}) {
        CAPTURE(a);
        CameraPose p = some_pose();
        Vec3 focus(0.3, 0.2, 0.1);
        const CameraPose p0 = p;
        const Vec3 f0 = focus;
        tools::camera::move(p, focus, a);
        CHECK(pose_gap(p, p0) > 0.1);
        tools::camera::move(p, focus, b);
        CHECK(pose_gap(p, p0) < 1e-9);
        CHECK((focus - f0).norm() < 1e-9);
    }
}

TEST_CASE("move step is a quarter of the focus distance along the camera axes") {
    CameraPose p = some_pose();
    Vec3 focus(0.3, 0.2, 0.1);
    const double d = (p.location - focus).norm();
    const auto frame = tools::camera::camera_frame(p);
    const Vec3 before = p.location;
    tools::camera::move(p, focus, "right");
    CHECK((p.location - before - 0.25 * d * frame.right).norm() < 1e-12);
}

TEST_CASE("unit cube viewpoints sit 1.5*sqrt(3) from the centre") {
    scene::Aabb box{Vec3(-0.5, -0.5, -0.5), Vec3(0.5, 0.5, 0.5)};
    const auto views = tools::camera::corner_viewpoints(box);
    for (const auto& v : views) CHECK(std::abs((v.location - box.center()).norm() - 2.598076211353316) < 1e-6);
    // order (+,+), (-,+), (-,-), (+,-), all above the centre
    CHECK(views[0].location.x() > 0);
    CHECK(views[0].location.y() > 0);
    CHECK(views[1].location.x() < 0);
    CHECK(views[1].location.y() > 0);
    CHECK(views[2].location.x() < 0);
    CHECK(views[2].location.y() < 0);
    CHECK(views[3].location.x() > 0);
    CHECK(views[3].location.y() < 0);
    for (const auto& v : views) CHECK(v.location.z() > 0);
}

TEST_CASE("tiny boxes use the 1.0 distance floor") {
    scene::Aabb box{Vec3(0, 0, 0), Vec3(0.01, 0.01, 0.01)};
    for (const auto& v : tools::camera::corner_viewpoints(box))
        CHECK((v.location - box.center()).norm() == doctest::Approx(1.0));
}

TEST_CASE("focus on a unit sphere frames it at 0.75/tan(25deg)") {
    engine::EmbeddedEngine eng;
    REQUIRE(eng.execute_program("add_primitive name=\"s\" shape=\"sphere\"\nadd_camera name=\"c\" location=(0,-5,0)",
                                engine::kLanguageScn)
                .ok());
    tools::VerifierSession session(eng, *eng.state().active_camera_pose(), 8, {64, 64});
    auto r = session.investigate("focus", "", "s");
    CHECK_FALSE(r.error);
    CHECK(r.images.size() == 1);
    CHECK((session.camera().location - Vec3::Zero()).norm() == doctest::Approx(0.75 / std::tan(scene::radians(25))));
    CHECK((session.focus() - Vec3::Zero()).norm() < 1e-9);
    auto missing = session.dispatch(tools::ToolCall{"9", "investigate", {{"operation", "focus"}, {"object_name", "nope"}}, ""});
    CHECK(missing.error);
}

TEST_CASE("100 random scenes: every viewpoint sees the box centre") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> pos(-20, 20), size(0.05, 6);
    std::uniform_int_distribution<int> count(1, 5), shape(0, 3);
    const char* shapes[] = {"cube", "sphere", "cylinder", "cone"};
    for (int s = 0; s < 100; ++s) {
        std::string src;
        const int n = count(rng);
        for (int i = 0; i < n; ++i)
            src += fmt::format("add_primitive name=\"o{}\" shape=\"{}\" location=({},{},{}) scale=({},{},{})\n", i,
                               shapes[shape(rng)], pos(rng), pos(rng), pos(rng) / 4, size(rng), size(rng), size(rng));
        engine::EmbeddedEngine eng;
        REQUIRE(eng.execute_program(src, engine::kLanguageScn).ok());
        const auto box = eng.list_bounds({}, std::nullopt).box;
        for (const auto& v : tools::camera::corner_viewpoints(box)) {
            auto p = scene::project(v, box.center(), 256, 256);
            REQUIRE(p);
            CHECK((*p)[0] == doctest::Approx(128.0));
            CHECK((*p)[1] == doctest::Approx(128.0));
        }
        tools::VerifierSession session(eng, CameraPose{}, 8, {32, 32});
        auto r = session.initialize_viewpoint({});
        CHECK(r.images.size() == 4);
        CHECK((session.focus() - box.center()).norm() < 1e-9);
    }
}

TEST_CASE("session tools report lookup problems in-band and count the budget") {
    engine::EmbeddedEngine eng;
    REQUIRE(eng.execute_program("add_primitive name=\"a\" shape=\"cube\"\nadd_camera name=\"c\" location=(0,-4,1) "
                                "look_at=(0,0,0)",
                                engine::kLanguageScn)
                .ok());
    tools::VerifierSession session(eng, *eng.state().active_camera_pose(), 3, {32, 32});
    auto r = session.dispatch(tools::ToolCall{"1", "initialize_viewpoint", {{"object_names", {"ghost"}}}, ""});
    CHECK(r.error);
    CHECK(r.text.find("ghost") != std::string::npos);
    r = session.dispatch(tools::ToolCall{"2", "set_visibility", {{"show_objects", {"a"}}, {"hide_objects", {"a"}}}, ""});
    CHECK(r.error);
    r = session.dispatch(tools::ToolCall{"3", "set_keyframe", {{"frame_number", 4}}, ""});
    CHECK_FALSE(r.error);
    CHECK(session.remaining() == 0);
}
