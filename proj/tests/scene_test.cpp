#include <doctest.h>

#include "sceneloop/scene/animation.hpp"
#include "sceneloop/scene/bounds.hpp"
#include "sceneloop/scene/interpreter.hpp"
#include "sceneloop/scene/mesh.hpp"
#include "sceneloop/scene/scene_info.hpp"
#include "support.hpp"

#include <fstream>

using namespace sceneloop::scene;

namespace {

void check_vec(const Vec3& a, const Vec3& b, double tol = 1e-9) {
    CHECK(a.x() == doctest::Approx(b.x()).epsilon(tol));
    CHECK(a.y() == doctest::Approx(b.y()).epsilon(tol));
    CHECK(a.z() == doctest::Approx(b.z()).epsilon(tol));
}

int failing_line(const std::string& src) {
    try {
        execute_source(src);
    } catch (const ExecError& e) {
        return e.line();
    }
    return 0;
}

} // namespace

TEST_CASE("unit cube at origin has half-extent 0.5") {
    auto s = execute_source("add_primitive name=\"c\" shape=\"cube\"");
    const std::string names[] = {"c"};
    auto box = aabb_of(s, names, 0);
    check_vec(box.min, Vec3(-0.5, -0.5, -0.5));
    check_vec(box.max, Vec3(0.5, 0.5, 0.5));
}

TEST_CASE("scale and location move the box") {
    auto s = execute_source("add_primitive name=\"c\" shape=\"cube\" location=(1,2,3) scale=(2,4,6)");
    auto b = object_bounds(*s.find_object("c"));
    check_vec(b.box.min, Vec3(0, 0, 0));
    check_vec(b.box.max, Vec3(2, 4, 6));
    CHECK(b.radius == doctest::Approx(std::sqrt(1.0 + 4 + 9)));
}

TEST_CASE("rotating a cube by 45 degrees about Z widens its box to sqrt(2)/2") {
    auto s = execute_source("add_primitive name=\"c\" shape=\"cube\" rotation=(0,0,0.7853981633974483)");
    auto b = object_bounds(*s.find_object("c"));
    CHECK(b.box.max.x() == doctest::Approx(std::sqrt(0.5)));
    CHECK(b.box.max.z() == doctest::Approx(0.5));
}

TEST_CASE("execution errors carry the statement line") {
    CHECK(failing_line("add_primitive name=\"a\" shape=\"cube\"\nadd_primitive name=\"a\" shape=\"cube\"") == 2);
    CHECK(failing_line("add_primitive name=\"a\" shape=\"cube\"\n\nset_material name=\"zzz\" color=(1,0,0)") == 3);
    CHECK(failing_line("add_primitive name=\"a\" shape=\"teapot\"") == 1);
    CHECK(failing_line("add_primitive name=\"a\" shape=\"cube\" color=(2,0,0)") == 1);
    CHECK(failing_line("add_camera name=\"c\" fov_y=4") == 1);
    CHECK(failing_line("add_primitive name=\"a\" shape=\"cube\" wobble=3") == 1);
    CHECK(failing_line("set_keyframe name=\"x\" frame=1 location=(0,0,0)") == 1);
    // parse errors are reported the same way
    CHECK(failing_line("add_camera name=\"c\"\nadd_light name=") == 2);
}

TEST_CASE("first camera becomes active, set_active_camera switches") {
    auto s = execute_source("add_camera name=\"a\" location=(0,0,5)\nadd_camera name=\"b\" location=(1,0,5)");
    REQUIRE(s.active_camera());
    CHECK(*s.active_camera() == "a");
    s = execute_source("add_camera name=\"a\"\nadd_camera name=\"b\"\nset_active_camera name=\"b\"");
    CHECK(*s.active_camera() == "b");
    s = execute_source("add_primitive name=\"a\" shape=\"cube\"");
    CHECK_FALSE(s.active_camera());
}

TEST_CASE("delete removes objects and cameras") {
    auto s = execute_source("add_primitive name=\"a\" shape=\"cube\"\nadd_camera name=\"c\"\ndelete name=\"a\"\ndelete name=\"c\"");
    CHECK(s.objects().empty());
    CHECK(s.cameras().empty());
    CHECK_FALSE(s.active_camera());
}

TEST_CASE("look_at aims the camera's -Z axis at the target") {
    const Vec3 eye(3, -4, 2), target(0.5, 1, 0);
    Mat3 r = rotation_matrix(look_at_euler(eye, target));
    Vec3 forward = -r.col(2);
    check_vec(forward, (target - eye).normalized(), 1e-12);
    // camera right stays horizontal with world +Z up
    CHECK(std::abs(r.col(0).z()) < 1e-12);
    CHECK(r.col(1).z() > 0);
}

TEST_CASE("euler round trip") {
    const Vec3 e(0.3, -0.7, 1.9);
    check_vec(euler_from_matrix(rotation_matrix(e)), e, 1e-12);
}

TEST_CASE("keyframes interpolate linearly and hold at the ends") {
    auto s = execute_source(
        "add_primitive name=\"a\" shape=\"cube\"\n"
        "set_keyframe name=\"a\" frame=0 location=(0,0,0)\n"
        "set_keyframe name=\"a\" frame=10 location=(10,0,0)\n");
    check_vec(evaluate_at_frame(s, 5).find_object("a")->location, Vec3(5, 0, 0));
    check_vec(evaluate_at_frame(s, 25).find_object("a")->location, Vec3(10, 0, 0));
    check_vec(evaluate_at_frame(s, -3).find_object("a")->location, Vec3(0, 0, 0));
    auto range = keyframe_range(s);
    REQUIRE(range);
    CHECK(range->first == 0);
    CHECK(range->second == 10);
    const std::string names[] = {"a"};
    CHECK(aabb_of(s, names, 4).center().x() == doctest::Approx(4.0));
}

TEST_CASE("obj import: triangles and quads, negative indices") {
    auto m = parse_obj("# quad\nv 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\nf -4 -3 -2\n");
    CHECK(m.vertices.size() == 4);
    CHECK(m.triangles.size() == 3);
    CHECK_THROWS_AS(parse_obj("v 0 0 0\nf 1 2 9\n"), ObjParseError);
}

TEST_CASE("add_mesh resolves relative paths against the asset root") {
    testing::TempDir dir("mesh");
    {
        std::ofstream out(dir / "tri.obj");
        out << "v 0 0 0\nv 2 0 0\nv 0 2 0\nf 1 2 3\n";
    }
    auto s = execute_source("add_mesh name=\"t\" path=\"tri.obj\" location=(0,0,1)", ExecOptions{dir.path()});
    auto b = object_bounds(*s.find_object("t"));
    check_vec(b.box.max, Vec3(2, 2, 1));
    CHECK_THROWS_AS(execute_source("add_mesh name=\"t\" path=\"nope.obj\"", ExecOptions{dir.path()}), ExecError);
}

TEST_CASE("scene info lists every object, light and camera") {
    auto s = execute_source(testing::kBasicScene);
    const std::string info = format_scene_info(s);
    for (const char* name : {"floor", "box", "ball", "sun", "Camera"}) CHECK(info.find(name) != std::string::npos);
    CHECK(format_scene_info(s) == info);
}
