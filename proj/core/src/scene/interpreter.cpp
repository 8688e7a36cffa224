#include "sceneloop/scene/interpreter.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <iterator>
#include <set>

#include "sceneloop/util/text.hpp"

namespace sceneloop::scene {

ExecError::ExecError(int line, std::string statement, std::string message)
    : Error(fmt::format("line {}: {}\n  {}", line, message, statement)),
      line_(line), statement_(std::move(statement)), message_(std::move(message)) {}

namespace {

struct Failure {
    std::string message;
};

// Typed access to a statement's arguments with per-verb key checking.
class Args {
public:
    Args(const Statement& st, std::initializer_list<std::string_view> allowed) : st_(st) {
        for (const auto& a : st.args) {
            if (std::find(allowed.begin(), allowed.end(), a.key) == allowed.end()) {
                std::string list;
                for (auto k : allowed) list += (list.empty() ? "" : ", ") + std::string(k);
                throw Failure{fmt::format("unknown argument '{}' for {} (allowed: {})", a.key, st.verb, list)};
            }
        }
    }

    bool has(std::string_view key) const { return st_.find(key) != nullptr; }

    std::string string(std::string_view key) const {
        const Value& v = require(key);
        if (auto* s = std::get_if<std::string>(&v)) return *s;
        throw Failure{fmt::format("argument '{}' must be a quoted string", key)};
    }

    double number(std::string_view key) const {
        const Value& v = require(key);
        if (auto* d = std::get_if<double>(&v)) return *d;
        throw Failure{fmt::format("argument '{}' must be a number", key)};
    }

    bool boolean(std::string_view key) const {
        const Value& v = require(key);
        if (auto* b = std::get_if<bool>(&v)) return *b;
        throw Failure{fmt::format("argument '{}' must be true or false", key)};
    }

    std::vector<double> tuple(std::string_view key, size_t min_len, size_t max_len) const {
        const Value& v = require(key);
        auto* t = std::get_if<std::vector<double>>(&v);
        if (!t || t->size() < min_len || t->size() > max_len) {
            throw Failure{min_len == max_len
                              ? fmt::format("argument '{}' must be a {}-tuple", key, min_len)
                              : fmt::format("argument '{}' must be a tuple of {} to {} numbers", key, min_len, max_len)};
        }
        return *t;
    }

    Vec3 vec3(std::string_view key) const {
        auto t = tuple(key, 3, 3);
        return {t[0], t[1], t[2]};
    }

private:
    const Value& require(std::string_view key) const {
        const Argument* a = st_.find(key);
        if (!a) throw Failure{fmt::format("missing required argument '{}' for {}", key, st_.verb)};
        return a->value;
    }

    const Statement& st_;
};

void check_unit_range(double v, std::string_view what) {
    if (v < 0.0 || v > 1.0) throw Failure{fmt::format("{} must lie in [0, 1] (got {})", what, v)};
}

void check_scale(const Vec3& s) {
    if ((s.array() <= 0.0).any()) throw Failure{"scale components must be > 0"};
}

void apply_material(const Args& args, Material& m) {
    if (args.has("color")) {
        auto c = args.tuple("color", 3, 4);
        for (double ch : c) check_unit_range(ch, "color channel");
        m.base_color = {c[0], c[1], c[2], c.size() == 4 ? c[3] : 1.0};
    }
    if (args.has("roughness")) {
        m.roughness = args.number("roughness");
        check_unit_range(m.roughness, "roughness");
    }
    if (args.has("metallic")) {
        m.metallic = args.number("metallic");
        check_unit_range(m.metallic, "metallic");
    }
    if (args.has("emissive")) {
        m.emissive = args.vec3("emissive");
        if ((m.emissive.array() < 0.0).any()) throw Failure{"emissive channels must be >= 0"};
    }
}

void apply_transform(const Args& args, SceneObject& obj) {
    if (args.has("location")) obj.location = args.vec3("location");
    if (args.has("rotation")) obj.rotation_euler = args.vec3("rotation");
    if (args.has("scale")) {
        obj.scale = args.vec3("scale");
        check_scale(obj.scale);
    }
}

SceneObject& require_object(SceneState& state, const std::string& name) {
    SceneObject* obj = state.find_object(name);
    if (!obj) throw Failure{fmt::format("no object named '{}'", name)};
    return *obj;
}

void require_new_name(const SceneState& state, const std::string& name) {
    if (name.empty()) throw Failure{"name must be non-empty"};
    if (state.find_object(name) || state.find_camera(name)) {
        throw Failure{fmt::format("an object or camera named '{}' already exists", name)};
    }
}

#define SCENE_OBJECT_KEYS "name", "location", "rotation", "scale", "color", "roughness", "metallic", "emissive", "visible"

void exec_add_primitive(SceneState& state, const Statement& st) {
    Args args(st, {SCENE_OBJECT_KEYS, "shape"});
    SceneObject obj;
    obj.name = args.string("name");
    require_new_name(state, obj.name);
    const std::string shape = args.string("shape");
    if (!primitive_from_string(shape, obj.shape.kind)) {
        throw Failure{fmt::format("unknown shape '{}' (expected cube, sphere, cylinder, cone, plane)", shape)};
    }
    apply_transform(args, obj);
    apply_material(args, obj.material);
    if (args.has("visible")) obj.visible = args.boolean("visible");
    state.add_object(std::move(obj));
}

void exec_add_mesh(SceneState& state, const Statement& st, const ExecOptions& options) {
    Args args(st, {SCENE_OBJECT_KEYS, "path"});
    SceneObject obj;
    obj.name = args.string("name");
    require_new_name(state, obj.name);
    obj.shape.kind = ShapeKind::mesh;
    obj.shape.mesh_path = args.string("path");
    std::filesystem::path path(obj.shape.mesh_path);
    if (path.is_relative()) path = options.asset_root / path;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Failure{fmt::format("cannot open mesh file '{}'", path.string())};
    const std::string contents((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        auto mesh = std::make_shared<Mesh>(parse_obj(contents));
        if (mesh->triangles.empty()) throw Failure{fmt::format("mesh '{}' has no faces", path.string())};
        obj.shape.mesh = std::move(mesh);
    } catch (const ObjParseError& e) {
        throw Failure{fmt::format("{}: {}", path.string(), e.what())};
    }
    apply_transform(args, obj);
    apply_material(args, obj.material);
    if (args.has("visible")) obj.visible = args.boolean("visible");
    state.add_object(std::move(obj));
}

void exec_add_light(SceneState& state, const Statement& st) {
    Args args(st, {"name", "kind", "color", "energy", "location", "direction"});
    Light light;
    if (args.has("name")) light.name = args.string("name");
    const std::string kind = args.has("kind") ? args.string("kind") : "point";
    if (kind == "point") {
        light.kind = LightKind::point;
        if (args.has("direction")) throw Failure{"point lights take 'location', not 'direction'"};
        if (args.has("location")) light.location = args.vec3("location");
    } else if (kind == "sun") {
        light.kind = LightKind::sun;
        if (args.has("location")) throw Failure{"sun lights take 'direction', not 'location'"};
        if (args.has("direction")) {
            Vec3 d = args.vec3("direction");
            if (d.norm() < 1e-12) throw Failure{"sun direction must be non-zero"};
            light.direction = d.normalized();
        }
    } else {
        throw Failure{fmt::format("unknown light kind '{}' (expected point or sun)", kind)};
    }
    if (args.has("color")) {
        light.color = args.vec3("color");
        for (int i = 0; i < 3; ++i) check_unit_range(light.color[i], "light color channel");
    }
    if (args.has("energy")) {
        light.energy = args.number("energy");
        if (light.energy < 0) throw Failure{"energy must be >= 0"};
    }
    state.lights().push_back(std::move(light));
}

void exec_add_camera(SceneState& state, const Statement& st) {
    Args args(st, {"name", "location", "rotation", "look_at", "fov_y"});
    const std::string name = args.string("name");
    require_new_name(state, name);
    CameraPose pose;
    if (args.has("location")) pose.location = args.vec3("location");
    if (args.has("rotation") && args.has("look_at")) throw Failure{"give either 'rotation' or 'look_at', not both"};
    if (args.has("rotation")) pose.rotation_euler = args.vec3("rotation");
    if (args.has("look_at")) pose.rotation_euler = look_at_euler(pose.location, args.vec3("look_at"));
    if (args.has("fov_y")) pose.fov_y = args.number("fov_y");
    if (!(pose.fov_y > 0.0 && pose.fov_y < kPi)) throw Failure{"fov_y must lie strictly inside (0, pi) radians"};
    const bool first = state.cameras().empty();
    state.add_camera(name, pose);
    if (first && !state.active_camera()) state.set_active_camera(name);
}

void exec_set_active_camera(SceneState& state, const Statement& st) {
    Args args(st, {"name"});
    const std::string name = args.string("name");
    if (!state.find_camera(name)) throw Failure{fmt::format("no camera named '{}'", name)};
    state.set_active_camera(name);
}

void exec_set_material(SceneState& state, const Statement& st) {
    Args args(st, {"name", "color", "roughness", "metallic", "emissive"});
    apply_material(args, require_object(state, args.string("name")).material);
}

void exec_set_transform(SceneState& state, const Statement& st) {
    Args args(st, {"name", "location", "rotation", "scale"});
    const std::string name = args.string("name");
    if (SceneObject* obj = state.find_object(name)) {
        apply_transform(args, *obj);
        return;
    }
    if (CameraPose* cam = state.find_camera(name)) {
        if (args.has("scale")) throw Failure{"cameras have no scale"};
        if (args.has("location")) cam->location = args.vec3("location");
        if (args.has("rotation")) cam->rotation_euler = args.vec3("rotation");
        return;
    }
    throw Failure{fmt::format("no object or camera named '{}'", name)};
}

void exec_set_visibility(SceneState& state, const Statement& st) {
    Args args(st, {"name", "visible"});
    require_object(state, args.string("name")).visible = args.boolean("visible");
}

void insert_sample(std::vector<KeyframeSample>& tracks, KeyframeSample sample) {
    auto key = [](const KeyframeSample& k) { return std::pair(static_cast<int>(k.channel), k.frame); };
    auto it = std::lower_bound(tracks.begin(), tracks.end(), sample,
                               [&](const KeyframeSample& a, const KeyframeSample& b) { return key(a) < key(b); });
    if (it != tracks.end() && key(*it) == key(sample)) {
        it->value = sample.value;
    } else {
        tracks.insert(it, sample);
    }
}

void exec_set_keyframe(SceneState& state, const Statement& st) {
    Args args(st, {"name", "frame", "location", "rotation", "scale"});
    SceneObject& obj = require_object(state, args.string("name"));
    const double frame = args.number("frame");
    if (frame < 0 || std::floor(frame) != frame) throw Failure{"frame must be a non-negative integer"};
    if (!args.has("location") && !args.has("rotation") && !args.has("scale")) {
        throw Failure{"set_keyframe needs at least one of location, rotation, scale"};
    }
    const int f = static_cast<int>(frame);
    if (args.has("location")) insert_sample(obj.tracks, {f, Channel::location, args.vec3("location")});
    if (args.has("rotation")) insert_sample(obj.tracks, {f, Channel::rotation_euler, args.vec3("rotation")});
    if (args.has("scale")) {
        Vec3 s = args.vec3("scale");
        check_scale(s);
        insert_sample(obj.tracks, {f, Channel::scale, s});
    }
}

void exec_set_background(SceneState& state, const Statement& st) {
    Args args(st, {"color", "ambient"});
    if (args.has("color")) {
        Vec3 c = args.vec3("color");
        for (int i = 0; i < 3; ++i) check_unit_range(c[i], "background color channel");
        state.background = c;
    }
    if (args.has("ambient")) {
        state.ambient = args.number("ambient");
        check_unit_range(state.ambient, "ambient");
    }
}

void exec_delete(SceneState& state, const Statement& st) {
    Args args(st, {"name"});
    const std::string name = args.string("name");
    if (state.remove_object(name) || state.remove_camera(name)) return;
    auto& lights = state.lights();
    auto it = std::find_if(lights.begin(), lights.end(), [&](const Light& l) { return !l.name.empty() && l.name == name; });
    if (it != lights.end()) {
        lights.erase(it);
        return;
    }
    throw Failure{fmt::format("no object, camera, or light named '{}'", name)};
}

} // namespace

SceneState execute_program(const Program& program, const ExecOptions& options) {
    SceneState state;
    for (const Statement& st : program.statements) {
        try {
            const std::string& v = st.verb;
            if (v == "add_primitive") exec_add_primitive(state, st);
            else if (v == "add_mesh") exec_add_mesh(state, st, options);
            else if (v == "add_light") exec_add_light(state, st);
            else if (v == "add_camera") exec_add_camera(state, st);
            else if (v == "set_active_camera") exec_set_active_camera(state, st);
            else if (v == "set_material") exec_set_material(state, st);
            else if (v == "set_transform") exec_set_transform(state, st);
            else if (v == "set_visibility") exec_set_visibility(state, st);
            else if (v == "set_keyframe") exec_set_keyframe(state, st);
            else if (v == "set_background") exec_set_background(state, st);
            else if (v == "delete") exec_delete(state, st);
            else throw Failure{fmt::format("unknown verb '{}'", v)};
        } catch (const Failure& f) {
            throw ExecError(st.line, st.text.empty() ? format_statement(st) : st.text, f.message);
        }
    }
    return state;
}

SceneState execute_source(std::string_view source, const ExecOptions& options) {
    Program program;
    try {
        program = parse_program(source);
    } catch (const ParseError& e) {
        const auto lines = text::split_lines(source);
        const std::string stmt = e.line() >= 1 && e.line() <= static_cast<int>(lines.size()) ? lines[e.line() - 1] : "";
        throw ExecError(e.line(), stmt, fmt::format("syntax error at column {}: expected {}", e.column(), e.expected()));
    }
    return execute_program(program, options);
}

} // namespace sceneloop::scene
