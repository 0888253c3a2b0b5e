#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "swarmbt/sar.hpp"

namespace swarmbt {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
    throw ConfigError(path + ": " + message);
}

void expect_keys(const json& obj, const std::string& path, const std::set<std::string>& known) {
    for (const auto& [key, _] : obj.items()) {
        if (!known.count(key)) {
            fail(path + "." + key, "unknown key");
        }
    }
}

double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) {
        fail(path, "expected a number");
    }
    return v.get<double>();
}

std::int64_t as_int(const json& v, const std::string& path) {
    if (!v.is_number_integer()) {
        fail(path, "expected an integer");
    }
    return v.get<std::int64_t>();
}

bool as_bool(const json& v, const std::string& path) {
    if (!v.is_boolean()) {
        fail(path, "expected a boolean");
    }
    return v.get<bool>();
}

std::string as_string(const json& v, const std::string& path) {
    if (!v.is_string()) {
        fail(path, "expected a string");
    }
    return v.get<std::string>();
}

Color as_color(const json& v, const std::string& path) {
    const std::string text = as_string(v, path);
    if (auto color = color_from_string(text)) {
        return *color;
    }
    fail(path, "unknown color '" + text + "'");
}

WorldConfig parse_config(const json& doc) {
    if (!doc.is_object()) {
        fail("$", "config must be a JSON object");
    }
    expect_keys(doc, "$",
                {"arena", "targets", "zone_radius", "comm_range", "roster", "t_m",
                 "buffer_capacity", "iterations", "seed", "speed", "sensor_radius", "ray_range",
                 "obstacles", "query_wait", "query_cooldown", "freeze_while_querying", "script",
                 "trace"});

    WorldConfig cfg;

    if (doc.contains("arena")) {
        const json& arena = doc["arena"];
        if (!arena.is_array() || arena.size() != 2) {
            fail("$.arena", "expected [x, y]");
        }
        cfg.arena_x = as_number(arena[0], "$.arena[0]");
        cfg.arena_y = as_number(arena[1], "$.arena[1]");
        if (cfg.arena_x <= 0 || cfg.arena_y <= 0) {
            fail("$.arena", "dimensions must be positive");
        }
    }

    if (doc.contains("targets")) {
        const json& targets = doc["targets"];
        if (!targets.is_array() || targets.size() != 4) {
            fail("$.targets", "expected [red, green, yellow, blue] counts");
        }
        for (std::size_t i = 0; i < 4; ++i) {
            const std::string path = "$.targets[" + std::to_string(i) + "]";
            const std::int64_t count = as_int(targets[i], path);
            if (count < 0) {
                fail(path, "count must be >= 0");
            }
            cfg.target_counts[i] = static_cast<int>(count);
        }
    }

    if (!doc.contains("roster")) {
        fail("$.roster", "missing required key");
    }
    const json& roster = doc["roster"];
    if (!roster.is_array() || roster.empty()) {
        fail("$.roster", "expected a non-empty array of groups");
    }
    for (std::size_t i = 0; i < roster.size(); ++i) {
        const std::string path = "$.roster[" + std::to_string(i) + "]";
        const json& group = roster[i];
        if (!group.is_object()) {
            fail(path, "expected an object");
        }
        expect_keys(group, path, {"modality", "prior", "count"});
        RosterGroup out;
        const std::string modality = as_string(group.value("modality", json("QRU")), path + ".modality");
        if (auto kind = modality_from_string(modality)) {
            out.modality = *kind;
        } else {
            fail(path + ".modality", "unknown modality '" + modality + "'");
        }
        const std::string prior = as_string(group.value("prior", json("I")), path + ".prior");
        if (auto cls = prior_from_string(prior)) {
            out.prior = *cls;
        } else {
            fail(path + ".prior", "unknown prior-knowledge class '" + prior + "'");
        }
        const std::int64_t count = as_int(group.value("count", json(1)), path + ".count");
        if (count < 1) {
            fail(path + ".count", "count must be >= 1");
        }
        out.count = static_cast<int>(count);
        cfg.roster.push_back(out);
    }

    if (doc.contains("zone_radius")) {
        cfg.zone_radius = as_number(doc["zone_radius"], "$.zone_radius");
        if (cfg.zone_radius < 0) {
            fail("$.zone_radius", "must be >= 0");
        }
    }
    if (doc.contains("comm_range")) {
        cfg.comm_range = as_number(doc["comm_range"], "$.comm_range");
        if (cfg.comm_range < 0) {
            fail("$.comm_range", "must be >= 0");
        }
    }
    if (doc.contains("t_m")) {
        cfg.buffer_duration = as_int(doc["t_m"], "$.t_m");
        if (cfg.buffer_duration < 1) {
            fail("$.t_m", "must be >= 1");
        }
    }
    if (doc.contains("buffer_capacity")) {
        const json& cap = doc["buffer_capacity"];
        if (!cap.is_null()) {
            const std::int64_t value = as_int(cap, "$.buffer_capacity");
            if (value < 1) {
                fail("$.buffer_capacity", "must be >= 1 or null");
            }
            cfg.buffer_capacity = static_cast<std::size_t>(value);
        }
    }
    if (doc.contains("iterations")) {
        cfg.iterations = as_int(doc["iterations"], "$.iterations");
        if (cfg.iterations < 0) {
            fail("$.iterations", "must be >= 0");
        }
    }
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_integer()) {
            fail("$.seed", "expected an integer");
        }
        cfg.seed = doc["seed"].get<std::uint64_t>();
    }
    if (doc.contains("speed")) {
        cfg.speed = as_number(doc["speed"], "$.speed");
        if (cfg.speed < 0) {
            fail("$.speed", "must be >= 0");
        }
    }
    if (doc.contains("sensor_radius")) {
        cfg.sensor_radius = as_number(doc["sensor_radius"], "$.sensor_radius");
        if (cfg.sensor_radius < 0) {
            fail("$.sensor_radius", "must be >= 0");
        }
    }
    if (doc.contains("ray_range")) {
        cfg.ray_range = as_number(doc["ray_range"], "$.ray_range");
        if (cfg.ray_range < 0) {
            fail("$.ray_range", "must be >= 0");
        }
    }
    if (doc.contains("obstacles")) {
        const json& obstacles = doc["obstacles"];
        if (!obstacles.is_array()) {
            fail("$.obstacles", "expected an array");
        }
        for (std::size_t i = 0; i < obstacles.size(); ++i) {
            const std::string path = "$.obstacles[" + std::to_string(i) + "]";
            const json& entry = obstacles[i];
            if (!entry.is_object()) {
                fail(path, "expected an object");
            }
            expect_keys(entry, path, {"x", "y", "radius"});
            Obstacle obstacle;
            obstacle.pos.x = as_number(entry.value("x", json(0.0)), path + ".x");
            obstacle.pos.y = as_number(entry.value("y", json(0.0)), path + ".y");
            obstacle.radius = as_number(entry.value("radius", json(0.0)), path + ".radius");
            if (obstacle.radius <= 0) {
                fail(path + ".radius", "must be > 0");
            }
            cfg.obstacles.push_back(obstacle);
        }
    }
    if (doc.contains("query_wait")) {
        cfg.query_wait = as_int(doc["query_wait"], "$.query_wait");
        if (cfg.query_wait < 0) {
            fail("$.query_wait", "must be >= 0");
        }
    }
    if (doc.contains("query_cooldown")) {
        cfg.query_cooldown = as_int(doc["query_cooldown"], "$.query_cooldown");
        if (cfg.query_cooldown < 0) {
            fail("$.query_cooldown", "must be >= 0");
        }
    }
    if (doc.contains("freeze_while_querying")) {
        cfg.freeze_while_querying = as_bool(doc["freeze_while_querying"], "$.freeze_while_querying");
    }
    if (doc.contains("script")) {
        const json& script = doc["script"];
        if (!script.is_array()) {
            fail("$.script", "expected an array");
        }
        for (std::size_t i = 0; i < script.size(); ++i) {
            const std::string path = "$.script[" + std::to_string(i) + "]";
            const json& entry = script[i];
            if (!entry.is_object()) {
                fail(path, "expected an object");
            }
            expect_keys(entry, path, {"iter", "robot", "color"});
            ScriptedPercept percept;
            percept.iter = as_int(entry.value("iter", json(0)), path + ".iter");
            percept.robot = static_cast<int>(as_int(entry.value("robot", json(0)), path + ".robot"));
            percept.color = as_color(entry.value("color", json("red")), path + ".color");
            if (percept.iter < 0 || percept.robot < 0) {
                fail(path, "iter and robot must be >= 0");
            }
            cfg.script.push_back(percept);
        }
    }
    if (doc.contains("trace")) {
        cfg.trace = as_bool(doc["trace"], "$.trace");
    }

    const int robots = cfg.total_robots();
    for (const ScriptedPercept& percept : cfg.script) {
        if (percept.robot >= robots) {
            fail("$.script", "robot index " + std::to_string(percept.robot) + " out of range");
        }
    }
    return cfg;
}

}  // namespace

int WorldConfig::total_targets() const {
    int total = 0;
    for (int count : target_counts) {
        total += count;
    }
    return total;
}

int WorldConfig::total_robots() const {
    int total = 0;
    for (const RosterGroup& group : roster) {
        total += group.count;
    }
    return total;
}

WorldConfig world_config_from_json_text(const std::string& text, std::string* echo) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    WorldConfig cfg = parse_config(doc);
    if (echo) {
        *echo = world_config_to_json_text(cfg);
    }
    return cfg;
}

WorldConfig load_world_config(const std::string& path, std::string* echo) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file: " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return world_config_from_json_text(buffer.str(), echo);
}

std::string world_config_to_json_text(const WorldConfig& cfg) {
    ordered_json doc;
    doc["arena"] = {cfg.arena_x, cfg.arena_y};
    doc["targets"] = cfg.target_counts;
    doc["zone_radius"] = cfg.zone_radius;
    doc["comm_range"] = cfg.comm_range;
    doc["roster"] = ordered_json::array();
    for (const RosterGroup& group : cfg.roster) {
        doc["roster"].push_back({{"modality", to_string(group.modality)},
                                 {"prior", to_string(group.prior)},
                                 {"count", group.count}});
    }
    doc["t_m"] = cfg.buffer_duration;
    if (cfg.buffer_capacity) {
        doc["buffer_capacity"] = *cfg.buffer_capacity;
    } else {
        doc["buffer_capacity"] = nullptr;
    }
    doc["iterations"] = cfg.iterations;
    doc["seed"] = cfg.seed;
    doc["speed"] = cfg.speed;
    doc["sensor_radius"] = cfg.sensor_radius;
    doc["ray_range"] = cfg.ray_range;
    doc["obstacles"] = ordered_json::array();
    for (const Obstacle& obstacle : cfg.obstacles) {
        doc["obstacles"].push_back(
            {{"x", obstacle.pos.x}, {"y", obstacle.pos.y}, {"radius", obstacle.radius}});
    }
    doc["query_wait"] = cfg.query_wait;
    doc["query_cooldown"] = cfg.query_cooldown;
    doc["freeze_while_querying"] = cfg.freeze_while_querying;
    doc["script"] = ordered_json::array();
    for (const ScriptedPercept& percept : cfg.script) {
        doc["script"].push_back(
            {{"iter", percept.iter}, {"robot", percept.robot}, {"color", to_string(percept.color)}});
    }
    doc["trace"] = cfg.trace;
    return doc.dump(2);
}

}  // namespace swarmbt
