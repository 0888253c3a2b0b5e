#include "swarmbt/sar.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "json.hpp"

namespace swarmbt {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kWalkJitterDeg = 15.0;
constexpr int kPlacementRetries = 1000;

// Blackboard keys written by the sense phase and read by the registries.
constexpr const char* kKeyPosition = "position";
constexpr const char* kKeyHeading = "heading";
constexpr const char* kKeyRays = "rays";
constexpr const char* kKeyTargetColor = "target_color";
constexpr const char* kKeyTargetRel = "target_rel";
constexpr const char* kKeyTargetId = "target_id";
constexpr const char* kKeyZone = "zone";
constexpr const char* kKeyCarrying = "carrying";
constexpr const char* kKeyCarryingId = "carrying_id";
constexpr const char* kKeyIntent = "intent";
constexpr const char* kKeyPickupRequest = "pickup_request";
constexpr const char* kKeyDropRequest = "drop_request";

Vec2 ray_direction(int index) {
    const double angle = kPi / 4.0 * index;
    return Vec2{std::cos(angle), std::sin(angle)};
}

double norm(Vec2 v) { return std::sqrt(v.x * v.x + v.y * v.y); }

Vec2 normalized(Vec2 v) {
    const double len = norm(v);
    if (len < 1e-12) {
        return Vec2{0.0, 0.0};
    }
    return Vec2{v.x / len, v.y / len};
}

double distance(Vec2 a, Vec2 b) { return norm(Vec2{a.x - b.x, a.y - b.y}); }

bool segment_hits_disc(Vec2 start, Vec2 dir, double length, Vec2 center, double radius) {
    const Vec2 to_center{center.x - start.x, center.y - start.y};
    double t = (to_center.x * dir.x + to_center.y * dir.y);
    t = std::clamp(t, 0.0, length);
    const Vec2 closest{start.x + dir.x * t, start.y + dir.y * t};
    return distance(closest, center) <= radius;
}

Color color_at(std::size_t index) { return kColors[index]; }

void init_blackboard(Blackboard& bb) {
    bb.set(kKeyPosition, Vec2{});
    bb.set(kKeyHeading, 0.0);
    bb.set(kKeyRays, std::int64_t{0});
    bb.set(kKeyTargetColor, std::string("none"));
    bb.set(kKeyTargetRel, Vec2{});
    bb.set(kKeyTargetId, std::int64_t{-1});
    bb.set(kKeyZone, std::string("none"));
    bb.set(kKeyCarrying, std::string("none"));
    bb.set(kKeyCarryingId, std::int64_t{-1});
    bb.set(kKeyIntent, Vec2{});
    bb.set(kKeyPickupRequest, std::int64_t{-1});
    bb.set(kKeyDropRequest, false);
    init_modality_keys(bb);
}

Color require_color_param(const std::vector<std::string>& params, const char* who) {
    if (params.empty()) {
        throw ConfigError(std::string(who) + " requires a color parameter");
    }
    if (auto color = color_from_string(params.front())) {
        return *color;
    }
    throw ConfigError(std::string(who) + ": unknown color '" + params.front() + "'");
}

std::optional<ConditionSequence> salient_percept(const Blackboard& bb) {
    if (bb.get_string(kKeyCarrying) != "none") {
        return std::nullopt;
    }
    const std::string& color = bb.get_string(kKeyTargetColor);
    if (color == "none") {
        return std::nullopt;
    }
    return ConditionSequence{{ConditionSpec{"target_in_range", {color}}}};
}

BtNode critical_segment() {
    return make_sequence({make_condition("collision_danger"), make_action("evade")},
                         kSegmentCritical);
}

std::vector<BtNode> fallback_segment() {
    return {make_action("run_transient"), make_action("random_walk")};
}

}  // namespace

const char* to_string(Color color) {
    switch (color) {
        case Color::Red: return "red";
        case Color::Green: return "green";
        case Color::Yellow: return "yellow";
        case Color::Blue: return "blue";
    }
    return "?";
}

std::optional<Color> color_from_string(const std::string& text) {
    if (text == "red") return Color::Red;
    if (text == "green") return Color::Green;
    if (text == "yellow") return Color::Yellow;
    if (text == "blue") return Color::Blue;
    return std::nullopt;
}

const char* to_string(PriorClass prior) {
    switch (prior) {
        case PriorClass::I: return "I";
        case PriorClass::M: return "M";
        case PriorClass::R: return "R";
        case PriorClass::G: return "G";
        case PriorClass::Y: return "Y";
        case PriorClass::B: return "B";
    }
    return "?";
}

std::optional<PriorClass> prior_from_string(const std::string& text) {
    if (text == "I") return PriorClass::I;
    if (text == "M") return PriorClass::M;
    if (text == "R") return PriorClass::R;
    if (text == "G") return PriorClass::G;
    if (text == "Y") return PriorClass::Y;
    if (text == "B") return PriorClass::B;
    return std::nullopt;
}

std::vector<Color> prior_colors(PriorClass prior) {
    switch (prior) {
        case PriorClass::I: return {};
        case PriorClass::M: return {Color::Red, Color::Green, Color::Yellow, Color::Blue};
        case PriorClass::R: return {Color::Red};
        case PriorClass::G: return {Color::Green};
        case PriorClass::Y: return {Color::Yellow};
        case PriorClass::B: return {Color::Blue};
    }
    return {};
}

ConditionSequence knowledge_sequence(Color color) {
    return ConditionSequence{{ConditionSpec{"target_in_range", {to_string(color)}}}};
}

BtNode knowledge_action(Color color) {
    const std::string name = to_string(color);
    return make_selector({
        make_sequence({make_condition("carrying", {name}), make_action("goto_zone", {name}),
                       make_action("drop_target")}),
        make_action("pick_target", {name}),
    });
}

int knowledge_level(const KnowledgeBase& kb) {
    std::set<std::string> colors;
    for (const ConditionSequence& seq : kb.known_sequences) {
        for (const ConditionSpec& spec : seq.items) {
            for (const std::string& param : spec.params) {
                if (color_from_string(param)) {
                    colors.insert(param);
                }
            }
        }
    }
    return static_cast<int>(colors.size());
}

Robot::Robot(int id, ModalityKind modality, PriorClass prior, const ModalityConfig& mcfg,
             PerceptFn percept, std::uint64_t rng_seed)
    : id(id),
      prior(prior),
      agent(id, modality, mcfg, &registry, std::move(percept)),
      rng(rng_seed) {
    init_blackboard(bb);
}

const char* motion_state(const Robot& robot) {
    if (robot.bb.get_bool(kKeyWaiting)) {
        return "query-wait";
    }
    if (robot.carrying >= 0) {
        return "carry";
    }
    if (robot.agent.has_transient()) {
        return "transient-action";
    }
    return "random-walk";
}

void sense(Robot& robot, const WorldState& world) {
    const WorldConfig& cfg = world.config();
    Blackboard& bb = robot.bb;

    bb.set(kKeyPosition, robot.pos);

    // Collision rays: arena walls and obstacle discs.
    std::int64_t rays = 0;
    for (int i = 0; i < 8; ++i) {
        const Vec2 dir = ray_direction(i);
        const Vec2 end{robot.pos.x + dir.x * cfg.ray_range, robot.pos.y + dir.y * cfg.ray_range};
        bool hit = end.x < 0.0 || end.x > cfg.arena_x || end.y < 0.0 || end.y > cfg.arena_y;
        if (!hit) {
            for (const Obstacle& obstacle : cfg.obstacles) {
                if (segment_hits_disc(robot.pos, dir, cfg.ray_range, obstacle.pos, obstacle.radius)) {
                    hit = true;
                    break;
                }
            }
        }
        if (hit) {
            rays |= (std::int64_t{1} << i);
        }
    }
    bb.set(kKeyRays, rays);

    // Nearest detectable target: free ones in sensor range, or the carried
    // one at distance zero.
    int best_id = -1;
    double best_dist = 0.0;
    if (robot.carrying >= 0) {
        best_id = robot.carrying;
    } else {
        for (const Target& target : world.targets()) {
            if (target.status != Target::Status::Free) {
                continue;
            }
            const double d = distance(robot.pos, target.pos);
            if (d > cfg.sensor_radius) {
                continue;
            }
            if (best_id < 0 || d < best_dist) {
                best_dist = d;
                best_id = target.id;
            }
        }
    }
    if (best_id >= 0) {
        const Target& target = world.targets()[static_cast<std::size_t>(best_id)];
        bb.set(kKeyTargetColor, std::string(to_string(target.color)));
        bb.set(kKeyTargetRel, Vec2{target.pos.x - robot.pos.x, target.pos.y - robot.pos.y});
        bb.set(kKeyTargetId, std::int64_t{best_id});
    } else {
        bb.set(kKeyTargetColor, std::string("none"));
        bb.set(kKeyTargetRel, Vec2{});
        bb.set(kKeyTargetId, std::int64_t{-1});
    }

    if (auto zone = world.zone_at(robot.pos)) {
        bb.set(kKeyZone, std::string(to_string(*zone)));
    } else {
        bb.set(kKeyZone, std::string("none"));
    }

    if (robot.carrying >= 0) {
        const Target& target = world.targets()[static_cast<std::size_t>(robot.carrying)];
        bb.set(kKeyCarrying, std::string(to_string(target.color)));
        bb.set(kKeyCarryingId, std::int64_t{robot.carrying});
    } else {
        bb.set(kKeyCarrying, std::string("none"));
        bb.set(kKeyCarryingId, std::int64_t{-1});
    }

    // Scripted percepts override the target sensor for protocol scenarios.
    for (const ScriptedPercept& percept : cfg.script) {
        if (percept.iter == world.iteration() && percept.robot == robot.id) {
            bb.set(kKeyTargetColor, std::string(to_string(percept.color)));
            bb.set(kKeyTargetRel, Vec2{});
            bb.set(kKeyTargetId, std::int64_t{-1});
        }
    }
}

Vec2 repulsion_vector(const Robot& robot) {
    const std::int64_t rays = robot.bb.get_int(kKeyRays);
    Vec2 sum{};
    for (int i = 0; i < 8; ++i) {
        if (rays & (std::int64_t{1} << i)) {
            const Vec2 dir = ray_direction(i);
            sum.x += dir.x;
            sum.y += dir.y;
        }
    }
    return normalized(Vec2{-sum.x, -sum.y});
}

WorldState::WorldState(WorldConfig cfg)
    : cfg_(std::move(cfg)), medium_(cfg_.comm_range), ledger_(cfg_.total_robots()) {
    if (cfg_.roster.empty() || cfg_.total_robots() < 1) {
        throw ConfigError("roster must contain at least one robot");
    }

    RandomStream placement(mix_seed(cfg_.seed, 0));

    auto inside_zone = [this](Vec2 pos) { return zone_at(pos).has_value(); };
    auto inside_obstacle = [this](Vec2 pos) {
        for (const Obstacle& obstacle : cfg_.obstacles) {
            if (distance(pos, obstacle.pos) <= obstacle.radius) {
                return true;
            }
        }
        return false;
    };
    auto place = [&](const char* what) {
        for (int attempt = 0; attempt < kPlacementRetries; ++attempt) {
            const Vec2 pos{placement.uniform(0.0, cfg_.arena_x), placement.uniform(0.0, cfg_.arena_y)};
            if (!inside_zone(pos) && !inside_obstacle(pos)) {
                return pos;
            }
        }
        throw ConfigError(std::string("cannot place ") + what +
                          ": zones/obstacles leave no free space");
    };

    // Targets first, in color order, so placement draws are independent of
    // the roster layout.
    int target_id = 0;
    for (std::size_t c = 0; c < 4; ++c) {
        for (int i = 0; i < cfg_.target_counts[c]; ++i) {
            Target target;
            target.id = target_id++;
            target.color = color_at(c);
            target.pos = place("target");
            targets_.push_back(target);
        }
    }

    ModalityConfig mcfg;
    mcfg.query_wait = cfg_.query_wait;
    mcfg.query_cooldown = cfg_.query_cooldown;
    mcfg.buffer_duration = cfg_.buffer_duration;
    mcfg.buffer_capacity = cfg_.buffer_capacity;

    int robot_id = 0;
    for (const RosterGroup& group : cfg_.roster) {
        for (int i = 0; i < group.count; ++i) {
            auto robot = std::make_unique<Robot>(robot_id, group.modality, group.prior, mcfg,
                                                 salient_percept, mix_seed(cfg_.seed, 1000 + robot_id));
            robot->pos = place("robot");
            robot->bb.set(kKeyHeading, placement.uniform(0.0, 2.0 * kPi));
            wire_registry(*robot);

            for (Color color : prior_colors(group.prior)) {
                robot->agent.kb().known_sequences.push_back(knowledge_sequence(color));
                robot->agent.kb().known_actions.push_back(knowledge_action(color));
            }
            std::vector<BtNode> prior_subtrees;
            for (Color color : prior_colors(group.prior)) {
                prior_subtrees.push_back(
                    make_knowledge_subtree(knowledge_sequence(color), knowledge_action(color)));
            }
            robot->agent.install_control(
                make_control_tree(critical_segment(), {}, std::move(prior_subtrees),
                                  fallback_segment()),
                &robot->bb);

            robots_.push_back(std::move(robot));
            ++robot_id;
        }
    }
}

void WorldState::wire_registry(Robot& robot) {
    Registry& reg = robot.registry;
    WorldState* world = this;
    Robot* self = &robot;

    reg.register_condition(
        "collision_danger",
        [](const std::vector<std::string>&, const Blackboard& bb) { return bb.get_int(kKeyRays) != 0; },
        {kKeyRays});
    reg.register_condition(
        "target_in_range",
        [](const std::vector<std::string>& params, const Blackboard& bb) {
            require_color_param(params, "target_in_range");
            return bb.get_string(kKeyTargetColor) == params.front();
        },
        {kKeyTargetColor});
    reg.register_condition(
        "target_visible",
        [](const std::vector<std::string>&, const Blackboard& bb) {
            return bb.get_string(kKeyTargetColor) != "none";
        },
        {kKeyTargetColor});
    reg.register_condition(
        "carrying",
        [](const std::vector<std::string>& params, const Blackboard& bb) {
            require_color_param(params, "carrying");
            return bb.get_string(kKeyCarrying) == params.front();
        },
        {kKeyCarrying});
    reg.register_condition(
        "carrying_any",
        [](const std::vector<std::string>&, const Blackboard& bb) {
            return bb.get_string(kKeyCarrying) != "none";
        },
        {kKeyCarrying});
    reg.register_condition(
        "in_zone",
        [](const std::vector<std::string>& params, const Blackboard& bb) {
            require_color_param(params, "in_zone");
            return bb.get_string(kKeyZone) == params.front();
        },
        {kKeyZone});

    reg.register_action("evade", [](const std::vector<std::string>&, Blackboard& bb) {
        if (bb.get_int(kKeyRays) == 0) {
            return NodeStatus::Failure;
        }
        bb.set(kKeyIntent, Vec2{});  // halt; the motion phase applies repulsion
        return NodeStatus::Success;
    });
    reg.register_action("random_walk", [self](const std::vector<std::string>&, Blackboard& bb) {
        bb.set(kKeyAtFallback, true);
        const double jitter = kWalkJitterDeg * kPi / 180.0;
        const double heading = bb.get_double(kKeyHeading) + self->rng.uniform(-jitter, jitter);
        bb.set(kKeyHeading, heading);
        bb.set(kKeyIntent, Vec2{std::cos(heading), std::sin(heading)});
        return NodeStatus::Running;
    });
    reg.register_action("run_transient", [self](const std::vector<std::string>&, Blackboard& bb) {
        bb.set(kKeyAtFallback, true);
        return self->agent.tick_transient(bb);
    });
    reg.register_action("goto_zone", [world](const std::vector<std::string>& params, Blackboard& bb) {
        const Color color = require_color_param(params, "goto_zone");
        const Vec2 pos = bb.get_vec2(kKeyPosition);
        const Vec2 center = world->zone_center(color);
        if (distance(pos, center) <= world->config().zone_radius) {
            bb.set(kKeyIntent, Vec2{});
            return NodeStatus::Success;
        }
        bb.set(kKeyIntent, normalized(Vec2{center.x - pos.x, center.y - pos.y}));
        return NodeStatus::Running;
    });
    reg.register_action("pick_target", [](const std::vector<std::string>& params, Blackboard& bb) {
        require_color_param(params, "pick_target");
        const std::string& carrying = bb.get_string(kKeyCarrying);
        if (carrying == params.front()) {
            return NodeStatus::Success;
        }
        if (carrying != "none") {
            return NodeStatus::Failure;
        }
        if (bb.get_string(kKeyTargetColor) != params.front() || bb.get_int(kKeyTargetId) < 0) {
            return NodeStatus::Failure;  // nothing graspable in range
        }
        bb.set(kKeyPickupRequest, bb.get_int(kKeyTargetId));
        return NodeStatus::Running;
    });
    reg.register_action("drop_target", [](const std::vector<std::string>&, Blackboard& bb) {
        if (bb.get_string(kKeyCarrying) == "none") {
            return NodeStatus::Failure;
        }
        bb.set(kKeyDropRequest, true);
        return NodeStatus::Success;
    });
    reg.register_action("modality_step", [world, self](const std::vector<std::string>&, Blackboard& bb) {
        if (auto query = self->agent.modality_step(bb, world->iteration_, world->ledger_)) {
            world->post_query(*query);
        }
        return NodeStatus::Running;
    });
}

void WorldState::post_query(const WireQuery& query) {
    if (cfg_.trace) {
        nlohmann::ordered_json line;
        line["iter"] = query.iteration;
        line["kind"] = "query";
        line["from"] = query.sender;
        line["to"] = -1;
        line["seq"] = to_text(query.sequence);
        line["payload"] = "";
        ledger_.wire_trace.push_back(line.dump());
    }
    medium_.post_query(query);
}

Vec2 WorldState::zone_center(Color color) const {
    switch (color) {
        case Color::Red: return Vec2{0.0, 0.0};
        case Color::Green: return Vec2{cfg_.arena_x, 0.0};
        case Color::Yellow: return Vec2{cfg_.arena_x, cfg_.arena_y};
        case Color::Blue: return Vec2{0.0, cfg_.arena_y};
    }
    return Vec2{};
}

std::optional<Color> WorldState::zone_at(Vec2 pos) const {
    std::optional<Color> best;
    double best_dist = cfg_.zone_radius;
    for (Color color : kColors) {
        const double d = distance(pos, zone_center(color));
        if (d <= best_dist) {
            best_dist = d;
            best = color;
        }
    }
    return best;
}

std::int64_t WorldState::collected_count() const {
    std::int64_t count = 0;
    for (const Target& target : targets_) {
        if (target.status == Target::Status::Collected) {
            ++count;
        }
    }
    return count;
}

bool WorldState::all_collected() const {
    return collected_count() == static_cast<std::int64_t>(targets_.size());
}

void WorldState::phase_sense() {
    for (auto& robot : robots_) {
        sense(*robot, *this);
    }
}

void WorldState::phase_deliver_responses() {
    const std::vector<WireResponse> responses = medium_.take_responses();
    for (const WireResponse& response : responses) {
        Robot& sender = *robots_[static_cast<std::size_t>(response.sender)];
        Robot& recipient = *robots_[static_cast<std::size_t>(response.recipient)];
        if (BroadcastMedium::in_range(sender.pos, recipient.pos, cfg_.comm_range)) {
            recipient.agent.handle_response(response, recipient.bb, iteration_, ledger_);
        }
        for (auto& observer : robots_) {
            if (can_intercept(observer->agent.modality(), observer->id, response, observer->pos,
                              sender.pos, recipient.pos, cfg_.comm_range)) {
                observer->agent.note_intercepted(response, iteration_);
            }
        }
    }
}

void WorldState::phase_modality_processing() {
    for (auto& robot : robots_) {
        if (robot->agent.modality() == ModalityKind::EU) {
            robot->agent.eu_process(iteration_, ledger_);
        }
    }
}

void WorldState::phase_tick() {
    for (auto& robot : robots_) {
        robot->bb.set(kKeyIntent, Vec2{});
        robot->bb.set(kKeyAtFallback, false);
        tick(robot->agent.live_tree(), robot->bb, robot->registry);
        robot->agent.recompile_if_dirty(&robot->bb);
    }
}

void WorldState::phase_motion() {
    for (auto& robot : robots_) {
        Vec2 intent = robot->bb.get_vec2(kKeyIntent);
        if (cfg_.freeze_while_querying && robot->bb.get_bool(kKeyWaiting)) {
            intent = Vec2{};
        }
        const Vec2 repulsion = repulsion_vector(*robot);
        Vec2 v{intent.x + repulsion.x, intent.y + repulsion.y};
        const double len = norm(v);
        if (len > 1.0) {
            v.x /= len;
            v.y /= len;
        }
        Vec2 pos{robot->pos.x + v.x * cfg_.speed, robot->pos.y + v.y * cfg_.speed};

        double heading = robot->bb.get_double(kKeyHeading);
        bool reflected = false;
        if (pos.x < 0.0) {
            pos.x = -pos.x;
            heading = kPi - heading;
            reflected = true;
        } else if (pos.x > cfg_.arena_x) {
            pos.x = 2.0 * cfg_.arena_x - pos.x;
            heading = kPi - heading;
            reflected = true;
        }
        if (pos.y < 0.0) {
            pos.y = -pos.y;
            heading = -heading;
            reflected = true;
        } else if (pos.y > cfg_.arena_y) {
            pos.y = 2.0 * cfg_.arena_y - pos.y;
            heading = -heading;
            reflected = true;
        }
        pos.x = std::clamp(pos.x, 0.0, cfg_.arena_x);
        pos.y = std::clamp(pos.y, 0.0, cfg_.arena_y);
        if (reflected) {
            robot->bb.set(kKeyHeading, heading);
        }
        robot->pos = pos;
    }
}

void WorldState::phase_pickup_deposit() {
    // Pickups: requests granted in robot id order, so the lower id wins a
    // contested target.
    for (auto& robot : robots_) {
        const std::int64_t request = robot->bb.get_int(kKeyPickupRequest);
        robot->bb.set(kKeyPickupRequest, std::int64_t{-1});
        if (request < 0 || robot->carrying >= 0) {
            continue;
        }
        if (request >= static_cast<std::int64_t>(targets_.size())) {
            continue;
        }
        Target& target = targets_[static_cast<std::size_t>(request)];
        if (target.status != Target::Status::Free) {
            continue;
        }
        if (distance(robot->pos, target.pos) > cfg_.sensor_radius) {
            continue;
        }
        target.status = Target::Status::Carried;
        target.carried_by = robot->id;
        robot->carrying = target.id;
    }

    // Carried targets ride along.
    for (auto& robot : robots_) {
        if (robot->carrying >= 0) {
            targets_[static_cast<std::size_t>(robot->carrying)].pos = robot->pos;
        }
    }

    // Deposits: reaching the matching zone collects the target; an explicit
    // drop elsewhere releases it in place.
    for (auto& robot : robots_) {
        const bool drop_requested = robot->bb.get_bool(kKeyDropRequest);
        robot->bb.set(kKeyDropRequest, false);
        if (robot->carrying < 0) {
            continue;
        }
        Target& target = targets_[static_cast<std::size_t>(robot->carrying)];
        const std::optional<Color> zone = zone_at(robot->pos);
        if (zone && *zone == target.color) {
            target.status = Target::Status::Collected;
            target.carried_by = -1;
            target.collected_iter = iteration_;
            robot->carrying = -1;
        } else if (drop_requested) {
            target.status = Target::Status::Free;
            target.carried_by = -1;
            robot->carrying = -1;
        }
    }
}

void WorldState::phase_deliver_queries() {
    const std::vector<WireQuery> queries = medium_.take_queries();
    for (const WireQuery& query : queries) {
        const Robot& sender = *robots_[static_cast<std::size_t>(query.sender)];
        for (auto& candidate : robots_) {
            if (candidate->id == query.sender) {
                continue;
            }
            if (!BroadcastMedium::in_range(sender.pos, candidate->pos, cfg_.comm_range)) {
                continue;
            }
            if (auto response = maybe_respond(candidate->agent, query, iteration_)) {
                if (cfg_.trace) {
                    nlohmann::ordered_json line;
                    line["iter"] = response->iteration;
                    line["kind"] = "response";
                    line["from"] = response->sender;
                    line["to"] = response->recipient;
                    line["seq"] = to_text(response->sequence);
                    line["payload"] = response->action_text;
                    ledger_.wire_trace.push_back(line.dump());
                }
                medium_.post_response(std::move(*response));
                break;  // lowest-id responder answers; the rest stay silent
            }
        }
    }
}

void WorldState::phase_buffer_tick() {
    for (auto& robot : robots_) {
        if (robot->agent.modality() == ModalityKind::EBU) {
            robot->agent.buffer().tick();
        }
    }
}

void WorldState::step() {
    phase_sense();
    phase_deliver_responses();
    phase_modality_processing();
    phase_tick();
    phase_motion();
    phase_pickup_deposit();
    phase_deliver_queries();
    phase_buffer_tick();
    ledger_.sample_iteration(iteration_, collected_count());
    ++iteration_;
}

void WorldState::finalize_ledger() {
    ledger_.stop_iteration = iteration_;
    ledger_.total_targets = static_cast<std::int64_t>(targets_.size());
    ledger_.collected_final = collected_count();
    ledger_.completed = !targets_.empty() && all_collected();
    ledger_.knowledge_levels = knowledge_levels(*this);

    ledger_.robot_audits.clear();
    for (const auto& robot : robots_) {
        MetricsLedger::RobotAudit audit;
        audit.id = robot->id;
        audit.modality = to_string(robot->agent.modality());
        audit.prior = to_string(robot->prior);
        audit.level = knowledge_level(robot->agent.kb());
        const MetricsLedger::Totals totals = ledger_.totals_for(robot->id);
        audit.queries = totals.queries;
        audit.effective = totals.effective;
        audit.upd_q = totals.upd_q;
        audit.upd_eu = totals.upd_eu;
        audit.upd_ebu = totals.upd_ebu;
        for (const ConditionSequence& seq : robot->agent.kb().known_sequences) {
            audit.sequences.push_back(to_text(seq));
        }
        for (const BtNode& action : robot->agent.kb().known_actions) {
            audit.action_texts.push_back(serialize(action));
        }
        ledger_.robot_audits.push_back(std::move(audit));
    }
}

std::unique_ptr<WorldState> init_world(const WorldConfig& cfg) {
    return std::make_unique<WorldState>(cfg);
}

MetricsLedger run_trial(const WorldConfig& cfg) {
    auto world = init_world(cfg);
    const bool stoppable = cfg.total_targets() > 0;
    while (world->iteration() < cfg.iterations && !(stoppable && world->all_collected())) {
        world->step();
    }
    world->finalize_ledger();
    world->ledger().config_echo = world_config_to_json_text(cfg);
    return std::move(world->ledger());
}

std::array<std::int64_t, 5> knowledge_levels(const WorldState& world) {
    std::array<std::int64_t, 5> histogram{};
    for (const auto& robot : world.robots()) {
        const int level = std::clamp(knowledge_level(robot->agent.kb()), 0, 4);
        ++histogram[static_cast<std::size_t>(level)];
    }
    return histogram;
}

}  // namespace swarmbt
