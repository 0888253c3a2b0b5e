#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "swarmbt/modalities.hpp"
#include "swarmbt/random.hpp"

namespace swarmbt {

enum class Color { Red, Green, Yellow, Blue };

inline constexpr std::array<Color, 4> kColors = {Color::Red, Color::Green, Color::Yellow,
                                                 Color::Blue};

const char* to_string(Color color);
std::optional<Color> color_from_string(const std::string& text);

/// Prior-knowledge class of a robot: Ignorant, Multi-target (all four), or
/// one single target color.
enum class PriorClass { I, M, R, G, Y, B };

const char* to_string(PriorClass prior);
std::optional<PriorClass> prior_from_string(const std::string& text);
std::vector<Color> prior_colors(PriorClass prior);

struct RosterGroup {
    ModalityKind modality = ModalityKind::QRU;
    PriorClass prior = PriorClass::I;
    int count = 0;
};

struct Obstacle {
    Vec2 pos;
    double radius = 0.0;
};

/// Percept injected during the sense phase of one iteration; used by the
/// static protocol scenarios where target encounters are scripted rather
/// than emergent.
struct ScriptedPercept {
    std::int64_t iter = 0;
    int robot = 0;
    Color color = Color::Red;
};

struct WorldConfig {
    double arena_x = 2000.0;
    double arena_y = 2000.0;
    std::array<int, 4> target_counts{25, 25, 25, 25};  // R, G, Y, B
    double zone_radius = 100.0;
    double comm_range = 200.0;
    std::vector<RosterGroup> roster;
    std::int64_t buffer_duration = 5000;  // t_m
    std::optional<std::size_t> buffer_capacity;
    std::int64_t iterations = 100000;
    std::uint64_t seed = 1;
    double speed = 2.0;
    double sensor_radius = 30.0;
    double ray_range = 25.0;
    std::vector<Obstacle> obstacles;
    std::int64_t query_wait = 50;
    std::int64_t query_cooldown = 100;
    bool freeze_while_querying = true;
    std::vector<ScriptedPercept> script;
    bool trace = false;

    int total_targets() const;
    int total_robots() const;
};

/// Parses and validates a config document. Unknown keys are rejected; errors
/// name the offending field path. `echo` (when given) receives the canonical
/// JSON text of the parsed config.
WorldConfig world_config_from_json_text(const std::string& text, std::string* echo = nullptr);
WorldConfig load_world_config(const std::string& path, std::string* echo = nullptr);
std::string world_config_to_json_text(const WorldConfig& cfg);

struct Target {
    enum class Status { Free, Carried, Collected };

    int id = 0;
    Color color = Color::Red;
    Vec2 pos;
    Status status = Status::Free;
    int carried_by = -1;
    std::int64_t collected_iter = -1;
};

/// One robot: physical state plus its knowledge-transfer machine. Robots are
/// pinned in memory because the registry closures and the agent point back
/// into them.
struct Robot {
    Robot(int id, ModalityKind modality, PriorClass prior, const ModalityConfig& mcfg,
          PerceptFn percept, std::uint64_t rng_seed);

    Robot(const Robot&) = delete;
    Robot& operator=(const Robot&) = delete;

    int id;
    PriorClass prior;
    Vec2 pos;
    int carrying = -1;  // target id, -1 when free
    Blackboard bb;
    Registry registry;
    KnowledgeAgent agent;
    RandomStream rng;
};

/// Derived motion state, for audits and debugging.
const char* motion_state(const Robot& robot);

/// Number of distinct target colors the knowledge base covers.
int knowledge_level(const KnowledgeBase& kb);

/// The canonical per-color knowledge unit: the query sequence and the
/// pick-deliver action subtree transmitted in responses.
ConditionSequence knowledge_sequence(Color color);
BtNode knowledge_action(Color color);

/// The SAR arena: targets, zones, obstacles, robots, the broadcast medium
/// and the deterministic per-iteration scheduler.
class WorldState {
public:
    explicit WorldState(WorldConfig cfg);

    WorldState(const WorldState&) = delete;
    WorldState& operator=(const WorldState&) = delete;

    const WorldConfig& config() const { return cfg_; }
    std::int64_t iteration() const { return iteration_; }
    std::vector<std::unique_ptr<Robot>>& robots() { return robots_; }
    const std::vector<std::unique_ptr<Robot>>& robots() const { return robots_; }
    std::vector<Target>& targets() { return targets_; }
    const std::vector<Target>& targets() const { return targets_; }
    BroadcastMedium& medium() { return medium_; }
    MetricsLedger& ledger() { return ledger_; }
    const MetricsLedger& ledger() const { return ledger_; }

    Vec2 zone_center(Color color) const;
    std::optional<Color> zone_at(Vec2 pos) const;
    std::int64_t collected_count() const;
    bool all_collected() const;

    /// Runs one iteration: sense, deliver responses + interception, modality
    /// processing, tick, motion, pickup/deposit, query delivery, buffer
    /// aging, metrics sampling.
    void step();

    /// Fills stop/completion fields, knowledge levels and per-robot audits.
    void finalize_ledger();

private:
    void wire_registry(Robot& robot);
    void post_query(const WireQuery& query);

    void phase_sense();
    void phase_deliver_responses();
    void phase_modality_processing();
    void phase_tick();
    void phase_motion();
    void phase_pickup_deposit();
    void phase_deliver_queries();
    void phase_buffer_tick();

    WorldConfig cfg_;
    std::int64_t iteration_ = 0;
    std::vector<Target> targets_;
    std::vector<std::unique_ptr<Robot>> robots_;
    BroadcastMedium medium_;
    MetricsLedger ledger_;
};

/// Writes the robot's sensor view into its blackboard: the eight collision
/// rays, the nearest in-range target, zone membership and pose.
void sense(Robot& robot, const WorldState& world);

/// Unit vector away from the triggered collision rays; zero when none fire
/// or when they cancel by symmetry.
Vec2 repulsion_vector(const Robot& robot);

/// Seeded placement and prior-knowledge installation. Throws ConfigError on
/// invalid configs or infeasible placement.
std::unique_ptr<WorldState> init_world(const WorldConfig& cfg);

/// init_world plus up to cfg.iterations steps with early stop once every
/// target is collected. Returns the finalized ledger.
MetricsLedger run_trial(const WorldConfig& cfg);

/// Histogram of robot knowledge levels 0..4; sums to the roster size.
std::array<std::int64_t, 5> knowledge_levels(const WorldState& world);

}  // namespace swarmbt
