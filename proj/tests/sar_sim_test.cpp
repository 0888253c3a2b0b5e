#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "swarmbt/sar.hpp"

using namespace swarmbt;

namespace {

WorldConfig small_world() {
    WorldConfig cfg;
    cfg.arena_x = 400;
    cfg.arena_y = 400;
    cfg.zone_radius = 50;
    cfg.comm_range = 120;
    cfg.target_counts = {3, 3, 0, 0};
    cfg.roster = {RosterGroup{ModalityKind::QRU, PriorClass::I, 4},
                  RosterGroup{ModalityKind::QRU, PriorClass::M, 1}};
    cfg.iterations = 600;
    cfg.seed = 42;
    return cfg;
}

int ray_index_for(double dx, double dy) {
    // Ray k points along angle 45 deg * k, counter-clockwise from +x.
    const double angle = std::atan2(dy, dx);
    int k = static_cast<int>(std::llround(angle / (3.14159265358979 / 4.0)));
    return (k + 8) % 8;
}

}  // namespace

TEST_CASE("init_world installs prior knowledge per roster class") {
    WorldConfig cfg = small_world();
    cfg.roster = {RosterGroup{ModalityKind::QRU, PriorClass::I, 39},
                  RosterGroup{ModalityKind::QRU, PriorClass::M, 1}};
    auto world = init_world(cfg);

    REQUIRE(world->robots().size() == 40);
    int multi = 0;
    int ignorant = 0;
    for (const auto& robot : world->robots()) {
        if (robot->agent.kb().size() == 4) {
            ++multi;
            CHECK(robot->prior == PriorClass::M);
            CHECK(nk_slot(robot->agent.control()).children.empty());
        } else if (robot->agent.kb().size() == 0) {
            ++ignorant;
        }
    }
    CHECK(multi == 1);
    CHECK(ignorant == 39);

    const auto histogram = knowledge_levels(*world);
    CHECK(histogram[0] == 39);
    CHECK(histogram[4] == 1);

    // Single-color classes hold exactly one entry.
    WorldConfig single = small_world();
    single.roster = {RosterGroup{ModalityKind::EU, PriorClass::R, 1},
                     RosterGroup{ModalityKind::EU, PriorClass::B, 1}};
    auto world2 = init_world(single);
    CHECK(world2->robots()[0]->agent.kb().size() == 1);
    CHECK(knows(world2->robots()[0]->agent.kb(), knowledge_sequence(Color::Red)));
    CHECK(knows(world2->robots()[1]->agent.kb(), knowledge_sequence(Color::Blue)));
}

TEST_CASE("seeded init is reproducible and placement avoids zones and obstacles") {
    WorldConfig cfg = small_world();
    cfg.obstacles = {Obstacle{{200, 200}, 40}};
    auto a = init_world(cfg);
    auto b = init_world(cfg);

    REQUIRE(a->targets().size() == b->targets().size());
    for (std::size_t i = 0; i < a->targets().size(); ++i) {
        CHECK(a->targets()[i].pos == b->targets()[i].pos);
        CHECK_FALSE(a->zone_at(a->targets()[i].pos).has_value());
        const double d = std::hypot(a->targets()[i].pos.x - 200, a->targets()[i].pos.y - 200);
        CHECK(d > 40);
    }
    for (std::size_t i = 0; i < a->robots().size(); ++i) {
        CHECK(a->robots()[i]->pos == b->robots()[i]->pos);
    }
}

TEST_CASE("infeasible placement is a configuration error") {
    WorldConfig cfg = small_world();
    cfg.zone_radius = 600;  // zones cover the whole arena
    CHECK_THROWS_AS(init_world(cfg), ConfigError);
}

TEST_CASE("sense reports zone membership, nearest target and rays") {
    WorldConfig cfg = small_world();
    cfg.target_counts = {1, 0, 0, 0};
    cfg.obstacles = {Obstacle{{200, 230}, 8}};
    auto world = init_world(cfg);
    Robot& robot = *world->robots()[0];

    robot.pos = {10, 10};  // inside the red zone (corner 0,0)
    sense(robot, *world);
    CHECK(robot.bb.get_string("zone") == "red");

    robot.pos = {200, 200};
    world->targets()[0].pos = {215, 200};
    sense(robot, *world);
    CHECK(robot.bb.get_string("zone") == "none");
    CHECK(robot.bb.get_string("target_color") == "red");
    CHECK(robot.bb.get_int("target_id") == 0);
    CHECK(robot.bb.get_vec2("target_rel") == Vec2{15, 0});

    // Obstacle due north within ray range triggers the +y ray.
    const std::int64_t rays = robot.bb.get_int("rays");
    CHECK((rays & (1 << ray_index_for(0, 1))) != 0);
    CHECK((rays & (1 << ray_index_for(1, 0))) == 0);

    world->targets()[0].pos = {215, 120};  // out of sensor range
    sense(robot, *world);
    CHECK(robot.bb.get_string("target_color") == "none");
    CHECK(robot.bb.get_int("target_id") == -1);
}

TEST_CASE("repulsion vector points away from triggered rays") {
    WorldConfig cfg = small_world();
    cfg.target_counts = {0, 0, 0, 0};
    auto world = init_world(cfg);
    Robot& robot = *world->robots()[0];

    robot.bb.set("rays", std::int64_t{0});
    CHECK(repulsion_vector(robot) == Vec2{0, 0});

    // North and east rays: normalized push toward the south-west.
    robot.bb.set("rays",
                 std::int64_t{(1 << ray_index_for(0, 1)) | (1 << ray_index_for(1, 0))});
    const Vec2 v = repulsion_vector(robot);
    CHECK(v.x == doctest::Approx(-std::sqrt(0.5)));
    CHECK(v.y == doctest::Approx(-std::sqrt(0.5)));

    // All eight rays cancel by symmetry.
    robot.bb.set("rays", std::int64_t{0xFF});
    const Vec2 all = repulsion_vector(robot);
    CHECK(all.x == doctest::Approx(0.0));
    CHECK(all.y == doctest::Approx(0.0));
}

TEST_CASE("conservation, containment and monotone collection hold per step") {
    WorldConfig cfg = small_world();
    cfg.iterations = 400;
    auto world = init_world(cfg);

    const auto count_states = [&world] {
        int free = 0, carried = 0, collected = 0;
        for (const Target& t : world->targets()) {
            switch (t.status) {
                case Target::Status::Free: ++free; break;
                case Target::Status::Carried: ++carried; break;
                case Target::Status::Collected: ++collected; break;
            }
        }
        return std::array<int, 3>{free, carried, collected};
    };

    std::int64_t last_collected = 0;
    for (int i = 0; i < 400; ++i) {
        world->step();
        const auto [free, carried, collected] = count_states();
        CHECK(free + carried + collected == cfg.total_targets());
        CHECK(collected >= last_collected);
        last_collected = collected;
        for (const auto& robot : world->robots()) {
            CHECK(robot->pos.x >= 0.0);
            CHECK(robot->pos.x <= cfg.arena_x);
            CHECK(robot->pos.y >= 0.0);
            CHECK(robot->pos.y <= cfg.arena_y);
        }
    }

    // Knowledge levels never decrease.
    for (const auto& robot : world->robots()) {
        CHECK(robot->agent.kb().size() <= 4);
    }
}

TEST_CASE("a knowledgeable robot picks up and delivers a target") {
    WorldConfig cfg = small_world();
    cfg.target_counts = {1, 0, 0, 0};
    cfg.roster = {RosterGroup{ModalityKind::QRU, PriorClass::M, 1}};
    auto world = init_world(cfg);

    Robot& robot = *world->robots()[0];
    robot.pos = {200, 200};
    world->targets()[0].pos = {210, 200};

    int iterations = 0;
    while (!world->all_collected() && iterations < 400) {
        world->step();
        ++iterations;
    }
    CHECK(world->all_collected());
    CHECK(world->targets()[0].collected_iter >= 0);
    CHECK(robot.carrying == -1);
}

TEST_CASE("contested pickups go to the lower robot id") {
    WorldConfig cfg = small_world();
    cfg.target_counts = {1, 0, 0, 0};
    cfg.roster = {RosterGroup{ModalityKind::QRU, PriorClass::M, 2}};
    cfg.speed = 0.0;  // nobody moves; both request the same target
    auto world = init_world(cfg);

    world->robots()[0]->pos = {200, 210};
    world->robots()[1]->pos = {200, 190};
    world->targets()[0].pos = {200, 200};

    world->step();
    world->step();
    CHECK(world->targets()[0].status == Target::Status::Carried);
    CHECK(world->targets()[0].carried_by == 0);
    CHECK(world->robots()[0]->carrying == 0);
    CHECK(world->robots()[1]->carrying == -1);
}

TEST_CASE("zero iterations produce an empty timeline with initial knowledge") {
    WorldConfig cfg = small_world();
    cfg.iterations = 0;
    const MetricsLedger ledger = run_trial(cfg);
    CHECK(ledger.timeline().empty());
    CHECK(ledger.stop_iteration == 0);
    CHECK(ledger.knowledge_levels[0] == 4);
    CHECK(ledger.knowledge_levels[4] == 1);
}

TEST_CASE("an all-knowledgeable roster never queries") {
    WorldConfig cfg = small_world();
    cfg.roster = {RosterGroup{ModalityKind::QRU, PriorClass::M, 5}};
    cfg.iterations = 800;
    const MetricsLedger ledger = run_trial(cfg);
    CHECK(ledger.totals().queries == 0);
    CHECK(ledger.collected_final > 0);
}

TEST_CASE("replaying a seed reproduces the ledger byte for byte") {
    WorldConfig cfg = small_world();
    cfg.iterations = 500;
    cfg.trace = true;

    const MetricsLedger a = run_trial(cfg);
    const MetricsLedger b = run_trial(cfg);
    CHECK(a.csv() == b.csv());
    CHECK(a.json() == b.json());
    CHECK(a.wire_trace == b.wire_trace);

    WorldConfig other = cfg;
    other.seed = 43;
    const MetricsLedger c = run_trial(other);
    CHECK(a.csv() != c.csv());
}

TEST_CASE("update counts partition per-robot knowledge growth") {
    WorldConfig cfg = small_world();
    cfg.iterations = 600;
    cfg.roster = {RosterGroup{ModalityKind::EU, PriorClass::I, 3},
                  RosterGroup{ModalityKind::EBU, PriorClass::I, 2},
                  RosterGroup{ModalityKind::EU, PriorClass::M, 1}};
    auto world = init_world(cfg);
    while (world->iteration() < cfg.iterations && !world->all_collected()) {
        world->step();
    }
    world->finalize_ledger();

    for (const auto& robot : world->robots()) {
        const auto totals = world->ledger().totals_for(robot->id);
        const std::int64_t growth =
            static_cast<std::int64_t>(robot->agent.kb().size()) -
            static_cast<std::int64_t>(prior_colors(robot->prior).size());
        CHECK(totals.upd_q + totals.upd_eu + totals.upd_ebu == growth);
        CHECK(totals.effective <= totals.queries);
    }
    CHECK(world->ledger().totals_from_events() == world->ledger().totals());
}

TEST_CASE("motion states are derivable") {
    WorldConfig cfg = small_world();
    auto world = init_world(cfg);
    CHECK(std::string(motion_state(*world->robots()[0])) == "random-walk");
}
