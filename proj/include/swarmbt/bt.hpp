#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace swarmbt {

/// Raised for miswired trees and bad configuration: unknown node ids,
/// missing blackboard keys, type mismatches. Never used for ordinary
/// Failure results.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

enum class NodeStatus { Running, Success, Failure };

const char* to_string(NodeStatus st);

enum class NodeKind { Selector, Sequence, Parallel, Decorator, Condition, Action, Slot };

const char* to_string(NodeKind kind);

/// Behavior-tree AST node. Value semantics: trees are copied, compared and
/// transformed as plain data; the tick engine never mutates them.
///
/// `name` holds the condition/action id, the decorator policy, or the slot
/// label. `label` is an optional segment tag (C, CK, PK, F) used to identify
/// regions of a control tree; a Slot's label is its name.
struct BtNode {
    NodeKind kind = NodeKind::Selector;
    std::string name;
    std::vector<std::string> params;
    std::string label;
    std::vector<BtNode> children;

    bool operator==(const BtNode& other) const;
};

BtNode make_selector(std::vector<BtNode> children, std::string label = "");
BtNode make_sequence(std::vector<BtNode> children, std::string label = "");
BtNode make_parallel(std::vector<BtNode> children, std::string label = "");
BtNode make_decorator(std::string policy, std::vector<std::string> params, BtNode child);
BtNode make_condition(std::string id, std::vector<std::string> params = {});
BtNode make_action(std::string id, std::vector<std::string> params = {});
BtNode make_slot(std::string label);

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Vec2&) const = default;
};

/// Per-robot state manager: a key-value store for sensor readings, status
/// flags, timers and counters. Keys are stable string identifiers; every key
/// a compiled tree reads must exist here before the first tick.
class Blackboard {
public:
    using Value = std::variant<bool, std::int64_t, double, std::string, Vec2>;

    bool has(const std::string& key) const;
    void set(const std::string& key, Value value);

    bool get_bool(const std::string& key) const;
    std::int64_t get_int(const std::string& key) const;
    double get_double(const std::string& key) const;
    const std::string& get_string(const std::string& key) const;
    Vec2 get_vec2(const std::string& key) const;

    std::vector<std::string> keys() const;
    bool operator==(const Blackboard& other) const { return values_ == other.values_; }

private:
    const Value& fetch(const std::string& key) const;

    std::map<std::string, Value> values_;
};

using ConditionFn = std::function<bool(const std::vector<std::string>& params, const Blackboard& bb)>;
using ActionFn = std::function<NodeStatus(const std::vector<std::string>& params, Blackboard& bb)>;

/// Condition and action registries, populated by the simulation at startup.
/// Conditions declare the blackboard keys they read so compiled trees can be
/// validated against a robot's blackboard schema.
class Registry {
public:
    void register_condition(std::string id, ConditionFn fn, std::vector<std::string> reads = {});
    void register_action(std::string id, ActionFn fn);

    const ConditionFn* find_condition(const std::string& id) const;
    const ActionFn* find_action(const std::string& id) const;
    const std::vector<std::string>* condition_reads(const std::string& id) const;

private:
    struct ConditionDef {
        ConditionFn fn;
        std::vector<std::string> reads;
    };
    std::map<std::string, ConditionDef> conditions_;
    std::map<std::string, ActionFn> actions_;
};

/// Pure read of the blackboard; true/false only, conditions never run.
bool evaluate_condition(const std::string& id, const std::vector<std::string>& params,
                        const Blackboard& bb, const Registry& reg);

/// Runs a registered action routine. Returns Running while in progress,
/// Success on completion, Failure on a violated precondition.
NodeStatus execute_action(const std::string& id, const std::vector<std::string>& params,
                          Blackboard& bb, const Registry& reg);

/// Ticks a tree once. Composite semantics:
///   Selector  - left to right, first Success/Running wins, Failure if all fail.
///   Sequence  - left to right, first Failure/Running wins, Success if all succeed.
///   Parallel  - ticks every child every call, always returns Success.
///   Decorator - applies its policy (`invert`, `cooldown(k)`) to one child.
///   Slot      - selector over merged children; Failure while empty.
/// Decorator/cooldown state is kept in the blackboard under reserved
/// "__cd:<path>" keys so trees stay replaceable mid-mission.
NodeStatus tick(const BtNode& node, Blackboard& bb, const Registry& reg);

/// Structural checks performed when compiling a tree for a robot: node ids
/// registered, decorator policies known, condition reads present in the
/// blackboard. Throws ConfigError with the offending node path.
void validate_tree(const BtNode& node, const Registry& reg, const Blackboard* schema = nullptr);

}  // namespace swarmbt
