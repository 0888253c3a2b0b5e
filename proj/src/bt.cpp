#include "swarmbt/bt.hpp"

#include <utility>

namespace swarmbt {
namespace {

std::string path_key(const std::vector<int>& path) {
    std::string key = "__cd:";
    for (int idx : path) {
        key += std::to_string(idx);
        key += '.';
    }
    return key;
}

long parse_cooldown_ticks(const BtNode& node) {
    if (node.params.empty()) {
        throw ConfigError("decorator cooldown requires a tick-count parameter");
    }
    try {
        long k = std::stol(node.params.front());
        if (k < 0) {
            throw ConfigError("decorator cooldown parameter must be >= 0");
        }
        return k;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        throw ConfigError("decorator cooldown parameter is not an integer: " + node.params.front());
    }
}

NodeStatus tick_impl(const BtNode& node, Blackboard& bb, const Registry& reg, std::vector<int>& path);

NodeStatus tick_children_as_selector(const BtNode& node, Blackboard& bb, const Registry& reg,
                                     std::vector<int>& path) {
    for (std::size_t i = 0; i < node.children.size(); ++i) {
        path.push_back(static_cast<int>(i));
        const NodeStatus st = tick_impl(node.children[i], bb, reg, path);
        path.pop_back();
        if (st != NodeStatus::Failure) {
            return st;
        }
    }
    return NodeStatus::Failure;
}

NodeStatus tick_impl(const BtNode& node, Blackboard& bb, const Registry& reg, std::vector<int>& path) {
    switch (node.kind) {
        case NodeKind::Selector:
        case NodeKind::Slot:
            return tick_children_as_selector(node, bb, reg, path);

        case NodeKind::Sequence: {
            for (std::size_t i = 0; i < node.children.size(); ++i) {
                path.push_back(static_cast<int>(i));
                const NodeStatus st = tick_impl(node.children[i], bb, reg, path);
                path.pop_back();
                if (st != NodeStatus::Success) {
                    return st;
                }
            }
            return NodeStatus::Success;
        }

        case NodeKind::Parallel: {
            for (std::size_t i = 0; i < node.children.size(); ++i) {
                path.push_back(static_cast<int>(i));
                tick_impl(node.children[i], bb, reg, path);
                path.pop_back();
            }
            return NodeStatus::Success;
        }

        case NodeKind::Decorator: {
            if (node.children.size() != 1) {
                throw ConfigError("decorator '" + node.name + "' must have exactly one child");
            }
            auto tick_child = [&] {
                path.push_back(0);
                const NodeStatus st = tick_impl(node.children.front(), bb, reg, path);
                path.pop_back();
                return st;
            };
            if (node.name == "invert") {
                const NodeStatus st = tick_child();
                if (st == NodeStatus::Success) {
                    return NodeStatus::Failure;
                }
                if (st == NodeStatus::Failure) {
                    return NodeStatus::Success;
                }
                return NodeStatus::Running;
            }
            if (node.name == "cooldown") {
                const long k = parse_cooldown_ticks(node);
                const std::string key = path_key(path);
                std::int64_t remaining = bb.has(key) ? bb.get_int(key) : 0;
                if (remaining > 0) {
                    bb.set(key, remaining - 1);
                    return NodeStatus::Failure;
                }
                const NodeStatus st = tick_child();
                if (st == NodeStatus::Success) {
                    bb.set(key, static_cast<std::int64_t>(k));
                }
                return st;
            }
            throw ConfigError("unknown decorator policy: " + node.name);
        }

        case NodeKind::Condition:
            return evaluate_condition(node.name, node.params, bb, reg) ? NodeStatus::Success
                                                                       : NodeStatus::Failure;

        case NodeKind::Action:
            return execute_action(node.name, node.params, bb, reg);
    }
    throw ConfigError("corrupt node kind");
}

void validate_impl(const BtNode& node, const Registry& reg, const Blackboard* schema,
                   std::vector<int>& path) {
    auto where = [&path] {
        std::string out = "at node path /";
        for (int idx : path) {
            out += std::to_string(idx);
            out += '/';
        }
        return out;
    };

    switch (node.kind) {
        case NodeKind::Condition: {
            if (!node.children.empty()) {
                throw ConfigError("condition '" + node.name + "' cannot have children " + where());
            }
            const auto* reads = reg.condition_reads(node.name);
            if (!reads) {
                throw ConfigError("unknown condition id '" + node.name + "' " + where());
            }
            if (schema) {
                for (const std::string& key : *reads) {
                    if (!schema->has(key)) {
                        throw ConfigError("condition '" + node.name + "' reads blackboard key '" +
                                          key + "' missing from schema " + where());
                    }
                }
            }
            return;
        }
        case NodeKind::Action:
            if (!node.children.empty()) {
                throw ConfigError("action '" + node.name + "' cannot have children " + where());
            }
            if (!reg.find_action(node.name)) {
                throw ConfigError("unknown action id '" + node.name + "' " + where());
            }
            return;
        case NodeKind::Decorator:
            if (node.children.size() != 1) {
                throw ConfigError("decorator '" + node.name + "' must have exactly one child " + where());
            }
            if (node.name != "invert" && node.name != "cooldown") {
                throw ConfigError("unknown decorator policy '" + node.name + "' " + where());
            }
            if (node.name == "cooldown") {
                parse_cooldown_ticks(node);
            }
            break;
        case NodeKind::Selector:
        case NodeKind::Sequence:
        case NodeKind::Parallel:
        case NodeKind::Slot:
            break;
    }

    for (std::size_t i = 0; i < node.children.size(); ++i) {
        path.push_back(static_cast<int>(i));
        validate_impl(node.children[i], reg, schema, path);
        path.pop_back();
    }
}

}  // namespace

const char* to_string(NodeStatus st) {
    switch (st) {
        case NodeStatus::Running: return "running";
        case NodeStatus::Success: return "success";
        case NodeStatus::Failure: return "failure";
    }
    return "?";
}

const char* to_string(NodeKind kind) {
    switch (kind) {
        case NodeKind::Selector: return "selector";
        case NodeKind::Sequence: return "sequence";
        case NodeKind::Parallel: return "parallel";
        case NodeKind::Decorator: return "decorator";
        case NodeKind::Condition: return "condition";
        case NodeKind::Action: return "action";
        case NodeKind::Slot: return "slot";
    }
    return "?";
}

bool BtNode::operator==(const BtNode& other) const {
    return kind == other.kind && name == other.name && params == other.params &&
           label == other.label && children == other.children;
}

BtNode make_selector(std::vector<BtNode> children, std::string label) {
    return BtNode{NodeKind::Selector, "", {}, std::move(label), std::move(children)};
}

BtNode make_sequence(std::vector<BtNode> children, std::string label) {
    return BtNode{NodeKind::Sequence, "", {}, std::move(label), std::move(children)};
}

BtNode make_parallel(std::vector<BtNode> children, std::string label) {
    return BtNode{NodeKind::Parallel, "", {}, std::move(label), std::move(children)};
}

BtNode make_decorator(std::string policy, std::vector<std::string> params, BtNode child) {
    return BtNode{NodeKind::Decorator, std::move(policy), std::move(params), "", {std::move(child)}};
}

BtNode make_condition(std::string id, std::vector<std::string> params) {
    return BtNode{NodeKind::Condition, std::move(id), std::move(params), "", {}};
}

BtNode make_action(std::string id, std::vector<std::string> params) {
    return BtNode{NodeKind::Action, std::move(id), std::move(params), "", {}};
}

BtNode make_slot(std::string label) {
    BtNode node{NodeKind::Slot, label, {}, label, {}};
    return node;
}

bool Blackboard::has(const std::string& key) const { return values_.count(key) != 0; }

void Blackboard::set(const std::string& key, Value value) { values_[key] = std::move(value); }

const Blackboard::Value& Blackboard::fetch(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) {
        throw ConfigError("missing blackboard key: " + key);
    }
    return it->second;
}

bool Blackboard::get_bool(const std::string& key) const {
    const Value& v = fetch(key);
    if (const bool* b = std::get_if<bool>(&v)) {
        return *b;
    }
    throw ConfigError("blackboard key '" + key + "' is not a bool");
}

std::int64_t Blackboard::get_int(const std::string& key) const {
    const Value& v = fetch(key);
    if (const std::int64_t* i = std::get_if<std::int64_t>(&v)) {
        return *i;
    }
    throw ConfigError("blackboard key '" + key + "' is not an integer");
}

double Blackboard::get_double(const std::string& key) const {
    const Value& v = fetch(key);
    if (const double* d = std::get_if<double>(&v)) {
        return *d;
    }
    throw ConfigError("blackboard key '" + key + "' is not a double");
}

const std::string& Blackboard::get_string(const std::string& key) const {
    const Value& v = fetch(key);
    if (const std::string* s = std::get_if<std::string>(&v)) {
        return *s;
    }
    throw ConfigError("blackboard key '" + key + "' is not a string");
}

Vec2 Blackboard::get_vec2(const std::string& key) const {
    const Value& v = fetch(key);
    if (const Vec2* p = std::get_if<Vec2>(&v)) {
        return *p;
    }
    throw ConfigError("blackboard key '" + key + "' is not a vec2");
}

std::vector<std::string> Blackboard::keys() const {
    std::vector<std::string> out;
    out.reserve(values_.size());
    for (const auto& [key, _] : values_) {
        out.push_back(key);
    }
    return out;
}

void Registry::register_condition(std::string id, ConditionFn fn, std::vector<std::string> reads) {
    conditions_[std::move(id)] = ConditionDef{std::move(fn), std::move(reads)};
}

void Registry::register_action(std::string id, ActionFn fn) { actions_[std::move(id)] = std::move(fn); }

const ConditionFn* Registry::find_condition(const std::string& id) const {
    auto it = conditions_.find(id);
    return it == conditions_.end() ? nullptr : &it->second.fn;
}

const ActionFn* Registry::find_action(const std::string& id) const {
    auto it = actions_.find(id);
    return it == actions_.end() ? nullptr : &it->second;
}

const std::vector<std::string>* Registry::condition_reads(const std::string& id) const {
    auto it = conditions_.find(id);
    return it == conditions_.end() ? nullptr : &it->second.reads;
}

bool evaluate_condition(const std::string& id, const std::vector<std::string>& params,
                        const Blackboard& bb, const Registry& reg) {
    const ConditionFn* fn = reg.find_condition(id);
    if (!fn) {
        throw ConfigError("unknown condition id: " + id);
    }
    return (*fn)(params, bb);
}

NodeStatus execute_action(const std::string& id, const std::vector<std::string>& params,
                          Blackboard& bb, const Registry& reg) {
    const ActionFn* fn = reg.find_action(id);
    if (!fn) {
        throw ConfigError("unknown action id: " + id);
    }
    return (*fn)(params, bb);
}

NodeStatus tick(const BtNode& node, Blackboard& bb, const Registry& reg) {
    std::vector<int> path;
    return tick_impl(node, bb, reg, path);
}

void validate_tree(const BtNode& node, const Registry& reg, const Blackboard* schema) {
    std::vector<int> path;
    validate_impl(node, reg, schema, path);
}

}  // namespace swarmbt
