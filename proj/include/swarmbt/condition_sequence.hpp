#pragma once

#include <string>
#include <vector>

#include "swarmbt/bt.hpp"

namespace swarmbt {

/// One condition reference: id plus positional parameters,
/// e.g. target_in_range(red).
struct ConditionSpec {
    std::string id;
    std::vector<std::string> params;

    bool operator==(const ConditionSpec&) const = default;
};

/// Ordered list of conditions that must hold for an action subtree to apply;
/// the unit of queryable knowledge. Equality is order-sensitive.
struct ConditionSequence {
    std::vector<ConditionSpec> items;

    bool empty() const { return items.empty(); }
    std::size_t size() const { return items.size(); }

    bool operator==(const ConditionSequence&) const = default;
};

/// Canonical text form: items joined by ";", each as "id(p1,p2)".
/// Used in wire messages, trace logs and knowledge audits.
std::string to_text(const ConditionSpec& spec);
std::string to_text(const ConditionSequence& seq);

/// Inverse of to_text. Throws ConfigError on malformed text.
ConditionSequence sequence_from_text(const std::string& text);

}  // namespace swarmbt
