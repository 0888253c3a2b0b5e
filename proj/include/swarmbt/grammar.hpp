#pragma once

#include <string>
#include <vector>

#include "swarmbt/bt.hpp"
#include "swarmbt/condition_sequence.hpp"

namespace swarmbt {

/// Syntax error in stringBT text. line/column are 1-based.
class ParseError : public std::runtime_error {
public:
    ParseError(std::string message, int line, int column);

    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

/// stringBT: the textual tree encoding used for transmission, storage and
/// merge operations. One node per head token:
///
///   SEL[ ... ]   SEQ[ ... ]   PAR[ ... ]        composites
///   DEC:policy[ child ]  DEC:cooldown(5)[ ... ] decorator, exactly one child
///   COND:id(p1,p2)   ACT:id()                   leaves, parens required
///   SLOT:LABEL   SLOT:LABEL[ ... ]              insertion region
///
/// Children are whitespace-separated inside brackets. Any head may carry a
/// segment tag suffix "@LABEL" (a slot's label is its name instead). This
/// grammar is the bit-exact wire and file format for knowledge subtrees.
BtNode parse(const std::string& text);

/// Canonical text: single spaces, `SEL[ ]` for empty composites, params
/// joined by commas, empty slots without brackets. Pure function;
/// parse(serialize(t)) is structurally identical to t.
std::string serialize(const BtNode& tree);

/// parse + registry/schema validation in one step.
BtNode compile(const std::string& text, const Registry& reg, const Blackboard* schema = nullptr);

/// Builds Sequence(s_q, action): the guard conditions in order, then the
/// action subtree. Throws ConfigError when s_q is empty (an unguarded
/// knowledge subtree would shadow the fallback).
BtNode make_knowledge_subtree(const ConditionSequence& s_q, BtNode action);

/// A robot's control tree: Selector over the critical, common-knowledge,
/// prior-knowledge, new-knowledge and fallback segments, in that order.
/// Exactly one NK slot serves as the insertion region for merged knowledge.
struct ControlTree {
    BtNode root;

    bool operator==(const ControlTree&) const = default;
};

/// Segment labels used by the canonical control-tree layout.
inline constexpr const char* kSegmentCritical = "C";
inline constexpr const char* kSegmentCommon = "CK";
inline constexpr const char* kSegmentPrior = "PK";
inline constexpr const char* kSegmentNew = "NK";
inline constexpr const char* kSegmentFallback = "F";

/// Assembles Selector(C, CK, PK, Slot(NK), F) from the given segment groups.
ControlTree make_control_tree(BtNode critical, std::vector<BtNode> common,
                              std::vector<BtNode> prior, std::vector<BtNode> fallback);

/// Wraps a parsed root as a control tree, checking the NK slot exists and is
/// unique. Throws ConfigError otherwise.
ControlTree control_tree_from_root(BtNode root);

const BtNode& nk_slot(const ControlTree& control);

/// Appends t_k as the last child of the NK slot (acquisition order = priority
/// order within NK). Every other segment serializes byte-identically.
ControlTree merge(const ControlTree& control, const BtNode& t_k);

}  // namespace swarmbt
