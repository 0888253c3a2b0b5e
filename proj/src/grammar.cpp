#include "swarmbt/grammar.hpp"

#include <utility>

namespace swarmbt {
namespace {

bool is_id_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}

bool is_id_char(char c) { return is_id_start(c) || (c >= '0' && c <= '9'); }

bool is_param_char(char c) { return is_id_char(c) || c == '.' || c == '+' || c == '-'; }

class Parser {
public:
    explicit Parser(const std::string& text) : text_(text) {}

    BtNode parse_root() {
        skip_ws();
        BtNode node = parse_node();
        skip_ws();
        if (!at_end()) {
            fail("trailing input after tree");
        }
        return node;
    }

private:
    [[noreturn]] void fail(const std::string& message) const {
        throw ParseError(message, line_, column_);
    }

    bool at_end() const { return pos_ >= text_.size(); }

    char peek() const { return at_end() ? '\0' : text_[pos_]; }

    char advance() {
        char c = text_[pos_++];
        if (c == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        return c;
    }

    void skip_ws() {
        while (!at_end() && (peek() == ' ' || peek() == '\t' || peek() == '\n' || peek() == '\r')) {
            advance();
        }
    }

    void expect(char c) {
        if (peek() != c) {
            fail(std::string("expected '") + c + "'");
        }
        advance();
    }

    std::string read_identifier(const char* what) {
        if (!is_id_start(peek())) {
            fail(std::string("expected ") + what);
        }
        std::string out;
        while (!at_end() && is_id_char(peek())) {
            out += advance();
        }
        return out;
    }

    std::vector<std::string> read_params() {
        expect('(');
        std::vector<std::string> params;
        skip_ws();
        while (peek() != ')') {
            std::string param;
            while (!at_end() && is_param_char(peek())) {
                param += advance();
            }
            if (param.empty()) {
                fail("expected parameter or ')'");
            }
            params.push_back(std::move(param));
            skip_ws();
            if (peek() == ',') {
                advance();
                skip_ws();
                if (peek() == ')') {
                    fail("trailing comma in parameter list");
                }
            } else if (peek() != ')') {
                fail("expected ',' or ')'");
            }
        }
        advance();  // ')'
        return params;
    }

    std::vector<BtNode> read_children() {
        expect('[');
        std::vector<BtNode> children;
        skip_ws();
        while (peek() != ']') {
            if (at_end()) {
                fail("unterminated child list, expected ']'");
            }
            children.push_back(parse_node());
            skip_ws();
        }
        advance();  // ']'
        return children;
    }

    BtNode parse_node() {
        const int tag_line = line_;
        const int tag_column = column_;
        const std::string tag = read_identifier("node tag");

        NodeKind kind;
        if (tag == "SEL") {
            kind = NodeKind::Selector;
        } else if (tag == "SEQ") {
            kind = NodeKind::Sequence;
        } else if (tag == "PAR") {
            kind = NodeKind::Parallel;
        } else if (tag == "DEC") {
            kind = NodeKind::Decorator;
        } else if (tag == "COND") {
            kind = NodeKind::Condition;
        } else if (tag == "ACT") {
            kind = NodeKind::Action;
        } else if (tag == "SLOT") {
            kind = NodeKind::Slot;
        } else {
            throw ParseError("unknown node tag '" + tag + "'", tag_line, tag_column);
        }

        BtNode node;
        node.kind = kind;

        const bool wants_name =
            kind == NodeKind::Decorator || kind == NodeKind::Condition || kind == NodeKind::Action ||
            kind == NodeKind::Slot;
        if (wants_name) {
            expect(':');
            node.name = read_identifier("node id");
        } else if (peek() == ':') {
            fail("'" + tag + "' does not take an id");
        }

        if (peek() == '(') {
            if (kind == NodeKind::Selector || kind == NodeKind::Sequence ||
                kind == NodeKind::Parallel || kind == NodeKind::Slot) {
                fail("'" + tag + "' does not take parameters");
            }
            node.params = read_params();
        } else if (kind == NodeKind::Condition || kind == NodeKind::Action) {
            fail("'" + tag + ":" + node.name + "' requires a parameter list, even if empty");
        }

        if (peek() == '@') {
            if (kind == NodeKind::Slot) {
                fail("a slot's label is its name; '@' is not allowed on SLOT");
            }
            advance();
            node.label = read_identifier("segment label");
        }
        if (kind == NodeKind::Slot) {
            node.label = node.name;
        }

        skip_ws();
        switch (kind) {
            case NodeKind::Selector:
            case NodeKind::Sequence:
            case NodeKind::Parallel:
                node.children = read_children();
                break;
            case NodeKind::Decorator: {
                const int open_line = line_;
                const int open_column = column_;
                node.children = read_children();
                if (node.children.size() != 1) {
                    throw ParseError("decorator '" + node.name + "' must have exactly one child, got " +
                                         std::to_string(node.children.size()),
                                     open_line, open_column);
                }
                break;
            }
            case NodeKind::Slot:
                if (peek() == '[') {
                    node.children = read_children();
                }
                break;
            case NodeKind::Condition:
            case NodeKind::Action:
                if (peek() == '[') {
                    fail("'" + tag + "' nodes cannot have children");
                }
                break;
        }
        return node;
    }

    const std::string& text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int column_ = 1;
};

void serialize_node(const BtNode& node, std::string& out) {
    auto append_params = [&out](const std::vector<std::string>& params) {
        out += '(';
        for (std::size_t i = 0; i < params.size(); ++i) {
            if (i > 0) {
                out += ',';
            }
            out += params[i];
        }
        out += ')';
    };
    auto append_label = [&out, &node] {
        if (!node.label.empty()) {
            out += '@';
            out += node.label;
        }
    };
    auto append_children = [&out, &node] {
        out += '[';
        out += ' ';
        for (const BtNode& child : node.children) {
            serialize_node(child, out);
            out += ' ';
        }
        out += ']';
    };

    switch (node.kind) {
        case NodeKind::Selector:
            out += "SEL";
            append_label();
            append_children();
            break;
        case NodeKind::Sequence:
            out += "SEQ";
            append_label();
            append_children();
            break;
        case NodeKind::Parallel:
            out += "PAR";
            append_label();
            append_children();
            break;
        case NodeKind::Decorator:
            out += "DEC:";
            out += node.name;
            if (!node.params.empty()) {
                append_params(node.params);
            }
            append_label();
            append_children();
            break;
        case NodeKind::Condition:
            out += "COND:";
            out += node.name;
            append_params(node.params);
            append_label();
            break;
        case NodeKind::Action:
            out += "ACT:";
            out += node.name;
            append_params(node.params);
            append_label();
            break;
        case NodeKind::Slot:
            out += "SLOT:";
            out += node.name;
            if (!node.children.empty()) {
                append_children();
            }
            break;
    }
}

void collect_slots(const BtNode& node, const std::string& label, std::vector<const BtNode*>& out) {
    if (node.kind == NodeKind::Slot && node.label == label) {
        out.push_back(&node);
    }
    for (const BtNode& child : node.children) {
        collect_slots(child, label, out);
    }
}

BtNode* find_slot_mut(BtNode& node, const std::string& label) {
    if (node.kind == NodeKind::Slot && node.label == label) {
        return &node;
    }
    for (BtNode& child : node.children) {
        if (BtNode* hit = find_slot_mut(child, label)) {
            return hit;
        }
    }
    return nullptr;
}

}  // namespace

ParseError::ParseError(std::string message, int line, int column)
    : std::runtime_error("stringBT:" + std::to_string(line) + ":" + std::to_string(column) + ": " +
                         std::move(message)),
      line_(line),
      column_(column) {}

BtNode parse(const std::string& text) { return Parser(text).parse_root(); }

std::string serialize(const BtNode& tree) {
    std::string out;
    serialize_node(tree, out);
    return out;
}

BtNode compile(const std::string& text, const Registry& reg, const Blackboard* schema) {
    BtNode node = parse(text);
    validate_tree(node, reg, schema);
    return node;
}

BtNode make_knowledge_subtree(const ConditionSequence& s_q, BtNode action) {
    if (s_q.empty()) {
        throw ConfigError("knowledge subtree requires a non-empty condition sequence");
    }
    std::vector<BtNode> children;
    children.reserve(s_q.size() + 1);
    for (const ConditionSpec& spec : s_q.items) {
        children.push_back(make_condition(spec.id, spec.params));
    }
    children.push_back(std::move(action));
    return make_sequence(std::move(children));
}

ControlTree make_control_tree(BtNode critical, std::vector<BtNode> common, std::vector<BtNode> prior,
                              std::vector<BtNode> fallback) {
    critical.label = kSegmentCritical;
    std::vector<BtNode> segments;
    segments.reserve(5);
    segments.push_back(std::move(critical));
    segments.push_back(make_selector(std::move(common), kSegmentCommon));
    segments.push_back(make_selector(std::move(prior), kSegmentPrior));
    segments.push_back(make_slot(kSegmentNew));
    segments.push_back(make_selector(std::move(fallback), kSegmentFallback));
    return ControlTree{make_selector(std::move(segments))};
}

ControlTree control_tree_from_root(BtNode root) {
    std::vector<const BtNode*> slots;
    collect_slots(root, kSegmentNew, slots);
    if (slots.empty()) {
        throw ConfigError("control tree has no NK slot");
    }
    if (slots.size() > 1) {
        throw ConfigError("control tree has more than one NK slot");
    }
    return ControlTree{std::move(root)};
}

const BtNode& nk_slot(const ControlTree& control) {
    std::vector<const BtNode*> slots;
    collect_slots(control.root, kSegmentNew, slots);
    if (slots.size() != 1) {
        throw ConfigError("control tree must have exactly one NK slot");
    }
    return *slots.front();
}

ControlTree merge(const ControlTree& control, const BtNode& t_k) {
    ControlTree merged = control;
    BtNode* slot = find_slot_mut(merged.root, kSegmentNew);
    if (!slot) {
        throw ConfigError("merge target has no NK slot");
    }
    slot->children.push_back(t_k);
    return merged;
}

}  // namespace swarmbt
