#include "swarmbt/condition_sequence.hpp"

namespace swarmbt {
namespace {

bool is_id_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

bool is_param_char(char c) { return is_id_char(c) || c == '.' || c == '+' || c == '-'; }

ConditionSpec parse_spec(const std::string& text, std::size_t& pos) {
    ConditionSpec spec;
    while (pos < text.size() && is_id_char(text[pos])) {
        spec.id += text[pos++];
    }
    if (spec.id.empty()) {
        throw ConfigError("condition sequence text: expected condition id in '" + text + "'");
    }
    if (pos >= text.size() || text[pos] != '(') {
        throw ConfigError("condition sequence text: expected '(' after '" + spec.id + "'");
    }
    ++pos;
    while (pos < text.size() && text[pos] != ')') {
        std::string param;
        while (pos < text.size() && is_param_char(text[pos])) {
            param += text[pos++];
        }
        if (param.empty()) {
            throw ConfigError("condition sequence text: empty parameter in '" + text + "'");
        }
        spec.params.push_back(std::move(param));
        if (pos < text.size() && text[pos] == ',') {
            ++pos;
            if (pos >= text.size() || text[pos] == ')') {
                throw ConfigError("condition sequence text: trailing comma in '" + text + "'");
            }
        }
    }
    if (pos >= text.size()) {
        throw ConfigError("condition sequence text: unterminated parameter list in '" + text + "'");
    }
    ++pos;  // ')'
    return spec;
}

}  // namespace

std::string to_text(const ConditionSpec& spec) {
    std::string out = spec.id;
    out += '(';
    for (std::size_t i = 0; i < spec.params.size(); ++i) {
        if (i > 0) {
            out += ',';
        }
        out += spec.params[i];
    }
    out += ')';
    return out;
}

std::string to_text(const ConditionSequence& seq) {
    std::string out;
    for (std::size_t i = 0; i < seq.items.size(); ++i) {
        if (i > 0) {
            out += ';';
        }
        out += to_text(seq.items[i]);
    }
    return out;
}

ConditionSequence sequence_from_text(const std::string& text) {
    ConditionSequence seq;
    std::size_t pos = 0;
    while (pos < text.size()) {
        seq.items.push_back(parse_spec(text, pos));
        if (pos < text.size()) {
            if (text[pos] != ';') {
                throw ConfigError("condition sequence text: expected ';' in '" + text + "'");
            }
            ++pos;
        }
    }
    if (seq.empty()) {
        throw ConfigError("condition sequence text is empty");
    }
    return seq;
}

}  // namespace swarmbt
