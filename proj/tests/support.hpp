#pragma once

// Shared test helpers: a random stringBT tree generator for round-trip
// fuzzing, rank/fit statistics for trend checks, and a protocol-trace oracle
// for the scripted query-count scenarios. Everything here is independent of
// the engine code paths it is used to check.

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "swarmbt/bt.hpp"
#include "swarmbt/modalities.hpp"
#include "swarmbt/random.hpp"

namespace testsupport {

inline std::string random_identifier(swarmbt::RandomStream& rng) {
    static const char* const kNames[] = {"alpha", "beta", "gamma", "walk", "pick_up",
                                         "x1",    "chk",  "go",    "cond_7"};
    return kNames[rng.uniform_int(0, 8)];
}

inline std::vector<std::string> random_params(swarmbt::RandomStream& rng) {
    static const char* const kParams[] = {"red", "3", "a_b", "-1.5", "zz9"};
    std::vector<std::string> out;
    const std::int64_t count = rng.uniform_int(0, 3);
    for (std::int64_t i = 0; i < count; ++i) {
        out.push_back(kParams[rng.uniform_int(0, 4)]);
    }
    return out;
}

inline std::string random_label(swarmbt::RandomStream& rng) {
    static const char* const kLabels[] = {"", "", "C", "CK", "PK", "F", "X9"};
    return kLabels[rng.uniform_int(0, 6)];
}

/// Random structurally valid tree; depth-bounded, all node kinds reachable.
inline swarmbt::BtNode random_tree(swarmbt::RandomStream& rng, int depth = 0) {
    using swarmbt::BtNode;
    using swarmbt::NodeKind;
    const std::int64_t pick = depth >= 4 ? rng.uniform_int(4, 6) : rng.uniform_int(0, 6);
    BtNode node;
    switch (pick) {
        case 0:
        case 1:
        case 2: {
            node.kind = pick == 0 ? NodeKind::Selector
                                  : (pick == 1 ? NodeKind::Sequence : NodeKind::Parallel);
            node.label = random_label(rng);
            const std::int64_t children = rng.uniform_int(0, 3);
            for (std::int64_t i = 0; i < children; ++i) {
                node.children.push_back(random_tree(rng, depth + 1));
            }
            return node;
        }
        case 3: {
            node.kind = NodeKind::Decorator;
            if (rng.uniform_int(0, 1) == 0) {
                node.name = "invert";
            } else {
                node.name = "cooldown";
                node.params = {std::to_string(rng.uniform_int(0, 100))};
            }
            node.label = random_label(rng);
            node.children.push_back(random_tree(rng, depth + 1));
            return node;
        }
        case 4:
            node.kind = NodeKind::Condition;
            node.name = random_identifier(rng);
            node.params = random_params(rng);
            node.label = random_label(rng);
            return node;
        case 5:
            node.kind = NodeKind::Action;
            node.name = random_identifier(rng);
            node.params = random_params(rng);
            node.label = random_label(rng);
            return node;
        default: {
            node.kind = NodeKind::Slot;
            node.name = rng.uniform_int(0, 1) == 0 ? "NK" : "S2";
            node.label = node.name;
            if (depth < 4 && rng.uniform_int(0, 2) == 0) {
                const std::int64_t children = rng.uniform_int(1, 2);
                for (std::int64_t i = 0; i < children; ++i) {
                    node.children.push_back(random_tree(rng, depth + 1));
                }
            }
            return node;
        }
    }
}

/// Spearman rank correlation with tie-averaged ranks.
inline double spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
    auto ranks = [](const std::vector<double>& values) {
        std::vector<std::size_t> order(values.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&values](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        std::vector<double> rank(values.size(), 0.0);
        std::size_t i = 0;
        while (i < order.size()) {
            std::size_t j = i;
            while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
            const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
            for (std::size_t k = i; k <= j; ++k) rank[order[k]] = avg;
            i = j + 1;
        }
        return rank;
    };
    const std::vector<double> rx = ranks(xs);
    const std::vector<double> ry = ranks(ys);
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= n;
    my /= n;
    double cov = 0.0, vx = 0.0, vy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        cov += (rx[i] - mx) * (ry[i] - my);
        vx += (rx[i] - mx) * (rx[i] - mx);
        vy += (ry[i] - my) * (ry[i] - my);
    }
    if (vx == 0.0 || vy == 0.0) {
        return 0.0;
    }
    return cov / std::sqrt(vx * vy);
}

/// R^2 of the least-squares line y = a + b x.
inline double r_squared(const std::vector<double>& xs, const std::vector<double>& ys) {
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) {
        return 0.0;
    }
    const double b = sxy / sxx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double fit = my + b * (xs[i] - mx);
        ss_res += (ys[i] - fit) * (ys[i] - fit);
    }
    return 1.0 - ss_res / syy;
}

/// Protocol-trace oracle for static, fully-connected, scripted scenarios.
///
/// Assumptions matching those scenarios: every robot is stationary and in
/// range of every other; at least one robot knows the scripted sequence from
/// the start; occurrences per robot are spaced further apart than both the
/// query wait and the cooldown; responses arrive one iteration after the
/// query. Under the update modalities a robot queries only at its first
/// occurrence; under query-response-action it queries at every occurrence.
/// Eavesdropping is outside this oracle's scope (it is used for the direct
/// transfer counts only).
struct OracleResult {
    std::map<int, std::vector<std::int64_t>> query_iters;  // robot -> iterations
    std::int64_t total_queries = 0;
};

inline OracleResult protocol_query_oracle(
    const std::vector<std::pair<std::int64_t, int>>& occurrences,  // (iter, robot), sorted
    const std::vector<int>& initial_knowers, swarmbt::ModalityKind modality) {
    OracleResult result;
    std::map<int, std::int64_t> knows_at;  // robot -> iteration knowledge becomes available
    for (int robot : initial_knowers) {
        knows_at[robot] = -1;
    }
    for (const auto& [iter, robot] : occurrences) {
        const auto it = knows_at.find(robot);
        const bool knows = it != knows_at.end() && it->second <= iter;
        if (knows) {
            continue;
        }
        result.query_iters[robot].push_back(iter);
        ++result.total_queries;
        if (modality != swarmbt::ModalityKind::QRA) {
            // Response next iteration; merged knowledge is live from then on.
            knows_at[robot] = iter + 1;
        }
    }
    return result;
}

}  // namespace testsupport
