#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <regret_forge/sdp.hpp>

namespace regret_forge {

constexpr int kChancePlayer = -1;
constexpr int kTerminalPlayer = -2;

// Two keyings per game state. The stats partition is the conventional one
// used by the reference size table; the solver partition refines it where
// needed so that every information set has a unique own-action history
// (perfect recall). They coincide for every built-in game except Goofspiel
// with revealed bids, whose conventional counting merges play orders.
enum class KeyKind { stats, solver };

// One player's (or chance's) view of a game state. Implementations are
// immutable; child() returns a fresh state.
class GameState {
public:
    virtual ~GameState() = default;
    virtual int player() const = 0;  // 0, 1, kChancePlayer or kTerminalPlayer
    virtual int num_actions() const = 0;
    virtual std::unique_ptr<GameState> child(int a) const = 0;
    virtual double chance_prob(int /*a*/) const { return 1.0 / num_actions(); }
    virtual std::string action_label(int a) const = 0;
    // Information-set key of the acting player.
    virtual InfosetKey infoset_key(KeyKind kind) const = 0;
    virtual double payoff1() const = 0;  // player 1 utility at terminals
};

struct GameStats {
    long long histories = 0;
    long long infosets = 0;  // both players summed, stats partition
    long long terminals = 0;
    int depth = 0;  // nodes on the longest root-to-terminal path
    long long max_infoset_size = 0;
    double loss_range = 0.0;  // max minus min terminal loss for player 1
};

// Materialized game tree in flat arrays, plus the per-player information-set
// partitions. Node 0 is the root; children always have larger indices.
struct ExtensiveGame {
    struct Node {
        int32_t player = kTerminalPlayer;
        int32_t n_actions = 0;
        int32_t first_child = -1;
        int32_t infoset = -1;  // acting player's solver-partition infoset
        double u1 = 0.0;
    };

    std::string name;
    std::vector<Node> nodes;
    std::vector<int32_t> children;
    std::vector<double> chance_probs;  // parallel to children, 0 unless parent is chance

    // Solver partition, per player.
    std::array<std::vector<InfosetKey>, 2> infoset_keys;
    std::array<std::vector<std::vector<std::string>>, 2> infoset_actions;
    // Previous own (infoset, action) shared by all histories of an infoset;
    // (-1, 0) when the player has not acted yet.
    std::array<std::vector<std::pair<int, int>>, 2> infoset_parent;

    std::vector<std::string> action_labels;  // distinct decision-action labels, sorted
    GameStats stats;

    int n_infosets(int seat) const { return static_cast<int>(infoset_keys[seat].size()); }

    // Size of the global action-label set, counting the dummy root's action.
    int action_label_union() const {
        int n = static_cast<int>(action_labels.size());
        for (const auto& l : action_labels) {
            if (l == "start") return n;
        }
        return n + 1;
    }
};

namespace detail {

struct GameBuilder {
    ExtensiveGame g;
    std::array<std::map<InfosetKey, int>, 2> solver_ids;
    std::array<std::map<InfosetKey, long long>, 2> stats_count;
    std::set<std::string> labels;
    double min_loss = std::numeric_limits<double>::infinity();
    double max_loss = -std::numeric_limits<double>::infinity();

    int visit(const GameState& s, int depth, std::array<int, 2> last_set,
              std::array<int, 2> last_act) {
        int id = static_cast<int>(g.nodes.size());
        g.nodes.emplace_back();
        g.stats.histories++;
        if (depth > g.stats.depth) g.stats.depth = depth;

        int p = s.player();
        g.nodes[id].player = p;
        if (p == kTerminalPlayer) {
            double u = s.payoff1();
            g.nodes[id].u1 = u;
            g.stats.terminals++;
            min_loss = std::min(min_loss, -u);
            max_loss = std::max(max_loss, -u);
            return id;
        }

        int na = s.num_actions();
        if (na <= 0) throw std::logic_error("game state with no actions");
        g.nodes[id].n_actions = na;
        int fc = static_cast<int>(g.children.size());
        g.nodes[id].first_child = fc;
        g.children.resize(fc + na, -1);
        g.chance_probs.resize(fc + na, 0.0);

        if (p >= 0) {
            stats_count[p][s.infoset_key(KeyKind::stats)]++;
            InfosetKey key = s.infoset_key(KeyKind::solver);
            auto [it, inserted] = solver_ids[p].try_emplace(
                key, static_cast<int>(g.infoset_keys[p].size()));
            int iid = it->second;
            if (inserted) {
                g.infoset_keys[p].push_back(std::move(key));
                std::vector<std::string> acts(na);
                for (int a = 0; a < na; ++a) {
                    acts[a] = s.action_label(a);
                    labels.insert(acts[a]);
                }
                g.infoset_actions[p].push_back(std::move(acts));
                g.infoset_parent[p].push_back({last_set[p], last_act[p]});
            } else {
                if (static_cast<int>(g.infoset_actions[p][iid].size()) != na) {
                    throw std::logic_error("histories in one infoset disagree on actions");
                }
                if (g.infoset_parent[p][iid] != std::make_pair(last_set[p], last_act[p])) {
                    throw std::logic_error("solver partition lacks perfect recall");
                }
            }
            g.nodes[id].infoset = iid;
        }

        for (int a = 0; a < na; ++a) {
            auto ls = last_set;
            auto la = last_act;
            if (p >= 0) {
                ls[p] = g.nodes[id].infoset;
                la[p] = a;
            } else {
                g.chance_probs[fc + a] = s.chance_prob(a);
            }
            auto child = s.child(a);
            g.children[fc + a] = visit(*child, depth + 1, ls, la);
        }
        return id;
    }

    ExtensiveGame finish(std::string name) {
        g.name = std::move(name);
        g.stats.infosets = 0;
        g.stats.max_infoset_size = 0;
        for (int p = 0; p < 2; ++p) {
            g.stats.infosets += static_cast<long long>(stats_count[p].size());
            for (const auto& [key, count] : stats_count[p]) {
                g.stats.max_infoset_size = std::max(g.stats.max_infoset_size, count);
            }
        }
        g.stats.loss_range = max_loss - min_loss;
        g.action_labels.assign(labels.begin(), labels.end());
        return std::move(g);
    }
};

}  // namespace detail

inline ExtensiveGame build_game(const GameState& root, std::string name) {
    detail::GameBuilder b;
    b.visit(root, 1, {-1, -1}, {0, 0});
    return b.finish(std::move(name));
}

inline GameStats game_stats(const ExtensiveGame& g) { return g.stats; }

// Extracts one player's sequential decision process. Node ids are assigned
// level by level: the queue starts at the dummy root, and each node's child
// sets C(j, a) are appended in action order with ties inside a set broken by
// the information-set key. Children therefore always have larger ids than
// their parents. node_of_infoset, when given, receives the decision-node id
// of every solver-partition infoset.
inline SequentialDecisionProcess to_sdp(const ExtensiveGame& g, int seat,
                                        std::vector<int>* node_of_infoset = nullptr) {
    if (seat != 0 && seat != 1) throw std::invalid_argument("seat must be 0 or 1");
    int n_inf = g.n_infosets(seat);

    std::map<std::pair<int, int>, std::vector<int>> groups;
    for (int i = 0; i < n_inf; ++i) {
        groups[g.infoset_parent[seat][i]].push_back(i);
    }
    for (auto& [edge, members] : groups) {
        std::sort(members.begin(), members.end(), [&](int a, int b) {
            return g.infoset_keys[seat][a] < g.infoset_keys[seat][b];
        });
    }

    SequentialDecisionProcess sdp;
    sdp.nodes.push_back({{}, {"start"}, -1, 0});
    std::vector<int> node_infoset{-1};
    std::vector<std::pair<int, int>> parent_edge{{-1, -1}};  // (parent node id, action)
    std::vector<int> mapping(n_inf, -1);

    for (size_t n = 0; n < sdp.nodes.size(); ++n) {
        int i = node_infoset[n];
        int na = sdp.nodes[n].n_actions();
        for (int a = 0; a < na; ++a) {
            auto it = groups.find({i, a});
            if (it == groups.end()) continue;
            for (int ci : it->second) {
                int cid = static_cast<int>(sdp.nodes.size());
                sdp.nodes.push_back({g.infoset_keys[seat][ci], g.infoset_actions[seat][ci], 0, 0});
                node_infoset.push_back(ci);
                parent_edge.push_back({static_cast<int>(n), a});
                mapping[ci] = cid;
            }
        }
    }

    int seq = 0;
    for (auto& node : sdp.nodes) {
        node.first_seq = seq;
        seq += node.n_actions();
    }
    for (size_t n = 1; n < sdp.nodes.size(); ++n) {
        auto [pn, pa] = parent_edge[n];
        sdp.nodes[n].parent_seq = sdp.nodes[pn].first_seq + pa;
    }
    sdp.index();

    if (node_of_infoset != nullptr) *node_of_infoset = std::move(mapping);
    return sdp;
}

// Loss matrix for player 1: entry (s1, s2) sums chance reach times negated
// player-1 utility over all terminals whose last own sequences are exactly
// (s1, s2). Entries are sorted by (s1, s2).
struct SparsePayoffMatrix {
    struct Entry {
        int32_t s1 = 0;
        int32_t s2 = 0;
        double v = 0.0;
    };
    std::vector<Entry> entries;
    int n1 = 0;
    int n2 = 0;
};

// Both players' decision processes, the loss matrix, and the mapping from
// game infosets to decision-node ids.
struct GameSdp {
    std::array<SequentialDecisionProcess, 2> sdp;
    std::array<std::vector<int>, 2> node_of_infoset;
    SparsePayoffMatrix A;
};

inline SparsePayoffMatrix build_payoff_matrix(const ExtensiveGame& g) {
    GameSdp tmp;
    tmp.sdp[0] = to_sdp(g, 0, &tmp.node_of_infoset[0]);
    tmp.sdp[1] = to_sdp(g, 1, &tmp.node_of_infoset[1]);

    std::map<std::pair<int, int>, double> acc;
    struct Frame {
        int32_t node;
        int32_t s1, s2;
        double reach;
    };
    std::vector<Frame> stack{{0, 0, 0, 1.0}};
    while (!stack.empty()) {
        Frame f = stack.back();
        stack.pop_back();
        const auto& node = g.nodes[f.node];
        if (node.player == kTerminalPlayer) {
            acc[{f.s1, f.s2}] += f.reach * (-node.u1);
            continue;
        }
        for (int a = 0; a < node.n_actions; ++a) {
            Frame c = f;
            c.node = g.children[node.first_child + a];
            if (node.player == kChancePlayer) {
                c.reach *= g.chance_probs[node.first_child + a];
            } else {
                int sdp_node = tmp.node_of_infoset[node.player][node.infoset];
                int s = tmp.sdp[node.player].nodes[sdp_node].first_seq + a;
                if (node.player == 0) c.s1 = s; else c.s2 = s;
            }
            stack.push_back(c);
        }
    }

    SparsePayoffMatrix A;
    A.n1 = tmp.sdp[0].n_seqs;
    A.n2 = tmp.sdp[1].n_seqs;
    A.entries.reserve(acc.size());
    for (const auto& [key, v] : acc) {
        A.entries.push_back({key.first, key.second, v});
    }
    return A;
}

inline GameSdp link_game(const ExtensiveGame& g) {
    GameSdp out;
    out.sdp[0] = to_sdp(g, 0, &out.node_of_infoset[0]);
    out.sdp[1] = to_sdp(g, 1, &out.node_of_infoset[1]);
    out.A = build_payoff_matrix(g);
    return out;
}

// Loss vector over the acting player's sequences given the opponent's
// sequence-form strategy: A y for player 1, -A^T x for player 2. Works off
// the sparse entries directly.
inline std::vector<double> loss_gradient(const SparsePayoffMatrix& A,
                                         const std::vector<double>& opp, int seat) {
    if (seat == 0) {
        if (static_cast<int>(opp.size()) != A.n2) {
            throw std::invalid_argument("loss_gradient: opponent strategy has wrong dimension");
        }
        std::vector<double> out(A.n1, 0.0);
        for (const auto& e : A.entries) out[e.s1] += e.v * opp[e.s2];
        return out;
    }
    if (seat == 1) {
        if (static_cast<int>(opp.size()) != A.n1) {
            throw std::invalid_argument("loss_gradient: opponent strategy has wrong dimension");
        }
        std::vector<double> out(A.n2, 0.0);
        for (const auto& e : A.entries) out[e.s2] -= e.v * opp[e.s1];
        return out;
    }
    throw std::invalid_argument("seat must be 0 or 1");
}

inline double bilinear_value(const SparsePayoffMatrix& A, const std::vector<double>& x,
                             const std::vector<double>& y) {
    double v = 0.0;
    for (const auto& e : A.entries) v += e.v * x[e.s1] * y[e.s2];
    return v;
}

// Expected player-1 loss by direct tree traversal with per-infoset behavior
// strategies; independent of the payoff matrix, used to audit it.
inline double expected_loss_tree(const ExtensiveGame& g,
                                 const std::vector<std::vector<double>>& behavior0,
                                 const std::vector<std::vector<double>>& behavior1) {
    std::function<double(int)> eval = [&](int id) -> double {
        const auto& node = g.nodes[id];
        if (node.player == kTerminalPlayer) return -node.u1;
        double v = 0.0;
        for (int a = 0; a < node.n_actions; ++a) {
            double p;
            if (node.player == kChancePlayer) {
                p = g.chance_probs[node.first_child + a];
            } else {
                const auto& b = node.player == 0 ? behavior0 : behavior1;
                p = b[node.infoset][a];
            }
            if (p == 0.0) continue;
            v += p * eval(g.children[node.first_child + a]);
        }
        return v;
    };
    return eval(0);
}

}  // namespace regret_forge
