#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace regret_forge {

// Information-set keys are integer vectors compared lexicographically.
// Variable-length components are length-prefixed by the games so that
// distinct observations never map to the same key.
using InfosetKey = std::vector<int>;

struct LocalStrategy {
    int node_id = 0;
    std::vector<double> probs;
};

// One player's view of the game: a tree of decision nodes (the player picks
// an action) and observation nodes (the player receives a signal). Every
// decision node except the dummy root hangs off exactly one parent sequence,
// i.e. one (node, action) pair of an ancestor decision node.
struct DecisionNode {
    InfosetKey key;                    // empty at the dummy root
    std::vector<std::string> actions;  // action labels, size n_j
    int parent_seq = -1;               // -1 only at the dummy root
    int first_seq = 0;                 // sequences of this node are [first_seq, first_seq + n_j)
    int n_actions() const { return static_cast<int>(actions.size()); }
};

// Observation node following one sequence; each signal leads to one child
// decision node. Sequences whose continuations are all terminal have no
// observation node.
struct ObservationNode {
    int parent_seq = -1;
    std::vector<int> signals;  // child decision node ids, one per signal
};

class SequentialDecisionProcess {
public:
    std::vector<DecisionNode> nodes;  // node 0 is the dummy root; children have larger ids
    std::vector<ObservationNode> observation_nodes;
    std::vector<std::vector<int>> seq_children;  // sequence -> child decision node ids
    int n_seqs = 0;

    int n_nodes() const { return static_cast<int>(nodes.size()); }

    // Assigns sequence indices in node order (the dummy root's single action
    // is sequence 0) and derives child lists and observation nodes from the
    // parent_seq fields. Call once after filling nodes.
    void index() {
        n_seqs = 0;
        for (auto& node : nodes) {
            node.first_seq = n_seqs;
            n_seqs += node.n_actions();
        }
        seq_children.assign(n_seqs, {});
        for (int n = 1; n < n_nodes(); ++n) {
            seq_children[nodes[n].parent_seq].push_back(n);
        }
        observation_nodes.clear();
        for (int s = 0; s < n_seqs; ++s) {
            if (!seq_children[s].empty()) {
                observation_nodes.push_back({s, seq_children[s]});
            }
        }
    }

    int node_of_seq(int s) const {
        // nodes are ordered by first_seq, so binary search works
        int lo = 0, hi = n_nodes() - 1;
        while (lo < hi) {
            int mid = (lo + hi + 1) / 2;
            if (nodes[mid].first_seq <= s) lo = mid; else hi = mid - 1;
        }
        return lo;
    }

    // Path products of local probabilities. locals[n] must hold node n's
    // distribution; an empty entry counts as missing.
    std::vector<double> build_sequence_form(const std::vector<std::vector<double>>& locals) const {
        if (static_cast<int>(locals.size()) < n_nodes()) {
            throw std::invalid_argument("missing local strategy for decision node " +
                                        std::to_string(locals.size()));
        }
        std::vector<double> seq(n_seqs, 0.0);
        for (int n = 0; n < n_nodes(); ++n) {
            const auto& node = nodes[n];
            if (static_cast<int>(locals[n].size()) != node.n_actions()) {
                throw std::invalid_argument("missing local strategy for decision node " +
                                            std::to_string(n));
            }
            double reach = (n == 0) ? 1.0 : seq[node.parent_seq];
            for (int a = 0; a < node.n_actions(); ++a) {
                seq[node.first_seq + a] = reach * locals[n][a];
            }
        }
        return seq;
    }

    // Inverse of build_sequence_form; zero-reach nodes get the uniform
    // distribution (the 0/0 convention).
    std::vector<std::vector<double>> decompose(const std::vector<double>& seq) const {
        auto report = validate_seq(seq);
        if (!report.empty()) {
            throw std::invalid_argument("sequence-form strategy invalid: " + report.front());
        }
        std::vector<std::vector<double>> locals(n_nodes());
        for (int n = 0; n < n_nodes(); ++n) {
            const auto& node = nodes[n];
            double mass = (n == 0) ? 1.0 : seq[node.parent_seq];
            locals[n].resize(node.n_actions());
            for (int a = 0; a < node.n_actions(); ++a) {
                locals[n][a] = mass > 0.0 ? seq[node.first_seq + a] / mass
                                          : 1.0 / node.n_actions();
            }
        }
        return locals;
    }

    std::vector<std::vector<double>> uniform_locals() const {
        std::vector<std::vector<double>> locals(n_nodes());
        for (int n = 0; n < n_nodes(); ++n) {
            locals[n].assign(nodes[n].n_actions(), 1.0 / nodes[n].n_actions());
        }
        return locals;
    }

    std::vector<double> uniform_sequence_form() const {
        return build_sequence_form(uniform_locals());
    }

    // Structural invariant report; empty means well formed.
    std::vector<std::string> validate() const {
        std::vector<std::string> report;
        if (nodes.empty()) {
            report.push_back("no decision nodes");
            return report;
        }
        if (!nodes[0].key.empty() || nodes[0].n_actions() != 1 || nodes[0].parent_seq != -1) {
            report.push_back("node 0 is not a dummy root with exactly one action");
        }
        for (int n = 1; n < n_nodes(); ++n) {
            const auto& node = nodes[n];
            if (node.parent_seq < 0 || node.parent_seq >= n_seqs) {
                report.push_back("node " + std::to_string(n) + " has out-of-range parent sequence");
                continue;
            }
            if (node_of_seq(node.parent_seq) >= n) {
                report.push_back("node " + std::to_string(n) + " precedes its parent sequence");
            }
            if (node.n_actions() == 0) {
                report.push_back("node " + std::to_string(n) + " has no actions");
            }
        }
        for (const auto& obs : observation_nodes) {
            if (obs.signals != seq_children[obs.parent_seq]) {
                report.push_back("observation node at sequence " + std::to_string(obs.parent_seq) +
                                 " disagrees with the child sets");
            }
        }
        return report;
    }

    // Flow-conservation report for a sequence-form vector; empty means valid.
    std::vector<std::string> validate_seq(const std::vector<double>& seq, double tol = 1e-12) const {
        std::vector<std::string> report;
        if (static_cast<int>(seq.size()) != n_seqs) {
            report.push_back("dimension mismatch: expected " + std::to_string(n_seqs) +
                             " sequences, got " + std::to_string(seq.size()));
            return report;
        }
        if (std::fabs(seq[0] - 1.0) > tol) {
            report.push_back("root sequence mass is " + std::to_string(seq[0]) + ", expected 1");
        }
        for (double v : seq) {
            if (v < -tol || v > 1.0 + tol) {
                report.push_back("entry " + std::to_string(v) + " outside [0, 1]");
                break;
            }
        }
        for (int n = 1; n < n_nodes(); ++n) {
            const auto& node = nodes[n];
            double sum = 0.0;
            for (int a = 0; a < node.n_actions(); ++a) sum += seq[node.first_seq + a];
            if (std::fabs(sum - seq[node.parent_seq]) > tol) {
                report.push_back("flow constraint violated at decision node " + std::to_string(n));
            }
        }
        return report;
    }
};

inline std::vector<double> normalize_simplex(const std::vector<double>& v) {
    double sum = 0.0;
    for (double x : v) {
        if (x < 0.0) throw std::invalid_argument("normalize_simplex: negative entry");
        sum += x;
    }
    std::vector<double> out(v.size());
    if (sum > 0.0) {
        for (size_t i = 0; i < v.size(); ++i) out[i] = v[i] / sum;
    } else {
        out.assign(v.size(), 1.0 / static_cast<double>(v.size()));
    }
    return out;
}

}  // namespace regret_forge
