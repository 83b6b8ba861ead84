#pragma once

#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <regret_forge/game.hpp>

namespace regret_forge {

// ---------------- Kuhn poker ----------------
// Three cards, one-card deal each, one bet round with unit bet.
class KuhnState : public GameState {
public:
    KuhnState() = default;
    KuhnState(int c1, int c2, std::string h) : c1_(c1), c2_(c2), h_(std::move(h)) {}

    int player() const override {
        if (c1_ < 0 || c2_ < 0) return kChancePlayer;
        if (h_.empty()) return 0;
        if (h_ == "k" || h_ == "b") return 1;
        if (h_ == "kb") return 0;
        return kTerminalPlayer;
    }

    int num_actions() const override {
        if (c1_ < 0) return 3;
        return 2;
    }

    std::unique_ptr<GameState> child(int a) const override {
        if (c1_ < 0) return std::make_unique<KuhnState>(a, -1, "");
        if (c2_ < 0) {
            int picked = -1, seen = 0;
            for (int c = 0; c < 3; ++c) {
                if (c == c1_) continue;
                if (seen++ == a) picked = c;
            }
            return std::make_unique<KuhnState>(c1_, picked, "");
        }
        const char* acts = (h_.empty() || h_ == "k") ? "kb" : "fc";
        return std::make_unique<KuhnState>(c1_, c2_, h_ + acts[a]);
    }

    std::string action_label(int a) const override {
        if (h_.empty() || h_ == "k") return a == 0 ? "check" : "bet";
        return a == 0 ? "fold" : "call";
    }

    InfosetKey infoset_key(KeyKind /*kind*/) const override {
        InfosetKey k{player() == 0 ? c1_ : c2_};
        for (char c : h_) k.push_back(c == 'k' ? 0 : 1);
        return k;
    }

    double payoff1() const override {
        int high = c1_ > c2_ ? 1 : -1;
        if (h_ == "kk") return high;
        if (h_ == "bf") return 1;
        if (h_ == "kbf") return -1;
        return 2 * high;  // "bc" or "kbc"
    }

private:
    int c1_ = -1, c2_ = -1;
    std::string h_;
};

// ---------------- Leduc poker ----------------
// Six cards (three ranks, two suits), ante 1, raise sizes 2 then 4, at most
// two raises per round, fold only legal facing a raise, player 1 opens both
// rounds. A public card is dealt between rounds.
class LeducState : public GameState {
public:
    LeducState() = default;
    LeducState(int c1, int c2, int pub, int rnd, std::string rh, std::vector<int> hist,
               std::array<int, 2> cont, int folded)
        : c1_(c1), c2_(c2), pub_(pub), rnd_(rnd), rh_(std::move(rh)), hist_(std::move(hist)),
          cont_(cont), folded_(folded) {}

    static constexpr int kTokCheck = 0, kTokRaise = 1, kTokCall = 2, kTokFold = 3, kTokRound = 4;

    int player() const override {
        if (folded_ >= 0) return kTerminalPlayer;
        if (c1_ < 0 || c2_ < 0) return kChancePlayer;
        if (rnd_ == 0 && round_over()) return kChancePlayer;  // public card next
        if (rnd_ == 1 && round_over()) return kTerminalPlayer;
        return static_cast<int>(rh_.size()) % 2;
    }

    int num_actions() const override {
        if (c1_ < 0) return 6;
        if (c2_ < 0) return 5;
        if (rnd_ == 0 && round_over() && pub_ < 0) return 4;
        if (!rh_.empty() && rh_.back() == 'r') return raises() < 2 ? 3 : 2;
        return 2;
    }

    std::unique_ptr<GameState> child(int a) const override {
        if (c1_ < 0) {
            return std::make_unique<LeducState>(a, -1, -1, 0, "", std::vector<int>{},
                                                std::array<int, 2>{1, 1}, -1);
        }
        if (c2_ < 0) {
            return std::make_unique<LeducState>(c1_, remaining(a), -1, 0, "", std::vector<int>{},
                                                std::array<int, 2>{1, 1}, -1);
        }
        if (rnd_ == 0 && round_over() && pub_ < 0) {
            auto hist = hist_;
            hist.push_back(kTokRound);
            return std::make_unique<LeducState>(c1_, c2_, remaining(a), 1, "", std::move(hist),
                                                cont_, -1);
        }
        char act = actions()[a];
        int p = player();
        auto cont = cont_;
        int folded = -1;
        if (act == 'r') {
            cont[p] = cont[1 - p] + (rnd_ == 0 ? 2 : 4);
        } else if (act == 'c' || (act == 'k' && cont[p] != cont[1 - p])) {
            cont[p] = cont[1 - p];
        } else if (act == 'f') {
            folded = p;
        }
        auto hist = hist_;
        hist.push_back(token(act));
        return std::make_unique<LeducState>(c1_, c2_, pub_, rnd_, rh_ + act, std::move(hist),
                                            cont, folded);
    }

    std::string action_label(int a) const override {
        char act = actions()[a];
        switch (act) {
            case 'k': return "check";
            case 'r': return "raise";
            case 'c': return "call";
            default: return "fold";
        }
    }

    InfosetKey infoset_key(KeyKind /*kind*/) const override {
        InfosetKey k{player() == 0 ? c1_ : c2_, pub_};
        k.insert(k.end(), hist_.begin(), hist_.end());
        return k;
    }

    double payoff1() const override {
        if (folded_ >= 0) return folded_ == 0 ? -cont_[0] : cont_[1];
        int r1 = c1_ / 2, r2 = c2_ / 2, rp = pub_ / 2;
        if (r1 == rp && r2 != rp) return cont_[1];
        if (r2 == rp && r1 != rp) return -cont_[0];
        if (r1 > r2) return cont_[1];
        if (r2 > r1) return -cont_[0];
        return 0;
    }

private:
    bool round_over() const {
        return rh_ == "kk" || (!rh_.empty() && rh_.back() == 'c');
    }
    int raises() const {
        return static_cast<int>(std::count(rh_.begin(), rh_.end(), 'r'));
    }
    std::string actions() const {
        if (!rh_.empty() && rh_.back() == 'r') return raises() < 2 ? "fcr" : "fc";
        return "kr";
    }
    int remaining(int a) const {
        int seen = 0;
        for (int c = 0; c < 6; ++c) {
            if (c == c1_ || c == c2_) continue;
            if (seen++ == a) return c;
        }
        return -1;
    }
    static int token(char act) {
        switch (act) {
            case 'k': return kTokCheck;
            case 'r': return kTokRaise;
            case 'c': return kTokCall;
            default: return kTokFold;
        }
    }

    int c1_ = -1, c2_ = -1, pub_ = -1;
    int rnd_ = 0;
    std::string rh_;
    std::vector<int> hist_;
    std::array<int, 2> cont_{1, 1};
    int folded_ = -1;
};

// ---------------- Liar's dice ----------------
// One x-sided die each, face x wild, bids (count, face) in lexicographic
// order, each bid must raise, "liar" ends the game. Unit stakes.
class LiarsDiceState : public GameState {
public:
    explicit LiarsDiceState(int x) : x_(x) {}
    LiarsDiceState(int x, int d1, int d2, std::vector<int> bids, bool called)
        : x_(x), d1_(d1), d2_(d2), bids_(std::move(bids)), called_(called) {}

    int player() const override {
        if (called_) return kTerminalPlayer;
        if (d1_ == 0 || d2_ == 0) return kChancePlayer;
        return static_cast<int>(bids_.size()) % 2;
    }

    int num_actions() const override {
        if (d1_ == 0 || d2_ == 0) return x_;
        int last = bids_.empty() ? -1 : bids_.back();
        int rest = 2 * x_ - 1 - last;
        return rest + (bids_.empty() ? 0 : 1);
    }

    std::unique_ptr<GameState> child(int a) const override {
        if (d1_ == 0) return std::make_unique<LiarsDiceState>(x_, a + 1, 0, bids_, false);
        if (d2_ == 0) return std::make_unique<LiarsDiceState>(x_, d1_, a + 1, bids_, false);
        int last = bids_.empty() ? -1 : bids_.back();
        int rest = 2 * x_ - 1 - last;
        if (a < rest) {
            auto bids = bids_;
            bids.push_back(last + 1 + a);
            return std::make_unique<LiarsDiceState>(x_, d1_, d2_, std::move(bids), false);
        }
        return std::make_unique<LiarsDiceState>(x_, d1_, d2_, bids_, true);
    }

    std::string action_label(int a) const override {
        int last = bids_.empty() ? -1 : bids_.back();
        int rest = 2 * x_ - 1 - last;
        if (a >= rest) return "liar";
        int bid = last + 1 + a;
        return std::to_string(bid / x_ + 1) + "x" + std::to_string(bid % x_ + 1);
    }

    InfosetKey infoset_key(KeyKind /*kind*/) const override {
        InfosetKey k{player() == 0 ? d1_ : d2_};
        k.insert(k.end(), bids_.begin(), bids_.end());
        return k;
    }

    double payoff1() const override {
        int bid = bids_.back();
        int p = bid / x_ + 1, q = bid % x_ + 1;
        int cnt = (d1_ == q || d1_ == x_ ? 1 : 0) + (d2_ == q || d2_ == x_ ? 1 : 0);
        int caller = static_cast<int>(bids_.size()) % 2;
        int u_caller = cnt < p ? 1 : -1;
        return caller == 0 ? u_caller : -u_caller;
    }

private:
    int x_;
    int d1_ = 0, d2_ = 0;
    std::vector<int> bids_;
    bool called_ = false;
};

// ---------------- Goofspiel ----------------
// Fixed decreasing prize deck x, x-1, ..., 1; simultaneous card bids resolved
// when the second player moves; ties discard the prize; the forced last round
// is folded into the payoff. u1 = sign of the point difference.
//
// With revealed bids (imp=false) the conventional information partition keys
// on (round-start hands, win sequence), which merges own play orders; the
// solver partition refines it with the ordered play lists. The hidden-bid
// variant (imp=true) keys on (own plays, win sequence) in both partitions.
class GoofspielState : public GameState {
public:
    GoofspielState(int x, bool imp) : x_(x), imp_(imp) {
        for (int c = 1; c <= x; ++c) {
            h1_.push_back(c);
            h2_.push_back(c);
        }
    }
    GoofspielState(int x, bool imp, std::vector<int> h1, std::vector<int> h2, int pend,
                   std::vector<int> winseq, std::vector<int> pl1, std::vector<int> pl2)
        : x_(x), imp_(imp), h1_(std::move(h1)), h2_(std::move(h2)), pend_(pend),
          winseq_(std::move(winseq)), pl1_(std::move(pl1)), pl2_(std::move(pl2)) {}

    int player() const override {
        if (h1_.size() == 1 && pend_ == 0) return kTerminalPlayer;
        return pend_ == 0 ? 0 : 1;
    }

    int num_actions() const override {
        return static_cast<int>((pend_ == 0 ? h1_ : h2_).size());
    }

    std::unique_ptr<GameState> child(int a) const override {
        if (pend_ == 0) {
            return std::make_unique<GoofspielState>(x_, imp_, h1_, h2_, h1_[a], winseq_, pl1_,
                                                    pl2_);
        }
        int c = pend_, d = h2_[a];
        int o = c == d ? 0 : (c > d ? 1 : -1);
        std::vector<int> h1, h2;
        for (int v : h1_) if (v != c) h1.push_back(v);
        for (int v : h2_) if (v != d) h2.push_back(v);
        auto winseq = winseq_;
        winseq.push_back(o);
        auto pl1 = pl1_;
        pl1.push_back(c);
        auto pl2 = pl2_;
        pl2.push_back(d);
        return std::make_unique<GoofspielState>(x_, imp_, std::move(h1), std::move(h2), 0,
                                                std::move(winseq), std::move(pl1), std::move(pl2));
    }

    std::string action_label(int a) const override {
        return std::to_string((pend_ == 0 ? h1_ : h2_)[a]);
    }

    InfosetKey infoset_key(KeyKind kind) const override {
        InfosetKey k;
        if (imp_) {
            const auto& own = player() == 0 ? pl1_ : pl2_;
            k.push_back(static_cast<int>(own.size()));
            k.insert(k.end(), own.begin(), own.end());
            k.insert(k.end(), winseq_.begin(), winseq_.end());
            return k;
        }
        if (kind == KeyKind::stats) {
            k.push_back(static_cast<int>(h1_.size()));
            k.insert(k.end(), h1_.begin(), h1_.end());
            k.push_back(static_cast<int>(h2_.size()));
            k.insert(k.end(), h2_.begin(), h2_.end());
            k.insert(k.end(), winseq_.begin(), winseq_.end());
            return k;
        }
        const auto& own = player() == 0 ? pl1_ : pl2_;
        const auto& opp = player() == 0 ? pl2_ : pl1_;
        k.push_back(static_cast<int>(own.size()));
        k.insert(k.end(), own.begin(), own.end());
        k.push_back(static_cast<int>(opp.size()));
        k.insert(k.end(), opp.begin(), opp.end());
        return k;
    }

    double payoff1() const override {
        int c = h1_[0], d = h2_[0];
        int o = c == d ? 0 : (c > d ? 1 : -1);
        auto ws = winseq_;
        ws.push_back(o);
        int p1 = 0, p2 = 0;
        for (size_t r = 0; r < ws.size(); ++r) {
            int prize = x_ - static_cast<int>(r);
            if (ws[r] == 1) p1 += prize;
            if (ws[r] == -1) p2 += prize;
        }
        return p1 == p2 ? 0 : (p1 > p2 ? 1 : -1);
    }

private:
    int x_;
    bool imp_;
    std::vector<int> h1_, h2_;
    int pend_ = 0;
    std::vector<int> winseq_, pl1_, pl2_;
};

// ---------------- Battleship ----------------
// 2 x x grid, one 1x2 ship each (value 2), three shots each alternating with
// player 1 first, no repeating own shots, game ends at the first sink or
// after all shots. All shots and hit/miss results are public.
class BattleshipState : public GameState {
public:
    explicit BattleshipState(int x) : x_(x) {}
    BattleshipState(int x, int pl1, int pl2, std::vector<std::pair<int, bool>> s1,
                    std::vector<std::pair<int, bool>> s2)
        : x_(x), pl1_(pl1), pl2_(pl2), s1_(std::move(s1)), s2_(std::move(s2)) {}

    static std::vector<std::array<int, 2>> placements(int x) {
        std::vector<std::array<int, 2>> out;
        for (int r = 0; r < 2; ++r) {
            for (int c = 0; c + 1 < x; ++c) out.push_back({r * x + c, r * x + c + 1});
        }
        for (int c = 0; c < x; ++c) out.push_back({c, x + c});
        return out;
    }

    int player() const override {
        if (pl1_ < 0) return 0;
        if (pl2_ < 0) return 1;
        if (sunk() != 0) return kTerminalPlayer;
        if (s1_.size() == 3 && s2_.size() == 3) return kTerminalPlayer;
        return static_cast<int>(s1_.size() + s2_.size()) % 2;
    }

    int num_actions() const override {
        if (pl1_ < 0 || pl2_ < 0) return static_cast<int>(placements(x_).size());
        const auto& own = player() == 0 ? s1_ : s2_;
        return 2 * x_ - static_cast<int>(own.size());
    }

    std::unique_ptr<GameState> child(int a) const override {
        if (pl1_ < 0) return std::make_unique<BattleshipState>(x_, a, -1, s1_, s2_);
        if (pl2_ < 0) return std::make_unique<BattleshipState>(x_, pl1_, a, s1_, s2_);
        int p = player();
        int c = shot_cell(a);
        auto ships = placements(x_);
        const auto& target = p == 0 ? ships[pl2_] : ships[pl1_];
        bool hit = c == target[0] || c == target[1];
        auto s1 = s1_;
        auto s2 = s2_;
        (p == 0 ? s1 : s2).emplace_back(c, hit);
        return std::make_unique<BattleshipState>(x_, pl1_, pl2_, std::move(s1), std::move(s2));
    }

    std::string action_label(int a) const override {
        if (pl1_ < 0 || pl2_ < 0) return "place" + std::to_string(a);
        return "shot" + std::to_string(shot_cell(a));
    }

    InfosetKey infoset_key(KeyKind /*kind*/) const override {
        InfosetKey k{player() == 0 ? pl1_ : pl2_};
        for (size_t i = 0; i < 3; ++i) {
            if (i < s1_.size()) {
                k.push_back(0);
                k.push_back(s1_[i].first);
                k.push_back(s1_[i].second ? 1 : 0);
            }
            if (i < s2_.size()) {
                k.push_back(1);
                k.push_back(s2_[i].first);
                k.push_back(s2_[i].second ? 1 : 0);
            }
        }
        return k;
    }

    double payoff1() const override { return 2.0 * sunk(); }

private:
    int sunk() const {
        if (pl1_ < 0 || pl2_ < 0) return 0;
        auto ships = placements(x_);
        if (covered(ships[pl2_], s1_)) return 1;
        if (covered(ships[pl1_], s2_)) return -1;
        return 0;
    }
    static bool covered(const std::array<int, 2>& ship,
                        const std::vector<std::pair<int, bool>>& shots) {
        for (int cell : ship) {
            bool found = false;
            for (const auto& [c, h] : shots) {
                if (c == cell) { found = true; break; }
            }
            if (!found) return false;
        }
        return true;
    }
    int shot_cell(int a) const {
        const auto& own = player() == 0 ? s1_ : s2_;
        int seen = 0;
        for (int c = 0; c < 2 * x_; ++c) {
            bool used = false;
            for (const auto& [c0, h] : own) {
                if (c0 == c) { used = true; break; }
            }
            if (used) continue;
            if (seen++ == a) return c;
        }
        return -1;
    }

    int x_;
    int pl1_ = -1, pl2_ = -1;
    std::vector<std::pair<int, bool>> s1_, s2_;
};

// ---------------- Matrix game ----------------
// Player 1 picks a row, player 2 (uninformed) picks a column; u1 = U[i][j].
class MatrixGameState : public GameState {
public:
    using Matrix = std::vector<std::vector<double>>;
    explicit MatrixGameState(std::shared_ptr<const Matrix> u) : u_(std::move(u)) {}
    MatrixGameState(std::shared_ptr<const Matrix> u, int i, int j)
        : u_(std::move(u)), i_(i), j_(j) {}

    int player() const override {
        if (i_ < 0) return 0;
        if (j_ < 0) return 1;
        return kTerminalPlayer;
    }

    int num_actions() const override {
        if (i_ < 0) return static_cast<int>(u_->size());
        return static_cast<int>((*u_)[0].size());
    }

    std::unique_ptr<GameState> child(int a) const override {
        if (i_ < 0) return std::make_unique<MatrixGameState>(u_, a, -1);
        return std::make_unique<MatrixGameState>(u_, i_, a);
    }

    std::string action_label(int a) const override { return "a" + std::to_string(a + 1); }

    InfosetKey infoset_key(KeyKind /*kind*/) const override { return {}; }

    double payoff1() const override { return (*u_)[i_][j_]; }

private:
    std::shared_ptr<const Matrix> u_;
    int i_ = -1, j_ = -1;
};

inline ExtensiveGame make_matrix_game(MatrixGameState::Matrix u, std::string name) {
    if (u.empty() || u[0].empty()) throw std::invalid_argument("payoff matrix must be non-empty");
    for (const auto& row : u) {
        if (row.size() != u[0].size()) {
            throw std::invalid_argument("payoff matrix rows have unequal lengths");
        }
    }
    auto shared = std::make_shared<const MatrixGameState::Matrix>(std::move(u));
    return build_game(MatrixGameState(shared), std::move(name));
}

inline ExtensiveGame load_matrix_game_file(const std::string& path, const std::string& name) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open payoff file '" + path + "'");
    long long rows = 0, cols = 0;
    if (!(in >> rows >> cols) || rows < 1 || cols < 1) {
        throw std::invalid_argument("payoff file '" + path +
                                    "': first line must be positive 'rows cols'");
    }
    MatrixGameState::Matrix u(rows, std::vector<double>(cols, 0.0));
    for (long long i = 0; i < rows; ++i) {
        for (long long j = 0; j < cols; ++j) {
            if (!(in >> u[i][j])) {
                throw std::invalid_argument("payoff file '" + path + "': expected " +
                                            std::to_string(rows * cols) + " payoff entries");
            }
        }
    }
    std::string extra;
    if (in >> extra) {
        throw std::invalid_argument("payoff file '" + path + "': unexpected trailing data '" +
                                    extra + "'");
    }
    return make_matrix_game(std::move(u), name);
}

inline const char* valid_game_list() {
    return "kuhn, leduc, liars_dice:4, liars_dice:5, goofspiel:4, goofspiel:5, "
           "goofspiel_imp:4, goofspiel_imp:5, battleship:2, battleship:3, nfg:2, nfg:3, "
           "nfg:file=<path>";
}

inline ExtensiveGame make_game(const std::string& name) {
    auto bad = [&]() -> std::invalid_argument {
        return std::invalid_argument("unknown game '" + name + "'; valid games: " +
                                     valid_game_list());
    };
    if (name == "kuhn") return build_game(KuhnState(), name);
    if (name == "leduc") return build_game(LeducState(), name);
    if (name == "liars_dice:4") return build_game(LiarsDiceState(4), name);
    if (name == "liars_dice:5") return build_game(LiarsDiceState(5), name);
    if (name == "goofspiel:4") return build_game(GoofspielState(4, false), name);
    if (name == "goofspiel:5") return build_game(GoofspielState(5, false), name);
    if (name == "goofspiel_imp:4") return build_game(GoofspielState(4, true), name);
    if (name == "goofspiel_imp:5") return build_game(GoofspielState(5, true), name);
    if (name == "battleship:2") return build_game(BattleshipState(2), name);
    if (name == "battleship:3") return build_game(BattleshipState(3), name);
    if (name == "nfg:2") return make_matrix_game({{1, 0}, {0, 2}}, name);
    if (name == "nfg:3") return make_matrix_game({{1, 0, 5}, {0, 2, 0}, {0, 0, 100}}, name);
    if (name.rfind("nfg:file=", 0) == 0) {
        std::string path = name.substr(9);
        if (path.empty()) throw bad();
        return load_matrix_game_file(path, name);
    }
    throw bad();
}

}  // namespace regret_forge
