#include "gamest/game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace gamest {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::invalid_argument: return "invalid_argument";
        case ErrorCode::malformed_session: return "malformed_session";
        case ErrorCode::unsupported_shape: return "unsupported_shape";
        case ErrorCode::no_completely_mixed_equilibrium: return "no_completely_mixed_equilibrium";
        case ErrorCode::non_convergence: return "non_convergence";
        case ErrorCode::indeterminate_equilibrium: return "indeterminate_equilibrium";
        case ErrorCode::no_interior_balance: return "no_interior_balance";
        case ErrorCode::uninformative_data: return "uninformative_data";
        case ErrorCode::pole: return "pole";
        case ErrorCode::insufficient_data: return "insufficient_data";
        case ErrorCode::empty_task: return "empty_task";
        case ErrorCode::undefined_metrics: return "undefined_metrics";
        case ErrorCode::parse_error: return "parse_error";
    }
    return "unknown";
}

GameSpec::GameSpec(int rows_, int cols_, std::vector<double> u_row_, std::vector<double> u_col_)
    : rows(rows_), cols(cols_), u_row(std::move(u_row_)), u_col(std::move(u_col_)) {
    if (rows < 2 || cols < 2)
        throw Error(ErrorCode::invalid_argument, "game needs at least two actions per player");
    const std::size_t n = static_cast<std::size_t>(rows) * cols;
    if (u_row.size() != n || u_col.size() != n)
        throw Error(ErrorCode::invalid_argument, "utility table size does not match rows*cols");
    for (double v : u_row)
        if (!std::isfinite(v)) throw Error(ErrorCode::invalid_argument, "non-finite row utility");
    for (double v : u_col)
        if (!std::isfinite(v)) throw Error(ErrorCode::invalid_argument, "non-finite col utility");
}

GameSpec GameSpec::transposed() const {
    GameSpec t;
    t.rows = cols;
    t.cols = rows;
    t.u_row.resize(u_col.size());
    t.u_col.resize(u_row.size());
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            t.u_row[static_cast<std::size_t>(c) * rows + r] = u(Player::col, r, c);
            t.u_col[static_cast<std::size_t>(c) * rows + r] = u(Player::row, r, c);
        }
    }
    return t;
}

namespace {

void check_cell(const GameSpec& g, const HiddenCell& cell) {
    if (cell.r < 0 || cell.r >= g.rows || cell.c < 0 || cell.c >= g.cols)
        throw Error(ErrorCode::invalid_argument, "hidden cell outside the game table");
}

}  // namespace

MaskedGame::MaskedGame(GameSpec base, HiddenCell hidden)
    : base_(std::move(base)), hidden_(hidden) {
    check_cell(base_, hidden_);
    base_.set(hidden_.owner, hidden_.r, hidden_.c, 0.0);
}

MaskedGame MaskedGame::hide(const GameSpec& game, HiddenCell hidden) {
    check_cell(game, hidden);
    MaskedGame m(game, hidden);
    m.true_value_ = game.u(hidden.owner, hidden.r, hidden.c);
    return m;
}

double MaskedGame::u(Player p, int r, int c) const {
    if (p == hidden_.owner && r == hidden_.r && c == hidden_.c)
        throw Error(ErrorCode::invalid_argument, "read of the hidden cell through the masked view");
    return base_.u(p, r, c);
}

GameSpec MaskedGame::with_value(double x) const {
    GameSpec g = base_;
    g.set(hidden_.owner, hidden_.r, hidden_.c, x);
    return g;
}

MaskedGame MaskedGame::transposed() const {
    MaskedGame t(base_.transposed(),
                 HiddenCell{opponent(hidden_.owner), hidden_.c, hidden_.r});
    t.true_value_ = true_value_;
    return t;
}

void MethodConfig::validate() const {
    if (!(lambda_qre > 0.0))
        throw Error(ErrorCode::invalid_argument, "lambda_qre must be positive");
    if (n_ase < 1 || n_pse < 1)
        throw Error(ErrorCode::invalid_argument, "sample sizes must be at least 1");
    if (!(lambda_qr >= 0.0))
        throw Error(ErrorCode::invalid_argument, "lambda_qr must be non-negative");
    if (!(grid_lo < grid_hi) || !(grid_step > 0.0))
        throw Error(ErrorCode::invalid_argument, "grid requires lo < hi and step > 0");
    if (grid_size() < 2) throw Error(ErrorCode::invalid_argument, "grid needs at least 2 points");
}

int MethodConfig::grid_size() const {
    return static_cast<int>(std::floor((grid_hi - grid_lo) / grid_step + 1e-9)) + 1;
}

EmpiricalFrequencies frequencies(const SessionData& session, int rows, int cols) {
    if (session.periods() < 1)
        throw Error(ErrorCode::malformed_session, "session has no plays");
    std::vector<double> row_counts(rows, 0.0), col_counts(cols, 0.0);
    for (const auto& play : session.plays) {
        if (play[0] < 0 || play[0] >= rows || play[1] < 0 || play[1] >= cols)
            throw Error(ErrorCode::malformed_session,
                        "play (" + std::to_string(play[0]) + "," + std::to_string(play[1]) +
                            ") outside the game's action ranges");
        row_counts[play[0]] += 1.0;
        col_counts[play[1]] += 1.0;
    }
    const double t = static_cast<double>(session.periods());
    for (double& v : row_counts) v /= t;
    for (double& v : col_counts) v /= t;
    return {std::move(row_counts), std::move(col_counts)};
}

EmpiricalFrequencies frequencies(const SessionData& session, const GameSpec& game) {
    return frequencies(session, game.rows, game.cols);
}

double security_level(const GameSpec& game, Player player) {
    const int own = game.actions(player);
    const int other = game.actions(opponent(player));
    double best = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < own; ++a) {
        double worst = std::numeric_limits<double>::infinity();
        for (int b = 0; b < other; ++b) {
            const double v = player == Player::row ? game.u(player, a, b) : game.u(player, b, a);
            worst = std::min(worst, v);
        }
        best = std::max(best, worst);
    }
    return best;
}

namespace {

// Keep utilities at or below the security level; pull the rest halfway back.
double pull_toward(double s, double u) { return u <= s ? u : 0.5 * (s + u); }

}  // namespace

TransformedGame transform(const GameSpec& game) {
    TransformedGame t;
    t.rows = game.rows;
    t.cols = game.cols;
    t.s_row = security_level(game, Player::row);
    t.s_col = security_level(game, Player::col);
    t.u_tr_row.resize(game.u_row.size());
    t.u_tr_col.resize(game.u_col.size());
    for (std::size_t i = 0; i < game.u_row.size(); ++i) {
        t.u_tr_row[i] = pull_toward(t.s_row, game.u_row[i]);
        t.u_tr_col[i] = pull_toward(t.s_col, game.u_col[i]);
    }
    return t;
}

ImpulseMatrix impulses(const TransformedGame& tgame) {
    if (tgame.rows != 2 || tgame.cols != 2)
        throw Error(ErrorCode::unsupported_shape, "impulses are defined for binary action spaces");
    ImpulseMatrix m;
    m.rows = 2;
    m.cols = 2;
    m.imp_row.resize(4);
    m.imp_col.resize(4);
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
            const std::size_t i = static_cast<std::size_t>(r) * 2 + c;
            m.imp_row[i] = std::max(0.0, tgame.u(Player::row, 1 - r, c) - tgame.u(Player::row, r, c));
            m.imp_col[i] = std::max(0.0, tgame.u(Player::col, r, 1 - c) - tgame.u(Player::col, r, c));
        }
    }
    return m;
}

}  // namespace gamest
