#pragma once

#include <array>
#include <optional>
#include <vector>

#include "gamest/error.hpp"

namespace gamest {

enum class Player { row, col };

inline Player opponent(Player p) { return p == Player::row ? Player::col : Player::row; }

/// A two-player normal-form game given by one utility table per player.
/// Tables are row-major over joint profiles (row action, column action);
/// action index 0 is U for the row player and L for the column player.
struct GameSpec {
    int rows = 0;
    int cols = 0;
    std::vector<double> u_row;
    std::vector<double> u_col;

    GameSpec() = default;
    GameSpec(int rows_, int cols_, std::vector<double> u_row_, std::vector<double> u_col_);

    double u(Player p, int r, int c) const {
        return (p == Player::row ? u_row : u_col)[static_cast<std::size_t>(r) * cols + c];
    }
    void set(Player p, int r, int c, double v) {
        (p == Player::row ? u_row : u_col)[static_cast<std::size_t>(r) * cols + c] = v;
    }
    int actions(Player p) const { return p == Player::row ? rows : cols; }
    bool is_2x2() const { return rows == 2 && cols == 2; }

    /// The same game seen with the players swapped: the column player of this
    /// game becomes the row player of the result.
    GameSpec transposed() const;
};

/// Identifies one utility cell: the player it belongs to plus the joint
/// profile indices (always row index, column index, for either owner).
struct HiddenCell {
    Player owner = Player::row;
    int r = 0;
    int c = 0;

    bool operator==(const HiddenCell&) const = default;
};

/// A game with exactly one utility cell hidden. Reading the hidden cell is
/// an error; estimators see only the remaining seven values.
class MaskedGame {
  public:
    /// Wrap a game whose hidden cell value is unknown (file-loaded input).
    /// Whatever the table held at the hidden position is discarded.
    MaskedGame(GameSpec base, HiddenCell hidden);

    /// Evaluation mode: hide a cell of a fully known game, remembering the
    /// true value for later scoring.
    static MaskedGame hide(const GameSpec& game, HiddenCell hidden);

    int rows() const { return base_.rows; }
    int cols() const { return base_.cols; }
    const HiddenCell& hidden() const { return hidden_; }
    std::optional<double> true_value() const { return true_value_; }

    /// Utility access through the mask; throws on the hidden cell.
    double u(Player p, int r, int c) const;

    /// The completed game with the hidden cell set to x.
    GameSpec with_value(double x) const;

    MaskedGame transposed() const;

  private:
    GameSpec base_;  // hidden cell zeroed; never read there
    HiddenCell hidden_;
    std::optional<double> true_value_;
};

/// One session of repeated play: the joint action sequence, period by period.
struct SessionData {
    std::vector<std::array<int, 2>> plays;  // {row action, col action}

    int periods() const { return static_cast<int>(plays.size()); }
};

struct EmpiricalFrequencies {
    std::vector<double> p_row;
    std::vector<double> p_col;

    EmpiricalFrequencies swapped() const { return {p_col, p_row}; }
};

/// A model-produced strategy profile; same shape as EmpiricalFrequencies but
/// filled by a solver rather than counted from data.
struct MixedProfile {
    std::vector<double> p_row;
    std::vector<double> p_col;

    double p_first(Player p) const { return (p == Player::row ? p_row : p_col)[0]; }
    MixedProfile swapped() const { return {p_col, p_row}; }
};

inline EmpiricalFrequencies as_frequencies(const MixedProfile& m) { return {m.p_row, m.p_col}; }

/// The loss-doubling transform of a game: utilities above a player's pure
/// maximin security level are pulled halfway back toward it.
struct TransformedGame {
    int rows = 0;
    int cols = 0;
    std::vector<double> u_tr_row;
    std::vector<double> u_tr_col;
    double s_row = 0.0;
    double s_col = 0.0;

    double u(Player p, int r, int c) const {
        return (p == Player::row ? u_tr_row : u_tr_col)[static_cast<std::size_t>(r) * cols + c];
    }
    double security(Player p) const { return p == Player::row ? s_row : s_col; }
};

/// Per-profile foregone transformed utility toward the player's other action
/// (binary action spaces only). imp(p, r, c) is what player p missed at
/// profile (r, c) by not having played her other action.
struct ImpulseMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> imp_row;
    std::vector<double> imp_col;

    double imp(Player p, int r, int c) const {
        return (p == Player::row ? imp_row : imp_col)[static_cast<std::size_t>(r) * cols + c];
    }
};

/// Estimator parameters. Defaults are the evaluation preset: logit precision
/// 1.05, sample sizes 12 (action sampling) and 6 (payoff sampling), regret
/// aversion 3, and a uniform candidate grid over [0, 22] in steps of 0.01.
struct MethodConfig {
    double lambda_qre = 1.05;
    int n_ase = 12;
    int n_pse = 6;
    double lambda_qr = 3.0;
    double grid_lo = 0.0;
    double grid_hi = 22.0;
    double grid_step = 0.01;

    void validate() const;
    int grid_size() const;
    double grid_point(int i) const { return grid_lo + i * grid_step; }
    double clamp_to_grid(double x) const {
        return x < grid_lo ? grid_lo : (x > grid_hi ? grid_hi : x);
    }
};

/// Empirical action frequencies of one session. Errors if any play index is
/// out of range for the game.
EmpiricalFrequencies frequencies(const SessionData& session, const GameSpec& game);
EmpiricalFrequencies frequencies(const SessionData& session, int rows, int cols);

/// Pure-strategy maximin: the utility a player can guarantee with a single
/// pure action regardless of the opponent.
double security_level(const GameSpec& game, Player player);

TransformedGame transform(const GameSpec& game);

/// Impulses from the transformed game; requires two actions per player.
ImpulseMatrix impulses(const TransformedGame& tgame);

}  // namespace gamest
