#pragma once

#include <cstdint>
#include <vector>

#include "gamest/game.hpp"

namespace gamest {

/// Result of a forward equilibrium solve. `residual` is the largest absolute
/// violation of the concept's defining equations at `profile`. When a scan
/// finds several fixed points, `all_profiles` holds them ordered by the row
/// player's first-action probability, and `profile` is the first of them.
struct SolveReport {
    MixedProfile profile;
    double residual = 0.0;
    int iterations = 0;
    std::vector<MixedProfile> all_profiles;
};

/// Completely mixed equilibrium of a 2x2 game in closed form. Errors when a
/// denominator vanishes or the solution leaves the open unit interval.
SolveReport solve_ne_2x2(const GameSpec& game);

/// Logit equilibrium for a two-player game of any shape: a fixed point of
/// the softmax response map with precision lambda. Damped iteration with a
/// bisection fallback on the one-dimensional reduced map for 2x2 games.
SolveReport solve_qre(const GameSpec& game, double lambda);

/// Action-sampling equilibrium: each player best-responds to a size-n_s
/// sample of opponent actions; choice probabilities are binomial mixtures of
/// the per-sample best responses.
SolveReport solve_ase_2x2(const GameSpec& game, int n_s);

/// Payoff-sampling equilibrium: each player draws one size-n_s sample per own
/// action and plays the action whose sample payoff sum is highest (ties split
/// evenly).
SolveReport solve_pse_2x2(const GameSpec& game, int n_s);

/// Impulse-balance equilibrium: expected impulses toward either action are
/// equal for both players, with impulses taken on the transformed game. Both
/// balance equations are linear in the opponent probability and solved
/// exactly.
SolveReport solve_ibe_2x2(const GameSpec& game);

/// Draw T i.i.d. joint plays from a profile. Deterministic in (profile, T,
/// seed): per period the row action is drawn first, then the column action,
/// each by inverting the cumulative distribution at a SplitMix64 uniform.
SessionData simulate(const MixedProfile& profile, int periods, std::uint64_t seed);

/// Choice probability of `owner`'s first action under action sampling when
/// the opponent plays her own first action with probability q. This is the
/// right-hand side of the equilibrium equation; exposed for estimators.
double ase_choice_prob(const GameSpec& game, Player owner, int n_s, double q);

/// Same for payoff sampling (double binomial mixture over the two samples).
double pse_choice_prob(const GameSpec& game, Player owner, int n_s, double q);

/// Logit response probability of `owner`'s action `action` when the opponent
/// mixes according to `opp` (distribution over opponent actions).
double logit_choice_prob(const GameSpec& game, Player owner, int action,
                         const std::vector<double>& opp, double lambda);

}  // namespace gamest
