#pragma once

#include <cmath>
#include <vector>

#include "gamest/game.hpp"
#include "gamest/rng.hpp"
#include "gamest/solvers.hpp"

namespace gamest::test {

inline GameSpec game_2x2(std::vector<double> u_row, std::vector<double> u_col) {
    return GameSpec(2, 2, std::move(u_row), std::move(u_col));
}

inline GameSpec random_game(SplitMix64& rng, double lo = 0.0, double hi = 22.0) {
    std::vector<double> u_row(4), u_col(4);
    for (double& v : u_row) v = lo + (hi - lo) * rng.next_double();
    for (double& v : u_col) v = lo + (hi - lo) * rng.next_double();
    return game_2x2(std::move(u_row), std::move(u_col));
}

inline bool has_pure_equilibrium(const GameSpec& g) {
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
            if (g.u(Player::row, r, c) >= g.u(Player::row, 1 - r, c) &&
                g.u(Player::col, r, c) >= g.u(Player::col, r, 1 - c))
                return true;
    return false;
}

/// Rejection-samples a game of the completely mixed kind: no pure
/// equilibrium, and the unique mixed equilibrium keeps some margin from the
/// boundary.
inline GameSpec random_mixed_game(SplitMix64& rng, double margin = 0.02) {
    for (;;) {
        GameSpec g = random_game(rng);
        if (has_pure_equilibrium(g)) continue;
        try {
            const SolveReport ne = solve_ne_2x2(g);
            const double pu = ne.profile.p_row[0], pl = ne.profile.p_col[0];
            if (pu > margin && pu < 1.0 - margin && pl > margin && pl < 1.0 - margin) return g;
        } catch (const Error&) {
        }
    }
}

// -- independent oracles (test-only reimplementations) ----------------------

/// Maximin by plain enumeration.
inline double oracle_security(const GameSpec& g, Player p) {
    double best = -1e300;
    for (int a = 0; a < g.actions(p); ++a) {
        double worst = 1e300;
        for (int b = 0; b < g.actions(opponent(p)); ++b) {
            const double v = p == Player::row ? g.u(p, a, b) : g.u(p, b, a);
            if (v < worst) worst = v;
        }
        if (worst > best) best = worst;
    }
    return best;
}

/// Scalar transform rule applied cell by cell.
inline double oracle_transform_cell(double u, double s) {
    if (u <= s) return u;
    return (s + u) / 2.0;
}

/// Integer Pascal-triangle binomial coefficients.
inline long long oracle_binom(int n, int k) {
    std::vector<std::vector<long long>> pascal(n + 1);
    for (int i = 0; i <= n; ++i) {
        pascal[i].assign(i + 1, 1);
        for (int j = 1; j < i; ++j) pascal[i][j] = pascal[i - 1][j - 1] + pascal[i - 1][j];
    }
    return pascal[n][k];
}

/// Action-sampling choice probability of the row player's first action,
/// written against sample payoff sums rather than rearranged differences.
inline double oracle_ase_prob_row(const GameSpec& g, int n, double q) {
    long double p = 0.0L;
    for (int k = 0; k <= n; ++k) {
        const long double sum_first = k * (long double)g.u(Player::row, 0, 0) +
                                      (n - k) * (long double)g.u(Player::row, 0, 1);
        const long double sum_second = k * (long double)g.u(Player::row, 1, 0) +
                                       (n - k) * (long double)g.u(Player::row, 1, 1);
        long double alpha = 0.0L;
        if (sum_first > sum_second)
            alpha = 1.0L;
        else if (sum_first == sum_second)
            alpha = 0.5L;
        long double w = (long double)oracle_binom(n, k);
        for (int i = 0; i < k; ++i) w *= q;
        for (int i = 0; i < n - k; ++i) w *= (1.0L - q);
        p += w * alpha;
    }
    return static_cast<double>(p);
}

/// Payoff-sampling choice probability, long-double accumulation.
inline double oracle_pse_prob_row(const GameSpec& g, int n, double q) {
    long double p = 0.0L;
    for (int k1 = 0; k1 <= n; ++k1) {
        long double w1 = (long double)oracle_binom(n, k1);
        for (int i = 0; i < k1; ++i) w1 *= q;
        for (int i = 0; i < n - k1; ++i) w1 *= (1.0L - q);
        const long double sum_first = k1 * (long double)g.u(Player::row, 0, 0) +
                                      (n - k1) * (long double)g.u(Player::row, 0, 1);
        for (int k2 = 0; k2 <= n; ++k2) {
            long double w2 = (long double)oracle_binom(n, k2);
            for (int i = 0; i < k2; ++i) w2 *= q;
            for (int i = 0; i < n - k2; ++i) w2 *= (1.0L - q);
            const long double sum_second = k2 * (long double)g.u(Player::row, 1, 0) +
                                           (n - k2) * (long double)g.u(Player::row, 1, 1);
            if (sum_first > sum_second)
                p += w1 * w2;
            else if (sum_first == sum_second)
                p += 0.5L * w1 * w2;
        }
    }
    return static_cast<double>(p);
}

}  // namespace gamest::test
