#include "gamest/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "gamest/rng.hpp"

namespace gamest {

namespace {

void require_2x2(const GameSpec& game, const char* what) {
    if (!game.is_2x2())
        throw Error(ErrorCode::unsupported_shape, std::string(what) + " requires a 2x2 game");
}

// Binomial coefficients C(n, 0..n), exact in double for the sample sizes in use.
std::vector<double> binomial_row(int n) {
    std::vector<double> c(n + 1, 1.0);
    for (int k = 1; k <= n; ++k) c[k] = c[k - 1] * (n - k + 1) / k;
    return c;
}

// w_k = C(n,k) q^k (1-q)^{n-k}; endpoints handled so q in {0,1} puts all mass
// on a single count.
std::vector<double> binomial_weights(int n, double q) {
    std::vector<double> w(n + 1, 0.0);
    if (q <= 0.0) {
        w[0] = 1.0;
        return w;
    }
    if (q >= 1.0) {
        w[n] = 1.0;
        return w;
    }
    const std::vector<double> c = binomial_row(n);
    for (int k = 0; k <= n; ++k) w[k] = c[k] * std::pow(q, k) * std::pow(1.0 - q, n - k);
    return w;
}

// Probability of playing the first row action after best-responding to a
// sample with k observations of the opponent's first action (ties mix evenly).
double ase_alpha_row(const GameSpec& g, int n_s, int k) {
    const double gain_first = g.u(Player::row, 0, 0) - g.u(Player::row, 1, 0);
    const double gain_second = g.u(Player::row, 1, 1) - g.u(Player::row, 0, 1);
    const double lhs = k * gain_first;
    const double rhs = (n_s - k) * gain_second;
    if (lhs > rhs) return 1.0;
    if (lhs == rhs) return 0.5;
    return 0.0;
}

double ase_choice_prob_row(const GameSpec& g, int n_s, double q) {
    const std::vector<double> w = binomial_weights(n_s, q);
    double p = 0.0;
    for (int k = 0; k <= n_s; ++k) p += w[k] * ase_alpha_row(g, n_s, k);
    return p;
}

double pse_choice_prob_row(const GameSpec& g, int n_s, double q) {
    const std::vector<double> w = binomial_weights(n_s, q);
    const double u00 = g.u(Player::row, 0, 0), u01 = g.u(Player::row, 0, 1);
    const double u10 = g.u(Player::row, 1, 0), u11 = g.u(Player::row, 1, 1);
    double p = 0.0;
    for (int k_first = 0; k_first <= n_s; ++k_first) {
        const double sum_first = k_first * u00 + (n_s - k_first) * u01;
        for (int k_second = 0; k_second <= n_s; ++k_second) {
            const double sum_second = k_second * u10 + (n_s - k_second) * u11;
            double alpha;
            if (sum_first > sum_second)
                alpha = 1.0;
            else if (sum_first == sum_second)
                alpha = 0.5;
            else
                alpha = 0.0;
            if (alpha != 0.0) p += w[k_first] * w[k_second] * alpha;
        }
    }
    return p;
}

// All roots of f on [0,1], found by a fine scan plus bisection on every sign
// change. Roots closer than 1e-9 are merged.
std::vector<double> scan_unit_roots(const std::function<double(double)>& f, double scan_step,
                                    int* iterations) {
    std::vector<double> roots;
    const int n = static_cast<int>(std::ceil(1.0 / scan_step));
    double prev_x = 0.0;
    double prev_f = f(0.0);
    if (prev_f == 0.0) roots.push_back(0.0);
    for (int i = 1; i <= n; ++i) {
        const double x = std::min(1.0, i * scan_step);
        const double fx = f(x);
        if (fx == 0.0) {
            roots.push_back(x);
        } else if (prev_f != 0.0 && ((prev_f < 0.0) != (fx < 0.0))) {
            double lo = prev_x, hi = x, flo = prev_f;
            for (int it = 0; it < 100 && hi - lo > 1e-16; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fm = f(mid);
                if (iterations) ++(*iterations);
                if (fm == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if ((fm < 0.0) == (flo < 0.0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            roots.push_back(0.5 * (lo + hi));
        }
        prev_x = x;
        prev_f = fx;
    }
    std::sort(roots.begin(), roots.end());
    std::vector<double> merged;
    for (double r : roots)
        if (merged.empty() || r - merged.back() > 1e-9) merged.push_back(r);
    return merged;
}

MixedProfile profile_2x2(double p_first_row, double p_first_col) {
    return {{p_first_row, 1.0 - p_first_row}, {p_first_col, 1.0 - p_first_col}};
}

}  // namespace

double ase_choice_prob(const GameSpec& game, Player owner, int n_s, double q) {
    require_2x2(game, "action-sampling");
    if (n_s < 1) throw Error(ErrorCode::invalid_argument, "sample size must be at least 1");
    if (owner == Player::row) return ase_choice_prob_row(game, n_s, q);
    return ase_choice_prob_row(game.transposed(), n_s, q);
}

double pse_choice_prob(const GameSpec& game, Player owner, int n_s, double q) {
    require_2x2(game, "payoff-sampling");
    if (n_s < 1) throw Error(ErrorCode::invalid_argument, "sample size must be at least 1");
    if (owner == Player::row) return pse_choice_prob_row(game, n_s, q);
    return pse_choice_prob_row(game.transposed(), n_s, q);
}

double logit_choice_prob(const GameSpec& game, Player owner, int action,
                         const std::vector<double>& opp, double lambda) {
    const int own = game.actions(owner);
    std::vector<double> eu(own, 0.0);
    for (int a = 0; a < own; ++a) {
        for (int b = 0; b < static_cast<int>(opp.size()); ++b) {
            const double v =
                owner == Player::row ? game.u(Player::row, a, b) : game.u(Player::col, b, a);
            eu[a] += opp[b] * v;
        }
    }
    double shift = lambda * eu[0];
    for (int a = 1; a < own; ++a) shift = std::max(shift, lambda * eu[a]);
    double denom = 0.0;
    for (int a = 0; a < own; ++a) denom += std::exp(lambda * eu[a] - shift);
    return std::exp(lambda * eu[action] - shift) / denom;
}

SolveReport solve_ne_2x2(const GameSpec& game) {
    require_2x2(game, "closed-form equilibrium");
    const double den_row = game.u(Player::row, 0, 0) - game.u(Player::row, 1, 0) +
                           game.u(Player::row, 1, 1) - game.u(Player::row, 0, 1);
    const double den_col = game.u(Player::col, 0, 0) - game.u(Player::col, 0, 1) +
                           game.u(Player::col, 1, 1) - game.u(Player::col, 1, 0);
    if (den_row == 0.0 || den_col == 0.0)
        throw Error(ErrorCode::no_completely_mixed_equilibrium,
                    "degenerate game: indifference system has no unique solution");
    // Opponent mixing makes each player indifferent between her two actions.
    const double p_l = (game.u(Player::row, 1, 1) - game.u(Player::row, 0, 1)) / den_row;
    const double p_u = (game.u(Player::col, 1, 1) - game.u(Player::col, 1, 0)) / den_col;
    if (!(p_l > 0.0 && p_l < 1.0 && p_u > 0.0 && p_u < 1.0))
        throw Error(ErrorCode::no_completely_mixed_equilibrium,
                    "no equilibrium with every action played with positive probability");
    SolveReport report;
    report.profile = profile_2x2(p_u, p_l);
    const double eu_u = p_l * game.u(Player::row, 0, 0) + (1 - p_l) * game.u(Player::row, 0, 1);
    const double eu_d = p_l * game.u(Player::row, 1, 0) + (1 - p_l) * game.u(Player::row, 1, 1);
    const double eu_l = p_u * game.u(Player::col, 0, 0) + (1 - p_u) * game.u(Player::col, 1, 0);
    const double eu_r = p_u * game.u(Player::col, 0, 1) + (1 - p_u) * game.u(Player::col, 1, 1);
    report.residual = std::max(std::fabs(eu_u - eu_d), std::fabs(eu_l - eu_r));
    report.all_profiles = {report.profile};
    return report;
}

SolveReport solve_qre(const GameSpec& game, double lambda) {
    if (!(lambda >= 0.0)) throw Error(ErrorCode::invalid_argument, "lambda must be non-negative");
    const int m_r = game.rows, m_c = game.cols;
    std::vector<double> p_row(m_r, 1.0 / m_r), p_col(m_c, 1.0 / m_c);
    std::vector<double> r_row(m_r), r_col(m_c);

    const auto respond = [&](const std::vector<double>& pr, const std::vector<double>& pc) {
        for (int a = 0; a < m_r; ++a) r_row[a] = logit_choice_prob(game, Player::row, a, pc, lambda);
        for (int a = 0; a < m_c; ++a) r_col[a] = logit_choice_prob(game, Player::col, a, pr, lambda);
        double res = 0.0;
        for (int a = 0; a < m_r; ++a) res = std::max(res, std::fabs(pr[a] - r_row[a]));
        for (int a = 0; a < m_c; ++a) res = std::max(res, std::fabs(pc[a] - r_col[a]));
        return res;
    };

    const double tol = 5e-14;
    const int cap = 100000;
    const int fallback_after = game.is_2x2() ? 5000 : cap;
    double alpha = 0.5;
    double best_residual = respond(p_row, p_col);
    int iter = 0;
    int since_improved = 0;
    double residual = best_residual;
    while (residual > tol && iter < fallback_after) {
        for (int a = 0; a < m_r; ++a) p_row[a] = (1 - alpha) * p_row[a] + alpha * r_row[a];
        for (int a = 0; a < m_c; ++a) p_col[a] = (1 - alpha) * p_col[a] + alpha * r_col[a];
        residual = respond(p_row, p_col);
        ++iter;
        if (residual < best_residual) {
            best_residual = residual;
            since_improved = 0;
        } else if (++since_improved >= 1000) {
            alpha = std::max(alpha * 0.5, 1.0 / 1024.0);
            since_improved = 0;
        }
    }

    if (residual > tol && game.is_2x2()) {
        // Reduced one-dimensional map: h(q) = response_col(response_row(q)) - q
        // is positive at 0 and negative at 1, so bisection always brackets.
        const auto h = [&](double q) {
            const double pu = logit_choice_prob(game, Player::row, 0, {q, 1 - q}, lambda);
            return logit_choice_prob(game, Player::col, 0, {pu, 1 - pu}, lambda) - q;
        };
        double lo = 0.0, hi = 1.0, flo = h(lo);
        for (int it = 0; it < 200 && hi - lo > 1e-17; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double fm = h(mid);
            ++iter;
            if (fm == 0.0) {
                lo = hi = mid;
                break;
            }
            if ((fm < 0.0) == (flo < 0.0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        const double q = 0.5 * (lo + hi);
        const double pu = logit_choice_prob(game, Player::row, 0, {q, 1 - q}, lambda);
        p_row = {pu, 1 - pu};
        p_col = {q, 1 - q};
        residual = respond(p_row, p_col);
    }

    if (residual > 1e-10)
        throw Error(ErrorCode::non_convergence,
                    "logit fixed point did not converge; best residual " +
                        std::to_string(residual));
    SolveReport report;
    report.profile = {p_row, p_col};
    report.residual = residual;
    report.iterations = iter;
    report.all_profiles = {report.profile};
    return report;
}

namespace {

// Shared scan/bisection driver for the two sampling concepts, which differ
// only in the choice-probability map.
SolveReport solve_sampling_2x2(const GameSpec& game, int n_s,
                               double (*choice_prob_row)(const GameSpec&, int, double)) {
    const GameSpec flipped = game.transposed();
    const auto response_row = [&](double q) { return choice_prob_row(game, n_s, q); };
    const auto response_col = [&](double pu) { return choice_prob_row(flipped, n_s, pu); };
    const auto composed = [&](double q) { return response_col(response_row(q)) - q; };

    int iterations = 0;
    std::vector<double> roots = scan_unit_roots(composed, 1e-4, &iterations);
    if (roots.empty()) {
        // A fixed point exists by continuity; fall back to the
        // least-violation scan point if the sign scan somehow missed it.
        double best_q = 0.0, best = std::fabs(composed(0.0));
        for (int i = 1; i <= 10000; ++i) {
            const double q = std::min(1.0, i * 1e-4);
            const double v = std::fabs(composed(q));
            if (v < best) {
                best = v;
                best_q = q;
            }
        }
        roots.push_back(best_q);
    }

    SolveReport report;
    report.iterations = iterations;
    for (double q : roots) report.all_profiles.push_back(profile_2x2(response_row(q), q));
    std::sort(report.all_profiles.begin(), report.all_profiles.end(),
              [](const MixedProfile& a, const MixedProfile& b) {
                  return a.p_row[0] < b.p_row[0];
              });
    report.profile = report.all_profiles.front();
    const double pu = report.profile.p_row[0], pl = report.profile.p_col[0];
    report.residual =
        std::max(std::fabs(pu - response_row(pl)), std::fabs(pl - response_col(pu)));
    return report;
}

}  // namespace

SolveReport solve_ase_2x2(const GameSpec& game, int n_s) {
    require_2x2(game, "action-sampling");
    if (n_s < 1) throw Error(ErrorCode::invalid_argument, "sample size must be at least 1");
    return solve_sampling_2x2(game, n_s, &ase_choice_prob_row);
}

SolveReport solve_pse_2x2(const GameSpec& game, int n_s) {
    require_2x2(game, "payoff-sampling");
    if (n_s < 1) throw Error(ErrorCode::invalid_argument, "sample size must be at least 1");
    return solve_sampling_2x2(game, n_s, &pse_choice_prob_row);
}

SolveReport solve_ibe_2x2(const GameSpec& game) {
    require_2x2(game, "impulse balance");
    const ImpulseMatrix m = impulses(transform(game));
    const auto solve_player = [](double imp_first_vs, double imp_other_vs, double imp_other_far,
                                 double imp_first_far, const char* who) {
        // weight w on the first opponent action balances:
        //   w*imp_first_vs + (1-w)*imp_first_far = w*imp_other_vs + (1-w)*imp_other_far
        const double a = imp_first_vs - imp_other_vs;
        const double b = imp_other_far - imp_first_far;
        if (imp_first_vs == 0.0 && imp_other_vs == 0.0 && imp_first_far == 0.0 &&
            imp_other_far == 0.0)
            throw Error(ErrorCode::indeterminate_equilibrium,
                        std::string(who) + " has no impulses; balance holds vacuously");
        if (a + b == 0.0)
            throw Error(ErrorCode::no_interior_balance,
                        std::string(who) + ": balance equation has no solution");
        const double w = b / (a + b);
        if (!(w >= 0.0 && w <= 1.0))
            throw Error(ErrorCode::no_interior_balance,
                        std::string(who) + ": balance solution leaves [0,1]");
        return w;
    };
    const double p_l = solve_player(m.imp(Player::row, 0, 0), m.imp(Player::row, 1, 0),
                                    m.imp(Player::row, 1, 1), m.imp(Player::row, 0, 1),
                                    "row player");
    const double p_u = solve_player(m.imp(Player::col, 0, 0), m.imp(Player::col, 0, 1),
                                    m.imp(Player::col, 1, 1), m.imp(Player::col, 1, 0),
                                    "column player");
    SolveReport report;
    report.profile = profile_2x2(p_u, p_l);
    const double row_gap = p_l * (m.imp(Player::row, 0, 0) - m.imp(Player::row, 1, 0)) +
                           (1 - p_l) * (m.imp(Player::row, 0, 1) - m.imp(Player::row, 1, 1));
    const double col_gap = p_u * (m.imp(Player::col, 0, 0) - m.imp(Player::col, 0, 1)) +
                           (1 - p_u) * (m.imp(Player::col, 1, 0) - m.imp(Player::col, 1, 1));
    report.residual = std::max(std::fabs(row_gap), std::fabs(col_gap));
    report.all_profiles = {report.profile};
    return report;
}

SessionData simulate(const MixedProfile& profile, int periods, std::uint64_t seed) {
    if (periods < 1) throw Error(ErrorCode::invalid_argument, "need at least one period");
    for (double p : profile.p_row)
        if (!(p >= 0.0)) throw Error(ErrorCode::invalid_argument, "negative probability");
    for (double p : profile.p_col)
        if (!(p >= 0.0)) throw Error(ErrorCode::invalid_argument, "negative probability");

    const auto draw = [](const std::vector<double>& p, double u) {
        double cum = 0.0;
        for (int a = 0; a < static_cast<int>(p.size()); ++a) {
            cum += p[a];
            if (u < cum) return a;
        }
        return static_cast<int>(p.size()) - 1;
    };

    SplitMix64 rng(seed);
    SessionData session;
    session.plays.reserve(periods);
    for (int t = 0; t < periods; ++t) {
        const int a_row = draw(profile.p_row, rng.next_double());
        const int a_col = draw(profile.p_col, rng.next_double());
        session.plays.push_back({a_row, a_col});
    }
    return session;
}

}  // namespace gamest
