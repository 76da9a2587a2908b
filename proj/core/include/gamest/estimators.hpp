#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "gamest/game.hpp"

namespace gamest {

enum class Method { ne, qre, ase, pse, ibe, qr };

const char* to_string(Method m);
std::optional<Method> method_from_string(const std::string& s);
inline constexpr std::array<Method, 6> kAllMethods = {Method::ne,  Method::qre, Method::ase,
                                                      Method::pse, Method::ibe, Method::qr};

/// The scan an algorithmic estimator performed: candidate values and the
/// objective at each (|p_hat(x) - p_tilde| for the sampling methods, regret
/// for the quantal-regret method).
struct GridCurve {
    std::vector<double> xs;
    std::vector<double> ys;
};

struct EstimateResult {
    Method method = Method::ne;
    double estimate = 0.0;
    std::vector<double> sub_estimates;  // per-equation / per-case estimates
    double dispersion = 0.0;            // population std of sub_estimates
    bool clamped = false;               // projected onto [grid_lo, grid_hi]
    std::string diagnostics;
    std::optional<GridCurve> curve;
    /// Closed intervals of candidate values at the objective minimum
    /// (sampling methods only; [x, x] for point minima).
    std::vector<std::array<double, 2>> argmin_runs;
};

/// Invert the owner's indifference condition for the hidden cell using the
/// observed opponent frequencies.
EstimateResult estimate_ne(const MaskedGame& masked, const EmpiricalFrequencies& freqs,
                           const MethodConfig& cfg);

/// Invert the owner's logit response: the log-odds of the hidden cell's
/// action against each alternative is lambda times the expected-utility gap,
/// linear in the hidden value. Sub-estimates are averaged for games with
/// more than two own actions.
EstimateResult estimate_qre(const MaskedGame& masked, const EmpiricalFrequencies& freqs,
                            const MethodConfig& cfg);

/// Grid scan of the action-sampling equation: estimate is the middle of the
/// argmin run of |p_hat(x) - p_tilde| over the candidate grid.
EstimateResult estimate_ase(const MaskedGame& masked, const EmpiricalFrequencies& freqs,
                            const MethodConfig& cfg);

/// Same scan with the payoff-sampling double sums.
EstimateResult estimate_pse(const MaskedGame& masked, const EmpiricalFrequencies& freqs,
                            const MethodConfig& cfg);

/// Solve the owner's impulse-balance equation for the hidden value. The
/// equation is piecewise linear in the hidden value (the security level and
/// the transform branches depend on its ordering against the fixed cells);
/// every ordering case is solved and solutions consistent with their case
/// are kept.
EstimateResult estimate_ibe(const MaskedGame& masked, const EmpiricalFrequencies& freqs,
                            const MethodConfig& cfg);

/// Quantal-regret estimate: the candidate-grid average weighted by
/// exp(-lambda * regret(x)), where regret(x) is the owner's average gap to
/// the best fixed action in hindsight over the session with the hidden cell
/// set to x.
EstimateResult estimate_qr(const MaskedGame& masked, const SessionData& session,
                           const MethodConfig& cfg);

/// Dispatch by method tag; `qr` uses the session sequence, the equilibrium
/// methods use its frequencies.
EstimateResult estimate(Method method, const MaskedGame& masked, const SessionData& session,
                        const MethodConfig& cfg);

}  // namespace gamest
