#include "gamest/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gamest/solvers.hpp"

namespace gamest {

const char* to_string(Method m) {
    switch (m) {
        case Method::ne: return "ne";
        case Method::qre: return "qre";
        case Method::ase: return "ase";
        case Method::pse: return "pse";
        case Method::ibe: return "ibe";
        case Method::qr: return "qr";
    }
    return "unknown";
}

std::optional<Method> method_from_string(const std::string& s) {
    for (Method m : kAllMethods)
        if (s == to_string(m)) return m;
    return std::nullopt;
}

namespace {

void require_masked_2x2(const MaskedGame& masked, const char* what) {
    if (masked.rows() != 2 || masked.cols() != 2)
        throw Error(ErrorCode::unsupported_shape, std::string(what) + " requires a 2x2 game");
}

void check_freqs(const MaskedGame& masked, const EmpiricalFrequencies& freqs) {
    if (static_cast<int>(freqs.p_row.size()) != masked.rows() ||
        static_cast<int>(freqs.p_col.size()) != masked.cols())
        throw Error(ErrorCode::invalid_argument, "frequency vectors do not match the game shape");
}

double population_std(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(xs.size()));
}

void add_note(EstimateResult& r, const std::string& note) {
    if (!r.diagnostics.empty()) r.diagnostics += "; ";
    r.diagnostics += note;
}

// Project onto the candidate range, flagging and keeping the raw value in
// the diagnostics.
void finish_closed_form(EstimateResult& r, double raw, const MethodConfig& cfg) {
    const double clamped = cfg.clamp_to_grid(raw);
    if (clamped != raw) {
        r.clamped = true;
        std::ostringstream note;
        note << "raw estimate " << raw << " projected onto the candidate range";
        add_note(r, note.str());
    }
    r.estimate = clamped;
}

SessionData swapped_session(const SessionData& session) {
    SessionData s;
    s.plays.reserve(session.plays.size());
    for (const auto& play : session.plays) s.plays.push_back({play[1], play[0]});
    return s;
}

}  // namespace

EstimateResult estimate_ne(const MaskedGame& masked, const EmpiricalFrequencies& freqs,
                           const MethodConfig& cfg) {
    cfg.validate();
    require_masked_2x2(masked, "closed-form equilibrium estimation");
    check_freqs(masked, freqs);
    if (masked.hidden().owner == Player::col)
        return estimate_ne(masked.transposed(), freqs.swapped(), cfg);

    // The owner's indifference condition, linear in the hidden cell:
    //   sum_c q_c (u(0,c) - u(1,c)) = 0.
    const std::vector<double>& q = freqs.p_col;
    const HiddenCell cell = masked.hidden();
    double known = 0.0;
    for (int r = 0; r < 2; ++r) {
        const double sign = r == 0 ? 1.0 : -1.0;
        for (int c = 0; c < 2; ++c) {
            if (r == cell.r && c == cell.c) continue;
            known += sign * q[c] * masked.u(Player::row, r, c);
        }
    }
    const double coef = (cell.r == 0 ? 1.0 : -1.0) * q[cell.c];
    if (coef == 0.0)
        throw Error(ErrorCode::uninformative_data,
                    "the opponent never played the hidden cell's column; the indifference "
                    "condition does not involve the hidden value");
    EstimateResult result;
    result.method = Method::ne;
    finish_closed_form(result, -known / coef, cfg);
    result.sub_estimates = {result.estimate};
    return result;
}

EstimateResult estimate_qre(const MaskedGame& masked, const EmpiricalFrequencies& freqs,
                            const MethodConfig& cfg) {
    cfg.validate();
    check_freqs(masked, freqs);
    if (masked.hidden().owner == Player::col)
        return estimate_qre(masked.transposed(), freqs.swapped(), cfg);

    const std::vector<double>& p = freqs.p_row;
    const std::vector<double>& q = freqs.p_col;
    const HiddenCell cell = masked.hidden();
    const double lambda = cfg.lambda_qre;
    if (q[cell.c] == 0.0)
        throw Error(ErrorCode::pole, "the hidden value has coefficient zero in the logit "
                                     "response (opponent never played that column)");
    if (!(p[cell.r] > 0.0))
        throw Error(ErrorCode::uninformative_data,
                    "owner frequency of the hidden cell's action is zero; log odds undefined");

    // Expected utility of the hidden cell's action, without the hidden term.
    double known_hidden_action = 0.0;
    for (int c = 0; c < masked.cols(); ++c) {
        if (c == cell.c) continue;
        known_hidden_action += q[c] * masked.u(Player::row, cell.r, c);
    }

    EstimateResult result;
    result.method = Method::qre;
    std::vector<double> subs;
    for (int j = 0; j < masked.rows(); ++j) {
        if (j == cell.r) continue;
        if (!(p[j] > 0.0))
            throw Error(ErrorCode::uninformative_data,
                        "owner frequency of an alternative action is zero; log odds undefined");
        double eu_j = 0.0;
        for (int c = 0; c < masked.cols(); ++c) eu_j += q[c] * masked.u(Player::row, j, c);
        const double log_ratio = std::log(p[cell.r] / p[j]);
        subs.push_back((log_ratio / lambda - known_hidden_action + eu_j) / q[cell.c]);
    }
    double mean = 0.0;
    for (double s : subs) mean += s;
    mean /= static_cast<double>(subs.size());
    result.sub_estimates = std::move(subs);
    result.dispersion = population_std(result.sub_estimates);
    finish_closed_form(result, mean, cfg);
    return result;
}

namespace {

// Grid scan shared by the two sampling estimators: evaluate the owner's
// equilibrium equation at every candidate value, substitute the observed
// opponent frequency, and take the middle of the argmin run.
EstimateResult estimate_sampling(const MaskedGame& masked, const EmpiricalFrequencies& freqs,
                                 const MethodConfig& cfg, Method method, int n_s,
                                 double (*choice_prob)(const GameSpec&, Player, int, double)) {
    const double q_first = freqs.p_col[0];
    const double p_first = freqs.p_row[0];

    const int n = cfg.grid_size();
    GridCurve curve;
    curve.xs.resize(n);
    curve.ys.resize(n);
    for (int i = 0; i < n; ++i) {
        const double x = cfg.grid_point(i);
        curve.xs[i] = x;
        const double p_hat = choice_prob(masked.with_value(x), Player::row, n_s, q_first);
        curve.ys[i] = std::fabs(p_hat - p_first);
    }

    double y_min = curve.ys[0];
    for (double y : curve.ys) y_min = std::min(y_min, y);

    // Maximal runs of grid points at the exact minimum. The objective is a
    // step function of the candidate value, so plateau values compare equal.
    std::vector<std::array<int, 2>> runs;
    for (int i = 0; i < n; ++i) {
        if (curve.ys[i] != y_min) continue;
        if (!runs.empty() && runs.back()[1] == i - 1)
            runs.back()[1] = i;
        else
            runs.push_back({i, i});
    }

    EstimateResult result;
    result.method = method;
    for (const auto& run : runs)
        result.argmin_runs.push_back({curve.xs[run[0]], curve.xs[run[1]]});
    result.estimate = 0.5 * (curve.xs[runs[0][0]] + curve.xs[runs[0][1]]);
    result.sub_estimates = {result.estimate};
    if (runs.size() > 1) {
        std::ostringstream note;
        note << "argmin set has " << runs.size() << " separate runs; using the lowest";
        add_note(result, note.str());
    }
    {
        std::ostringstream note;
        note << "argmin interval width " << (curve.xs[runs[0][1]] - curve.xs[runs[0][0]]);
        add_note(result, note.str());
    }
    bool constant = true;
    for (double y : curve.ys)
        if (y != curve.ys[0]) {
            constant = false;
            break;
        }
    if (constant)
        add_note(result, "objective constant across the grid (dominant action or "
                         "uninformative equation)");
    result.curve = std::move(curve);
    return result;
}

}  // namespace

EstimateResult estimate_ase(const MaskedGame& masked, const EmpiricalFrequencies& freqs,
                            const MethodConfig& cfg) {
    cfg.validate();
    require_masked_2x2(masked, "action-sampling estimation");
    check_freqs(masked, freqs);
    if (masked.hidden().owner == Player::col)
        return estimate_ase(masked.transposed(), freqs.swapped(), cfg);
    return estimate_sampling(masked, freqs, cfg, Method::ase, cfg.n_ase, &ase_choice_prob);
}

EstimateResult estimate_pse(const MaskedGame& masked, const EmpiricalFrequencies& freqs,
                            const MethodConfig& cfg) {
    cfg.validate();
    require_masked_2x2(masked, "payoff-sampling estimation");
    check_freqs(masked, freqs);
    if (masked.hidden().owner == Player::col)
        return estimate_pse(masked.transposed(), freqs.swapped(), cfg);
    return estimate_sampling(masked, freqs, cfg, Method::pse, cfg.n_pse, &pse_choice_prob);
}

namespace {

// Expected impulse toward the other action from the first row action minus
// the same from the second, under the transformed game completed at x. The
// balance equation of the row player is f(x) = 0.
double row_balance_gap(const MaskedGame& masked, double q_first, double x) {
    const TransformedGame t = transform(masked.with_value(x));
    const double d_first = t.u(Player::row, 1, 0) - t.u(Player::row, 0, 0);
    const double d_second = t.u(Player::row, 1, 1) - t.u(Player::row, 0, 1);
    return q_first * d_first + (1.0 - q_first) * d_second;
}

}  // namespace

EstimateResult estimate_ibe(const MaskedGame& masked, const EmpiricalFrequencies& freqs,
                            const MethodConfig& cfg) {
    cfg.validate();
    require_masked_2x2(masked, "impulse-balance estimation");
    check_freqs(masked, freqs);
    if (masked.hidden().owner == Player::col)
        return estimate_ibe(masked.transposed(), freqs.swapped(), cfg);

    const double q_first = freqs.p_col[0];
    const auto f = [&](double x) { return row_balance_gap(masked, q_first, x); };

    // The security level and the transform branches change only where the
    // hidden value crosses one of the owner's fixed utilities, so the
    // balance gap is piecewise linear with breakpoints at those values.
    std::vector<double> fixed;
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
            if (!(r == masked.hidden().r && c == masked.hidden().c))
                fixed.push_back(masked.u(Player::row, r, c));
    double scale = 1.0 + std::fabs(cfg.grid_lo) + std::fabs(cfg.grid_hi);
    for (double v : fixed) scale = std::max(scale, 1.0 + std::fabs(v));
    const double zero_tol = 1e-11 * scale;

    const double pad = std::max(1.0, cfg.grid_hi - cfg.grid_lo);
    std::vector<double> knots = fixed;
    knots.push_back(cfg.grid_lo);
    knots.push_back(cfg.grid_hi);
    std::sort(knots.begin(), knots.end());
    std::vector<double> pts;
    pts.push_back(knots.front() - pad);
    for (double k : knots)
        if (k > pts.back()) pts.push_back(k);
    pts.push_back(knots.back() + pad);

    std::vector<double> vals(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) vals[i] = f(pts[i]);

    std::vector<double> roots;
    std::vector<std::array<double, 2>> flat_zero_runs;
    const auto near_zero = [&](double v) { return std::fabs(v) <= zero_tol; };
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double a = pts[i], b = pts[i + 1];
        const double fa = vals[i], fb = vals[i + 1];
        if (near_zero(fa) && near_zero(fb)) {
            if (!flat_zero_runs.empty() && flat_zero_runs.back()[1] == a)
                flat_zero_runs.back()[1] = b;
            else
                flat_zero_runs.push_back({a, b});
            continue;
        }
        if (near_zero(fa)) {
            roots.push_back(a);
        } else if (near_zero(fb)) {
            roots.push_back(b);
        } else if ((fa < 0.0) != (fb < 0.0)) {
            roots.push_back(a - fa * (b - a) / (fb - fa));
        }
    }
    // Linear tails beyond the padded domain.
    {
        const double slope_lo = (vals[1] - vals[0]) / (pts[1] - pts[0]);
        if (!near_zero(vals[0]) && slope_lo != 0.0) {
            const double r = pts[0] - vals[0] / slope_lo;
            if (r < pts[0]) roots.push_back(r);
        }
        const std::size_t n = pts.size();
        const double slope_hi = (vals[n - 1] - vals[n - 2]) / (pts[n - 1] - pts[n - 2]);
        if (!near_zero(vals[n - 1]) && slope_hi != 0.0) {
            const double r = pts[n - 1] - vals[n - 1] / slope_hi;
            if (r > pts[n - 1]) roots.push_back(r);
        }
    }

    EstimateResult result;
    result.method = Method::ibe;

    bool all_zero = flat_zero_runs.size() == 1 && flat_zero_runs.front()[0] == pts.front() &&
                    flat_zero_runs.front()[1] == pts.back();
    bool constant_nonzero = roots.empty() && flat_zero_runs.empty();
    if (constant_nonzero) {
        for (std::size_t i = 1; i < vals.size(); ++i)
            if (std::fabs(vals[i] - vals[0]) > zero_tol) constant_nonzero = false;
    }
    if (all_zero || constant_nonzero)
        throw Error(ErrorCode::uninformative_data,
                    "the owner's balance equation does not depend on the hidden value");

    for (const auto& run : flat_zero_runs) {
        roots.push_back(0.5 * (run[0] + run[1]));
        std::ostringstream note;
        note << "balance holds on the whole interval [" << run[0] << ", " << run[1]
             << "]; using its middle";
        add_note(result, note.str());
    }

    std::sort(roots.begin(), roots.end());
    std::vector<double> merged;
    for (double r : roots)
        if (merged.empty() || r - merged.back() > 1e-9) merged.push_back(r);

    std::vector<double> inside;
    for (double r : merged)
        if (r >= cfg.grid_lo && r <= cfg.grid_hi) inside.push_back(r);

    if (!inside.empty()) {
        double mean = 0.0;
        for (double r : inside) mean += r;
        mean /= static_cast<double>(inside.size());
        result.estimate = mean;
        result.sub_estimates = inside;
        result.dispersion = population_std(inside);
        if (inside.size() > 1) {
            std::ostringstream note;
            note << inside.size() << " case-consistent solutions; estimate is their average";
            add_note(result, note.str());
        }
        return result;
    }

    if (!merged.empty()) {
        double best = merged.front(), best_dist = std::numeric_limits<double>::infinity();
        for (double r : merged) {
            const double dist = r < cfg.grid_lo ? cfg.grid_lo - r : r - cfg.grid_hi;
            if (dist < best_dist) {
                best_dist = dist;
                best = r;
            }
        }
        std::ostringstream note;
        note << "no case-consistent solution inside the candidate range; nearest solution "
             << best << " clamped";
        add_note(result, note.str());
        result.clamped = true;
        result.estimate = cfg.clamp_to_grid(best);
        result.sub_estimates = {result.estimate};
        return result;
    }

    // Depends on the hidden value yet never balances: report the least
    // violation inside the candidate range.
    double best_x = cfg.grid_lo, best_v = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double x = cfg.clamp_to_grid(pts[i]);
        const double v = std::fabs(f(x));
        if (v < best_v) {
            best_v = v;
            best_x = x;
        }
    }
    add_note(result, "balance equation has no solution; returning the least-violation value");
    result.estimate = best_x;
    result.sub_estimates = {best_x};
    return result;
}

EstimateResult estimate_qr(const MaskedGame& masked, const SessionData& session,
                           const MethodConfig& cfg) {
    cfg.validate();
    if (masked.hidden().owner == Player::col)
        return estimate_qr(masked.transposed(), swapped_session(session), cfg);

    if (session.periods() < 1)
        throw Error(ErrorCode::malformed_session, "session has no plays");
    const int m_r = masked.rows(), m_c = masked.cols();
    std::vector<double> joint(static_cast<std::size_t>(m_r) * m_c, 0.0);
    for (const auto& play : session.plays) {
        if (play[0] < 0 || play[0] >= m_r || play[1] < 0 || play[1] >= m_c)
            throw Error(ErrorCode::malformed_session, "play outside the game's action ranges");
        joint[static_cast<std::size_t>(play[0]) * m_c + play[1]] += 1.0;
    }
    std::vector<double> opp_counts(m_c, 0.0);
    for (int r = 0; r < m_r; ++r)
        for (int c = 0; c < m_c; ++c) opp_counts[c] += joint[static_cast<std::size_t>(r) * m_c + c];

    const HiddenCell cell = masked.hidden();
    // Payoff sums as linear functions of the hidden value: realized play and
    // each fixed action in hindsight.
    double realized_known = 0.0;
    for (int r = 0; r < m_r; ++r)
        for (int c = 0; c < m_c; ++c) {
            if (r == cell.r && c == cell.c) continue;
            realized_known += joint[static_cast<std::size_t>(r) * m_c + c] * masked.u(Player::row, r, c);
        }
    const double realized_coef = joint[static_cast<std::size_t>(cell.r) * m_c + cell.c];
    std::vector<double> fixed_known(m_r, 0.0), fixed_coef(m_r, 0.0);
    for (int a = 0; a < m_r; ++a) {
        for (int c = 0; c < m_c; ++c) {
            if (a == cell.r && c == cell.c) {
                fixed_coef[a] = opp_counts[c];
                continue;
            }
            fixed_known[a] += opp_counts[c] * masked.u(Player::row, a, c);
        }
    }

    const double t = static_cast<double>(session.periods());
    const int n = cfg.grid_size();
    GridCurve curve;
    curve.xs.resize(n);
    curve.ys.resize(n);
    for (int i = 0; i < n; ++i) {
        const double x = cfg.grid_point(i);
        double best_fixed = -std::numeric_limits<double>::infinity();
        for (int a = 0; a < m_r; ++a)
            best_fixed = std::max(best_fixed, fixed_known[a] + fixed_coef[a] * x);
        curve.xs[i] = x;
        curve.ys[i] = (best_fixed - (realized_known + realized_coef * x)) / t;
    }

    double r_min = curve.ys[0];
    for (double y : curve.ys) r_min = std::min(r_min, y);
    // Shift the exponent by the minimum regret so weights never overflow.
    double wsum = 0.0, xsum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double w = std::exp(-cfg.lambda_qr * (curve.ys[i] - r_min));
        wsum += w;
        xsum += w * curve.xs[i];
    }

    EstimateResult result;
    result.method = Method::qr;
    finish_closed_form(result, xsum / wsum, cfg);
    result.sub_estimates = {result.estimate};
    result.curve = std::move(curve);
    return result;
}

EstimateResult estimate(Method method, const MaskedGame& masked, const SessionData& session,
                        const MethodConfig& cfg) {
    if (method == Method::qr) return estimate_qr(masked, session, cfg);
    const EmpiricalFrequencies freqs = frequencies(session, masked.rows(), masked.cols());
    switch (method) {
        case Method::ne: return estimate_ne(masked, freqs, cfg);
        case Method::qre: return estimate_qre(masked, freqs, cfg);
        case Method::ase: return estimate_ase(masked, freqs, cfg);
        case Method::pse: return estimate_pse(masked, freqs, cfg);
        case Method::ibe: return estimate_ibe(masked, freqs, cfg);
        case Method::qr: break;
    }
    throw Error(ErrorCode::invalid_argument, "unknown method");
}

}  // namespace gamest
