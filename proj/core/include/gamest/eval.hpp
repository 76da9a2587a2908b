#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gamest/estimators.hpp"
#include "gamest/game.hpp"

namespace gamest {

/// One independent subject group: every joint-play sequence recorded for it.
/// Synthetic data normally has one sequence per session; multi-player
/// experimental sessions contribute one sequence per player pair.
struct SessionGroup {
    std::string id;
    std::vector<SessionData> players;
};

struct EvalTask {
    std::string game_name;
    GameSpec game;
    std::vector<SessionGroup> sessions;
    std::vector<Method> methods;
    MethodConfig cfg;
    double hit_radius = 3.0;
    double hist_bin_width = 0.5;
    /// Estimate per player sequence instead of per session (QR always runs
    /// per sequence; this flag additionally splits the frequency-based
    /// methods). Off in the standard protocol.
    bool per_player = false;
};

/// Outcome of a record: estimated, skipped because the true value lies
/// outside the candidate grid, or skipped because the estimator reported an
/// error for this data.
enum class RecordStatus { ok, out_of_range, estimator_error };

struct EvalRecord {
    std::string game_name;
    std::string session_id;
    HiddenCell cell;
    Method method = Method::ne;
    double true_value = 0.0;
    std::optional<double> estimate;
    std::optional<double> error;  // |estimate - true_value|
    RecordStatus status = RecordStatus::ok;
    std::string reason;  // error code name when status != ok
};

struct MetricsSummary {
    int n = 0;
    double rmse = 0.0;
    double mean = 0.0;
    double stddev = 0.0;  // population standard deviation
    double hit_rate = 0.0;
};

/// Summary statistics of a set of absolute errors; hit rate counts errors
/// within hit_radius (inclusive). Errors on an empty list.
MetricsSummary metrics(const std::vector<double>& errors, double hit_radius);

struct MethodSummary {
    Method method = Method::ne;
    MetricsSummary stats;
    int n_estimator_error = 0;
    int n_out_of_range = 0;
    std::vector<int> histogram;  // error counts in fixed-width bins over [0, grid span]
};

struct WilcoxonResult {
    double statistic = 0.0;  // sum of positive-difference ranks
    double p_value = 1.0;
    int n = 0;      // pairs after zero-difference exclusion
    bool exact = false;
};

/// Paired two-sided Wilcoxon signed-rank test. Zero differences are
/// excluded, tied magnitudes get midranks; the null distribution is exact
/// (by enumeration over sign assignments) up to 25 pairs and a
/// tie-corrected normal approximation above. Errors when fewer than five
/// nonzero differences remain.
WilcoxonResult wilcoxon_paired(const std::vector<double>& a, const std::vector<double>& b);

struct PairwiseTest {
    Method method_a = Method::ne;
    Method method_b = Method::ne;
    std::optional<WilcoxonResult> result;
    std::string note;  // reason when the test could not run
};

struct EvalReport {
    std::vector<EvalRecord> records;
    std::vector<MethodSummary> summaries;
    std::vector<PairwiseTest> pairwise;  // per-session RMSE comparisons
    double hit_radius = 3.0;
    double hist_bin_width = 0.5;
    double grid_span = 22.0;
};

/// Hide each utility cell one at a time, estimate it with every requested
/// method from every session, and score against the true values. Session
/// frequencies are the average over the session's player sequences; QR runs
/// per sequence and its per-player estimates are averaged.
EvalReport run_eval(const EvalTask& task);

/// Pooled evaluation over several games: records are concatenated and all
/// summaries and pairwise tests are computed over the pool. Tasks must share
/// methods, config, and scoring parameters.
EvalReport run_eval(const std::vector<EvalTask>& tasks);

}  // namespace gamest
