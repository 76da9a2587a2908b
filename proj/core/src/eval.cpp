#include "gamest/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace gamest {

MetricsSummary metrics(const std::vector<double>& errors, double hit_radius) {
    if (errors.empty())
        throw Error(ErrorCode::undefined_metrics, "metrics of an empty error set are undefined");
    MetricsSummary s;
    s.n = static_cast<int>(errors.size());
    double sum = 0.0, sum_sq = 0.0;
    int hits = 0;
    for (double e : errors) {
        if (!(e >= 0.0))
            throw Error(ErrorCode::invalid_argument, "errors must be non-negative");
        sum += e;
        sum_sq += e * e;
        if (e <= hit_radius) ++hits;
    }
    const double n = static_cast<double>(s.n);
    s.mean = sum / n;
    s.rmse = std::sqrt(sum_sq / n);
    double ss = 0.0;
    for (double e : errors) ss += (e - s.mean) * (e - s.mean);
    s.stddev = std::sqrt(ss / n);
    s.hit_rate = static_cast<double>(hits) / n;
    return s;
}

WilcoxonResult wilcoxon_paired(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size())
        throw Error(ErrorCode::invalid_argument, "paired test needs equal-length samples");
    std::vector<double> diffs;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        if (d != 0.0) diffs.push_back(d);
    }
    const int n = static_cast<int>(diffs.size());
    if (n < 5)
        throw Error(ErrorCode::insufficient_data,
                    "fewer than five nonzero differences after exclusion");

    // Rank magnitudes with midranks for ties. Ranks are kept doubled so they
    // stay integral, which keeps the exact tail enumeration exact.
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int i, int j) {
        return std::fabs(diffs[i]) < std::fabs(diffs[j]);
    });
    std::vector<long long> rank2(n, 0);
    std::vector<int> tie_sizes;
    for (int i = 0; i < n;) {
        int j = i;
        while (j + 1 < n && std::fabs(diffs[order[j + 1]]) == std::fabs(diffs[order[i]])) ++j;
        const long long r2 = i + j + 2;  // doubled midrank of positions i..j
        for (int k = i; k <= j; ++k) rank2[order[k]] = r2;
        tie_sizes.push_back(j - i + 1);
        i = j + 1;
    }

    long long w2_pos = 0;
    for (int i = 0; i < n; ++i)
        if (diffs[i] > 0.0) w2_pos += rank2[i];

    WilcoxonResult result;
    result.n = n;
    result.statistic = static_cast<double>(w2_pos) / 2.0;

    if (n <= 25) {
        // Exact null: count sign assignments by convolving over the doubled
        // ranks. Counts stay below 2^25, exact in double.
        const long long total2 = static_cast<long long>(n) * (n + 1);
        std::vector<double> ways(total2 + 1, 0.0);
        ways[0] = 1.0;
        long long reach = 0;
        for (int i = 0; i < n; ++i) {
            const long long r = rank2[i];
            for (long long s = reach; s >= 0; --s)
                if (ways[s] != 0.0) ways[s + r] += ways[s];
            reach += r;
        }
        const double denom = std::pow(2.0, n);
        double p_le = 0.0, p_ge = 0.0;
        for (long long s = 0; s <= total2; ++s) {
            if (s <= w2_pos) p_le += ways[s];
            if (s >= w2_pos) p_ge += ways[s];
        }
        p_le /= denom;
        p_ge /= denom;
        result.p_value = std::min(1.0, 2.0 * std::min(p_le, p_ge));
        result.exact = true;
    } else {
        const double nn = static_cast<double>(n);
        const double mu = nn * (nn + 1.0) / 4.0;
        double tie_corr = 0.0;
        for (int t : tie_sizes) {
            const double td = static_cast<double>(t);
            tie_corr += (td * td * td - td) / 48.0;
        }
        const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_corr;
        const double z = (result.statistic - mu) / std::sqrt(var);
        result.p_value = std::erfc(std::fabs(z) / std::sqrt(2.0));
        result.exact = false;
    }
    return result;
}

namespace {

std::vector<HiddenCell> all_cells(const GameSpec& game) {
    std::vector<HiddenCell> cells;
    for (Player p : {Player::row, Player::col})
        for (int r = 0; r < game.rows; ++r)
            for (int c = 0; c < game.cols; ++c) cells.push_back({p, r, c});
    return cells;
}

EmpiricalFrequencies average_frequencies(const std::vector<SessionData>& players,
                                         const GameSpec& game) {
    EmpiricalFrequencies avg{std::vector<double>(game.rows, 0.0),
                             std::vector<double>(game.cols, 0.0)};
    for (const SessionData& s : players) {
        const EmpiricalFrequencies f = frequencies(s, game);
        for (int i = 0; i < game.rows; ++i) avg.p_row[i] += f.p_row[i];
        for (int i = 0; i < game.cols; ++i) avg.p_col[i] += f.p_col[i];
    }
    const double k = static_cast<double>(players.size());
    for (double& v : avg.p_row) v /= k;
    for (double& v : avg.p_col) v /= k;
    return avg;
}

void append_task_records(const EvalTask& task, std::vector<EvalRecord>& records) {
    task.cfg.validate();
    if (task.sessions.empty())
        throw Error(ErrorCode::empty_task, "evaluation task has no sessions");
    if (task.methods.empty())
        throw Error(ErrorCode::empty_task, "evaluation task has no methods");

    std::vector<SessionGroup> groups;
    if (task.per_player) {
        for (const SessionGroup& g : task.sessions)
            for (std::size_t i = 0; i < g.players.size(); ++i)
                groups.push_back({g.id + "/p" + std::to_string(i + 1), {g.players[i]}});
    } else {
        groups = task.sessions;
    }

    const std::vector<HiddenCell> cells = all_cells(task.game);
    for (const SessionGroup& group : groups) {
        if (group.players.empty())
            throw Error(ErrorCode::empty_task, "session group '" + group.id + "' has no plays");
        const EmpiricalFrequencies freqs = average_frequencies(group.players, task.game);
        for (const HiddenCell& cell : cells) {
            const double true_value = task.game.u(cell.owner, cell.r, cell.c);
            const bool in_range =
                true_value >= task.cfg.grid_lo && true_value <= task.cfg.grid_hi;
            const MaskedGame masked = MaskedGame::hide(task.game, cell);
            for (Method method : task.methods) {
                EvalRecord rec;
                rec.game_name = task.game_name;
                rec.session_id = group.id;
                rec.cell = cell;
                rec.method = method;
                rec.true_value = true_value;
                if (!in_range) {
                    rec.status = RecordStatus::out_of_range;
                    rec.reason = "true_value_outside_grid";
                    records.push_back(std::move(rec));
                    continue;
                }
                try {
                    if (method == Method::qr) {
                        // Regret is defined per sequence; estimate each
                        // player's and average within the session.
                        double sum = 0.0;
                        for (const SessionData& s : group.players)
                            sum += estimate_qr(masked, s, task.cfg).estimate;
                        rec.estimate = sum / static_cast<double>(group.players.size());
                    } else {
                        EstimateResult r;
                        switch (method) {
                            case Method::ne: r = estimate_ne(masked, freqs, task.cfg); break;
                            case Method::qre: r = estimate_qre(masked, freqs, task.cfg); break;
                            case Method::ase: r = estimate_ase(masked, freqs, task.cfg); break;
                            case Method::pse: r = estimate_pse(masked, freqs, task.cfg); break;
                            case Method::ibe: r = estimate_ibe(masked, freqs, task.cfg); break;
                            case Method::qr: break;
                        }
                        rec.estimate = r.estimate;
                    }
                    rec.error = std::fabs(*rec.estimate - true_value);
                } catch (const Error& e) {
                    rec.status = RecordStatus::estimator_error;
                    rec.reason = to_string(e.code());
                }
                records.push_back(std::move(rec));
            }
        }
    }
}

EvalReport assemble_report(std::vector<EvalRecord> records, const std::vector<Method>& methods,
                           const MethodConfig& cfg, double hit_radius, double hist_bin_width) {
    EvalReport report;
    report.records = std::move(records);
    report.hit_radius = hit_radius;
    report.hist_bin_width = hist_bin_width;
    report.grid_span = cfg.grid_hi - cfg.grid_lo;

    const int n_bins =
        std::max(1, static_cast<int>(std::ceil(report.grid_span / hist_bin_width)));
    for (Method method : methods) {
        MethodSummary summary;
        summary.method = method;
        summary.histogram.assign(n_bins, 0);
        std::vector<double> errors;
        for (const EvalRecord& rec : report.records) {
            if (rec.method != method) continue;
            switch (rec.status) {
                case RecordStatus::ok:
                    errors.push_back(*rec.error);
                    break;
                case RecordStatus::estimator_error:
                    ++summary.n_estimator_error;
                    break;
                case RecordStatus::out_of_range:
                    ++summary.n_out_of_range;
                    break;
            }
        }
        if (!errors.empty()) {
            summary.stats = metrics(errors, hit_radius);
            for (double e : errors) {
                int bin = static_cast<int>(std::floor(e / hist_bin_width));
                bin = std::min(std::max(bin, 0), n_bins - 1);
                ++summary.histogram[bin];
            }
        }
        report.summaries.push_back(std::move(summary));
    }

    // Per-session RMSE vectors, keyed by (game, session), for the paired
    // comparisons between methods.
    std::map<std::pair<std::string, std::string>, std::map<Method, std::vector<double>>>
        by_session;
    for (const EvalRecord& rec : report.records)
        if (rec.status == RecordStatus::ok)
            by_session[{rec.game_name, rec.session_id}][rec.method].push_back(*rec.error);

    for (std::size_t i = 0; i < methods.size(); ++i) {
        for (std::size_t j = i + 1; j < methods.size(); ++j) {
            PairwiseTest test;
            test.method_a = methods[i];
            test.method_b = methods[j];
            std::vector<double> rmse_a, rmse_b;
            for (const auto& [key, per_method] : by_session) {
                const auto it_a = per_method.find(methods[i]);
                const auto it_b = per_method.find(methods[j]);
                if (it_a == per_method.end() || it_b == per_method.end()) continue;
                rmse_a.push_back(metrics(it_a->second, report.hit_radius).rmse);
                rmse_b.push_back(metrics(it_b->second, report.hit_radius).rmse);
            }
            try {
                test.result = wilcoxon_paired(rmse_a, rmse_b);
            } catch (const Error& e) {
                test.note = to_string(e.code());
            }
            report.pairwise.push_back(std::move(test));
        }
    }
    return report;
}

}  // namespace

EvalReport run_eval(const EvalTask& task) { return run_eval(std::vector<EvalTask>{task}); }

EvalReport run_eval(const std::vector<EvalTask>& tasks) {
    if (tasks.empty()) throw Error(ErrorCode::empty_task, "no evaluation tasks");
    std::vector<EvalRecord> records;
    for (const EvalTask& task : tasks) append_task_records(task, records);
    return assemble_report(std::move(records), tasks.front().methods, tasks.front().cfg,
                           tasks.front().hit_radius, tasks.front().hist_bin_width);
}

}  // namespace gamest
