// Command-line front end: simulate play from a solved equilibrium, estimate a
// hidden utility from a session, or run the full hide-one-cell evaluation
// protocol over a directory of games and sessions.
//
// Exit codes: 0 success, 2 file/flag parse errors, 3 when a single estimate
// fails because the data cannot inform it (uninformative data or a pole).

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gamest/estimators.hpp"
#include "gamest/eval.hpp"
#include "gamest/io.hpp"
#include "gamest/solvers.hpp"

namespace fs = std::filesystem;
using namespace gamest;

namespace {

struct GridFlag {
    std::string text;

    void apply(MethodConfig& cfg) const {
        if (text.empty()) return;
        const auto bad = [&] {
            throw Error(ErrorCode::parse_error, "--grid expects LO:HI:STEP, got '" + text + "'");
        };
        const std::size_t c1 = text.find(':');
        const std::size_t c2 = text.find(':', c1 == std::string::npos ? c1 : c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos) bad();
        try {
            cfg.grid_lo = std::stod(text.substr(0, c1));
            cfg.grid_hi = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
            cfg.grid_step = std::stod(text.substr(c2 + 1));
        } catch (const std::exception&) {
            bad();
        }
    }
};

void add_config_flags(CLI::App* cmd, MethodConfig& cfg, GridFlag& grid) {
    cmd->add_option("--lambda-qre", cfg.lambda_qre, "Logit precision for the QRE method");
    cmd->add_option("--n-ase", cfg.n_ase, "Sample size for the action-sampling method");
    cmd->add_option("--n-pse", cfg.n_pse, "Sample size for the payoff-sampling method");
    cmd->add_option("--lambda-qr", cfg.lambda_qr, "Regret aversion for the quantal-regret method");
    cmd->add_option("--grid", grid.text, "Candidate grid LO:HI:STEP (default 0:22:0.01)");
}

std::vector<Method> parse_methods(const std::string& list) {
    std::vector<Method> methods;
    if (list == "all") {
        methods.assign(kAllMethods.begin(), kAllMethods.end());
        return methods;
    }
    std::string cur;
    const auto flush = [&] {
        if (cur.empty()) return;
        const auto m = method_from_string(cur);
        if (!m)
            throw Error(ErrorCode::parse_error, "unknown method '" + cur + "'");
        if (std::find(methods.begin(), methods.end(), *m) == methods.end())
            methods.push_back(*m);
        cur.clear();
    };
    for (char ch : list) {
        if (ch == ',')
            flush();
        else
            cur.push_back(ch);
    }
    flush();
    if (methods.empty()) throw Error(ErrorCode::parse_error, "no methods given");
    return methods;
}

std::vector<fs::path> list_files(const fs::path& dir, const std::string& extension) {
    if (!fs::is_directory(dir))
        throw Error(ErrorCode::parse_error, "'" + dir.string() + "' is not a directory");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == extension)
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    return files;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::invalid_argument, "cannot write '" + path.string() + "'");
    out << content;
}

int run_simulate(const std::string& game_path, const std::string& concept_name, int periods,
                 int sessions, std::uint64_t seed, const std::string& out_dir) {
    const io::GameDoc doc = io::load_game_file(game_path);
    if (doc.hidden)
        throw Error(ErrorCode::parse_error,
                    "simulate needs a complete game; '" + doc.name + "' has a hidden cell");
    const MethodConfig cfg;  // concept parameters are the evaluation preset
    SolveReport report;
    if (concept_name == "ne")
        report = solve_ne_2x2(doc.game);
    else if (concept_name == "qre")
        report = solve_qre(doc.game, cfg.lambda_qre);
    else if (concept_name == "ase")
        report = solve_ase_2x2(doc.game, cfg.n_ase);
    else if (concept_name == "pse")
        report = solve_pse_2x2(doc.game, cfg.n_pse);
    else if (concept_name == "ibe")
        report = solve_ibe_2x2(doc.game);
    else
        throw Error(ErrorCode::parse_error, "unknown concept '" + concept_name + "'");

    std::cerr << io::format_config_line(cfg, 3.0, false) << "\n";
    std::cerr << "concept=" << concept_name << " periods=" << periods << " sessions=" << sessions
              << " seed=" << seed
              << " p_first_row=" << io::format_double(report.profile.p_row[0])
              << " p_first_col=" << io::format_double(report.profile.p_col[0])
              << " residual=" << io::format_double(report.residual)
              << " roots=" << report.all_profiles.size() << "\n";
    if (report.all_profiles.size() > 1)
        std::cerr << "warning: several fixed points found; sampling from the first\n";

    fs::create_directories(out_dir);
    for (int k = 0; k < sessions; ++k) {
        // Per-session seeds are consecutive so a whole run reproduces from
        // the base seed alone.
        const SessionData data = simulate(report.profile, periods, seed + static_cast<std::uint64_t>(k));
        char sid[16];
        std::snprintf(sid, sizeof(sid), "s%03d", k + 1);
        io::SessionDoc session{doc.name, sid, data};
        const fs::path path = fs::path(out_dir) / (doc.name + "_" + sid + ".session");
        write_file(path, io::serialize_session(session));
        std::cout << path.string() << "\n";
    }
    return 0;
}

int run_estimate(const std::string& game_path, const std::string& session_path,
                 const std::string& method_name, MethodConfig cfg, const GridFlag& grid,
                 const std::string& curve_path) {
    grid.apply(cfg);
    cfg.validate();
    const io::GameDoc doc = io::load_game_file(game_path);
    const io::SessionDoc session = io::load_session_file(session_path);
    if (session.game_name != doc.name)
        throw Error(ErrorCode::parse_error, "session is for game '" + session.game_name +
                                                "', not '" + doc.name + "'");
    const MaskedGame masked = doc.masked();
    frequencies(session.data, doc.game);  // validates play indices against the game

    std::cerr << io::format_config_line(cfg, 3.0, false) << "\n";

    std::vector<Method> methods;
    const bool single = method_name != "all";
    if (single) {
        const auto m = method_from_string(method_name);
        if (!m) throw Error(ErrorCode::parse_error, "unknown method '" + method_name + "'");
        methods = {*m};
    } else {
        methods.assign(kAllMethods.begin(), kAllMethods.end());
    }
    if (!curve_path.empty() && !single)
        throw Error(ErrorCode::parse_error, "--curve needs a single --method");

    for (Method m : methods) {
        try {
            const EstimateResult r = estimate(m, masked, session.data, cfg);
            std::cout << io::format_estimate_line(r) << "\n";
            if (!curve_path.empty()) {
                if (!r.curve)
                    std::cerr << "note: method '" << to_string(m)
                              << "' has a closed form; no curve written\n";
                else {
                    std::ofstream out(curve_path, std::ios::binary);
                    if (!out)
                        throw Error(ErrorCode::invalid_argument,
                                    "cannot write '" + curve_path + "'");
                    io::write_curve_csv(out, *r.curve);
                }
            }
        } catch (const Error& e) {
            if (single) throw;
            std::cout << "method=" << to_string(m) << " status=error code=" << to_string(e.code())
                      << "\n";
            std::cerr << to_string(m) << ": " << e.what() << "\n";
        }
    }
    return 0;
}

int run_evaluate(const std::string& games_dir, const std::string& sessions_dir,
                 const std::string& methods_list, MethodConfig cfg, const GridFlag& grid,
                 double radius, bool per_player, const std::string& out_path,
                 const std::string& hist_path, const std::string& tests_path) {
    grid.apply(cfg);
    cfg.validate();
    const std::vector<Method> methods = parse_methods(methods_list);

    std::map<std::string, io::GameDoc> games;
    for (const fs::path& path : list_files(games_dir, ".game")) {
        io::GameDoc doc = io::load_game_file(path);
        if (doc.hidden)
            throw Error(ErrorCode::parse_error,
                        path.string() + ": evaluation games must be complete (no hidden cell)");
        if (!games.emplace(doc.name, std::move(doc)).second)
            throw Error(ErrorCode::parse_error, path.string() + ": duplicate game name");
    }
    if (games.empty()) throw Error(ErrorCode::parse_error, "no .game files in " + games_dir);

    // session files group by (game, session id); several files with the same
    // id form one session's player sequences.
    std::map<std::string, std::map<std::string, SessionGroup>> by_game;
    for (const fs::path& path : list_files(sessions_dir, ".session")) {
        io::SessionDoc doc = io::load_session_file(path);
        const auto game_it = games.find(doc.game_name);
        if (game_it == games.end())
            throw Error(ErrorCode::parse_error,
                        path.string() + ": no game named '" + doc.game_name + "'");
        frequencies(doc.data, game_it->second.game);  // validates play indices
        SessionGroup& group = by_game[doc.game_name][doc.session_id];
        group.id = doc.session_id;
        group.players.push_back(std::move(doc.data));
    }
    if (by_game.empty())
        throw Error(ErrorCode::parse_error, "no .session files in " + sessions_dir);

    std::cerr << io::format_config_line(cfg, radius, per_player) << "\n";

    std::vector<EvalTask> tasks;
    for (auto& [name, groups] : by_game) {
        EvalTask task;
        task.game_name = name;
        task.game = games.at(name).game;
        for (auto& [id, group] : groups) task.sessions.push_back(std::move(group));
        task.methods = methods;
        task.cfg = cfg;
        task.hit_radius = radius;
        task.per_player = per_player;
        tasks.push_back(std::move(task));
    }
    for (const auto& [name, doc] : games)
        if (!by_game.count(name)) std::cerr << "warning: game '" << name << "' has no sessions\n";

    const EvalReport report = run_eval(tasks);

    {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw Error(ErrorCode::invalid_argument, "cannot write '" + out_path + "'");
        io::write_report_csv(out, report);
    }
    if (!hist_path.empty()) {
        std::ofstream out(hist_path, std::ios::binary);
        if (!out) throw Error(ErrorCode::invalid_argument, "cannot write '" + hist_path + "'");
        io::write_hist_csv(out, report);
    }
    if (!tests_path.empty()) {
        std::ofstream out(tests_path, std::ios::binary);
        if (!out) throw Error(ErrorCode::invalid_argument, "cannot write '" + tests_path + "'");
        io::write_tests_csv(out, report);
    }
    io::write_summary_csv(std::cout, report);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Forward equilibrium play and inverse utility estimation for "
                 "two-player normal-form games"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "Solve a game and sample session files");
    std::string sim_game, sim_concept, sim_out;
    int sim_periods = 200, sim_sessions = 1;
    std::uint64_t sim_seed = 1;
    sim->add_option("--game", sim_game, "Game file")->required();
    sim->add_option("--concept", sim_concept, "One of ne|qre|ase|pse|ibe")->required();
    sim->add_option("--periods", sim_periods, "Plays per session")->required();
    sim->add_option("--sessions", sim_sessions, "Number of session files")->required();
    sim->add_option("--seed", sim_seed, "Base seed; session k uses seed+k-1")->required();
    sim->add_option("--out", sim_out, "Output directory")->required();

    // estimate
    auto* est = app.add_subcommand("estimate", "Estimate the hidden utility from one session");
    std::string est_game, est_session, est_method = "all", est_curve;
    MethodConfig est_cfg;
    GridFlag est_grid;
    est->add_option("--game", est_game, "Game file with a hidden cell")->required();
    est->add_option("--session", est_session, "Session file")->required();
    est->add_option("--method", est_method, "ne|qre|ase|pse|ibe|qr|all")->required();
    add_config_flags(est, est_cfg, est_grid);
    est->add_option("--curve", est_curve, "Write the method's grid curve to this CSV");

    // evaluate
    auto* ev = app.add_subcommand("evaluate", "Hide each cell in turn and score every method");
    std::string ev_games, ev_sessions, ev_methods, ev_out, ev_hist, ev_tests;
    MethodConfig ev_cfg;
    GridFlag ev_grid;
    double ev_radius = 3.0;
    bool ev_per_player = false;
    ev->add_option("--games", ev_games, "Directory of .game files")->required();
    ev->add_option("--sessions", ev_sessions, "Directory of .session files")->required();
    ev->add_option("--methods", ev_methods, "Comma-separated tags or 'all'")->required();
    ev->add_option("--out", ev_out, "Per-record report CSV")->required();
    ev->add_option("--hist", ev_hist, "Error histogram CSV");
    ev->add_option("--tests", ev_tests, "Pairwise Wilcoxon CSV");
    add_config_flags(ev, ev_cfg, ev_grid);
    ev->add_option("--radius", ev_radius, "Hit-rate radius (default 3)");
    ev->add_flag("--per-player", ev_per_player,
                 "Estimate per player sequence instead of per session");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sim->parsed())
            return run_simulate(sim_game, sim_concept, sim_periods, sim_sessions, sim_seed,
                                sim_out);
        if (est->parsed())
            return run_estimate(est_game, est_session, est_method, est_cfg, est_grid, est_curve);
        if (ev->parsed())
            return run_evaluate(ev_games, ev_sessions, ev_methods, ev_cfg, ev_grid, ev_radius,
                                ev_per_player, ev_out, ev_hist, ev_tests);
    } catch (const Error& e) {
        std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
        if (e.code() == ErrorCode::parse_error) return 2;
        if (e.code() == ErrorCode::uninformative_data || e.code() == ErrorCode::pole) return 3;
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
