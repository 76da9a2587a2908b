#include "gamest/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace gamest::io {

namespace {

[[noreturn]] void fail(int line, const std::string& message) {
    throw Error(ErrorCode::parse_error, "line " + std::to_string(line) + ": " + message);
}

bool valid_identifier(const std::string& s) {
    if (s.empty()) return false;
    for (char ch : s) {
        const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                        (ch >= '0' && ch <= '9') || ch == '_' || ch == '-' || ch == '.';
        if (!ok) return false;
    }
    return true;
}

std::string trim(std::string_view s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

double parse_real(const std::string& token, int line) {
    double v = 0.0;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) fail(line, "not a real number: '" + token + "'");
    if (!std::isfinite(v)) fail(line, "non-finite value: '" + token + "'");
    return v;
}

long parse_int(const std::string& token, int line) {
    long v = 0;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) fail(line, "not an integer: '" + token + "'");
    return v;
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

std::vector<std::string> split_char(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

// Splits a document into (line number, key, value) entries plus raw lines;
// '#' comments and blank lines are skipped.
struct Entry {
    int line;
    std::string key;
    std::string value;
};

std::vector<Entry> read_entries(std::string_view text, bool keys_required) {
    std::vector<Entry> entries;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string_view raw =
            text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        std::string stripped = trim(raw);
        if (!stripped.empty() && stripped[0] == '#') continue;
        if (stripped.empty()) continue;
        const std::size_t colon = stripped.find(':');
        if (colon == std::string::npos) {
            if (keys_required) fail(line_no, "expected 'key: value'");
            entries.push_back({line_no, "", stripped});
            continue;
        }
        entries.push_back(
            {line_no, trim(stripped.substr(0, colon)), trim(stripped.substr(colon + 1))});
    }
    return entries;
}

HiddenCell parse_hidden_value(const std::string& value, int rows, int cols, int line) {
    const std::vector<std::string> parts = split_char(value, ',');
    if (parts.size() != 3) fail(line, "hidden must be 'player,row,col'");
    HiddenCell cell;
    const std::string who = trim(parts[0]);
    if (who == "row")
        cell.owner = Player::row;
    else if (who == "col")
        cell.owner = Player::col;
    else
        fail(line, "hidden player must be 'row' or 'col'");
    cell.r = static_cast<int>(parse_int(trim(parts[1]), line));
    cell.c = static_cast<int>(parse_int(trim(parts[2]), line));
    if (cell.r < 0 || cell.r >= rows || cell.c < 0 || cell.c >= cols)
        fail(line, "hidden cell outside the game table");
    return cell;
}

}  // namespace

MaskedGame GameDoc::masked() const {
    if (!hidden)
        throw Error(ErrorCode::invalid_argument,
                    "game '" + name + "' has no hidden cell marked");
    return MaskedGame(game, *hidden);
}

GameDoc parse_game(std::string_view text) {
    std::map<std::string, Entry> fields;
    for (const Entry& e : read_entries(text, true)) {
        if (e.key != "name" && e.key != "rows" && e.key != "cols" && e.key != "u_row" &&
            e.key != "u_col" && e.key != "hidden")
            fail(e.line, "unknown field '" + e.key + "'");
        if (!fields.emplace(e.key, e).second) fail(e.line, "duplicate field '" + e.key + "'");
    }
    for (const char* req : {"name", "rows", "cols", "u_row", "u_col"})
        if (!fields.count(req))
            throw Error(ErrorCode::parse_error, std::string("missing field '") + req + "'");

    GameDoc doc;
    doc.name = fields.at("name").value;
    if (!valid_identifier(doc.name))
        fail(fields.at("name").line, "name must be alphanumeric with ._- only");
    const long rows = parse_int(fields.at("rows").value, fields.at("rows").line);
    const long cols = parse_int(fields.at("cols").value, fields.at("cols").line);
    if (rows < 2 || cols < 2 || rows > 64 || cols > 64)
        fail(fields.at("rows").line, "rows and cols must be in [2, 64]");

    const auto parse_table = [&](const char* key) {
        const Entry& e = fields.at(key);
        const std::vector<std::string> toks = split_ws(e.value);
        if (static_cast<long>(toks.size()) != rows * cols)
            fail(e.line, std::string(key) + " must list exactly rows*cols values");
        std::vector<double> table;
        table.reserve(toks.size());
        for (const std::string& t : toks) table.push_back(parse_real(t, e.line));
        return table;
    };
    doc.game = GameSpec(static_cast<int>(rows), static_cast<int>(cols), parse_table("u_row"),
                        parse_table("u_col"));
    if (fields.count("hidden")) {
        const Entry& e = fields.at("hidden");
        doc.hidden = parse_hidden_value(e.value, doc.game.rows, doc.game.cols, e.line);
        // The table entry at the hidden position is a placeholder.
        doc.game.set(doc.hidden->owner, doc.hidden->r, doc.hidden->c, 0.0);
    }
    return doc;
}

SessionDoc parse_session(std::string_view text) {
    SessionDoc doc;
    bool seen_game = false, seen_session = false, seen_periods = false, seen_plays = false;
    bool seen_freq_row = false, seen_freq_col = false;
    long periods = 0;
    std::vector<double> freq_row, freq_col;
    int freq_row_line = 0, freq_col_line = 0;

    const std::vector<Entry> entries = read_entries(text, false);
    std::size_t i = 0;
    while (i < entries.size()) {
        const Entry& e = entries[i];
        if (e.key.empty()) fail(e.line, "expected 'key: value'");
        if (e.key == "game") {
            if (seen_game) fail(e.line, "duplicate field 'game'");
            seen_game = true;
            doc.game_name = e.value;
            if (!valid_identifier(doc.game_name))
                fail(e.line, "game name must be alphanumeric with ._- only");
        } else if (e.key == "session") {
            if (seen_session) fail(e.line, "duplicate field 'session'");
            seen_session = true;
            doc.session_id = e.value;
            if (!valid_identifier(doc.session_id))
                fail(e.line, "session id must be alphanumeric with ._- only");
        } else if (e.key == "periods") {
            if (seen_periods) fail(e.line, "duplicate field 'periods'");
            seen_periods = true;
            periods = parse_int(e.value, e.line);
            if (periods < 1) fail(e.line, "periods must be at least 1");
        } else if (e.key == "plays") {
            if (seen_plays) fail(e.line, "duplicate field 'plays'");
            if (!seen_periods) fail(e.line, "'periods' must precede 'plays'");
            if (!e.value.empty()) fail(e.line, "'plays:' takes no value on its own line");
            seen_plays = true;
            for (long t = 0; t < periods; ++t) {
                ++i;
                if (i >= entries.size())
                    throw Error(ErrorCode::parse_error,
                                "expected " + std::to_string(periods) + " play lines");
                const Entry& play = entries[i];
                if (!play.key.empty())
                    fail(play.line, "expected a play line 'r,c', found field '" + play.key + "'");
                const std::vector<std::string> parts = split_char(play.value, ',');
                if (parts.size() != 2) fail(play.line, "play lines must be 'r,c'");
                const long r = parse_int(trim(parts[0]), play.line);
                const long c = parse_int(trim(parts[1]), play.line);
                if (r < 0 || c < 0) fail(play.line, "action indices are 0-based, non-negative");
                doc.data.plays.push_back({static_cast<int>(r), static_cast<int>(c)});
            }
        } else if (e.key == "freq_row" || e.key == "freq_col") {
            bool& seen = e.key == "freq_row" ? seen_freq_row : seen_freq_col;
            if (seen) fail(e.line, "duplicate field '" + e.key + "'");
            seen = true;
            std::vector<double>& target = e.key == "freq_row" ? freq_row : freq_col;
            (e.key == "freq_row" ? freq_row_line : freq_col_line) = e.line;
            for (const std::string& t : split_ws(e.value)) target.push_back(parse_real(t, e.line));
        } else {
            fail(e.line, "unknown field '" + e.key + "'");
        }
        ++i;
    }
    if (!seen_game) throw Error(ErrorCode::parse_error, "missing field 'game'");
    if (!seen_session) throw Error(ErrorCode::parse_error, "missing field 'session'");
    if (!seen_periods) throw Error(ErrorCode::parse_error, "missing field 'periods'");
    if (!seen_plays) throw Error(ErrorCode::parse_error, "missing field 'plays'");

    if (seen_freq_row != seen_freq_col)
        throw Error(ErrorCode::parse_error,
                    "freq_row and freq_col must be given together or not at all");
    if (seen_freq_row) {
        const auto check = [&](const std::vector<double>& given, int idx, int line) {
            std::vector<double> counts(given.size(), 0.0);
            for (const auto& play : doc.data.plays) {
                if (play[idx] >= static_cast<int>(given.size()))
                    fail(line, "frequency vector shorter than the actions played");
                counts[play[idx]] += 1.0;
            }
            for (std::size_t a = 0; a < given.size(); ++a)
                if (std::fabs(counts[a] / static_cast<double>(periods) - given[a]) > 1e-9)
                    fail(line, "declared frequencies do not match a recount of the plays");
        };
        check(freq_row, 0, freq_row_line);
        check(freq_col, 1, freq_col_line);
    }
    return doc;
}

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

std::string serialize_game(const GameDoc& doc) {
    std::ostringstream out;
    out << "name: " << doc.name << "\n";
    out << "rows: " << doc.game.rows << "\n";
    out << "cols: " << doc.game.cols << "\n";
    const auto table = [&](const char* key, const std::vector<double>& u) {
        out << key << ":";
        for (double v : u) out << " " << format_double(v);
        out << "\n";
    };
    table("u_row", doc.game.u_row);
    table("u_col", doc.game.u_col);
    if (doc.hidden)
        out << "hidden: " << (doc.hidden->owner == Player::row ? "row" : "col") << ","
            << doc.hidden->r << "," << doc.hidden->c << "\n";
    return out.str();
}

std::string serialize_session(const SessionDoc& doc) {
    std::ostringstream out;
    out << "game: " << doc.game_name << "\n";
    out << "session: " << doc.session_id << "\n";
    out << "periods: " << doc.data.periods() << "\n";
    out << "plays:\n";
    for (const auto& play : doc.data.plays) out << play[0] << "," << play[1] << "\n";
    return out.str();
}

namespace {

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::parse_error, "cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

GameDoc load_game_file(const std::filesystem::path& path) {
    try {
        return parse_game(slurp(path));
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + e.what());
    }
}

SessionDoc load_session_file(const std::filesystem::path& path) {
    try {
        return parse_session(slurp(path));
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + e.what());
    }
}

namespace {

std::string cell_id(const HiddenCell& cell) {
    std::ostringstream out;
    out << (cell.owner == Player::row ? "row" : "col") << "." << cell.r << "." << cell.c;
    return out.str();
}

const char* status_name(RecordStatus status) {
    switch (status) {
        case RecordStatus::ok: return "ok";
        case RecordStatus::out_of_range: return "out_of_range";
        case RecordStatus::estimator_error: return "estimator_error";
    }
    return "unknown";
}

}  // namespace

void write_report_csv(std::ostream& out, const EvalReport& report) {
    out << "game,session,cell,method,true_value,estimate,error,status,reason\n";
    for (const EvalRecord& rec : report.records) {
        out << rec.game_name << "," << rec.session_id << "," << cell_id(rec.cell) << ","
            << to_string(rec.method) << "," << format_double(rec.true_value) << ",";
        if (rec.estimate) out << format_double(*rec.estimate);
        out << ",";
        if (rec.error) out << format_double(*rec.error);
        out << "," << status_name(rec.status) << "," << rec.reason << "\n";
    }
}

void write_summary_csv(std::ostream& out, const EvalReport& report) {
    out << "method,n,rmse,mean_error,std_error,hit_rate,n_estimator_error,n_out_of_range\n";
    for (const MethodSummary& s : report.summaries) {
        out << to_string(s.method) << "," << s.stats.n << ",";
        if (s.stats.n > 0)
            out << format_double(s.stats.rmse) << "," << format_double(s.stats.mean) << ","
                << format_double(s.stats.stddev) << "," << format_double(s.stats.hit_rate);
        else
            out << ",,,";
        out << "," << s.n_estimator_error << "," << s.n_out_of_range << "\n";
    }
}

void write_hist_csv(std::ostream& out, const EvalReport& report) {
    out << "method,bin_lo,bin_hi,count\n";
    for (const MethodSummary& s : report.summaries) {
        for (std::size_t b = 0; b < s.histogram.size(); ++b) {
            out << to_string(s.method) << "," << format_double(b * report.hist_bin_width) << ","
                << format_double((b + 1) * report.hist_bin_width) << "," << s.histogram[b]
                << "\n";
        }
    }
}

void write_tests_csv(std::ostream& out, const EvalReport& report) {
    out << "method_a,method_b,n,statistic,p_value,exact,note\n";
    for (const PairwiseTest& t : report.pairwise) {
        out << to_string(t.method_a) << "," << to_string(t.method_b) << ",";
        if (t.result)
            out << t.result->n << "," << format_double(t.result->statistic) << ","
                << format_double(t.result->p_value) << "," << (t.result->exact ? "1" : "0");
        else
            out << ",,,";
        out << "," << t.note << "\n";
    }
}

void write_curve_csv(std::ostream& out, const GridCurve& curve) {
    out << "x,objective\n";
    for (std::size_t i = 0; i < curve.xs.size(); ++i)
        out << format_double(curve.xs[i]) << "," << format_double(curve.ys[i]) << "\n";
}

std::string format_estimate_line(const EstimateResult& r) {
    std::ostringstream out;
    out << "method=" << to_string(r.method) << " estimate=" << format_double(r.estimate)
        << " dispersion=" << format_double(r.dispersion) << " clamped=" << (r.clamped ? 1 : 0)
        << " subs=";
    for (std::size_t i = 0; i < r.sub_estimates.size(); ++i) {
        if (i) out << ";";
        out << format_double(r.sub_estimates[i]);
    }
    out << " notes=\"" << r.diagnostics << "\"";
    return out.str();
}

std::string format_config_line(const MethodConfig& cfg, double hit_radius, bool per_player) {
    std::ostringstream out;
    out << "effective-config lambda_qre=" << format_double(cfg.lambda_qre)
        << " n_ase=" << cfg.n_ase << " n_pse=" << cfg.n_pse
        << " lambda_qr=" << format_double(cfg.lambda_qr) << " grid=" << format_double(cfg.grid_lo)
        << ":" << format_double(cfg.grid_hi) << ":" << format_double(cfg.grid_step)
        << " radius=" << format_double(hit_radius)
        << " aggregation=" << (per_player ? "per-player" : "session");
    return out.str();
}

}  // namespace gamest::io
