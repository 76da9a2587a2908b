#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include "gamest/estimators.hpp"
#include "gamest/eval.hpp"
#include "gamest/game.hpp"

namespace gamest::io {

/// A parsed game document: a complete game plus, optionally, the cell marked
/// hidden. Hidden games carry no value for the hidden cell (the table entry
/// at that position is a placeholder and is discarded).
struct GameDoc {
    std::string name;
    GameSpec game;
    std::optional<HiddenCell> hidden;

    MaskedGame masked() const;
};

struct SessionDoc {
    std::string game_name;
    std::string session_id;
    SessionData data;
};

/// Strict key-value parsers; unknown fields, duplicate fields, and shape
/// mismatches are rejected with the offending line in the message. '#'
/// starts a comment.
GameDoc parse_game(std::string_view text);
SessionDoc parse_session(std::string_view text);

/// Canonical serializations; parse followed by serialize is a fixpoint.
/// Reals are rendered shortest-round-trip, so values survive exactly.
std::string serialize_game(const GameDoc& doc);
std::string serialize_session(const SessionDoc& doc);

GameDoc load_game_file(const std::filesystem::path& path);
SessionDoc load_session_file(const std::filesystem::path& path);

/// Shortest decimal form that parses back to exactly the same double.
std::string format_double(double v);

// CSV emitters. Headers are fixed; columns never reorder.
void write_report_csv(std::ostream& out, const EvalReport& report);
void write_summary_csv(std::ostream& out, const EvalReport& report);
void write_hist_csv(std::ostream& out, const EvalReport& report);
void write_tests_csv(std::ostream& out, const EvalReport& report);
void write_curve_csv(std::ostream& out, const GridCurve& curve);

/// One-line record of an estimate for the CLI data stream.
std::string format_estimate_line(const EstimateResult& r);

/// The effective-configuration log line; every run emits it on the
/// diagnostic stream so results are reproducible from the log alone.
std::string format_config_line(const MethodConfig& cfg, double hit_radius, bool per_player);

}  // namespace gamest::io
