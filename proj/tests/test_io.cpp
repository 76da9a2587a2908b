#include <doctest.h>

#include <sstream>

#include "gamest/io.hpp"
#include "helpers.hpp"

using namespace gamest;
using namespace gamest::test;

namespace {

const char* kGameText =
    "name: g1\n"
    "rows: 2\n"
    "cols: 2\n"
    "u_row: 1 0 0 1\n"
    "u_col: 0 1 1 0\n";

}  // namespace

TEST_CASE("game documents parse into tables") {
    const io::GameDoc doc = io::parse_game(kGameText);
    CHECK(doc.name == "g1");
    CHECK(doc.game.u(Player::row, 0, 0) == 1.0);
    CHECK(doc.game.u(Player::col, 0, 1) == 1.0);
    CHECK_FALSE(doc.hidden.has_value());
    CHECK_THROWS_AS(doc.masked(), Error);
}

TEST_CASE("a hidden marker builds a masked view") {
    const std::string text = std::string(kGameText) + "hidden: row,0,0\n";
    const io::GameDoc doc = io::parse_game(text);
    REQUIRE(doc.hidden.has_value());
    const MaskedGame m = doc.masked();
    CHECK(m.hidden().owner == Player::row);
    CHECK_THROWS_AS(m.u(Player::row, 0, 0), Error);
    CHECK_FALSE(m.true_value().has_value());
}

TEST_CASE("unknown or duplicate game fields are rejected with their line") {
    CHECK_THROWS_WITH_AS(io::parse_game(std::string(kGameText) + "extra: 1\n"),
                         doctest::Contains("unknown field"), Error);
    CHECK_THROWS_WITH_AS(io::parse_game(std::string(kGameText) + "rows: 2\n"),
                         doctest::Contains("duplicate"), Error);
    CHECK_THROWS_WITH_AS(io::parse_game("name: g1\nrows: 2\ncols: 2\nu_row: 1 0 0\nu_col: 0 1 1 0\n"),
                         doctest::Contains("rows*cols"), Error);
    CHECK_THROWS_WITH_AS(io::parse_game(std::string(kGameText) + "hidden: row,5,0\n"),
                         doctest::Contains("outside"), Error);
}

TEST_CASE("game serialization is a parse fixpoint with full precision") {
    SplitMix64 rng(81);
    for (int i = 0; i < 20; ++i) {
        io::GameDoc doc;
        doc.name = "rand" + std::to_string(i);
        doc.game = random_game(rng);
        const std::string once = io::serialize_game(doc);
        const io::GameDoc back = io::parse_game(once);
        CHECK(io::serialize_game(back) == once);
        CHECK(back.game.u_row == doc.game.u_row);
        CHECK(back.game.u_col == doc.game.u_col);
    }
    // with a hidden marker the placeholder entry is normalized to zero
    io::GameDoc doc;
    doc.name = "masked";
    doc.game = random_game(rng);
    doc.hidden = HiddenCell{Player::col, 1, 0};
    doc.game.set(Player::col, 1, 0, 0.0);
    const std::string once = io::serialize_game(doc);
    const io::GameDoc back = io::parse_game(once);
    CHECK(io::serialize_game(back) == once);
    REQUIRE(back.hidden.has_value());
    CHECK(back.hidden->owner == Player::col);
    CHECK(back.game.u_col == doc.game.u_col);
}

TEST_CASE("comments and blank lines are allowed") {
    const std::string text =
        "# a hand-written game\nname: g2\n\nrows: 2\ncols: 2\nu_row: 1 2 3 4\nu_col: 4 3 2 1\n";
    CHECK(io::parse_game(text).name == "g2");
}

TEST_CASE("session documents parse plays and validate declared frequencies") {
    const std::string text =
        "game: g1\nsession: s01\nperiods: 3\nplays:\n0,0\n1,1\n0,1\n"
        "freq_row: 0.6666666666666666 0.3333333333333333\nfreq_col: 0.3333333333333333 "
        "0.6666666666666666\n";
    const io::SessionDoc doc = io::parse_session(text);
    CHECK(doc.game_name == "g1");
    CHECK(doc.session_id == "s01");
    CHECK(doc.data.periods() == 3);
    CHECK(doc.data.plays[2] == std::array<int, 2>{0, 1});

    const std::string wrong =
        "game: g1\nsession: s01\nperiods: 3\nplays:\n0,0\n1,1\n0,1\n"
        "freq_row: 0.5 0.5\nfreq_col: 0.3333333333333333 0.6666666666666666\n";
    CHECK_THROWS_WITH_AS(io::parse_session(wrong), doctest::Contains("recount"), Error);
}

TEST_CASE("session parsing is strict about the play count") {
    CHECK_THROWS_AS(io::parse_session("game: g\nsession: s\nperiods: 3\nplays:\n0,0\n1,1\n"),
                    Error);
    CHECK_THROWS_AS(io::parse_session("game: g\nsession: s\nperiods: 1\nplays:\n0,0,0\n"), Error);
    CHECK_THROWS_AS(io::parse_session("game: g\nsession: s\nplays:\n0,0\n"), Error);
}

TEST_CASE("session serialization round-trips") {
    io::SessionDoc doc;
    doc.game_name = "g1";
    doc.session_id = "s-7";
    doc.data = simulate({{0.4, 0.6}, {0.7, 0.3}}, 25, 5);
    const std::string once = io::serialize_session(doc);
    const io::SessionDoc back = io::parse_session(once);
    CHECK(back.data.plays == doc.data.plays);
    CHECK(io::serialize_session(back) == once);
}

TEST_CASE("doubles format shortest and round-trip exactly") {
    SplitMix64 rng(82);
    for (int i = 0; i < 200; ++i) {
        const double v = (rng.next_double() - 0.5) * 44.0;
        const std::string s = io::format_double(v);
        CHECK(std::stod(s) == v);
    }
    CHECK(io::format_double(0.1) == "0.1");
    CHECK(io::format_double(22.0) == "22");
}

TEST_CASE("csv emitters keep their documented headers") {
    EvalReport report;
    report.summaries.push_back({Method::ne, {}, 0, 0, std::vector<int>(44, 0)});
    std::ostringstream rep, sum, hist, tests;
    io::write_report_csv(rep, report);
    io::write_summary_csv(sum, report);
    io::write_hist_csv(hist, report);
    io::write_tests_csv(tests, report);
    CHECK(rep.str().rfind("game,session,cell,method,true_value,estimate,error,status,reason\n",
                          0) == 0);
    CHECK(sum.str().rfind(
              "method,n,rmse,mean_error,std_error,hit_rate,n_estimator_error,n_out_of_range\n",
              0) == 0);
    CHECK(hist.str().rfind("method,bin_lo,bin_hi,count\n", 0) == 0);
    CHECK(tests.str().rfind("method_a,method_b,n,statistic,p_value,exact,note\n", 0) == 0);
}

TEST_CASE("estimate lines carry the method and the flags") {
    EstimateResult r;
    r.method = Method::qr;
    r.estimate = 11.0;
    r.sub_estimates = {11.0};
    const std::string line = io::format_estimate_line(r);
    CHECK(line.find("method=qr") == 0);
    CHECK(line.find("estimate=11") != std::string::npos);
    CHECK(line.find("clamped=0") != std::string::npos);
}

TEST_CASE("the effective config line pins every parameter") {
    const std::string line = io::format_config_line(MethodConfig{}, 3.0, false);
    CHECK(line.find("lambda_qre=1.05") != std::string::npos);
    CHECK(line.find("n_ase=12") != std::string::npos);
    CHECK(line.find("n_pse=6") != std::string::npos);
    CHECK(line.find("lambda_qr=3") != std::string::npos);
    CHECK(line.find("grid=0:22:0.01") != std::string::npos);
    CHECK(line.find("radius=3") != std::string::npos);
}
