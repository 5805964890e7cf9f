#include <gtest/gtest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "injury/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(const std::vector<std::string>& args, const std::string& input = "") {
    std::istringstream in(input);
    std::ostringstream out, err;
    const int code = injury::cli_main(args, in, out, err);
    return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() / ("injurycast_cli_" + std::to_string(::getpid()));
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }
    std::string write(const std::string& name, const std::string& text) const {
        std::ofstream(path(name)) << text;
        return path(name);
    }
    fs::path dir_;
};

std::string slurp(const std::string& p) {
    std::ifstream f(p);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

}  // namespace

TEST_F(Cli, UsageErrors) {
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"bogus"}).code, 2);
    auto r = run({"generate"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("--seed"), std::string::npos);
    EXPECT_EQ(run({"compare", "--seed", "1", "--format", "xml"}).code, 2);
    EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(Cli, MissingFileNamesThePath) {
    const std::string missing = path("nope.csv");
    auto r = run({"ingest", "--sessions", missing, "--injuries", missing, "--players", missing});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find(missing), std::string::npos);
    EXPECT_EQ(run({"rules", "--model", missing}).code, 1);
}

TEST_F(Cli, ValidationErrorExitsOne) {
    auto p = write("players.csv", "player_id,age,height_cm,mass_kg,role\nA,25,180,75,Midfielder\n");
    auto s = write("sessions.csv",
                   "player_id,date,d_tot,d_hsr,d_met,d_hml,d_hml_m,d_exp,acc2,acc3,dec2,dec3,dsl,fi,play_time,games\n"
                   "Z,2020-01-01,1,1,1,1,1,1,1,1,1,1,1,1,0,0\n");
    auto i = write("injuries.csv", "player_id,onset_date,days_absent\n");
    auto r = run({"ingest", "--sessions", s, "--injuries", i, "--players", p});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("sessions.csv"), std::string::npos);
}

TEST_F(Cli, GenerateIngestFeaturize) {
    auto cfg = write("gen.json", R"({"n_players": 6, "weeks": 8})");
    auto g = run({"generate", "--seed", "7", "--config", cfg});
    ASSERT_EQ(g.code, 0) << g.err;
    EXPECT_EQ(run({"generate", "--seed", "7", "--config", cfg}).out, g.out);
    auto ing = run({"ingest"}, g.out);
    ASSERT_EQ(ing.code, 0) << ing.err;
    EXPECT_NE(ing.out.find("\"players\": 6"), std::string::npos);
    auto fea = run({"featurize", "--keys"}, g.out);
    ASSERT_EQ(fea.code, 0) << fea.err;
    EXPECT_EQ(fea.out.rfind("player_id,date,d_TOT,", 0), 0u);
    EXPECT_NE(fea.err.find("\"rows\""), std::string::npos);

    auto d = run({"generate", "--seed", "7", "--config", cfg, "--out", path("season")});
    ASSERT_EQ(d.code, 0) << d.err;
    for (const char* f : {"players.csv", "sessions.csv", "injuries.csv", "ledger.json"})
        EXPECT_TRUE(fs::exists(dir_ / "season" / f)) << f;
    auto files = run({"featurize", "--sessions", path("season/sessions.csv"), "--injuries",
                      path("season/injuries.csv"), "--players", path("season/players.csv")});
    EXPECT_EQ(files.out, run({"featurize"}, g.out).out);
}

TEST_F(Cli, TrainRulesCompare) {
    auto g = run({"generate", "--seed", "11"});
    ASSERT_EQ(g.code, 0);
    auto table = run({"featurize"}, g.out);
    auto pcfg = write("pipe.json", R"({"grid": [{"max_depth": 4, "min_samples_leaf": 1, "min_samples_split": 2}],
                                       "forest": {"n_trees": 5}})");
    auto t = run({"train", "--seed", "3", "--config", pcfg, "--report", path("report.json")}, table.out);
    ASSERT_EQ(t.code, 0) << t.err;
    EXPECT_NE(t.out.find("decision_tree"), std::string::npos);
    EXPECT_NE(slurp(path("report.json")).find("confusion"), std::string::npos);
    write("model.json", t.out);
    write("table.csv", table.out);
    auto rules = run({"rules", "--model", path("model.json"), "--table", path("table.csv")});
    ASSERT_EQ(rules.code, 0) << rules.err;
    EXPECT_FALSE(rules.out.empty());
    EXPECT_EQ(run({"rules", "--model", path("model.json"), "--format", "json"}).code, 0);

    auto c = run({"compare", "--seed", "1", "--trials", "1", "--format", "csv", "--config", pcfg}, g.out);
    ASSERT_EQ(c.code, 0) << c.err;
    for (const char* row : {"DT", "RF", "LR", "B1", "B2", "B3", "B4", "C_vote", "C_all", "C_one"})
        EXPECT_NE(c.out.find(std::string("\n") + row), std::string::npos) << row;
}

TEST_F(Cli, Simulate) {
    auto gcfg = write("gen.json", R"({"n_players": 12, "weeks": 10})");
    auto g = run({"generate", "--seed", "5", "--config", gcfg});
    auto pcfg = write("pipe.json", R"({"grid": [{"max_depth": 3, "min_samples_leaf": 1, "min_samples_split": 2}]})");
    auto s = run({"simulate", "--seed", "2", "--start-week", "7", "--config", pcfg, "--cost", path("cost.json"),
                  "--log", path("log.json")},
                 g.out);
    ASSERT_EQ(s.code, 0) << s.err;
    EXPECT_EQ(s.out.rfind("week,cumulative_f1_DT", 0), 0u);
    EXPECT_NE(slurp(path("cost.json")).find("percent_decrease"), std::string::npos);
    EXPECT_NE(slurp(path("log.json")).find("stabilization_week"), std::string::npos);
    EXPECT_EQ(run({"simulate", "--seed", "2", "--start-week", "20"}, g.out).code, 1);
}
