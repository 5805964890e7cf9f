#include "injury/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "injury/baselines.hpp"
#include "injury/error.hpp"
#include "injury/features.hpp"
#include "injury/generator.hpp"
#include "injury/pipeline.hpp"
#include "injury/rules.hpp"
#include "injury/season.hpp"
#include "injury/simulator.hpp"

namespace injury {

namespace {

namespace fs = std::filesystem;

struct SeasonInputs {
    std::string sessions, injuries, players;
    int horizon = kDefaultHorizonDays;

    void add(CLI::App* app) {
        app->add_option("--sessions", sessions, "sessions.csv (default: bundle on stdin)");
        app->add_option("--injuries", injuries, "injuries.csv");
        app->add_option("--players", players, "players.csv");
        app->add_option("--horizon", horizon, "days between a session and an injury it is labeled with")
            ->check(CLI::PositiveNumber);
    }
};

std::string read_all(std::istream& in) {
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::MissingFile, "cannot open '" + path + "'");
    return read_all(f);
}

nlohmann::json read_json_file(const std::string& path) {
    try {
        return nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::ConfigInvalid, "'" + path + "' is not valid JSON: " + e.what());
    }
}

/// "# players.csv" / "# sessions.csv" / "# injuries.csv" sections in one stream.
SeasonLog parse_bundle(const std::string& text) {
    std::map<std::string, std::string> parts;
    std::string current;
    std::istringstream is(text);
    for (std::string line; std::getline(is, line);) {
        if (line.rfind("# ", 0) == 0) {
            current = line.substr(2);
            while (!current.empty() && (current.back() == '\r' || current.back() == ' ')) current.pop_back();
            parts[current];
            continue;
        }
        if (current.empty()) {
            if (line.empty()) continue;
            throw Error(ErrorKind::MalformedRow, "season bundle must start with a '# <name>.csv' section header");
        }
        parts[current] += line + "\n";
    }
    for (const char* need : {"players.csv", "sessions.csv", "injuries.csv"})
        if (!parts.count(need)) throw Error(ErrorKind::MalformedRow, std::string("season bundle lacks section ") + need);
    std::istringstream s(parts["sessions.csv"]), i(parts["injuries.csv"]), p(parts["players.csv"]);
    return parse_season(s, i, p);
}

void write_bundle(std::ostream& out, const SeasonLog& log) {
    out << "# players.csv\n";
    write_players_csv(out, log);
    out << "# sessions.csv\n";
    write_sessions_csv(out, log);
    out << "# injuries.csv\n";
    write_injuries_csv(out, log);
}

SeasonLog load_season(const SeasonInputs& si, std::istream& in) {
    const int given = !si.sessions.empty() + !si.injuries.empty() + !si.players.empty();
    if (given == 3) return parse_season(fs::path(si.sessions), fs::path(si.injuries), fs::path(si.players));
    if (given != 0) throw CLI::ValidationError("--sessions, --injuries and --players must be given together");
    return parse_bundle(read_all(in));
}

/// Writes to `path`, or to `fallback` when the path is empty.
void emit(const std::string& path, std::ostream& fallback, const std::string& content) {
    if (path.empty()) {
        fallback << content;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::MissingFile, "cannot write '" + path + "'");
    f << content;
}

TrainingTable load_table(const std::string& path, std::istream& in) {
    if (path.empty()) return TrainingTable::read_csv(in);
    std::ifstream f(path);
    if (!f) throw Error(ErrorKind::MissingFile, "cannot open '" + path + "'");
    return TrainingTable::read_csv(f);
}

struct Built {
    SeasonLog log;
    LabelingResult labeled;
    TableBuild build;
};

Built build_all(const SeasonInputs& si, std::istream& in) {
    Built b{load_season(si, in), {}, {}};
    b.labeled = assign_labels(b.log, si.horizon);
    b.build = build_training_table(b.labeled, b.log);
    return b;
}

std::string to_text(const nlohmann::json& j) { return j.dump(2) + "\n"; }

}  // namespace

int cli_main(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"Injury forecasting from GPS training workload"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    // generate
    auto* gen = app.add_subcommand("generate", "Write a synthetic season with planted injury rules");
    std::uint64_t gen_seed = 0;
    std::string gen_out, gen_config, gen_ledger;
    gen->add_option("--seed", gen_seed, "random seed")->required();
    gen->add_option("--out", gen_out, "output directory (default: bundle on stdout)");
    gen->add_option("--config", gen_config, "generator config JSON");
    gen->add_option("--ledger", gen_ledger, "ground-truth ledger JSON path");

    // ingest
    auto* ing = app.add_subcommand("ingest", "Parse and validate a season, print a summary");
    SeasonInputs ing_in;
    ing_in.add(ing);

    // featurize
    auto* fea = app.add_subcommand("featurize", "Build the labeled feature table CSV");
    SeasonInputs fea_in;
    fea_in.add(fea);
    std::string fea_out;
    bool fea_keys = false;
    fea->add_option("--out", fea_out, "table CSV path (default: stdout)");
    fea->add_flag("--keys", fea_keys, "prefix rows with player_id and date");

    // train
    auto* tra = app.add_subcommand("train", "Run the selection/tuning/evaluation pipeline and emit the model");
    std::uint64_t tra_seed = 0;
    std::string tra_table, tra_out, tra_report, tra_config;
    tra->add_option("--seed", tra_seed, "random seed")->required();
    tra->add_option("--table", tra_table, "table CSV (default: stdin)");
    tra->add_option("--out", tra_out, "model JSON path (default: stdout)");
    tra->add_option("--report", tra_report, "evaluation report JSON path");
    tra->add_option("--config", tra_config, "pipeline config JSON");

    // compare
    auto* cmp = app.add_subcommand("compare", "Compare the tree against RF, LR, baselines and ACWR/MSWR forecasters");
    SeasonInputs cmp_in;
    cmp_in.add(cmp);
    std::uint64_t cmp_seed = 0;
    int cmp_trials = 200;
    std::string cmp_out, cmp_format = "text", cmp_config;
    cmp->add_option("--seed", cmp_seed, "random seed")->required();
    cmp->add_option("--trials", cmp_trials, "repeated trials")->check(CLI::PositiveNumber);
    cmp->add_option("--out", cmp_out, "output path (default: stdout)");
    cmp->add_option("--format", cmp_format, "text, csv or json")->check(CLI::IsMember({"text", "csv", "json"}));
    cmp->add_option("--config", cmp_config, "pipeline config JSON");

    // simulate
    auto* sim = app.add_subcommand("simulate", "Walk-forward weekly retraining over the season");
    SeasonInputs sim_in;
    sim_in.add(sim);
    std::uint64_t sim_seed = 0;
    int sim_start = 6;
    double sim_salary = 83.0;
    std::string sim_out, sim_log, sim_cost, sim_config;
    bool sim_comparators = false;
    sim->add_option("--seed", sim_seed, "random seed")->required();
    sim->add_option("--start-week", sim_start, "first training week")->check(CLI::PositiveNumber);
    sim->add_option("--salary", sim_salary, "daily salary for the cost report")->check(CLI::NonNegativeNumber);
    sim->add_option("--out", sim_out, "per-week CSV path (default: stdout)");
    sim->add_option("--log", sim_log, "per-week JSON log path");
    sim->add_option("--cost", sim_cost, "cost report JSON path");
    sim->add_option("--config", sim_config, "pipeline config JSON");
    sim->add_flag("--comparators", sim_comparators, "also track RF, LR and B1-B4");

    // rules
    auto* rul = app.add_subcommand("rules", "Print the injury rule handbook of a fitted tree");
    std::string rul_model, rul_table, rul_format = "text", rul_out;
    rul->add_option("--model", rul_model, "model JSON written by train")->required();
    rul->add_option("--table", rul_table, "labeled table CSV for frequency and accuracy");
    rul->add_option("--format", rul_format, "text or json")->check(CLI::IsMember({"text", "json"}));
    rul->add_option("--out", rul_out, "output path (default: stdout)");

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    auto load_pipeline = [](const std::string& path, std::uint64_t seed) {
        PipelineConfig c = path.empty() ? PipelineConfig{} : pipeline_config_from_json(read_json_file(path));
        c.seed = seed;
        return c;
    };

    try {
        if (*gen) {
            GeneratorConfig c = gen_config.empty() ? GeneratorConfig{} : generator_config_from_json(read_json_file(gen_config));
            c.seed = gen_seed;
            const auto g = generate(c);
            if (gen_out.empty()) {
                write_bundle(out, g.log);
            } else {
                fs::create_directories(gen_out);
                std::ostringstream p, s, i;
                write_players_csv(p, g.log);
                write_sessions_csv(s, g.log);
                write_injuries_csv(i, g.log);
                emit((fs::path(gen_out) / "players.csv").string(), out, p.str());
                emit((fs::path(gen_out) / "sessions.csv").string(), out, s.str());
                emit((fs::path(gen_out) / "injuries.csv").string(), out, i.str());
                if (gen_ledger.empty()) gen_ledger = (fs::path(gen_out) / "ledger.json").string();
            }
            if (!gen_ledger.empty()) emit(gen_ledger, out, to_text(to_json(g.ledger)));
        } else if (*ing) {
            const auto b = build_all(ing_in, in);
            std::size_t positives = 0;
            for (const auto& s : b.labeled.sessions) positives += s.label;
            nlohmann::json orphans = nlohmann::json::array();
            for (const auto& o : b.labeled.orphans)
                orphans.push_back({{"player_id", o.player_id}, {"onset", o.onset.to_string()}, {"reason", o.reason}});
            out << to_text({{"players", b.log.players.size()},
                            {"sessions", b.log.session_count()},
                            {"injuries", b.log.injuries.size()},
                            {"labeled_sessions", b.labeled.sessions.size()},
                            {"injury_sessions", positives},
                            {"excluded_sessions", b.labeled.excluded_sessions},
                            {"orphan_injuries", orphans}});
        } else if (*fea) {
            const auto b = build_all(fea_in, in);
            std::ostringstream os;
            b.build.table.write_csv(os, fea_keys);
            emit(fea_out, out, os.str());
            err << to_json(b.build.summary).dump() << "\n";
        } else if (*tra) {
            const auto table = load_table(tra_table, in);
            const auto cfg = load_pipeline(tra_config, tra_seed);
            const auto r = run_pipeline(table, cfg);
            emit(tra_out, out, to_text(r.model.to_json()));
            if (!tra_report.empty()) emit(tra_report, out, to_text(to_json(r)));
        } else if (*cmp) {
            const auto b = build_all(cmp_in, in);
            auto cfg = load_pipeline(cmp_config, cmp_seed);
            cfg.comparators = true;
            const auto aux = method_acwr_table(b.build.table, b.labeled);
            const auto s = repeat_trials(b.build.table, cfg, cmp_trials, cmp_seed, &aux);
            std::ostringstream os;
            if (cmp_format == "csv")
                write_comparison_csv(os, s);
            else if (cmp_format == "json")
                os << to_text(to_json(s));
            else
                write_comparison_text(os, s);
            emit(cmp_out, out, os.str());
        } else if (*sim) {
            const auto log = load_season(sim_in, in);
            SimulatorConfig cfg;
            cfg.pipeline = load_pipeline(sim_config, sim_seed);
            cfg.pipeline.comparators = sim_comparators;
            cfg.horizon_days = sim_in.horizon;
            cfg.start_week = sim_start;
            const auto weeks = walk_forward(log, cfg);
            std::ostringstream csv;
            write_fig3_csv(csv, weeks);
            emit(sim_out, out, csv.str());
            if (!sim_log.empty()) {
                nlohmann::json j = nlohmann::json::array();
                for (const auto& w : weeks) j.push_back(to_json(w));
                emit(sim_log, out, to_text({{"weeks", j}, {"feature_trace", to_json(feature_trace(weeks))}}));
            }
            if (!sim_cost.empty()) {
                const Money salary{std::llround(sim_salary * 100.0)};
                emit(sim_cost, out, to_text(to_json(savings(weeks, log.injuries, salary))));
            }
        } else if (*rul) {
            const auto model = DecisionTreeModel::from_json(read_json_file(rul_model));
            auto rules = extract_rules(model);
            if (!rul_table.empty()) rules = rule_stats(std::move(rules), load_table(rul_table, in));
            emit(rul_out, out, render_handbook(std::move(rules), rul_format == "json" ? HandbookFormat::Json : HandbookFormat::Text));
        }
    } catch (const CLI::ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

int cli_main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return cli_main(args, std::cin, std::cout, std::cerr);
}

}  // namespace injury
