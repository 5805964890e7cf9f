#include "injury/generator.hpp"

#include <algorithm>
#include <cmath>

#include "injury/error.hpp"
#include "injury/random.hpp"

namespace injury {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t column_of(std::string_view name) {
    const auto& names = feature_names();
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw Error(ErrorKind::ConfigInvalid, "unknown feature '" + std::string(name) + "'");
    return std::size_t(it - names.begin());
}

struct Lognormal {
    double mu = 0.0, sigma = 0.0;

    static Lognormal matching(double mean, double var) {
        const double s2 = std::log1p(var / (mean * mean));
        return {std::log(mean) - 0.5 * s2, std::sqrt(s2)};
    }
    double draw(Rng& rng) const { return std::exp(mu + sigma * rng.normal()); }
};

struct Mixture {
    Lognormal light, heavy;

    static Mixture matching(double mean, double sd, double w_light, double share) {
        const double w_heavy = 1.0 - w_light;
        const double d = std::sqrt(share * sd * sd / (w_light * w_heavy));
        const double m_light = mean - w_heavy * d, m_heavy = mean + w_light * d;
        if (!(m_light > 0.0)) throw Error(ErrorKind::ConfigInvalid, "mixture split leaves a non-positive mean");
        const double within = (1.0 - share) * sd * sd;
        return {Lognormal::matching(m_light, within), Lognormal::matching(m_heavy, within)};
    }
    double draw(Rng& rng, bool heavy) const { return (heavy ? this->heavy : light).draw(rng); }
};

/// Mean and variance of a fraction f such that child = parent * f has the child's moments.
/// Share f with child = parent * f * g matching the child's moments, where g is an
/// independent factor with E[g] = 1 and E[g^2] = g2.
Lognormal fraction_for(const WorkloadDistribution& parent, const WorkloadDistribution& child, double g2 = 1.0) {
    const double mf = child.mean / parent.mean;
    const double e2 = (child.sd * child.sd + child.mean * child.mean) /
                      ((parent.sd * parent.sd + parent.mean * parent.mean) * g2);
    if (!(e2 > mf * mf)) throw Error(ErrorKind::ConfigInvalid, "weekly share factor exceeds the share variance");
    const double var = e2 - mf * mf;
    return Lognormal::matching(mf, var);
}

std::vector<int> session_days(int per_week) {
    std::vector<int> d;
    for (int j = 0; j < per_week; ++j) d.push_back(j * 6 / per_week);
    return d;
}

bool is_fraction_child(std::size_t w) {
    return w == std::size_t(Workload::HighSpeedRunning) || w == std::size_t(Workload::Acc3) ||
           w == std::size_t(Workload::Dec3);
}

bool is_count(std::size_t w) {
    return w == std::size_t(Workload::Acc2) || w == std::size_t(Workload::Acc3) || w == std::size_t(Workload::Dec2) ||
           w == std::size_t(Workload::Dec3);
}

}  // namespace

GeneratorConfig::GeneratorConfig() {
    workload = {{{3882.94, 1633.21}, {133.22, 66.41}, {1151.99, 694.25}, {543.89, 339.64},
                 {8.70, 6.09}, {410.67, 221.29}, {64.26, 31.72}, {16.16, 10.97},
                 {62.44, 33.09}, {19.14, 12.78}, {117.98, 78.52}, {0.63, 0.31}}};
    rules = {
        {"returning_player_high_hsr", {{"PI_EWMA", 0.03, 0.68}, {"d_HSR_EWMA", 112.35, kInf}}, 0.9},
        {"high_hsr_low_monotony", {{"d_HSR_EWMA", 150.0, kInf}, {"d_TOT_MSWR", -kInf, 1.7}}, 1.0},
    };
}

void GeneratorConfig::validate() const {
    auto bad = [](const std::string& m) { throw Error(ErrorKind::ConfigInvalid, m); };
    if (n_players < 1) bad("n_players must be >= 1");
    if (weeks < 1) bad("weeks must be >= 1");
    if (sessions_per_week < 1 || sessions_per_week > 7) bad("sessions_per_week must be in [1, 7]");
    if (!Date::parse(start_date)) bad("start_date must be YYYY-MM-DD");
    for (const auto& d : workload)
        if (!(d.mean > 0.0) || !(d.sd > 0.0)) bad("workload means and sds must be positive");
    if (!(light_weight > 0.0 && light_weight < 1.0)) bad("light_weight must be in (0, 1)");
    if (!(between_share >= 0.0 && between_share < 1.0)) bad("between_share must be in [0, 1)");
    if (!(hsr_week_sigma >= 0.0)) bad("hsr_week_sigma must be >= 0");
    auto prob = [&](double p, const char* what) {
        if (!(p >= 0.0 && p <= 1.0)) bad(std::string(what) + " must be in [0, 1]");
    };
    prob(base_rate, "base_rate");
    prob(preseason_injury_rate, "preseason_injury_rate");
    prob(game_probability, "game_probability");
    for (const auto& r : rules) {
        prob(r.probability, "rule probability");
        for (const auto& c : r.conditions) {
            column_of(c.feature);
            if (!(c.lo < c.hi)) bad("rule '" + r.name + "' has an empty interval on " + c.feature);
        }
    }
    if (min_days_absent < 1 || max_days_absent < min_days_absent) bad("days_absent range is invalid");
    for (std::size_t w = 0; w < kWorkloadCount; ++w)
        Mixture::matching(workload[w].mean, workload[w].sd, light_weight, between_share);
}

namespace {

nlohmann::json bound(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

}  // namespace

nlohmann::json to_json(const GeneratorConfig& c) {
    nlohmann::json wl = nlohmann::json::object();
    for (std::size_t w = 0; w < kWorkloadCount; ++w)
        wl[std::string(kWorkloadNames[w])] = {{"mean", c.workload[w].mean}, {"sd", c.workload[w].sd}};
    nlohmann::json rules = nlohmann::json::array();
    for (const auto& r : c.rules) {
        nlohmann::json conds = nlohmann::json::array();
        for (const auto& k : r.conditions) conds.push_back({{"feature", k.feature}, {"lo", bound(k.lo)}, {"hi", bound(k.hi)}});
        rules.push_back({{"name", r.name}, {"conditions", conds}, {"probability", r.probability}});
    }
    return {{"n_players", c.n_players}, {"weeks", c.weeks}, {"sessions_per_week", c.sessions_per_week},
            {"start_date", c.start_date}, {"workload", wl}, {"light_weight", c.light_weight},
            {"between_share", c.between_share}, {"hsr_week_sigma", c.hsr_week_sigma}, {"rules", rules}, {"base_rate", c.base_rate},
            {"preseason_injury_rate", c.preseason_injury_rate}, {"min_days_absent", c.min_days_absent},
            {"max_days_absent", c.max_days_absent}, {"game_probability", c.game_probability}, {"seed", c.seed}};
}

GeneratorConfig generator_config_from_json(const nlohmann::json& j) {
    GeneratorConfig c;
    try {
        c.n_players = j.value("n_players", c.n_players);
        c.weeks = j.value("weeks", c.weeks);
        c.sessions_per_week = j.value("sessions_per_week", c.sessions_per_week);
        c.start_date = j.value("start_date", c.start_date);
        c.light_weight = j.value("light_weight", c.light_weight);
        c.between_share = j.value("between_share", c.between_share);
        c.hsr_week_sigma = j.value("hsr_week_sigma", c.hsr_week_sigma);
        c.base_rate = j.value("base_rate", c.base_rate);
        c.preseason_injury_rate = j.value("preseason_injury_rate", c.preseason_injury_rate);
        c.min_days_absent = j.value("min_days_absent", c.min_days_absent);
        c.max_days_absent = j.value("max_days_absent", c.max_days_absent);
        c.game_probability = j.value("game_probability", c.game_probability);
        c.seed = j.value("seed", c.seed);
        if (j.contains("workload"))
            for (std::size_t w = 0; w < kWorkloadCount; ++w) {
                const std::string name(kWorkloadNames[w]);
                if (!j["workload"].contains(name)) continue;
                c.workload[w].mean = j["workload"][name].value("mean", c.workload[w].mean);
                c.workload[w].sd = j["workload"][name].value("sd", c.workload[w].sd);
            }
        if (j.contains("rules")) {
            c.rules.clear();
            for (const auto& jr : j["rules"]) {
                PlantedRule r{jr.value("name", std::string("rule")), {}, jr.value("probability", 1.0)};
                for (const auto& jc : jr.at("conditions")) {
                    Condition k{jc.at("feature").get<std::string>()};
                    if (jc.contains("lo") && !jc["lo"].is_null()) k.lo = jc["lo"].get<double>();
                    if (jc.contains("hi") && !jc["hi"].is_null()) k.hi = jc["hi"].get<double>();
                    r.conditions.push_back(std::move(k));
                }
                c.rules.push_back(std::move(r));
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::ConfigInvalid, std::string("generator config: ") + e.what());
    }
    c.validate();
    return c;
}

GeneratedSeason generate(const GeneratorConfig& cfg) {
    cfg.validate();
    Rng rng(cfg.seed);
    const Date start = *Date::parse(cfg.start_date);
    const FeatureSpec spec;

    std::array<Mixture, kWorkloadCount> mix;
    std::array<Lognormal, kWorkloadCount> frac;
    // weekly factor g with E[g] = 1; the per-session share keeps the overall moments
    const Lognormal hsr_week = Lognormal::matching(1.0, std::expm1(cfg.hsr_week_sigma * cfg.hsr_week_sigma));
    const double g2 = std::exp(cfg.hsr_week_sigma * cfg.hsr_week_sigma);
    for (std::size_t w = 0; w < kWorkloadCount; ++w) {
        if (w == std::size_t(Workload::HighSpeedRunning))
            frac[w] = fraction_for(cfg.workload[std::size_t(Workload::TotalDistance)], cfg.workload[w], g2);
        else if (w == std::size_t(Workload::Acc3))
            frac[w] = fraction_for(cfg.workload[std::size_t(Workload::Acc2)], cfg.workload[w]);
        else if (w == std::size_t(Workload::Dec3))
            frac[w] = fraction_for(cfg.workload[std::size_t(Workload::Dec2)], cfg.workload[w]);
        else
            mix[w] = Mixture::matching(cfg.workload[w].mean, cfg.workload[w].sd, cfg.light_weight, cfg.between_share);
    }
    std::vector<std::vector<std::pair<std::size_t, Condition>>> rule_cols;
    for (const auto& r : cfg.rules) {
        rule_cols.emplace_back();
        for (const auto& c : r.conditions) rule_cols.back().emplace_back(column_of(c.feature), c);
    }

    std::vector<PlayerProfile> players;
    std::vector<TrainingSession> sessions;
    std::vector<InjuryRecord> injuries;
    std::vector<LedgerEntry> ledger;
    const auto days = session_days(cfg.sessions_per_week);

    for (int p = 0; p < cfg.n_players; ++p) {
        char id[16];
        std::snprintf(id, sizeof id, "P%02d", p + 1);
        PlayerProfile prof{id, 18 + int(rng.index(17)), rng.normal(181.0, 6.0), 0.0, Role(rng.index(5))};
        prof.body_mass_kg = 23.0 * std::pow(prof.height_cm / 100.0, 2) * rng.uniform(0.93, 1.07);
        players.push_back(prof);

        std::vector<Date> onsets;
        if (rng.bernoulli(cfg.preseason_injury_rate)) {
            const Date onset = start.plus_days(-long(30 + rng.index(60)));
            injuries.push_back({prof.player_id, onset, cfg.min_days_absent});
            ledger.push_back({prof.player_id, onset, "preseason", std::nullopt});
            onsets.push_back(onset);
        }
        FeatureAccumulator acc(prof, spec);
        Date absent_until = start.plus_days(-1);
        double play_time = 0.0;
        int games = 0;
        for (int wk = 0; wk < cfg.weeks; ++wk) {
            const double hsr_factor = hsr_week.draw(rng);
            const bool game = rng.bernoulli(cfg.game_probability);
            const double minutes = game ? std::round(rng.uniform(0.0, 90.0)) : 0.0;
            for (int d : days) {
                const Date date = start.plus_days(7 * wk + d);
                // draws happen even for missed sessions so one player's absences never
                // shift another player's stream
                TrainingSession s{prof.player_id, date, {}, play_time, games};
                const bool heavy = !rng.bernoulli(cfg.light_weight);
                for (std::size_t w = 0; w < kWorkloadCount; ++w)
                    if (!is_fraction_child(w)) s.workload[w] = mix[w].draw(rng, heavy);
                auto& wl = s.workload;
                wl[std::size_t(Workload::HighSpeedRunning)] =
                    wl[0] * std::min(1.0, hsr_factor * frac[std::size_t(Workload::HighSpeedRunning)].draw(rng));
                for (auto [child, parent] : {std::pair{Workload::Acc3, Workload::Acc2}, std::pair{Workload::Dec3, Workload::Dec2}}) {
                    wl[std::size_t(parent)] = std::round(wl[std::size_t(parent)]);
                    wl[std::size_t(child)] =
                        std::round(wl[std::size_t(parent)] * std::min(1.0, frac[std::size_t(child)].draw(rng)));
                }
                for (std::size_t w = 0; w < kWorkloadCount; ++w)
                    if (is_count(w)) wl[w] = std::round(wl[w]);
                const double u = rng.uniform();
                const double u_base = rng.uniform();
                const int absence = cfg.min_days_absent + int(rng.index(std::size_t(cfg.max_days_absent - cfg.min_days_absent + 1)));
                if (date <= absent_until) continue;

                const int prior = int(std::count_if(onsets.begin(), onsets.end(), [&](Date o) { return o < date; }));
                const auto row = acc.push(s, prior);
                sessions.push_back(s);
                if (!row) continue;
                std::string cause;
                // rules are tried in order with a single draw, so the first matching rule owns the injury
                for (std::size_t r = 0; r < cfg.rules.size() && cause.empty(); ++r) {
                    bool ok = true;
                    for (const auto& [col, c] : rule_cols[r]) ok = ok && c.contains((*row)[col]);
                    if (ok && u < cfg.rules[r].probability) cause = cfg.rules[r].name;
                }
                if (cause.empty() && u_base < cfg.base_rate) cause = "base";
                if (cause.empty()) continue;
                const Date onset = date.plus_days(1);
                injuries.push_back({prof.player_id, onset, absence});
                ledger.push_back({prof.player_id, onset, cause, date});
                onsets.push_back(onset);
                absent_until = onset.plus_days(absence);
            }
            if (game) {
                play_time += minutes;
                ++games;
            }
        }
    }
    GeneratedSeason out{SeasonLog::assemble(std::move(players), std::move(sessions), std::move(injuries)), std::move(ledger)};
    std::stable_sort(out.ledger.begin(), out.ledger.end(), [&](const LedgerEntry& a, const LedgerEntry& b) {
        const auto pa = *out.log.player_index(a.player_id), pb = *out.log.player_index(b.player_id);
        return pa != pb ? pa < pb : a.onset < b.onset;
    });
    return out;
}

nlohmann::json to_json(const std::vector<LedgerEntry>& ledger) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& e : ledger)
        arr.push_back({{"player_id", e.player_id}, {"onset", e.onset.to_string()}, {"cause", e.cause},
                       {"session_date", e.session_date ? nlohmann::json(e.session_date->to_string()) : nlohmann::json(nullptr)}});
    return {{"injuries", std::move(arr)}};
}

}  // namespace injury
