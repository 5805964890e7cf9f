// Acceptance checks. Run without arguments for all of them, or pass criterion numbers.
// Each prints one line "C<n> PASS|FAIL <name>: <detail>"; the exit code is non-zero when any fails.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "injury/adasyn.hpp"
#include "injury/baselines.hpp"
#include "injury/cli.hpp"
#include "injury/features.hpp"
#include "injury/generator.hpp"
#include "injury/logit.hpp"
#include "injury/metrics.hpp"
#include "injury/pipeline.hpp"
#include "injury/random.hpp"
#include "injury/rules.hpp"
#include "injury/simulator.hpp"
#include "injury/tree.hpp"

using namespace injury;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kPiTolerance = 0.01;
constexpr double kPiSecondsLimit = 1.0;
constexpr double kRatioLo = 0.766, kRatioHi = 0.768;
constexpr double kAucTolerance = 1e-12;
constexpr double kGainTolerance = 1e-12;
constexpr double kBalanceLo = 0.9, kBalanceHi = 1.0;
constexpr double kRecallMin = 0.7, kPrecisionMin = 0.4, kTrialShare = 0.8;
constexpr int kTrials = 50;
constexpr double kMinutesLimit = 5.0;
constexpr double kWalkForwardF1Min = 0.5;
constexpr double kGradientRelError = 1e-4;
constexpr double kFrequencySumTolerance = 1e-12;

// Pinned seeds.
constexpr std::uint64_t kSeasonSeed = 1;
constexpr std::uint64_t kTrialSeed = 42;

struct Outcome {
    bool pass;
    std::string detail;
};

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::vector<std::string> names(std::size_t p) {
    std::vector<std::string> n;
    for (std::size_t j = 0; j < p; ++j) n.push_back("x" + std::to_string(j));
    return n;
}

TrainingTable random_table(Rng& rng, std::size_t n, std::size_t p, int levels, double prevalence) {
    TrainingTable t(names(p));
    std::vector<double> x(p);
    for (std::size_t i = 0; i < n; ++i) {
        for (auto& v : x) v = double(rng.index(std::size_t(levels)));
        std::uint8_t y = rng.bernoulli(prevalence);
        if (i == 0) y = 1;
        if (i == 1) y = 0;
        t.append(x, y, {});
    }
    return t;
}

struct PlantedSeason {
    GeneratorConfig cfg;
    SeasonLog log;
    LabelingResult labeled;
    TrainingTable table;
    std::set<std::string> planted;
};

const PlantedSeason& planted_season() {
    static const PlantedSeason s = [] {
        PlantedSeason p;
        p.cfg.seed = kSeasonSeed;
        p.log = generate(p.cfg).log;
        p.labeled = assign_labels(p.log);
        p.table = build_training_table(p.labeled, p.log).table;
        for (const auto& r : p.cfg.rules)
            for (const auto& c : r.conditions) p.planted.insert(c.feature);
        return p;
    }();
    return s;
}

// ---------------------------------------------------------------------------------

Outcome c1_pi_ewma() {
    // Values after n = 1..5 training days since returning from the r-th injury.
    const double table[4][5] = {{0.29, 0.49, 0.64, 0.74, 0.81},
                                {1.27, 1.48, 1.63, 1.74, 1.81},
                                {2.27, 2.46, 2.62, 2.72, 2.80},
                                {3.25, 3.46, 3.53, 3.66, 3.76}};
    // Earlier injuries are separated by 1..40 training days; keep the best-fitting history.
    const auto t0 = Clock::now();
    std::string detail;
    bool pass = true;
    for (int r = 1; r <= 4; ++r) {
        double best = INFINITY;
        std::vector<int> gaps(std::size_t(r - 1), 1);
        while (true) {
            std::vector<double> counts{0.0};
            for (int k = 0; k < r - 1; ++k) counts.insert(counts.end(), std::size_t(gaps[std::size_t(k)]), double(k + 1));
            counts.insert(counts.end(), 5, double(r));
            const auto v = pi_ewma(counts, 6);
            double err = 0.0;
            for (int d = 0; d < 5; ++d) err = std::max(err, std::abs(v[v.size() - 5 + std::size_t(d)] - table[r - 1][d]));
            best = std::min(best, err);
            std::size_t k = 0;
            while (k < gaps.size() && ++gaps[k] > 40) gaps[k++] = 1;
            if (k == gaps.size()) break;
        }
        pass = pass && best <= kPiTolerance;
        detail += "row " + std::to_string(r) + " max err " + fmt("%.4f", best) + "; ";
    }
    const double secs = seconds_since(t0);
    pass = pass && secs < kPiSecondsLimit;
    return {pass, detail + fmt("%.2fs", secs)};
}

Outcome c2_cost() {
    const Money salary = Money::units(83);
    const Money total = cost(139, salary), saved = cost(107, salary);
    const double ratio = double(saved.cents) / double(total.cents);
    const bool pass = total == Money::units(11583) && saved == Money::units(8881) && ratio >= kRatioLo && ratio <= kRatioHi;
    return {pass, "cost(139,83)=" + total.to_string() + " (expected 11583.00), cost(107,83)=" + saved.to_string() +
                      " (expected 8881.00), ratio " + fmt("%.4f", ratio)};
}

Outcome c3_metrics() {
    Rng rng(3);
    std::size_t bad = 0;
    auto ratio = [](std::size_t a, std::size_t b) { return a + b == 0 ? 0.0 : double(a) / double(a + b); };
    for (int k = 0; k < 1000; ++k) {
        ConfusionMatrix cm{rng.index(50), rng.index(50), rng.index(50), rng.index(50)};
        const auto m = metrics(cm);
        const double p1 = ratio(cm.tp, cm.fp), r1 = ratio(cm.tp, cm.fn), p0 = ratio(cm.tn, cm.fn), r0 = ratio(cm.tn, cm.fp);
        const double f1 = p1 + r1 == 0 ? 0 : 2 * p1 * r1 / (p1 + r1), f0 = p0 + r0 == 0 ? 0 : 2 * p0 * r0 / (p0 + r0);
        bad += !(m.cls[1].precision == p1 && m.cls[1].recall == r1 && m.cls[1].f1 == f1 && m.cls[0].precision == p0 &&
                 m.cls[0].recall == r0 && m.cls[0].f1 == f0);
    }
    double worst = 0.0;
    for (int k = 0; k < 200; ++k) {
        const std::size_t n = 2 + rng.index(60);
        std::vector<double> s(n);
        std::vector<std::uint8_t> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = k % 2 ? rng.uniform() : double(rng.index(5));
            y[i] = i < 2 ? std::uint8_t(i) : std::uint8_t(rng.bernoulli(0.3));
        }
        double wins = 0, pairs = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (y[i] && !y[j]) {
                    pairs += 1;
                    wins += s[i] > s[j] ? 1.0 : s[i] == s[j] ? 0.5 : 0.0;
                }
        worst = std::max(worst, std::abs(auc(s, y) - wins / pairs));
    }
    return {bad == 0 && worst <= kAucTolerance,
            std::to_string(bad) + "/1000 metric mismatches, max AUC deviation " + fmt("%.2e", worst)};
}

Outcome c4_baselines() {
    std::vector<TrainingTable> tables{planted_season().table};
    Rng rng(4);
    for (int k = 0; k < 5; ++k) {
        auto t = random_table(rng, 100 + rng.index(200), 3, 4, 0.1);
        TrainingTable with_pi({"x", "PI_EWMA"});
        for (std::size_t i = 0; i < t.rows(); ++i) with_pi.append(t.row(i).subspan(0, 2), t.label(i), {});
        tables.push_back(with_pi);
    }
    bool pass = true;
    std::string detail;
    for (const auto& t : tables) {
        const auto b2 = metrics(confusion(t.labels(), baseline_predict(BaselineKind::B2, t, 0).classes)).injury();
        const auto b3 = metrics(confusion(t.labels(), baseline_predict(BaselineKind::B3, t, 0).classes)).injury();
        const double prevalence = double(t.count_label(1)) / double(t.rows());
        pass = pass && b2.precision == 0 && b2.recall == 0 && b2.f1 == 0 && b3.recall == 1.0 && b3.precision == prevalence;
    }
    return {pass, std::to_string(tables.size()) + " tables checked"};
}

Outcome c5_split_oracle() {
    Rng rng(5);
    std::size_t bad = 0;
    auto wg = [](std::size_t a, std::size_t b) { return a + b == 0 ? 0.0 : double(a + b) * gini(a, b); };
    for (int k = 0; k < 100; ++k) {
        const std::size_t n = 2 + rng.index(19), p = 1 + rng.index(4);
        const auto t = random_table(rng, n, p, 1 + int(rng.index(6)), 0.4);
        const std::size_t c0 = t.count_label(0), c1 = t.count_label(1);
        double best = 0.0;
        for (std::size_t j = 0; j < p; ++j) {
            auto col = t.column(j);
            std::set<double> v(col.begin(), col.end());
            for (auto it = v.begin(); std::next(it) != v.end(); ++it) {
                const double thr = (*it + *std::next(it)) / 2;
                std::size_t l0 = 0, l1 = 0;
                for (std::size_t i = 0; i < n; ++i)
                    if (col[i] <= thr) (t.label(i) ? l1 : l0)++;
                best = std::max(best, wg(c0, c1) - wg(l0, l1) - wg(c0 - l0, c1 - l1));
            }
        }
        const auto m = fit_tree(t, {1, 1, 2});
        const auto& root = m.nodes()[0];
        double got = 0.0;
        if (!root.leaf) {
            const auto& l = m.nodes()[std::size_t(root.left)];
            const auto& r = m.nodes()[std::size_t(root.right)];
            got = wg(c0, c1) - wg(l.counts[0], l.counts[1]) - wg(r.counts[0], r.counts[1]);
        }
        bad += std::abs(got - best) > kGainTolerance || (best <= kGainTolerance) != root.leaf;
    }
    return {bad == 0, std::to_string(bad) + "/100 root splits below the exhaustive optimum"};
}

Outcome c6_adasyn() {
    std::size_t ratio_bad = 0, convex_bad = 0, synthetic = 0, nondet = 0;
    double lo = 1.0;
    for (std::uint64_t run = 0; run < 100; ++run) {
        Rng rng(600 + run);
        const std::size_t n_maj = 50 + rng.index(200), n_min = 2 + rng.index(20), p = 1 + rng.index(6);
        TrainingTable t(names(p));
        std::vector<double> x(p);
        for (std::size_t i = 0; i < n_maj + n_min; ++i) {
            for (auto& v : x) v = rng.normal(i < n_min ? 1.0 : 0.0, 1.0);
            t.append(x, i < n_min, {});
        }
        const ResamplingConfig cfg{5, 1.0, run, {}};
        const auto r = adasyn(t, cfg);
        const double ratio = double(r.table.count_label(1)) / double(r.table.count_label(0));
        lo = std::min(lo, ratio);
        ratio_bad += ratio < kBalanceLo || ratio > kBalanceHi;
        for (std::size_t i = t.rows(); i < r.table.rows(); ++i) {
            ++synthetic;
            const auto y = r.table.row(i);
            bool ok = false;
            for (std::size_t a : r.stats.minority_rows) {
                for (std::size_t b : r.stats.minority_rows) {
                    if (a == b) continue;
                    const auto xa = t.row(a), xb = t.row(b);
                    std::optional<double> lam;
                    bool seg = true;
                    for (std::size_t j = 0; j < p && seg; ++j) {
                        const double d = xb[j] - xa[j];
                        if (std::abs(d) < 1e-12) {
                            seg = std::abs(y[j] - xa[j]) < 1e-9;
                            continue;
                        }
                        const double l = (y[j] - xa[j]) / d;
                        seg = l >= -1e-9 && l <= 1 + 1e-9 && (!lam || std::abs(*lam - l) < 1e-7);
                        lam = l;
                    }
                    if (seg) {
                        ok = true;
                        break;
                    }
                }
                if (ok) break;
            }
            convex_bad += !ok;
        }
        const auto again = adasyn(t, cfg);
        nondet += !(again.table == r.table &&
                    std::equal(again.table.values().begin(), again.table.values().end(), r.table.values().begin(),
                               [](double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }));
    }
    return {ratio_bad == 0 && convex_bad == 0 && nondet == 0,
            "min ratio " + fmt("%.4f", lo) + ", " + std::to_string(convex_bad) + "/" + std::to_string(synthetic) +
                " synthetic points off-segment, " + std::to_string(nondet) + "/100 non-deterministic"};
}

Outcome c7_planted_recovery() {
    const auto t0 = Clock::now();
    const auto& s = planted_season();
    int perf = 0, recovered = 0;
    for (int i = 0; i < kTrials; ++i) {
        PipelineConfig cfg;
        cfg.seed = mix_seed(kTrialSeed, std::uint64_t(i));
        const auto r = run_pipeline(s.table, cfg);
        const auto& m = r.report.metrics.injury();
        perf += m.recall >= kRecallMin && m.precision >= kPrecisionMin;
        bool all = true;
        for (const auto& f : s.planted)
            all = all && std::find(r.selection.features.begin(), r.selection.features.end(), f) !=
                             r.selection.features.end();
        recovered += all;
    }
    const double minutes = seconds_since(t0) / 60.0;
    const double prevalence = double(s.table.count_label(1)) / double(s.table.rows());
    const bool pass = perf >= kTrialShare * kTrials && recovered >= kTrialShare * kTrials && minutes < kMinutesLimit;
    return {pass, "prevalence " + fmt("%.4f", prevalence) + ", recall/precision met in " + std::to_string(perf) + "/" +
                      std::to_string(kTrials) + ", planted features selected in " + std::to_string(recovered) + "/" +
                      std::to_string(kTrials) + ", " + fmt("%.2f min", minutes)};
}

Outcome c8_walk_forward() {
    const auto t0 = Clock::now();
    const auto& s = planted_season();
    SimulatorConfig cfg;
    cfg.pipeline.seed = kTrialSeed;
    const auto weeks = walk_forward(s.log, cfg);
    const auto full = s.table;

    // Date audit.
    std::size_t violations = 0;
    for (const auto& w : weeks) {
        violations += w.latest_train_date > w.train_end;
        violations += w.latest_visible_onset && *w.latest_visible_onset > w.train_end;
        for (const auto& io : w.injuries) violations += io.session_date <= w.train_end;
    }
    // Feature rows must not change when every later session and injury is removed.
    for (const auto& w : weeks) {
        if ((w.week - cfg.start_week) % 4 != 0) continue;
        SeasonLog head = s.log;
        for (auto& ss : head.sessions) std::erase_if(ss, [&](const TrainingSession& x) { return x.date > w.train_end; });
        std::erase_if(head.injuries, [&](const InjuryRecord& r) { return r.onset > w.train_end; });
        const auto partial = build_training_table(assign_labels(head), head).table;
        std::size_t j = 0;
        for (std::size_t i = 0; i < partial.rows(); ++i) {
            while (j < full.rows() && !(full.meta(j).player_id == partial.meta(i).player_id &&
                                        full.meta(j).date == partial.meta(i).date))
                ++j;
            if (j == full.rows()) {
                ++violations;
                break;
            }
            violations += !std::equal(partial.row(i).begin(), partial.row(i).end(), full.row(j).begin());
        }
    }
    const double f1 = weeks.back().cumulative_f1();
    const auto trace = feature_trace(weeks);
    const bool stable = trace.stabilization_week < weeks.back().week;
    const double minutes = seconds_since(t0) / 60.0;
    const bool pass = violations == 0 && f1 >= kWalkForwardF1Min && stable && minutes < kMinutesLimit;
    return {pass, std::to_string(violations) + " look-ahead violations, final cumulative F1 " + fmt("%.3f", f1) +
                      ", subset stabilizes at week " + std::to_string(trace.stabilization_week) + " of " +
                      std::to_string(weeks.back().week) + ", " + fmt("%.2f min", minutes)};
}

Outcome c9_rules() {
    Rng rng(9);
    std::size_t mismatches = 0, sum_bad = 0, full_cover = 0;
    for (int k = 0; k < 100; ++k) {
        auto t = random_table(rng, 40 + rng.index(120), 2, 10, 0.2 + 0.3 * rng.uniform());
        if (k % 3 == 0) {
            // Labels as a function of the cell: no conflicting duplicates, so a full tree covers every injury.
            std::vector<std::uint8_t> cell(100);
            for (auto& c : cell) c = rng.bernoulli(0.3);
            for (std::size_t i = 0; i < t.rows(); ++i) t.set_label(i, cell[std::size_t(t.at(i, 0) * 10 + t.at(i, 1))]);
        }
        const auto m = fit_tree(t, {k % 3 == 0 ? std::optional<int>{} : std::optional<int>(2 + int(rng.index(5))), 1, 2});
        const auto rules = rule_stats(extract_rules(m), t);
        for (int a = 0; a < 100; ++a)
            for (int b = 0; b < 100; ++b) {
                const double u = a / 10.0 - 0.5, v = b / 10.0 - 0.5;
                const std::map<std::string, double> x{{"x0", u}, {"x1", v}};
                bool any = false;
                for (const auto& r : rules) any = any || r.satisfied_by(x);
                mismatches += any != (m.predict(std::vector<double>{u, v}).cls == 1);
            }
        bool all_in_injury_leaves = true;
        for (std::size_t i = 0; i < t.rows(); ++i)
            if (t.label(i)) all_in_injury_leaves = all_in_injury_leaves && m.predict(t.row(i)).cls == 1;
        double sum = 0;
        for (const auto& r : rules) sum += r.frequency;
        if (all_in_injury_leaves) {
            ++full_cover;
            sum_bad += std::abs(sum - 1.0) > kFrequencySumTolerance;
        } else {
            sum_bad += sum > 1.0 + kFrequencySumTolerance;
        }
    }
    return {mismatches == 0 && sum_bad == 0 && full_cover > 0,
            std::to_string(mismatches) + " grid mismatches over 10^6 points, " + std::to_string(sum_bad) +
                " frequency-sum violations (" + std::to_string(full_cover) + " trees with full injury coverage)"};
}

Outcome c10_gradient() {
    Rng rng(10);
    double worst = 0.0;
    for (int d = 0; d < 3; ++d) {
        const std::size_t n = 50 + rng.index(150), p = 2 + rng.index(10);
        std::vector<double> x(n * p);
        std::vector<std::uint8_t> y(n);
        for (auto& v : x) v = rng.normal(0.0, 2.0);
        for (auto& v : y) v = rng.bernoulli(0.4);
        for (int k = 0; k < 10; ++k) {
            std::vector<double> th(p + 1), g(p + 1), fd(p + 1);
            for (auto& v : th) v = rng.normal();
            logit_gradient(x, y, p, th, 0.01, g);
            for (std::size_t j = 0; j <= p; ++j) {
                const double h = 1e-6 * std::max(1.0, std::abs(th[j]));
                auto a = th, b = th;
                a[j] += h;
                b[j] -= h;
                fd[j] = (logit_loss(x, y, p, a, 0.01) - logit_loss(x, y, p, b, 0.01)) / (2 * h);
            }
            double num = 0, den = 0;
            for (std::size_t j = 0; j <= p; ++j) {
                num += (fd[j] - g[j]) * (fd[j] - g[j]);
                den += g[j] * g[j];
            }
            worst = std::max(worst, std::sqrt(num) / std::max(std::sqrt(den), 1e-300));
        }
    }
    return {worst < kGradientRelError, "max relative error " + fmt("%.2e", worst)};
}

Outcome c11_cli_chain() {
    const fs::path root = fs::temp_directory_path() / ("injurycast_accept_" + std::to_string(::getpid()));
    auto chain = [&](const fs::path& dir) {
        fs::create_directories(dir);
        auto call = [](std::vector<std::string> args, const std::string& input = "") {
            std::istringstream in(input);
            std::ostringstream out, err;
            if (cli_main(args, in, out, err) != 0) throw std::runtime_error(err.str());
            return out.str();
        };
        const auto d = dir.string();
        call({"generate", "--seed", "7", "--out", d + "/season"});
        const std::vector<std::string> season{"--sessions", d + "/season/sessions.csv", "--injuries",
                                              d + "/season/injuries.csv", "--players", d + "/season/players.csv"};
        auto args = std::vector<std::string>{"featurize", "--out", d + "/table.csv"};
        args.insert(args.end(), season.begin(), season.end());
        call(args);
        call({"train", "--seed", "7", "--table", d + "/table.csv", "--out", d + "/model.json", "--report",
              d + "/report.json"});
        args = {"simulate", "--seed", "7", "--out", d + "/weekly.csv", "--log", d + "/weekly.json", "--cost",
                d + "/cost.json"};
        args.insert(args.end(), season.begin(), season.end());
        call(args);
    };
    auto slurp = [](const fs::path& p) {
        std::ifstream f(p, std::ios::binary);
        std::stringstream s;
        s << f.rdbuf();
        return s.str();
    };
    try {
        chain(root / "a");
        chain(root / "b");
    } catch (const std::exception& e) {
        fs::remove_all(root);
        return {false, std::string("chain failed: ") + e.what()};
    }
    std::size_t files = 0, differing = 0;
    for (const auto& e : fs::recursive_directory_iterator(root / "a")) {
        if (!e.is_regular_file()) continue;
        ++files;
        differing += slurp(e.path()) != slurp(root / "b" / fs::relative(e.path(), root / "a"));
    }
    fs::remove_all(root);
    return {files == 10 && differing == 0,
            std::to_string(differing) + " of " + std::to_string(files) + " artifacts differ between runs"};
}

struct Criterion {
    const char* name;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> all{
        {"pi_ewma fidelity", c1_pi_ewma},
        {"cost arithmetic", c2_cost},
        {"metric identities", c3_metrics},
        {"degenerate baselines", c4_baselines},
        {"split oracle", c5_split_oracle},
        {"adasyn properties", c6_adasyn},
        {"planted-mechanism recovery", c7_planted_recovery},
        {"walk-forward integrity", c8_walk_forward},
        {"rule consistency", c9_rules},
        {"gradient check", c10_gradient},
        {"cli reproducibility", c11_cli_chain},
    };
    std::vector<std::size_t> chosen;
    for (int i = 1; i < argc; ++i) chosen.push_back(std::size_t(std::stoi(argv[i])));
    if (chosen.empty())
        for (std::size_t i = 1; i <= all.size(); ++i) chosen.push_back(i);
    int failed = 0;
    for (std::size_t c : chosen) {
        if (c < 1 || c > all.size()) {
            std::fprintf(stderr, "unknown criterion %zu\n", c);
            return 2;
        }
        Outcome o;
        try {
            o = all[c - 1].run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("C%zu %s %s: %s\n", c, o.pass ? "PASS" : "FAIL", all[c - 1].name, o.detail.c_str());
        std::fflush(stdout);
        failed += !o.pass;
    }
    return failed ? 1 : 0;
}
