#include "injury/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "injury/baselines.hpp"
#include "injury/csv.hpp"
#include "injury/error.hpp"
#include "injury/random.hpp"
#include "injury/splitting.hpp"

namespace injury {

void PipelineConfig::validate() const {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw Error(ErrorKind::ConfigInvalid, "train_fraction must be in (0, 1)");
    if (folds < 2) throw Error(ErrorKind::ConfigInvalid, "folds must be >= 2");
    if (grid.empty()) throw Error(ErrorKind::ConfigInvalid, "grid must not be empty");
    for (const auto& hp : grid) hp.validate();
    selection_hp.validate();
    ResamplingConfig{k_neighbors, balance_ratio, 0, {}}.validate();
    forest.validate();
    logit.validate();
}

PipelineConfig pipeline_config_from_json(const nlohmann::json& j) {
    PipelineConfig c;
    try {
        c.feature_selection = j.value("feature_selection", c.feature_selection);
        c.oversample = j.value("oversample", c.oversample);
        c.reselect_per_fold = j.value("reselect_per_fold", c.reselect_per_fold);
        c.train_fraction = j.value("train_fraction", c.train_fraction);
        c.folds = j.value("folds", c.folds);
        c.k_neighbors = j.value("k_neighbors", c.k_neighbors);
        c.balance_ratio = j.value("balance_ratio", c.balance_ratio);
        c.comparators = j.value("comparators", c.comparators);
        if (j.contains("grid")) {
            c.grid.clear();
            for (const auto& g : j["grid"]) c.grid.push_back(tree_hyper_params_from_json(g));
        }
        if (j.contains("selection_hp")) c.selection_hp = tree_hyper_params_from_json(j["selection_hp"]);
        if (j.contains("forest")) {
            const auto& f = j["forest"];
            c.forest.n_trees = f.value("n_trees", c.forest.n_trees);
            c.forest.bootstrap = f.value("bootstrap", c.forest.bootstrap);
            c.forest.max_features = f.value("max_features", c.forest.max_features);
            if (f.contains("tree")) c.forest.tree = tree_hyper_params_from_json(f["tree"]);
        }
        if (j.contains("logit")) {
            const auto& l = j["logit"];
            c.logit.l2 = l.value("l2", c.logit.l2);
            c.logit.max_iter = l.value("max_iter", c.logit.max_iter);
            c.logit.tol = l.value("tol", c.logit.tol);
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::ConfigInvalid, std::string("pipeline config: ") + e.what());
    }
    c.validate();
    return c;
}

namespace {

TrainingTable maybe_oversample(const TrainingTable& t, const PipelineConfig& cfg, std::uint64_t seed) {
    if (!cfg.oversample || t.count_label(1) < 2 || t.count_label(0) == 0) return t;
    return adasyn(t, {cfg.k_neighbors, cfg.balance_ratio, seed, {std::string(kRoleName)}}).table;
}

struct Selection {
    FeatureSubset subset;
    TreeHyperParams hp;
};

Selection select_and_tune(const TrainingTable& t, const PipelineConfig& cfg, std::uint64_t seed) {
    Selection s;
    if (cfg.feature_selection)
        s.subset = rfecv(t, cfg.selection_hp, cfg.folds, mix_seed(seed, 2));
    else
        s.subset.features = t.feature_names();
    s.hp = tune(t.select_columns(s.subset.features), cfg.grid, cfg.folds, mix_seed(seed, 3));
    return s;
}

struct Pool {
    std::vector<std::uint8_t> truth, classes;
    std::vector<double> scores;

    void add(const TrainingTable& eval, const Predictions& p) {
        truth.insert(truth.end(), eval.labels().begin(), eval.labels().end());
        classes.insert(classes.end(), p.classes.begin(), p.classes.end());
        scores.insert(scores.end(), p.scores.begin(), p.scores.end());
    }
    EvalReport report() const { return make_report(truth, classes, scores); }
};

}  // namespace

PipelineResult run_pipeline(const TrainingTable& table, const PipelineConfig& cfg, const TrainingTable* aux) {
    cfg.validate();
    if (aux && aux->rows() != table.rows())
        throw Error(ErrorKind::InvalidArgument, "auxiliary table is not row-aligned");
    const std::uint64_t seed = cfg.seed;

    // step 1
    const auto split = stratified_split_indices(table.labels(), cfg.train_fraction, mix_seed(seed, 0));
    const auto tuning = maybe_oversample(table.subset(split.a), cfg, mix_seed(seed, 1));

    // step 2
    PipelineResult res;
    auto sel = select_and_tune(tuning, cfg, seed);
    res.selection = sel.subset;
    res.hp = sel.hp;
    res.model = fit_tree(tuning.select_columns(sel.subset.features), sel.hp);

    // step 3
    const auto test = table.subset(split.b);
    std::optional<TrainingTable> test_full;
    if (cfg.comparators && aux) test_full = hconcat(test, aux->subset(split.b));
    const auto folds = stratified_folds(test.labels(), 2, mix_seed(seed, 4));
    std::map<std::string, Pool> pools;
    for (std::size_t f = 0; f < 2; ++f) {
        const auto& fit_rows = folds[f];
        const auto& eval_rows = folds[1 - f];
        const auto fit_raw = test.subset(fit_rows);
        const auto eval = test.subset(eval_rows);
        for (std::size_t i = 0; i < eval.rows(); ++i)
            if (eval.meta(i).synthetic) throw Error(ErrorKind::InvalidArgument, "synthetic row in evaluation fold");
        const auto fit = maybe_oversample(fit_raw, cfg, mix_seed(seed, 10 + f));
        if (cfg.reselect_per_fold) sel = select_and_tune(fit, cfg, mix_seed(seed, 40 + f));
        const auto fit_sel = fit.select_columns(sel.subset.features);
        pools["DT"].add(eval, fit_tree(fit_sel, sel.hp).predict_table(eval));

        if (!cfg.comparators) continue;
        pools["RF"].add(eval, fit_forest(fit_sel, cfg.forest, mix_seed(seed, 20 + f)).predict_table(eval));
        pools["LR"].add(eval, fit_logit(fit_sel, cfg.logit).predict_table(eval));
        for (auto k : {BaselineKind::B1, BaselineKind::B2, BaselineKind::B3, BaselineKind::B4})
            pools[std::string(to_string(k))].add(
                eval, baseline_predict(fit_baseline(k, fit_raw), eval, mix_seed(seed, 30 + f)));
        const TrainingTable& mono_fit = test_full ? test_full->subset(fit_rows) : fit_raw;
        const TrainingTable& mono_eval = test_full ? test_full->subset(eval_rows) : eval;
        std::vector<MonoMethod> methods{MonoMethod::MswrQuintile};
        if (test_full) methods.insert(methods.begin(), MonoMethod::AcwrMurray);
        for (auto m : methods) {
            const auto fm = fit_mono(mono_fit, m);
            for (auto c : {Combine::Vote, Combine::All, Combine::One})
                pools["C_" + std::string(to_string(c)) + "(" + std::string(to_string(m)) + ")"].add(
                    mono_eval, mono_predict(fm, mono_eval, c));
        }
    }
    res.report = pools["DT"].report();
    res.report.seed = seed;
    res.report.train_rows = split.a.size();
    res.report.test_rows = split.b.size();
    res.report.selected_features = res.selection.features;
    res.report.hyperparams = to_json(res.hp);
    for (const auto& [name, pool] : pools)
        if (name != "DT") res.comparators[name] = pool.report();
    return res;
}

TrialSummary repeat_trials(const TrainingTable& table, const PipelineConfig& cfg, int n, std::uint64_t base_seed,
                           const TrainingTable* aux) {
    if (n < 1) throw Error(ErrorKind::InvalidArgument, "trial count must be >= 1");
    TrialSummary s;
    for (int i = 0; i < n; ++i) {
        auto c = cfg;
        c.seed = mix_seed(base_seed, std::uint64_t(i));
        const auto r = run_pipeline(table, c, aux);
        s.forecasters["DT"].add(r.report);
        for (const auto& [name, rep] : r.comparators) s.forecasters[name].add(rep);
        s.selected.push_back(r.selection.features);
    }
    return s;
}

nlohmann::json to_json(const PipelineResult& r) {
    nlohmann::json comps = nlohmann::json::object();
    for (const auto& [name, rep] : r.comparators) comps[name] = to_json(rep);
    return {{"report", to_json(r.report)},
            {"selection", to_json(r.selection)},
            {"hyperparams", to_json(r.hp)},
            {"comparators", std::move(comps)}};
}

nlohmann::json to_json(const TrialSummary& s) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [name, d] : s.forecasters) j["forecasters"][name] = to_json(d);
    j["selected"] = s.selected;
    return j;
}

std::vector<std::string> forecaster_order(const TrialSummary& s) {
    static const std::vector<std::string> preferred = {
        "DT", "RF", "LR", "B1", "B2", "B3", "B4",
        "C_vote(ACWR)", "C_all(ACWR)", "C_one(ACWR)", "C_vote(MSWR)", "C_all(MSWR)", "C_one(MSWR)"};
    std::vector<std::string> out;
    for (const auto& p : preferred)
        if (s.forecasters.count(p)) out.push_back(p);
    for (const auto& [name, d] : s.forecasters)
        if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
    return out;
}

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string pm(const TrialDistribution& d, const std::string& key) {
    if (!d.values.count(key)) return "-";
    return d.trials > 1 ? fmt(d.mean(key)) + "±" + fmt(d.sd(key)) : fmt(d.mean(key));
}

}  // namespace

void write_comparison_csv(std::ostream& out, const TrialSummary& s) {
    out << "forecaster,class,precision_mean,precision_sd,recall_mean,recall_sd,f1_mean,f1_sd,auc_mean,auc_sd\n";
    for (const auto& name : forecaster_order(s)) {
        const auto& d = s.forecasters.at(name);
        for (int c = 0; c < 2; ++c) {
            const auto k = std::to_string(c);
            out << name << ',' << (c ? "I" : "NI");
            for (const auto& key : {"prec_" + k, "rec_" + k, "f1_" + k, std::string("auc")})
                out << ',' << csv::format_double(d.mean(key)) << ',' << csv::format_double(d.sd(key));
            out << '\n';
        }
    }
}

void write_comparison_text(std::ostream& out, const TrialSummary& s) {
    std::vector<std::vector<std::string>> rows{{"forecaster", "class", "prec", "rec", "F1", "AUC"}};
    for (const auto& name : forecaster_order(s)) {
        const auto& d = s.forecasters.at(name);
        for (int c = 0; c < 2; ++c) {
            const auto k = std::to_string(c);
            rows.push_back({c ? "" : name, c ? "I" : "NI", pm(d, "prec_" + k), pm(d, "rec_" + k), pm(d, "f1_" + k),
                            c ? "" : pm(d, "auc")});
        }
    }
    std::vector<std::size_t> width(rows[0].size(), 0);
    for (const auto& r : rows)
        for (std::size_t c = 0; c < r.size(); ++c) {
            // count code points so the plus-minus sign pads like one column
            std::size_t len = 0;
            for (unsigned char ch : r[c]) len += (ch & 0xC0) != 0x80;
            width[c] = std::max(width[c], len);
        }
    for (const auto& r : rows) {
        for (std::size_t c = 0; c < r.size(); ++c) {
            std::size_t len = 0;
            for (unsigned char ch : r[c]) len += (ch & 0xC0) != 0x80;
            out << r[c] << std::string(width[c] - len + (c + 1 < r.size() ? 2 : 0), ' ');
        }
        out << '\n';
    }
}

}  // namespace injury
