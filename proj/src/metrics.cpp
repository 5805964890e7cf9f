#include "injury/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "injury/error.hpp"

namespace injury {

void ConfusionMatrix::add(std::uint8_t truth, std::uint8_t predicted) {
    if (truth)
        (predicted ? tp : fn)++;
    else
        (predicted ? fp : tn)++;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& o) {
    tp += o.tp;
    fp += o.fp;
    tn += o.tn;
    fn += o.fn;
    return *this;
}

ConfusionMatrix confusion(std::span<const std::uint8_t> truth, std::span<const std::uint8_t> predicted) {
    if (truth.size() != predicted.size())
        throw Error(ErrorKind::InvalidArgument, "truth and prediction lengths differ");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < truth.size(); ++i) cm.add(truth[i], predicted[i]);
    return cm;
}

namespace {
double ratio(std::size_t a, std::size_t b) { return b == 0 ? 0.0 : double(a) / double(b); }
}  // namespace

double f1_score(double precision, double recall) {
    return precision + recall == 0.0 ? 0.0 : 2.0 * precision * recall / (precision + recall);
}

Metrics metrics(const ConfusionMatrix& cm) {
    Metrics m;
    m.cls[1].precision = ratio(cm.tp, cm.tp + cm.fp);
    m.cls[1].recall = ratio(cm.tp, cm.tp + cm.fn);
    m.cls[0].precision = ratio(cm.tn, cm.tn + cm.fn);
    m.cls[0].recall = ratio(cm.tn, cm.tn + cm.fp);
    for (auto& c : m.cls) c.f1 = f1_score(c.precision, c.recall);
    return m;
}

double auc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
    if (scores.size() != labels.size()) throw Error(ErrorKind::InvalidArgument, "scores and labels differ in length");
    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t(0));
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    // midranks, 1-based, doubled to stay integral
    double rank_sum_pos = 0.0;
    std::size_t npos = 0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        const double midrank = double(i + 1 + j) / 2.0;
        for (std::size_t k = i; k < j; ++k)
            if (labels[order[k]]) {
                rank_sum_pos += midrank;
                ++npos;
            }
        i = j;
    }
    const std::size_t nneg = n - npos;
    if (npos == 0 || nneg == 0) throw Error(ErrorKind::OneClassOnly, "AUC needs both classes");
    const double u = rank_sum_pos - double(npos) * double(npos + 1) / 2.0;
    return u / (double(npos) * double(nneg));
}

EvalReport make_report(std::span<const std::uint8_t> truth, std::span<const std::uint8_t> classes,
                       std::span<const double> scores) {
    EvalReport r;
    r.confusion = confusion(truth, classes);
    r.metrics = metrics(r.confusion);
    const auto pos = std::count(truth.begin(), truth.end(), std::uint8_t(1));
    if (pos > 0 && std::size_t(pos) < truth.size()) r.auc = auc(scores, truth);
    r.test_rows = truth.size();
    return r;
}

namespace {
nlohmann::json class_json(const ClassMetrics& c) {
    return {{"precision", c.precision}, {"recall", c.recall}, {"f1", c.f1}};
}
}  // namespace

nlohmann::json to_json(const EvalReport& r) {
    return {{"confusion", {{"tp", r.confusion.tp}, {"fp", r.confusion.fp}, {"tn", r.confusion.tn}, {"fn", r.confusion.fn}}},
            {"class_0", class_json(r.metrics.cls[0])},
            {"class_1", class_json(r.metrics.cls[1])},
            {"auc", r.auc ? nlohmann::json(*r.auc) : nlohmann::json(nullptr)},
            {"seed", r.seed},
            {"train_rows", r.train_rows},
            {"test_rows", r.test_rows},
            {"selected_features", r.selected_features},
            {"hyperparams", r.hyperparams}};
}

void TrialDistribution::add(const EvalReport& r) {
    for (int c = 0; c < 2; ++c) {
        const auto s = std::to_string(c);
        values["prec_" + s].push_back(r.metrics.cls[c].precision);
        values["rec_" + s].push_back(r.metrics.cls[c].recall);
        values["f1_" + s].push_back(r.metrics.cls[c].f1);
    }
    if (r.auc) values["auc"].push_back(*r.auc);
    ++trials;
}

double TrialDistribution::mean(const std::string& key) const {
    auto it = values.find(key);
    if (it == values.end() || it->second.empty()) return 0.0;
    return std::accumulate(it->second.begin(), it->second.end(), 0.0) / double(it->second.size());
}

double TrialDistribution::sd(const std::string& key) const {
    auto it = values.find(key);
    if (it == values.end() || it->second.size() < 2) return 0.0;
    const double m = mean(key);
    double s = 0.0;
    for (double v : it->second) s += (v - m) * (v - m);
    return std::sqrt(s / double(it->second.size() - 1));
}

nlohmann::json to_json(const TrialDistribution& d) {
    nlohmann::json j{{"trials", d.trials}};
    for (const auto& [k, v] : d.values) j["metrics"][k] = {{"mean", d.mean(k)}, {"sd", d.sd(k)}, {"values", v}};
    return j;
}

}  // namespace injury
