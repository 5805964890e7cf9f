#include "injury/adasyn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "injury/error.hpp"
#include "injury/kernels.hpp"
#include "injury/random.hpp"

namespace injury {

void ResamplingConfig::validate() const {
    if (k_neighbors < 1) throw Error(ErrorKind::ConfigInvalid, "k_neighbors must be >= 1");
    if (!(balance_ratio > 0.0 && balance_ratio <= 1.0))
        throw Error(ErrorKind::ConfigInvalid, "balance_ratio must be in (0, 1]");
}

namespace {

std::vector<double> standardized(const TrainingTable& t) {
    const std::size_t n = t.rows(), p = t.cols();
    std::vector<double> mean(p, 0.0), sd(p, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) mean[j] += t.at(i, j);
    for (auto& m : mean) m /= double(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) sd[j] += (t.at(i, j) - mean[j]) * (t.at(i, j) - mean[j]);
    for (auto& s : sd) {
        s = std::sqrt(s / double(n));
        if (!(s > 1e-12)) s = 1.0;
    }
    std::vector<double> z(n * p);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) z[i * p + j] = (t.at(i, j) - mean[j]) / sd[j];
    return z;
}

/// k nearest of `candidates` to `query` (excluding the query itself); ties by index.
std::vector<std::size_t> nearest(const std::vector<double>& z, std::size_t p, std::size_t query,
                                 const std::vector<std::size_t>& candidates, std::size_t k) {
    std::vector<std::pair<double, std::size_t>> d;
    d.reserve(candidates.size());
    const std::span<const double> q(z.data() + query * p, p);
    for (std::size_t c : candidates) {
        if (c == query) continue;
        d.emplace_back(kernels::squared_distance(q, std::span<const double>(z.data() + c * p, p)), c);
    }
    k = std::min(k, d.size());
    std::partial_sort(d.begin(), d.begin() + std::ptrdiff_t(k), d.end());
    std::vector<std::size_t> out(k);
    for (std::size_t i = 0; i < k; ++i) out[i] = d[i].second;
    return out;
}

/// Integer allocation of `total` proportional to `weights` (largest remainder, ties by index).
std::vector<std::size_t> apportion(const std::vector<double>& weights, std::size_t total) {
    const std::size_t m = weights.size();
    std::vector<std::size_t> out(m);
    std::vector<std::pair<double, std::size_t>> rem(m);
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const double exact = weights[i] * double(total);
        out[i] = std::size_t(std::floor(exact));
        assigned += out[i];
        rem[i] = {exact - std::floor(exact), i};
    }
    std::stable_sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t r = 0; assigned < total && r < m; ++r, ++assigned) ++out[rem[r].second];
    return out;
}

}  // namespace

Resampled adasyn(const TrainingTable& table, const ResamplingConfig& cfg) {
    cfg.validate();
    Resampled out{table, {}};
    auto& st = out.stats;
    std::vector<std::size_t> minority, all(table.rows());
    std::iota(all.begin(), all.end(), 0);
    for (std::size_t i = 0; i < table.rows(); ++i)
        if (table.label(i) == 1) minority.push_back(i);
    st.n_minority = minority.size();
    st.n_majority = table.rows() - minority.size();
    st.minority_rows = minority;
    if (st.n_minority < 2)
        throw Error(ErrorKind::TooFewMinority,
                    "adasyn needs at least 2 minority rows, found " + std::to_string(st.n_minority));
    if (st.n_majority < 1) throw Error(ErrorKind::InvalidArgument, "adasyn needs at least 1 majority row");
    for (double v : table.values())
        if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "adasyn input contains non-finite values");

    const double gap = cfg.balance_ratio * (double(st.n_majority) - double(st.n_minority));
    const std::size_t to_generate = gap > 0.0 ? std::size_t(std::llround(gap)) : 0;
    st.majority_ratio.assign(minority.size(), 0.0);
    st.allocation.assign(minority.size(), 0);
    if (to_generate == 0) return out;

    const std::size_t p = table.cols();
    const auto z = standardized(table);
    const std::size_t k_all = std::size_t(cfg.k_neighbors);
    for (std::size_t m = 0; m < minority.size(); ++m) {
        const auto nn = nearest(z, p, minority[m], all, k_all);
        std::size_t maj = 0;
        for (std::size_t c : nn) maj += table.label(c) == 0;
        st.majority_ratio[m] = double(maj) / double(nn.size());
    }
    const double total = std::accumulate(st.majority_ratio.begin(), st.majority_ratio.end(), 0.0);
    std::vector<double> weights(minority.size(), 1.0 / double(minority.size()));
    if (total > 0.0)
        for (std::size_t m = 0; m < minority.size(); ++m) weights[m] = st.majority_ratio[m] / total;
    st.allocation = apportion(weights, to_generate);

    const std::size_t k_min = std::min<std::size_t>(k_all, minority.size() - 1);
    std::vector<std::vector<std::size_t>> partners(minority.size());
    st.degenerate = true;
    for (std::size_t m = 0; m < minority.size(); ++m) {
        partners[m] = nearest(z, p, minority[m], minority, k_min);
        for (std::size_t c : partners[m])
            if (kernels::squared_distance(table.row(minority[m]), table.row(c)) > 0.0) st.degenerate = false;
    }

    std::vector<std::size_t> rounded;
    for (const auto& name : cfg.rounded_columns)
        if (auto j = table.column_index(name)) rounded.push_back(*j);

    Rng rng(cfg.seed);
    std::vector<double> x(p);
    out.table.reserve(table.rows() + to_generate);
    for (std::size_t m = 0; m < minority.size(); ++m) {
        const auto xi = table.row(minority[m]);
        for (std::size_t g = 0; g < st.allocation[m]; ++g) {
            const std::size_t zi = partners[m][rng.index(partners[m].size())];
            const auto xz = table.row(zi);
            const double lambda = rng.uniform();
            for (std::size_t j = 0; j < p; ++j) x[j] = xi[j] + lambda * (xz[j] - xi[j]);
            for (std::size_t j : rounded) {
                const double lo = std::min(xi[j], xz[j]), hi = std::max(xi[j], xz[j]);
                const double clo = std::ceil(lo), chi = std::floor(hi);
                x[j] = clo <= chi ? std::clamp(std::round(x[j]), clo, chi) : std::round(x[j]);
            }
            RowMeta meta = table.meta(minority[m]);
            meta.synthetic = true;
            meta.injury_index.reset();
            out.table.append(x, 1, std::move(meta));
        }
    }
    st.generated = to_generate;
    return out;
}

}  // namespace injury
