#pragma once
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "accum.hpp"
#include "corpus.hpp"
#include "entropy.hpp"
#include "errors.hpp"
#include "nsb.hpp"
#include "rng.hpp"

namespace lexdiv {

struct SamplePlan {
    std::uint64_t step = 2'500'000;  // Δl
    std::uint32_t replicates = 25;   // fragments per length
    std::uint64_t seed = 0;
    std::uint64_t l_min = 0;  // 0 → step
    std::uint64_t l_max = 0;  // 0 → corpus length
};

struct EstimatorChoice {
    bool nsb = false;  // plug-in is always computed; NSB dominates runtime
};

struct LengthSample {
    std::uint64_t l = 0;
    std::vector<double> h_plugin;
    std::vector<double> h_nsb;  // empty unless requested
    std::vector<std::uint64_t> vocab_sizes;
    std::vector<double> ttr_values;
};

struct SeriesRow {
    std::uint64_t l = 0;
    double mean_h_pi = 0, std_h_pi = 0;
    double mean_h_nsb = 0, std_h_nsb = 0;  // NaN when NSB was not computed
    double mean_v = 0, std_v = 0;
    double mean_ttr = 0, std_ttr = 0;
};

namespace detail {
// mean and sample standard deviation (n-1; zero for a single replicate)
template <typename T>
inline std::pair<double, double> mean_std(const std::vector<T>& v) {
    KahanSum<double> s;
    for (const auto& x : v) s += static_cast<double>(x);
    const double mean = s.value() / static_cast<double>(v.size());
    if (v.size() < 2) return {mean, 0.0};
    KahanSum<double> q;
    for (const auto& x : v) {
        const double d = static_cast<double>(x) - mean;
        q += d * d;
    }
    return {mean, std::sqrt(q.value() / static_cast<double>(v.size() - 1))};
}
}  // namespace detail

struct SampleSeries {
    std::vector<LengthSample> lengths;
    bool has_nsb = false;

    std::vector<SeriesRow> rows() const {
        std::vector<SeriesRow> out;
        out.reserve(lengths.size());
        for (const auto& ls : lengths) {
            SeriesRow r;
            r.l = ls.l;
            std::tie(r.mean_h_pi, r.std_h_pi) = detail::mean_std(ls.h_plugin);
            if (!ls.h_nsb.empty()) {
                std::tie(r.mean_h_nsb, r.std_h_nsb) = detail::mean_std(ls.h_nsb);
            } else {
                r.mean_h_nsb = r.std_h_nsb = std::numeric_limits<double>::quiet_NaN();
            }
            std::tie(r.mean_v, r.std_v) = detail::mean_std(ls.vocab_sizes);
            std::tie(r.mean_ttr, r.std_ttr) = detail::mean_std(ls.ttr_values);
            out.push_back(r);
        }
        return out;
    }
};

inline unsigned resolve_threads(unsigned requested) {
    if (requested) return requested;
    if (const char* env = std::getenv("LEXDIV_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return static_cast<unsigned>(v);
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc ? hc : 1;
}

// Fragment sampling protocol: for each length l, `replicates` contiguous
// fragments at uniformly random start offsets (overlaps allowed), per-fragment
// statistics on fragment-local counts. Replicate RNG streams are keyed by
// (seed, l, replicate), and results are slotted by (length, replicate) before
// a serial aggregation pass, so the series is bit-identical for any thread
// count.
inline SampleSeries sample_series(const TokenizedCorpus& corpus, const SamplePlan& plan,
                                  EstimatorChoice est = {}, unsigned n_threads = 0) {
    const std::uint64_t L = corpus.total_tokens;
    if (plan.step == 0) throw DomainError("sample_series: step must be >= 1");
    if (plan.replicates == 0) throw DomainError("sample_series: need at least one replicate");
    const std::uint64_t l_min = plan.l_min ? plan.l_min : plan.step;
    const std::uint64_t l_max = plan.l_max ? std::min(plan.l_max, L) : L;
    if (l_min > L) throw DomainError("sample_series: corpus shorter than l_min");
    if (l_min > l_max) throw DomainError("sample_series: l_min exceeds l_max");

    SampleSeries series;
    series.has_nsb = est.nsb;
    for (std::uint64_t l = l_min; l <= l_max; l += plan.step) {
        LengthSample ls;
        ls.l = l;
        ls.h_plugin.resize(plan.replicates);
        if (est.nsb) ls.h_nsb.resize(plan.replicates);
        ls.vocab_sizes.resize(plan.replicates);
        ls.ttr_values.resize(plan.replicates);
        series.lengths.push_back(std::move(ls));
    }

    const std::size_t reps = plan.replicates;
    const std::size_t n_tasks = series.lengths.size() * reps;
    std::atomic<std::size_t> next_task{0};

    auto worker = [&]() {
        std::vector<std::uint64_t> counts(corpus.vocab.size(), 0);
        std::vector<std::uint32_t> touched;
        std::vector<std::uint64_t> cvals;
        for (;;) {
            const std::size_t t = next_task.fetch_add(1);
            if (t >= n_tasks) break;
            LengthSample& ls = series.lengths[t / reps];
            const std::size_t rep = t % reps;
            const std::uint64_t l = ls.l;
            const CounterRng rng(plan.seed, l, rep);
            const std::uint64_t start = rng.bounded_at(0, L - l + 1);
            touched.clear();
            for (std::uint64_t i = start; i < start + l; ++i) {
                const std::uint32_t id = corpus.token_ids[i];
                if (counts[id]++ == 0) touched.push_back(id);
            }
            cvals.clear();
            for (const auto id : touched) {
                cvals.push_back(counts[id]);
                counts[id] = 0;
            }
            ls.h_plugin[rep] = plugin_entropy(cvals).value;
            if (est.nsb) ls.h_nsb[rep] = nsb_entropy(cvals, cvals.size()).value;
            ls.vocab_sizes[rep] = cvals.size();
            ls.ttr_values[rep] =
                static_cast<double>(cvals.size()) / static_cast<double>(l);
        }
    };

    const unsigned k = std::min<std::size_t>(resolve_threads(n_threads), n_tasks);
    if (k <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(k);
        for (unsigned i = 0; i < k; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return series;
}

struct FitRange {
    std::size_t lo_index = 0, hi_index = 0;  // inclusive
    std::uint64_t l_low = 0, l_high = 0;
    bool fallback = false;  // no length satisfied the band; central half used
};

// Fit-range selection: the maximal contiguous run of lengths whose σ(H_plugin)
// lies strictly inside (lo, hi); central half of the series when empty.
inline FitRange select_fit_range(const std::vector<SeriesRow>& rows, double lo = 0.0025,
                                 double hi = 0.025) {
    const std::size_t n = rows.size();
    if (n < 3) throw DomainError("select_fit_range: need at least 3 lengths");
    std::size_t best_lo = 0, best_len = 0;
    std::size_t run_lo = 0, run_len = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i].std_h_pi > lo && rows[i].std_h_pi < hi) {
            if (run_len == 0) run_lo = i;
            ++run_len;
            if (run_len > best_len) {
                best_len = run_len;
                best_lo = run_lo;
            }
        } else {
            run_len = 0;
        }
    }
    FitRange r;
    if (best_len == 0) {
        r.fallback = true;
        r.lo_index = n / 4;
        r.hi_index = r.lo_index + (n + 1) / 2 - 1;
    } else {
        r.lo_index = best_lo;
        r.hi_index = best_lo + best_len - 1;
    }
    r.l_low = rows[r.lo_index].l;
    r.l_high = rows[r.hi_index].l;
    return r;
}

inline FitRange select_fit_range(const SampleSeries& s, double lo = 0.0025, double hi = 0.025) {
    return select_fit_range(s.rows(), lo, hi);
}

// ---- series TSV persistence ----

inline constexpr const char* kSeriesHeader =
    "l\tmean_H_pi\tstd_H_pi\tmean_H_nsb\tstd_H_nsb\tmean_V\tstd_V\tmean_TTR\tstd_TTR";

inline void write_series_tsv(const std::vector<SeriesRow>& rows, const std::string& path) {
    AtomicFile f(path);
    f.stream() << kSeriesHeader << '\n';
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    for (const auto& r : rows) {
        f.stream() << r.l << '\t' << num(r.mean_h_pi) << '\t' << num(r.std_h_pi) << '\t'
                   << num(r.mean_h_nsb) << '\t' << num(r.std_h_nsb) << '\t' << num(r.mean_v)
                   << '\t' << num(r.std_v) << '\t' << num(r.mean_ttr) << '\t' << num(r.std_ttr)
                   << '\n';
    }
    f.commit();
}

inline void write_series_tsv(const SampleSeries& s, const std::string& path) {
    write_series_tsv(s.rows(), path);
}

inline std::vector<SeriesRow> read_series_tsv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line != kSeriesHeader)
        throw FormatError("bad series TSV header in " + path);
    std::vector<SeriesRow> rows;
    while (std::getline(in, line)) {
        SeriesRow r;
        char* p = line.data();
        char* end = nullptr;
        r.l = std::strtoull(p, &end, 10);
        double* fields[] = {&r.mean_h_pi, &r.std_h_pi, &r.mean_h_nsb, &r.std_h_nsb,
                            &r.mean_v,    &r.std_v,    &r.mean_ttr,   &r.std_ttr};
        for (double* f : fields) {
            if (*end != '\t') throw FormatError("malformed series row in " + path);
            p = end + 1;
            *f = std::strtod(p, &end);
        }
        if (*end != '\0') throw FormatError("trailing data in series row in " + path);
        if (!rows.empty() && rows.back().l >= r.l)
            throw FormatError("series lengths not increasing in " + path);
        rows.push_back(r);
    }
    return rows;
}

}  // namespace lexdiv
