#pragma once

// Cross-study evidence combination: surprisals (in nats) for a shared
// hypothesis from K independent studies are summed, the sum is doubled and
// referred to a chi-square distribution with 2K degrees of freedom.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <random>
#include <string>
#include <vector>

#include "surprisal/compat_engine.hpp"
#include "surprisal/errors.hpp"
#include "surprisal/special_functions.hpp"

namespace surprisal {

struct CombinationInput {
    std::vector<Probability> p_values;
    // Independence across studies is the caller's responsibility; the flag is
    // carried into every report so the assumption is on the record.
    bool independence_asserted = false;
    // Caller-declared sidedness of the input p values ("two-sided"/"one-sided");
    // recorded verbatim, never inferred.
    std::string sidedness = "two-sided";
};

struct CombinedEvidence {
    std::size_t k = 0;
    double sum_s_nats = 0.0;
    double statistic = 0.0;  // 2 * sum of -ln(p_i)
    int df = 0;              // 2K
    double combined_p = 1.0;
    double combined_s_bits = 0.0;
    bool combined_saturated = false;
    bool independence_asserted = false;
    std::string sidedness;
};

inline CombinedEvidence combine(const CombinationInput& input) {
    if (input.p_values.empty())
        throw input_error("combination requires at least one p value");
    CombinedEvidence ev;
    ev.k = input.p_values.size();
    ev.df = static_cast<int>(2 * ev.k);
    ev.independence_asserted = input.independence_asserted;
    ev.sidedness = input.sidedness;
    for (const auto& p : input.p_values)
        ev.sum_s_nats += s_value(p, LogBase::nats);  // throws saturation_error at p = 0
    ev.statistic = 2.0 * ev.sum_s_nats;
    if (ev.k == 1) {
        // Degenerate case: the chi-square(2) reference inverts the transform
        // exactly, so return the input p itself rather than exp(ln p).
        ev.combined_p = input.p_values.front().value();
    } else {
        ev.combined_p = chi2_survival_even_df(ev.statistic, ev.df).value();
    }
    auto clamped = clamp_probability(ev.combined_p);
    ev.combined_p = clamped.p.value();
    ev.combined_saturated = clamped.saturated;
    ev.combined_s_bits = s_value(clamped.p, LogBase::bits);
    return ev;
}

// ---------------------------------------------------------------------------
// Null calibration: K uniform p values per simulation, checking that the
// summed surprisal has mean K and the combined p stays uniform.
// ---------------------------------------------------------------------------

struct CalibrationReport {
    int k = 0;
    std::size_t n_sims = 0;
    std::uint64_t seed = 0;
    const char* generator = "mt19937_64";
    double mean_sum_s_nats = 0.0;
    double ks_distance = 0.0;       // combined_p against uniform
    double ks_critical_1pct = 0.0;  // asymptotic 1% critical value for n_sims
    bool uniform_at_1pct = false;
};

// Kolmogorov-Smirnov distance of a sample from U(0,1).
inline double ks_uniform_distance(std::vector<double> values) {
    if (values.empty()) throw input_error("KS distance needs at least one value");
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    double d = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double above = (static_cast<double>(i) + 1.0) / n - values[i];
        const double below = values[i] - static_cast<double>(i) / n;
        d = std::max(d, std::max(above, below));
    }
    return d;
}

// Asymptotic critical value sqrt(-ln(alpha/2)/2) / sqrt(n).
inline double ks_critical_value(double alpha, std::size_t n) {
    if (!(alpha > 0.0 && alpha < 1.0) || n == 0)
        throw input_error("KS critical value requires 0 < alpha < 1 and n > 0");
    return std::sqrt(-0.5 * std::log(0.5 * alpha)) / std::sqrt(static_cast<double>(n));
}

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Uniform in (0,1) from the top 53 bits of mt19937_64 output. The engine's
// sequence is pinned by the standard (unlike the distribution adaptors), so
// calibration artifacts reproduce across standard libraries.
class UniformSource {
public:
    explicit UniformSource(std::uint64_t seed) : rng_(seed) {}

    double next() {
        return (static_cast<double>(rng_() >> 11) + 0.5) * 0x1.0p-53;
    }

private:
    std::mt19937_64 rng_;
};

struct CalibrationChunk {
    double sum_of_sums = 0.0;
    std::vector<double> combined_ps;
};

inline CalibrationChunk run_calibration_chunk(int k, std::size_t count, std::uint64_t seed) {
    CalibrationChunk chunk;
    chunk.combined_ps.reserve(count);
    UniformSource rng(seed);
    for (std::size_t i = 0; i < count; ++i) {
        double sum_nats = 0.0;
        for (int j = 0; j < k; ++j) sum_nats += -std::log(rng.next());
        chunk.sum_of_sums += sum_nats;
        chunk.combined_ps.push_back(chi2_survival_even_df(2.0 * sum_nats, 2 * k).value());
    }
    return chunk;
}

}  // namespace detail

// Simulations are partitioned into fixed chunks with per-chunk derived seeds
// and reduced in chunk order, so the report is identical for any worker count.
inline CalibrationReport null_calibration(int k, std::size_t n_sims, std::uint64_t seed) {
    if (k < 1) throw input_error("calibration requires K >= 1");
    if (n_sims < 1000) throw input_error("calibration requires at least 1000 simulations");

    constexpr std::size_t n_chunks = 64;
    const std::size_t per_chunk = n_sims / n_chunks;
    const std::size_t remainder = n_sims % n_chunks;

    std::vector<std::future<detail::CalibrationChunk>> futures;
    futures.reserve(n_chunks);
    for (std::size_t c = 0; c < n_chunks; ++c) {
        const std::size_t count = per_chunk + (c < remainder ? 1 : 0);
        const std::uint64_t chunk_seed = detail::splitmix64(seed ^ (0xc2b2ae3d27d4eb4fULL * (c + 1)));
        futures.push_back(std::async(std::launch::async | std::launch::deferred,
                                     detail::run_calibration_chunk, k, count, chunk_seed));
    }

    double total = 0.0;
    std::vector<double> combined_ps;
    combined_ps.reserve(n_sims);
    for (auto& f : futures) {
        auto chunk = f.get();
        total += chunk.sum_of_sums;
        combined_ps.insert(combined_ps.end(), chunk.combined_ps.begin(), chunk.combined_ps.end());
    }

    CalibrationReport report;
    report.k = k;
    report.n_sims = n_sims;
    report.seed = seed;
    report.mean_sum_s_nats = total / static_cast<double>(n_sims);
    report.ks_distance = ks_uniform_distance(std::move(combined_ps));
    report.ks_critical_1pct = ks_critical_value(0.01, n_sims);
    report.uniform_at_1pct = report.ks_distance < report.ks_critical_1pct;
    return report;
}

}  // namespace surprisal
