#pragma once

// Seeded synthetic sequence databases for benchmarks and scaling checks.
//
// Generator: item ranks are drawn from a truncated Zipf law P(r) ~ 1/r^s over
// `alphabet` items (tokens i00, i01, ...); the number of transactions per
// sequence and items per transaction are geometric with the configured means
// (items capped at the alphabet size); successive timestamps advance by
// 1 + Geometric(mean_time_step - 1). Only raw std::mt19937_64 output is used,
// so a seed reproduces the same database on every platform.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "core.hpp"

namespace seqmine::synthetic {

struct GeneratorConfig {
    std::size_t sequences = 100;
    std::size_t alphabet = 20;
    double zipf_exponent = 1.0;
    double mean_transactions = 4.0;
    double mean_items = 2.0;
    double mean_time_step = 2.0;
    std::uint64_t seed = 42;
};

class Generator {
  public:
    explicit Generator(const GeneratorConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {
        double total = 0;
        for (std::size_t r = 1; r <= cfg_.alphabet; ++r) {
            total += 1.0 / std::pow(static_cast<double>(r), cfg_.zipf_exponent);
            cdf_.push_back(total);
        }
        for (auto& v : cdf_) v /= total;
        for (std::size_t i = 0; i < cfg_.alphabet; ++i) {
            char buf[16];
            std::snprintf(buf, sizeof buf, "i%02zu", i);
            alphabet_.intern(buf);
        }
    }

    DataSequence next_sequence() {
        const std::size_t n_txn = geometric(cfg_.mean_transactions);
        std::vector<Transaction> txns;
        Time t = 0;
        for (std::size_t k = 0; k < n_txn; ++k) {
            t += static_cast<Time>(geometric(cfg_.mean_time_step));
            const std::size_t n_items = std::min(geometric(cfg_.mean_items), cfg_.alphabet);
            std::vector<ItemId> items;
            while (items.size() < n_items) {
                const ItemId i = zipf();
                if (std::find(items.begin(), items.end(), i) == items.end()) items.push_back(i);
            }
            txns.push_back({t, Itemset(std::move(items))});
        }
        return DataSequence("s" + std::to_string(produced_++), std::move(txns));
    }

    SequenceDatabase database() {
        std::vector<DataSequence> seqs;
        seqs.reserve(cfg_.sequences);
        for (std::size_t i = 0; i < cfg_.sequences; ++i) seqs.push_back(next_sequence());
        return SequenceDatabase(std::move(seqs), alphabet_);
    }

    const Alphabet& alphabet() const noexcept { return alphabet_; }

  private:
    double uniform() { return (static_cast<double>(rng_() >> 11) + 0.5) * 0x1.0p-53; }

    std::size_t geometric(double mean) {
        if (mean <= 1.0) return 1;
        const double p = 1.0 / mean;
        return 1 + static_cast<std::size_t>(std::floor(std::log(uniform()) / std::log1p(-p)));
    }

    ItemId zipf() {
        const double u = uniform();
        auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
        return static_cast<ItemId>(std::min<std::ptrdiff_t>(it - cdf_.begin(), cdf_.size() - 1));
    }

    GeneratorConfig cfg_;
    std::mt19937_64 rng_;
    std::vector<double> cdf_;
    Alphabet alphabet_;
    std::size_t produced_ = 0;
};

inline SequenceDatabase generate(const GeneratorConfig& cfg) { return Generator(cfg).database(); }

struct LineFit {
    double slope = 0;
    double intercept = 0;
    double r_squared = 0;
};

/// Ordinary least squares y = slope * x + intercept.
inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    const auto n = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LineFit f;
    f.slope = sxx > 0 ? sxy / sxx : 0;
    f.intercept = my - f.slope * mx;
    f.r_squared = (sxx > 0 && syy > 0) ? (sxy * sxy) / (sxx * syy) : 1.0;
    return f;
}

} // namespace seqmine::synthetic
