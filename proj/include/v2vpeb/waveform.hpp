#pragma once

// OFDM grid, per-array subcarrier/power allocation and effective bandwidth.
// Transmit symbols are never materialized: only their energies enter the
// Fisher information.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "v2vpeb/errors.hpp"
#include "v2vpeb/geometry.hpp"

namespace v2vpeb {

struct OfdmSpec {
    std::size_t n_fft = 2048;
    double subcarrier_spacing = 60e3;   // Hz
    double carrier_frequency = 3.5e9;   // Hz
    std::vector<int> occupied;          // ascending subcarrier indices
    std::size_t n_symbols = 1;
    double total_power = 1.0;           // W per OFDM symbol

    double sample_rate() const { return static_cast<double>(n_fft) * subcarrier_spacing; }
    double omega(int p) const { return 2.0 * kPi * p * subcarrier_spacing; }
    double omega_c() const { return 2.0 * kPi * carrier_frequency; }
    double wavelength() const { return kSpeedOfLight / carrier_frequency; }
};

/// Symmetric grid {-half..-1, 1..half}.
inline std::vector<int> symmetric_occupied(int half) {
    std::vector<int> p;
    p.reserve(static_cast<std::size_t>(2 * std::max(half, 0)));
    for (int i = -half; i <= half; ++i)
        if (i != 0) p.push_back(i);
    return p;
}

inline void validate(const OfdmSpec& s) {
    if (s.n_fft == 0) throw Error(ErrorCode::InvalidCount, "n_fft must be positive");
    if (!(s.subcarrier_spacing > 0.0) || !(s.carrier_frequency > 0.0))
        throw Error(ErrorCode::InvalidArgument, "subcarrier spacing and carrier frequency must be positive");
    if (s.occupied.empty()) throw Error(ErrorCode::EmptySet, "no occupied subcarriers");
    if (s.occupied.size() > s.n_fft) throw Error(ErrorCode::InvalidArgument, "more occupied subcarriers than n_fft");
    const long half = static_cast<long>(s.n_fft) / 2;
    for (int p : s.occupied)
        if (!(p > -half && p < half))
            throw Error(ErrorCode::InvalidArgument, "subcarrier index outside (-N/2, N/2)");
    if (s.n_symbols == 0) throw Error(ErrorCode::InvalidCount, "n_symbols must be >= 1");
    if (!(s.total_power > 0.0)) throw Error(ErrorCode::InvalidArgument, "total power must be positive");
}

struct Allocation {
    std::vector<std::vector<int>> sets;              // P_t, ascending
    std::vector<double> array_power;                 // gamma_t
    std::vector<std::vector<double>> subcarrier_power;  // gamma_{t,p}, parallel to sets

    std::size_t arrays() const noexcept { return sets.size(); }

    /// Position of subcarrier p inside P_t, or npos.
    std::size_t find(std::size_t t, int p) const {
        const auto& s = sets.at(t);
        const auto it = std::lower_bound(s.begin(), s.end(), p);
        return (it != s.end() && *it == p) ? static_cast<std::size_t>(it - s.begin()) : npos;
    }

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

/// Round-robin over the ascending occupied set; uniform power per array and per subcarrier.
inline Allocation interleaved_allocation(std::vector<int> occupied, std::size_t k_tx) {
    if (occupied.empty()) throw Error(ErrorCode::EmptySet, "occupied subcarrier set is empty");
    if (k_tx == 0) throw Error(ErrorCode::InvalidCount, "need at least one Tx array");
    std::sort(occupied.begin(), occupied.end());
    if (std::adjacent_find(occupied.begin(), occupied.end()) != occupied.end())
        throw Error(ErrorCode::InvalidArgument, "duplicate subcarrier index");

    Allocation a;
    a.sets.resize(k_tx);
    for (std::size_t j = 0; j < occupied.size(); ++j) a.sets[j % k_tx].push_back(occupied[j]);
    a.array_power.assign(k_tx, 1.0 / static_cast<double>(k_tx));
    for (const auto& s : a.sets) {
        if (s.empty()) throw Error(ErrorCode::EmptySet, "a Tx array received no subcarriers");
        a.subcarrier_power.emplace_back(s.size(), 1.0 / static_cast<double>(s.size()));
    }
    return a;
}

/// Power-weighted standard deviation of omega_p over P_t (rad/s).
inline double effective_bandwidth(const Allocation& alloc, const OfdmSpec& spec, std::size_t t) {
    if (t >= alloc.arrays()) throw Error(ErrorCode::IndexOutOfRange, "Tx array index out of range");
    const auto& set = alloc.sets[t];
    const auto& w = alloc.subcarrier_power[t];
    if (set.empty()) throw Error(ErrorCode::EmptySet, "Tx array has no subcarriers");
    double m1 = 0.0;
    for (std::size_t i = 0; i < set.size(); ++i) m1 += w[i] * spec.omega(set[i]);
    // Centered second moment avoids cancellation between E[w^2] and E[w]^2.
    double var = 0.0;
    for (std::size_t i = 0; i < set.size(); ++i) {
        const double d = spec.omega(set[i]) - m1;
        var += w[i] * d * d;
    }
    return std::sqrt(std::max(var, 0.0));
}

inline std::vector<double> effective_bandwidths(const Allocation& alloc, const OfdmSpec& spec) {
    std::vector<double> b(alloc.arrays());
    for (std::size_t t = 0; t < b.size(); ++t) b[t] = effective_bandwidth(alloc, spec, t);
    return b;
}

inline void validate(const Allocation& a, const OfdmSpec& spec) {
    if (a.sets.empty()) throw Error(ErrorCode::EmptySet, "allocation has no arrays");
    if (a.array_power.size() != a.sets.size() || a.subcarrier_power.size() != a.sets.size())
        throw Error(ErrorCode::InvalidArgument, "allocation vectors have inconsistent sizes");
    std::vector<int> all;
    double gsum = 0.0;
    for (std::size_t t = 0; t < a.sets.size(); ++t) {
        if (a.subcarrier_power[t].size() != a.sets[t].size())
            throw Error(ErrorCode::InvalidArgument, "per-subcarrier power size mismatch");
        if (!(a.array_power[t] >= 0.0 && a.array_power[t] <= 1.0))
            throw Error(ErrorCode::InvalidArgument, "array power fraction outside [0,1]");
        gsum += a.array_power[t];
        double s = 0.0;
        for (double g : a.subcarrier_power[t]) {
            if (!(g >= 0.0 && g <= 1.0))
                throw Error(ErrorCode::InvalidArgument, "subcarrier power fraction outside [0,1]");
            s += g;
        }
        if (!a.sets[t].empty() && std::abs(s - 1.0) > 1e-12)
            throw Error(ErrorCode::InvalidArgument, "per-array subcarrier fractions must sum to 1");
        if (!std::is_sorted(a.sets[t].begin(), a.sets[t].end()))
            throw Error(ErrorCode::InvalidArgument, "subcarrier sets must be ascending");
        all.insert(all.end(), a.sets[t].begin(), a.sets[t].end());
    }
    if (std::abs(gsum - 1.0) > 1e-12) throw Error(ErrorCode::InvalidArgument, "array fractions must sum to 1");
    std::sort(all.begin(), all.end());
    if (std::adjacent_find(all.begin(), all.end()) != all.end())
        throw Error(ErrorCode::InvalidArgument, "subcarrier sets overlap");
    std::vector<int> occ = spec.occupied;
    std::sort(occ.begin(), occ.end());
    if (all != occ) throw Error(ErrorCode::InvalidArgument, "allocation does not cover the occupied set");
}

}  // namespace v2vpeb
