#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace glt {

/// Overlapping partition of the index set {1..d_n} into nu contiguous
/// subdomains. Base blocks are near-equal (leading blocks take the
/// remainder); each subdomain extends o indices past every interior split
/// point, so consecutive extended ranges share exactly 2o indices away from
/// the boundary. Admissible iff o <= floor(d_n/nu).
struct Partition {
    int d_n = 0;
    int nu = 1;
    int overlap = 0;
    std::vector<int> splits;                      // s_0=0 < s_1 < ... < s_nu = d_n
    std::vector<std::pair<int, int>> extended;    // Omega_i, 1-based inclusive
    std::vector<std::pair<int, int>> restricted;  // tilde Omega_i, tile {1..d_n}
    // Remark-2.3 strict condition b_i < a_{i+2}; some table-admissible cells
    // violate it, so it is surfaced as a warning flag rather than enforced.
    bool strict_overlap_ok = true;
};

inline bool partition_admissible(int d_n, int nu, int o) { return o <= d_n / nu; }

inline std::optional<Partition> make_partition(int d_n, int nu, int o) {
    if (d_n < 1 || nu < 1 || o < 0)
        throw std::invalid_argument("make_partition: need d_n >= 1, nu >= 1, o >= 0");
    if (nu > d_n) throw std::invalid_argument("make_partition: nu exceeds d_n");
    if (!partition_admissible(d_n, nu, o)) return std::nullopt;
    Partition p;
    p.d_n = d_n;
    p.nu = nu;
    p.overlap = o;
    p.splits.resize(nu + 1);
    p.splits[0] = 0;
    int base = d_n / nu, rem = d_n % nu;
    for (int i = 0; i < nu; ++i) p.splits[i + 1] = p.splits[i] + base + (i < rem ? 1 : 0);
    p.extended.reserve(nu);
    p.restricted.reserve(nu);
    for (int i = 0; i < nu; ++i) {
        int lo = p.splits[i] + 1, hi = p.splits[i + 1];
        p.restricted.emplace_back(lo, hi);
        p.extended.emplace_back(std::max(1, lo - o), std::min(d_n, hi + o));
    }
    for (int i = 0; i + 2 < nu; ++i)
        if (p.extended[i].second >= p.extended[i + 2].first) p.strict_overlap_ok = false;
    return p;
}

enum class WeightScheme { full, restricted, average };

inline const char* to_string(WeightScheme w) {
    switch (w) {
        case WeightScheme::full: return "full";
        case WeightScheme::restricted: return "restricted";
        default: return "average";
    }
}

inline WeightScheme weight_scheme_from_string(const std::string& s) {
    if (s == "full") return WeightScheme::full;
    if (s == "restricted") return WeightScheme::restricted;
    if (s == "average") return WeightScheme::average;
    throw std::invalid_argument("unknown weight scheme '" + s + "'");
}

/// Gather/scatter index maps realizing R_i, R_i^T and their restricted or
/// weighted prolongations. Gather always reads the extended range; scatter
/// writes the scheme's support with the scheme's diagonal weights.
struct SubdomainOperators {
    struct Sub {
        int gather_lo = 0, gather_hi = 0;   // extended range, 1-based inclusive
        std::vector<int> scatter_global;    // 0-based global targets
        std::vector<int> scatter_local;     // offsets into the local vector
        std::vector<double> weights;        // diagonal prolongation weights
    };
    WeightScheme scheme = WeightScheme::full;
    std::vector<Sub> subs;
};

/// Coverage of index g (1-based) = number of extended ranges containing it.
inline int coverage(const Partition& p, int g) {
    int c = 0;
    for (const auto& [lo, hi] : p.extended)
        if (g >= lo && g <= hi) ++c;
    return c;
}

inline SubdomainOperators operators(const Partition& p, WeightScheme scheme) {
    SubdomainOperators ops;
    ops.scheme = scheme;
    ops.subs.resize(p.nu);
    for (int i = 0; i < p.nu; ++i) {
        auto& sub = ops.subs[i];
        auto [elo, ehi] = p.extended[i];
        sub.gather_lo = elo;
        sub.gather_hi = ehi;
        int slo = elo, shi = ehi;
        if (scheme == WeightScheme::restricted) {
            slo = p.restricted[i].first;
            shi = p.restricted[i].second;
        }
        for (int g = slo; g <= shi; ++g) {
            sub.scatter_global.push_back(g - 1);
            sub.scatter_local.push_back(g - elo);
            double w = 1.0;
            if (scheme == WeightScheme::average) w = 1.0 / coverage(p, g);
            sub.weights.push_back(w);
        }
    }
    return ops;
}

}  // namespace glt
