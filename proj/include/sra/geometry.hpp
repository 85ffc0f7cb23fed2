#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "sra/errors.hpp"

namespace sra {

enum class ArrayKind { ULA, TLNA, CPA, Custom };

inline const char* to_string(ArrayKind k) {
    switch (k) {
        case ArrayKind::ULA: return "ula";
        case ArrayKind::TLNA: return "tlna";
        case ArrayKind::CPA: return "cpa";
        default: return "custom";
    }
}

/// Physical sensor positions in integer units of the base spacing d.
/// Positions are strictly increasing and non-negative.
struct SensorLayout {
    std::vector<int> positions;
    ArrayKind kind = ArrayKind::Custom;
    // Geometry parameters: ULA -> {M}, TLNA -> {M1, M2}, CPA -> {F, Q}.
    std::vector<int> params;

    int sensor_count() const { return static_cast<int>(positions.size()); }

    bool valid() const {
        if (positions.empty()) return false;
        if (positions.front() < 0) return false;
        for (std::size_t i = 1; i < positions.size(); ++i)
            if (positions[i] <= positions[i - 1]) return false;
        return true;
    }
};

/// Difference co-array of a layout: the lag set D, per-lag pair
/// multiplicities, DoF = |D|, and the maximal L with [-L, L] subset of D.
struct CoarrayProfile {
    std::vector<int> lags;            // sorted, distinct
    std::map<int, int> weight;        // lag -> number of ordered sensor pairs
    int dof = 0;
    int contiguous_half_extent = 0;

    bool contains(int lag) const { return weight.count(lag) != 0; }
};

inline SensorLayout build_ula(int M) {
    if (M < 1) throw invalid_parameter("build_ula: M must be >= 1");
    SensorLayout s;
    s.kind = ArrayKind::ULA;
    s.params = {M};
    s.positions.resize(M);
    std::iota(s.positions.begin(), s.positions.end(), 0);
    return s;
}

/// Two-level nested array: inner ULA {1..M1}d, outer {n(M1+1)d : n=1..M2}.
/// Def. 2.3 writes the outer spacing as (M+1)d without tying M to a level;
/// the (M1+1) reading is the one that reproduces the (M^2-2)/2 + M DoF count
/// claimed for M1 = M2 = M/2, so that is what we build.
inline SensorLayout build_tlna(int M1, int M2) {
    if (M1 < 1 || M2 < 1) throw invalid_parameter("build_tlna: level sizes must be >= 1");
    std::set<int> pos;
    for (int m = 1; m <= M1; ++m) pos.insert(m);
    for (int n = 1; n <= M2; ++n) pos.insert(n * (M1 + 1));
    SensorLayout s;
    s.kind = ArrayKind::TLNA;
    s.params = {M1, M2};
    s.positions.assign(pos.begin(), pos.end());
    if (s.sensor_count() != M1 + M2)
        throw internal_consistency_error("build_tlna: overlapping levels");
    return s;
}

/// Coprime pair: {Qf : f=0..F-1} united with {Fq : q=1..2Q-1}.
inline SensorLayout build_cpa(int F, int Q) {
    if (F < 2 || Q < 2) throw invalid_parameter("build_cpa: F and Q must be >= 2");
    if (std::gcd(F, Q) != 1) throw invalid_parameter("build_cpa: F and Q must be coprime");
    std::set<int> pos;
    for (int f = 0; f < F; ++f) pos.insert(Q * f);
    for (int q = 1; q <= 2 * Q - 1; ++q) pos.insert(F * q);
    SensorLayout s;
    s.kind = ArrayKind::CPA;
    s.params = {F, Q};
    s.positions.assign(pos.begin(), pos.end());
    if (s.sensor_count() != F + 2 * Q - 1)
        throw internal_consistency_error("build_cpa: sub-arrays overlap beyond the origin");
    return s;
}

inline SensorLayout build_custom(std::vector<int> positions) {
    SensorLayout s;
    s.kind = ArrayKind::Custom;
    s.positions = std::move(positions);
    if (!s.valid()) throw invalid_parameter("build_custom: positions must be strictly increasing and >= 0");
    return s;
}

/// Exhaustive enumeration of all M^2 ordered sensor pairs.
inline CoarrayProfile difference_coarray(const SensorLayout& layout) {
    if (!layout.valid()) throw invalid_parameter("difference_coarray: invalid layout");
    CoarrayProfile p;
    for (int a : layout.positions)
        for (int b : layout.positions) ++p.weight[a - b];
    p.lags.reserve(p.weight.size());
    for (const auto& [lag, _] : p.weight) p.lags.push_back(lag);
    p.dof = static_cast<int>(p.lags.size());
    int L = 0;
    while (p.contains(L + 1) && p.contains(-(L + 1))) ++L;
    p.contiguous_half_extent = L;
    return p;
}

/// One-sided extent J of the virtual ULA used by all augmented-domain
/// processing: M^2/4 + M/2 for a symmetric TLNA (exact maximal extent),
/// QF + 1 for a CPA. The CPA closed form is conservative: the brute-force
/// co-array stays contiguous out to lag QF + Q - 1, so only coverage
/// (J - 1 <= brute-force extent) is asserted here.
inline int virtual_half_extent(const SensorLayout& layout) {
    int J = 0;
    if (layout.kind == ArrayKind::TLNA && layout.params.size() == 2 &&
        layout.params[0] == layout.params[1]) {
        const int M = 2 * layout.params[0];
        J = (M * M) / 4 + M / 2;
    } else if (layout.kind == ArrayKind::CPA && layout.params.size() == 2) {
        J = layout.params[1] * layout.params[0] + 1;
    } else {
        throw invalid_parameter("virtual_half_extent: closed forms exist only for symmetric TLNA and CPA");
    }
    const auto profile = difference_coarray(layout);
    if (J - 1 > profile.contiguous_half_extent)
        throw internal_consistency_error("virtual_half_extent: closed form exceeds brute-force contiguous extent");
    if (layout.kind == ArrayKind::TLNA && J - 1 != profile.contiguous_half_extent)
        throw internal_consistency_error("virtual_half_extent: TLNA closed form is not tight");
    return J;
}

/// Parse a geometry spec string: "ula:16", "tlna:4,4", "cpa:5,2".
inline SensorLayout parse_geometry(const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw invalid_parameter("geometry spec '" + spec + "': expected '<kind>:<params>' (offset " +
                                std::to_string(spec.size()) + ")");
    const std::string kind = spec.substr(0, colon);
    std::vector<int> args;
    std::size_t pos = colon + 1;
    while (pos < spec.size()) {
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(spec.substr(pos), &used);
        } catch (const std::exception&) {
            throw invalid_parameter("geometry spec '" + spec + "': expected integer at offset " +
                                    std::to_string(pos));
        }
        args.push_back(v);
        pos += used;
        if (pos < spec.size()) {
            if (spec[pos] != ',')
                throw invalid_parameter("geometry spec '" + spec + "': expected ',' at offset " +
                                        std::to_string(pos));
            ++pos;
        }
    }
    if (kind == "ula" && args.size() == 1) return build_ula(args[0]);
    if (kind == "tlna" && args.size() == 2) return build_tlna(args[0], args[1]);
    if (kind == "cpa" && args.size() == 2) return build_cpa(args[0], args[1]);
    throw invalid_parameter("geometry spec '" + spec + "': unknown kind or wrong parameter count (offset 0)");
}

inline std::string geometry_name(const SensorLayout& layout) {
    std::string n = to_string(layout.kind);
    for (std::size_t i = 0; i < layout.params.size(); ++i)
        n += (i == 0 ? ":" : ",") + std::to_string(layout.params[i]);
    return n;
}

} // namespace sra
