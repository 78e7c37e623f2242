#pragma once

#include <functional>
#include <string>
#include <vector>

#include "grashof/spectral.hpp"

namespace grashof {

enum class ExpansionKind { trivial, finite, truncated };
enum class NormKind { z, h };
std::string to_string(ExpansionKind k);

double field_norm(const SpectralField& f, NormKind n);

/// Limit selection and trend thresholds for the extraction. By default
/// the limit proxy at every level is the final element of the working
/// sequence, which is then dropped from the retained indices. Exact
/// limits, when known, can be supplied per level: explicit_limits[0] is
/// the limit of the sequence itself, explicit_limits[k] the level-k
/// direction limit.
struct LimitPolicy {
    std::vector<SpectralField> explicit_limits;
    double trivial_threshold = 1e-13;
    double stagnation_tol = 1e-12;
    double tail_exclusion = 0.05;   // fraction of indices excluded from trend statistics
    double trend_ratio = 0.5;       // last-quartile mean must not exceed this times the first-quartile mean
    double settle_threshold = 0.1;  // gaps below this count as settled even without a visible trend
    int stride = 1;
    std::vector<int> subset;  // optional explicit subsequence (indices into the input)
};

/// One extracted expansion v_n = v + sum_j Gamma_{j,n} w_j + remainder,
/// with unit directions and exact finite-depth remainders.
struct UnitaryExpansion {
    SpectralField limit;
    int depth = 0;  // K
    ExpansionKind kind = ExpansionKind::trivial;
    NormKind norm = NormKind::z;
    std::vector<int> retained;                              // indices into the source sequence
    std::vector<SpectralField> directions;                  // w_k, k = 1..K
    std::vector<std::vector<double>> gammas;                // gammas[k-1][pos], positive
    std::vector<std::vector<SpectralField>> level_remainders;  // w_n^{(k)} per level
    std::vector<std::string> notes;

    double gamma(int level, int pos) const { return gammas[static_cast<std::size_t>(level - 1)][static_cast<std::size_t>(pos)]; }
    int points() const { return static_cast<int>(retained.size()); }
};

UnitaryExpansion extract_expansion(const std::vector<SpectralField>& seq, int depth_max,
                                   const LimitPolicy& policy = {});

struct LevelReport {
    int level = 0;
    double max_reconstruction_error = 0;
    double max_gamma_deviation = 0;  // uniqueness recursion vs stored, relative
    double direction_unit_error = 0;
    double remainder_unit_error = 0;
    double remainder_gap_first = 0, remainder_gap_last = 0;  // ||w_n^{(k)} - w_k|| trend
    bool ok = true;
};

struct ExpansionReport {
    std::vector<LevelReport> levels;
    double gamma1_first = 0, gamma1_last = 0;
    std::vector<double> ratio_first, ratio_last;  // Gamma_{k+1}/Gamma_k trend endpoints
    bool ok = true;
    std::string summary() const;
};

/// Re-derives every coefficient from scratch through the uniqueness
/// recursion and checks the reconstruction identity, unit norms and the
/// required decay trends.
ExpansionReport verify_expansion(const UnitaryExpansion& exp, const std::vector<SpectralField>& seq);

/// Rescale a pre-unitary expansion (nonzero, not necessarily unit,
/// directions) to unit directions: w -> w/|w|, Gamma -> |w| Gamma.
/// Reconstruction values are unchanged.
UnitaryExpansion convert_pre_unitary(const SpectralField& v,
                                     const std::vector<std::pair<std::vector<double>, SpectralField>>& terms,
                                     NormKind norm = NormKind::z);

struct SyntheticTerm {
    std::function<double(int)> gamma;  // may be signed; the modulus must decay
    SpectralField direction;           // unit
};
struct SyntheticSpec {
    SpectralField limit;
    std::vector<SyntheticTerm> terms;
    int n_begin = 1;
    int n_end = 100;
};

/// Emits v_n = v + sum_k Gamma_k(n) w_k over the index range. Rejects
/// generators whose moduli fail to decay or whose successive ratios fail
/// to shrink across the range.
std::vector<SpectralField> synthesize_sequence(const SyntheticSpec& spec);

/// Expansion dump: directory with limit.sf, w_<k>.sf and gamma.csv
/// (n,alpha,gamma1,...,gammaK).
void write_expansion(const std::string& dir, const UnitaryExpansion& exp, const std::vector<double>& alphas);
struct ExpansionDump {
    UnitaryExpansion exp;
    std::vector<double> alphas;  // aligned with exp.retained positions
};
ExpansionDump read_expansion(const std::string& dir);

}  // namespace grashof
