#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "grashof/expansion.hpp"
#include "grashof/spectral.hpp"

namespace grashof {

/// Which coefficient sequence a table entry holds. sigma_k covers the
/// plain rows (k = 0 gives the constant sequence), sigma_jk the weighted
/// rows (j = k = 0 gives the alpha sequence itself), beta_k the force
/// levels and chi the signed discrepancy sequence.
struct SigmaLabel {
    enum class Kind { sigma_k, sigma_jk, beta_k, chi, custom };
    Kind kind = Kind::custom;
    int j = 0, k = 0;
    std::string name;

    static SigmaLabel sigma(int k) { return {Kind::sigma_k, 0, k, ""}; }
    static SigmaLabel sigma(int j, int k) { return {Kind::sigma_jk, j, k, ""}; }
    static SigmaLabel beta(int k) { return {Kind::beta_k, 0, k, ""}; }
    static SigmaLabel chi() { return {Kind::chi, 0, 0, ""}; }
    static SigmaLabel custom_named(std::string n) { return {Kind::custom, 0, 0, std::move(n)}; }

    std::string str() const;
    friend bool operator==(const SigmaLabel& a, const SigmaLabel& b) {
        return a.kind == b.kind && a.j == b.j && a.k == b.k && a.name == b.name;
    }
};

struct SigmaSequence {
    SigmaLabel label;
    std::vector<double> values;   // strictly positive
    std::vector<double> alphas;   // aligned abscissa
    std::vector<int> indices;     // original branch indices
};

enum class Order { precedes, similar, succeeds, undecided };
std::string to_string(Order o);

struct Verdict {
    Order order = Order::undecided;
    double lambda = 0;      // ratio limit estimate for similar pairs
    double slope = 0;       // fitted log-log slope of the ratio
    double dispersion = 0;  // geometric dispersion of the ratio in the window
    int points = 0;
};

struct ComparePolicy {
    double window_lo = 0.15;  // trend window, fractions of the log-alpha span
    double window_hi = 0.85;
    double slope_threshold = 0.1;
    double plateau_dispersion = 0.20;
    int min_points = 5;
};

/// Finite-data order verdict: fits log(xi/eta) against log(alpha) over
/// the trend window; a clear positive slope means xi dominates, a clear
/// negative slope means eta does, a flat low-dispersion ratio means they
/// are comparable with limit lambda (window geometric mean).
Verdict compare(const SigmaSequence& xi, const SigmaSequence& eta, const ComparePolicy& policy = {});

struct SigmaTable {
    std::vector<SigmaSequence> sequences;
    std::vector<std::vector<Verdict>> verdicts;  // full matrix, antisymmetric
    ComparePolicy policy;
    std::vector<std::string> notes;

    int size() const { return static_cast<int>(sequences.size()); }
    const SigmaSequence* find(const SigmaLabel& l) const;
    std::optional<Verdict> verdict(const SigmaLabel& a, const SigmaLabel& b) const;
    bool fully_decided() const;
    void recompare();
};

/// Populate the sigma array from an extracted expansion: sigma_k,
/// sigma_{0,k} and sigma_{j,k} up to k_max, plus the force levels beta_k
/// when a force expansion is given.
SigmaTable build_sigma_table(const UnitaryExpansion& exp, const std::vector<double>& alphas, int k_max,
                             const ComparePolicy& policy = {}, const UnitaryExpansion* force_exp = nullptr);

struct TotalizeResult {
    SigmaTable table;
    std::vector<int> kept_positions;  // positions into the original value arrays
    int sign_class = 0;               // 0 none, 1/2/3 for the all-zero / positive / negative split
    bool complete = false;
    std::string diagnostic;
};

/// Finite analogue of subsequence extraction: greedily drops head indices
/// per undecided pair until every verdict is decided or the retained
/// length hits the floor. A signed array is first split by sign; the
/// majority class is kept and its modulus joins the table as chi.
TotalizeResult totalize(const std::vector<SigmaSequence>& sequences, const ComparePolicy& policy = {},
                        const std::vector<double>* signed_array = nullptr, int floor_len = 12);

struct OrdinalClass {
    int ordinal = 0;
    std::vector<SigmaLabel> members;
};
struct BoundCheck {
    std::string name;
    int ordinal = 0;
    bool holds = true;
    std::string detail;  // finite bound or symbolic transfinite annotation
};
struct OrderReport {
    std::vector<OrdinalClass> classes;
    std::vector<BoundCheck> checks;
    std::string chain;
    bool all_bounds_hold = true;

    int ordinal_of(const SigmaLabel& l) const;  // 0 when absent
};

/// Sorts a fully decided table into equivalence classes, assigns finite
/// ordinal labels 1,2,3,... and emits the finite order bounds; the
/// transfinite bounds are attached as symbolic annotations only.
OrderReport ordinal_assign(const SigmaTable& table);

struct CaseReport {
    std::string scenario;
    std::string description;
    std::map<std::string, double> lambdas;
    std::map<std::string, double> residuals;  // identity -> Z-norm residual (scalars as absolute values)
    std::optional<SigmaSequence> chi;
    int chi_class = 0;  // 1/2/3 sign split
    std::vector<std::string> notes;
    std::string text() const;
};

/// Detects which algebraic limit relation a fixed-force branch satisfies
/// from the decided table, estimates the scalar limits and evaluates the
/// residual of every identity the detected branch asserts.
CaseReport classify_case(const SpectralField& g, const UnitaryExpansion& exp, const SigmaTable& table,
                         const ComparePolicy& policy = {});

/// The varying-force variant: forces g_n with their own nontrivial
/// expansion; branch selection compares alpha Gamma_1 with 1 and the
/// force levels with the coefficient levels.
CaseReport classify_perturbed_case(const UnitaryExpansion& exp_v, const UnitaryExpansion& exp_g,
                                   const SigmaTable& table, const ComparePolicy& policy = {});

/// Residual of the order-m coefficient balance obtained by matching
/// powers when both expansions are geometric in alpha; near zero exactly
/// when the expansions come from a constructed force plan.
std::vector<double> order_balance_residuals(const UnitaryExpansion& exp_v, const UnitaryExpansion& exp_g,
                                            const std::vector<double>& alphas, int m_max);

void write_sigma_csv(const std::string& path, const SigmaTable& table);
void write_ratio_csv(const std::string& path, const SigmaTable& table,
                     const std::vector<std::pair<SigmaLabel, SigmaLabel>>& pairs);
void write_case_report(const std::string& path, const CaseReport& report, const OrderReport* order = nullptr);

}  // namespace grashof
