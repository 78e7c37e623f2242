#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "grashof/spectral.hpp"

namespace grashof {

struct OperatorNorms {
    double m_a = 0;        // max |Av| on the unit sphere, exact for the diagonal operator
    double m_b_lower = 0;  // best bilinear ratio found by alternating maximization
    double m_b_upper = 0;  // certified coefficient-sum bound
};

OperatorNorms operator_norms(const ModeSetPtr& space, std::uint64_t seed = 1, int restarts = 4, int power_iters = 12);

/// c0 = 1/(4(M_B+1)) evaluated with the certified upper bound, so the
/// inversion precondition stays conservative.
double contraction_radius(const OperatorNorms& norms);

/// Solves Aw + Bs(u,w) = f. Requires |u| <= c0 (H-norm), under which the
/// operator is invertible with |w| <= 2|f|.
SpectralField l_u_solve(const SpectralField& u, const SpectralField& f, double c0);

struct ForceExpansionPlan {
    ModeSetPtr space;
    std::vector<SpectralField> w;  // w_0 .. w_{K+1}
    std::vector<SpectralField> h;  // h_0 .. h_K
    double m = 1;
    double d0 = 2;
    double c0 = 0;
    OperatorNorms norms;
    enum class Case { bs_coupled, bs_decoupled } tag = Case::bs_coupled;
    std::uint64_t seed = 0;

    int depth() const { return static_cast<int>(h.size()) - 1; }  // K
    /// Max relative residual of the order-m coefficient balance
    /// Aw_m + sum_k B(w_k, w_{m+1-k}) - h_m over 0 <= m <= K.
    double balance_residual() const;
};
std::string to_string(ForceExpansionPlan::Case c);

/// Recursive construction of a force expansion from a seed w0 with
/// B(w0,w0) = 0. When the map u -> Bs(w0,u) is nonzero the next
/// direction is drawn inside the norm budget |w_k| <= M D0^k while
/// keeping every h_k nonzero; when it vanishes identically the levels
/// come from solving with the contraction operator instead.
ForceExpansionPlan build_force_expansion(const SpectralField& w0, double m, double d0, int depth, std::uint64_t seed);

struct PlanEvaluation {
    std::vector<int> n;             // admitted indices (1-based positions in the alpha list)
    std::vector<double> alphas;
    std::vector<SpectralField> v, g;
    std::vector<double> residual;       // |Av + alpha B(v,v) - g| per admitted n
    std::vector<double> tail_bound;     // M D0^{m+1} theta / (1 - D0 theta)
    std::vector<double> measured_tail;  // |sum_{k>m} theta^{k-m} w_k|
    std::vector<int> excluded;          // indices with alpha <= D0
    int n0 = -1;                        // first admitted index with D0/alpha <= 1/2
};

PlanEvaluation evaluate_plan(const ForceExpansionPlan& plan, const std::vector<double>& alphas, int m_trunc);

/// Family g_n -> g with |g| = m_target while the states v_n -> 0:
/// w1 = sqrt(m_target/|B(u,u)|) u, g = B(w1,w1), h1 = A w1,
/// v_n = alpha^{-1/2} w1, g_n = g + alpha^{-1/2} h1.
struct VanishingPair {
    SpectralField w1, g, h1;
    std::vector<double> alphas;
    std::vector<SpectralField> v, gn;
};
VanishingPair vanishing_limit_pair(const SpectralField& u, double m_target, const std::vector<double>& alphas);

/// Single-mode-pair witness w with Bs(v,w) != 0, built from the
/// lexicographically maximal mode of v and a case table of admissible
/// companion modes. Requires a ball space with lambda >= 5 and v
/// supported in |k| <= sqrt(lambda) - 1.
struct BsWitness {
    SpectralField w;
    WaveVector kprime;
    WaveVector kmax;  // the maximal support mode the witness was built from
    double margin;    // ||Bs(v,w)||_Z
};
BsWitness find_bs_witness(const SpectralField& v);

/// Mode set K1 u K2 u K3 on which Bs(v, .) vanishes identically for
/// every v supported on K1 = {k,-k}: K2 the ball |j| <= m_bound with
/// |k| > 2 m_bound, K3 symmetric, orthogonal to k and outside K2.
struct ZeroBsSpace {
    ModeSetPtr space;
    WaveVector k;
    double max_bs = 0;  // largest ||Bs(v,e)||_Z over the exhaustive basis sweep
    int checks = 0;
};
ZeroBsSpace zero_bs_subspace(const WaveVector& k, double m_bound, const std::vector<WaveVector>& k3);

/// Plan directory: w_<k>.sf, h_<k>.sf and plan.txt with the constants.
void write_plan(const std::string& dir, const ForceExpansionPlan& plan);
ForceExpansionPlan read_plan(const std::string& dir);
/// Evaluation CSV: n,alpha,residual,tail_bound.
void write_evaluation_csv(const std::string& path, const PlanEvaluation& ev);

}  // namespace grashof
