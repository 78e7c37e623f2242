#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "grashof/spectral.hpp"

namespace grashof {

struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NewtonOptions {
    double tol = 1e-9;  // coefficient-norm residual
    int max_iter = 25;
};

enum class SolveStatus { converged, no_convergence, singular_jacobian };
std::string to_string(SolveStatus s);

struct SteadyState {
    double alpha = 0;
    SpectralField v;
    double residual_znorm = 0;
    int newton_iters = 0;
    SolveStatus status = SolveStatus::converged;
};

/// Av + alpha B(v,v) - g.
SpectralField residual(const SpectralField& v, double alpha, const SpectralField& g);

/// Real-variable view of a field: every canonical mode contributes 2*d
/// unknowns (re/im per component), no divergence elimination.
Eigen::VectorXd flatten(const SpectralField& f);
SpectralField unflatten(const ModeSetPtr& modes, const Eigen::VectorXd& x);

/// Dense real matrix of c_stokes*A + c_bv*B(vf,.) + c_vb*B(.,vf) in the
/// flattened representation. vf may be null when both bilinear
/// coefficients vanish.
Eigen::MatrixXd assemble_operator(const ModeSetPtr& modes, const SpectralField* vf, double c_stokes, double c_bv,
                                  double c_vb);

/// Jacobian of the steady residual: w -> Aw + alpha Bs(v,w).
Eigen::MatrixXd steady_jacobian(const SpectralField& v, double alpha);

SteadyState newton_solve(double alpha, const SpectralField& g, const SpectralField& v_init,
                         const NewtonOptions& opt = {});

struct StepPolicy {
    enum class Spacing { geometric, adaptive };
    Spacing spacing = Spacing::geometric;
    double first_factor = 1.01;       // initial multiplicative alpha step
    double max_factor = 1.04;         // cap on the step factor
    double min_factor = 1.0 + 1e-6;   // below this the branch is truncated
    double grow = 1.3;                // log-step growth after easy convergence
    double cut = 0.5;                 // log-step cut after a failure
    int easy_iters = 4;
    int geometric_count = 50;         // emitted states in geometric mode
};

struct ContinuationRun {
    SpectralField g;
    std::vector<SteadyState> states;
    StepPolicy policy;
    NewtonOptions newton;
    bool truncated = false;
    std::string diagnostic;

    std::vector<double> alphas() const;
    std::vector<SpectralField> fields() const;
};

/// Natural continuation of the steady branch in alpha, each state seeded
/// from the previous one. Without a seed the start state comes from
/// Picard iteration on A^{-1}(g - alpha B(v,v)) polished by Newton.
ContinuationRun continue_branch(const SpectralField& g, double alpha_start, double alpha_end,
                                const StepPolicy& policy = {}, const NewtonOptions& nopt = {},
                                const SpectralField* seed = nullptr);

/// CSV: header alpha,znorm,hnorm,residual,newton_iters.
void write_branch_csv(std::ostream& os, const ContinuationRun& run);
void write_branch_csv(const std::string& path, const ContinuationRun& run);

struct BranchRow {
    double alpha, znorm, hnorm, residual;
    int newton_iters;
};
std::vector<BranchRow> read_branch_csv(const std::string& path);

}  // namespace grashof
