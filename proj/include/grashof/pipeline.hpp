#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "grashof/classify.hpp"
#include "grashof/expansion.hpp"
#include "grashof/force.hpp"
#include "grashof/steady.hpp"

namespace grashof {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Flat key = value configuration driving the batch pipeline.
struct RunConfig {
    int dimension = 3;
    double lambda = 9;
    std::string force = "manufactured";  // manufactured | file:<path> | inline:<entries>
    double alpha_start = 1;
    double alpha_end = 2e5;
    StepPolicy steps;
    NewtonOptions newton;
    int depth = 2;
    int k_max = 2;
    ComparePolicy compare;
    LimitPolicy limits;
    bool snapshots = true;
    std::string out = "out";
    std::uint64_t seed = 1;

    // construct subcommand
    std::string construct = "plan";  // plan | vanishing
    std::string w0 = "single-mode:1,0,0";
    std::string space = "ball";  // ball | zero-bs
    std::string zero_bs_k = "3,0,0";
    double zero_bs_m = 1;
    std::string zero_bs_k3 = "";
    double plan_m = 1;
    double plan_d0 = 2;
    int plan_depth = 6;
    int m_trunc = -1;  // default: plan depth
    double m_target = 1;
    std::string u_seed = "example-pair";  // field whose B(u,u) != 0
    double alpha_base = 10;
    double alpha_ratio = 2;
    int alpha_count = 20;
};

RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text);
std::vector<std::string> preset_names();
RunConfig preset(const std::string& name);
/// The exact key = value text of a named preset (as checked into presets/).
std::string preset_text(const std::string& name);

/// The manufactured start pair: shear state u with unit modes, force
/// g with coefficients -u_k + B(u,u)_k; the state -u balances g at
/// alpha = 1.
struct ManufacturedPair {
    SpectralField state;  // steady at alpha = 1
    SpectralField g;
};
ManufacturedPair manufactured_pair(const ModeSetPtr& space);

/// Crossed two-mode seed with B(u,u) != 0.
SpectralField example_pair_field(const ModeSetPtr& space);

SpectralField load_force(const RunConfig& cfg, const ModeSetPtr& space);

int cmd_continue(const RunConfig& cfg);
int cmd_expand(const std::string& branch_dir, const std::string& out_dir, int depth, const RunConfig& cfg);
int cmd_classify(const std::string& branch_dir, const std::string& expansion_dir, const std::string& out_dir,
                 int k_max, const RunConfig& cfg);
int cmd_construct(const RunConfig& cfg);

}  // namespace grashof
