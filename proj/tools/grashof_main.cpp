#include <CLI11.hpp>

#include <iostream>

#include "grashof/pipeline.hpp"

using namespace grashof;

namespace {

struct CommonArgs {
    std::string config;
    std::string preset_name;
    std::string out;
    long seed = -1;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config, "key = value configuration file");
    cmd->add_option("--preset", args.preset_name, "named preset bundle");
    cmd->add_option("--out", args.out, "output directory");
    cmd->add_option("--seed", args.seed, "seed override");
}

RunConfig resolve(const CommonArgs& args, bool need_source = true) {
    if (!args.preset_name.empty() && !args.config.empty())
        throw ConfigError("--config and --preset are mutually exclusive");
    RunConfig cfg;
    if (!args.preset_name.empty()) cfg = preset(args.preset_name);
    else if (!args.config.empty()) cfg = parse_config(args.config);
    else if (need_source) throw ConfigError("either --config or --preset is required");
    if (!args.out.empty()) cfg.out = args.out;
    if (args.seed >= 0) cfg.seed = static_cast<std::uint64_t>(args.seed);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral steady-state branches, expansions and their order classification"};
    app.require_subcommand(1);

    CommonArgs cont_args, exp_args, cls_args, cons_args;
    std::string branch_dir, expansion_dir;
    int depth = -1, k_max = -1;

    CLI::App* cont = app.add_subcommand("continue", "continue a steady branch in alpha");
    add_common(cont, cont_args);
    CLI::App* expd = app.add_subcommand("expand", "extract the expansion from a branch");
    add_common(expd, exp_args);
    expd->add_option("--branch", branch_dir, "branch directory")->required();
    expd->add_option("--depth", depth, "expansion depth");
    CLI::App* clsf = app.add_subcommand("classify", "order the coefficient sequences and detect the case");
    add_common(clsf, cls_args);
    clsf->add_option("--branch", branch_dir, "branch directory")->required();
    clsf->add_option("--expansion", expansion_dir, "expansion directory")->required();
    clsf->add_option("--k-max", k_max, "table depth");
    CLI::App* cons = app.add_subcommand("construct", "build a force expansion or a vanishing-limit family");
    add_common(cons, cons_args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (cont->parsed()) return cmd_continue(resolve(cont_args));
        if (expd->parsed()) {
            RunConfig cfg = resolve(exp_args, false);
            return cmd_expand(branch_dir, cfg.out, depth > 0 ? depth : cfg.depth, cfg);
        }
        if (clsf->parsed()) {
            RunConfig cfg = resolve(cls_args, false);
            return cmd_classify(branch_dir, expansion_dir, cfg.out, k_max > 0 ? k_max : cfg.k_max, cfg);
        }
        if (cons->parsed()) return cmd_construct(resolve(cons_args));
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
