#include "plap/run_config.hpp"

#include <json.hpp>

namespace plap {

using nlohmann::json;

std::string to_string(RunMode m) {
    switch (m) {
        case RunMode::Solve: return "solve";
        case RunMode::ValidateBubble: return "validate-bubble";
        case RunMode::Diagnose: return "diagnose";
        case RunMode::CheckHypotheses: return "check-hypotheses";
        case RunMode::SweepJ: return "sweep-j";
    }
    return "solve";
}

namespace {

RunMode mode_from_string(const std::string& s) {
    if (s == "solve") return RunMode::Solve;
    if (s == "validate-bubble") return RunMode::ValidateBubble;
    if (s == "diagnose") return RunMode::Diagnose;
    if (s == "check-hypotheses") return RunMode::CheckHypotheses;
    if (s == "sweep-j") return RunMode::SweepJ;
    throw std::invalid_argument(
        "config: mode must be one of solve, validate-bubble, diagnose, check-hypotheses, "
        "sweep-j (got '" + s + "')");
}

void reject_unknown(const json& obj, const std::string& path,
                    std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) ok = true;
        if (!ok)
            throw std::invalid_argument("config: unknown key '" + path + key + "'");
    }
}

template <class T>
T get_or(const json& obj, const char* key, const std::string& path, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw std::invalid_argument("config: bad type for '" + path + key + "'");
    }
}

DomainMask mask_from_config(const json& m, const std::string& path, double half_extent) {
    reject_unknown(m, path, {"kind", "radius", "normal", "offset"});
    const std::string kind = get_or<std::string>(m, "kind", path, "ball");
    if (kind == "ball") return DomainMask::ball(get_or<double>(m, "radius", path, half_extent));
    if (kind == "box") return DomainMask::box();
    if (kind == "half_space_slab")
        return DomainMask::half_space_slab(get_or<Point>(m, "normal", path, Point{}),
                                           get_or<double>(m, "offset", path, 0.0));
    throw std::invalid_argument("config: unknown mask kind '" + kind + "' at " + path);
}

json mask_to_config(const DomainMask& mask) {
    json m;
    switch (mask.kind) {
        case MaskKind::Ball:
            m["kind"] = "ball";
            m["radius"] = mask.radius;
            break;
        case MaskKind::Box:
            m["kind"] = "box";
            break;
        case MaskKind::HalfSpaceSlab:
            m["kind"] = "half_space_slab";
            m["normal"] = mask.normal;
            m["offset"] = mask.offset;
            break;
    }
    return m;
}

}  // namespace

Point default_init_center(int dim, int blocks, double half_extent) {
    Point c(static_cast<std::size_t>(dim), 0.0);
    const double r = 0.5 * half_extent;
    for (int b = 0; b < blocks; ++b) c[static_cast<std::size_t>(4 * b)] = r;
    return c;
}

RunConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: JSON parse error: ") + e.what());
    }
    require(root.is_object(), "config: top level must be a JSON object");
    reject_unknown(root, "", {"mode", "N", "p", "j", "seed", "workers", "output_dir",
                              "problem", "symmetry", "grid", "solver", "bubble",
                              "diagnostics"});

    RunConfig config;
    config.mode = mode_from_string(get_or<std::string>(root, "mode", "", "solve"));
    config.seed = get_or<std::uint64_t>(root, "seed", "", 1);
    config.workers = get_or<int>(root, "workers", "", 0);
    require(config.workers >= 0, "config: workers must be >= 0");
    config.output_dir = get_or<std::string>(root, "output_dir", "", "");

    // Problem block, with top-level N/p shorthands.
    int N = get_or<int>(root, "N", "", 4);
    double p = get_or<double>(root, "p", "", 2.0);
    if (root.contains("problem")) {
        const json& pb = root.at("problem");
        reject_unknown(pb, "problem.", {"N", "p"});
        N = get_or<int>(pb, "N", "problem.", N);
        p = get_or<double>(pb, "p", "problem.", p);
    }
    config.solve.problem = ProblemParams::make(N, p);

    // Symmetry block, with top-level j shorthand.
    int j = get_or<int>(root, "j", "", 1);
    int M = 16, lambda_samples = 32;
    if (root.contains("symmetry")) {
        const json& sb = root.at("symmetry");
        reject_unknown(sb, "symmetry.", {"j", "samples_per_circle", "lambda_samples"});
        j = get_or<int>(sb, "j", "symmetry.", j);
        M = get_or<int>(sb, "samples_per_circle", "symmetry.", M);
        lambda_samples = get_or<int>(sb, "lambda_samples", "symmetry.", lambda_samples);
    }
    config.solve.symmetry = SymmetryConfig::make(N, j, M, lambda_samples, config.seed);

    // Grid block.
    config.solve.nodes_per_axis = 33;
    config.solve.half_extent = 2.0;
    if (root.contains("grid")) {
        const json& gb = root.at("grid");
        reject_unknown(gb, "grid.", {"nodes_per_axis", "half_extent", "mask"});
        config.solve.nodes_per_axis = get_or<int>(gb, "nodes_per_axis", "grid.", 33);
        config.solve.half_extent = get_or<double>(gb, "half_extent", "grid.", 2.0);
        if (gb.contains("mask"))
            config.solve.mask = mask_from_config(gb.at("mask"), "grid.mask.",
                                                 config.solve.half_extent);
        else
            config.solve.mask = DomainMask::ball(config.solve.half_extent);
    } else {
        config.solve.mask = DomainMask::ball(config.solve.half_extent);
    }
    require(config.solve.nodes_per_axis >= 3 && config.solve.nodes_per_axis % 2 == 1,
            "config: grid.nodes_per_axis must be odd and >= 3");
    require(config.solve.half_extent > 0.0, "config: grid.half_extent must be positive");

    // Solver block.
    auto& sc = config.solve;
    sc.seed = config.seed;
    if (root.contains("solver")) {
        const json& so = root.at("solver");
        reject_unknown(so, "solver.",
                       {"init", "init_center", "init_eps", "equivariant", "step_alpha0",
                        "armijo_beta", "armijo_c1", "max_backtracks", "tol_defect",
                        "tol_energy", "tol_residual", "max_iters", "dual_interval",
                        "dual_bank_size", "diagnostics_interval", "diagnostics_delta_fraction"});
        const std::string init = get_or<std::string>(so, "init", "solver.", "projected-bubble");
        if (init == "projected-bubble")
            sc.init = InitKind::ProjectedBubble;
        else if (init == "random-smooth")
            sc.init = InitKind::RandomSmooth;
        else
            throw std::invalid_argument(
                "config: solver.init must be projected-bubble or random-smooth");
        sc.init_center = get_or<Point>(so, "init_center", "solver.", Point{});
        sc.init_eps = get_or<double>(so, "init_eps", "solver.", 0.5);
        sc.equivariant = get_or<bool>(so, "equivariant", "solver.", true);
        sc.step_alpha0 = get_or<double>(so, "step_alpha0", "solver.", 1.0);
        sc.armijo_beta = get_or<double>(so, "armijo_beta", "solver.", 0.5);
        sc.armijo_c1 = get_or<double>(so, "armijo_c1", "solver.", 1e-4);
        sc.max_backtracks = get_or<int>(so, "max_backtracks", "solver.", 60);
        sc.tol_defect = get_or<double>(so, "tol_defect", "solver.", 1e-10);
        sc.tol_energy = get_or<double>(so, "tol_energy", "solver.", 1e-9);
        sc.tol_residual = get_or<double>(so, "tol_residual", "solver.", 1e-3);
        sc.max_iters = get_or<int>(so, "max_iters", "solver.", 2000);
        sc.dual_interval = get_or<int>(so, "dual_interval", "solver.", 100);
        sc.dual_bank_size = get_or<int>(so, "dual_bank_size", "solver.", 8);
        sc.diagnostics_interval = get_or<int>(so, "diagnostics_interval", "solver.", 0);
        sc.diagnostics_delta_fraction =
            get_or<double>(so, "diagnostics_delta_fraction", "solver.", 0.45);
    }
    if (sc.init_center.empty() && sc.init == InitKind::ProjectedBubble)
        sc.init_center = default_init_center(N, j, sc.half_extent);
    require(sc.init_center.empty() || static_cast<int>(sc.init_center.size()) == N,
            "config: solver.init_center must have N entries");
    require(sc.init_eps > 0.0, "config: solver.init_eps must be positive");
    require(sc.diagnostics_delta_fraction > 0.0 && sc.diagnostics_delta_fraction <= 0.5,
            "config: solver.diagnostics_delta_fraction must lie in (0, 0.5]");

    // Bubble block (validate-bubble mode).
    if (root.contains("bubble")) {
        const json& bb = root.at("bubble");
        reject_unknown(bb, "bubble.", {"eps", "center", "nodes_sweep"});
        config.bubble.eps = get_or<double>(bb, "eps", "bubble.", 1.0);
        config.bubble.center = get_or<Point>(bb, "center", "bubble.", Point{});
        config.bubble.nodes_sweep = get_or<std::vector<int>>(bb, "nodes_sweep", "bubble.", {});
    }
    require(config.bubble.eps > 0.0, "config: bubble.eps must be positive");
    require(config.bubble.center.empty() ||
                static_cast<int>(config.bubble.center.size()) == N,
            "config: bubble.center must have N entries");

    // Diagnostics block.
    if (root.contains("diagnostics")) {
        const json& db = root.at("diagnostics");
        reject_unknown(db, "diagnostics.",
                       {"delta_fraction", "fields", "reference_nodes", "reference_half_extent",
                        "eps_collapse", "eps_stable_band", "d_ratio_max", "cauchy_rel"});
        auto& dc = config.diagnostics;
        dc.delta_fraction = get_or<double>(db, "delta_fraction", "diagnostics.", 0.45);
        dc.fields = get_or<std::vector<std::string>>(db, "fields", "diagnostics.", {});
        dc.reference_nodes = get_or<int>(db, "reference_nodes", "diagnostics.", 17);
        dc.reference_half_extent =
            get_or<double>(db, "reference_half_extent", "diagnostics.", 4.0);
        dc.thresholds.eps_collapse = get_or<double>(db, "eps_collapse", "diagnostics.", 0.5);
        dc.thresholds.eps_stable_band =
            get_or<double>(db, "eps_stable_band", "diagnostics.", 1.5);
        dc.thresholds.d_ratio_max = get_or<double>(db, "d_ratio_max", "diagnostics.", 10.0);
        dc.thresholds.cauchy_rel = get_or<double>(db, "cauchy_rel", "diagnostics.", 0.1);
    }
    require(config.diagnostics.delta_fraction > 0.0 && config.diagnostics.delta_fraction <= 0.5,
            "config: diagnostics.delta_fraction must lie in (0, 0.5]");

    return config;
}

std::string serialize(const RunConfig& config) {
    json root;
    root["mode"] = to_string(config.mode);
    root["seed"] = config.seed;
    root["workers"] = config.workers;
    root["output_dir"] = config.output_dir;
    root["problem"] = {{"N", config.solve.problem.dim}, {"p", config.solve.problem.p}};
    root["symmetry"] = {{"j", config.solve.symmetry.blocks},
                        {"samples_per_circle", config.solve.symmetry.samples_per_circle},
                        {"lambda_samples", config.solve.symmetry.lambda_samples}};
    root["grid"] = {{"nodes_per_axis", config.solve.nodes_per_axis},
                    {"half_extent", config.solve.half_extent},
                    {"mask", mask_to_config(config.solve.mask)}};
    root["solver"] = {{"init", to_string(config.solve.init)},
                      {"init_center", config.solve.init_center},
                      {"init_eps", config.solve.init_eps},
                      {"equivariant", config.solve.equivariant},
                      {"step_alpha0", config.solve.step_alpha0},
                      {"armijo_beta", config.solve.armijo_beta},
                      {"armijo_c1", config.solve.armijo_c1},
                      {"max_backtracks", config.solve.max_backtracks},
                      {"tol_defect", config.solve.tol_defect},
                      {"tol_energy", config.solve.tol_energy},
                      {"tol_residual", config.solve.tol_residual},
                      {"max_iters", config.solve.max_iters},
                      {"dual_interval", config.solve.dual_interval},
                      {"dual_bank_size", config.solve.dual_bank_size},
                      {"diagnostics_interval", config.solve.diagnostics_interval},
                      {"diagnostics_delta_fraction", config.solve.diagnostics_delta_fraction}};
    root["bubble"] = {{"eps", config.bubble.eps},
                      {"center", config.bubble.center},
                      {"nodes_sweep", config.bubble.nodes_sweep}};
    root["diagnostics"] = {{"delta_fraction", config.diagnostics.delta_fraction},
                           {"fields", config.diagnostics.fields},
                           {"reference_nodes", config.diagnostics.reference_nodes},
                           {"reference_half_extent", config.diagnostics.reference_half_extent},
                           {"eps_collapse", config.diagnostics.thresholds.eps_collapse},
                           {"eps_stable_band", config.diagnostics.thresholds.eps_stable_band},
                           {"d_ratio_max", config.diagnostics.thresholds.d_ratio_max},
                           {"cauchy_rel", config.diagnostics.thresholds.cauchy_rel}};
    return root.dump(2);
}

bool RunConfig::operator==(const RunConfig& other) const {
    return serialize(*this) == serialize(other);
}

}  // namespace plap
