#include "plap/runner.hpp"

#include <filesystem>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "plap/bubble.hpp"
#include "plap/field_io.hpp"
#include "plap/parallel.hpp"

namespace plap {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

void write_manifest(const RunConfig& config, const fs::path& dir) {
    json manifest;
    manifest["config"] = json::parse(serialize(config));
    manifest["seed"] = config.seed;
    manifest["versions"] = {{"plap", kVersion}, {"pbf", "pbf-1"}, {"config_format", 1}};
    write_text(dir / "manifest.json", manifest.dump(2) + "\n");
}

void write_trace_csv(const std::vector<EnergyReport>& trace, const fs::path& path) {
    std::string out = EnergyReport::csv_header() + "\n";
    for (std::size_t i = 0; i < trace.size(); ++i)
        out += trace[i].csv_row(static_cast<int>(i)) + "\n";
    write_text(path, out);
}

json profile_to_json(const ProfileRecord& rec) {
    return json{{"delta", rec.delta},
                {"eps", rec.eps},
                {"xi", rec.xi},
                {"classification", to_string(rec.classification)}};
}

json solve_result_json(const SolveResult& result, const SolveConfig& solve_config) {
    json j;
    j["termination"] = to_string(result.termination);
    j["iterations"] = result.iterations;
    j["J"] = result.trace.back().J;
    j["grad_norm_p"] = result.trace.back().grad_norm_p;
    j["crit_norm"] = result.trace.back().crit_norm;
    j["nehari_defect"] = result.trace.back().nehari_defect;
    j["dual_residual"] = result.trace.back().dual_residual;
    j["sign_change"] = {{"min", result.min_value}, {"max", result.max_value}};
    j["equivariance_defect"] = result.equivariance_defect;
    j["near_zero_measure"] = result.near_zero_measure;
    j["equivariant"] = solve_config.equivariant;
    return j;
}

void write_solve_artifacts(const SolveResult& result, const SolveConfig& solve_config,
                           const fs::path& dir, const ProblemParams& params,
                           const ClassifyThresholds& thresholds) {
    write_trace_csv(result.trace, dir / "trace.csv");
    write_field_pbf(result.field, (dir / "final_field.pbf").string());

    json diag;
    diag["profiles"] = json::array();
    for (const auto& rec : result.profiles) diag["profiles"].push_back(profile_to_json(rec));
    if (result.profiles.size() >= 2) {
        const auto cls = classify_sequence(result.profiles, result.field.grid(), params, thresholds);
        diag["classification"] = to_string(cls.kind);
        diag["d_ratio"] = cls.d_ratio;
        if (cls.kind == ProfileClass::ConcentratingBoundary) {
            diag["boundary"] = {{"normal", cls.boundary.normal}, {"offset", cls.boundary.offset}};
        }
    }
    if (result.trace.size() >= 2) {
        const auto ps = ps_diagnostics(result.trace);
        diag["ps"] = {{"monotone", ps.monotone},
                      {"violations", ps.violations},
                      {"dual_first", ps.dual_first},
                      {"dual_last", ps.dual_last},
                      {"ps_like", ps.ps_like}};
    }
    json eps_trend = json::array(), xi_trend = json::array();
    for (const auto& rec : result.profiles) {
        eps_trend.push_back(rec.eps);
        xi_trend.push_back(rec.xi);
    }
    diag["eps_trend"] = eps_trend;
    diag["xi_trend"] = xi_trend;
    write_text(dir / "diagnostics.json", diag.dump(2) + "\n");
    write_text(dir / "result.json", solve_result_json(result, solve_config).dump(2) + "\n");
}

RunOutcome run_solve(const RunConfig& config, const fs::path& dir) {
    SolveConfig sc = config.solve;
    if (sc.init_center.empty() && sc.init == InitKind::ProjectedBubble)
        sc.init_center = default_init_center(sc.problem.dim, sc.symmetry.blocks, sc.half_extent);
    const SolveResult result = solve(sc);
    write_solve_artifacts(result, sc, dir, sc.problem, config.diagnostics.thresholds);
    return {0, "solve: " + to_string(result.termination) + " after " +
                   std::to_string(result.iterations) + " iterations, J = " +
                   format_double(result.trace.back().J)};
}

RunOutcome run_validate_bubble(const RunConfig& config, const fs::path& dir) {
    std::vector<int> sweep = config.bubble.nodes_sweep;
    if (sweep.empty()) sweep = {17, 33};
    Point center = config.bubble.center;
    if (center.empty()) center.assign(static_cast<std::size_t>(config.solve.problem.dim), 0.0);
    const auto bubble = BubbleParams::make(config.solve.problem, config.bubble.eps, center);

    std::string csv = "h,sup_residual,l1_residual,J,C_u\n";
    for (int nodes : sweep) {
        auto grid = make_grid(config.solve.problem.dim, nodes, config.solve.half_extent,
                              config.solve.mask);
        const auto rep = residual_norm(bubble, grid, config.solve.problem.p);
        // Energy and decay constants on the unmasked sample: the hard Dirichlet
        // wall would otherwise dominate the gradient integral.
        auto box_grid = make_grid(config.solve.problem.dim, nodes, config.solve.half_extent,
                                  DomainMask::box());
        const Field u = sample_bubble(box_grid, bubble, /*enforce_mask=*/false);
        const auto report = energy(u, config.solve.problem);
        const auto decay = decay_check(u, config.solve.problem);
        csv += format_double(grid->spacing()) + "," + format_double(rep.sup_residual) + "," +
               format_double(rep.l1_residual) + "," + format_double(report.J) + "," +
               format_double(decay.c_value) + "\n";
    }
    write_text(dir / "bubble_validation.csv", csv);
    return {0, "validate-bubble: wrote " + std::to_string(sweep.size()) + " levels"};
}

RunOutcome run_diagnose(const RunConfig& config, const fs::path& dir) {
    const auto& dc = config.diagnostics;
    require(!dc.fields.empty(), "diagnose: diagnostics.fields must list at least one .pbf file");
    auto ref = make_grid(config.solve.problem.dim, dc.reference_nodes, dc.reference_half_extent,
                         DomainMask::box());
    std::vector<ProfileRecord> records;
    const Field first = read_field_pbf(dc.fields.front());
    GridPtr source_grid = first.grid_ptr();
    for (const auto& path : dc.fields) {
        const Field u = path == dc.fields.front() ? first : read_field_pbf(path);
        const double total = integrate_power(u, config.solve.problem.p_star);
        require(total > 0.0, "diagnose: field '" + path + "' has zero critical mass");
        const auto scale =
            extract_scale(u, dc.delta_fraction * total, config.solve.problem,
                          config.solve.equivariant
                              ? std::optional<SymmetryConfig>(config.solve.symmetry)
                              : std::nullopt);
        ProfileRecord rec;
        rec.delta = dc.delta_fraction * total;
        rec.eps = scale.eps;
        rec.xi = scale.xi;
        rec.rescaled = rescale_field(u, scale.eps, scale.xi, config.solve.problem, ref);
        records.push_back(std::move(rec));
    }
    json diag;
    if (records.size() >= 2) {
        const auto cls =
            classify_sequence(records, *source_grid, config.solve.problem, dc.thresholds);
        for (auto& rec : records) rec.classification = cls.kind;
        diag["classification"] = to_string(cls.kind);
        diag["d_ratio"] = cls.d_ratio;
        if (cls.kind == ProfileClass::ConcentratingBoundary)
            diag["boundary"] = {{"normal", cls.boundary.normal}, {"offset", cls.boundary.offset}};
    }
    diag["profiles"] = json::array();
    json eps_trend = json::array();
    for (const auto& rec : records) {
        diag["profiles"].push_back(profile_to_json(rec));
        eps_trend.push_back(rec.eps);
    }
    diag["eps_trend"] = eps_trend;
    write_text(dir / "diagnostics.json", diag.dump(2) + "\n");
    return {0, "diagnose: " + std::to_string(records.size()) + " profiles"};
}

RunOutcome run_check_hypotheses(const RunConfig& config, const fs::path& dir) {
    const auto report = check_hypotheses(config.solve.symmetry, 500);
    json j;
    j["S1"] = report.s1_pass;
    j["S2"] = report.s2_pass;
    j["S3"] = report.s3_pass;
    j["s3_witness"] = report.s3_witness;
    j["s3_stabilizer_hits"] = report.s3_stabilizer_hits;
    j["failure"] = report.failure;
    write_text(dir / "hypotheses.json", j.dump(2) + "\n");
    return {0, report.all_pass() ? "check-hypotheses: (S1)-(S3) pass"
                                 : "check-hypotheses: FAILED - " + report.failure};
}

RunOutcome run_sweep_j(const RunConfig& config, const fs::path& dir) {
    const int N = config.solve.problem.dim;
    const int n = N / 4;
    require(n >= 1, "sweep-j: N must be at least 4");

    std::vector<SolveConfig> configs;
    for (int j = 1; j <= n; ++j) {
        SolveConfig sc = config.solve;
        sc.symmetry = SymmetryConfig::make(N, j, config.solve.symmetry.samples_per_circle,
                                           config.solve.symmetry.lambda_samples, config.seed);
        sc.init_center = default_init_center(N, j, sc.half_extent);
        configs.push_back(std::move(sc));
    }

    std::vector<std::optional<SolveResult>> results(configs.size());
    std::vector<std::string> errors(configs.size());
    const int concurrency =
        std::max(1, std::min<int>(config.workers > 0 ? config.workers : worker_count(),
                                  static_cast<int>(configs.size())));
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= configs.size()) return;
            try {
                results[k] = solve(configs[k]);
            } catch (const std::exception& e) {
                errors[k] = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < concurrency; ++t) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    for (std::size_t k = 0; k < errors.size(); ++k)
        if (!errors[k].empty())
            throw std::runtime_error("sweep-j: solve for j=" + std::to_string(k + 1) +
                                     " failed: " + errors[k]);

    json summary;
    summary["solutions"] = json::array();
    for (std::size_t k = 0; k < results.size(); ++k) {
        const fs::path sub = dir / ("j" + std::to_string(k + 1));
        fs::create_directories(sub);
        write_solve_artifacts(*results[k], configs[k], sub, configs[k].problem,
                              config.diagnostics.thresholds);
        summary["solutions"].push_back(solve_result_json(*results[k], configs[k]));
    }

    // Pairwise distinctness witnesses (Lemma-style: flip the finer block).
    std::string csv = "i,j,margin,tolerance,pass\n";
    bool all_distinct = true;
    json matrix = json::array();
    for (std::size_t a = 0; a < results.size(); ++a) {
        for (std::size_t b = a + 1; b < results.size(); ++b) {
            const double scale =
                std::max(results[a]->field.max_abs(), results[b]->field.max_abs());
            const double tol = 1e-6 * std::max(scale, 1e-300);
            const auto witness = distinctness_witness(results[a]->field, configs[a].symmetry,
                                                      results[b]->field, configs[b].symmetry, tol);
            const double margin = witness ? witness->margin : 0.0;
            const bool pass = witness && margin > 10.0 * tol;
            all_distinct = all_distinct && pass;
            csv += std::to_string(a + 1) + "," + std::to_string(b + 1) + "," +
                   format_double(margin) + "," + format_double(tol) + "," +
                   (pass ? "1" : "0") + "\n";
            json entry = {{"i", a + 1}, {"j", b + 1}, {"margin", margin},
                          {"tolerance", tol}, {"pass", pass}};
            if (witness) entry["witness"] = witness->x_prime;
            matrix.push_back(entry);
        }
    }
    write_text(dir / "distinctness.csv", csv);
    summary["distinctness"] = matrix;
    summary["all_distinct"] = all_distinct;
    write_text(dir / "summary.json", summary.dump(2) + "\n");
    return {0, "sweep-j: " + std::to_string(results.size()) + " solves, distinct=" +
                   (all_distinct ? "yes" : "no")};
}

}  // namespace

RunOutcome run(const RunConfig& config) {
    try {
        require(!config.output_dir.empty(), "run: output_dir must be set");
        if (config.workers > 0) set_worker_count(config.workers);
        const fs::path dir(config.output_dir);
        fs::create_directories(dir);
        write_manifest(config, dir);
        switch (config.mode) {
            case RunMode::Solve: return run_solve(config, dir);
            case RunMode::ValidateBubble: return run_validate_bubble(config, dir);
            case RunMode::Diagnose: return run_diagnose(config, dir);
            case RunMode::CheckHypotheses: return run_check_hypotheses(config, dir);
            case RunMode::SweepJ: return run_sweep_j(config, dir);
        }
        return {2, "run: unknown mode"};
    } catch (const std::invalid_argument& e) {
        return {2, std::string("configuration error: ") + e.what()};
    } catch (const std::exception& e) {
        return {3, std::string("run failed: ") + e.what()};
    }
}

}  // namespace plap
