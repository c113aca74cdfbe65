#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "roadfield/analysis.hpp"
#include "roadfield/assembly.hpp"
#include "roadfield/config.hpp"
#include "roadfield/errors.hpp"
#include "roadfield/evolution.hpp"
#include "roadfield/io.hpp"
#include "roadfield/meshing.hpp"
#include "roadfield/network.hpp"
#include "roadfield/optimize.hpp"
#include "roadfield/spectral.hpp"

namespace rf = roadfield;

namespace {

int resolve_threads(int flag) {
    if (flag > 0) return flag;
    if (const char* env = std::getenv("ROADFIELD_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 1;
}

struct Pipeline {
    rf::DomainGeometry domain;
    rf::RoadNetwork net;
    rf::Mesh mesh;
    rf::FemSystem sys;
};

/// Shared front half of eigs/evolve/analyze: files, mesh, assembled system.
Pipeline build_pipeline(const rf::RunConfig& cfg) {
    Pipeline p;
    p.domain = rf::read_domain(cfg.domain_file);
    p.net = rf::read_network(cfg.network_file);
    rf::MeshingOptions opts;
    opts.min_angle_deg = cfg.min_angle;
    p.mesh = rf::triangulate(p.domain, p.net, cfg.h, opts);
    p.sys = rf::build_system(p.mesh, cfg.params);
    return p;
}

rf::State initial_state(const rf::FemSystem& sys, const std::string& initial) {
    if (initial == "bump") return rf::bump_initial(sys);
    if (initial.rfind("file ", 0) == 0) {
        const std::string path = initial.substr(5);
        const int nv = static_cast<int>(sys.mesh.vertices.size());
        const auto rows = rf::read_nodal_values(path, nv);
        std::vector<double> field(rows.size()), road(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            field[i] = rows[i][0];
            road[i] = rows[i][1];
        }
        return rf::nodal_initial(sys, field, road);
    }
    throw rf::ConfigError("cli", "initial_state", "initial must be 'bump' or 'file <path>'");
}

std::string join_params(const std::vector<double>& p, const std::string& fallback) {
    if (p.empty()) return fallback;
    std::string s;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) s += ";";
        s += rf::format_float(p[i]);
    }
    return s;
}

int run_net_stats(const std::string& path) {
    const rf::RoadNetwork net = rf::read_network(path);
    std::cout << "length=" << rf::format_float(rf::total_length(net)) << "\n";
    double lambda_k = 0.0;
    if (!net.edges.empty()) lambda_k = rf::ahlfors_upper_constant(net).value;
    std::cout << "lambda_K=" << rf::format_float(lambda_k) << "\n";
    std::cout << rf::validate_network(net).describe() << "\n";
    return 0;
}

int run_mesh(const std::string& domain_path, const std::string& net_path, double h,
             double min_angle, const std::string& out) {
    const rf::DomainGeometry domain = rf::read_domain(domain_path);
    const rf::RoadNetwork net = rf::read_network(net_path);
    rf::MeshingOptions opts;
    opts.min_angle_deg = min_angle;
    const rf::Mesh mesh = rf::triangulate(domain, net, h, opts);
    rf::write_mesh(mesh, out);
    const rf::MeshQuality q = rf::mesh_quality(mesh);
    std::cout << "vertices=" << mesh.vertices.size() << "\n"
              << "triangles=" << mesh.triangles.size() << "\n"
              << "road_edges=" << mesh.road_edges.size() << "\n"
              << "min_angle=" << rf::format_float(q.min_angle_deg) << "\n"
              << "h_max=" << rf::format_float(q.h_max) << "\n";
    return 0;
}

int run_eigs(const rf::RunConfig& cfg, const std::string& out, const std::string& dump_b,
             const std::string& dump_l) {
    const Pipeline p = build_pipeline(cfg);
    rf::EigenOptions eopts;
    eopts.k = cfg.k;
    eopts.tol = cfg.tol;
    eopts.seed = cfg.seed;
    const rf::Spectrum spec = rf::smallest_eigenpairs(p.sys, eopts);
    if (!dump_b.empty()) rf::write_matrix(p.sys.B, dump_b);
    if (!dump_l.empty()) rf::write_matrix(p.sys.Lmass, dump_l);
    std::vector<std::vector<std::string>> rows;
    for (int i = 0; i < spec.count(); ++i) {
        rows.push_back({std::to_string(i), rf::format_float(spec.eigenvalues[i]),
                        rf::format_float(spec.residuals[i])});
    }
    rf::write_csv(out, {"index", "lambda", "residual"}, rows);
    std::cout << "modes=" << spec.count() << "\n"
              << "iterations=" << spec.iterations << "\n";
    return 0;
}

int run_evolve(const rf::RunConfig& cfg, const std::string& out) {
    const Pipeline p = build_pipeline(cfg);
    const rf::State s0 = initial_state(p.sys, cfg.initial);
    const rf::EvolutionTrace trace =
        rf::implicit_euler(p.sys, s0, cfg.dt, cfg.t_end, cfg.snapshot_every);
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < trace.times.size(); ++i) {
        rows.push_back({rf::format_float(trace.times[i]), rf::format_float(trace.l_norms[i])});
    }
    rf::write_csv(out, {"t", "Lnorm"}, rows);
    if (cfg.snapshot_every > 0 && !trace.snapshots.empty()) {
        std::filesystem::create_directories(cfg.output_dir);
        for (std::size_t i = 0; i < trace.snapshots.size(); ++i) {
            char name[32];
            std::snprintf(name, sizeof(name), "_%04zu.vtk", i);
            const std::string path = cfg.output_dir + "/" + cfg.output_prefix + name;
            rf::write_vtk(p.mesh, p.sys.dofs, trace.snapshots[i].coeffs,
                          trace.snapshots[i].time, path);
        }
        std::cout << "snapshots=" << trace.snapshots.size() << "\n";
    }
    std::cout << "steps=" << trace.times.size() - 1 << "\n"
              << "final_Lnorm=" << rf::format_float(trace.l_norms.back()) << "\n";
    return 0;
}

int run_analyze(const rf::RunConfig& cfg, const std::string& out) {
    const Pipeline p = build_pipeline(cfg);
    rf::EigenOptions eopts;
    eopts.k = cfg.k;
    eopts.tol = cfg.tol;
    eopts.seed = cfg.seed;
    const rf::Spectrum spec = rf::smallest_eigenpairs(p.sys, eopts);
    const rf::EfficiencyReport rep =
        rf::efficiency_report(p.mesh, p.net, cfg.params, spec, cfg.band);
    const std::vector<std::string> header = {
        "lambda1", "gamma1", "ratio",  "classification", "chain_ok", "band",   "c_p",
        "c_t",     "lambda_K", "alpha", "c0",            "c_coer",   "mesh_h", "road_id"};
    const rf::ConstantsReport& c = rep.constants;
    const std::vector<std::string> row = {
        rf::format_float(rep.lambda1), rf::format_float(rep.gamma1), rf::format_float(rep.ratio),
        rf::to_string(rep.classification), rep.chain_ok ? "true" : "false",
        rf::format_float(rep.band), rf::format_float(c.c_p), rf::format_float(c.c_t),
        rf::format_float(c.lambda_K), rf::format_float(c.alpha), rf::format_float(c.c0),
        rf::format_float(c.c_coer), rf::format_float(c.mesh_h), rep.road_id};
    rf::write_csv(out, header, {row});
    std::cout << "lambda1=" << rf::format_float(rep.lambda1) << "\n"
              << "gamma1=" << rf::format_float(rep.gamma1) << "\n"
              << "ratio=" << rf::format_float(rep.ratio) << "\n"
              << "classification=" << rf::to_string(rep.classification) << "\n";
    return 0;
}

int run_optimize(const std::string& spec_path, const std::string& out,
                 const std::string& emit_best, int threads) {
    const rf::RoadFamilySpec spec = rf::load_family_spec(spec_path);
    const rf::SearchResult result = rf::run_search(spec, threads);
    std::vector<std::vector<std::string>> rows;
    for (const auto& ev : result.ranked) {
        rows.push_back({std::to_string(ev.candidate.id),
                        join_params(ev.candidate.parameters, ev.candidate.label),
                        rf::format_float(ev.length), rf::format_float(ev.lambda1),
                        rf::format_float(ev.gamma1), rf::format_float(ev.ratio),
                        rf::to_string(ev.classification)});
    }
    rf::write_csv(out,
                  {"id", "parameters", "length", "lambda1", "gamma1", "ratio", "classification"},
                  rows);
    if (!emit_best.empty()) rf::write_network(result.best().candidate.net, emit_best);
    std::cout << "evaluations=" << result.evaluations << "\n"
              << "cache_hits=" << result.gamma_cache_hits << "\n"
              << "feasible=" << result.ranked.size() << "\n"
              << "rejections=" << result.rejections.size() << "\n";
    const auto& best = result.best();
    std::cout << "best_id=" << best.candidate.id << "\n"
              << "best_label=" << best.candidate.label << "\n"
              << "best_ratio=" << rf::format_float(best.ratio) << "\n";
    for (const auto& note : result.notes) std::cout << "note=" << note << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coupled field-road diffusion: meshes, spectra, evolution, road efficiency"};
    // --h is a spec-mandated option name, so help lives on --help alone.
    app.set_help_flag("--help", "Print help and exit");
    app.require_subcommand(1);
    int threads_flag = 0;
    app.add_option("--threads", threads_flag,
                   "Cap for parallel worker pools (env ROADFIELD_THREADS; default 1)");

    // net-stats
    auto* cmd_stats = app.add_subcommand("net-stats", "Validate a network file, print key=value stats");
    cmd_stats->set_help_flag("--help", "Print help and exit");
    cmd_stats->fallthrough();
    std::string stats_file;
    cmd_stats->add_option("file", stats_file, "network file")->required();

    // mesh
    auto* cmd_mesh = app.add_subcommand("mesh", "Triangulate a domain with an embedded road");
    cmd_mesh->set_help_flag("--help", "Print help and exit");
    cmd_mesh->fallthrough();
    std::string mesh_domain, mesh_net, mesh_out;
    double mesh_h = 0.0625;
    double mesh_min_angle = 20.0;
    cmd_mesh->add_option("--domain", mesh_domain, "domain polygon file")->required();
    cmd_mesh->add_option("--net", mesh_net, "network file")->required();
    cmd_mesh->add_option("--h", mesh_h, "target edge length")->required();
    cmd_mesh->add_option("--min-angle", mesh_min_angle, "quality threshold in degrees");
    cmd_mesh->add_option("-o,--output", mesh_out, "mesh output file")->required();

    // eigs
    auto* cmd_eigs = app.add_subcommand("eigs", "Smallest eigenpairs of the coupled form");
    cmd_eigs->set_help_flag("--help", "Print help and exit");
    cmd_eigs->fallthrough();
    std::string eigs_config, eigs_out = "spectrum.csv", eigs_dump_b, eigs_dump_l;
    int eigs_k = -1;
    double eigs_tol = -1.0, eigs_h = -1.0;
    cmd_eigs->add_option("--system", eigs_config, "run config file")->required();
    cmd_eigs->add_option("-k", eigs_k, "number of eigenpairs (overrides eigen.k)");
    cmd_eigs->add_option("--tol", eigs_tol, "residual tolerance (overrides eigen.tol)");
    cmd_eigs->add_option("--h", eigs_h, "mesh size (overrides mesh.h)");
    cmd_eigs->add_option("-o,--output", eigs_out, "spectrum CSV path");
    cmd_eigs->add_option("--dump-matrix", eigs_dump_b, "write B in coordinate format");
    cmd_eigs->add_option("--dump-mass", eigs_dump_l, "write Lmass in coordinate format");

    // evolve
    auto* cmd_evolve = app.add_subcommand("evolve", "Backward Euler evolution, L-norm trace");
    cmd_evolve->set_help_flag("--help", "Print help and exit");
    cmd_evolve->fallthrough();
    std::string evolve_config, evolve_out = "trace.csv", evolve_initial;
    double evolve_dt = -1.0, evolve_T = -1.0, evolve_h = -1.0;
    int evolve_vtk_every = -1;
    cmd_evolve->add_option("--config", evolve_config, "run config file")->required();
    cmd_evolve->add_option("--dt", evolve_dt, "time step (overrides evolve.dt)");
    cmd_evolve->add_option("-T", evolve_T, "final time (overrides evolve.T)");
    cmd_evolve->add_option("--h", evolve_h, "mesh size (overrides mesh.h)");
    cmd_evolve->add_option("--vtk-every", evolve_vtk_every,
                           "snapshot stride (overrides evolve.snapshot_every)");
    cmd_evolve->add_option("--initial", evolve_initial,
                           "'bump' or 'file <path>' (overrides evolve.initial)");
    cmd_evolve->add_option("-o,--output", evolve_out, "trace CSV path");

    // analyze
    auto* cmd_analyze = app.add_subcommand("analyze", "Constants, bounds, efficiency ratio");
    cmd_analyze->set_help_flag("--help", "Print help and exit");
    cmd_analyze->fallthrough();
    std::string analyze_config, analyze_out = "report.csv";
    int analyze_k = -1;
    double analyze_tol = -1.0, analyze_h = -1.0, analyze_band = -1.0;
    cmd_analyze->add_option("--config", analyze_config, "run config file")->required();
    cmd_analyze->add_option("-k", analyze_k, "number of eigenpairs (overrides eigen.k)");
    cmd_analyze->add_option("--tol", analyze_tol, "residual tolerance (overrides eigen.tol)");
    cmd_analyze->add_option("--h", analyze_h, "mesh size (overrides mesh.h)");
    cmd_analyze->add_option("--band", analyze_band, "neutrality band (overrides params.band)");
    cmd_analyze->add_option("-o,--output", analyze_out, "report CSV path");

    // optimize
    auto* cmd_opt = app.add_subcommand("optimize", "Search a road family for the best ratio");
    cmd_opt->set_help_flag("--help", "Print help and exit");
    cmd_opt->fallthrough();
    std::string opt_spec, opt_out = "results.csv", opt_emit;
    cmd_opt->add_option("--spec", opt_spec, "search spec file")->required();
    cmd_opt->add_option("-o,--output", opt_out, "results CSV path");
    cmd_opt->add_option("--emit-best", opt_emit, "write the best road as a network file");

    CLI11_PARSE(app, argc, argv);
    const int threads = resolve_threads(threads_flag);

    std::string active = "cli";
    try {
        if (app.got_subcommand(cmd_stats)) {
            active = "net-stats";
            return run_net_stats(stats_file);
        }
        if (app.got_subcommand(cmd_mesh)) {
            active = "mesh";
            return run_mesh(mesh_domain, mesh_net, mesh_h, mesh_min_angle, mesh_out);
        }
        if (app.got_subcommand(cmd_eigs)) {
            active = "eigs";
            rf::RunConfig cfg = rf::load_config(eigs_config);
            if (eigs_k > 0) cfg.k = eigs_k;
            if (eigs_tol > 0) cfg.tol = eigs_tol;
            if (eigs_h > 0) cfg.h = eigs_h;
            return run_eigs(cfg, eigs_out, eigs_dump_b, eigs_dump_l);
        }
        if (app.got_subcommand(cmd_evolve)) {
            active = "evolve";
            rf::RunConfig cfg = rf::load_config(evolve_config);
            if (evolve_dt > 0) cfg.dt = evolve_dt;
            if (evolve_T > 0) cfg.t_end = evolve_T;
            if (evolve_h > 0) cfg.h = evolve_h;
            if (evolve_vtk_every >= 0) cfg.snapshot_every = evolve_vtk_every;
            if (!evolve_initial.empty()) cfg.initial = evolve_initial;
            return run_evolve(cfg, evolve_out);
        }
        if (app.got_subcommand(cmd_analyze)) {
            active = "analyze";
            rf::RunConfig cfg = rf::load_config(analyze_config);
            if (analyze_k > 0) cfg.k = analyze_k;
            if (analyze_tol > 0) cfg.tol = analyze_tol;
            if (analyze_h > 0) cfg.h = analyze_h;
            if (analyze_band >= 0) cfg.band = analyze_band;
            return run_analyze(cfg, analyze_out);
        }
        if (app.got_subcommand(cmd_opt)) {
            active = "optimize";
            return run_optimize(opt_spec, opt_out, opt_emit, threads);
        }
    } catch (const rf::Error& e) {
        std::cerr << "error module=" << e.module() << " op=" << e.op() << " msg=\"" << e.what()
                  << "\"\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error module=cli op=" << active << " msg=\"" << e.what() << "\"\n";
        return 1;
    }
    std::cerr << "error module=cli op=main msg=\"no subcommand\"\n";
    return 2;
}
