#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "liqrec/config.hpp"
#include "liqrec/io.hpp"
#include "liqrec/reconstructor.hpp"
#include "liqrec/simharness.hpp"
#include "liqrec/surface.hpp"

namespace fs = std::filesystem;
using namespace liqrec;

namespace {

bool verbose() {
    const char* v = std::getenv("LIQREC_VERBOSE");
    return v && *v && std::string(v) != "0";
}

void log_progress(const std::string& msg) {
    if (verbose()) std::cerr << msg << "\n";
}

int cmd_simulate(const std::string& scenario_path, const std::string& out_dir) {
    ScenarioSpec spec = load_scenario(scenario_path);
    spec.validate();
    fs::create_directories(out_dir);
    if (spec.frames == 0) {
        std::cerr << "warning: zero frames requested, nothing to simulate\n";
        return 0;
    }
    SimulationResult result = simulate(spec);
    save_sdf(result.sdf, out_dir + "/scene.sdf");
    save_cameras(spec.cameras, out_dir + "/cameras.txt");
    for (int f = 0; f < spec.frames; ++f) {
        save_particles(result.states[f], out_dir + "/" + particles_filename(f));
        for (std::size_t c = 0; c < spec.cameras.size(); ++c)
            save_mask(result.masks[f][c], out_dir + "/" + mask_filename(f, static_cast<int>(c)));
        log_progress("simulated frame " + std::to_string(f) + " n=" +
                     std::to_string(result.states[f].size()));
    }
    return 0;
}

int cmd_reconstruct(const std::string& config_path, bool resume) {
    RunConfig cfg = load_run_config(config_path);
    cfg.validate();
    fs::create_directories(cfg.out_dir);

    std::vector<PinholeCamera> cameras = load_cameras(cfg.cameras_file);
    VoxelSDF sdf = load_sdf(cfg.sdf_file);

    std::vector<std::vector<BinaryMask>> frames;
    for (int f = 0; f < cfg.frames; ++f) {
        std::vector<BinaryMask> per_view;
        for (std::size_t c = 0; c < cameras.size(); ++c)
            per_view.push_back(
                load_mask(cfg.masks_dir + "/" + mask_filename(f, static_cast<int>(c))));
        frames.push_back(std::move(per_view));
    }

    int start_frame = 0;
    ParticleState state;
    if (resume) {
        for (int f = cfg.frames - 1; f >= 0; --f) {
            std::string p = cfg.out_dir + "/" + particles_filename(f);
            if (fs::is_regular_file(p)) {
                state = load_particles(p);
                start_frame = f + 1;
                break;
            }
        }
    }
    if (start_frame == 0) {
        if (cfg.manual_seed) {
            state = seed_at_point(*cfg.manual_seed, cfg.params);
        } else {
            if (cameras.size() < 2)
                throw std::runtime_error(
                    "stereo seeding needs two cameras; set 'seed_point x y z' in the config "
                    "for single-view input");
            state = seed_initial(cameras[0], cameras[1], frames[0][0], frames[0][1], cfg.params);
        }
    }

    Reconstructor rec(sdf, cameras, cfg.params);
    if (cfg.source_enabled) {
        Vec3 src = cfg.manual_seed ? *cfg.manual_seed
                                   : triangulate_seed(cameras[0], cameras[1], frames[0][0],
                                                      frames[0][1]);
        rec.enable_source(src, cfg.source_initial_rate);
    }

    std::vector<FrameDiagnostics> diags;
    for (int f = start_frame; f < cfg.frames; ++f) {
        diags.push_back(rec.reconstruct_frame(state, frames[f]));
        save_particles(state, cfg.out_dir + "/" + particles_filename(f));
        log_progress("frame " + std::to_string(f) + " n=" + std::to_string(state.size()) +
                     " iou=" + std::to_string(diags.back().outer.empty()
                                                  ? 0.0
                                                  : diags.back().outer.back().iou));
    }
    write_diagnostics_csv(diags, cfg.out_dir + "/diagnostics.csv", cfg.source_enabled);
    return 0;
}

int cmd_evaluate(const std::string& gt_dir, const std::string& recon_dir,
                 const std::string& scenario_path, const std::string& out_path) {
    ScenarioSpec spec = load_scenario(scenario_path);

    auto count_frames = [](const std::string& dir) {
        int n = 0;
        while (fs::is_regular_file(dir + "/" + particles_filename(n))) ++n;
        return n;
    };
    int n_gt = count_frames(gt_dir);
    int n_rec = count_frames(recon_dir);
    if (n_gt == 0) throw std::runtime_error("no particle files in " + gt_dir);
    if (n_gt != n_rec)
        throw std::runtime_error("frame counts differ: " + std::to_string(n_gt) + " vs " +
                                 std::to_string(n_rec));

    std::vector<ParticleState> gt, rec;
    for (int f = 0; f < n_gt; ++f) {
        gt.push_back(load_particles(gt_dir + "/" + particles_filename(f)));
        rec.push_back(load_particles(recon_dir + "/" + particles_filename(f)));
    }
    std::vector<EvaluationRow> rows = evaluate(gt, rec, spec.grid, spec.params);

    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) throw std::runtime_error("cannot open for write: " + out_path);
        out = &file;
    }
    *out << "frame,iou3d,mean_abs_c_rho,n_gt,n_rec\n";
    out->precision(10);
    for (std::size_t f = 0; f < rows.size(); ++f)
        *out << f << "," << rows[f].iou3d << "," << rows[f].mean_abs_c_rho << ","
             << rows[f].n_gt << "," << rows[f].n_rec << "\n";
    return 0;
}

int cmd_export_surface(const std::string& particles_path, const std::string& out_path,
                       double h, double spacing, double lambda_g) {
    ParticleState state = load_particles(particles_path);
    HyperParams params;
    params.h = h;
    params.validate();
    if (spacing <= 0.0) spacing = h / 4.0;
    SurfaceCloud cloud = surface_points(state, params, spacing, lambda_g);
    if (cloud.points.empty())
        std::cerr << "warning: no surface points found\n";
    save_surface_cloud(cloud, out_path);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Particle-based liquid reconstruction from binary surface masks"};
    app.require_subcommand(1);

    std::string scenario_path, out_dir, config_path, gt_dir, recon_dir, out_path;
    std::string particles_path;
    bool resume = false;
    double h = 0.04, spacing = 0.0, lambda_g = 0.5;

    auto* sim = app.add_subcommand("simulate", "Generate a ground-truth scenario dataset");
    sim->add_option("scenario", scenario_path, "scenario file")->required();
    sim->add_option("out_dir", out_dir, "output directory")->required();

    auto* rec = app.add_subcommand("reconstruct", "Reconstruct a liquid from a mask sequence");
    rec->add_option("config", config_path, "run configuration file")->required();
    rec->add_flag("--resume", resume, "continue from the last completed frame");

    auto* eva = app.add_subcommand("evaluate", "Compare reconstruction against ground truth");
    eva->add_option("gt_dir", gt_dir, "ground-truth particle directory")->required();
    eva->add_option("recon_dir", recon_dir, "reconstruction particle directory")->required();
    eva->add_option("scenario", scenario_path, "scenario file providing grid and parameters")
        ->required();
    eva->add_option("-o,--out", out_path, "write the metrics table here instead of stdout");

    auto* exp = app.add_subcommand("export-surface", "Export an oriented surface point cloud");
    exp->add_option("particles", particles_path, "particle file")->required();
    exp->add_option("out", out_path, "output PLY path")->required();
    exp->add_option("--smoothing-radius", h, "interaction radius [m]")->capture_default_str();
    exp->add_option("--spacing", spacing, "grid spacing [m], default h/4");
    exp->add_option("--lambda-g", lambda_g, "gradient threshold")->capture_default_str();

    try {
        app.parse(argc, argv);
        if (*sim) return cmd_simulate(scenario_path, out_dir);
        if (*rec) return cmd_reconstruct(config_path, resume);
        if (*eva) return cmd_evaluate(gt_dir, recon_dir, scenario_path, out_path);
        if (*exp) return cmd_export_surface(particles_path, out_path, h, spacing, lambda_g);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const numeric_error& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
