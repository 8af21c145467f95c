#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "liqrec/simharness.hpp"
#include "liqrec/types.hpp"

namespace liqrec {

// Reconstruction run configuration (see the README for the file schema).
struct RunConfig {
    std::string masks_dir;
    std::string cameras_file;
    std::string sdf_file;
    std::string out_dir;
    int frames = 0;
    bool source_enabled = false;
    double source_initial_rate = 1.0;
    std::optional<Vec3> manual_seed; // bypasses stereo triangulation
    HyperParams params;

    void validate() const; // checks fields and referenced paths
};

// Key-value text files: one "key value..." entry per line, '#' comments.
RunConfig load_run_config(const std::string& path);
ScenarioSpec load_scenario(const std::string& path);

// shared helpers for the on-disk naming scheme
std::string mask_filename(int frame, int camera);
std::string particles_filename(int frame);

} // namespace liqrec
