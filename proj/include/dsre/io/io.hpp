#pragma once

#include "dsre/diag/diagnostics.hpp"
#include "dsre/models/build.hpp"
#include "dsre/vsrv/exceedance.hpp"

#include <string>
#include <vector>

namespace dsre::io {

// --- hashing ---------------------------------------------------------------
std::string sha256_hex(std::string_view bytes);
std::string sha256_file_hex(const std::string& path);

// --- CSV -------------------------------------------------------------------
// exceedances: time_index, radius, spectral_1..d, then w{s}_{i} window columns
void write_exceedances_csv(const std::string& path, const ExceedanceSet& set);
// histogram: bin_left, bin_right, mass
void write_histogram_csv(const std::string& path, const AngularHistogram& hist);

struct HillRow {
    int coord = 0;
    size_t k = 0;
    double estimate = 0.0;
    double alpha_theory = 0.0;
};

// one file, record-type tagged rows: joint curve, hill estimates, block masses
void write_diagnostics_csv(const std::string& path,
                           const std::vector<JointCurvePoint>& joint,
                           const std::vector<HillRow>& hill,
                           const BlockMassReport& blocks);

// --- SVG -------------------------------------------------------------------
void write_histogram_svg(const std::string& path, const AngularHistogram& hist,
                         const std::string& title);

// --- run manifest ----------------------------------------------------------
struct RunManifest {
    std::string command;
    std::string config = "";   // path or "builtin:figN"
    std::string model_hash;    // sha256 of the canonical model description
    uint64_t seed = 0;
    int64_t length = 0;
    int64_t burn_in = 0;
    std::string outdir;
    std::string version;
};

// written before any output file so a rerun can be checked byte-for-byte
void write_manifest(const std::string& path, const RunManifest& m);

// --- model config files ------------------------------------------------------
// Flat key=value text with [model] / [bekk] / [ccc] sections, parsed
// strictly: unknown sections or keys are errors, missing keys are named.
struct RunConfig {
    int d = 0;
    uint64_t seed = 1;
    int64_t length = 1000000;
    int64_t burn_in = 10000;
    std::string kind; // "bekk", "ccc", "ccc_general", "generic"
    std::vector<double> b, c, a, sigma;
    std::string m_dist; // generic: normal | chisq1 | pointmass:<v>
    std::string q_law;  // generic: gaussian | constant
};

RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text);
BuiltModel build_from_config(const RunConfig& cfg);

} // namespace dsre::io
