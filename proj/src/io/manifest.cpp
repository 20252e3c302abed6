#include "dsre/io/io.hpp"

#include <json.hpp>

#include <fstream>

namespace dsre::io {

void write_manifest(const std::string& path, const RunManifest& m) {
    nlohmann::ordered_json j;
    j["command"] = m.command;
    j["config"] = m.config;
    j["model_hash"] = m.model_hash;
    j["seed"] = m.seed;
    j["length"] = m.length;
    j["burn_in"] = m.burn_in;
    j["outdir"] = m.outdir;
    j["version"] = m.version;
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path);
    out << j.dump(2) << "\n";
}

} // namespace dsre::io
