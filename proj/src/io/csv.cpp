#include "dsre/io/io.hpp"

#include <cstdio>

namespace dsre::io {

namespace {

struct File {
    FILE* f;
    explicit File(const std::string& path) : f(std::fopen(path.c_str(), "wb")) {
        if (f == nullptr) throw Error("cannot open " + path);
    }
    ~File() { std::fclose(f); }
    void put(const char* s) { std::fputs(s, f); }
    void num(double v, bool lead_comma = true) {
        std::fprintf(f, lead_comma ? ",%.12g" : "%.12g", v);
    }
    void inum(long long v, bool lead_comma = true) {
        std::fprintf(f, lead_comma ? ",%lld" : "%lld", v);
    }
};

} // namespace

void write_exceedances_csv(const std::string& path, const ExceedanceSet& set) {
    File out(path);
    out.put("time_index,radius");
    for (int i = 0; i < set.d; ++i) std::fprintf(out.f, ",spectral_%d", i + 1);
    for (int s = 1; s <= set.window_h; ++s) {
        for (int i = 0; i < set.d; ++i) std::fprintf(out.f, ",w%d_%d", s, i + 1);
    }
    out.put("\n");
    for (const auto& r : set.records) {
        out.inum(static_cast<long long>(r.t), false);
        out.num(r.radius);
        for (int i = 0; i < set.d; ++i) out.num(r.spectral[i]);
        for (int s = 1; s <= set.window_h; ++s) {
            for (int i = 0; i < set.d; ++i) {
                out.num(r.window[static_cast<size_t>(s) * set.d + i]);
            }
        }
        out.put("\n");
    }
}

void write_histogram_csv(const std::string& path, const AngularHistogram& hist) {
    File out(path);
    out.put("bin_left,bin_right,mass\n");
    for (int k = 0; k < hist.bins; ++k) {
        out.num(hist.edges[k], false);
        out.num(hist.edges[k + 1]);
        out.num(hist.mass[k]);
        out.put("\n");
    }
}

void write_diagnostics_csv(const std::string& path,
                           const std::vector<JointCurvePoint>& joint,
                           const std::vector<HillRow>& hill,
                           const BlockMassReport& blocks) {
    File out(path);
    out.put("record,quantile,u,joint_scaled,conditional,count_joint,count_i,count_j\n");
    for (const auto& p : joint) {
        out.put("joint");
        out.num(p.quantile);
        out.num(p.u);
        out.num(p.joint_scaled);
        out.num(p.conditional);
        out.inum(p.count_joint);
        out.inum(p.count_i);
        out.inum(p.count_j);
        out.put("\n");
    }
    for (const auto& h : hill) {
        out.put("hill");
        out.inum(h.coord + 1);
        out.inum(static_cast<long long>(h.k));
        out.num(h.estimate);
        out.num(h.alpha_theory);
        out.put(",,,\n");
    }
    for (size_t l = 0; l < blocks.mass.size(); ++l) {
        out.put("block_mass");
        out.inum(static_cast<long long>(l + 1));
        out.num(blocks.mass[l]);
        out.inum(blocks.counts[l]);
        out.put(",,,,\n");
    }
    out.put("leakage");
    out.num(blocks.leakage);
    out.put(",,,,,,\n");
}

} // namespace dsre::io
