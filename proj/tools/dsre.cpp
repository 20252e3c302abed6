#include <CLI11.hpp>
#include <json.hpp>

#include "dsre/diag/diagnostics.hpp"
#include "dsre/io/io.hpp"
#include "dsre/models/build.hpp"
#include "dsre/vsrv/exceedance.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace fs = std::filesystem;
using namespace dsre;

namespace {

constexpr const char* kVersion = "dsre 0.1.0";

struct CommonOpts {
    int64_t length = 10000000;
    uint64_t seed = 1;
    int64_t burn_in = 10000;
    double quantile = 1.0 - 1e-5;
    int bins = 100;
    bool signed_angles = false;
    int workers = 1;
    int64_t chunk_size = 1 << 20;
    bool force = false;
    int window = 0;
    std::string outdir = "out";
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_figure_opts) {
    cmd->add_option("--length", o.length, "observations to simulate");
    cmd->add_option("--seed", o.seed, "base seed of the counter RNG");
    cmd->add_option("--burn-in", o.burn_in, "steps discarded from X_0 = 0");
    cmd->add_option("--workers", o.workers, "chunk-parallel worker threads");
    cmd->add_option("--chunk-size", o.chunk_size, "steps per deterministic chunk");
    cmd->add_flag("--force", o.force, "simulate even if the stationarity gate fails");
    cmd->add_option("--outdir", o.outdir, "output directory");
    if (with_figure_opts) {
        cmd->add_option("--quantile", o.quantile,
                        "radius quantile for exceedances (default 1 - 1e-5)");
        cmd->add_option("--bins", o.bins, "angular histogram bins");
        cmd->add_flag("--signed", o.signed_angles, "signed angles instead of absolute");
        cmd->add_option("--window", o.window, "forward window length per exceedance");
    }
}

TrajectoryStream make_stream(const DiagSREModel& model, const CommonOpts& o) {
    TrajectoryStream st;
    st.model = model;
    st.seed = o.seed;
    st.burn_in = o.burn_in;
    st.length = o.length;
    st.chunk_size = o.chunk_size;
    st.workers = o.workers;
    st.force = o.force;
    return st;
}

io::RunManifest make_manifest(const std::string& command, const std::string& config,
                              const DiagSREModel& model, const CommonOpts& o) {
    io::RunManifest m;
    m.command = command;
    m.config = config;
    m.model_hash = io::sha256_hex(model.describe());
    m.seed = o.seed;
    m.length = o.length;
    m.burn_in = o.burn_in;
    m.outdir = o.outdir;
    m.version = kVersion;
    return m;
}

size_t marginal_cap(int64_t length) {
    const auto quantile_cap =
        static_cast<size_t>(std::ceil(static_cast<double>(length) * 1e-4 * 1.25)) + 2;
    return std::max<size_t>(5001, quantile_cap);
}

size_t hill_k(int64_t length) {
    const auto k = static_cast<size_t>(2.0 * std::sqrt(static_cast<double>(length)));
    return std::min<size_t>(k, 5000);
}

int run_alpha(const std::string& config_path) {
    const auto cfg = io::parse_config(config_path);
    const auto bm = io::build_from_config(cfg);
    std::printf("coordinate       alpha        residual     E log|b+cM|\n");
    for (int i = 0; i < bm.model.d; ++i) {
        std::printf("%6d %15.9f %14.3e %14.9f\n", i + 1, bm.profile.alpha[i],
                    bm.profile.residual[i], bm.profile.log_moment[i]);
    }
    const auto rep = validate_assumptions(bm.model, bm.profile);
    std::printf("assumptions: A1=%s A2=%s A3=%s A4=%s A5=%s A6=%s\n", verdict_name(rep.a1),
                verdict_name(rep.a2), verdict_name(rep.a3), verdict_name(rep.a4),
                verdict_name(rep.a5), verdict_name(rep.a6));
    for (const auto& note : rep.notes) std::printf("  note: %s\n", note.c_str());
    return 0;
}

struct FigureOutputs {
    ExceedanceSet set;
    AngularHistogram hist;
    std::vector<JointCurvePoint> joint;
    std::vector<io::HillRow> hill;
    BlockMassReport blocks;
};

FigureOutputs run_figure_pipeline(const BuiltModel& bm, const CommonOpts& o) {
    const auto st = make_stream(bm.model, o);
    const auto target = static_cast<size_t>(
        std::ceil(static_cast<double>(o.length) * (1.0 - o.quantile)));
    ExceedanceCollector exc(bm.profile.alpha, target, o.window);
    MarginalTailSink marg(bm.model.d, marginal_cap(o.length));
    JointPairsSink joint(0, 1,
                         static_cast<size_t>(std::ceil(o.length * 0.0125)) + 2);
    std::vector<Sink*> sinks{&exc, &marg, &joint};
    simulate(st, sinks);

    FigureOutputs out;
    out.set = exc.finalize(o.length, o.quantile);
    out.hist = angular_histogram(out.set, o.bins, !o.signed_angles);
    const std::vector<double> grid{0.99, 0.999, 0.9999};
    out.joint = joint_exceedance_curve(joint, o.length, grid);
    const size_t k = hill_k(o.length);
    for (int i = 0; i < bm.model.d; ++i) {
        const auto top = marg.top_values(i);
        io::HillRow row;
        row.coord = i;
        row.k = std::min<size_t>(k, top.size() > 1 ? top.size() - 1 : 0);
        row.estimate = row.k > 0 ? hill_estimator(top, row.k) : 0.0;
        row.alpha_theory = bm.profile.alpha[i];
        out.hill.push_back(row);
    }
    out.blocks = block_mass(out.set, bm.model.blocks.blocks);
    return out;
}

int run_figures(int which, const CommonOpts& o) {
    const auto bm = figure_model(which);
    fs::create_directories(o.outdir);
    const std::string base = o.outdir + "/fig" + std::to_string(which);
    const auto manifest =
        make_manifest("figures " + std::to_string(which), "builtin:fig" + std::to_string(which),
                      bm.model, o);
    io::write_manifest(base + "_manifest.json", manifest);

    const auto out = run_figure_pipeline(bm, o);
    io::write_histogram_csv(base + "_hist.csv", out.hist);
    char title[128];
    std::snprintf(title, sizeof(title), "angular measure, figure %d (n=%lld, q=%g)", which,
                  static_cast<long long>(o.length), o.quantile);
    io::write_histogram_svg(base + "_hist.svg", out.hist, title);
    io::write_exceedances_csv(base + "_exceedances.csv", out.set);
    io::write_diagnostics_csv(base + "_diagnostics.csv", out.joint, out.hill, out.blocks);
    std::printf("figure %d: %zu exceedances above radius %.6g -> %s_*\n", which,
                out.set.records.size(), out.set.threshold, base.c_str());
    return 0;
}

int run_simulate(const std::string& config_path, const CommonOpts& o, bool dump,
                 bool want_exceedances, bool want_marginals) {
    const auto cfg = io::parse_config(config_path);
    auto bm = io::build_from_config(cfg);
    CommonOpts opts = o;
    // config supplies defaults; CLI flags already folded into `o`
    fs::create_directories(opts.outdir);
    const std::string base = opts.outdir + "/run";
    io::write_manifest(base + "_manifest.json",
                       make_manifest("simulate", config_path, bm.model, opts));

    const auto st = make_stream(bm.model, opts);
    std::vector<std::unique_ptr<Sink>> owned;
    std::vector<Sink*> sinks;
    ExceedanceCollector* exc = nullptr;
    MarginalTailSink* marg = nullptr;
    TrajectoryBufferSink* buf = nullptr;
    if (want_exceedances) {
        const auto target = static_cast<size_t>(
            std::ceil(static_cast<double>(opts.length) * (1.0 - opts.quantile)));
        owned.push_back(
            std::make_unique<ExceedanceCollector>(bm.profile.alpha, target, opts.window));
        exc = static_cast<ExceedanceCollector*>(owned.back().get());
        sinks.push_back(exc);
    }
    if (want_marginals) {
        owned.push_back(
            std::make_unique<MarginalTailSink>(bm.model.d, marginal_cap(opts.length)));
        marg = static_cast<MarginalTailSink*>(owned.back().get());
        sinks.push_back(marg);
    }
    if (dump) {
        owned.push_back(std::make_unique<TrajectoryBufferSink>(bm.model.d, opts.length));
        buf = static_cast<TrajectoryBufferSink*>(owned.back().get());
        sinks.push_back(buf);
    }
    simulate(st, sinks);

    if (exc != nullptr) {
        const auto set = exc->finalize(opts.length, opts.quantile);
        io::write_exceedances_csv(base + "_exceedances.csv", set);
    }
    if (marg != nullptr) {
        for (int i = 0; i < bm.model.d; ++i) {
            const auto top = marg->top_values(i);
            FILE* f = std::fopen(
                (base + "_marginal_" + std::to_string(i + 1) + ".csv").c_str(), "wb");
            if (f == nullptr) throw Error("cannot write marginal csv");
            std::fputs("rank,value\n", f);
            for (size_t r = 0; r < top.size(); ++r) {
                std::fprintf(f, "%zu,%.12g\n", r + 1, top[r]);
            }
            std::fclose(f);
        }
    }
    if (buf != nullptr) buf->write_file(base + "_trajectory.bin");
    std::printf("simulate: wrote outputs under %s\n", opts.outdir.c_str());
    return 0;
}

int run_diagnose(const std::string& config_path, const CommonOpts& o, int pair_i, int pair_j,
                 bool with_passage) {
    const auto cfg = io::parse_config(config_path);
    const auto bm = io::build_from_config(cfg);
    if (pair_i < 1 || pair_j < 1 || pair_i > bm.model.d || pair_j > bm.model.d ||
        pair_i == pair_j) {
        throw ConfigError("pair indices must be distinct coordinates in 1..d");
    }
    const int i = pair_i - 1, j = pair_j - 1;
    fs::create_directories(o.outdir);
    const std::string base = o.outdir + "/diagnose";
    io::write_manifest(base + "_manifest.json",
                       make_manifest("diagnose", config_path, bm.model, o));

    const auto st = make_stream(bm.model, o);
    JointPairsSink joint(i, j, static_cast<size_t>(std::ceil(o.length * 0.0125)) + 2);
    std::vector<Sink*> sinks{&joint};
    simulate(st, sinks);
    const std::vector<double> grid{0.99, 0.999, 0.9999};
    const auto curve = joint_exceedance_curve(joint, o.length, grid);

    // tilt coordinate: the lighter tail (larger alpha) of the pair
    const int t1 = bm.profile.alpha[i] >= bm.profile.alpha[j] ? i : j;
    const int tj = t1 == i ? j : i;
    const auto drift = tilted_drift(bm.model.factors[t1], bm.model.factors[tj],
                                    bm.profile.alpha[t1], bm.profile.alpha[tj], 50000, o.seed);
    const auto stat = stationarity_check(bm.model);
    const auto assumptions = validate_assumptions(bm.model, bm.profile);

    nlohmann::ordered_json rep;
    rep["model_hash"] = io::sha256_hex(bm.model.describe());
    rep["alpha"] = bm.profile.alpha;
    rep["pair"] = {pair_i, pair_j};
    rep["tilt_coordinate"] = t1 + 1;
    rep["tilted_drift"] = {{"mu_1_given_1", drift.mu_1_given_1},
                           {"mu_j_given_1", drift.mu_j_given_1},
                           {"jensen_gap", drift.jensen_gap},
                           {"mc_gap", drift.mc_gap},
                           {"ci_halfwidth", drift.ci_halfwidth}};
    rep["stationarity"] = nlohmann::ordered_json::array();
    for (const auto& row : stat.rows) {
        nlohmann::ordered_json r{{"log_moment", row.log_moment}, {"pass", row.pass}};
        if (row.has_closed_form) {
            r["c_squared"] = row.c_squared;
            r["bound_2egamma"] = row.bound;
            r["pass_closed_form"] = row.pass_closed_form;
            r["criteria_agree"] = row.criteria_agree;
        }
        rep["stationarity"].push_back(r);
    }
    rep["assumptions"] = {{"A1", verdict_name(assumptions.a1)},
                          {"A2", verdict_name(assumptions.a2)},
                          {"A3", verdict_name(assumptions.a3)},
                          {"A4", verdict_name(assumptions.a4)},
                          {"A5", verdict_name(assumptions.a5)},
                          {"A6", verdict_name(assumptions.a6)}};
    rep["joint_curve"] = nlohmann::ordered_json::array();
    for (const auto& pt : curve) {
        rep["joint_curve"].push_back({{"quantile", pt.quantile},
                                      {"u", pt.u},
                                      {"joint_scaled", pt.joint_scaled},
                                      {"conditional", pt.conditional},
                                      {"count_joint", pt.count_joint},
                                      {"count_i", pt.count_i},
                                      {"count_j", pt.count_j}});
    }
    if (with_passage) {
        rep["first_passage"] = nlohmann::ordered_json::array();
        for (const double u : {1e3, 1e4, 1e5}) {
            ScalarDist qm = ScalarDist::point_mass(1.0);
            if (const auto* g = std::get_if<GaussianVector>(&bm.model.q_law)) {
                qm = ScalarDist::standard_normal();
                (void)g;
            } else if (const auto* cq = std::get_if<ConstantVector>(&bm.model.q_law)) {
                qm = ScalarDist::point_mass(cq->q[t1]);
            }
            const auto fp = first_passage(bm.model.factors[t1], bm.profile.alpha[t1], qm, u,
                                          10000, 2.0, o.seed + 17);
            rep["first_passage"].push_back({{"u", u},
                                            {"typical", fp.typical},
                                            {"f_u", fp.f_u},
                                            {"violation_rate", fp.window_violation_rate}});
        }
    }

    std::ofstream jf(base + "_report.json");
    jf << rep.dump(2) << "\n";

    io::write_diagnostics_csv(base + "_curve.csv", curve, {}, BlockMassReport{});
    std::printf("diagnose: jensen_gap = %.6f (CI +-%.6f), conditional at q=0.9999: %.5f\n",
                drift.jensen_gap, drift.ci_halfwidth, curve.back().conditional);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"diagonal SRE simulation and extreme-value diagnostics"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    std::string config_path;
    CommonOpts opts;
    int figure_no = 1;
    bool dump = false, want_exc = false, want_marg = false, with_passage = false;
    int pair_i = 1, pair_j = 2;

    auto* alpha_cmd = app.add_subcommand("alpha", "solve the tail indices of a model config");
    alpha_cmd->add_option("config", config_path, "model config file")->required();

    auto* sim_cmd = app.add_subcommand("simulate", "run the engine with selected sinks");
    sim_cmd->add_option("config", config_path, "model config file")->required();
    add_common(sim_cmd, opts, true);
    sim_cmd->add_flag("--dump", dump, "write the raw trajectory (small lengths)");
    sim_cmd->add_flag("--exceedances", want_exc, "collect radius exceedances");
    sim_cmd->add_flag("--marginals", want_marg, "collect marginal top order statistics");

    auto* diag_cmd = app.add_subcommand("diagnose", "joint-tail diagnostics for a pair");
    diag_cmd->add_option("config", config_path, "model config file")->required();
    add_common(diag_cmd, opts, false);
    diag_cmd->add_option("--pair-i", pair_i, "first coordinate (1-based)");
    diag_cmd->add_option("--pair-j", pair_j, "second coordinate (1-based)");
    diag_cmd->add_flag("--first-passage", with_passage, "run the first-passage experiment");

    auto* fig_cmd = app.add_subcommand("figures", "reproduce a simulation-study figure");
    fig_cmd->add_option("which", figure_no, "figure index 1..6")->required();
    add_common(fig_cmd, opts, true);

    CLI11_PARSE(app, argc, argv);

    try {
        if (alpha_cmd->parsed()) return run_alpha(config_path);
        if (sim_cmd->parsed()) {
            return run_simulate(config_path, opts, dump, want_exc, want_marg);
        }
        if (diag_cmd->parsed()) {
            return run_diagnose(config_path, opts, pair_i, pair_j, with_passage);
        }
        if (fig_cmd->parsed()) return run_figures(figure_no, opts);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 3;
    } catch (const StationarityViolated& e) {
        std::fprintf(stderr, "model invalid: %s\n", e.what());
        return 2;
    } catch (const CaseOrderingViolated& e) {
        std::fprintf(stderr, "model invalid: %s\n", e.what());
        return 2;
    } catch (const NoRootInRange& e) {
        std::fprintf(stderr, "model invalid: %s\n", e.what());
        return 2;
    } catch (const InsufficientExceedances& e) {
        std::fprintf(stderr, "insufficient data: %s (increase --length, 1e7 or more)\n",
                     e.what());
        return 4;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
