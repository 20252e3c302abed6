#pragma once

#include "dsre/engine/sinks.hpp"
#include "dsre/vsrv/norms.hpp"

#include <span>

namespace dsre {

struct ExceedanceRecord {
    int64_t t = 0;
    double radius = 0.0;              // ||X_t||_alpha
    std::vector<double> spectral;     // ||X_t||_alpha^{-1/alpha} X_t
    std::vector<double> window;       // (h+1)*d: scaled X_{t+s}, s-major, s=0..h
};

struct ExceedanceSet {
    int d = 0;
    int window_h = 0;
    std::vector<double> alpha;
    double threshold = 0.0;  // largest excluded radius
    double quantile = 0.0;
    int64_t stream_length = 0;
    std::vector<ExceedanceRecord> records; // (radius desc, time asc)
};

// Single-pass top-K selection by radius with 25% slack over the target
// count; ties broken by earlier time. Forward windows are completed from
// subsequent blocks (the engine supplies `window_h` lookahead steps).
class ExceedanceCollector : public Sink {
public:
    ExceedanceCollector(std::vector<double> alpha, size_t target_count, int window_h);

    void consume(const StateBlock& block) override;
    void merge(Sink& other) override;
    std::unique_ptr<Sink> clone_empty() const override;
    int lookahead() const override { return window_h_; }

    size_t target_count() const { return target_; }

    // Sorts, picks the top target_count records, sets the threshold to the
    // largest excluded radius. Throws InsufficientExceedances if fewer than
    // min_records survive.
    ExceedanceSet finalize(int64_t stream_length, double quantile,
                           size_t min_records = 50) const;

private:
    struct Rec {
        int64_t t = 0;
        double radius = 0.0;
        std::vector<double> spectral;
        std::vector<double> window;
        std::vector<double> scales;
        int filled = 0; // window steps s < filled are complete
    };
    static bool better(const Rec& a, const Rec& b) {
        if (a.radius != b.radius) return a.radius > b.radius;
        return a.t < b.t;
    }

    void offer(Rec&& r);
    void fill_windows(const StateBlock& block);

    std::vector<double> alpha_;
    size_t target_;
    size_t cap_;
    int window_h_;
    std::vector<Rec> recs_;        // slot arena
    std::vector<uint32_t> heap_;   // indices, worst on top
    std::vector<uint32_t> free_;   // reusable slots
    std::vector<uint32_t> pending_;
    std::vector<uint32_t> idxbuf_;
    std::vector<uint8_t> mask_;
};

// Convenience wrapper: one simulation pass with a single collector.
ExceedanceSet collect_exceedances(const TrajectoryStream& stream,
                                  std::span<const double> alpha,
                                  double target_quantile, int window_h);

struct AngularHistogram {
    int bins = 0;
    double lo = 0.0, hi = 0.0;
    std::vector<double> edges; // bins+1, strictly increasing
    std::vector<double> mass;  // sums to 1
    size_t n_exceedances = 0;
};

// Per-record angle: arctan(|th_1|/|th_2|) on [0, pi/2] when absolute, else
// arctan(th_1/th_2) on [-pi/2, pi/2]. th_2 = 0 maps to (sign) pi/2.
std::vector<double> record_angles(const ExceedanceSet& set, bool absolute);

AngularHistogram angular_histogram(const ExceedanceSet& set, int bins, bool absolute);

struct BlockMassReport {
    std::vector<double> mass;     // per-block fraction of records
    std::vector<int64_t> counts;
    double leakage = 0.0;         // mean over records of max off-block |theta_i|
};

BlockMassReport block_mass(const ExceedanceSet& set,
                           const std::vector<std::vector<int>>& blocks);

// Empirical sample of the lag-t spectral tail process from the windows.
std::vector<std::vector<double>> empirical_tail_process(const ExceedanceSet& set, int lag);

struct WeightedAngularSample {
    std::vector<std::vector<double>> directions;
    std::vector<double> weights; // normalized to sum 1
};

// Non-standard angular transform: record theta maps to the direction of
// a^{-1} theta^alpha with importance weight ||a^{-1} theta^alpha||.
WeightedAngularSample nonstandard_angular(const ExceedanceSet& set,
                                          std::span<const double> a_hat,
                                          std::span<const double> alpha);

} // namespace dsre
