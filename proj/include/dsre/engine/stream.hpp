#pragma once

#include "dsre/engine/model.hpp"
#include "dsre/rng.hpp"

#include <memory>
#include <span>
#include <vector>

namespace dsre {

// A contiguous run of simulated states handed to sinks. coords[i][k] is
// X_{t0+k, i}. Blocks arrive in time order within a chunk; emit=false marks
// lookahead states generated only so forward windows can complete.
struct StateBlock {
    int64_t t0 = 0;
    size_t n = 0;
    int d = 0;
    const double* const* coords = nullptr;
    bool emit = true;
};

// Online consumer with associative merge. merge() is always called in chunk
// order (this instance holds chunks [0,k), other holds chunk k).
class Sink {
public:
    virtual ~Sink() = default;
    virtual void consume(const StateBlock& block) = 0;
    virtual void merge(Sink& other) = 0;
    virtual std::unique_ptr<Sink> clone_empty() const = 0;
    virtual int lookahead() const { return 0; }
};

struct TrajectoryStream {
    DiagSREModel model;
    uint64_t seed = 1;
    int64_t burn_in = 10000;
    int64_t length = 0;
    int64_t chunk_size = 1 << 20;
    int workers = 1;
    bool force = false;          // simulate despite a failing stationarity gate
    int64_t warmup_override = 0; // 0 = derive from the model's contraction rate
};

// One transition: ((b_i + c_i m) x_i + q_i)_i.
std::vector<double> step(std::span<const double> x, double m, std::span<const double> q,
                         const DiagSREModel& model);

// Warm-up steps W replayed at each chunk boundary so the zero initial state
// is forgotten: (sup_i E log|b_i+c_i M|) * W < -80 log 10, floor 1024.
int64_t coupling_warmup(const DiagSREModel& model);

// Runs burn_in steps from X_0 = 0, then feeds `length` observations to every
// sink. Chunk k >= 1 replays W warm-up steps from the all-zero state; all
// draws are keyed by (seed, stream, absolute step), so the emitted sequence
// is bit-identical for any chunk_size and worker count.
void simulate(const TrajectoryStream& stream, const std::vector<Sink*>& sinks);

// One draw of the n-term backward series sum_{k=1..n} prod_{l<k}(b+cM_l) Q_k
// per coordinate; a direct sampler of the stationary law when n is large.
std::vector<double> backward_partial_sums(const DiagSREModel& model, int n,
                                          CounterStream& stream);

// One Q_t draw (uses the stream's slot budget; d values written to out).
void sample_q(const QLaw& q_law, int d, CounterStream& stream, double* out);

} // namespace dsre
