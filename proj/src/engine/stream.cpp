#include "dsre/engine/stream.hpp"

#include "dsre/simd/kernels.hpp"
#include "dsre/tail/solver.hpp"

#include <algorithm>
#include <cmath>
#include <condition_variable>
#include <map>
#include <mutex>
#include <thread>

namespace dsre {

namespace {

constexpr size_t kBlock = 4096;

struct Buffers {
    int d = 0;
    std::vector<double> za, zb;          // kernel normal pairs
    std::vector<double> gsoa;            // innovation normals, SoA d x kBlock
    std::vector<double> mult;            // SoA d x kBlock: b_i + c_i m
    std::vector<double> q;               // SoA d x kBlock
    std::vector<double> x;               // SoA d x kBlock: states
    std::vector<const double*> rows;

    explicit Buffers(int dim) : d(dim) {
        za.resize(kBlock);
        zb.resize(kBlock);
        const int pairs = (dim + 1) / 2;
        gsoa.resize(static_cast<size_t>(2 * pairs) * kBlock);
        mult.resize(static_cast<size_t>(dim) * kBlock);
        q.resize(static_cast<size_t>(dim) * kBlock);
        x.resize(static_cast<size_t>(dim) * kBlock);
        rows.resize(dim);
        for (int i = 0; i < dim; ++i) rows[i] = x.data() + static_cast<size_t>(i) * kBlock;
    }
};

// Fill mult[i][t] = b_i + c_i * m_{s0+t} and q[i][t] for t in [0, nb).
void fill_block(const DiagSREModel& model, uint64_t seed, int64_t s0, size_t nb, Buffers& bf) {
    const auto& kn = simd::kernels();
    const int d = model.d;
    const auto tagM = static_cast<uint32_t>(simd::StreamTag::M);
    const auto tagQ = static_cast<uint32_t>(simd::StreamTag::Q);

    if (model.shared_m()) {
        const ScalarDist& m_law = model.m_law();
        switch (m_law.kind()) {
            case DistKind::StandardNormal:
                kn.normal_pairs(seed, tagM, 0, s0, nb, bf.za.data(), bf.zb.data());
                break;
            case DistKind::ChiSquare1:
                kn.normal_pairs(seed, tagM, 0, s0, nb, bf.za.data(), bf.zb.data());
                for (size_t t = 0; t < nb; ++t) bf.za[t] = bf.za[t] * bf.za[t];
                break;
            case DistKind::PointMass:
                std::fill_n(bf.za.data(), nb, m_law.point());
                break;
            case DistKind::TabulatedPositive:
                for (size_t t = 0; t < nb; ++t) {
                    CounterStream s(seed, tagM, s0 + static_cast<int64_t>(t));
                    bf.za[t] = m_law.sample(s);
                }
                break;
        }
        for (int i = 0; i < d; ++i) {
            const double b = model.factors[i].b, c = model.factors[i].c;
            double* row = bf.mult.data() + static_cast<size_t>(i) * kBlock;
            for (size_t t = 0; t < nb; ++t) row[t] = b + c * bf.za[t];
        }
    } else {
        const auto& cs = std::get<CorrelatedSquares>(model.innovation);
        const int pairs = (d + 1) / 2;
        for (int p = 0; p < pairs; ++p) {
            kn.normal_pairs(seed, tagM, static_cast<uint32_t>(p), s0, nb,
                            bf.gsoa.data() + static_cast<size_t>(2 * p) * kBlock,
                            bf.gsoa.data() + static_cast<size_t>(2 * p + 1) * kBlock);
        }
        for (int i = 0; i < d; ++i) {
            const double b = model.factors[i].b, c = model.factors[i].c;
            double* row = bf.mult.data() + static_cast<size_t>(i) * kBlock;
            for (size_t t = 0; t < nb; ++t) {
                double acc = 0.0;
                for (int k = 0; k <= i; ++k) {
                    acc += cs.chol[i * d + k] * bf.gsoa[static_cast<size_t>(k) * kBlock + t];
                }
                row[t] = b + c * (acc * acc);
            }
        }
    }

    if (const auto* g = std::get_if<GaussianVector>(&model.q_law)) {
        const int pairs = (d + 1) / 2;
        for (int p = 0; p < pairs; ++p) {
            kn.normal_pairs(seed, tagQ, static_cast<uint32_t>(p), s0, nb,
                            bf.gsoa.data() + static_cast<size_t>(2 * p) * kBlock,
                            bf.gsoa.data() + static_cast<size_t>(2 * p + 1) * kBlock);
        }
        for (int i = 0; i < d; ++i) {
            double* row = bf.q.data() + static_cast<size_t>(i) * kBlock;
            for (size_t t = 0; t < nb; ++t) {
                double acc = 0.0;
                for (int k = 0; k <= i; ++k) {
                    acc += g->chol[i * d + k] * bf.gsoa[static_cast<size_t>(k) * kBlock + t];
                }
                row[t] = acc;
            }
        }
    } else if (const auto* cq = std::get_if<ConstantVector>(&model.q_law)) {
        for (int i = 0; i < d; ++i) {
            std::fill_n(bf.q.data() + static_cast<size_t>(i) * kBlock, nb, cq->q[i]);
        }
    } else {
        const auto& im = std::get<IndependentMarginals>(model.q_law);
        for (size_t t = 0; t < nb; ++t) {
            CounterStream s(seed, tagQ, s0 + static_cast<int64_t>(t));
            for (int i = 0; i < d; ++i) {
                bf.q[static_cast<size_t>(i) * kBlock + t] = im.dists[i].sample(s);
            }
        }
    }
}

// Advance the state over [lo, hi); offer blocks to sinks when given.
void run_range(const DiagSREModel& model, uint64_t seed, int64_t lo, int64_t hi,
               std::vector<double>& state, Buffers& bf,
               const std::vector<Sink*>* sinks, bool emit) {
    const int d = model.d;
    for (int64_t s = lo; s < hi; s += static_cast<int64_t>(kBlock)) {
        const size_t nb = static_cast<size_t>(std::min<int64_t>(kBlock, hi - s));
        fill_block(model, seed, s, nb, bf);
        for (int i = 0; i < d; ++i) {
            double xi = state[i];
            const double* mrow = bf.mult.data() + static_cast<size_t>(i) * kBlock;
            const double* qrow = bf.q.data() + static_cast<size_t>(i) * kBlock;
            double* xrow = bf.x.data() + static_cast<size_t>(i) * kBlock;
            for (size_t t = 0; t < nb; ++t) {
                xi = mrow[t] * xi + qrow[t];
                xrow[t] = xi;
            }
            state[i] = xi;
        }
        if (sinks != nullptr) {
            StateBlock blk{s, nb, d, bf.rows.data(), emit};
            for (Sink* snk : *sinks) snk->consume(blk);
        }
    }
}

struct ChunkPlan {
    int64_t count = 0;
    int64_t size = 0;
    int lookahead = 0;
    int64_t warmup = 0;
};

void run_chunk(const DiagSREModel& model, const TrajectoryStream& st, const ChunkPlan& plan,
               int64_t k, const std::vector<Sink*>& sinks) {
    Buffers bf(model.d);
    std::vector<double> state(model.d, 0.0);
    const int64_t t_begin = k * plan.size;
    const int64_t t_end = std::min<int64_t>(st.length, (k + 1) * plan.size);
    const int64_t warm_start = (k == 0) ? -st.burn_in : t_begin - plan.warmup;
    run_range(model, st.seed, warm_start, t_begin, state, bf, nullptr, false);
    run_range(model, st.seed, t_begin, t_end, state, bf, &sinks, true);
    if (plan.lookahead > 0) {
        run_range(model, st.seed, t_end, t_end + plan.lookahead, state, bf, &sinks, false);
    }
}

} // namespace

int64_t coupling_warmup(const DiagSREModel& model) {
    double sup = -std::numeric_limits<double>::infinity();
    for (const auto& f : model.factors) sup = std::max(sup, log_moment(f));
    if (!(sup < -1e-6)) return 1 << 16; // forced non-stationary run; best effort
    const double w = 184.2068 / (-sup); // 80 log 10
    return std::clamp<int64_t>(static_cast<int64_t>(std::ceil(w)), 1024, 1 << 20);
}

void simulate(const TrajectoryStream& st, const std::vector<Sink*>& sinks) {
    const DiagSREModel& model = st.model;
    if (model.d <= 0 || model.factors.size() != static_cast<size_t>(model.d)) {
        throw ConfigError("model dimension mismatch");
    }
    if (!st.force) {
        for (int i = 0; i < model.d; ++i) {
            const double lm = log_moment(model.factors[i]);
            if (!(lm < 0.0)) {
                throw ConfigError("coordinate " + std::to_string(i) +
                                  " is non-stationary (E log|b+cM| = " + std::to_string(lm) +
                                  "); pass force to simulate anyway");
            }
        }
    }
    if (st.length <= 0) return;

    ChunkPlan plan;
    plan.size = std::max<int64_t>(st.chunk_size, 1);
    plan.count = (st.length + plan.size - 1) / plan.size;
    plan.warmup = st.warmup_override > 0 ? st.warmup_override : coupling_warmup(model);
    for (const Sink* s : sinks) plan.lookahead = std::max(plan.lookahead, s->lookahead());

    const int workers = std::max(1, st.workers);
    if (workers == 1 || plan.count == 1) {
        for (int64_t k = 0; k < plan.count; ++k) {
            if (k == 0) {
                run_chunk(model, st, plan, k, sinks);
            } else {
                std::vector<std::unique_ptr<Sink>> clones;
                std::vector<Sink*> raw;
                for (const Sink* s : sinks) {
                    clones.push_back(s->clone_empty());
                    raw.push_back(clones.back().get());
                }
                run_chunk(model, st, plan, k, raw);
                for (size_t i = 0; i < sinks.size(); ++i) sinks[i]->merge(*clones[i]);
            }
        }
        return;
    }

    // Parallel: workers pull chunk indices; the main thread merges results in
    // ascending chunk order with a bounded in-flight window.
    std::mutex mu;
    std::condition_variable cv;
    std::map<int64_t, std::vector<std::unique_ptr<Sink>>> done;
    int64_t next_claim = 0;
    int64_t next_merge = 0;
    const int64_t max_inflight = 2 * workers + 2;
    std::exception_ptr first_error;

    auto worker_fn = [&]() {
        for (;;) {
            int64_t k;
            {
                std::unique_lock lk(mu);
                cv.wait(lk, [&] {
                    return first_error != nullptr || next_claim >= plan.count ||
                           next_claim - next_merge < max_inflight;
                });
                if (first_error != nullptr || next_claim >= plan.count) return;
                k = next_claim++;
            }
            try {
                std::vector<std::unique_ptr<Sink>> clones;
                std::vector<Sink*> raw;
                for (const Sink* s : sinks) {
                    clones.push_back(s->clone_empty());
                    raw.push_back(clones.back().get());
                }
                run_chunk(model, st, plan, k, raw);
                {
                    std::lock_guard lk(mu);
                    done.emplace(k, std::move(clones));
                }
                cv.notify_all();
            } catch (...) {
                std::lock_guard lk(mu);
                if (!first_error) first_error = std::current_exception();
                cv.notify_all();
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker_fn);

    {
        std::unique_lock lk(mu);
        while (next_merge < plan.count && !first_error) {
            cv.wait(lk, [&] { return first_error != nullptr || done.count(next_merge) > 0; });
            if (first_error) break;
            auto clones = std::move(done[next_merge]);
            done.erase(next_merge);
            lk.unlock();
            for (size_t i = 0; i < sinks.size(); ++i) sinks[i]->merge(*clones[i]);
            lk.lock();
            ++next_merge;
            cv.notify_all();
        }
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

std::vector<double> step(std::span<const double> x, double m, std::span<const double> q,
                         const DiagSREModel& model) {
    if (static_cast<int>(x.size()) != model.d || static_cast<int>(q.size()) != model.d) {
        throw DimensionError("step: dimension mismatch");
    }
    std::vector<double> out(model.d);
    for (int i = 0; i < model.d; ++i) {
        out[i] = (model.factors[i].b + model.factors[i].c * m) * x[i] + q[i];
    }
    return out;
}

void sample_q(const QLaw& q_law, int d, CounterStream& stream, double* out) {
    if (const auto* g = std::get_if<GaussianVector>(&q_law)) {
        std::vector<double> z(d + 1);
        for (int p = 0; 2 * p < d; ++p) stream.next_normal_pair(&z[2 * p], &z[2 * p + 1]);
        for (int i = 0; i < d; ++i) {
            double acc = 0.0;
            for (int k = 0; k <= i; ++k) acc += g->chol[i * d + k] * z[k];
            out[i] = acc;
        }
    } else if (const auto* cq = std::get_if<ConstantVector>(&q_law)) {
        for (int i = 0; i < d; ++i) out[i] = cq->q[i];
    } else {
        const auto& im = std::get<IndependentMarginals>(q_law);
        for (int i = 0; i < d; ++i) out[i] = im.dists[i].sample(stream);
    }
}

std::vector<double> backward_partial_sums(const DiagSREModel& model, int n,
                                          CounterStream& stream) {
    const int d = model.d;
    std::vector<double> sum(d, 0.0);
    std::vector<double> prod(d, 1.0);
    std::vector<double> q(d, 0.0);
    for (int k = 1; k <= n; ++k) {
        sample_q(model.q_law, d, stream, q.data());
        for (int i = 0; i < d; ++i) sum[i] += prod[i] * q[i];
        const double m = model.m_law().sample(stream);
        for (int i = 0; i < d; ++i) prod[i] *= model.factors[i].b + model.factors[i].c * m;
    }
    return sum;
}

} // namespace dsre
