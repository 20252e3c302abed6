#include "dsre/vsrv/exceedance.hpp"

#include "dsre/simd/kernels.hpp"

#include <cmath>
#include <limits>

namespace dsre {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

ExceedanceCollector::ExceedanceCollector(std::vector<double> alpha, size_t target_count,
                                         int window_h)
    : alpha_(std::move(alpha)),
      target_(std::max<size_t>(target_count, 1)),
      cap_(static_cast<size_t>(std::ceil(static_cast<double>(target_) * 1.25)) + 1),
      window_h_(window_h) {}

void ExceedanceCollector::offer(Rec&& r) {
    auto heap_cmp = [this](uint32_t a, uint32_t b) { return better(recs_[a], recs_[b]); };
    if (heap_.size() >= cap_) {
        if (!better(r, recs_[heap_.front()])) return;
        std::pop_heap(heap_.begin(), heap_.end(), heap_cmp);
        const uint32_t victim = heap_.back();
        heap_.pop_back();
        std::erase(pending_, victim);
        free_.push_back(victim);
    }
    uint32_t slot;
    if (!free_.empty()) {
        slot = free_.back();
        free_.pop_back();
        recs_[slot] = std::move(r);
    } else {
        slot = static_cast<uint32_t>(recs_.size());
        recs_.push_back(std::move(r));
    }
    heap_.push_back(slot);
    std::push_heap(heap_.begin(), heap_.end(), heap_cmp);
    if (recs_[slot].filled <= window_h_) pending_.push_back(slot);
}

void ExceedanceCollector::consume(const StateBlock& block) {
    const int d = block.d;
    if (block.emit) {
        idxbuf_.resize(block.n);
        mask_.assign(block.n, 0);
        const bool full = heap_.size() >= cap_;
        const double rmin = full ? recs_[heap_.front()].radius : 0.0;
        for (int i = 0; i < d; ++i) {
            // per-coordinate trigger |x_i| > rmin^{1/alpha_i}; the margin
            // absorbs pow rounding, the exact radius re-check happens below
            const double tau =
                full ? std::pow(rmin, 1.0 / alpha_[i]) * (1.0 - 1e-12) : -kInf;
            const size_t m =
                simd::kernels().find_abs_above(block.coords[i], block.n, tau, idxbuf_.data());
            for (size_t k = 0; k < m; ++k) mask_[idxbuf_[k]] = 1;
        }
        std::vector<double> x(d);
        for (size_t off = 0; off < block.n; ++off) {
            if (mask_[off] == 0) continue;
            for (int i = 0; i < d; ++i) x[i] = block.coords[i][off];
            const double radius = vs_norm(x, alpha_);
            if (radius <= 0.0) continue;
            Rec r;
            r.t = block.t0 + static_cast<int64_t>(off);
            r.radius = radius;
            if (heap_.size() >= cap_ && !better(r, recs_[heap_.front()])) continue;
            r.spectral.resize(d);
            r.scales.resize(d);
            r.window.assign(static_cast<size_t>(window_h_ + 1) * d, 0.0);
            spectral_scales(x, alpha_, r.scales.data());
            for (int i = 0; i < d; ++i) {
                r.spectral[i] = x[i] * r.scales[i];
                r.window[i] = r.spectral[i];
            }
            r.filled = 1;
            offer(std::move(r));
        }
    }
    if (window_h_ > 0) fill_windows(block);
}

void ExceedanceCollector::fill_windows(const StateBlock& block) {
    const int d = block.d;
    for (auto it = pending_.begin(); it != pending_.end();) {
        Rec& r = recs_[*it];
        while (r.filled <= window_h_) {
            const int64_t want = r.t + r.filled;
            if (want < block.t0 || want >= block.t0 + static_cast<int64_t>(block.n)) break;
            const size_t off = static_cast<size_t>(want - block.t0);
            for (int i = 0; i < d; ++i) {
                r.window[static_cast<size_t>(r.filled) * d + i] =
                    block.coords[i][off] * r.scales[i];
            }
            ++r.filled;
        }
        if (r.filled > window_h_) {
            it = pending_.erase(it);
        } else {
            ++it;
        }
    }
}

void ExceedanceCollector::merge(Sink& other) {
    auto& o = dynamic_cast<ExceedanceCollector&>(other);
    if (!o.pending_.empty()) {
        throw Error("exceedance merge with incomplete windows (missing lookahead)");
    }
    for (const uint32_t slot : o.heap_) offer(std::move(o.recs_[slot]));
    o.heap_.clear();
    o.recs_.clear();
    o.free_.clear();
}

std::unique_ptr<Sink> ExceedanceCollector::clone_empty() const {
    return std::make_unique<ExceedanceCollector>(alpha_, target_, window_h_);
}

ExceedanceSet ExceedanceCollector::finalize(int64_t stream_length, double quantile,
                                            size_t min_records) const {
    std::vector<const Rec*> sorted;
    sorted.reserve(heap_.size());
    for (const uint32_t slot : heap_) sorted.push_back(&recs_[slot]);
    std::sort(sorted.begin(), sorted.end(),
              [](const Rec* a, const Rec* b) { return better(*a, *b); });

    const size_t keep = std::min<size_t>(target_, sorted.size());
    if (keep < min_records) {
        throw InsufficientExceedances("only " + std::to_string(keep) +
                                      " exceedances collected; need " +
                                      std::to_string(min_records));
    }
    ExceedanceSet set;
    set.d = static_cast<int>(alpha_.size());
    set.window_h = window_h_;
    set.alpha = alpha_;
    set.quantile = quantile;
    set.stream_length = stream_length;
    set.threshold = sorted.size() > keep ? sorted[keep]->radius
                    : keep > 0          ? sorted[keep - 1]->radius
                                        : 0.0;
    for (size_t k = 0; k < keep; ++k) {
        const Rec& r = *sorted[k];
        if (r.filled <= window_h_) throw Error("record window incomplete at finalize");
        set.records.push_back({r.t, r.radius, r.spectral, r.window});
    }
    return set;
}

ExceedanceSet collect_exceedances(const TrajectoryStream& stream,
                                  std::span<const double> alpha, double target_quantile,
                                  int window_h) {
    if (!(target_quantile > 0.0 && target_quantile < 1.0)) {
        throw ConfigError("target quantile must be in (0,1)");
    }
    const auto target = static_cast<size_t>(
        std::ceil(static_cast<double>(stream.length) * (1.0 - target_quantile)));
    ExceedanceCollector collector(std::vector<double>(alpha.begin(), alpha.end()), target,
                                  window_h);
    std::vector<Sink*> sinks{&collector};
    simulate(stream, sinks);
    return collector.finalize(stream.length, target_quantile);
}

std::vector<double> record_angles(const ExceedanceSet& set, bool absolute) {
    if (set.d != 2) throw DimensionError("angles need d = 2");
    std::vector<double> out;
    out.reserve(set.records.size());
    for (const auto& r : set.records) {
        const double t1 = r.spectral[0];
        const double t2 = r.spectral[1];
        double angle;
        if (absolute) {
            angle = t2 == 0.0 ? M_PI_2 : std::atan(std::fabs(t1) / std::fabs(t2));
        } else {
            angle = t2 == 0.0 ? std::copysign(M_PI_2, t1) : std::atan(t1 / t2);
        }
        out.push_back(angle);
    }
    return out;
}

AngularHistogram angular_histogram(const ExceedanceSet& set, int bins, bool absolute) {
    if (set.d != 2) {
        throw DimensionError("angular histogram needs d = 2; use block_mass for d > 2");
    }
    if (set.records.empty()) throw InsufficientExceedances("no records to bin");
    AngularHistogram h;
    h.bins = bins;
    h.lo = absolute ? 0.0 : -M_PI_2;
    h.hi = M_PI_2;
    h.edges.resize(bins + 1);
    for (int k = 0; k <= bins; ++k) {
        h.edges[k] = h.lo + (h.hi - h.lo) * static_cast<double>(k) / bins;
    }
    h.mass.assign(bins, 0.0);
    const auto angles = record_angles(set, absolute);
    const double width = (h.hi - h.lo) / bins;
    for (const double a : angles) {
        int k = static_cast<int>(std::floor((a - h.lo) / width));
        k = std::clamp(k, 0, bins - 1);
        h.mass[k] += 1.0;
    }
    for (double& m : h.mass) m /= static_cast<double>(angles.size());
    h.n_exceedances = angles.size();
    return h;
}

BlockMassReport block_mass(const ExceedanceSet& set,
                           const std::vector<std::vector<int>>& blocks) {
    std::vector<int> owner(set.d, -1);
    for (size_t l = 0; l < blocks.size(); ++l) {
        for (int i : blocks[l]) owner.at(i) = static_cast<int>(l);
    }
    for (int i = 0; i < set.d; ++i) {
        if (owner[i] < 0) throw ConfigError("blocks do not partition the coordinates");
    }
    BlockMassReport rep;
    rep.counts.assign(blocks.size(), 0);
    double leak_sum = 0.0;
    for (const auto& r : set.records) {
        int argmax = 0;
        for (int i = 1; i < set.d; ++i) {
            if (std::fabs(r.spectral[i]) > std::fabs(r.spectral[argmax])) argmax = i;
        }
        const int bl = owner[argmax];
        rep.counts[bl] += 1;
        double leak = 0.0;
        for (int i = 0; i < set.d; ++i) {
            if (owner[i] != bl) leak = std::max(leak, std::fabs(r.spectral[i]));
        }
        leak_sum += leak;
    }
    const double n = std::max<double>(1.0, static_cast<double>(set.records.size()));
    for (const int64_t c : rep.counts) rep.mass.push_back(static_cast<double>(c) / n);
    rep.leakage = leak_sum / n;
    return rep;
}

std::vector<std::vector<double>> empirical_tail_process(const ExceedanceSet& set, int lag) {
    if (lag < 0 || lag > set.window_h) {
        throw WindowTooShort("lag " + std::to_string(lag) + " exceeds window " +
                             std::to_string(set.window_h));
    }
    std::vector<std::vector<double>> out;
    out.reserve(set.records.size());
    for (const auto& r : set.records) {
        out.emplace_back(r.window.begin() + static_cast<size_t>(lag) * set.d,
                         r.window.begin() + static_cast<size_t>(lag + 1) * set.d);
    }
    return out;
}

WeightedAngularSample nonstandard_angular(const ExceedanceSet& set,
                                          std::span<const double> a_hat,
                                          std::span<const double> alpha) {
    for (const double a : a_hat) {
        if (!(a > 0.0)) throw NonPositiveConstant("a_hat must be positive");
    }
    WeightedAngularSample out;
    double wsum = 0.0;
    for (const auto& r : set.records) {
        std::vector<double> y(set.d);
        double w = 0.0;
        for (int i = 0; i < set.d; ++i) {
            const double th = r.spectral[i];
            const double p = std::copysign(std::pow(std::fabs(th), alpha[i]), th);
            y[i] = p / a_hat[i];
            w = std::max(w, std::fabs(y[i]));
        }
        for (double& v : y) v /= w;
        out.directions.push_back(std::move(y));
        out.weights.push_back(w);
        wsum += w;
    }
    for (double& w : out.weights) w /= wsum;
    return out;
}

} // namespace dsre
