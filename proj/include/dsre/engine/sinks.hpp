#pragma once

#include "dsre/engine/stream.hpp"

#include <algorithm>
#include <cstring>
#include <limits>
#include <string>
#include <vector>

namespace dsre {

// Bounded best-`cap` selection under a strict total order ("better"). The
// heap keeps the worst kept element on top; merge is concatenate +
// re-truncate, which makes chunk merges order-insensitive.
template <class Rec, class Better>
class BoundedTopK {
public:
    BoundedTopK(size_t cap, Better better) : cap_(std::max<size_t>(cap, 1)), better_(better) {}

    bool full() const { return heap_.size() >= cap_; }
    const Rec& worst() const { return heap_.front(); }
    size_t size() const { return heap_.size(); }
    size_t capacity() const { return cap_; }

    // true if r was kept
    bool offer(const Rec& r) {
        if (heap_.size() < cap_) {
            heap_.push_back(r);
            std::push_heap(heap_.begin(), heap_.end(), better_);
            return true;
        }
        if (!better_(r, heap_.front())) return false;
        std::pop_heap(heap_.begin(), heap_.end(), better_);
        heap_.back() = r;
        std::push_heap(heap_.begin(), heap_.end(), better_);
        return true;
    }

    void merge(const BoundedTopK& other) {
        heap_.insert(heap_.end(), other.heap_.begin(), other.heap_.end());
        if (heap_.size() > cap_) {
            std::nth_element(heap_.begin(), heap_.begin() + cap_, heap_.end(), better_);
            heap_.resize(cap_);
        }
        std::make_heap(heap_.begin(), heap_.end(), better_);
    }

    std::vector<Rec> sorted() const {
        std::vector<Rec> out = heap_;
        std::sort(out.begin(), out.end(), better_);
        return out;
    }

    const std::vector<Rec>& raw() const { return heap_; }

private:
    size_t cap_;
    Better better_;
    std::vector<Rec> heap_;
};

struct ValueRecord {
    double v;
    int64_t t;
};
inline bool value_better(const ValueRecord& a, const ValueRecord& b) {
    if (a.v != b.v) return a.v > b.v;
    return a.t < b.t;
}

// Top-K positive observations per coordinate; feeds the Hill estimator and
// marginal quantile thresholds.
class MarginalTailSink : public Sink {
public:
    MarginalTailSink(int d, size_t cap);

    void consume(const StateBlock& block) override;
    void merge(Sink& other) override;
    std::unique_ptr<Sink> clone_empty() const override;

    // order statistics, largest first
    std::vector<double> top_values(int coord) const;

private:
    int d_;
    size_t cap_;
    std::vector<BoundedTopK<ValueRecord, bool (*)(const ValueRecord&, const ValueRecord&)>> tops_;
    std::vector<uint32_t> idx_;
};

struct PairRecord {
    double v;     // ordering coordinate
    double other; // companion coordinate at the same time
    int64_t t;
};
inline bool pair_better(const PairRecord& a, const PairRecord& b) {
    if (a.v != b.v) return a.v > b.v;
    return a.t < b.t;
}

// For a coordinate pair (i, j): the top-K times by X_i together with X_j at
// the same time, and symmetrically. Enough to evaluate joint exceedances at
// any threshold above the K-th marginal order statistic.
class JointPairsSink : public Sink {
public:
    JointPairsSink(int i, int j, size_t cap);

    void consume(const StateBlock& block) override;
    void merge(Sink& other) override;
    std::unique_ptr<Sink> clone_empty() const override;

    const std::vector<PairRecord>& by_i() const { return by_i_.raw(); }
    const std::vector<PairRecord>& by_j() const { return by_j_.raw(); }
    std::vector<PairRecord> sorted_by_i() const { return by_i_.sorted(); }
    std::vector<PairRecord> sorted_by_j() const { return by_j_.sorted(); }

private:
    int i_, j_;
    BoundedTopK<PairRecord, bool (*)(const PairRecord&, const PairRecord&)> by_i_, by_j_;
    std::vector<uint32_t> idx_;
};

// Strided capture of one coordinate: values at t_start, t_start+stride, ...
class CaptureSink : public Sink {
public:
    CaptureSink(int coord, int64_t t_start, int64_t stride, size_t count);

    void consume(const StateBlock& block) override;
    void merge(Sink& other) override;
    std::unique_ptr<Sink> clone_empty() const override;

    const std::vector<double>& values() const { return values_; }

private:
    int coord_;
    int64_t t_start_, stride_;
    size_t count_;
    std::vector<double> values_;
    std::vector<int64_t> times_;
};

class MinMaxSink : public Sink {
public:
    explicit MinMaxSink(int d);
    void consume(const StateBlock& block) override;
    void merge(Sink& other) override;
    std::unique_ptr<Sink> clone_empty() const override;
    double min(int coord) const { return mins_[coord]; }
    double max(int coord) const { return maxs_[coord]; }

private:
    std::vector<double> mins_, maxs_;
};

// Full-trajectory capture for the binary dump (debugging at small lengths).
class TrajectoryBufferSink : public Sink {
public:
    TrajectoryBufferSink(int d, int64_t length);
    void consume(const StateBlock& block) override;
    void merge(Sink& other) override;
    std::unique_ptr<Sink> clone_empty() const override;

    // little-endian float64 stream with a 32-byte header: magic "DSRE",
    // u32 version, u32 d, u64 length, zero padding.
    void write_file(const std::string& path) const;
    const std::vector<double>& data() const { return data_; }

private:
    int d_;
    int64_t length_;
    std::vector<double> data_; // time-major: data[t*d + i]
    int64_t written_lo_ = std::numeric_limits<int64_t>::max();
    int64_t written_hi_ = std::numeric_limits<int64_t>::min();
};

} // namespace dsre
