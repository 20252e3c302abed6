#include "dsre/engine/sinks.hpp"

#include "dsre/simd/kernels.hpp"

#include <cstdio>
#include <limits>

namespace dsre {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

MarginalTailSink::MarginalTailSink(int d, size_t cap) : d_(d), cap_(cap) {
    for (int i = 0; i < d; ++i) tops_.emplace_back(cap, &value_better);
}

void MarginalTailSink::consume(const StateBlock& block) {
    if (!block.emit) return;
    idx_.resize(block.n);
    for (int i = 0; i < d_; ++i) {
        auto& top = tops_[i];
        const double tau = top.full() ? top.worst().v : -kInf;
        const size_t m = simd::kernels().find_above(block.coords[i], block.n, tau, idx_.data());
        for (size_t k = 0; k < m; ++k) {
            const uint32_t off = idx_[k];
            top.offer({block.coords[i][off], block.t0 + off});
        }
    }
}

void MarginalTailSink::merge(Sink& other) {
    auto& o = dynamic_cast<MarginalTailSink&>(other);
    for (int i = 0; i < d_; ++i) tops_[i].merge(o.tops_[i]);
}

std::unique_ptr<Sink> MarginalTailSink::clone_empty() const {
    return std::make_unique<MarginalTailSink>(d_, cap_);
}

std::vector<double> MarginalTailSink::top_values(int coord) const {
    std::vector<double> out;
    for (const auto& r : tops_[coord].sorted()) out.push_back(r.v);
    return out;
}

JointPairsSink::JointPairsSink(int i, int j, size_t cap)
    : i_(i), j_(j), by_i_(cap, &pair_better), by_j_(cap, &pair_better) {}

void JointPairsSink::consume(const StateBlock& block) {
    if (!block.emit) return;
    idx_.resize(block.n);
    const double* xi = block.coords[i_];
    const double* xj = block.coords[j_];
    {
        const double tau = by_i_.full() ? by_i_.worst().v : -kInf;
        const size_t m = simd::kernels().find_above(xi, block.n, tau, idx_.data());
        for (size_t k = 0; k < m; ++k) {
            const uint32_t off = idx_[k];
            by_i_.offer({xi[off], xj[off], block.t0 + off});
        }
    }
    {
        const double tau = by_j_.full() ? by_j_.worst().v : -kInf;
        const size_t m = simd::kernels().find_above(xj, block.n, tau, idx_.data());
        for (size_t k = 0; k < m; ++k) {
            const uint32_t off = idx_[k];
            by_j_.offer({xj[off], xi[off], block.t0 + off});
        }
    }
}

void JointPairsSink::merge(Sink& other) {
    auto& o = dynamic_cast<JointPairsSink&>(other);
    by_i_.merge(o.by_i_);
    by_j_.merge(o.by_j_);
}

std::unique_ptr<Sink> JointPairsSink::clone_empty() const {
    return std::make_unique<JointPairsSink>(i_, j_, by_i_.capacity());
}

CaptureSink::CaptureSink(int coord, int64_t t_start, int64_t stride, size_t count)
    : coord_(coord), t_start_(t_start), stride_(std::max<int64_t>(stride, 1)), count_(count) {}

void CaptureSink::consume(const StateBlock& block) {
    if (!block.emit) return;
    // first captured index >= block.t0
    int64_t k = (block.t0 - t_start_ + stride_ - 1) / stride_;
    if (k < 0) k = 0;
    for (;; ++k) {
        const int64_t t = t_start_ + k * stride_;
        if (t >= block.t0 + static_cast<int64_t>(block.n)) break;
        if (static_cast<size_t>(k) >= count_) break;
        if (t < block.t0) continue;
        values_.push_back(block.coords[coord_][t - block.t0]);
        times_.push_back(t);
    }
}

void CaptureSink::merge(Sink& other) {
    auto& o = dynamic_cast<CaptureSink&>(other);
    values_.insert(values_.end(), o.values_.begin(), o.values_.end());
    times_.insert(times_.end(), o.times_.begin(), o.times_.end());
}

std::unique_ptr<Sink> CaptureSink::clone_empty() const {
    return std::make_unique<CaptureSink>(coord_, t_start_, stride_, count_);
}

MinMaxSink::MinMaxSink(int d) : mins_(d, kInf), maxs_(d, -kInf) {}

void MinMaxSink::consume(const StateBlock& block) {
    if (!block.emit) return;
    for (size_t i = 0; i < mins_.size(); ++i) {
        const double* row = block.coords[i];
        double lo = mins_[i], hi = maxs_[i];
        for (size_t t = 0; t < block.n; ++t) {
            lo = std::min(lo, row[t]);
            hi = std::max(hi, row[t]);
        }
        mins_[i] = lo;
        maxs_[i] = hi;
    }
}

void MinMaxSink::merge(Sink& other) {
    auto& o = dynamic_cast<MinMaxSink&>(other);
    for (size_t i = 0; i < mins_.size(); ++i) {
        mins_[i] = std::min(mins_[i], o.mins_[i]);
        maxs_[i] = std::max(maxs_[i], o.maxs_[i]);
    }
}

std::unique_ptr<Sink> MinMaxSink::clone_empty() const {
    return std::make_unique<MinMaxSink>(static_cast<int>(mins_.size()));
}

TrajectoryBufferSink::TrajectoryBufferSink(int d, int64_t length) : d_(d), length_(length) {
    if (length_ * d_ > (int64_t{1} << 27)) {
        throw ConfigError("trajectory dump limited to small lengths");
    }
    data_.assign(static_cast<size_t>(length_ * d_), 0.0);
}

void TrajectoryBufferSink::consume(const StateBlock& block) {
    if (!block.emit) return;
    for (size_t t = 0; t < block.n; ++t) {
        const int64_t at = block.t0 + static_cast<int64_t>(t);
        if (at < 0 || at >= length_) continue;
        for (int i = 0; i < d_; ++i) {
            data_[static_cast<size_t>(at) * d_ + i] = block.coords[i][t];
        }
        written_lo_ = std::min(written_lo_, at);
        written_hi_ = std::max(written_hi_, at + 1);
    }
}

void TrajectoryBufferSink::merge(Sink& other) {
    auto& o = dynamic_cast<TrajectoryBufferSink&>(other);
    if (o.written_lo_ >= o.written_hi_) return;
    for (int64_t at = o.written_lo_; at < o.written_hi_; ++at) {
        for (int i = 0; i < d_; ++i) {
            data_[static_cast<size_t>(at) * d_ + i] = o.data_[static_cast<size_t>(at) * d_ + i];
        }
    }
    written_lo_ = std::min(written_lo_, o.written_lo_);
    written_hi_ = std::max(written_hi_, o.written_hi_);
}

std::unique_ptr<Sink> TrajectoryBufferSink::clone_empty() const {
    return std::make_unique<TrajectoryBufferSink>(d_, length_);
}

void TrajectoryBufferSink::write_file(const std::string& path) const {
    FILE* f = std::fopen(path.c_str(), "wb");
    if (f == nullptr) throw Error("cannot open " + path);
    unsigned char header[32] = {0};
    std::memcpy(header, "DSRE", 4);
    const uint32_t version = 1;
    const uint32_t dd = static_cast<uint32_t>(d_);
    const uint64_t len = static_cast<uint64_t>(length_);
    std::memcpy(header + 4, &version, 4);
    std::memcpy(header + 8, &dd, 4);
    std::memcpy(header + 12, &len, 8);
    std::fwrite(header, 1, sizeof(header), f);
    std::fwrite(data_.data(), sizeof(double), data_.size(), f);
    std::fclose(f);
}

} // namespace dsre
