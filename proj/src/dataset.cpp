#include "eqlab/dataset.hpp"

#include <algorithm>
#include <cmath>

#include "eqlab/errors.hpp"

namespace eqlab::data {

WindowedDataset::WindowedDataset(std::vector<cplx> rx_x, std::vector<cplx> rx_y,
                                 std::vector<cplx> tx_x, std::vector<cplx> tx_y, int n_taps,
                                 const QamConstellation& c, Pol pol)
    : rx_x_(std::move(rx_x)),
      rx_y_(std::move(rx_y)),
      tx_x_(std::move(tx_x)),
      tx_y_(std::move(tx_y)),
      n_taps_(n_taps),
      pol_(pol) {
    if (n_taps_ < 0) throw ConfigError("window_dataset: N must be >= 0");
    std::size_t len = rx_x_.size();
    if (len != rx_y_.size() || len != tx_x_.size() || len != tx_y_.size())
        throw ConfigError("window_dataset: sequences must be aligned and equal length");
    if (len < static_cast<std::size_t>(2 * n_taps_ + 1))
        throw ConfigError("window_dataset: sequence shorter than the window");
    count_ = len - static_cast<std::size_t>(2 * n_taps_);
    const auto& tx = (pol_ == Pol::kX) ? tx_x_ : tx_y_;
    labels_.resize(len);
    for (std::size_t i = 0; i < len; ++i) labels_[i] = c.decide(tx[i]);
}

void WindowedDataset::fill_features(std::size_t r, double* dst) const {
    const std::size_t base = r;  // window starts at source index r, center at r+N
    const int w = window_len();
    for (int t = 0; t < w; ++t) {
        const cplx& vx = rx_x_[base + static_cast<std::size_t>(t)];
        const cplx& vy = rx_y_[base + static_cast<std::size_t>(t)];
        dst[4 * t + 0] = vx.real();
        dst[4 * t + 1] = vx.imag();
        dst[4 * t + 2] = vy.real();
        dst[4 * t + 3] = vy.imag();
    }
    if (mask_center_) {
        dst[4 * n_taps_ + 0] = 0.0;
        dst[4 * n_taps_ + 1] = 0.0;
        dst[4 * n_taps_ + 2] = 0.0;
        dst[4 * n_taps_ + 3] = 0.0;
    }
}

cplx WindowedDataset::regression_target(std::size_t r) const {
    const auto& tx = (pol_ == Pol::kX) ? tx_x_ : tx_y_;
    return tx[r + static_cast<std::size_t>(n_taps_)];
}

int WindowedDataset::class_target(std::size_t r) const {
    return labels_[r + static_cast<std::size_t>(n_taps_)];
}

cplx WindowedDataset::rx_center(std::size_t r) const {
    const auto& rx = (pol_ == Pol::kX) ? rx_x_ : rx_y_;
    return rx[r + static_cast<std::size_t>(n_taps_)];
}

SplitIndices split_dataset(const WindowedDataset& ds, const SplitFractions& f,
                           std::uint64_t shuffle_seed) {
    if (f.train < 0 || f.val < 0 || f.test < 0 || f.train + f.val + f.test > 1.0 + 1e-9)
        throw ConfigError("split_dataset: fractions must be non-negative and sum to <= 1");
    std::vector<std::uint32_t> all(ds.count());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<std::uint32_t>(i);
    rng::Mt19937 gen(shuffle_seed);
    rng::shuffle(all, gen);
    std::size_t n_train = static_cast<std::size_t>(f.train * static_cast<double>(all.size()));
    std::size_t n_val = static_cast<std::size_t>(f.val * static_cast<double>(all.size()));
    std::size_t n_test = static_cast<std::size_t>(f.test * static_cast<double>(all.size()));
    n_test = std::min(n_test, all.size() - n_train - n_val);
    SplitIndices s;
    s.train.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n_train));
    s.val.assign(all.begin() + static_cast<std::ptrdiff_t>(n_train),
                 all.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
    s.test.assign(all.begin() + static_cast<std::ptrdiff_t>(n_train + n_val),
                  all.begin() + static_cast<std::ptrdiff_t>(n_train + n_val + n_test));
    return s;
}

std::uint64_t dac_effective_symbols(std::uint64_t mem_samples, int frames, double sps_effective) {
    if (frames < 1 || sps_effective <= 0) throw ConfigError("dac: frames >= 1 and sps > 0 required");
    double p = static_cast<double>(mem_samples) / static_cast<double>(frames) / sps_effective;
    if (p < 1.0) throw ConfigError("dac: effective symbol count below 1");
    return static_cast<std::uint64_t>(std::floor(p));
}

std::vector<cplx> dac_frame_repeat(const std::vector<cplx>& symbols, std::uint64_t mem_samples,
                                   int frames, double sps_effective, std::size_t out_len) {
    std::uint64_t p = dac_effective_symbols(mem_samples, frames, sps_effective);
    std::size_t unique = static_cast<std::size_t>(std::min<std::uint64_t>(p, symbols.size()));
    if (unique == 0) throw ConfigError("dac_frame_repeat: no symbols");
    std::vector<cplx> out(out_len);
    for (std::size_t i = 0; i < out_len; ++i) out[i] = symbols[i % unique];
    return out;
}

SingleTraceSource::SingleTraceSource(const WindowedDataset& ds, std::vector<std::uint32_t> indices,
                                     std::uint64_t shuffle_seed, bool reshuffle)
    : ds_(ds), indices_(std::move(indices)), gen_(shuffle_seed), reshuffle_(reshuffle) {}

void SingleTraceSource::begin_epoch(std::uint64_t) {
    if (reshuffle_) rng::shuffle(indices_, gen_);
}

MultiTraceSource::MultiTraceSource(std::vector<std::shared_ptr<const WindowedDataset>> traces,
                                   int train_count, std::size_t epoch_sample, std::uint64_t seed)
    : traces_(std::move(traces)), train_count_(train_count), epoch_sample_(epoch_sample), gen_(seed) {
    if (traces_.empty()) throw ConfigError("multi_trace_mix: no traces");
    if (train_count_ < 1 || static_cast<std::size_t>(train_count_) >= traces_.size())
        throw ConfigError("multi_trace_mix: train_count must leave at least one test trace");
    offsets_.resize(traces_.size());
    std::size_t base = 0;
    for (std::size_t t = 0; t < traces_.size(); ++t) {
        offsets_[t] = base;
        base += traces_[t]->count();
        if (t + 1 == static_cast<std::size_t>(train_count_)) pool_size_ = base;
    }
    if (epoch_sample_ > pool_size_) epoch_sample_ = pool_size_;
}

void MultiTraceSource::begin_epoch(std::uint64_t) {
    // Floyd's sampling: uniform subset of the pool without replacement
    drawn_.clear();
    drawn_.reserve(epoch_sample_);
    std::vector<bool> taken(pool_size_, false);
    for (std::size_t j = pool_size_ - epoch_sample_; j < pool_size_; ++j) {
        std::size_t t = static_cast<std::size_t>(gen_.next_below(j + 1));
        if (taken[t]) t = j;
        taken[t] = true;
        drawn_.push_back(t);
    }
    rng::shuffle(drawn_, gen_);
}

const WindowedDataset& MultiTraceSource::dataset_of(std::size_t record_id) const {
    std::size_t t = static_cast<std::size_t>(
        std::upper_bound(offsets_.begin(), offsets_.end(), record_id) - offsets_.begin() - 1);
    return *traces_[t];
}

std::size_t MultiTraceSource::local_index(std::size_t record_id) const {
    std::size_t t = static_cast<std::size_t>(
        std::upper_bound(offsets_.begin(), offsets_.end(), record_id) - offsets_.begin() - 1);
    return record_id - offsets_[t];
}

std::size_t MultiTraceSource::test_size() const {
    std::size_t total = 0;
    for (std::size_t t = static_cast<std::size_t>(train_count_); t < traces_.size(); ++t)
        total += traces_[t]->count();
    return total;
}

std::vector<std::size_t> MultiTraceSource::test_records() const {
    std::vector<std::size_t> out;
    out.reserve(test_size());
    for (std::size_t t = static_cast<std::size_t>(train_count_); t < traces_.size(); ++t)
        for (std::size_t i = 0; i < traces_[t]->count(); ++i) out.push_back(offsets_[t] + i);
    return out;
}

}  // namespace eqlab::data
