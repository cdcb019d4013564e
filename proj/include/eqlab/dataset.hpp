#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <vector>

#include "eqlab/constellation.hpp"
#include "eqlab/rng.hpp"

namespace eqlab::data {

using cplx = std::complex<double>;

enum class Pol { kX, kY };

struct SplitFractions {
    double train = 0.6, val = 0.2, test = 0.2;
};

// Aligned TX/RX symbol sequences windowed into (count, 2N+1, 4) training
// records. Feature order per symbol is (Re X, Im X, Re Y, Im Y); the
// regression target is the TX symbol on the selected polarization and the
// class target its constellation index. Symbols without a full neighborhood
// are dropped, so record k covers source index k+N.
class WindowedDataset {
public:
    WindowedDataset(std::vector<cplx> rx_x, std::vector<cplx> rx_y, std::vector<cplx> tx_x,
                    std::vector<cplx> tx_y, int n_taps, const QamConstellation& c, Pol pol = Pol::kX);

    int window_len() const { return 2 * n_taps_ + 1; }
    int n_taps() const { return n_taps_; }
    std::size_t count() const { return count_; }
    int feature_dim() const { return 4 * window_len(); }

    // Writes record r's window into dst (window_len*4 doubles).
    void fill_features(std::size_t r, double* dst) const;
    cplx regression_target(std::size_t r) const;
    int class_target(std::size_t r) const;
    cplx rx_center(std::size_t r) const;  // received center symbol, selected pol

    const std::vector<cplx>& tx_x() const { return tx_x_; }
    const std::vector<cplx>& tx_y() const { return tx_y_; }
    const std::vector<cplx>& rx_x() const { return rx_x_; }
    const std::vector<cplx>& rx_y() const { return rx_y_; }

    // When set, the center symbol's features are zeroed (neighbors-only probe).
    void set_mask_center(bool m) { mask_center_ = m; }
    bool mask_center() const { return mask_center_; }

private:
    std::vector<cplx> rx_x_, rx_y_, tx_x_, tx_y_;
    std::vector<int> labels_;
    int n_taps_;
    std::size_t count_;
    Pol pol_;
    bool mask_center_ = false;
};

// Disjoint train/val/test record indices, shuffled with shuffle_seed before
// the contiguous split.
struct SplitIndices {
    std::vector<std::uint32_t> train, val, test;
};
SplitIndices split_dataset(const WindowedDataset& ds, const SplitFractions& f,
                           std::uint64_t shuffle_seed);

// Cyclic DAC playout emulation: keeps P = floor(mem_samples / frames /
// sps_effective) unique symbols and tiles them to out_len.
std::vector<cplx> dac_frame_repeat(const std::vector<cplx>& symbols, std::uint64_t mem_samples,
                                   int frames, double sps_effective, std::size_t out_len);
std::uint64_t dac_effective_symbols(std::uint64_t mem_samples, int frames, double sps_effective);

// Uniform mini-batch source over a windowed dataset (or a pool of them).
class BatchSource {
public:
    virtual ~BatchSource() = default;
    virtual std::size_t epoch_size() const = 0;           // records drawn per epoch
    virtual void begin_epoch(std::uint64_t epoch) = 0;    // reshuffle / resample
    // record id valid until next begin_epoch
    virtual std::size_t record_at(std::size_t i) const = 0;
    virtual const WindowedDataset& dataset_of(std::size_t record_id) const = 0;
    virtual std::size_t local_index(std::size_t record_id) const = 0;
};

// Single-dataset source over a fixed index list, reshuffled every epoch.
class SingleTraceSource final : public BatchSource {
public:
    SingleTraceSource(const WindowedDataset& ds, std::vector<std::uint32_t> indices,
                      std::uint64_t shuffle_seed, bool reshuffle = true);
    std::size_t epoch_size() const override { return indices_.size(); }
    void begin_epoch(std::uint64_t epoch) override;
    std::size_t record_at(std::size_t i) const override { return indices_[i]; }
    const WindowedDataset& dataset_of(std::size_t) const override { return ds_; }
    std::size_t local_index(std::size_t record_id) const override { return record_id; }

private:
    const WindowedDataset& ds_;
    std::vector<std::uint32_t> indices_;
    rng::Mt19937 gen_;
    bool reshuffle_;
};

// Multi-trace pool: the first train_count traces form the training pool,
// the remainder the held-out test pool; each epoch draws epoch_sample
// records uniformly (without replacement) from the training pool.
class MultiTraceSource final : public BatchSource {
public:
    MultiTraceSource(std::vector<std::shared_ptr<const WindowedDataset>> traces, int train_count,
                     std::size_t epoch_sample, std::uint64_t seed);

    std::size_t epoch_size() const override { return epoch_sample_; }
    void begin_epoch(std::uint64_t epoch) override;
    std::size_t record_at(std::size_t i) const override { return drawn_[i]; }
    const WindowedDataset& dataset_of(std::size_t record_id) const override;
    std::size_t local_index(std::size_t record_id) const override;

    std::size_t pool_size() const { return pool_size_; }
    std::size_t test_size() const;
    // global record ids of the held-out pool
    std::vector<std::size_t> test_records() const;

private:
    std::vector<std::shared_ptr<const WindowedDataset>> traces_;
    std::vector<std::size_t> offsets_;  // global id base per trace
    int train_count_;
    std::size_t pool_size_ = 0;
    std::size_t epoch_sample_;
    std::vector<std::size_t> drawn_;
    rng::Mt19937 gen_;
};

}  // namespace eqlab::data
