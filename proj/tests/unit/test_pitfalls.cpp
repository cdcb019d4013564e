#include <doctest.h>

#include <cmath>

#include "eqlab/bitsource.hpp"
#include "eqlab/dataset.hpp"
#include "eqlab/errors.hpp"
#include "eqlab/metrics.hpp"
#include "eqlab/pitfalls.hpp"

using namespace eqlab;
using namespace eqlab::pitfalls;
using cplx = std::complex<double>;

TEST_CASE("autocorrelation period detection") {
    auto c = data::QamConstellation::make(16);

    SUBCASE("random mt symbols show no periodicity") {
        auto syms = data::map_symbols(data::mt_bits(5, 2 * (1u << 18) * 4), c);
        auto r = autocorr_magnitudes(syms.x, 1u << 16);
        double worst = 0.0;
        for (std::size_t lag = 1; lag < r.size(); ++lag) worst = std::max(worst, r[lag]);
        CHECK(worst < 0.05);
        CHECK(!autocorr_period(syms.x, 1u << 16).has_value());
    }

    SUBCASE("tiled sequences are detected exactly for many periods") {
        for (std::size_t p : {137u, 1000u, 22544u, 60000u}) {
            auto syms = data::map_symbols(data::mt_bits(7, 2 * p * 4), c);
            auto tiled = data::dac_frame_repeat(syms.x, p, 1, 1.0, 4 * p);
            auto got = autocorr_period(tiled, 2 * p - 1);
            REQUIRE(got.has_value());
            CHECK(*got == p);
        }
    }

    SUBCASE("constant streams degenerate to period 1") {
        std::vector<cplx> constant(4096, cplx{1.0, 0.0});
        auto got = autocorr_period(constant, 1024);
        REQUIRE(got.has_value());
        CHECK(*got == 1);
    }

    SUBCASE("length precondition") {
        std::vector<cplx> tiny(100, cplx{1.0, 0.0});
        CHECK_THROWS_AS(autocorr_period(tiny, 64), ConfigError);
    }
}

TEST_CASE("jail window detector") {
    auto c = data::QamConstellation::make(16);
    rng::Mt19937 gen(23);
    const std::size_t n = 1u << 16;
    std::vector<cplx> tx(n);
    for (auto& v : tx) v = c.point(static_cast<int>(gen.next_below(16)));

    SUBCASE("gaussian clusters never flag across snr 10..25 dB") {
        for (double snr_db = 10.0; snr_db <= 25.0; snr_db += 2.5) {
            double sigma = std::pow(10.0, -snr_db / 20.0);
            std::vector<cplx> rx(n);
            for (std::size_t i = 0; i < n; ++i) rx[i] = tx[i] + sigma * gen.next_cgaussian();
            auto res = jail_window_detect(rx, tx, c, 1.0, 2.0);
            CHECK_FALSE(res.flagged);
            if (std::isfinite(res.q_gap_db)) CHECK(std::abs(res.q_gap_db) < 0.5);
        }
    }

    SUBCASE("line clusters flag with a >=3 dB gap") {
        // mixture: most points exact, a few displaced a full grid step along
        // the in-phase axis (non-gaussian line cluster with decision errors)
        const double spacing = 2.0 / std::sqrt(10.0);
        std::vector<cplx> rx(n);
        for (std::size_t i = 0; i < n; ++i) {
            rx[i] = tx[i] + 0.015 * gen.next_cgaussian();
            if (gen.next_double() < 0.03)
                rx[i] += cplx{(gen.next_u32() & 1u) ? spacing : -spacing, 0.0};
        }
        auto res = jail_window_detect(rx, tx, c, 1.0, 2.0);
        CHECK(res.flagged);
        CHECK(res.q_gap_db >= 3.0);
        CHECK(res.mean_excess_kurtosis > 1.0);
    }

    SUBCASE("exact reception never flags") {
        auto res = jail_window_detect(tx, tx, c, 1.0, 2.0);
        CHECK_FALSE(res.flagged);
        CHECK(res.q_counted_db == metrics::kInf);
    }
}

TEST_CASE("overfit verdicts") {
    SUBCASE("identical curves never flag") {
        std::vector<double> q = {7, 8, 9, 9.5, 9.8, 10, 10.1, 10.2};
        auto res = overfit_gap(q, q, 3);
        CHECK_FALSE(res.overfit);
        for (double g : res.gap_db) CHECK(g == 0.0);
    }

    SUBCASE("single-trace pattern flags") {
        // train climbs toward 13 while test peaks and collapses
        std::vector<double> train = {8.6, 9.0, 9.6, 10.2, 10.5, 10.7, 11.7, 13.0, 13.0, 13.0};
        std::vector<double> test = {8.4, 8.5, 8.66, 8.2, 7.6, 6.8, 3.9, 1.4, 1.2, 1.1};
        auto res = overfit_gap(train, test, 4);
        CHECK(res.overfit);
        CHECK(res.onset_epoch >= 1);
    }

    SUBCASE("co-rising curves do not flag") {
        std::vector<double> train = {8.5, 9.0, 9.2, 9.4, 9.7, 9.9, 10.0, 10.3};
        std::vector<double> test = {8.4, 8.6, 8.7, 8.9, 9.1, 9.4, 9.5, 9.7};
        CHECK_FALSE(overfit_gap(train, test, 3).overfit);
    }

    SUBCASE("length mismatch is rejected") {
        CHECK_THROWS_AS(overfit_gap({1, 2}, {1}, 1), ConfigError);
    }
}

TEST_CASE("neighbor probe on random data stays at the chance baseline") {
    // M = 2 equivalent: random feature windows cannot predict a random
    // center symbol; SER sits near 1 - 1/M
    auto c = data::QamConstellation::make(8);
    const std::size_t n = 3000;
    auto tr = data::map_symbols(data::mt_bits(101, 2 * n * 3), c);
    auto te = data::map_symbols(data::mt_bits(202, 2 * n * 3), c);
    auto mk = [&](const data::DualPolSymbols& s) {
        auto ds = std::make_shared<data::WindowedDataset>(s.x, s.y, s.x, s.y, 2, c);
        ds->set_mask_center(true);
        return ds;
    };
    auto train_ds = mk(tr), test_ds = mk(te);

    nn::TrainConfig cfg;
    cfg.loss = nn::LossKind::kCategoricalCel;
    cfg.batch_size = 256;
    cfg.max_epochs = 8;
    cfg.patience = 8;
    cfg.learning_rate = 0.002;
    cfg.seed = 3;
    auto res = neighbor_only_probe(*train_ds, *test_ds, c, cfg, 16, 5);
    CHECK(res.baseline == doctest::Approx(7.0 / 8.0));
    CHECK(std::abs(res.ser - res.baseline) < 0.03);
}
