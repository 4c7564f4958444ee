#include "oracles.hpp"

#include <fencemill/metrics.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace fencemill;

namespace
{
    /// Samples along bearing `theta` with range r(t).
    template <typename F>
    Trajectory radial (F r_of_t, double t_end, double dt = 0.01, double theta = 0.3)
    {
        Trajectory tr;
        const long n = std::lround (t_end / dt);
        for (long i = 0; i <= n; ++i)
        {
            const double t = static_cast<double> (i) * dt;
            const double r = r_of_t (t);
            tr.samples.push_back (make_sample (t, r * std::cos (theta), r * std::sin (theta), 0.0));
        }
        return tr;
    }
}

TEST (Metrics, SinusoidalDips)
{
    const ShapeSpec c = ShapeSpec::circle (2.0);
    // Dips open where sin > 0 and close where it returns to 0, at t = 10 and 30.
    const Trajectory tr = radial ([] (double t) { return 2.0 + std::max (0.0, std::sin (oracle::pi * t / 10.0)); }, 40.0, 0.001);
    const auto dips = segment_dips (tr, c);
    ASSERT_EQ (dips.size (), 2u);
    for (const Dip &d : dips)
    {
        EXPECT_TRUE (d.complete);
        EXPECT_NEAR (d.peak, 1.0, 1e-9);
        EXPECT_NEAR (d.return_time, 10.0, 2e-3);
    }
    const auto m = fencing_metrics (dips);
    ASSERT_TRUE (m && m->art);
    EXPECT_NEAR (m->mre, 1.0, 1e-9);
    EXPECT_NEAR (m->mpe, 1.0, 1e-9);
    EXPECT_NEAR (*m->art, 10.0, 2e-3);
}

TEST (Metrics, InsideOnlyHasNoDips)
{
    const Trajectory tr = radial ([] (double) { return 1.0; }, 5.0);
    EXPECT_TRUE (segment_dips (tr, ShapeSpec::circle (2.0)).empty ());
    EXPECT_FALSE (fencing_metrics (std::vector<Dip> {}).has_value ());
}

TEST (Metrics, IncompleteTrailingDip)
{
    Trajectory tr;
    const double rs[] = {1.5, 1.9, 2.3, 2.9, 2.6, 2.4};
    for (int i = 0; i < 6; ++i)
        tr.samples.push_back (make_sample (i, rs[i], 0.0, 0.0));
    const auto dips = segment_dips (tr, ShapeSpec::circle (2.0));
    ASSERT_EQ (dips.size (), 1u);
    EXPECT_FALSE (dips[0].complete);
    EXPECT_NEAR (dips[0].peak, 0.9, 1e-12);
    EXPECT_EQ (dips[0].t_start, 2.0);
    EXPECT_EQ (dips[0].t_end, 5.0);
    const auto m = fencing_metrics (dips);
    EXPECT_FALSE (m->art.has_value ());
}

TEST (Metrics, PeaksMaxAndMean)
{
    std::vector<Dip> d (3);
    d[0].peak = 0.5;
    d[1].peak = 1.5;
    d[2].peak = 1.0;
    const auto m = fencing_metrics (d);
    EXPECT_DOUBLE_EQ (m->mre, 1.5);
    EXPECT_DOUBLE_EQ (m->mpe, 1.0);
}

TEST (Metrics, SingleDip)
{
    std::vector<Dip> d (1);
    d[0].peak = 1.905;
    const auto m = fencing_metrics (d);
    EXPECT_DOUBLE_EQ (m->mre, 1.905);
    EXPECT_DOUBLE_EQ (m->mpe, 1.905);
}

TEST (Metrics, DipCentroidIsMeanOfOutsideSamples)
{
    Trajectory tr;
    tr.samples = {make_sample (0, 1.0, 0.0, 0.0), make_sample (1, 3.0, 0.0, 0.0), make_sample (2, 0.0, 4.0, 0.0), make_sample (3, 0.0, 1.0, 0.0)};
    const auto dips = segment_dips (tr, ShapeSpec::circle (2.0));
    ASSERT_EQ (dips.size (), 1u);
    EXPECT_EQ (dips[0].centroid, (Vec2 {1.5, 2.0}));
    EXPECT_EQ (dips[0].peak_position, (Vec2 {0.0, 4.0}));
}

TEST (Metrics, ConstantRadiusMilling)
{
    const Trajectory tr = radial ([] (double) { return 3.221; }, 100.0, 0.1);
    const MillingMetrics m = milling_metrics (tr, ShapeSpec::circle (2.0), {0.0, false});
    EXPECT_NEAR (m.accuracy, 1.221, 1e-12);
    EXPECT_NEAR (m.precision, 0.0, 1e-12);
    EXPECT_NEAR (m.r_mean, 3.221, 1e-12);
}

TEST (Metrics, OnPathMilling)
{
    const ShapeSpec sq = ShapeSpec::square (60.0);
    Trajectory tr;
    for (int i = 0; i < 1000; ++i)
    {
        const double th = -oracle::pi + 0.00628 * i;
        const double r = sq.radius_at (th);
        tr.samples.push_back (make_sample (i * 0.1, r * std::cos (th), r * std::sin (th), 0.0));
    }
    const MillingMetrics m = milling_metrics (tr, sq, {0.0, false});
    EXPECT_NEAR (m.mre, 0.0, 1e-9);
    EXPECT_NEAR (m.accuracy, 0.0, 1e-9);
}

TEST (Metrics, SinusoidalMillingPrecision)
{
    const double w = 2.0 * oracle::pi / 10.0;
    const Trajectory tr = radial ([w] (double t) { return 30.0 + 0.1 * std::sin (w * t); }, 1000.0 - 0.01, 0.01);
    const MillingMetrics m = milling_metrics (tr, ShapeSpec::circle (30.0), {0.0, false});
    EXPECT_NEAR (m.accuracy, 0.0, 1e-6);
    EXPECT_NEAR (m.precision, 0.1 / std::sqrt (2.0), 1e-6);
    EXPECT_NEAR (m.mre, 0.1, 1e-6);
}

TEST (Metrics, SettleTime)
{
    // Converges exponentially from r = 0 onto 30 m; band 3 m reached at t = ln(10) * 20.
    const Trajectory tr = radial ([] (double t) { return 30.0 * (1.0 - std::exp (-t / 20.0)); }, 300.0, 0.1);
    const MillingMetrics m = milling_metrics (tr, ShapeSpec::circle (30.0));
    ASSERT_TRUE (m.settle_time);
    EXPECT_NEAR (*m.settle_time, 20.0 * std::log (10.0), 0.11);
    const Trajectory never = radial ([] (double) { return 10.0; }, 300.0, 0.1);
    EXPECT_FALSE (milling_metrics (never, ShapeSpec::circle (30.0)).settle_time);
}

TEST (Metrics, SkipExcludesTransientFromMeanOnly)
{
    const Trajectory tr = radial ([] (double t) { return t < 50.0 ? 35.0 : 30.5; }, 100.0, 0.1);
    MillingOptions opt;
    opt.skip = 50.0;
    opt.stats_after_settle = false;
    const MillingMetrics m = milling_metrics (tr, ShapeSpec::circle (30.0), opt);
    EXPECT_NEAR (m.accuracy, 0.5, 1e-12);
    EXPECT_NEAR (m.mre, 5.0, 1e-12);
}

TEST (MetricsProperties, MreAtLeastMpe)
{
    std::mt19937_64 rng (41);
    std::uniform_real_distribution<double> a (0.0, 3.0), w (0.05, 1.0);
    for (int trial = 0; trial < 100; ++trial)
    {
        const double amp = a (rng), om = w (rng);
        const Trajectory tr = radial ([&] (double t) { return 2.0 + amp * std::sin (om * t) * std::sin (0.37 * t); }, 200.0, 0.1);
        const auto m = fencing_metrics (segment_dips (tr, ShapeSpec::circle (2.0)));
        if (m)
            ASSERT_GE (m->mre, m->mpe);
    }
}

TEST (MetricsProperties, DipsPartitionOutsideSamples)
{
    std::mt19937_64 rng (42);
    std::uniform_real_distribution<double> step (-0.3, 0.3);
    Trajectory tr;
    double r = 2.0;
    for (int i = 0; i < 5000; ++i)
    {
        r = std::max (0.0, r + step (rng));
        tr.samples.push_back (make_sample (i * 0.1, r, 0.0, 0.0));
    }
    const ShapeSpec c = ShapeSpec::circle (2.0);
    const auto dips = segment_dips (tr, c);
    for (const TrajectorySample &s : tr.samples)
    {
        int owners = 0;
        for (const Dip &d : dips)
            if (s.t >= d.t_start && (!d.complete || s.t < d.t_end))
                ++owners;
        if (s.r > 2.0)
            ASSERT_EQ (owners, 1) << "t=" << s.t;
    }
}

TEST (MetricsProperties, TimeShiftInvariance)
{
    const auto f = [] (double t) { return 2.0 + std::sin (0.3 * t); };
    const Trajectory a = radial (f, 100.0, 0.1);
    Trajectory b = a;
    for (TrajectorySample &s : b.samples)
        s.t += 123.0;
    const auto ma = fencing_metrics (segment_dips (a, ShapeSpec::circle (2.0)));
    const auto mb = fencing_metrics (segment_dips (b, ShapeSpec::circle (2.0)));
    EXPECT_DOUBLE_EQ (ma->mre, mb->mre);
    EXPECT_DOUBLE_EQ (ma->mpe, mb->mpe);
    EXPECT_NEAR (*ma->art, *mb->art, 1e-9);
}

TEST (MetricsProperties, PrecisionIgnoresRadiusAccuracyTracksIt)
{
    const Trajectory tr = radial ([] (double t) { return 20.0 + 0.3 * std::sin (t); }, 500.0, 0.1);
    const MillingOptions opt {0.0, false};
    const MillingMetrics a = milling_metrics (tr, ShapeSpec::circle (20.0), opt);
    const MillingMetrics b = milling_metrics (tr, ShapeSpec::circle (18.5), opt);
    EXPECT_NEAR (a.precision, b.precision, 1e-12);
    EXPECT_NEAR (b.accuracy - a.accuracy, 1.5, 1e-9);
}

TEST (MetricsProperties, AggregateIgnoresAgentOrder)
{
    std::vector<MillingMetrics> per (3);
    per[0].accuracy = 0.1;
    per[0].precision = 0.2;
    per[1].accuracy = -0.3;
    per[1].precision = 0.05;
    per[2].accuracy = 0.7;
    per[2].precision = 0.4;
    const MillingMetrics a = aggregate_milling (per);
    std::swap (per[0], per[2]);
    const MillingMetrics b = aggregate_milling (per);
    EXPECT_NEAR (a.accuracy, b.accuracy, 1e-15);
    EXPECT_NEAR (a.precision, b.precision, 1e-15);
}
