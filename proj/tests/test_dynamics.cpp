#include "efqs/dynamics.hpp"
#include "efqs/entanglement.hpp"
#include "efqs/errors.hpp"
#include "efqs/filter.hpp"
#include "efqs/quadrature.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>

using namespace efqs;

namespace {

struct System {
    HermitianOperator H;
    PureState         state;
    SpectralData      spec;
};

const System& neel_chain(int L) {
    static std::map<int, System> cache;
    auto                         it = cache.find(L);
    if(it == cache.end()) {
        HamiltonianSpec s;
        s.J   = 1.0;
        s.h_x = 1.2;
        s.h_z = 0.8;
        s.L   = L;
        auto H     = build_hamiltonian(s);
        auto state = product_state(SitePattern::neel(), L);
        auto spec  = eigendecompose(H, state);
        it         = cache.emplace(L, System{H, state, spec}).first;
    }
    return it->second;
}

TimeSeries sampled(double t0, double t1, int n, const std::function<double(double)>& f) {
    TimeSeries s;
    s.times = linspace(t0, t1, n);
    for(double t : s.times) s.values.push_back(f(t));
    s.label = "synthetic";
    return s;
}

} // namespace

TEST(TimeSeries, Validation) {
    TimeSeries s{{0.0, 0.1, 0.3}, {1, 2, 3}, "bad"};
    EXPECT_THROW(s.validate(), ShapeError);
    TimeSeries t{{0.0, 0.1}, {1}, "short"};
    EXPECT_THROW(t.validate(), ShapeError);
    const auto e = sampled(0.0, 1.0, 11, [](double x) { return x * x + x; }).even_extension();
    ASSERT_EQ(e.times.size(), 21u);
    EXPECT_NEAR(e.times.front(), -1.0, 1e-15);
    EXPECT_DOUBLE_EQ(e.values.front(), e.values.back());
    EXPECT_THROW(time_grid(1.0, 1), DomainError);
}

TEST(Evolve, UnitarityAndReversal) {
    const auto& sys = neel_chain(6);
    EXPECT_NEAR(fidelity(evolve(sys.spec, sys.state, 0.0), sys.state), 1.0, 1e-14);
    const auto fwd  = evolve(sys.spec, sys.state, 1.0);
    EXPECT_NEAR(fwd.amplitudes().norm(), 1.0, 1e-12);
    const auto back = evolve(sys.spec, fwd, -1.0);
    EXPECT_NEAR(fidelity(back, sys.state), 1.0, 1e-12);
}

TEST(Evolve, EigenstateOnlyPicksUpPhase) {
    const auto&     sys = neel_chain(6);
    const PureState e(6, sys.spec.eigenvector(17));
    const auto      later = evolve(sys.spec, e, 3.7);
    EXPECT_NEAR(fidelity(e, later), 1.0, 1e-12);
    const auto op = local_observable(Axis::x, 2, 6);
    EXPECT_NEAR(expectation(e, op), expectation(later, op), 1e-12);
}

TEST(Evolve, MatchesRungeKutta) {
    const int          L   = 8;
    const auto&        sys = neel_chain(L);
    const oracle::Mat  H   = oracle::chain_hamiltonian(1.0, 1.2, 0.8, L);
    const oracle::Mat  Sz  = oracle::embed(oracle::sz(), L / 2, L);
    const TimeSeries   s   = observable_series(sys.spec, sys.state, local_observable(Axis::z, L / 2, L), 10.0, 101, "sz4");
    oracle::Vec        psi = oracle::neel(L);
    double             worst = 0.0;
    for(std::size_t i = 0; i < s.times.size(); ++i) {
        if(i > 0) psi = oracle::rk4(H, psi, 0.1, 1e-3);
        worst = std::max(worst, std::abs((psi.adjoint() * Sz * psi)(0).real() - s.values[i]));
    }
    EXPECT_LT(worst, 1e-8);
    // site 4 is down in the Neel state
    EXPECT_NEAR(s.values.front(), -0.5, 1e-14);
    EXPECT_EQ(s.label, "sz4");
}

TEST(ObservableSeries, IdentityIsConstant) {
    const auto& sys = neel_chain(4);
    const auto  s   = observable_series(sys.spec, sys.state, identity_operator(4), 5.0, 51);
    for(double v : s.values) EXPECT_NEAR(v, 1.0, 1e-12);
    EXPECT_THROW(observable_series(sys.spec, sys.state, identity_operator(4), 5.0, 1), DomainError);
}

TEST(ObservableSeries, MultiMatchesSingle) {
    const auto& sys  = neel_chain(6);
    const auto  a    = local_observable(Axis::z, 2, 6);
    const auto  b    = local_observable(Axis::x, 5, 6);
    const auto  both = observable_series(sys.spec, sys.state, {a, b}, 4.0, 200);
    const auto  sb   = observable_series(sys.spec, sys.state, b, 4.0, 200);
    ASSERT_EQ(both.size(), 2u);
    for(std::size_t i = 0; i < sb.values.size(); ++i) EXPECT_NEAR(both[1].values[i], sb.values[i], 1e-13);
    EXPECT_EQ(both[0].label, "op0");
}

TEST(Echo, BasicProperties) {
    const auto& sys = neel_chain(8);
    EXPECT_NEAR(std::abs(loschmidt_echo(sys.spec, 0.0) - cplx(1.0)), 0.0, 1e-12);
    for(int i = 0; i < 50; ++i) EXPECT_LE(std::abs(loschmidt_echo(sys.spec, 0.37 * i)), 1.0 + 1e-12);
    // direct overlap <psi|psi(t)>
    const auto psi_t = evolve(sys.spec, sys.state, 1.3);
    EXPECT_NEAR(std::abs(sys.state.amplitudes().dot(psi_t.amplitudes()) - loschmidt_echo(sys.spec, 1.3)), 0.0, 1e-12);
}

TEST(Echo, SmallTimeCumulant) {
    const int   L   = 8;
    const auto& sys = neel_chain(L);
    const auto  m   = energy_moments(sys.spec, sys.state, 0.0);
    // least squares of log|echo| = -c t^2 on t in (0, 0.1]
    double num = 0.0, den = 0.0;
    for(int i = 1; i <= 20; ++i) {
        const double t = 0.005 * i;
        num += std::log(std::abs(loschmidt_echo(sys.spec, t))) * t * t;
        den += t * t * t * t;
    }
    const double c = -num / den;
    EXPECT_NEAR(c / (m.second_moment / 2.0), 1.0, 0.02);
}

TEST(Echo, RateIsContinuous) {
    const int   L   = 8;
    const auto& sys = neel_chain(L);
    const auto  r   = log_echo_rate(sys.spec, 6.0, 601);
    EXPECT_NEAR(std::abs(r.rate.front()), 0.0, 1e-14);
    for(std::size_t i = 1; i < r.rate.size(); ++i) {
        EXPECT_LT(std::abs(r.rate[i].imag() - r.rate[i - 1].imag()) * L, M_PI);
        EXPECT_NEAR(std::exp(L * r.rate[i].real()), std::abs(r.echo[i]), 1e-10);
    }
}

TEST(Echo, CoarseGridIsRejected) {
    const auto& sys     = neel_chain(4);
    const auto  shifted = sys.H.shifted(-100.0);
    const auto  spec    = eigendecompose(shifted, sys.state);
    EXPECT_THROW(log_echo_rate(spec, 2.0, 21), NumericalError);
}

TEST(GaussianAverage, LimitsAndConstants) {
    const auto c = sampled(-10.0, 10.0, 2001, [](double) { return 0.7; });
    for(double tau : {0.0, 0.5, 2.0}) EXPECT_NEAR(filtered_expectation_prediction(c, tau), 0.7, 1e-14);
    const auto lin = sampled(0.0, 1.0, 11, [](double t) { return 3.0 * t; });
    EXPECT_NEAR(gaussian_average(lin, 0.0, 0.35), 1.05, 1e-14);
    const auto narrow = sampled(-1.0, 1.0, 201, [](double t) { return t; });
    EXPECT_THROW(filtered_expectation_prediction(narrow, 1.0), CoverageError);
    EXPECT_NO_THROW(filtered_expectation_prediction(narrow, 0.2));
}

TEST(GaussianAverage, CosineClosedForm) {
    const double omega = 1.7;
    const auto   s     = sampled(0.0, 40.0, 8001, [&](double t) { return std::cos(omega * t); });
    for(double tau : {0.5, 1.0, 3.0, 8.0}) {
        const double mean = std::exp(-omega * omega * tau * tau / 8.0);
        EXPECT_NEAR(filtered_expectation_prediction(s, tau, 0.0, Symmetry::even), mean, 1e-10) << tau;
        const double var = 0.5 * (1.0 + std::exp(-omega * omega * tau * tau / 2.0)) - mean * mean;
        EXPECT_NEAR(connected_correlator_prediction(s, tau, Symmetry::even), var, 1e-10) << tau;
    }
    EXPECT_NEAR(connected_correlator_prediction(s, 8.0, Symmetry::even), 0.5, 1e-6);
    // the n-replica kernel exp(-2 n t^2 / tau^2) equals the n = 1 kernel at tau / sqrt(n)
    EXPECT_NEAR(gaussian_average(s, 2.0, 0.0, 4.0, Symmetry::even), gaussian_average(s, 1.0, 0.0, 1.0, Symmetry::even), 1e-12);
}

TEST(GaussianAverage, EvenShortcutMatchesTwoSided) {
    const auto& sys = neel_chain(6);
    const auto  op  = local_observable(Axis::z, 3, 6);
    const auto  one = observable_series(sys.spec, sys.state, op, 12.0, 601);
    TimeSeries  two;
    two.times = linspace(-12.0, 12.0, 1201);
    for(double t : two.times) two.values.push_back(expectation(evolve(sys.spec, sys.state, t), op));
    for(double tau : {0.5, 1.5, 3.0}) {
        EXPECT_NEAR(filtered_expectation_prediction(one, tau, 0.0, Symmetry::even), filtered_expectation_prediction(two, tau), 1e-12);
    }
}

TEST(FilteredExpectation, ApproachesEdWithSize) {
    double dev[2] = {0.0, 0.0};
    int    k      = 0;
    for(int L : {6, 12}) {
        const auto& sys = neel_chain(L);
        const auto  op  = local_observable(Axis::z, L / 2, L);
        const auto  s   = observable_series(sys.spec, sys.state, op, 16.0, 801);
        for(int i = 1; i <= 8; ++i) {
            const double tau = 0.5 * i;
            const auto   psi = apply_gaussian_filter(sys.spec, sys.state, {tau, std::nullopt});
            dev[k] += std::abs(expectation(psi, op) - filtered_expectation_prediction(s, tau, 0.0, Symmetry::even));
        }
        ++k;
    }
    EXPECT_LT(dev[1], dev[0]);
}

TEST(TimeAveragedState, Invariants) {
    const auto& sys = neel_chain(8);
    const auto  r   = Region(8, {4});
    const auto  rho = time_averaged_density_matrix(sys.spec, sys.state, 2.0, r);
    EXPECT_NEAR(rho.matrix().trace().real(), 1.0, 1e-10);
    EXPECT_LT((rho.matrix() - rho.matrix().adjoint()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_GE(rho.spectrum().minCoeff(), -1e-10);

    const auto rho0 = time_averaged_density_matrix(sys.spec, sys.state, 0.0, Region::range(8, 2, 5));
    const auto ref0 = reduced_density_matrix(sys.state, Region::range(8, 2, 5));
    EXPECT_LT((rho0.matrix() - ref0.matrix()).cwiseAbs().maxCoeff(), 1e-12);

    const auto full = time_averaged_density_matrix(sys.spec, sys.state, 0.0, Region::all(8));
    EXPECT_NEAR(full.spectrum().maxCoeff(), 1.0, 1e-12);
    EXPECT_NEAR((full.matrix() * full.matrix()).trace().real(), 1.0, 1e-12);

    AveragingGrid g;
    g.half_window_factor = 2.0;
    EXPECT_THROW(time_averaged_density_matrix(sys.spec, sys.state, 1.0, r, g), CoverageError);
}

TEST(TimeAveragedState, MatchesFilteredStateWithSize) {
    double dev[2];
    int    k = 0;
    for(int L : {6, 10}) {
        const auto& sys  = neel_chain(L);
        const auto  r    = Region(L, {L / 2});
        const auto  avg  = time_averaged_density_matrix(sys.spec, sys.state, 2.0, r);
        const auto  filt = reduced_density_matrix(apply_gaussian_filter(sys.spec, sys.state, {2.0, std::nullopt}), r);
        dev[k++]         = (avg.matrix() - filt.matrix()).norm();
    }
    EXPECT_LT(dev[1], dev[0]);
}

TEST(ConnectedCorrelator, ProductAndBell) {
    const auto neel = product_state(SitePattern::neel(), 4);
    EXPECT_NEAR(connected_correlator(neel, local_observable(Axis::z, 1, 4), local_observable(Axis::z, 3, 4)), 0.0, 1e-12);
    const auto yp = product_state(SitePattern::yplus(), 4);
    EXPECT_NEAR(connected_correlator(yp, local_observable(Axis::y, 1, 4), local_observable(Axis::x, 4, 4)), 0.0, 1e-12);

    const auto bell = PureState::normalized(2, Eigen::Vector4cd(1, 0, 0, 1));
    EXPECT_NEAR(connected_correlator(bell, local_observable(Axis::z, 1, 2), local_observable(Axis::z, 2, 2)), 0.25, 1e-14);
    EXPECT_THROW(connected_correlator(bell, local_observable(Axis::z, 1, 2), local_observable(Axis::x, 1, 2)), DomainError);
}

TEST(ConnectedCorrelator, PredictionProperties) {
    const auto c = sampled(0.0, 20.0, 1001, [](double) { return -0.3; });
    for(double tau : {0.0, 1.0, 4.0}) EXPECT_NEAR(connected_correlator_prediction(c, tau, Symmetry::even), 0.0, 1e-14);

    const auto& sys = neel_chain(8);
    const auto  ox  = local_observable(Axis::z, 2, 8);
    const auto  oy  = local_observable(Axis::z, 6, 8);
    const auto  s   = observable_series(sys.spec, sys.state, {ox, oy}, 16.0, 801);
    EXPECT_NEAR(connected_correlator_prediction(s[0], 0.0, Symmetry::even, s[1]), 0.0, 1e-14);
    for(double tau : {0.5, 1.0, 2.0, 3.0}) EXPECT_GE(connected_correlator_prediction(s[0], tau, Symmetry::even), -1e-14);

    const auto psi = apply_gaussian_filter(sys.spec, sys.state, {2.0, std::nullopt});
    EXPECT_GT(std::abs(connected_correlator(psi, ox, oy)), 1e-3);
    EXPECT_GT(connected_correlator_prediction(s[0], 2.0, Symmetry::even, s[1]), 1e-3);
}
