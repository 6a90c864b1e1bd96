#include "chronoslyap/error.hpp"
#include "chronoslyap/timescale.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace chronoslyap;

namespace {

TimeScaleWindow pulse11(double t0, double t_end) { return make_canonical(CanonicalKind::pulse, {}, t0, t_end); }

void check_code(ErrorCode expected, auto&& fn) {
    try {
        fn();
        FAIL("expected " << error_name(expected));
    } catch (const Error& e) {
        CHECK(e.code() == expected);
    }
}

}  // namespace

TEST_CASE("sigma rho mu on canonical scales") {
    const auto p = pulse11(0, 3);
    CHECK(p.sigma(0.5) == 0.5);
    CHECK(p.sigma(1) == 2);
    CHECK(p.rho(2) == 1);
    CHECK(p.mu(1) == 1);
    CHECK(p.mu(0.3) == 0);

    const auto q = make_canonical(CanonicalKind::quantum, {}, 1, 8);
    CHECK(q.sigma(4) == 8);
    CHECK(q.mu(4) == 4);

    const auto z = make_canonical(CanonicalKind::integers, {}, 0, 10);
    CHECK(z.rho(3) == 2);
    const auto r = make_canonical(CanonicalKind::reals, {}, 0, 1);
    CHECK(r.rho(0.5) == 0.5);
    CHECK(r.mu(0.3) == 0);

    CanonicalParams hp;
    hp.h = 0.25;
    const auto hz = make_canonical(CanonicalKind::h_uniform, hp, 0, 2);
    for (const auto& s : hz.segments())
        if (s.a < 2) CHECK(hz.mu(s.a) == doctest::Approx(0.25));
}

TEST_CASE("window end conventions") {
    const auto z = make_canonical(CanonicalKind::integers, {}, 0, 5);
    CHECK(z.sigma(5) == 5);
    CHECK(z.rho(0) == 0);
    CHECK(z.mu(5) == 0);
}

TEST_CASE("classification") {
    const auto z = make_canonical(CanonicalKind::integers, {}, 0, 10);
    CHECK(z.classify(5).isolated());
    const auto r = make_canonical(CanonicalKind::reals, {}, 0, 1);
    CHECK(r.classify(0.5).dense());
    const auto p = pulse11(0, 3);
    const auto c = p.classify(1);
    CHECK(c.left_dense());
    CHECK(c.right_scattered);
    CHECK_FALSE(c.isolated());
    const auto c2 = p.classify(2);
    CHECK(c2.left_scattered);
    CHECK(c2.right_dense());
}

TEST_CASE("make_canonical examples") {
    CanonicalParams hp;
    hp.h = 1;
    const auto h = make_canonical(CanonicalKind::h_uniform, hp, 0, 5);
    REQUIRE(h.segments().size() == 6);
    for (int k = 0; k <= 5; ++k) CHECK(h.segments()[k] == Segment{double(k), double(k)});

    const auto p = pulse11(0, 3);
    REQUIRE(p.segments().size() == 2);
    CHECK(p.segments()[0] == Segment{0, 1});
    CHECK(p.segments()[1] == Segment{2, 3});

    const auto q = make_canonical(CanonicalKind::quantum, {}, 1, 8);
    REQUIRE(q.segments().size() == 4);
    CHECK(q.segments()[0].a == 1);
    CHECK(q.segments()[3].a == 8);
}

TEST_CASE("quantum scale keeps 0 only from a window starting there") {
    CanonicalParams qp;
    qp.min_spacing = 1e-3;
    const auto q = make_canonical(CanonicalKind::quantum, qp, 0, 4);
    CHECK(q.segments().front() == Segment{0, 0});
    CHECK(q.contains(0));
    for (std::size_t i = 1; i + 1 < q.segments().size(); ++i) {
        const double t = q.segments()[i].a;
        CHECK(q.mu(t) == doctest::Approx(t));  // (q − 1)t with q = 2
        CHECK(q.mu(t) >= qp.min_spacing * (1 - 1e-12));
    }
    const auto q1 = make_canonical(CanonicalKind::quantum, qp, 0.5, 4);
    CHECK_FALSE(q1.contains(0));
}

TEST_CASE("make_canonical errors") {
    CanonicalParams bad;
    bad.h = 0;
    check_code(ErrorCode::InvalidParameter, [&] { make_canonical(CanonicalKind::h_uniform, bad, 0, 1); });
    CanonicalParams badq;
    badq.q = 1;
    check_code(ErrorCode::InvalidParameter, [&] { make_canonical(CanonicalKind::quantum, badq, 1, 2); });
    check_code(ErrorCode::EmptyWindow, [&] { make_canonical(CanonicalKind::integers, {}, 0.2, 0.8); });
    check_code(ErrorCode::EmptyWindow, [&] { make_canonical(CanonicalKind::reals, {}, 2, 1); });
    check_code(ErrorCode::NotInTimeScale, [&] { pulse11(0, 3).sigma(1.5); });
    check_code(ErrorCode::InvalidParameter, [] { TimeScaleWindow({{0, 1}, {0.5, 2}}); });
}

TEST_CASE("grid examples") {
    const Grid g1(make_canonical(CanonicalKind::reals, {}, 0, 1), 0.5);
    CHECK(g1.times() == std::vector<double>{0, 0.5, 1});
    const Grid g2(make_canonical(CanonicalKind::integers, {}, 0, 2), 0.1);
    CHECK(g2.times() == std::vector<double>{0, 1, 2});
    const Grid g3(pulse11(0, 3), 0.5);
    CHECK(g3.times() == std::vector<double>{0, 0.5, 1, 2, 2.5, 3});
    CHECK_THROWS_AS(Grid(pulse11(0, 3), 0.0), Error);
}

TEST_CASE("grid invariants on random explicit scales") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.05, 1.0);
    std::bernoulli_distribution point(0.4);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Segment> segs;
        double t = 0;
        for (int k = 0; k < 8; ++k) {
            const double len = point(rng) ? 0.0 : u(rng);
            segs.push_back({t, t + len});
            t += len + u(rng);
        }
        const TimeScaleWindow w(segs);
        const Grid g(w, 0.07);
        for (const auto& s : segs) {
            int count_a = 0, count_b = 0;
            for (const auto& p : g.points()) {
                count_a += p.t == s.a;
                count_b += p.t == s.b;
            }
            CHECK(count_a == 1);
            CHECK(count_b == 1);
        }
        for (std::size_t i = 0; i + 1 < g.size(); ++i) {
            const auto& p = g[i];
            CHECK(w.contains(p.t));
            CHECK(p.mu >= 0);
            CHECK(p.mu == doctest::Approx(w.sigma(p.t) - p.t));
            CHECK((w.sigma(p.t) > p.t) == (p.mu > 0));
            if (p.mu == 0) CHECK(g[i + 1].t - p.t <= 0.07 + 1e-12);
            if (p.mu > 0 && w.classify(g[i + 1].t).left_scattered) CHECK(w.rho(g[i + 1].t) == p.t);
        }
        for (std::size_t k = 0; k + 1 < segs.size(); ++k)
            CHECK_FALSE(w.contains(0.5 * (segs[k].b + segs[k + 1].a)));
    }
}

TEST_CASE("explicit point lists") {
    const auto w = make_points({3, 1, 2, 2});
    REQUIRE(w.segments().size() == 3);
    CHECK(w.mu(1) == 1);
    CHECK(w.classify(2).isolated());
}
