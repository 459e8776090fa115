#include <doctest.h>

#include <cmath>

#include "fdct/rng.hpp"

using fdct::Rng;

TEST_SUITE("rng") {
    TEST_CASE("same seed, same stream") {
        Rng a(123), b(123);
        for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
    }

    TEST_CASE("uniform_int stays in range and hits the endpoints") {
        Rng rng(1);
        bool lo = false, hi = false;
        for (int i = 0; i < 2000; ++i) {
            const auto v = rng.uniform_int(3, 7);
            CHECK(v >= 3);
            CHECK(v <= 7);
            lo |= v == 3;
            hi |= v == 7;
        }
        CHECK(lo);
        CHECK(hi);
    }

    TEST_CASE("state round trips through text") {
        Rng a(99);
        for (int i = 0; i < 17; ++i) a.uniform();
        const std::string snap = a.state();
        std::vector<double> ahead;
        for (int i = 0; i < 10; ++i) ahead.push_back(a.uniform());
        Rng b;
        b.set_state(snap);
        for (int i = 0; i < 10; ++i) CHECK(b.uniform() == ahead[static_cast<std::size_t>(i)]);
    }

    TEST_CASE("normal moments are sane") {
        Rng rng(4);
        double sum = 0.0, sumsq = 0.0;
        const int n = 50000;
        for (int i = 0; i < n; ++i) {
            const double z = rng.normal();
            sum += z;
            sumsq += z * z;
        }
        CHECK(std::abs(sum / n) < 0.02);
        CHECK(std::abs(sumsq / n - 1.0) < 0.03);
    }

    TEST_CASE("poisson mean tracks lambda across both samplers") {
        Rng rng(5);
        for (double lambda : {0.5, 4.0, 40.0, 4000.0}) {
            double sum = 0.0;
            const int n = 20000;
            for (int i = 0; i < n; ++i) sum += static_cast<double>(rng.poisson(lambda));
            const double mean = sum / n;
            CHECK(std::abs(mean - lambda) < 4.0 * std::sqrt(lambda / n) + 1e-3);
        }
    }
}
