#include <doctest.h>

#include <cmath>

#include "fdct/errors.hpp"
#include "fdct/fbp.hpp"
#include "fdct/metrics.hpp"
#include "fdct/noise.hpp"
#include "fdct/phantom.hpp"
#include "fdct/projector.hpp"
#include "fdct/rng.hpp"
#include "oracles.hpp"

using namespace fdct;

namespace {
Image random_image(std::int64_t n, Rng& rng) {
    Image img(n, n);
    for (auto& v : img.v) v = rng.uniform();
    return img;
}

FanGeometry small_geometry(std::int64_t views, std::int64_t dets) {
    FanGeometry g;
    g.n_views = views;
    g.n_detectors = dets;
    return g;
}
}  // namespace

TEST_SUITE("phantom") {
    TEST_CASE("shepp-logan values stay inside [0,1]") {
        const Image img = make_phantom(PhantomKind::shepp_logan, 64, 0);
        CHECK(img.height() == 64);
        for (double v : img.v) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }

    TEST_CASE("random ellipses are bit-deterministic in the seed") {
        const Image a = make_phantom(PhantomKind::random_ellipses, 32, 77);
        const Image b = make_phantom(PhantomKind::random_ellipses, 32, 77);
        CHECK(a.v == b.v);
        const Image c = make_phantom(PhantomKind::random_ellipses, 32, 78);
        CHECK(a.v != c.v);
    }

    TEST_CASE("center pixel equals the membership sum at its coordinate") {
        const std::int64_t n = 64;
        const Image img = make_phantom(PhantomKind::shepp_logan, n, 0);
        // Center pixel (n/2, n/2) sits at normalized (+1/n, -1/n).
        const double x = -1.0 + (static_cast<double>(n / 2) + 0.5) * 2.0 / n;
        const double y = 1.0 - (static_cast<double>(n / 2) + 0.5) * 2.0 / n;
        double expected = 0.0;
        for (const auto& e : shepp_logan_ellipses())
            if (e.contains(x, y)) expected += e.intensity;
        expected = std::clamp(expected, 0.0, 1.0);
        CHECK(img.at(n / 2, n / 2) == doctest::Approx(expected).epsilon(1e-12));
    }

    TEST_CASE("tiny sizes are rejected") {
        CHECK_THROWS_AS(make_phantom(PhantomKind::shepp_logan, 7, 0), DomainError);
    }
}

TEST_SUITE("projector") {
    TEST_CASE("zero image projects to the zero sinogram") {
        const Image img(16, 16);
        const Sinogram s = forward_project(img, small_geometry(8, 8));
        for (double v : s.v) CHECK(v == 0.0);
    }

    TEST_CASE("central ray through a disk reads the full chord") {
        // Odd grid and odd detector count give a ray exactly through the
        // center pixel row, where the rasterized chord is 2R by counting.
        const std::int64_t n = 65;
        const double radius = 20.5;
        Image img(n, n);
        const double mid = static_cast<double>(n) / 2.0;
        for (std::int64_t r = 0; r < n; ++r)
            for (std::int64_t c = 0; c < n; ++c) {
                const double dx = static_cast<double>(c) + 0.5 - mid;
                const double dy = static_cast<double>(r) + 0.5 - mid;
                if (dx * dx + dy * dy <= radius * radius) img.at(r, c) = 1.0;
            }
        FanGeometry geom = small_geometry(4, 65);
        const Sinogram s = forward_project(img, geom);
        CHECK(s.at(0, 32) == doctest::Approx(2.0 * radius).epsilon(1e-3));
    }

    TEST_CASE("siddon matches the per-pixel clipping oracle") {
        Rng rng(5);
        const FanGeometry geom = small_geometry(8, 8);
        for (int trial = 0; trial < 20; ++trial) {
            const Image img = random_image(8, rng);
            const Sinogram s = forward_project(img, geom);
            for (std::int64_t v = 0; v < geom.n_views; ++v)
                for (std::int64_t d = 0; d < geom.n_detectors; ++d) {
                    const RaySegment ray = ray_in_grid_frame(geom, v, d, 8);
                    const double ref = oracles::ray_integral_bruteforce(img, ray.a, ray.b);
                    const double got = s.at(v, d);
                    const double denom = std::max(std::abs(ref), 1e-9);
                    CHECK(std::abs(got - ref) / denom < 1e-9);
                }
        }
    }

    TEST_CASE("projection is linear") {
        Rng rng(6);
        const FanGeometry geom = small_geometry(6, 10);
        const Image a = random_image(12, rng);
        const Image b = random_image(12, rng);
        Image combo(12, 12);
        for (std::size_t i = 0; i < combo.v.size(); ++i) combo.v[i] = 2.5 * a.v[i] - 0.75 * b.v[i];
        const Sinogram sa = forward_project(a, geom);
        const Sinogram sb = forward_project(b, geom);
        const Sinogram sc = forward_project(combo, geom);
        for (std::size_t i = 0; i < sc.v.size(); ++i) {
            const double want = 2.5 * sa.v[i] - 0.75 * sb.v[i];
            CHECK(std::abs(sc.v[i] - want) <= 1e-10 * std::max(1.0, std::abs(want)));
        }
    }

    TEST_CASE("non-square images are rejected") {
        Image img(8, 9);
        CHECK_THROWS_AS(forward_project(img, small_geometry(4, 8)), ShapeError);
    }
}

TEST_SUITE("fbp") {
    TEST_CASE("zero sinogram reconstructs to zero") {
        const FanGeometry geom = small_geometry(16, 16);
        const Sinogram s(16, 16);
        const Image img = fbp(s, geom);
        for (double v : img.v) CHECK(v == 0.0);
    }

    TEST_CASE("fbp is homogeneous and additive") {
        Rng rng(7);
        const FanGeometry geom = small_geometry(24, 16);
        Sinogram s1(24, 16), s2(24, 16);
        for (auto& v : s1.v) v = rng.uniform(-1.0, 1.0);
        for (auto& v : s2.v) v = rng.uniform(-1.0, 1.0);
        Sinogram scaled(24, 16), summed(24, 16);
        for (std::size_t i = 0; i < s1.v.size(); ++i) {
            scaled.v[i] = -3.0 * s1.v[i];
            summed.v[i] = s1.v[i] + s2.v[i];
        }
        const Image f1 = fbp(s1, geom);
        const Image f2 = fbp(s2, geom);
        const Image fs = fbp(scaled, geom);
        const Image fsum = fbp(summed, geom);
        for (std::size_t i = 0; i < f1.v.size(); ++i) {
            CHECK(fs.v[i] == doctest::Approx(-3.0 * f1.v[i]).epsilon(1e-9));
            CHECK(fsum.v[i] ==
                  doctest::Approx(f1.v[i] + f2.v[i]).epsilon(1e-9).scale(std::abs(f1.v[i]) + 1.0));
        }
    }

    TEST_CASE("dimension mismatch is rejected") {
        const Sinogram s(10, 16);
        CHECK_THROWS_AS(fbp(s, small_geometry(12, 16)), ShapeError);
    }

    TEST_CASE("shepp-logan round trip clears the pinned quality floor") {
        // Floor calibrated once on this implementation (measured ~21.9 dB
        // with 360 views x 256 detectors at 64x64); pinned with margin as a
        // regression bound.
        FanGeometry geom;
        geom.n_views = 360;
        geom.n_detectors = 256;
        const Image phantom = make_phantom(PhantomKind::shepp_logan, 64, 0);
        const Sinogram sino = forward_project(phantom, geom);
        FbpOptions opts;
        opts.image_size = 64;
        const Image recon = fbp(sino, geom, opts);
        const double p = psnr(recon, phantom, data_range_of(phantom));
        CHECK(p >= 20.0);
    }
}

TEST_SUITE("noise") {
    TEST_CASE("infinite dose passes the sinogram through untouched") {
        Sinogram s(4, 4);
        for (std::size_t i = 0; i < s.v.size(); ++i) s.v[i] = 0.1 * static_cast<double>(i);
        DoseModel dose;
        dose.photon_count = std::numeric_limits<double>::infinity();
        dose.electronic_sigma = 0.0;
        const Sinogram out = simulate_low_dose(s, dose);
        CHECK(out.v == s.v);
    }

    TEST_CASE("identical seeds give identical realizations") {
        Sinogram s(8, 8, 1.0);
        DoseModel dose;
        dose.photon_count = 1e5;
        dose.seed = 42;
        const Sinogram a = simulate_low_dose(s, dose);
        const Sinogram b = simulate_low_dose(s, dose);
        CHECK(a.v == b.v);
        dose.seed = 43;
        const Sinogram c = simulate_low_dose(s, dose);
        CHECK(a.v != c.v);
    }

    TEST_CASE("monte-carlo variance matches the log-poisson delta method") {
        // var(-ln(N/I0)) ~= exp(x)/I0 for N ~ Poisson(I0 exp(-x)).
        const double x = 1.0, i0 = 1e5;
        const int draws = 100000;
        Sinogram s(1, 1, x);
        double sum = 0.0, sumsq = 0.0;
        for (int i = 0; i < draws; ++i) {
            DoseModel dose;
            dose.photon_count = i0;
            dose.seed = static_cast<std::uint64_t>(i) + 1;
            const double out = simulate_low_dose(s, dose).v[0];
            sum += out;
            sumsq += out * out;
        }
        const double mean = sum / draws;
        const double var = sumsq / draws - mean * mean;
        const double expected = std::exp(x) / i0;
        CHECK(std::abs(var - expected) / expected < 0.05);
    }

    TEST_CASE("lower dose means strictly more output variance") {
        const double x = 2.0;
        Sinogram s(1, 1, x);
        auto variance_at = [&](double i0) {
            double sum = 0.0, sumsq = 0.0;
            const int draws = 100;
            for (int i = 0; i < draws; ++i) {
                DoseModel dose;
                dose.photon_count = i0;
                dose.seed = static_cast<std::uint64_t>(i) + 1;
                const double out = simulate_low_dose(s, dose).v[0];
                sum += out;
                sumsq += out * out;
            }
            const double mean = sum / draws;
            return sumsq / draws - mean * mean;
        };
        CHECK(variance_at(1e4) > variance_at(1e5));
    }

    TEST_CASE("counts are clamped before the log under photon starvation") {
        Sinogram s(1, 1, 50.0);  // exp(-50) * I0 is essentially zero counts
        DoseModel dose;
        dose.photon_count = 1e5;
        dose.seed = 9;
        const Sinogram out = simulate_low_dose(s, dose);
        CHECK(std::isfinite(out.v[0]));
        CHECK(out.v[0] == doctest::Approx(std::log(1e5)));  // -ln(1/I0)
    }
}
