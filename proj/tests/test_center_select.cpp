#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "rbfdet/errors.hpp"
#include "rbfdet/kmeans.hpp"

using namespace rbfdet;

namespace {

double sqdist(const FeatureVector& a, const FeatureVector& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return s;
}

double distortion_of(const std::vector<FeatureVector>& points,
                     const std::vector<FeatureVector>& centers) {
    double total = 0.0;
    for (const auto& p : points) {
        double best = sqdist(p, centers[0]);
        for (std::size_t c = 1; c < centers.size(); ++c) best = std::min(best, sqdist(p, centers[c]));
        total += best;
    }
    return total;
}

// Exhaustive oracle: best distortion over every assignment of the points
// to k non-empty clusters, with centers at the cluster means. Only viable
// for tiny instances (k^n assignments).
double brute_force_optimal_distortion(const std::vector<FeatureVector>& points, int k) {
    const std::size_t n = points.size();
    const std::size_t dim = points[0].size();
    std::vector<int> assign(n, 0);
    double best = std::numeric_limits<double>::infinity();
    while (true) {
        std::vector<int> counts(k, 0);
        for (int a : assign) ++counts[a];
        if (std::all_of(counts.begin(), counts.end(), [](int c) { return c > 0; })) {
            std::vector<FeatureVector> means(k, FeatureVector(dim, 0.0));
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t d = 0; d < dim; ++d) means[assign[i]][d] += points[i][d];
            for (int c = 0; c < k; ++c)
                for (std::size_t d = 0; d < dim; ++d) means[c][d] /= counts[c];
            double total = 0.0;
            for (std::size_t i = 0; i < n; ++i) total += sqdist(points[i], means[assign[i]]);
            best = std::min(best, total);
        }
        // next assignment in base-k counting order
        std::size_t pos = 0;
        while (pos < n && ++assign[pos] == k) assign[pos++] = 0;
        if (pos == n) break;
    }
    return best;
}

std::vector<FeatureVector> scalar_points(const std::vector<double>& xs) {
    std::vector<FeatureVector> out;
    for (double x : xs) out.push_back({x});
    return out;
}

} // namespace

TEST_SUITE("center-select") {

TEST_CASE("k equal to the number of distinct points reproduces them with zero distortion") {
    const auto points = scalar_points({1.0, -2.0, 5.0, 0.25});
    KMeansConfig cfg;
    cfg.k = 4;
    cfg.seed = 11;
    const CenterSet cs = kmeans(points, cfg);
    REQUIRE(cs.centers.size() == 4);
    CHECK(cs.distortion == 0.0);
    std::multiset<double> got, want;
    for (const auto& c : cs.centers) got.insert(c[0]);
    for (const auto& p : points) want.insert(p[0]);
    CHECK(got == want);
}

TEST_CASE("k = 1 converges to the coordinate-wise mean") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> coord(-4.0, 4.0);
    std::vector<FeatureVector> points;
    FeatureVector mean(3, 0.0);
    for (int i = 0; i < 17; ++i) {
        FeatureVector p(3);
        for (double& v : p) v = coord(rng);
        for (int d = 0; d < 3; ++d) mean[d] += p[d] / 17.0;
        points.push_back(std::move(p));
    }
    KMeansConfig cfg;
    cfg.k = 1;
    const CenterSet cs = kmeans(points, cfg);
    REQUIRE(cs.centers.size() == 1);
    for (int d = 0; d < 3; ++d) CHECK(cs.centers[0][d] == doctest::Approx(mean[d]).epsilon(1e-12));
    CHECK(cs.distortion == doctest::Approx(distortion_of(points, cs.centers)).epsilon(1e-12));
}

TEST_CASE("two tight scalar clusters: k-means matches the brute-force optimum") {
    const auto points = scalar_points({0.0, 0.1, 0.2, 10.0, 10.1, 10.2});
    const double optimal = brute_force_optimal_distortion(points, 2);

    KMeansConfig cfg;
    cfg.k = 2;
    cfg.seed = 3;
    const CenterSet cs = kmeans(points, cfg);
    CHECK(cs.distortion == doctest::Approx(optimal).epsilon(1e-12));

    std::vector<double> centers{cs.centers[0][0], cs.centers[1][0]};
    std::sort(centers.begin(), centers.end());
    CHECK(centers[0] == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(centers[1] == doctest::Approx(10.1).epsilon(1e-12));
}

TEST_CASE("random separated 6-point scalar instances reach the brute-force optimum") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> jitter(-0.3, 0.3);
    std::uniform_real_distribution<double> gap(8.0, 30.0);
    for (int trial = 0; trial < 25; ++trial) {
        const double far = gap(rng);
        std::vector<double> xs;
        for (int i = 0; i < 3; ++i) xs.push_back(jitter(rng));
        for (int i = 0; i < 3; ++i) xs.push_back(far + jitter(rng));
        const auto points = scalar_points(xs);

        KMeansConfig cfg;
        cfg.k = 2;
        cfg.seed = trial;
        const CenterSet cs = kmeans(points, cfg);
        const double optimal = brute_force_optimal_distortion(points, 2);
        CHECK(cs.distortion == doctest::Approx(optimal).epsilon(1e-9));
    }
}

TEST_CASE("invalid requests are rejected") {
    const auto points = scalar_points({1.0, 1.0, 2.0});  // 2 distinct values
    KMeansConfig cfg;
    cfg.k = 3;
    CHECK_THROWS_AS(kmeans(points, cfg), InvalidParameterError);
    CHECK_THROWS_AS(kmeans({}, KMeansConfig{}), InvalidParameterError);
    cfg.k = 0;
    CHECK_THROWS_AS(kmeans(points, cfg), InvalidParameterError);
    CHECK_THROWS_AS(random_subset(points, 4, 0), InvalidParameterError);
    CHECK_THROWS_AS(random_subset({}, 1, 0), InvalidParameterError);
}

TEST_CASE("fixed seed gives bit-identical results") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> coord(-1.0, 1.0);
    std::vector<FeatureVector> points;
    for (int i = 0; i < 40; ++i) {
        FeatureVector p(6);
        for (double& v : p) v = coord(rng);
        points.push_back(std::move(p));
    }
    KMeansConfig cfg;
    cfg.k = 5;
    cfg.seed = 1234;
    const CenterSet a = kmeans(points, cfg);
    const CenterSet b = kmeans(points, cfg);
    CHECK(a.centers == b.centers);
    CHECK(a.distortion == b.distortion);

    const CenterSet r1 = random_subset(points, 7, 99);
    const CenterSet r2 = random_subset(points, 7, 99);
    CHECK(r1.centers == r2.centers);
    CHECK(r1.distortion == r2.distortion);
}

TEST_CASE("distortion trace is non-increasing and ends at or below the start") {
    std::mt19937_64 rng(404);
    std::uniform_real_distribution<double> coord(-10.0, 10.0);
    std::uniform_int_distribution<int> n_points(8, 60);
    std::uniform_int_distribution<int> n_k(1, 6);
    std::uniform_int_distribution<int> n_dim(1, 8);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = n_points(rng);
        const int dim = n_dim(rng);
        std::vector<FeatureVector> points;
        for (int i = 0; i < n; ++i) {
            FeatureVector p(dim);
            for (double& v : p) v = coord(rng);
            points.push_back(std::move(p));
        }
        KMeansConfig cfg;
        cfg.k = std::min(n_k(rng), n);
        cfg.seed = trial;
        std::vector<double> trace;
        const CenterSet cs = kmeans(points, cfg, &trace);
        REQUIRE(trace.size() >= 2);  // initial distortion + at least one iteration
        for (std::size_t i = 1; i < trace.size(); ++i)
            CHECK(trace[i] <= trace[i - 1] * (1.0 + 1e-12) + 1e-12);
        CHECK(cs.distortion == trace.back());
        CHECK(cs.distortion <= trace.front() * (1.0 + 1e-12) + 1e-12);
    }
}

TEST_CASE("center sets have the requested size and live inside the data box") {
    std::mt19937_64 rng(808);
    std::uniform_real_distribution<double> coord(-5.0, 5.0);
    std::vector<FeatureVector> points;
    const int dim = 4;
    for (int i = 0; i < 30; ++i) {
        FeatureVector p(dim);
        for (double& v : p) v = coord(rng);
        points.push_back(std::move(p));
    }
    FeatureVector lo(dim, 1e30), hi(dim, -1e30);
    for (const auto& p : points)
        for (int d = 0; d < dim; ++d) {
            lo[d] = std::min(lo[d], p[d]);
            hi[d] = std::max(hi[d], p[d]);
        }

    for (int k : {1, 3, 9}) {
        KMeansConfig cfg;
        cfg.k = k;
        cfg.seed = k;
        const CenterSet cs = kmeans(points, cfg);
        REQUIRE(static_cast<int>(cs.centers.size()) == k);
        for (const auto& c : cs.centers) {
            REQUIRE(c.size() == static_cast<std::size_t>(dim));
            for (int d = 0; d < dim; ++d) {
                CHECK(c[d] >= lo[d] - 1e-12);
                CHECK(c[d] <= hi[d] + 1e-12);
            }
        }
    }
}

TEST_CASE("well-separated blobs are recovered one center per blob") {
    std::mt19937_64 rng(246);
    std::normal_distribution<double> noise(0.0, 0.5);
    const int dim = 5;
    const std::vector<double> blob_offsets{0.0, 25.0, 50.0, 75.0};
    std::vector<FeatureVector> points;
    for (double off : blob_offsets) {
        for (int i = 0; i < 20; ++i) {
            FeatureVector p(dim);
            for (double& v : p) v = off + noise(rng);
            points.push_back(std::move(p));
        }
    }

    KMeansConfig cfg;
    cfg.k = 4;
    cfg.seed = 7;
    const CenterSet cs = kmeans(points, cfg);

    std::vector<int> hits(blob_offsets.size(), 0);
    for (const auto& c : cs.centers) {
        for (std::size_t b = 0; b < blob_offsets.size(); ++b) {
            bool inside = true;
            for (int d = 0; d < dim; ++d)
                inside = inside && std::abs(c[d] - blob_offsets[b]) < 5.0;
            if (inside) ++hits[b];
        }
    }
    for (int h : hits) CHECK(h == 1);
}

TEST_CASE("random_subset copies existing points") {
    const auto points = scalar_points({3.0, 1.0, 4.0, 1.5, 9.0});

    SUBCASE("k = N returns the whole set") {
        const CenterSet cs = random_subset(points, 5, 42);
        std::multiset<double> got, want;
        for (const auto& c : cs.centers) got.insert(c[0]);
        for (const auto& p : points) want.insert(p[0]);
        CHECK(got == want);
        CHECK(cs.distortion == 0.0);
    }
    SUBCASE("k = 1 on a single point") {
        const CenterSet cs = random_subset(scalar_points({2.5}), 1, 0);
        REQUIRE(cs.centers.size() == 1);
        CHECK(cs.centers[0][0] == 2.5);
    }
    SUBCASE("every selected center is one of the inputs") {
        const CenterSet cs = random_subset(points, 3, 8);
        for (const auto& c : cs.centers)
            CHECK(std::count_if(points.begin(), points.end(),
                                [&](const FeatureVector& p) { return p == c; }) > 0);
        CHECK(cs.distortion == doctest::Approx(distortion_of(points, cs.centers)));
    }
}

} // TEST_SUITE
