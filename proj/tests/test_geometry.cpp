#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "thd/geometry.hpp"

using namespace thd;

namespace {

Matrix to_matrix(const std::vector<std::vector<double>>& rows) {
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j) m.at(i, j) = rows[i][j];
    return m;
}

DistanceMatrix euclidean_2d(const std::vector<std::pair<double, double>>& pts) {
    DistanceMatrix d(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            d.upper(i, j) = std::hypot(pts[i].first - pts[j].first, pts[i].second - pts[j].second);
    return d;
}

std::vector<std::pair<double, double>> random_planar(std::mt19937_64& gen, std::size_t n,
                                                     double scale = 10.0) {
    std::uniform_real_distribution<double> unif(-scale, scale);
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < n; ++i) pts.emplace_back(unif(gen), unif(gen));
    return pts;
}

}  // namespace

TEST_SUITE_BEGIN("geometry");

TEST_CASE("feature_variances basics") {
    SUBCASE("constant column flagged") {
        const auto v = feature_variances(to_matrix({{2.0}, {2.0}, {2.0}}));
        CHECK(v.variance[0] == 0.0);
        CHECK(v.is_zero[0] == 1);
    }
    SUBCASE("population variance of {0,2} is 1") {
        const auto v = feature_variances(to_matrix({{0.0}, {2.0}}));
        CHECK(v.variance[0] == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(v.is_zero[0] == 0);
    }
    SUBCASE("single row is all-zero, all flagged") {
        const auto v = feature_variances(to_matrix({{3.0, -1.0}}));
        CHECK(v.variance == std::vector<double>{0.0, 0.0});
        CHECK(v.is_zero == std::vector<std::uint8_t>{1, 1});
    }
}

TEST_CASE("vne_distance") {
    VarianceInfo unit{{1.0, 1.0}, {0, 0}};
    const std::vector<double> o{0.0, 0.0};
    CHECK(vne_distance(o, o, unit) == 0.0);
    CHECK(vne_distance(o, std::vector<double>{3.0, 4.0}, unit) == doctest::Approx(5.0));

    VarianceInfo v41{{4.0, 1.0}, {0, 0}};
    CHECK(vne_distance(o, std::vector<double>{2.0, 2.0}, v41) ==
          doctest::Approx(std::sqrt(5.0)).epsilon(1e-12));

    CHECK_THROWS_AS(vne_distance(o, std::vector<double>{1.0}, unit), Error);
}

TEST_CASE("vne pseudo-metric properties on random triples") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> unif(-4.0, 4.0);
    for (int trial = 0; trial < 200; ++trial) {
        Matrix m(3, 4);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 4; ++j) m.at(i, j) = unif(gen);
        const auto vars = feature_variances(m);
        const std::span<const double> a{m.row(0), 4}, b{m.row(1), 4}, c{m.row(2), 4};
        const double ab = vne_distance(a, b, vars);
        const double ba = vne_distance(b, a, vars);
        const double bc = vne_distance(b, c, vars);
        const double ac = vne_distance(a, c, vars);
        CHECK(ab == ba);  // symmetry is exact
        CHECK(ac <= ab + bc + 1e-9);
    }
}

TEST_CASE("column scaling cancels out of the vne metric") {
    std::mt19937_64 gen(13);
    std::uniform_real_distribution<double> unif(-4.0, 4.0);
    for (double scale : {0.001, 3.0, 2500.0}) {
        Matrix m(6, 3), scaled(6, 3);
        for (std::size_t i = 0; i < 6; ++i)
            for (std::size_t j = 0; j < 3; ++j) {
                m.at(i, j) = unif(gen);
                scaled.at(i, j) = m.at(i, j) * (j == 1 ? scale : 1.0);
            }
        const auto v1 = feature_variances(m);
        const auto v2 = feature_variances(scaled);
        for (std::size_t i = 0; i < 6; ++i)
            for (std::size_t j = i + 1; j < 6; ++j) {
                const double d1 = vne_distance({m.row(i), 3}, {m.row(j), 3}, v1);
                const double d2 = vne_distance({scaled.row(i), 3}, {scaled.row(j), 3}, v2);
                CHECK(d1 == doctest::Approx(d2).epsilon(1e-9));
            }
    }
}

TEST_CASE("pairwise_distances matches the naive double loop") {
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    Matrix m(3, 5);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 5; ++j) m.at(i, j) = unif(gen);
    const DistanceMatrix d = pairwise_distances(m, Metric::Vne);
    const auto naive = testutil::naive_pairwise(m, detail::metric_weights(m, Metric::Vne));
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(d(i, j) == doctest::Approx(naive[i][j]).epsilon(1e-12));
}

TEST_CASE("pairwise_distances degenerate cases") {
    CHECK(pairwise_distances(to_matrix({{1.0, 2.0}}), Metric::Euclidean).size() == 1);
    const DistanceMatrix d = pairwise_distances(to_matrix({{1.0, 2.0}, {1.0, 2.0}}), Metric::Vne);
    CHECK(d(0, 1) == 0.0);
}

TEST_CASE("pairwise_distances is identical across thread counts") {
    std::mt19937_64 gen(19);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    Matrix m(150, 4);
    for (std::size_t i = 0; i < 150; ++i)
        for (std::size_t j = 0; j < 4; ++j) m.at(i, j) = unif(gen);
    set_thread_limit(1);
    const DistanceMatrix d1 = pairwise_distances(m, Metric::Vne);
    set_thread_limit(4);
    const DistanceMatrix d4 = pairwise_distances(m, Metric::Vne);
    set_thread_limit(0);
    for (std::size_t i = 0; i < 150; ++i)
        for (std::size_t j = i + 1; j < 150; ++j) CHECK(d1(i, j) == d4(i, j));
}

TEST_CASE("classical_mds on two points at distance 4") {
    DistanceMatrix d(2);
    d.upper(0, 1) = 4.0;
    const FilterValues f = classical_mds(d, 1);
    CHECK(f.at(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(f.at(1, 0) == doctest::Approx(-2.0).epsilon(1e-12));
}

TEST_CASE("classical_mds degenerate and error cases") {
    DistanceMatrix identical(4);  // all zeros
    const FilterValues f = classical_mds(identical, 2);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(f.at(i, 0) == 0.0);
        CHECK(f.at(i, 1) == 0.0);
    }
    DistanceMatrix one(1);
    CHECK_THROWS_AS(classical_mds(one, 2), Error);
}

TEST_CASE("classical_mds reproduces the 3-4-5 right triangle") {
    DistanceMatrix d(3);
    d.upper(0, 1) = 3.0;
    d.upper(0, 2) = 4.0;
    d.upper(1, 2) = 5.0;
    const FilterValues f = classical_mds(d, 2);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = i + 1; j < 3; ++j) {
            const double dij = std::hypot(f.at(i, 0) - f.at(j, 0), f.at(i, 1) - f.at(j, 1));
            CHECK(dij == doctest::Approx(d(i, j)).epsilon(1e-9));
        }
}

TEST_CASE("classical_mds reconstructs planar point sets (dense and lanczos paths)") {
    std::mt19937_64 gen(23);
    for (std::size_t n : {5u, 17u, 40u, 1100u}) {  // 1100 exercises the iterative path
        const auto pts = random_planar(gen, n);
        const DistanceMatrix d = euclidean_2d(pts);
        const FilterValues f = classical_mds(d, 2);
        for (std::size_t i = 0; i < n; i += (n > 100 ? 97 : 1))
            for (std::size_t j = i + 1; j < n; j += (n > 100 ? 89 : 1)) {
                const double dij = std::hypot(f.at(i, 0) - f.at(j, 0), f.at(i, 1) - f.at(j, 1));
                const double expected = d(i, j);
                if (expected > 1e-9)
                    CHECK(std::abs(dij - expected) / expected <= 1e-6);
            }
    }
}

TEST_CASE("lanczos matches the dense eigensolver on a random symmetric operator") {
    std::mt19937_64 gen(29);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    const std::size_t n = 180;
    Eigen::MatrixXd a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            const double v = unif(gen);
            a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
            a(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
        }
    auto apply = [&](const double* x, double* y) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                s += a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * x[j];
            y[i] = s;
        }
    };
    const auto pairs = detail::lanczos_topk(n, 2, apply, {}, 160);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    REQUIRE(pairs.values.size() >= 2);
    CHECK(pairs.values[0] ==
          doctest::Approx(es.eigenvalues()(static_cast<Eigen::Index>(n) - 1)).epsilon(1e-9));
    CHECK(pairs.values[1] ==
          doctest::Approx(es.eigenvalues()(static_cast<Eigen::Index>(n) - 2)).epsilon(1e-9));
    // vectors agree up to sign
    for (int a2 = 0; a2 < 2; ++a2) {
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            dot += pairs.vectors[static_cast<std::size_t>(a2)][i] *
                   es.eigenvectors()(static_cast<Eigen::Index>(i),
                                     static_cast<Eigen::Index>(n) - 1 - a2);
        CHECK(std::abs(dot) == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("neighborhood_lens on the equilateral triangle is symmetric") {
    DistanceMatrix d(3);
    d.upper(0, 1) = d.upper(0, 2) = d.upper(1, 2) = 1.0;
    const FilterValues f = neighborhood_lens(d, 2);
    // K3's nonzero Laplacian eigenspace embeds the vertices equidistantly
    std::vector<double> dists;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = i + 1; j < 3; ++j)
            dists.push_back(std::hypot(f.at(i, 0) - f.at(j, 0), f.at(i, 1) - f.at(j, 1)));
    CHECK(dists[0] == doctest::Approx(dists[1]).epsilon(1e-9));
    CHECK(dists[1] == doctest::Approx(dists[2]).epsilon(1e-9));
    CHECK(dists[0] > 0.0);
}

TEST_CASE("neighborhood_lens matches a directly built path-graph Laplacian") {
    // four collinear points, k=1: the kNN graph is the path 0-1-2-3
    DistanceMatrix d(4);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = i + 1; j < 4; ++j)
            d.upper(i, j) = static_cast<double>(j - i);
    const FilterValues f = neighborhood_lens(d, 1);

    // oracle: build that path's normalized Laplacian explicitly
    Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(4, 4);
    const double deg[4] = {1, 2, 2, 1};
    const int edges[3][2] = {{0, 1}, {1, 2}, {2, 3}};
    for (int i = 0; i < 4; ++i) lap(i, i) = 1.0;
    for (const auto& e : edges) {
        lap(e[0], e[1]) = -1.0 / std::sqrt(deg[e[0]] * deg[e[1]]);
        lap(e[1], e[0]) = lap(e[0], e[1]);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lap);
    for (int axis = 0; axis < 2; ++axis) {
        double dot = 0.0, norm_f = 0.0;
        for (std::size_t i = 0; i < 4; ++i) {
            dot += f.at(i, axis) * es.eigenvectors()(static_cast<Eigen::Index>(i), 1 + axis);
            norm_f += f.at(i, axis) * f.at(i, axis);
        }
        CHECK(std::abs(dot) == doctest::Approx(std::sqrt(norm_f)).epsilon(1e-9));
    }
}

TEST_CASE("neighborhood_lens separates far blobs into disjoint boxes") {
    std::mt19937_64 gen(31);
    std::normal_distribution<double> normal(0.0, 0.5);
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i < 30; ++i) pts.emplace_back(normal(gen), normal(gen));
    for (int i = 0; i < 25; ++i) pts.emplace_back(100.0 + normal(gen), normal(gen));
    const DistanceMatrix d = euclidean_2d(pts);
    const FilterValues f = neighborhood_lens(d, 5);

    auto box = [&](std::size_t lo, std::size_t hi) {
        double xmin = 1e300, xmax = -1e300;
        for (std::size_t i = lo; i < hi; ++i) {
            xmin = std::min(xmin, f.at(i, 0));
            xmax = std::max(xmax, f.at(i, 0));
        }
        return std::make_pair(xmin, xmax);
    };
    const auto [a_lo, a_hi] = box(0, 30);
    const auto [b_lo, b_hi] = box(30, 55);
    CHECK((a_hi < b_lo || b_hi < a_lo));
}

TEST_CASE("neighborhood_lens degenerate and error cases") {
    DistanceMatrix identical(5);
    const FilterValues f = neighborhood_lens(identical, 2);
    for (std::size_t i = 0; i < 5; ++i) CHECK((f.at(i, 0) == 0.0 && f.at(i, 1) == 0.0));

    DistanceMatrix d(3);
    CHECK_THROWS_AS(neighborhood_lens(d, 3), Error);
    CHECK_THROWS_AS(neighborhood_lens(d, 0), Error);
}

TEST_CASE("neighborhood_lens iterative path matches a dense oracle on a large graph") {
    // 1100 points force the Lanczos branch; the oracle solves the explicitly
    // built normalized Laplacian densely
    std::mt19937_64 gen(59);
    const auto pts = random_planar(gen, 1100, 50.0);
    const DistanceMatrix d = euclidean_2d(pts);
    const int k = 6;
    const FilterValues f = neighborhood_lens(d, k);

    const auto g = detail::build_knn_graph(d, k);
    // oracle only valid when the graph is connected (single offset-free embedding)
    std::vector<int> seen(1100, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    std::size_t visited = 0;
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        ++visited;
        for (int nb : g.adjacency[static_cast<std::size_t>(v)])
            if (!seen[static_cast<std::size_t>(nb)]) {
                seen[static_cast<std::size_t>(nb)] = 1;
                stack.push_back(nb);
            }
    }
    REQUIRE(visited == 1100);

    Eigen::MatrixXd lap = Eigen::MatrixXd::Identity(1100, 1100);
    for (std::size_t i = 0; i < 1100; ++i)
        for (int nb : g.adjacency[i])
            lap(static_cast<Eigen::Index>(i), nb) =
                -1.0 / std::sqrt(static_cast<double>(g.adjacency[i].size()) *
                                 static_cast<double>(g.adjacency[static_cast<std::size_t>(nb)].size()));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lap);
    for (int axis = 0; axis < 2; ++axis) {
        double dot = 0.0, norm_f = 0.0;
        for (std::size_t i = 0; i < 1100; ++i) {
            dot += f.at(i, axis) * es.eigenvectors()(static_cast<Eigen::Index>(i), 1 + axis);
            norm_f += f.at(i, axis) * f.at(i, axis);
        }
        CHECK(norm_f == doctest::Approx(1.0).epsilon(1e-6));  // unit eigenvector
        CHECK(std::abs(dot) == doctest::Approx(1.0).epsilon(1e-4));
    }
}

TEST_CASE("both lenses are bit-deterministic across repeated invocation") {
    std::mt19937_64 gen(37);
    const auto pts = random_planar(gen, 60);
    const DistanceMatrix d = euclidean_2d(pts);
    const FilterValues m1 = classical_mds(d, 2), m2 = classical_mds(d, 2);
    CHECK(m1.coords == m2.coords);
    const FilterValues n1 = neighborhood_lens(d, 6), n2 = neighborhood_lens(d, 6);
    CHECK(n1.coords == n2.coords);
}

TEST_SUITE_END();
