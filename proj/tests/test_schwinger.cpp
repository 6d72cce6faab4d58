#include <catch_amalgamated.hpp>

#include <random>

#include "jsladder/schwinger.hpp"
#include "oracles.hpp"

using namespace jsladder;

namespace {

Eigen::MatrixXcd random_matrix(int m, std::mt19937& rng) {
    std::normal_distribution<double> g;
    Eigen::MatrixXcd x(m, m);
    for (int i = 0; i < m; ++i) {
        for (int k = 0; k < m; ++k) x(i, k) = Complex(g(rng), g(rng));
    }
    return x;
}

Eigen::MatrixXcd dense(const SparseOperator& op) { return Eigen::MatrixXcd(op.matrix()); }

}  // namespace

TEST_CASE("generators match the dense construction", "[schwinger]") {
    for (int s = 1; s <= 3; ++s) {
        const int n_max = s == 3 ? 3 : 4;
        const auto g = su2_generators(make_basis(s, n_max));
        const oracle::Dense d(s, n_max);
        CHECK((dense(g.Jz).real() - d.jz()).norm() < 1e-12);
        CHECK((dense(g.Jplus).real() - d.jplus()).norm() < 1e-12);
        CHECK((dense(g.Jminus).real() - d.jplus().transpose()).norm() < 1e-12);
        CHECK((dense(g.Ntot).real() - d.n()).norm() < 1e-12);
        CHECK((dense(g.J2).real() - d.j2()).norm() < 1e-10);
        CHECK(g.Jz.particle_budget() == 0);
        CHECK(g.J2.particle_budget() == 0);
    }
}

TEST_CASE("the map is a Lie homomorphism without truncation loss", "[schwinger][property]") {
    std::mt19937 rng(99);
    for (int s = 1; s <= 2; ++s) {
        const auto b = make_basis(s, 3);
        const int m = 2 * s + 1;
        for (int trial = 0; trial < 5; ++trial) {
            const Eigen::MatrixXcd x = random_matrix(m, rng);
            const Eigen::MatrixXcd y = random_matrix(m, rng);
            const auto lhs = commutator(jordan_schwinger(b, x), jordan_schwinger(b, y));
            const auto rhs = jordan_schwinger(b, x * y - y * x);
            CHECK(residual(lhs, rhs, 0).frobenius_relative < 1e-12);
            // linearity
            CHECK(residual(jordan_schwinger(b, 2.0 * x + y), 2.0 * jordan_schwinger(b, x) + jordan_schwinger(b, y), 0)
                      .frobenius_relative < 1e-13);
        }
        CHECK_THROWS_AS(jordan_schwinger(b, Eigen::MatrixXcd::Identity(m + 1, m + 1)), std::invalid_argument);
    }
}

TEST_CASE("su(2) relations on the whole truncated space", "[schwinger]") {
    for (int s = 1; s <= 3; ++s) {
        const auto g = su2_generators(make_basis(s, 3));
        CHECK(residual(commutator(g.Jz, g.Jplus), g.Jplus, 0).frobenius_relative < 1e-12);
        CHECK(residual(commutator(g.Jz, g.Jminus), -g.Jminus, 0).frobenius_relative < 1e-12);
        CHECK(residual(commutator(g.Jplus, g.Jminus), 2.0 * g.Jz, 0).frobenius_relative < 1e-12);
        for (const auto* x : {&g.Jz, &g.Jplus, &g.Jminus, &g.Ntot}) {
            CHECK(commutation_residual(g.J2, *x, Restriction::interior(0)).frobenius_relative < 1e-12);
        }
    }
}

TEST_CASE("one particle carries spin s", "[schwinger]") {
    for (int s = 1; s <= 3; ++s) {
        const auto g = su2_generators(make_basis(s, 1));
        for (const auto& st : enumerate_sector(s, 1, 1)) {
            const StateVector v = basis_vector(*g.basis, st);
            CHECK((g.J2.apply(v) - double(s * (s + 1)) * v).norm() < 1e-12);
        }
    }
}

TEST_CASE("j-hat squares back to the Casimir", "[schwinger][spectral]") {
    for (int s = 1; s <= 2; ++s) {
        const auto g = su2_generators(make_basis(s, 4));
        const CasimirSpectrum cs(g);
        const auto j = cs.j_hat();
        const auto id = SparseOperator::identity(g.basis);
        CHECK(residual(j * (j + id), g.J2, 0).frobenius_relative < 1e-10);
        CHECK(commutation_residual(j, g.Jplus, Restriction::interior(0)).frobenius_relative < 1e-10);
        CHECK(residual(cs.decomposition().reassemble(), g.J2, 0).frobenius_relative < 1e-10);
    }
}

TEST_CASE("kernel multiplicities match the weight-counting oracle", "[schwinger][oracle]") {
    for (int s = 1; s <= 2; ++s) {
        const int n_max = 4;
        const auto g = su2_generators(make_basis(s, n_max));
        const CasimirSpectrum cs(g);
        const oracle::Dense d(s, n_max);
        const Eigen::MatrixXd j2 = d.j2();
        for (int n = 0; n <= n_max; ++n) {
            std::map<int, int> got;
            for (const auto& kv : cs.kernel(n)) ++got[kv.j];
            std::map<int, int> counted;
            for (int j = 0; j <= n * s; ++j) {
                if (int m = oracle::multiplicity(s, n, j); m > 0) counted[j] = m;
            }
            CHECK(got == counted);
            CHECK(got == oracle::j_counts(j2, d.sector(n, 0)));
        }
    }
}

TEST_CASE("kernel vectors are orthonormal weight-0 eigenvectors", "[schwinger]") {
    const auto g = su2_generators(make_basis(2, 4));
    const CasimirSpectrum cs(g);
    const auto k = cs.kernel(4);
    REQUIRE(k.size() == oracle::count(2, 4, 4, 0));
    for (std::size_t a = 0; a < k.size(); ++a) {
        CHECK(g.Jz.apply(k[a].vector).norm() < 1e-12);
        CHECK((g.J2.apply(k[a].vector) - double(k[a].j * (k[a].j + 1)) * k[a].vector).norm() < 1e-10);
        for (std::size_t b = 0; b < k.size(); ++b) {
            CHECK(std::abs(k[a].vector.dot(k[b].vector) - (a == b ? 1.0 : 0.0)) < 1e-12);
        }
        if (a > 0) CHECK(k[a - 1].j <= k[a].j);
    }
    CHECK_THROWS_AS(jz_kernel(g, 5), std::invalid_argument);
}

TEST_CASE("spectral functions reject bad input", "[spectral]") {
    const auto g = su2_generators(make_basis(1, 2));
    CHECK_THROWS_AS(decompose(g.Jplus), SpectralError);               // couples sectors
    CHECK_THROWS_AS(decompose(Complex(0, 1) * g.Jz), SpectralError);  // not hermitian
    const CasimirSpectrum cs(g);
    CHECK_THROWS_AS(cs.function([](int j, SectorKey) { return 1.0 / j; }), SpectralError);
}
