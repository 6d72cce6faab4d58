#include <catch_amalgamated.hpp>

#include <random>

#include "jsladder/fock.hpp"
#include "jsladder/sparse_operator.hpp"
#include "oracles.hpp"

using namespace jsladder;
using Catch::Matchers::WithinAbs;

namespace {

Eigen::MatrixXd dense_real(const SparseOperator& op) {
    return Eigen::MatrixXcd(op.matrix()).real();
}

}  // namespace

TEST_CASE("basis enumeration agrees with a brute-force odometer", "[fock]") {
    for (int s = 0; s <= 2; ++s) {
        for (int n_max = 0; n_max <= 4; ++n_max) {
            const SectorBasis b = enumerate_sector(s, n_max);
            const auto expected = oracle::states(s, n_max);
            REQUIRE(b.size() == expected.size());
            REQUIRE(b.size() == dimension(s, n_max));
            for (std::size_t i = 0; i < b.size(); ++i) CHECK(b.state(i).occupations() == expected[i]);
        }
    }
}

TEST_CASE("known basis sizes", "[fock]") {
    CHECK(dimension(1, 2) == 10);
    CHECK(dimension(2, 4) == 126);
    CHECK(dimension(1, 5) == 56);
    CHECK(enumerate_sector(1, 2, 2, 0).size() == 2);  // (1,0,1), (0,2,0)
}

TEST_CASE("sector constraints filter totals and weights", "[fock]") {
    const int s = 2;
    const int n_max = 4;
    for (int n = 0; n <= n_max; ++n) {
        for (int w = -n * s; w <= n * s; ++w) {
            const SectorBasis b = enumerate_sector(s, n_max, n, w);
            CHECK(b.size() == oracle::count(s, n_max, n, w));
            for (const auto& st : b) {
                CHECK(st.total() == n);
                CHECK(st.weight() == w);
            }
        }
    }
}

TEST_CASE("state index round-trips and rejects outsiders", "[fock]") {
    const SectorBasis b = enumerate_sector(1, 3);
    for (std::size_t i = 0; i < b.size(); ++i) CHECK(b.state_index(b.state(i)) == i);
    CHECK_FALSE(b.state_index(FockState{4, 0, 0}).has_value());
    CHECK_THROWS_AS(b.state_index(FockState{0, 0, 0, 0, 0}), std::invalid_argument);
}

TEST_CASE("fock states reject malformed occupations", "[fock]") {
    CHECK_THROWS_AS(FockState(std::vector<int>{1, 0}), std::invalid_argument);
    CHECK_THROWS_AS(FockState(std::vector<int>{1, -1, 0}), std::invalid_argument);
    CHECK_THROWS_AS(enumerate_sector(1, 2, 3), std::invalid_argument);
    CHECK_THROWS_AS(enumerate_sector(-1, 2), std::invalid_argument);
}

TEST_CASE("creation operators match the dense definition", "[operator]") {
    for (int s = 1; s <= 2; ++s) {
        const auto b = make_basis(s, 3);
        const oracle::Dense d(s, 3);
        for (int mu = -s; mu <= s; ++mu) {
            CHECK((dense_real(creation_op(b, mu)) - d.create(mu)).norm() < 1e-14);
            CHECK((dense_real(annihilation_op(b, mu)) - d.create(mu).transpose()).norm() < 1e-14);
        }
        CHECK((dense_real(total_number_op(b)) - d.n()).norm() < 1e-14);
        CHECK_THROWS_AS(creation_op(b, s + 1), std::invalid_argument);
    }
}

TEST_CASE("Weyl relation holds exactly inside the truncation and fails at the edge", "[operator]") {
    const auto b = make_basis(1, 4);
    const auto id = SparseOperator::identity(b);
    for (int mu = -1; mu <= 1; ++mu) {
        const auto c = commutator(annihilation_op(b, mu), creation_op(b, mu));
        CHECK(residual(c, id, 1).frobenius_relative < 1e-14);
        CHECK(residual(c, id, 0).frobenius_relative > 0.1);
    }
    CHECK(commutation_residual(annihilation_op(b, -1), creation_op(b, 1), Restriction::interior(1))
              .frobenius_relative < 1e-14);
}

TEST_CASE("truncated products agree with a larger space on their interior", "[operator][truncation]") {
    // Build X = a_0 a†_1 a†_0 on n_max = 3 and on n_max = 6; entries within the
    // budget-derived interior must coincide.
    const auto small = make_basis(1, 3);
    const auto large = make_basis(1, 6);
    auto build = [](const BasisPtr& b) {
        return annihilation_op(b, 0) * creation_op(b, 1) * creation_op(b, 0);
    };
    const SparseOperator xs = build(small);
    const SparseOperator xl = build(large);
    const int margin = xs.particle_budget();
    CHECK(margin == 2);
    for (std::size_t c = 0; c < small->size(); ++c) {
        if (small->state(c).total() > 3 - margin) continue;
        for (std::size_t r = 0; r < small->size(); ++r) {
            const auto rl = large->state_index(small->state(r));
            const auto cl = large->state_index(small->state(c));
            CHECK(std::abs(xs.coefficient(r, c) - xl.coefficient(*rl, *cl)) < 1e-13);
        }
    }
}

TEST_CASE("particle budgets compose as excursion bounds", "[operator]") {
    const auto up = ParticleBudget::raising();
    const auto down = ParticleBudget::lowering();
    CHECK(product(down, up) == ParticleBudget{1, 0, 0});
    CHECK(product(up, down) == ParticleBudget{0, 0, 0});
    CHECK(product(up, up) == ParticleBudget{2, 2, 2});
    CHECK(up.adjoint() == down);
    const auto b = make_basis(1, 3);
    CHECK(power(creation_op(b, 0), 3).particle_budget() == 3);
    CHECK(commutator(number_op(b, 0), creation_op(b, 0)).particle_budget() == 1);
}

TEST_CASE("commutator properties", "[operator][property]") {
    const auto b = make_basis(1, 3);
    std::mt19937 rng(7);
    std::normal_distribution<double> g;
    std::vector<SparseOperator> ops;
    for (int mu = -1; mu <= 1; ++mu) {
        ops.push_back(creation_op(b, mu));
        ops.push_back(annihilation_op(b, mu));
    }
    auto pick = [&] { return ops[static_cast<std::size_t>(rng() % ops.size())]; };
    for (int trial = 0; trial < 10; ++trial) {
        const auto x = pick() * pick();
        const auto y = pick() + pick();
        const auto z = pick();
        const double a = g(rng);
        const double c = g(rng);
        // antisymmetry, bilinearity, Jacobi: exact algebraic identities of the
        // matrix commutator, truncated or not
        CHECK(residual(commutator(x, y), -commutator(y, x), 0).frobenius_absolute < 1e-12);
        CHECK(residual(commutator(a * x + c * z, y), a * commutator(x, y) + c * commutator(z, y), 0)
                  .frobenius_absolute < 1e-12);
        const auto jac = commutator(x, commutator(y, z)) + commutator(y, commutator(z, x)) +
                         commutator(z, commutator(x, y));
        CHECK(jac.frobenius_norm() < 1e-11);
        CHECK(residual(x.adjoint().adjoint(), x, 0).frobenius_absolute == 0.0);
    }
}

TEST_CASE("number operator ladders", "[operator]") {
    const auto b = make_basis(2, 3);
    const auto n = total_number_op(b);
    for (int mu = -2; mu <= 2; ++mu) {
        const auto a = creation_op(b, mu);
        CHECK(residual(commutator(n, a), a, 1).frobenius_relative < 1e-14);
        CHECK(residual(commutator(number_op(b, mu), a), a, 1).frobenius_relative < 1e-14);
    }
}

TEST_CASE("residual restrictions", "[operator]") {
    const auto b = make_basis(1, 2);
    const auto id = SparseOperator::identity(b);
    CHECK_THROWS_AS(residual(id, id, 3), EmptyRestrictionError);
    CHECK_THROWS_AS(residual(id, id, -1), std::invalid_argument);
    CHECK_THROWS_AS(residual(id, id, Restriction{0, 7}), EmptyRestrictionError);
    // relative residual of X against 0 is 1
    CHECK_THAT(residual(id, SparseOperator::zero(b), 0).frobenius_relative, WithinAbs(1.0, 1e-15));
    // the scale floor only ever lowers the relative value
    const auto r = residual(id, 2.0 * id, Restriction::interior(0), 100.0);
    CHECK_THAT(r.frobenius_relative, WithinAbs(std::sqrt(10.0) / 100.0, 1e-14));
    CHECK(r.interior_margin == 0);
}

TEST_CASE("mismatched bases are rejected", "[operator]") {
    const auto a = make_basis(1, 2);
    const auto c = make_basis(1, 3);
    CHECK_THROWS_AS(SparseOperator::identity(a) + SparseOperator::identity(c), std::invalid_argument);
    CHECK_NOTHROW(SparseOperator::identity(a) + SparseOperator::identity(make_basis(1, 2)));
}

TEST_CASE("operator JSON round-trips in row-major order", "[operator][serialization]") {
    const auto b = make_basis(1, 3);
    const auto x = creation_op(b, 1) * annihilation_op(b, -1) + 0.5 * number_op(b, 0);
    const auto j = operator_to_json(x);
    CHECK(j.at("dim").get<std::size_t>() == b->size());
    long prev_row = -1;
    long prev_col = -1;
    for (const auto& e : j.at("entries")) {
        const long row = e.at(0).get<long>();
        const long col = e.at(1).get<long>();
        CHECK((row > prev_row || (row == prev_row && col > prev_col)));
        prev_row = row;
        prev_col = col;
    }
    const auto back = operator_from_json(b, nlohmann::json::parse(j.dump()));
    CHECK(residual(back, x, 0).frobenius_absolute == 0.0);
    CHECK_THROWS_AS(operator_from_json(make_basis(1, 2), j), std::invalid_argument);
}
