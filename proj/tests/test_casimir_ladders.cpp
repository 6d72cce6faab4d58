#include <catch_amalgamated.hpp>

#include "jsladder/casimir_ladders.hpp"
#include "oracles.hpp"

using namespace jsladder;

namespace {

const LadderStack& stack(int s, int n_max) {
    static std::map<std::pair<int, int>, LadderStack> cache;
    auto it = cache.find({s, n_max});
    if (it == cache.end()) it = cache.emplace(std::make_pair(s, n_max), build_stack(s, n_max)).first;
    return it->second;
}

Eigen::VectorXd real_part(const StateVector& v) { return v.real(); }

}  // namespace

TEST_CASE("tau operators shift the representation label, checked against dense J^2", "[tau][oracle]") {
    for (int s = 1; s <= 2; ++s) {
        const int n_max = 4;
        const LadderStack& st = stack(s, n_max);
        const oracle::Dense d(s, n_max);
        const Eigen::MatrixXd j2 = d.j2();
        for (const TauOperator& tau : st.taus) {
            INFO("s=" << s << " theta=" << tau.theta);
            CHECK(tau.certificate.casimir.frobenius_relative < 1e-8);
            CHECK(tau.certificate.j_shift.frobenius_relative < 1e-8);
            CHECK(tau.op.particle_budget() == 1);
            for (int n = 0; n < n_max; ++n) {
                for (const auto& kv : st.spectrum.kernel(n)) {
                    const StateVector out = tau.op.apply(kv.vector);
                    if (out.norm() < 1e-9) continue;
                    const int j = kv.j + tau.theta;
                    const Eigen::VectorXd w = real_part(out);
                    CHECK((j2 * w - double(j * (j + 1)) * w).norm() < 1e-9 * w.norm());
                    CHECK(out.imag().norm() < 1e-12);
                }
            }
        }
    }
}

TEST_CASE("assembled s=1 operators are the printed expressions up to scale", "[tau]") {
    const LadderStack& st = stack(1, 4);
    const ScaleMatch up = global_scale(standard_tau_s1(st, 1), st.tau(1).op, Restriction::interior(0));
    const ScaleMatch down = global_scale(standard_tau_s1(st, -1), st.tau(-1).op, Restriction::interior(0));
    CHECK(std::abs(up.scale - Complex(2.0)) < 1e-12);
    CHECK(std::abs(down.scale - Complex(-2.0)) < 1e-12);
    CHECK(up.residual.frobenius_relative < 1e-10);
    CHECK(down.residual.frobenius_relative < 1e-10);
    CHECK_THROWS_AS(standard_tau_s1(stack(2, 2), 1), std::invalid_argument);
}

TEST_CASE("full closure relation: measured form holds, printed form does not", "[closure]") {
    for (int s = 1; s <= 2; ++s) {
        const LadderStack& st = stack(s, 4);
        for (int k = 0; k <= s; ++k) {
            CHECK(full_closure_residual(st, k, Restriction::interior(1), ClosureForm::Measured).frobenius_relative <
                  1e-10);
            // both agree on weight-0 columns
            CHECK(full_closure_residual(st, k, Restriction::kernel(1), ClosureForm::Printed).frobenius_relative <
                  1e-8);
        }
        CHECK(full_closure_residual(st, 1, Restriction::interior(1), ClosureForm::Printed).frobenius_relative > 0.1);
    }
}

TEST_CASE("resolvent ladder identities", "[resolvent]") {
    for (int s = 1; s <= 2; ++s) {
        const LadderStack& st = stack(s, 4);
        for (const TauOperator& tau : st.taus) {
            for (int k = 0; k <= 2; ++k) {
                CHECK(resolvent_commutator_check(tau, st.spectrum, k, Side::Left).frobenius_relative < 1e-8);
                CHECK(resolvent_commutator_check(tau, st.spectrum, k, Side::Right).frobenius_relative < 1e-8);
            }
        }
        CHECK(resolvent_printed_right_residual(st.tau(1), st.spectrum, 0).frobenius_relative > 0.1);
    }
}

TEST_CASE("s=1 kernel lattice reproduces the diagram", "[lattice]") {
    const LadderStack& st = stack(1, 4);
    const auto lat = lattice_report(st);
    std::vector<std::pair<int, int>> nodes;
    for (const auto& node : lat.nodes) {
        CHECK(node.dim == 1);
        CHECK(node.generated_dim == 1);
        nodes.push_back({node.n, node.j});
    }
    const std::vector<std::pair<int, int>> expected = {{0, 0}, {1, 1}, {2, 0}, {2, 2}, {3, 1},
                                                       {3, 3}, {4, 0}, {4, 2}, {4, 4}};
    CHECK(nodes == expected);
    for (const auto& a : lat.arrows) {
        CHECK(a.j_to == a.j_from + (a.raising ? a.theta : -a.theta));
        CHECK(a.n_to == a.n_from + (a.raising ? 1 : -1));
    }
    CHECK(lat.node(3, 3).action(1).raise_injective);
    CHECK(lat.node(1, 1).action(-1).lower_annihilates);  // j > n s - 1
    CHECK_THROWS(lat.node(3, 2));
}

TEST_CASE("irrep sizes from kernel vectors", "[lattice][oracle]") {
    const LadderStack& st = stack(1, 4);
    const auto lat = lattice_report(st);
    // count J_z eigenvalues reached from each kernel vector, independently of irrep_weights
    const oracle::Dense d(1, 4);
    const Eigen::MatrixXd jp = d.jplus();
    for (const auto& node : lat.nodes) {
        Eigen::VectorXd v = node.vectors.col(0).real();
        int up = 0;
        while ((v = jp * v).norm() > 1e-9) ++up;
        CHECK(2 * up + 1 == 2 * node.j + 1);
        const auto w = irrep_weights(st.gens, node.vectors.col(0));
        CHECK(static_cast<int>(w.size()) == 2 * node.j + 1);
    }
}

TEST_CASE("s=2 lattice multiplicities agree with brute force", "[lattice][oracle]") {
    const LadderStack& st = stack(2, 4);
    const auto lat = lattice_report(st);
    for (int n = 0; n <= 4; ++n) {
        std::map<int, int> got;
        for (const auto& node : lat.nodes) {
            if (node.n == n) got[node.j] = node.generated_dim;
        }
        std::map<int, int> expected;
        for (int j = 0; j <= 2 * n; ++j) {
            if (int m = oracle::multiplicity(2, n, j); m > 0) expected[j] = m;
        }
        CHECK(got == expected);
    }
    CHECK(lat.node(4, 2).dim == 2);
    CHECK(lat.node(4, 4).dim == 2);
}

TEST_CASE("annihilation claims", "[lattice]") {
    for (int s = 1; s <= 2; ++s) {
        const auto lat = lattice_report(stack(s, 4));
        for (const auto& node : lat.nodes) {
            for (int w = 1; w <= s; ++w) {
                INFO("s=" << s << " node (" << node.n << "," << node.j << ") omega=" << w);
                if (node.n == 0 || node.j < w) CHECK(node.action(w).lower_annihilates);
                if (node.n == 0 || node.j > node.n * s - w) CHECK(node.action(-w).lower_annihilates);
                if (node.n < 4 && node.j < w) CHECK(node.action(-w).raise_annihilates);
                if (node.n < 4 && (w - s) % 2 == 0) CHECK(node.action(w).raise_injective);
                if (node.n == 1 && (w - s) % 2 != 0) CHECK(node.action(w).raise_annihilates);
            }
        }
    }
}

TEST_CASE("deformed generators and residue classes", "[deformed]") {
    const LadderStack& st = stack(2, 4);
    const auto lat = lattice_report(st);
    for (int w = 1; w <= 2; ++w) {
        const DeformedAlgebra d = deformed_generators(st.tau(-w));
        CHECK(d.omega == w);
        CHECK(residual(d.Lz, d.Lz.adjoint(), 0).frobenius_relative < 1e-12);
        const auto classes = residue_classes(lat, w);
        std::size_t total = 0;
        for (const auto& [r, members] : classes) {
            for (const auto& [n, j] : members) CHECK(j % w == r);
            total += members.size();
        }
        CHECK(total == lat.nodes.size());
    }
    CHECK_THROWS_AS(deformed_generators(st.tau(1)), std::invalid_argument);
}

TEST_CASE("complete set separates the degenerate s=2 nodes", "[complete]") {
    const LadderStack& st = stack(2, 4);
    const auto lat = lattice_report(st);
    const auto cs = complete_set_check(st, lat);
    for (const auto& e : cs.commutators) {
        CHECK(e.with_casimir.frobenius_relative < 1e-8);
        CHECK(e.with_jz.frobenius_relative < 1e-8);
        CHECK(e.with_n.frobenius_relative < 1e-8);
    }
    REQUIRE(cs.separation.size() == 2);
    for (const auto& sep : cs.separation) CHECK(sep.separated);
}

TEST_CASE("s=1 demo operators", "[demo]") {
    const LadderStack& st = stack(1, 5);
    const DemoOperators d = demo_s1_operators(st);
    const auto id = SparseOperator::identity(st.basis());
    CHECK(residual(commutator(d.A, d.Adag), id, Restriction::kernel(1)).frobenius_relative < 1e-8);
    CHECK(max_eigen_deviation(st, d.Adag * d.A, 4, [](int, int j) { return double(j); }) < 1e-8);
    CHECK(max_eigen_deviation(st, d.Lz, 4, [](int n, int j) { return (n - j) / 2.0 - (n + j) / 4.0; }) < 1e-8);
    CHECK(max_eigen_deviation(st, d.L2, 4, [](int n, int j) {
              const double x = (n + j) / 4.0;
              return x * (x + 1);
          }) < 1e-8);
    const auto lp = demo_lplus_printed(st);
    CHECK(max_eigen_deviation(st, 0.5 * commutator(lp, lp.adjoint()), 4,
                              [](int n, int j) { return (n - j) / 2.0 - (n + j) / 4.0; }) > 1e-3);
}

TEST_CASE("s=1 canonical basis", "[demo]") {
    const LadderStack& st = stack(1, 5);
    const auto canon = canonical_basis_s1(st);
    CHECK(canon.size() == 56);
    int count_n2 = 0;
    for (const auto& c : canon) {
        CHECK(std::abs(c.vector.norm() - 1.0) < 1e-12);
        CHECK((c.n - c.j) % 2 == 0);
        CHECK(std::abs(c.jz) <= c.j);
        CHECK(c.alpha > 0.0);
        count_n2 += c.n == 2 ? 1 : 0;
    }
    CHECK(count_n2 == 6);  // j = 0 and j = 2
}

TEST_CASE("tau-bar forms are tau / (2j+1) node by node", "[demo]") {
    const LadderStack& st = stack(1, 4);
    const TauBarForms bar = tau_bar_forms(st);
    const auto ratios = tau_bar_ratios(st, bar.bar_up_dag, standard_tau_s1(st, 1));
    REQUIRE_FALSE(ratios.empty());
    for (const auto& r : ratios) {
        CHECK(r.collinearity_defect < 1e-8);
        CHECK(std::abs(r.ratio - 1.0 / (2.0 * r.j + 1.0)) < 1e-8);
    }
}
