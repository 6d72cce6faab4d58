// Acceptance gate: one PASS/FAIL line per criterion, exit status = number of failures.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "jsladder/jsladder.hpp"
#include "oracles.hpp"

using namespace jsladder;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
    bool pass = false;
    std::string evidence;
};

int failures = 0;

void report(int id, const std::string& title, const std::function<Verdict()>& body) {
    Verdict v;
    try {
        v = body();
    } catch (const std::exception& e) {
        v = {false, std::string("exception: ") + e.what()};
    }
    if (!v.pass) ++failures;
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << title << " | " << v.evidence
              << std::endl;
}

std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", x);
    return buf;
}

Verdict su2_relations() {
    const auto t0 = Clock::now();
    double worst = 0.0;
    const Restriction all = Restriction::interior(0);
    for (int s = 1; s <= 3; ++s) {
        const auto g = su2_generators(make_basis(s, 5));
        worst = std::max({worst, residual(commutator(g.Jz, g.Jplus), g.Jplus, 0).frobenius_relative,
                          residual(commutator(g.Jz, g.Jminus), -g.Jminus, 0).frobenius_relative,
                          residual(commutator(g.Jplus, g.Jminus), 2.0 * g.Jz, 0).frobenius_relative,
                          commutation_residual(g.Ntot, g.Jz, all).frobenius_relative,
                          commutation_residual(g.Ntot, g.Jplus, all).frobenius_relative,
                          commutation_residual(g.Ntot, g.Jminus, all).frobenius_relative,
                          commutation_residual(g.J2, g.Jplus, all).frobenius_relative,
                          commutation_residual(g.J2, g.Jminus, all).frobenius_relative});
    }
    const double t = seconds_since(t0);
    return {worst < 1e-12 && t < 10.0, "worst relative " + sci(worst) + " (< 1e-12), " + sci(t) + " s (< 10 s)"};
}

Verdict jhat_definition() {
    double worst_id = 0.0;
    double worst_int = 0.0;
    bool in_range = true;
    for (int s = 1; s <= 3; ++s) {
        const auto g = su2_generators(make_basis(s, 5));
        const CasimirSpectrum cs(g);
        const auto j = cs.j_hat();
        worst_id = std::max(worst_id,
                            residual(j * (j + SparseOperator::identity(g.basis)), g.J2, 0).frobenius_relative);
        for (const auto& sector : cs.decomposition().sectors()) {
            for (Eigen::Index i = 0; i < sector.eigenvalues.size(); ++i) {
                const double jj = 0.5 * (std::sqrt(1.0 + 4.0 * std::max(sector.eigenvalues(i), 0.0)) - 1.0);
                worst_int = std::max(worst_int, std::abs(jj - std::round(jj)));
                const long r = std::lround(jj);
                in_range = in_range && r >= 0 && r <= sector.key.n * s;
            }
        }
    }
    return {worst_id < 1e-10 && worst_int < 1e-6 && in_range,
            "identity relative " + sci(worst_id) + " (< 1e-10), integer distance " + sci(worst_int) +
                " (< 1e-6), labels in [0, n s]: " + (in_range ? "yes" : "no")};
}

Verdict symbolic_certificates() {
    const auto t0 = Clock::now();
    int certificates = 0;
    std::string problem;
    for (int s = 1; s <= 4 && problem.empty(); ++s) {
        const AlphaMatrix p = build_alpha(s, Family::P);
        const AlphaMatrix m = build_alpha(s, Family::M);
        for (int theta = -s; theta <= s; ++theta) {
            const bool even = (theta - s) % 2 == 0;
            const AlphaMatrix& a = even ? p : m;
            if (family_of(s, theta) != a.family) problem = "parity assignment at s=" + std::to_string(s);
            if (!shifted_determinant(a, theta).is_zero()) problem = "det nonzero at s=" + std::to_string(s);
            if (!solve_sigma(a, theta).consistency.is_zero()) problem = "consistency at s=" + std::to_string(s);
            ++certificates;
        }
        const JPoly control = shifted_determinant(family_of(s, s + 1) == Family::P ? p : m, s + 1);
        if (control.is_zero()) problem = "negative control vanished at s=" + std::to_string(s);
    }
    const double t = seconds_since(t0);
    if (!problem.empty()) return {false, problem};
    return {t < 5.0, std::to_string(certificates) + " determinant/sigma certificates exactly zero, 4 negative "
                         "controls nonzero, " + sci(t) + " s (< 5 s)"};
}

Verdict tau_ladder() {
    double worst_c = 0.0;
    double worst_j = 0.0;
    std::string where;
    for (int s = 1; s <= 2; ++s) {
        const LadderStack st = build_stack(s, 4);
        for (const TauOperator& tau : st.taus) {
            const Restriction k1 = Restriction::kernel(1);
            const SparseOperator c = commutator(st.gens.J2, tau.op);
            const SparseOperator d = commutator(st.jhat, tau.op);
            // τ†_0 at s = 1 vanishes on weight 0; relative to its size elsewhere
            const double rc = residual(c, tau.op * st.of_jhat(tau.right_function), k1,
                                       restricted_norm(c, Restriction::interior(1)))
                                  .frobenius_relative;
            const double rj = residual(d, double(tau.theta) * tau.op, k1, restricted_norm(d, Restriction::interior(1)))
                                  .frobenius_relative;
            if (rc > worst_c || rj > worst_j) where = "s=" + std::to_string(s) + " theta=" + std::to_string(tau.theta);
            worst_c = std::max(worst_c, rc);
            worst_j = std::max(worst_j, rj);
        }
    }
    return {worst_c < 1e-8 && worst_j < 1e-8,
            "[J^2, tau] worst " + sci(worst_c) + ", [j, tau] worst " + sci(worst_j) + " (< 1e-8, at " + where + ")"};
}

Verdict standard_expressions() {
    const LadderStack st = build_stack(1, 4);
    std::ostringstream ev;
    bool ok = true;
    for (int theta : {1, -1}) {
        const SparseOperator printed = standard_tau_s1(st, theta);
        const ScaleMatch m = global_scale(printed, st.tau(theta).op, Restriction::interior(0));
        // entry-wise, over the whole truncated matrix
        const SparseMatrix diff = printed.matrix() - m.scale * st.tau(theta).op.matrix();
        double worst = 0.0;
        for (Eigen::Index r = 0; r < diff.outerSize(); ++r) {
            for (SparseMatrix::InnerIterator it(diff, r); it; ++it) worst = std::max(worst, std::abs(it.value()));
        }
        const bool rational = std::abs(m.scale.imag()) < 1e-12 &&
                              std::abs(m.scale.real() * 6.0 - std::round(m.scale.real() * 6.0)) < 1e-9;
        ok = ok && worst < 1e-10 && rational;
        ev << "theta=" << theta << " scale " << m.scale.real() << " entry-wise " << sci(worst) << "; ";
    }
    return {ok, ev.str() + "(< 1e-10)"};
}

Verdict demo_block() {
    const LadderStack st = build_stack(1, 5);
    const DemoOperators d = demo_s1_operators(st);
    const double weyl =
        residual(commutator(d.A, d.Adag), SparseOperator::identity(st.basis()), Restriction::kernel(1)).frobenius_relative;
    const double num = max_eigen_deviation(st, d.Adag * d.A, 4, [](int, int j) { return double(j); });
    const double lz = max_eigen_deviation(st, d.Lz, 4, [](int n, int j) { return (n - j) / 2.0 - (n + j) / 4.0; });
    const double l2 = max_eigen_deviation(st, d.L2, 4, [](int n, int j) {
        const double x = (n + j) / 4.0;
        return x * (x + 1.0);
    });
    const SparseOperator a0 = creation_op(st.basis(), 0);
    const double dbl =
        residual(commutator(st.jhat, commutator(st.jhat, a0)), a0, Restriction::kernel(1)).frobenius_relative;
    return {std::max({weyl, num, lz, l2, dbl}) < 1e-8,
            "[A,A+] " + sci(weyl) + ", A+A " + sci(num) + ", L_z " + sci(lz) + ", L^2 " + sci(l2) + ", [j,[j,a0+]] " +
                sci(dbl) + " (< 1e-8)"};
}

Verdict lattice_diagram() {
    const LadderStack st = build_stack(1, 4);
    const auto lat = lattice_report(st);
    std::vector<std::pair<int, int>> nodes;
    bool one_dim = true;
    for (const auto& node : lat.nodes) {
        if (node.n > 3) continue;
        nodes.push_back({node.n, node.j});
        one_dim = one_dim && node.dim == 1 && node.generated_dim == 1;
    }
    const std::vector<std::pair<int, int>> expected = {{0, 0}, {1, 1}, {2, 0}, {2, 2}, {3, 1}, {3, 3}};
    // irrep sizes: distinct J_z eigenvalues on the J_± orbit of each kernel vector
    std::map<int, std::set<int>> sizes;
    for (const auto& node : lat.nodes) {
        if (node.n > 3) continue;
        std::set<long> weights{0};
        for (const SparseOperator* step : {&st.gens.Jplus, &st.gens.Jminus}) {
            StateVector v = node.vectors.col(0);
            while ((v = step->apply(v)).norm() > 1e-9) {
                weights.insert(std::lround(v.dot(st.gens.Jz.apply(v)).real() / v.squaredNorm()));
            }
        }
        sizes[node.j].insert(static_cast<int>(weights.size()));
    }
    bool dims_ok = true;
    std::ostringstream ev;
    for (int j = 0; j <= 3; ++j) {
        dims_ok = dims_ok && sizes[j] == std::set<int>{2 * j + 1};
        ev << (j ? "," : "") << (sizes[j].empty() ? 0 : *sizes[j].begin());
    }
    return {nodes == expected && one_dim && dims_ok,
            std::to_string(nodes.size()) + " nodes for n <= 3 " + (nodes == expected ? "as drawn" : "DIFFER") +
                ", all 1-dimensional: " + (one_dim ? "yes" : "no") + ", irrep dims j=0..3: " + ev.str()};
}

Verdict annihilation_claims() {
    std::vector<std::string> bad;
    int checked = 0;
    for (int s = 1; s <= 2; ++s) {
        const int n_max = 4;
        const auto lat = lattice_report(build_stack(s, n_max));
        for (const auto& node : lat.nodes) {
            const std::string at = "s=" + std::to_string(s) + " (" + std::to_string(node.n) + "," +
                                   std::to_string(node.j) + ")";
            for (int w = 1; w <= s; ++w) {
                const std::string ww = std::to_string(w);
                auto claim = [&](bool premise, bool holds, const std::string& what) {
                    if (!premise) return;
                    ++checked;
                    if (!holds) bad.push_back(what + " at " + at);
                };
                claim(node.n == 0 || node.j < w, node.action(w).lower_annihilates, "tau_" + ww);
                claim(node.n == 0 || node.j > node.n * s - w, node.action(-w).lower_annihilates, "tau_-" + ww);
                claim(node.n < n_max && node.j < w, node.action(-w).raise_annihilates, "tau+_-" + ww);
                claim(node.n < n_max && (w - s) % 2 == 0, node.action(w).raise_injective, "tau+_" + ww + " injective");
                claim(node.n == 1 && (w - s) % 2 != 0, node.action(w).raise_annihilates, "tau+_" + ww + " kills");
            }
        }
    }
    std::string ev = std::to_string(checked) + " node claims checked";
    for (const auto& b : bad) ev += "; violated: " + b;
    return {bad.empty() && checked > 0, ev};
}

Verdict oracle_equivalence() {
    int sectors = 0;
    std::string mismatch;
    for (int s = 1; s <= 2; ++s) {
        const int n_max = 4;
        const auto lat = lattice_report(build_stack(s, n_max));
        const oracle::Dense d(s, n_max);
        const Eigen::MatrixXd j2 = d.j2();
        for (int n = 0; n <= n_max; ++n) {
            std::map<int, int> lattice;
            for (const auto& node : lat.nodes) {
                if (node.n == n && node.generated_dim > 0) lattice[node.j] = node.generated_dim;
            }
            const auto brute = oracle::j_counts(j2, d.sector(n, 0));
            ++sectors;
            if (lattice != brute) mismatch += " s=" + std::to_string(s) + " n=" + std::to_string(n);
        }
    }
    return {mismatch.empty(), std::to_string(sectors) + " weight-0 sectors, lattice vs dense J^2 multisets " +
                                  (mismatch.empty() ? "identical" : "differ at" + mismatch)};
}

Verdict determinism() {
    SuiteConfig cfg;
    const std::string a = render_report(run_suite(cfg), ReportFormat::Json);
    const std::string b = render_report(run_suite(cfg), ReportFormat::Json);
    cfg.parallelism = 2;
    const std::string c = render_report(run_suite(cfg), ReportFormat::Json);
    return {a == b && a == c, std::to_string(a.size()) + "-byte reports, consecutive runs " +
                                  (a == b ? "identical" : "DIFFER") + ", parallel run " + (a == c ? "identical" : "DIFFERS")};
}

}  // namespace

int main() {
    report(1, "su(2) relations, s=1..3, n_max=5", su2_relations);
    report(2, "j-hat definition and integer spectrum", jhat_definition);
    report(3, "exact determinant and sigma certificates, s<=4", symbolic_certificates);
    report(4, "tau ladder property, s=1,2, n_max=4", tau_ladder);
    report(5, "s=1 printed tau expressions up to scale", standard_expressions);
    report(6, "s=1 demo block, n_max=5", demo_block);
    report(7, "s=1 kernel lattice and irrep dimensions", lattice_diagram);
    report(8, "kernel annihilation claims, s=1,2, n<=4", annihilation_claims);
    report(9, "lattice multiplicities equal brute-force J^2 counts", oracle_equivalence);
    report(10, "byte-identical verify reports", determinism);
    std::cout << (10 - failures) << "/10 criteria passed" << std::endl;
    return failures;
}
