#pragma once

// Test-only reference implementations. Written from the definitions, sharing
// no code with the library, and dense wherever that keeps them obvious.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "jsladder/jpoly.hpp"

namespace oracle {

using Occ = std::vector<int>;

// Every occupation vector with 2s+1 entries and total <= n_max, by odometer,
// sorted descending lexicographically.
inline std::vector<Occ> states(int s, int n_max) {
    const int modes = 2 * s + 1;
    std::vector<Occ> out;
    Occ occ(modes, 0);
    while (true) {
        if (std::accumulate(occ.begin(), occ.end(), 0) <= n_max) out.push_back(occ);
        int i = 0;
        while (i < modes && occ[i] == n_max) occ[i++] = 0;
        if (i == modes) break;
        ++occ[i];
    }
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

inline int total(const Occ& o) { return std::accumulate(o.begin(), o.end(), 0); }

inline int weight(const Occ& o) {
    const int s = static_cast<int>(o.size()) / 2;
    int w = 0;
    for (int i = 0; i < static_cast<int>(o.size()); ++i) w += (i - s) * o[i];
    return w;
}

inline std::size_t count(int s, int n_max, int n, int w) {
    std::size_t c = 0;
    for (const auto& o : states(s, n_max)) c += (total(o) == n && weight(o) == w) ? 1 : 0;
    return c;
}

// Multiplicity of irrep j inside the N = n sector: a weight-j state count
// minus a weight-(j+1) state count (every irrep with label >= j contributes one
// state of weight j).
inline int multiplicity(int s, int n, int j) {
    return static_cast<int>(count(s, n, n, j)) - static_cast<int>(count(s, n, n, j + 1));
}

struct Dense {
    std::vector<Occ> basis;
    std::map<Occ, int> index;
    int s = 0;

    Dense(int spin, int n_max) : basis(states(spin, n_max)), s(spin) {
        for (int i = 0; i < static_cast<int>(basis.size()); ++i) index[basis[i]] = i;
    }

    int dim() const { return static_cast<int>(basis.size()); }

    // Truncated a†_mu: sqrt(n+1) on every image that stays in the basis.
    Eigen::MatrixXd create(int mu) const {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim(), dim());
        for (int c = 0; c < dim(); ++c) {
            Occ o = basis[c];
            const int slot = mu + s;
            const double amp = std::sqrt(o[slot] + 1.0);
            ++o[slot];
            auto it = index.find(o);
            if (it != index.end()) m(it->second, c) = amp;
        }
        return m;
    }

    Eigen::MatrixXd diag(const std::function<double(const Occ&)>& f) const {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim(), dim());
        for (int i = 0; i < dim(); ++i) m(i, i) = f(basis[i]);
        return m;
    }

    Eigen::MatrixXd jz() const { return diag([](const Occ& o) { return double(weight(o)); }); }
    Eigen::MatrixXd n() const { return diag([](const Occ& o) { return double(total(o)); }); }

    // J_+ = sum_mu sqrt(s(s+1) - mu(mu+1)) a†_{mu+1} a_mu.
    Eigen::MatrixXd jplus() const {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim(), dim());
        for (int mu = -s; mu < s; ++mu) {
            m += std::sqrt(double(s * (s + 1) - mu * (mu + 1))) * create(mu + 1) * create(mu).transpose();
        }
        return m;
    }

    Eigen::MatrixXd j2() const {
        const Eigen::MatrixXd z = jz();
        const Eigen::MatrixXd p = jplus();
        const Eigen::MatrixXd m = p.transpose();
        return z * z + 0.5 * (p * m + m * p);
    }

    // Indices of states with total n and weight w.
    std::vector<int> sector(int n, int w) const {
        std::vector<int> out;
        for (int i = 0; i < dim(); ++i) {
            if (total(basis[i]) == n && weight(basis[i]) == w) out.push_back(i);
        }
        return out;
    }
};

// Counts of each j in one (n, weight 0) block of a dense J², by direct diagonalization.
inline std::map<int, int> j_counts(const Eigen::MatrixXd& j2, const std::vector<int>& idx) {
    const int d = static_cast<int>(idx.size());
    std::map<int, int> out;
    if (d == 0) return out;
    Eigen::MatrixXd block(d, d);
    for (int r = 0; r < d; ++r) {
        for (int c = 0; c < d; ++c) block(r, c) = j2(idx[r], idx[c]);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(block);
    for (int i = 0; i < d; ++i) {
        const double j = 0.5 * (std::sqrt(1.0 + 4.0 * es.eigenvalues()(i)) - 1.0);
        ++out[static_cast<int>(std::lround(j))];
    }
    return out;
}

// Leibniz expansion: sum over permutations, nothing clever.
inline jsladder::JPoly leibniz_det(const std::vector<std::vector<jsladder::JPoly>>& m) {
    const int d = static_cast<int>(m.size());
    std::vector<int> perm(d);
    std::iota(perm.begin(), perm.end(), 0);
    jsladder::JPoly det;
    do {
        int inversions = 0;
        for (int a = 0; a < d; ++a) {
            for (int b = a + 1; b < d; ++b) inversions += perm[a] > perm[b] ? 1 : 0;
        }
        jsladder::JPoly term = jsladder::JPoly::constant(inversions % 2 ? -1 : 1);
        for (int r = 0; r < d; ++r) term = term * m[r][perm[r]];
        det += term;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return det;
}

}  // namespace oracle
