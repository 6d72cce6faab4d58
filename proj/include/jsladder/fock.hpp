#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace jsladder {

/// Occupation numbers |n_{-s}, ..., n_s> of the 2s+1 bosonic modes.
///
/// Slot i holds the mode of weight mu = i - s, so the leftmost entry is the
/// lowest weight, matching the usual ket notation.
class FockState {
public:
    FockState() = default;

    explicit FockState(std::vector<int> occupations) : occ_(std::move(occupations)) {
        if (occ_.empty() || occ_.size() % 2 == 0) {
            throw std::invalid_argument("FockState: expected 2s+1 modes, got " +
                                        std::to_string(occ_.size()));
        }
        for (int n : occ_) {
            if (n < 0) {
                throw std::invalid_argument("FockState: negative occupation");
            }
        }
    }

    FockState(std::initializer_list<int> occupations)
        : FockState(std::vector<int>(occupations)) {}

    static FockState vacuum(int spin) {
        return FockState(std::vector<int>(static_cast<std::size_t>(2 * spin + 1), 0));
    }

    int spin() const { return static_cast<int>(occ_.size() / 2); }
    std::size_t modes() const { return occ_.size(); }

    /// Occupation of the mode with weight mu.
    int at(int mu) const { return occ_.at(static_cast<std::size_t>(mu + spin())); }

    const std::vector<int>& occupations() const { return occ_; }

    int total() const {
        int t = 0;
        for (int n : occ_) t += n;
        return t;
    }

    int weight() const {
        const int s = spin();
        int w = 0;
        for (std::size_t i = 0; i < occ_.size(); ++i) {
            w += (static_cast<int>(i) - s) * occ_[i];
        }
        return w;
    }

    /// Copy with n_mu shifted by delta; nullopt if the result would be negative.
    std::optional<FockState> shifted(int mu, int delta) const {
        FockState out = *this;
        int& n = out.occ_.at(static_cast<std::size_t>(mu + spin()));
        if (n + delta < 0) return std::nullopt;
        n += delta;
        return out;
    }

    auto operator<=>(const FockState&) const = default;
    bool operator==(const FockState&) const = default;

private:
    std::vector<int> occ_;
};

inline std::string to_string(const FockState& state) {
    std::string out = "(";
    const auto& occ = state.occupations();
    for (std::size_t i = 0; i < occ.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(occ[i]);
    }
    return out + ")";
}

/// Exhaustive, ordered enumeration of Fock states under a total-number cutoff,
/// optionally restricted to fixed N and/or fixed J_z weight.
///
/// States are kept in descending lexicographic order of their occupation
/// vectors; state_index() is the exact inverse of state().
class SectorBasis {
public:
    SectorBasis(int spin, int n_max, std::optional<int> n, std::optional<int> weight,
                std::vector<FockState> states)
        : spin_(spin), n_max_(n_max), n_(n), weight_(weight), states_(std::move(states)) {}

    int spin() const { return spin_; }
    int n_max() const { return n_max_; }
    std::optional<int> fixed_total() const { return n_; }
    std::optional<int> fixed_weight() const { return weight_; }

    std::size_t size() const { return states_.size(); }
    const FockState& state(std::size_t i) const { return states_.at(i); }
    const std::vector<FockState>& states() const { return states_; }
    auto begin() const { return states_.begin(); }
    auto end() const { return states_.end(); }

    /// Position of `s` in the basis, or nullopt when it is not a member.
    std::optional<std::size_t> state_index(const FockState& s) const {
        if (static_cast<int>(s.modes()) != 2 * spin_ + 1) {
            throw std::invalid_argument("state_index: state has " + std::to_string(s.modes()) +
                                        " modes, basis expects " + std::to_string(2 * spin_ + 1));
        }
        auto it = std::lower_bound(states_.begin(), states_.end(), s, std::greater<>{});
        if (it == states_.end() || *it != s) return std::nullopt;
        return static_cast<std::size_t>(it - states_.begin());
    }

    bool same_space(const SectorBasis& other) const {
        return spin_ == other.spin_ && n_max_ == other.n_max_ && n_ == other.n_ &&
               weight_ == other.weight_;
    }

private:
    int spin_;
    int n_max_;
    std::optional<int> n_;
    std::optional<int> weight_;
    std::vector<FockState> states_;
};

namespace detail {

// Emits vectors in descending lexicographic order: larger leading
// occupations first.
inline void enumerate_recursive(std::vector<int>& occ, std::size_t pos, int remaining,
                                std::vector<FockState>& out,
                                const std::function<bool(const std::vector<int>&)>& keep) {
    if (pos == occ.size()) {
        if (keep(occ)) out.emplace_back(occ);
        return;
    }
    for (int n = remaining; n >= 0; --n) {
        occ[pos] = n;
        enumerate_recursive(occ, pos + 1, remaining - n, out, keep);
    }
    occ[pos] = 0;
}

}  // namespace detail

inline SectorBasis enumerate_sector(int spin, int n_max, std::optional<int> n = std::nullopt,
                                    std::optional<int> weight = std::nullopt) {
    if (spin < 0) throw std::invalid_argument("enumerate_sector: negative spin");
    if (n_max < 0) throw std::invalid_argument("enumerate_sector: negative n_max");
    if (n && (*n < 0 || *n > n_max)) {
        throw std::invalid_argument("enumerate_sector: n = " + std::to_string(*n) +
                                    " outside [0, n_max = " + std::to_string(n_max) + "]");
    }

    const auto modes = static_cast<std::size_t>(2 * spin + 1);
    auto keep = [&](const std::vector<int>& occ) {
        int total = 0;
        int w = 0;
        for (std::size_t i = 0; i < occ.size(); ++i) {
            total += occ[i];
            w += (static_cast<int>(i) - spin) * occ[i];
        }
        if (n && total != *n) return false;
        if (weight && w != *weight) return false;
        return true;
    };

    std::vector<FockState> states;
    std::vector<int> occ(modes, 0);
    detail::enumerate_recursive(occ, 0, n_max, states, keep);
    return SectorBasis(spin, n_max, n, weight, std::move(states));
}

/// Number of states with total occupation <= n_max: C(n_max + 2s + 1, 2s + 1).
inline std::uint64_t dimension(int spin, int n_max) {
    if (spin < 0 || n_max < 0) throw std::invalid_argument("dimension: negative argument");
    const std::uint64_t k = static_cast<std::uint64_t>(2 * spin + 1);
    const std::uint64_t top = static_cast<std::uint64_t>(n_max) + k;
    std::uint64_t result = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        result = result * (top - k + i) / i;
    }
    return result;
}

inline std::optional<std::size_t> state_index(const SectorBasis& basis, const FockState& state) {
    return basis.state_index(state);
}

}  // namespace jsladder
