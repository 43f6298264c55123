#pragma once

#include <cassert>
#include <stdexcept>
#include <vector>

namespace specball {

/* Dimension of the d-variate polynomials of total degree <= n. */
inline int poly_space_dim(int d, int n) {
    if (n < 0) return 0;
    switch (d) {
        case 1: return n + 1;
        case 2: return (n + 1) * (n + 2) / 2;
        case 3: return (n + 1) * (n + 2) * (n + 3) / 6;
        default: throw std::invalid_argument("poly_space_dim: d must be 1, 2 or 3");
    }
}

/* Label of one basis function inside its degree block m.
 * 2D: (m, k) with k = 0..m (j unused, stays 0).
 * 3D: (m, j, k) with j + k <= m. */
struct BasisLabel {
    int m = 0;
    int j = 0;
    int k = 0;

    friend bool operator==(const BasisLabel&, const BasisLabel&) = default;
};

/* Flat ordering of the basis labels for degree <= n, blocks by ascending m
 * and lexicographic inside a block.  The order for degree n-1 is always an
 * exact prefix of the order for degree n, which is what makes coefficient
 * vectors from a lower degree reusable verbatim at a higher one. */
class MultiIndexOrder {
  public:
    static MultiIndexOrder disk(int n) { return MultiIndexOrder(2, n); }
    static MultiIndexOrder ball(int n) { return MultiIndexOrder(3, n); }

    int dim() const { return d_; }
    int degree() const { return n_; }
    int size() const { return static_cast<int>(entries_.size()); }
    const std::vector<BasisLabel>& entries() const { return entries_; }
    const BasisLabel& operator[](int i) const { return entries_[i]; }

  private:
    MultiIndexOrder(int d, int n) : d_(d), n_(n) {
        if (n < 0) throw std::invalid_argument("MultiIndexOrder: degree must be >= 0");
        entries_.reserve(poly_space_dim(d, n));
        for (int m = 0; m <= n; ++m) {
            if (d == 2) {
                for (int k = 0; k <= m; ++k) entries_.push_back({m, 0, k});
            } else {
                for (int j = 0; j <= m; ++j)
                    for (int k = 0; k + j <= m; ++k) entries_.push_back({m, j, k});
            }
        }
        assert(size() == poly_space_dim(d, n));
    }

    int d_;
    int n_;
    std::vector<BasisLabel> entries_;
};

}  // namespace specball
