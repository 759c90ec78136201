#pragma once

#include "dsl2/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace dsl2 {

enum class Boundary { periodic, fixed };

/// Real function on an M x N window of the square lattice, stored row-major
/// (m outer, n inner).
///
/// Periodic windows wrap every shift. Fixed windows only allow in-window
/// access; stencil evaluations on them are restricted to the sites where every
/// shift used stays inside (see `stencil_valid`).
class LatticeField {
public:
    LatticeField() = default;
    LatticeField(int rows, int cols, double value = 0.0, Boundary boundary = Boundary::periodic)
        : rows_(rows), cols_(cols), boundary_(boundary),
          values_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), value) {
        if (rows < 2 || cols < 2) {
            throw Error(ErrorCode::InvalidInput, "lattice window dimensions must be >= 2");
        }
    }

    template <typename F>
    static LatticeField generate(int rows, int cols, F&& f, Boundary boundary = Boundary::periodic) {
        LatticeField out(rows, cols, 0.0, boundary);
        for (int m = 0; m < rows; ++m) {
            for (int n = 0; n < cols; ++n) {
                out.set(m, n, f(m, n));
            }
        }
        return out;
    }

    [[nodiscard]] int rows() const noexcept { return rows_; }
    [[nodiscard]] int cols() const noexcept { return cols_; }
    [[nodiscard]] Boundary boundary() const noexcept { return boundary_; }
    [[nodiscard]] bool periodic() const noexcept { return boundary_ == Boundary::periodic; }
    [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }

    /// Value at (m, n); periodic windows wrap, fixed windows throw when outside.
    [[nodiscard]] double operator()(int m, int n) const { return values_[index(m, n)]; }

    void set(int m, int n, double value) { values_[index(m, n)] = value; }

    [[nodiscard]] bool same_shape(const LatticeField& other) const noexcept {
        return rows_ == other.rows_ && cols_ == other.cols_ && boundary_ == other.boundary_;
    }

    /// True when every site (m + dm, n + dn) for the given offset box lies in
    /// the window. Always true on periodic windows.
    [[nodiscard]] bool stencil_valid(int m, int n, int dm_lo, int dm_hi, int dn_lo, int dn_hi) const noexcept {
        if (periodic()) {
            return true;
        }
        return m + dm_lo >= 0 && m + dm_hi < rows_ && n + dn_lo >= 0 && n + dn_hi < cols_;
    }

    [[nodiscard]] double max_abs() const noexcept {
        double out = 0.0;
        for (double v : values_) {
            out = std::max(out, std::abs(v));
        }
        return out;
    }

    [[nodiscard]] bool all_finite() const noexcept {
        return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
    }

private:
    [[nodiscard]] std::size_t index(int m, int n) const {
        if (periodic()) {
            m = ((m % rows_) + rows_) % rows_;
            n = ((n % cols_) + cols_) % cols_;
        } else if (m < 0 || m >= rows_ || n < 0 || n >= cols_) {
            throw Error(ErrorCode::InvalidInput, "lattice access outside fixed window");
        }
        return static_cast<std::size_t>(m) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(n);
    }

    int rows_ = 0;
    int cols_ = 0;
    Boundary boundary_ = Boundary::periodic;
    std::vector<double> values_;
};

/// Pointwise combination of same-shape fields.
template <typename F>
LatticeField pointwise(const LatticeField& a, const LatticeField& b, F&& f) {
    if (!a.same_shape(b)) {
        throw Error(ErrorCode::InvalidInput, "lattice fields differ in shape");
    }
    return LatticeField::generate(
        a.rows(), a.cols(), [&](int m, int n) { return f(a(m, n), b(m, n)); }, a.boundary());
}

inline double max_abs_difference(const LatticeField& a, const LatticeField& b) {
    return pointwise(a, b, [](double x, double y) { return x - y; }).max_abs();
}

} // namespace dsl2
