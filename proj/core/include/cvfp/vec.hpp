#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <initializer_list>
#include <span>

namespace cvfp {

inline constexpr int kMaxDim = 3;

/// Small fixed-capacity vector for positions and velocities in dimension 1..3.
class Vec {
  public:
    Vec() = default;
    explicit Vec(int dim) : dim_(dim) { assert(dim >= 1 && dim <= kMaxDim); }
    Vec(std::initializer_list<double> xs) : dim_(static_cast<int>(xs.size())) {
        assert(dim_ >= 1 && dim_ <= kMaxDim);
        int i = 0;
        for (double x : xs) v_[i++] = x;
    }

    static Vec filled(int dim, double value) {
        Vec r(dim);
        for (int i = 0; i < dim; ++i) r.v_[i] = value;
        return r;
    }

    int dim() const noexcept { return dim_; }
    double& operator[](int i) noexcept { return v_[i]; }
    double operator[](int i) const noexcept { return v_[i]; }

    std::span<double> span() noexcept { return {v_.data(), static_cast<std::size_t>(dim_)}; }
    std::span<const double> span() const noexcept { return {v_.data(), static_cast<std::size_t>(dim_)}; }

    Vec& operator+=(const Vec& o) noexcept {
        for (int i = 0; i < dim_; ++i) v_[i] += o.v_[i];
        return *this;
    }
    Vec& operator-=(const Vec& o) noexcept {
        for (int i = 0; i < dim_; ++i) v_[i] -= o.v_[i];
        return *this;
    }
    Vec& operator*=(double s) noexcept {
        for (int i = 0; i < dim_; ++i) v_[i] *= s;
        return *this;
    }

    friend Vec operator+(Vec a, const Vec& b) noexcept { return a += b; }
    friend Vec operator-(Vec a, const Vec& b) noexcept { return a -= b; }
    friend Vec operator*(Vec a, double s) noexcept { return a *= s; }
    friend Vec operator*(double s, Vec a) noexcept { return a *= s; }
    friend Vec operator-(Vec a) noexcept { return a *= -1.0; }

    friend bool operator==(const Vec& a, const Vec& b) noexcept {
        if (a.dim_ != b.dim_) return false;
        for (int i = 0; i < a.dim_; ++i)
            if (a.v_[i] != b.v_[i]) return false;
        return true;
    }

  private:
    std::array<double, kMaxDim> v_{};
    int dim_ = 1;
};

inline double dot(const Vec& a, const Vec& b) noexcept {
    double s = 0.0;
    for (int i = 0; i < a.dim(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const Vec& a) noexcept { return dot(a, a); }
inline double norm(const Vec& a) noexcept { return std::sqrt(norm2(a)); }

}  // namespace cvfp
