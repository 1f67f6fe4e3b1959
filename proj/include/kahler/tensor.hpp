#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

namespace kahler {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Dense row-major array with a fixed number of indices. Index order is
// whatever the owning type documents; every index runs over the same extent.
template <std::size_t Rank>
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(int extent, double fill = 0.0)
        : extent_(extent), data_(size_for(extent), fill) {}

    int extent() const { return extent_; }
    std::size_t size() const { return data_.size(); }

    template <typename... I>
    double& operator()(I... idx) {
        static_assert(sizeof...(I) == Rank);
        return data_[offset({static_cast<int>(idx)...})];
    }
    template <typename... I>
    double operator()(I... idx) const {
        static_assert(sizeof...(I) == Rank);
        return data_[offset({static_cast<int>(idx)...})];
    }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    double max_abs() const {
        double m = 0.0;
        for (double v : data_) m = std::max(m, std::abs(v));
        return m;
    }

    Tensor& operator+=(const Tensor& o) {
        assert(o.extent_ == extent_);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
        return *this;
    }
    Tensor& operator-=(const Tensor& o) {
        assert(o.extent_ == extent_);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
        return *this;
    }
    Tensor& operator*=(double s) {
        for (double& v : data_) v *= s;
        return *this;
    }
    friend Tensor operator-(Tensor a, const Tensor& b) { return a -= b; }
    friend Tensor operator+(Tensor a, const Tensor& b) { return a += b; }
    friend Tensor operator*(double s, Tensor a) { return a *= s; }

private:
    static std::size_t size_for(int extent) {
        std::size_t s = 1;
        for (std::size_t r = 0; r < Rank; ++r) s *= static_cast<std::size_t>(extent);
        return s;
    }
    std::size_t offset(std::array<int, Rank> idx) const {
        std::size_t off = 0;
        for (int i : idx) {
            assert(i >= 0 && i < extent_);
            off = off * static_cast<std::size_t>(extent_) + static_cast<std::size_t>(i);
        }
        return off;
    }

    int extent_ = 0;
    std::vector<double> data_;
};

using Tensor3 = Tensor<3>;
using Tensor4 = Tensor<4>;

inline double max_abs(const Mat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }
inline double max_abs(const Vec& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

// max|a - b| scaled by max(1, max|b|). Used wherever a check is "relative"
// but the reference may legitimately be zero.
inline double scaled_residual(double diff, double scale) { return diff / std::max(1.0, scale); }

template <std::size_t R>
double scaled_difference(const Tensor<R>& a, const Tensor<R>& b) {
    return scaled_residual((a - b).max_abs(), b.max_abs());
}
inline double scaled_difference(const Mat& a, const Mat& b) {
    return scaled_residual(max_abs(Mat(a - b)), max_abs(b));
}

}  // namespace kahler
